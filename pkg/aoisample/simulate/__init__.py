from .AoiEngine import FrameRecord, VIRTUAL_FRAME, TRACE_COLUMNS
from .AoiEngine import fcfs_frame, step_frame, frame_area
from .AoiEngine import AoiTrajectory, FrameTrace, AoiEngine, integrate_age
from .AoiEngine import audit_decomposition
from .Controller import Controller, ControllerState, DetectionEvent
from .Simulator import simulate, time_average_age
