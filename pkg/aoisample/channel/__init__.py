from .DelayModel import LognormalSpec, PointMassSpec, DelaySegment, DelayProcess
from .DelayModel import sample_delay, segment_at, true_moments, spec_from_config
