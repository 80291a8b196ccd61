from .KSDetector import DetectorConfig, KsOutcome, KSDetector
from .KSDetector import build_windows, make_grid, ecdf_on_grid, ks_statistic
from .KSDetector import bootstrap_statistics, bootstrap_threshold, detect
from .calibration import false_alarm_rate, detection_power, null_statistics
from .calibration import calibrate_fixed_threshold
