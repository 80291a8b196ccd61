import logging
import logging.config

from . import logger_settings
from .scenarios import REFERENCE_SEGMENTS, REFERENCE_HORIZON, REFERENCE_REPLICATIONS
from .scenarios import REFERENCE_DETECTOR, REFERENCE_D_LB, reference_experiment

# Debug
DEBUG = False

# Default logger
logging.config.dictConfig(logger_settings.DEFAULT_LOGGING)
logger = logging.getLogger('aoisample')

# Assumed delay lower bound used by the Robbins-Monro step sizes
D_LB = 0.1

# Change detection defaults
WINDOW_SIZE = 50
BOOTSTRAP_REPLICATES = 500
ALPHA = 0.05
GRID_SIZE = 100

# Threshold solver
BISECTION_XTOL = 1e-9
MC_SAMPLES = 10**7

# Number of evaluation times of the running average AoI
METRIC_POINTS = 600

# Number of standard normals drawn at once by a delay process
DELAY_BLOCK = 4096

# Format used for every float written to csv
CSV_FLOAT_FORMAT = '%.10g'
