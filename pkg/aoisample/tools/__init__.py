from .lognormal import partial_moment, lower_cdf, clipped_moments, clipped_moments_mc
from .empirical import ClippedSample
