import numpy as np


class ClippedSample(object):

    def __init__(self, samples, mean=None, second_moment=None):
        """Monte Carlo moments of max(D, x) from a sorted sample.

        When the exact moments of D are given they are used as control
        variates: only the bounded correction E[(x^r - D^r) 1(D <= x)] is
        estimated from the sample, which keeps the variance finite for
        heavy-tailed delays.

        Args:
            samples (np.array): delay draws
            mean (float, optional): exact E[D]
            second_moment (float, optional): exact E[D**2]
        """
        self.samples = np.sort(np.asarray(samples, dtype=float))
        self.size = len(self.samples)
        self.prefix1 = np.concatenate(([0.], np.cumsum(self.samples)))
        self.prefix2 = np.concatenate(([0.], np.cumsum(self.samples**2)))

        self.mean = self.prefix1[-1] / self.size if mean is None else mean
        self.second_moment = self.prefix2[-1] / self.size \
            if second_moment is None else second_moment

    def moments(self, x):
        """Return E[max(D, x)] and E[max(D, x)**2]."""
        i = int(np.searchsorted(self.samples, x, side='right'))
        m1 = self.mean + (i * x - self.prefix1[i]) / self.size
        m2 = self.second_moment + (i * x * x - self.prefix2[i]) / self.size
        return m1, m2
