"""Closed-form moments of lognormal delays clipped from below.

For D ~ Lognormal(mu, sigma) and a threshold x > 0 the partial moments are

    E[D^r 1(D > x)] = exp(r mu + r^2 sigma^2 / 2) Phi((mu + r sigma^2 - ln x) / sigma)

which gives E[max(D, x)^r] = x^r P(D <= x) + E[D^r 1(D > x)].
"""
import numpy as np
from scipy.stats import norm


def partial_moment(mu, sigma, r, x):
    """Upper partial moment E[D^r 1(D > x)] of a lognormal variable.

    Args:
        mu (float): log-scale location
        sigma (float): log-scale shape
        r (int): order of the moment
        x (float): truncation point, x <= 0 gives the full moment

    Returns:
        float: partial moment
    """
    full = np.exp(r * mu + 0.5 * r**2 * sigma**2)
    if x <= 0:
        return float(full)
    return float(full * norm.cdf((mu + r * sigma**2 - np.log(x)) / sigma))


def lower_cdf(mu, sigma, x):
    """P(D <= x)."""
    if x <= 0:
        return 0.
    return float(norm.cdf((np.log(x) - mu) / sigma))


def clipped_moments(mu, sigma, x):
    """First and second moment of max(D, x).

    Returns:
        tuple(float, float): E[max(D, x)], E[max(D, x)**2]
    """
    p = lower_cdf(mu, sigma, x)
    m1 = x * p + partial_moment(mu, sigma, 1, x)
    m2 = x**2 * p + partial_moment(mu, sigma, 2, x)
    return m1, m2


def clipped_moments_mc(samples, x):
    """Monte Carlo estimate of E[max(D, x)] and E[max(D, x)**2]."""
    clipped = np.maximum(samples, x)
    return float(clipped.mean()), float(np.mean(clipped * clipped))
