"""Optimal waiting threshold for a known delay distribution.

For a threshold gamma the frame length is L = max(D, gamma) and the average
age of the stationary policy is

    a(gamma) = E[L**2] / (2 E[L]) + E[D]

The optimal threshold is the unique root of

    h(gamma) = E[max(D, gamma)**2] / 2 - gamma E[max(D, gamma)]

h(0) = E[D**2] / 2 > 0 and h'(gamma) = -E[max(D, gamma)] < 0, so the root is
bracketed by doubling an upper bound and located by bisection. At the root
the optimal average age is gamma* + E[D].
"""
import warnings
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from aoisample import config
from aoisample.config import logger
from aoisample.channel import LognormalSpec, PointMassSpec, true_moments
from aoisample.tools import clipped_moments, ClippedSample


class ThresholdSolution(NamedTuple):
    gamma_star: float
    aoi_star: float
    mean_delay: float


def truncated_moments(spec, gamma):
    """E[max(D, gamma)] and E[max(D, gamma)**2] in closed form."""
    if isinstance(spec, LognormalSpec):
        return clipped_moments(spec.mu, spec.sigma, gamma)
    if isinstance(spec, PointMassSpec):
        m = max(spec.value, gamma)
        return m, m * m
    raise ValueError(f'No closed form moments for {type(spec).__name__}')


def threshold_equation(spec, gamma):
    """h(gamma), positive below the optimal threshold."""
    m1, m2 = truncated_moments(spec, gamma)
    return 0.5 * m2 - gamma * m1


def ratio_objective(spec, gamma):
    """Average age of the stationary threshold policy gamma.

    gamma = 0 gives the zero-wait policy, E[D**2] / (2 E[D]) + E[D].
    """
    m1, m2 = truncated_moments(spec, gamma)
    return 0.5 * m2 / m1 + spec.mean


def grid_search_threshold(spec, gammas):
    """Evaluate the average age of fixed thresholds on a grid.

    Returns:
        tuple(float, np.array): best threshold of the grid and the average
        age of every threshold
    """
    gammas = np.asarray(gammas, dtype=float)
    values = np.array([ratio_objective(spec, g) for g in gammas])
    return float(gammas[np.argmin(values)]), values


def _bracket(h, start, max_doubling=200):
    upper = start
    for _ in range(max_doubling):
        if h(upper) < 0:
            return upper
        upper *= 2.
    raise RuntimeError(
        f'Could not bracket the optimal threshold below {upper}')


def solve_optimal_threshold(spec, method='closed_form', n_samples=None,
                            seed=None, xtol=None):
    """Optimal threshold gamma* and optimal average age of a delay spec.

    Args:
        spec (LognormalSpec or PointMassSpec): delay distribution
        method (str, optional): 'closed_form' evaluates the clipped moments
            analytically, 'monte_carlo' estimates them from draws
        n_samples (int, optional): number of draws of the Monte Carlo
            evaluation, defaults to config.MC_SAMPLES
        seed (int, optional): seed of the Monte Carlo draws
        xtol (float, optional): absolute tolerance on gamma,
            defaults to config.BISECTION_XTOL

    Returns:
        ThresholdSolution: gamma*, a* = gamma* + E[D] and E[D]

    Raises:
        ValueError: if the delay has no finite second moment or the method
            is unknown
        RuntimeError: if the root cannot be bracketed

    Example:

        >>> sol = solve_optimal_threshold(PointMassSpec(1.))
        >>> round(sol.gamma_star, 6), round(sol.aoi_star, 6)
        (0.5, 1.5)
    """
    xtol = config.BISECTION_XTOL if xtol is None else xtol
    mean, second = true_moments(spec)
    if not (np.isfinite(mean) and np.isfinite(second)):
        raise ValueError(f'Delay {spec} has no finite second moment')

    if method == 'closed_form':
        def h(g):
            return threshold_equation(spec, g)
    elif method == 'monte_carlo':
        n_samples = config.MC_SAMPLES if n_samples is None else int(n_samples)
        rng = np.random.default_rng(seed)
        sample = ClippedSample(spec.transform(rng.standard_normal(n_samples)),
                               mean=mean, second_moment=second)

        def h(g):
            m1, m2 = sample.moments(g)
            return 0.5 * m2 - g * m1
    else:
        raise ValueError(f'Solver method {method} not recognized')

    if not h(0.) > 0:
        raise RuntimeError(f'h(0) = {h(0.)} is not positive for {spec}')

    upper = _bracket(h, 10. * mean)
    gamma = bisect(h, 0., upper, xtol=xtol)
    logger.debug(f'Optimal threshold of {spec} ({method}): {gamma:.9g}')
    return ThresholdSolution(float(gamma), float(gamma + mean), float(mean))


def cross_check_threshold(spec, n_samples=None, seed=None, rtol=1e-3):
    """Solve with both methods and warn when they disagree beyond rtol.

    Returns:
        tuple(ThresholdSolution, ThresholdSolution): closed form and Monte
        Carlo solutions
    """
    exact = solve_optimal_threshold(spec)
    approx = solve_optimal_threshold(spec, method='monte_carlo',
                                     n_samples=n_samples, seed=seed)
    gap = abs(approx.gamma_star - exact.gamma_star) / exact.gamma_star
    if gap > rtol:
        warnings.warn(
            f'Monte Carlo threshold {approx.gamma_star:.6g} differs from '
            f'closed form {exact.gamma_star:.6g} by {gap:.2%} for {spec}')
    return exact, approx
