"""Waiting-time rules and the Robbins-Monro threshold learner.

After observing the delay d of the last packet, a threshold policy waits
(gamma - d)^+ before sampling again. The learner drives its estimate of the
optimal threshold with

    gamma_{k+1} = (gamma_k + eta_k (Q_k - gamma_k L_k))^+

where L_k = D_k + W_k, Q_k = L_k**2 / 2 and eta_k = 1 / (2 d_lb) for k = 1,
1 / ((k + 2) d_lb) afterwards.
"""
from typing import NamedTuple

from aoisample import config


class LearnerState(NamedTuple):
    """Estimate of the optimal threshold.

    frames_since_reset counts the updates applied since the last reset; the
    next update uses the step size eta_{frames_since_reset + 1}.
    """
    gamma: float = 0.
    frames_since_reset: int = 0
    d_lb: float = config.D_LB


def wait_zero(delay):
    """Zero-wait rule: sample again as soon as the ACK arrives."""
    if not delay > 0:
        raise ValueError(f'Transmission delay must be positive, got {delay}')
    return 0.


def wait_threshold(gamma, delay):
    """Threshold rule (gamma - delay)^+."""
    if not delay > 0:
        raise ValueError(f'Transmission delay must be positive, got {delay}')
    if gamma < 0:
        raise ValueError(f'Threshold must be nonnegative, got {gamma}')
    return max(gamma - delay, 0.)


def rm_step_size(k, d_lb):
    """Step size of the k-th update (k counted from the last reset)."""
    if k < 1:
        raise ValueError(f'Step index starts at 1, got {k}')
    if not d_lb > 0:
        raise ValueError(f'd_lb must be positive, got {d_lb}')
    if k == 1:
        return 1. / (2. * d_lb)
    return 1. / ((k + 2.) * d_lb)


def rm_update(state, Q, L):
    """One Robbins-Monro update of the threshold estimate.

    Args:
        state (LearnerState): current estimate
        Q (float): half squared frame length L**2 / 2
        L (float): frame length D_k + W_k

    Returns:
        LearnerState: updated estimate, gamma projected onto [0, inf)

    Example:

        >>> rm_update(LearnerState(0., 0, 1.), 2., 2.)
        LearnerState(gamma=1.0, frames_since_reset=1, d_lb=1.0)
    """
    k = state.frames_since_reset + 1
    eta = rm_step_size(k, state.d_lb)
    gamma = max(state.gamma + eta * (Q - state.gamma * L), 0.)
    return LearnerState(gamma, k, state.d_lb)
