import numpy as np

from aoisample.config import logger
from aoisample.simulate.AoiEngine import AoiEngine


def simulate(process, policy, horizon=None, max_frames=None, keep_trace=False,
             marks=()):
    """Run one policy over one channel realisation.

    Frames are generated until the next sampling time reaches the horizon or
    ``max_frames`` packets have been sent. The policy chooses W_k from the
    ACK of packet k (delay, sample time and reception time).

    Args:
        process (DelayProcess): delay sampler, consumed by the run
        policy (WaitingPolicy): sampling policy
        horizon (float, optional): observation horizon T
        max_frames (int, optional): number of packets to send
        keep_trace (bool or int, optional): keep the closed frames
        marks (sequence, optional): times whose first frame index is recorded
            in ``engine.mark_frames``

    Returns:
        AoiEngine: finished engine holding the age curve of the run. Without
        a horizon the run ends at the next sampling time.

    Raises:
        ValueError: if neither a horizon nor a number of frames is given
    """
    if horizon is None and max_frames is None:
        raise ValueError('Give a horizon or a maximum number of frames')
    if horizon is not None and not horizon > 0:
        raise ValueError(f'Horizon must be positive, got {horizon}')

    engine = AoiEngine(keep_trace=keep_trace, marks=marks)
    wait = 0.
    while True:
        S = engine.next_sample_time(wait)
        if horizon is not None and S >= horizon:
            break
        if max_frames is not None and engine.frames >= max_frames:
            break
        D = process.sample_delay(S)
        frame = engine.transmit(wait, D)
        wait = policy.on_ack(frame.k, D, sample_time=frame.S, ack_time=frame.R)

    end = engine.next_sample_time(wait) if horizon is None else horizon
    engine.finish(wait, end)
    logger.debug(
        f'{policy.name}: {engine.frames} frames, average age '
        f'{engine.trajectory.cumulative_area(end) / end:.6g}')
    return engine


def time_average_age(engine, t):
    """Running average of the age, the integral over [0, t] divided by t."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError('Averaging times must be positive')
    return engine.trajectory.cumulative_area(t) / t
