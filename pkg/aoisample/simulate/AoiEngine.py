"""Sampling/transmission timeline and the age-of-information sawtooth.

A frame k spans [S_k, S_{k+1}). The packet sampled at S_k is received at
R_k = max(R_{k-1}, S_k) + D_k and, once the ACK is back, the policy picks a
waiting time W_k so that S_{k+1} = R_k + W_k. The cumulative age over frame k
has the closed form

    X_k = (D_{k-1} + W_{k-1}) D_k + (D_k + W_k)**2 / 2

Frame 0 is a virtual sample taken at time 0 with zero delay: the age is 0 at
t = 0 and grows with slope 1 until the first reception.
"""
from collections import deque
from bisect import bisect_right
from typing import NamedTuple

import numpy as np
import pandas as pd

TRACE_COLUMNS = ['k', 'S_k', 'W_k', 'D_k', 'R_k', 'X_k']


class FrameRecord(NamedTuple):
    """One sampling frame.

    W is the waiting time chosen after the ACK of this frame; it stays 0
    until the frame is closed with :meth:`close`.
    """
    k: int
    S: float
    D: float
    R: float
    W: float = 0.

    @property
    def L(self):
        return self.D + self.W

    @property
    def Q(self):
        L = self.D + self.W
        return 0.5 * L * L

    def close(self, wait):
        """Return the frame with its waiting time fixed."""
        if wait < 0:
            raise ValueError(f'Waiting time must be nonnegative, got {wait}')
        return FrameRecord(self.k, self.S, self.D, self.R, float(wait))


VIRTUAL_FRAME = FrameRecord(0, 0., 0., 0., 0.)


def fcfs_frame(prev, sample_time, delay):
    """First-come-first-serve reception of a packet sampled at ``sample_time``.

    The sample may be taken before the previous packet is delivered, in which
    case it queues behind it.
    """
    if not delay > 0:
        raise ValueError(f'Transmission delay must be positive, got {delay}')
    if sample_time < prev.S:
        raise ValueError(
            f'Sample time {sample_time} precedes previous sample {prev.S}')
    R = max(prev.R, sample_time) + delay
    return FrameRecord(prev.k + 1, float(sample_time), float(delay), R)


def step_frame(prev, wait, delay):
    """Open frame k+1 after waiting ``wait`` past the ACK of frame k.

    Args:
        prev (FrameRecord): frame k
        wait (float): waiting time after R_k, >= 0
        delay (float): transmission delay D_{k+1}, > 0

    Returns:
        FrameRecord: frame k+1 with S = R_k + wait, W still to be chosen

    Example:

        >>> step_frame(FrameRecord(1, 9., 1., 10.), 2., 1.)
        FrameRecord(k=2, S=12.0, D=1.0, R=13.0, W=0.0)
    """
    if wait < 0:
        raise ValueError(f'Waiting time must be nonnegative, got {wait}')
    return fcfs_frame(prev, prev.R + wait, delay)


def frame_area(D_prev, W_prev, D_k, W_k):
    """Cumulative age over [S_k, S_{k+1}) for ACK-gated sampling.

    D_prev may be 0 for the virtual frame preceding the first sample.
    """
    if D_prev < 0 or not D_k > 0:
        raise ValueError(f'Invalid delays D_prev={D_prev}, D_k={D_k}')
    if W_prev < 0 or W_k < 0:
        raise ValueError(f'Invalid waits W_prev={W_prev}, W_k={W_k}')
    L_k = D_k + W_k
    return (D_prev + W_prev) * D_k + 0.5 * L_k * L_k


class AoiTrajectory(object):

    def __init__(self, start_time=0., start_age=0.):
        """Piecewise-linear age curve built from reception events.

        The age grows with slope 1 between receptions and drops to R_k - S_k
        when packet k is delivered. Integrals are evaluated exactly from the
        cumulative area stored at every reception.

        Args:
            start_time (float, optional): origin of the curve
            start_age (float, optional): age at the origin
        """
        self._times = [float(start_time)]
        self._ages = [float(start_age)]
        self._areas = [0.]
        self.horizon = float(start_time)
        self._cache = None

    def __len__(self):
        return len(self._times)

    def record_reception(self, R, S):
        """Deliver the packet sampled at S at time R."""
        if R < self._times[-1]:
            raise ValueError(
                f'Reception at {R} precedes last reception {self._times[-1]}')
        dt = R - self._times[-1]
        before = self._ages[-1] + dt
        self._areas.append(self._areas[-1] + self._ages[-1] * dt + 0.5 * dt * dt)
        self._times.append(R)
        # an older sample can never refresh the receiver
        self._ages.append(min(before, R - S))
        if R > self.horizon:
            self.horizon = R
        self._cache = None

    def extend_to(self, t):
        """Declare the curve known up to t (no reception before t)."""
        if t > self.horizon:
            self.horizon = float(t)

    def _arrays(self):
        if self._cache is None:
            self._cache = (np.array(self._times), np.array(self._ages),
                           np.array(self._areas))
        return self._cache

    def _check(self, t):
        if np.any(np.asarray(t) < self._times[0]) or \
                np.any(np.asarray(t) > self.horizon):
            raise ValueError(
                f'Query outside the simulated horizon '
                f'[{self._times[0]}, {self.horizon}]')

    def cumulative_area(self, t):
        """Integral of the age from the origin to t (scalar or array)."""
        self._check(t)
        if np.ndim(t) == 0:
            i = bisect_right(self._times, t) - 1
            dt = t - self._times[i]
            return self._areas[i] + self._ages[i] * dt + 0.5 * dt * dt
        times, ages, areas = self._arrays()
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(times, t, side='right') - 1
        dt = t - times[i]
        return areas[i] + ages[i] * dt + 0.5 * dt * dt

    def integrate_age(self, start, stop):
        """Exact integral of A(t) over [start, stop]."""
        if np.any(np.asarray(start) > np.asarray(stop)):
            raise ValueError(f'Empty interval [{start}, {stop}]')
        return self.cumulative_area(stop) - self.cumulative_area(start)

    def age_at(self, t):
        self._check(t)
        i = bisect_right(self._times, t) - 1
        return self._ages[i] + (t - self._times[i])

    @property
    def accumulated_area(self):
        return self.cumulative_area(self.horizon)

    @property
    def breakpoints(self):
        """Vertices (time, age) of the sawtooth up to the horizon."""
        vertices = [(self._times[0], self._ages[0])]
        for i in range(1, len(self._times)):
            t = self._times[i]
            vertices.append((t, self._ages[i - 1] + t - self._times[i - 1]))
            vertices.append((t, self._ages[i]))
        last_t, last_age = self._times[-1], self._ages[-1]
        if self.horizon > last_t:
            vertices.append((self.horizon, last_age + self.horizon - last_t))
        return vertices


def integrate_age(traj, start, stop):
    """Exact integral of the age curve ``traj`` over [start, stop]."""
    return traj.integrate_age(start, stop)


class FrameTrace(object):

    def __init__(self, maxlen=None):
        """Closed frames with their cumulative age.

        Args:
            maxlen (int, optional): keep only the last ``maxlen`` frames
        """
        self.rows = deque(maxlen=maxlen)

    def __len__(self):
        return len(self.rows)

    def append(self, frame, area):
        self.rows.append((frame.k, frame.S, frame.W, frame.D, frame.R, area))

    def to_frame(self):
        return pd.DataFrame(list(self.rows), columns=TRACE_COLUMNS)

    def to_records(self):
        dtype = [('k', np.int64)] + [(c, np.float64) for c in TRACE_COLUMNS[1:]]
        return np.array(list(self.rows), dtype=dtype)


class AoiEngine(object):

    def __init__(self, keep_trace=False, marks=()):
        """Advance frames and keep the age curve of one replication.

        Args:
            keep_trace (bool or int, optional): False to drop closed frames,
                True to keep all of them, an integer to keep the last ones
            marks (sequence, optional): times whose first frame is recorded
                in ``mark_frames``, the index of the first packet sampled at
                or after each of them

        Example:

            >>> engine = AoiEngine()
            >>> frame = engine.transmit(0., 1.2)
            >>> frame = engine.transmit(0.3, 0.8)
            >>> engine.finish(0., engine.next_sample_time(0.))
        """
        self.trajectory = AoiTrajectory()
        self.last = VIRTUAL_FRAME
        self._closed = None

        if keep_trace is True:
            self.trace = FrameTrace()
        elif keep_trace:
            self.trace = FrameTrace(maxlen=int(keep_trace))
        else:
            self.trace = None

        # sum of X_k over the frames k whose end S_{k+1} has been reached
        self.complete_area = 0.
        self.first_sample_time = None
        self.horizon = None

        self._pending = sorted(float(t) for t in marks)
        self.mark_frames = {}

    @property
    def frames(self):
        return self.last.k

    def next_sample_time(self, wait):
        return self.last.R + wait

    def _close(self, wait):
        closed = self.last.close(wait)
        area = None
        if self._closed is not None:
            prev = self._closed
            area = frame_area(prev.D, prev.W, closed.D, closed.W)
            if self.trace is not None:
                self.trace.append(closed, area)
        self._closed = closed
        return closed, area

    def transmit(self, wait, delay):
        """Close the current frame with ``wait`` and send the next packet.

        Returns:
            FrameRecord: the newly opened frame
        """
        closed, area = self._close(wait)
        if area is not None:
            self.complete_area += area
        frame = step_frame(closed, wait, delay)
        if frame.k == 1:
            self.first_sample_time = frame.S
        while self._pending and frame.S >= self._pending[0]:
            self.mark_frames[self._pending.pop(0)] = frame.k
        self.trajectory.record_reception(frame.R, frame.S)
        self.last = frame
        return frame

    def finish(self, wait, horizon):
        """Close the last frame and fix the observation horizon."""
        if horizon < self.last.S:
            raise ValueError(
                f'Horizon {horizon} ends before the last sample {self.last.S}')
        if self.last.k > 0:
            self._close(wait)
        self.trajectory.extend_to(horizon)
        self.horizon = float(horizon)

    def decomposition_audit(self):
        """Compare the frame decomposition with the direct age integral.

        Returns:
            tuple(float, float): (sum of X_k plus the partial last frame,
            integral of the age over [0, horizon])
        """
        if self.horizon is None:
            raise ValueError('Call finish() before auditing the run')
        direct = self.trajectory.integrate_age(0., self.horizon)
        if self.last.k == 0:
            return direct, direct
        # [0, S_1) precedes the first frame
        head = self.trajectory.integrate_age(0., self.first_sample_time)
        partial = self.trajectory.integrate_age(self.last.S, self.horizon)
        return head + self.complete_area + partial, direct


def audit_decomposition(frames, trajectory, horizon):
    """Frame decomposition of the age integral from a list of closed frames.

    Args:
        frames (list(FrameRecord)): frames 1..K in order, W fixed on each
        trajectory (AoiTrajectory): age curve of the same run
        horizon (float): end of the observation window, S_K <= horizon

    Returns:
        tuple(float, float): (integral over [0, S_1] + sum of X_k for
        k < K + integral over [S_K, horizon], integral over [0, horizon])
    """
    direct = trajectory.integrate_age(0., horizon)
    if not frames:
        return direct, direct
    if horizon < frames[-1].S:
        raise ValueError(
            f'Horizon {horizon} ends before the last sample {frames[-1].S}')
    total = trajectory.integrate_age(0., frames[0].S)
    prev = VIRTUAL_FRAME.close(frames[0].S)
    for frame in frames[:-1]:
        total += frame_area(prev.D, prev.W, frame.D, frame.W)
        prev = frame
    total += trajectory.integrate_age(frames[-1].S, horizon)
    return total, direct
