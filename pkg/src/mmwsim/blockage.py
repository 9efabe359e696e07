"""Four-state human blockage model.

Each UE link moves through LOS -> DECAY -> NLOS -> RISE -> LOS.  Blockers
arrive as a Poisson process; each one holds the link in NLOS for an
exponentially distributed dwell.  Attenuation ramps up linearly at the decay
rate and down at the rise rate, so the trace is continuous and piecewise
linear.

Overlapping blockers are merged: the NLOS interval ends at the latest end time
among all blockers that arrived before it ended.  A blocker arriving while the
link is rising starts a new DECAY ramp from the current attenuation level.

All state changes are quantized to the first slot boundary at or after the
continuous-time event.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import EmptyTraceError, ParameterError

__all__ = [
    "ChannelState",
    "BlockageParams",
    "AttenuationTrace",
    "arrival_times",
    "generate_trace",
    "trace_from_arrivals",
    "LEGAL_TRANSITIONS",
]

# slack for float ratios such as 40 / (0.2 * 0.0625) landing a hair above 3200
_EPS = 1e-9


class ChannelState(enum.IntEnum):
    LOS = 0
    DECAY = 1
    NLOS = 2
    RISE = 3


LEGAL_TRANSITIONS = frozenset(
    {
        (ChannelState.LOS, ChannelState.DECAY),
        (ChannelState.DECAY, ChannelState.NLOS),
        (ChannelState.NLOS, ChannelState.RISE),
        (ChannelState.RISE, ChannelState.LOS),
        # re-blocking while the link recovers
        (ChannelState.RISE, ChannelState.DECAY),
    }
)


@dataclass(frozen=True)
class BlockageParams:
    """Blockage process parameters.

    Attributes
    ----------
    arrival_rate : float
        Blocker arrival rate in blockers per second.
    mean_duration : float
        Mean NLOS dwell per blocker in milliseconds.
    decay_rate : float
        Attenuation ramp-up speed in dB/ms.
    rise_rate : float
        Attenuation ramp-down speed in dB/ms.
    max_attenuation : float
        Attenuation of a fully blocked link in dB.
    """

    arrival_rate: float = 0.2
    mean_duration: float = 1000.0
    decay_rate: float = 0.2
    rise_rate: float = 6.7
    max_attenuation: float = 40.0

    def __post_init__(self):
        if not self.arrival_rate >= 0:
            raise ParameterError(f"arrival_rate must be >= 0, got {self.arrival_rate}")
        for name in ("mean_duration", "decay_rate", "rise_rate", "max_attenuation"):
            value = getattr(self, name)
            if not value > 0:
                raise ParameterError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True, eq=False)
class AttenuationTrace:
    """Per-slot blockage attenuation of one UE link."""

    values: np.ndarray
    states: np.ndarray
    slot_duration: float  # ms

    def __len__(self):
        return len(self.values)

    def blockage_count(self) -> int:
        """Number of NLOS episodes, counting one already in progress at slot 0."""
        nlos = self.states == ChannelState.NLOS
        if not nlos.any():
            return 0
        starts = np.flatnonzero(nlos[1:] & ~nlos[:-1])
        return len(starts) + int(nlos[0])

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["slot_index", "state_label", "attenuation_db"])
            for k, (state, value) in enumerate(zip(self.states, self.values)):
                writer.writerow([k, ChannelState(state).name, repr(float(value))])
        return path


def arrival_times(rate, horizon, seed=None):
    """Poisson arrival instants on ``[0, horizon)``.

    Parameters
    ----------
    rate : float
        Arrivals per second.
    horizon : float
        Observation length in seconds.
    seed : int, SeedSequence or Generator, optional

    Returns
    -------
    ndarray
        Sorted arrival instants in seconds.
    """
    if rate < 0:
        raise ParameterError(f"rate must be >= 0, got {rate}")
    rng = np.random.default_rng(seed)
    if rate == 0 or horizon <= 0:
        return np.empty(0)
    times = []
    t = 0.0
    # draw in chunks sized to the expected count
    chunk = max(16, int(2 * rate * horizon) + 8)
    while True:
        gaps = rng.exponential(1.0 / rate, size=chunk)
        with np.errstate(over="ignore"):  # vanishing rates overflow to inf
            arrivals = t + np.cumsum(gaps)
        inside = arrivals[arrivals < horizon]
        times.append(inside)
        if len(inside) < chunk:
            break
        t = arrivals[-1]
    return np.concatenate(times)


def _steps(delta, per_slot):
    """Slots needed to move ``delta`` dB at ``per_slot`` dB per slot."""
    if delta <= 0:
        return 0
    return max(0, math.ceil(delta / per_slot - _EPS))


def trace_from_arrivals(params, arrivals, dwells, horizon, slot_duration):
    """Build an attenuation trace from explicit blocker arrivals.

    Parameters
    ----------
    params : BlockageParams
    arrivals : array_like
        Blocker arrival instants in ms.
    dwells : array_like
        NLOS dwell of each blocker in ms, same length as ``arrivals``.
    horizon : int
        Number of slots.
    slot_duration : float
        Slot length in ms.
    """
    if horizon < 1:
        raise EmptyTraceError("horizon must be at least one slot")
    if slot_duration <= 0:
        raise ParameterError(f"slot_duration must be > 0, got {slot_duration}")
    arrivals = np.asarray(arrivals, dtype=float)
    dwells = np.asarray(dwells, dtype=float)
    if arrivals.shape != dwells.shape:
        raise ParameterError("arrivals and dwells must have the same length")
    if len(dwells) and not (dwells > 0).all():
        raise ParameterError("blocker dwells must be > 0")

    order = np.argsort(arrivals, kind="stable")
    # first slot boundary at or after each arrival
    k_arr = np.ceil(arrivals[order] / slot_duration - _EPS).astype(np.int64)
    k_arr = np.maximum(k_arr, 0)
    d_slots = dwells[order] / slot_duration

    amax = params.max_attenuation
    up = params.decay_rate * slot_duration
    down = params.rise_rate * slot_duration
    rise_len = _steps(amax, down)

    values = np.zeros(horizon)
    states = np.full(horizon, ChannelState.LOS, dtype=np.int8)

    def fill(state, start, stop, level=0.0, slope=0.0):
        lo, hi = max(start, 0), min(stop, horizon)
        if lo >= hi:
            return
        states[lo:hi] = state
        if slope:
            ramp = level + slope * np.arange(lo - start, hi - start)
            values[lo:hi] = np.clip(ramp, 0.0, amax)
        else:
            values[lo:hi] = level

    n = len(k_arr)
    i = 0
    while i < n and k_arr[i] < horizon:
        start, level = int(k_arr[i]), 0.0
        while True:
            k_nlos = start + _steps(amax - level, up)
            fill(ChannelState.DECAY, start, k_nlos, level, up)
            end = max(k_arr[i], k_nlos) + d_slots[i]
            i += 1
            while i < n and k_arr[i] < math.ceil(end - _EPS):
                end = max(end, max(k_arr[i], k_nlos) + d_slots[i])
                i += 1
            k_rise = max(math.ceil(end - _EPS), k_nlos)
            fill(ChannelState.NLOS, k_nlos, k_rise, amax)
            k_los = k_rise + rise_len
            if i < n and k_arr[i] < k_los:
                start = int(k_arr[i])
                fill(ChannelState.RISE, k_rise, start, amax, -down)
                level = max(amax - down * (start - k_rise), 0.0)
                if start >= horizon:
                    break
                continue
            fill(ChannelState.RISE, k_rise, k_los, amax, -down)
            break
    return AttenuationTrace(values=values, states=states, slot_duration=slot_duration)


def generate_trace(params, horizon, slot_duration, seed=None):
    """Draw a random attenuation trace.

    Arrivals come from a Poisson process at ``params.arrival_rate`` and each
    blocker's dwell is exponential with mean ``params.mean_duration``.  The
    result is a deterministic function of ``(params, horizon, slot_duration,
    seed)``.
    """
    if horizon < 1:
        raise EmptyTraceError("horizon must be at least one slot")
    rng = np.random.default_rng(seed)
    span_s = horizon * slot_duration / 1000.0
    arrivals_ms = 1000.0 * arrival_times(params.arrival_rate, span_s, rng)
    dwells = rng.exponential(params.mean_duration, size=len(arrivals_ms))
    # exponential draws of exactly 0.0 are possible in principle
    dwells = np.maximum(dwells, np.finfo(float).tiny)
    return trace_from_arrivals(params, arrivals_ms, dwells, horizon, slot_duration)
