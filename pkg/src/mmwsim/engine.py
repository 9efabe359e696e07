"""Simulation drops and Monte Carlo campaigns.

A drop places the UEs, draws one blockage trace per UE, evaluates the
channel for every slot and runs a scheduling policy over the whole frame.

Seeds
-----
Every random quantity comes from a named substream of the drop seed::

    SeedSequence(drop.entropy, spawn_key=drop.spawn_key + (stream, *index))

with ``stream`` one of :data:`PLACEMENT`, :data:`BLOCKAGE` (indexed by UE),
:data:`PREDICTION` and :data:`TIEBREAK`.  Campaign drop ``i`` uses
``SeedSequence(master_seed, spawn_key=(i,))``.  Policies never draw from the
channel substreams, so every policy in a campaign sees the same placements,
traces and prediction errors.
"""
from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .blockage import BlockageParams, ChannelState, generate_trace
from .channel import LinkBudget, UeGeometry, feasible_rate, received_power
from .exceptions import ParameterError
from .metrics import MetricsReport, build_report
from .predictor import PredictionParams, window_flags
from .schedulers import POLICIES

__all__ = [
    "PLACEMENT",
    "BLOCKAGE",
    "PREDICTION",
    "TIEBREAK",
    "ScenarioConfig",
    "ScenarioGrid",
    "ScenarioPoint",
    "DropChannel",
    "DropResult",
    "substream",
    "drop_seed",
    "place_ues",
    "build_channel",
    "schedule_drop",
    "run_drop",
    "run_campaign",
    "schedule_drop_reference",
]

log = logging.getLogger(__name__)

PLACEMENT = 0
BLOCKAGE = 1
PREDICTION = 2
TIEBREAK = 3


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce a simulation.

    Defaults form the ``table1`` preset: 8 UEs in a 15 m cell under an AP
    2 m above the UEs, 62.5 us slots, 48000-slot frames, w = 0.5.
    """

    n_ues: int = 8
    cell_radius: float = 15.0  # m
    ap_height: float = 2.0  # m
    slot_duration_us: float = 62.5
    horizon: int = 48000  # slots
    blockage: BlockageParams = field(default_factory=BlockageParams)
    link: LinkBudget = field(default_factory=LinkBudget)
    prediction: PredictionParams = field(default_factory=PredictionParams)
    policy: str = "pf"
    ema_weight: float = 0.5
    drops: int = 200
    master_seed: int = 0

    def __post_init__(self):
        if self.n_ues < 1:
            raise ParameterError(f"n_ues must be >= 1, got {self.n_ues}")
        if not self.cell_radius > 0:
            raise ParameterError(f"cell_radius must be > 0, got {self.cell_radius}")
        if not self.ap_height > 0:
            raise ParameterError(f"ap_height must be > 0, got {self.ap_height}")
        if not self.slot_duration_us > 0:
            raise ParameterError("slot_duration_us must be > 0")
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if self.policy not in POLICIES:
            raise ParameterError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not 0.0 <= self.ema_weight <= 1.0:
            raise ParameterError(f"ema_weight must be in [0, 1], got {self.ema_weight}")
        if self.drops < 1:
            raise ParameterError(f"drops must be >= 1, got {self.drops}")
        if self.master_seed < 0:
            raise ParameterError("master_seed must be non-negative")

    @classmethod
    def table1(cls, **overrides):
        return cls(**overrides)

    @property
    def slot_duration_ms(self):
        return self.slot_duration_us / 1000.0

    def with_blockage(self, **kw):
        return replace(self, blockage=replace(self.blockage, **kw))

    def with_prediction(self, **kw):
        return replace(self, prediction=replace(self.prediction, **kw))


@dataclass(frozen=True)
class ScenarioPoint:
    policy: str
    arrival_rate: float
    mean_duration: float
    window_ms: float | None = None  # BA-PF only
    sigma: float | None = None

    @property
    def tag(self):
        tag = f"lam{self.arrival_rate:g}_tau{self.mean_duration:g}"
        if self.window_ms is not None:
            tag += f"_nt{self.window_ms:g}"
        return tag


@dataclass(frozen=True)
class ScenarioGrid:
    """Cartesian grid of blockage scenarios and policies.

    PF and MaxMin ignore the prediction window, so they contribute one point
    per blockage scenario; BA-PF contributes one per window.
    """

    arrival_rates: tuple = (0.2,)
    mean_durations: tuple = (1000.0,)
    windows_ms: tuple = (50.0,)
    policies: tuple = POLICIES

    def __post_init__(self):
        for name in ("arrival_rates", "mean_durations", "windows_ms", "policies"):
            if not len(getattr(self, name)):
                raise ParameterError(f"grid field {name} is empty")
        for p in self.policies:
            if p not in POLICIES:
                raise ParameterError(f"unknown policy {p!r}")

    def points(self, prediction: PredictionParams):
        out = []
        for lam, tau in itertools.product(self.arrival_rates, self.mean_durations):
            for policy in self.policies:
                if policy == "bapf":
                    for nt in self.windows_ms:
                        sigma = replace(prediction, window_ms=float(nt)).sigma
                        out.append(ScenarioPoint(policy, float(lam), float(tau), float(nt), sigma))
                else:
                    out.append(ScenarioPoint(policy, float(lam), float(tau)))
        return out


@dataclass(frozen=True, eq=False)
class DropChannel:
    """Channel realization of one drop, shared by all policies."""

    geometry: list
    distances: np.ndarray  # (n_ues,) m
    attenuation: np.ndarray  # (T, n_ues) dB
    states: np.ndarray  # (T, n_ues) ChannelState codes
    rx_power: np.ndarray  # (T, n_ues) dBm
    feasible: np.ndarray  # (T, n_ues) bit/s
    initial_avg: np.ndarray  # (n_ues,) unblocked feasible rate
    uniforms: np.ndarray  # (T,) tie-break draws
    error: np.ndarray  # (T, n_ues) standard-normal prediction error
    covered: np.ndarray  # (n_ues,) inside the AP beam


@dataclass(frozen=True, eq=False)
class DropResult:
    avg_rates: np.ndarray  # (n_ues,) bit/s
    assigned_slots: np.ndarray  # (n_ues,) slot histogram
    blockage_counts: np.ndarray  # (n_ues,) NLOS episodes
    blocked_slots: np.ndarray  # (n_ues,) slots spent in NLOS
    distances: np.ndarray
    flagged_windows: int = 0
    assignment: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, DropResult):
            return NotImplemented
        arrays = ("avg_rates", "assigned_slots", "blockage_counts", "blocked_slots", "distances")
        same = all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
        if self.assignment is not None and other.assignment is not None:
            same = same and np.array_equal(self.assignment, other.assignment)
        return same and self.flagged_windows == other.flagged_windows


def substream(seed, *key):
    """Child SeedSequence for a named stream; pure, unlike ``SeedSequence.spawn``."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)


def drop_seed(master_seed, index):
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def place_ues(n_ues, cell_radius, ap_height, seed=None):
    """Drop ``n_ues`` UEs uniformly over a disk of radius ``cell_radius``."""
    if n_ues < 1:
        raise ParameterError(f"n_ues must be >= 1, got {n_ues}")
    if not cell_radius > 0:
        raise ParameterError(f"cell_radius must be > 0, got {cell_radius}")
    rng = np.random.default_rng(seed)
    radius = cell_radius * np.sqrt(rng.random(n_ues))
    rng.uniform(0.0, 2.0 * np.pi, n_ues)  # azimuth; rates depend on radius only
    return [UeGeometry(float(r), ap_height) for r in radius]


def build_channel(config, seed, geometry=None):
    """Draw placements and blockage traces and evaluate the channel."""
    seed = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    if geometry is None:
        geometry = place_ues(
            config.n_ues, config.cell_radius, config.ap_height, substream(seed, PLACEMENT)
        )
    elif len(geometry) != config.n_ues:
        raise ParameterError("geometry length does not match n_ues")
    T, dt = config.horizon, config.slot_duration_ms
    att = np.empty((T, config.n_ues))
    states = np.empty((T, config.n_ues), dtype=np.int8)
    for u in range(config.n_ues):
        trace = generate_trace(config.blockage, T, dt, substream(seed, BLOCKAGE, u))
        att[:, u] = trace.values
        states[:, u] = trace.states

    lb = config.link
    distances = np.array([g.distance for g in geometry])
    covered = np.array([g.in_coverage(lb.beamwidth) for g in geometry])
    rx = received_power(lb, distances[None, :], att)
    feasible = feasible_rate(rx - lb.noise_power, lb) * covered
    initial = feasible_rate(received_power(lb, distances) - lb.noise_power, lb) * covered
    uniforms = np.random.default_rng(substream(seed, TIEBREAK)).random(T)
    error = np.random.default_rng(substream(seed, PREDICTION)).standard_normal((T, config.n_ues))
    return DropChannel(
        geometry=geometry,
        distances=distances,
        attenuation=att,
        states=states,
        rx_power=rx,
        feasible=np.ascontiguousarray(feasible),
        initial_avg=np.asarray(initial, dtype=float),
        uniforms=uniforms,
        error=error,
        covered=covered,
    )


def predicted_inputs(config, channel, prediction):
    """Window length, per-window blockage flags and predicted rates for BA-PF."""
    lb = config.link
    n_slots = prediction.window_slots(config.slot_duration_ms)
    predicted = channel.rx_power + prediction.sigma * channel.error
    flags = window_flags(predicted, n_slots, prediction.detection_threshold)
    rates = feasible_rate(predicted - lb.noise_power, lb) * channel.covered
    return n_slots, flags, np.ascontiguousarray(rates)


def schedule_drop(config, channel, policy=None, prediction=None, keep_assignment=False):
    """Run one policy over a precomputed channel realization."""
    policy = policy or config.policy
    prediction = prediction or config.prediction
    n_ues = channel.feasible.shape[1]
    if policy == "bapf":
        n_slots, flags, pred_rates = predicted_inputs(config, channel, prediction)
    else:
        n_slots, flags, pred_rates = 1, np.zeros(1, dtype=np.bool_), np.empty((0, n_ues))
    assign, avg_rates, _ = _kernels.run_slots(
        channel.feasible,
        channel.initial_avg,
        float(config.ema_weight),
        channel.uniforms,
        _kernels.POLICY_CODES[policy],
        n_slots,
        flags,
        pred_rates,
    )
    nlos = channel.states == ChannelState.NLOS
    counts = np.array(
        [int(nlos[0, u]) + int(np.count_nonzero(nlos[1:, u] & ~nlos[:-1, u])) for u in range(n_ues)]
    )
    return DropResult(
        avg_rates=avg_rates,
        assigned_slots=np.bincount(assign, minlength=n_ues),
        blockage_counts=counts,
        blocked_slots=nlos.sum(axis=0),
        distances=channel.distances,
        flagged_windows=int(flags.sum()) if policy == "bapf" else 0,
        assignment=assign if keep_assignment else None,
    )


def run_drop(config, seed, keep_assignment=False, geometry=None):
    """Simulate one drop of ``config.policy``; deterministic in ``(config, seed)``."""
    channel = build_channel(config, seed, geometry=geometry)
    return schedule_drop(config, channel, keep_assignment=keep_assignment)


def _campaign_drop(config, points, index):
    results = {}
    seed = drop_seed(config.master_seed, index)
    for (lam, tau), group in itertools.groupby(points, key=lambda p: (p.arrival_rate, p.mean_duration)):
        cfg = config.with_blockage(arrival_rate=lam, mean_duration=tau)
        channel = build_channel(cfg, seed)
        for point in group:
            prediction = config.prediction
            if point.window_ms is not None:
                prediction = replace(prediction, window_ms=point.window_ms, error_std=point.sigma)
            results[point] = schedule_drop(cfg, channel, point.policy, prediction)
    return results


def run_campaign(config, grid, threads=None):
    """Run ``config.drops`` drops at every grid point.

    Returns a list of ``(ScenarioPoint, MetricsReport)`` in grid order.  Drop
    ``i`` is seeded from ``(master_seed, i)`` regardless of ``threads``, and
    aggregation is keyed by drop index, so results do not depend on the
    thread count.
    """
    points = grid.points(config.prediction)
    # group points sharing a channel realization
    order = sorted(range(len(points)), key=lambda i: (points[i].arrival_rate, points[i].mean_duration))
    grouped = [points[i] for i in order]
    threads = threads or os.cpu_count() or 1
    log.info("campaign: %d points x %d drops on %d threads", len(points), config.drops, threads)

    def job(i):
        return _campaign_drop(config, grouped, i)

    if threads == 1:
        per_drop = [job(i) for i in range(config.drops)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_drop = list(pool.map(job, range(config.drops)))

    out = []
    for point in points:
        drops = [d[point] for d in per_drop]
        out.append((point, build_report([d.avg_rates for d in drops])))
    return out


def schedule_drop_reference(config, channel, policy=None, prediction=None):
    """Slot-by-slot pure-Python run of a policy; returns ``(assignment, avg_rates)``.

    Slow; exists to cross-check the compiled loop on short horizons.
    """
    from .schedulers import PredictedWindow, SchedulerState, schedule_slot, update_avg

    policy = policy or config.policy
    prediction = prediction or config.prediction
    T, n_ues = channel.feasible.shape
    # replay the drop's tie-break draws so both paths see the same uniforms
    state = SchedulerState(
        avg_rates=channel.initial_avg.copy(),
        ema_weight=config.ema_weight,
        rng=_Replay(channel.uniforms),
    )
    if policy == "bapf":
        n_slots, flags, pred_rates = predicted_inputs(config, channel, prediction)
    assignment = np.empty(T, dtype=np.int64)
    total = np.zeros(n_ues)
    for t in range(T):
        window = None
        if policy == "bapf" and t % n_slots == 0:
            window = PredictedWindow(t, pred_rates[t : t + n_slots], bool(flags[t // n_slots]))
        u = schedule_slot(policy, state, t, channel.feasible[t], window)
        assignment[t] = u
        realized = np.zeros(n_ues)
        realized[u] = channel.feasible[t, u]
        total[u] += realized[u]
        update_avg(state, realized)
    return assignment, total / T


class _Replay:
    """Serves pre-drawn uniforms with the ``Generator.random`` signature."""

    def __init__(self, uniforms):
        self._u = np.asarray(uniforms, dtype=float)
        self._pos = 0

    def random(self, size=None):
        if size is None:
            value = float(self._u[self._pos])
            self._pos += 1
            return value
        out = self._u[self._pos : self._pos + size].copy()
        self._pos += size
        return out
