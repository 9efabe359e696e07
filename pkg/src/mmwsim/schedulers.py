"""Scheduling policies: PF, MaxMin and blockage-aware PF (BA-PF).

Every slot goes to exactly one UE.  Ties are broken uniformly at random using
one uniform draw per slot from the scheduler's tie-break generator, so a
policy that schedules slot by slot and one that schedules a whole window at
once consume the generator identically.

These functions are the readable reference implementation.  The engine runs
the same logic in compiled form (:mod:`mmwsim._kernels`) and the test suite
checks the two agree slot for slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError, SchedulingError

__all__ = [
    "POLICIES",
    "SchedulerState",
    "PredictedWindow",
    "pick",
    "pf_priority",
    "pf_select",
    "maxmin_select",
    "update_avg",
    "bapf_schedule_window",
    "schedule_slot",
    "assignment_matrix",
]

POLICIES = ("pf", "maxmin", "bapf")


@dataclass
class SchedulerState:
    """Mutable per-policy state for one drop.

    Attributes
    ----------
    avg_rates : ndarray
        Exponential moving average of realized rate per UE, bit/s.
    ema_weight : float
        Weight of the newest sample in the moving average.
    rng : Generator
        Tie-break generator; one draw is consumed per scheduled slot.
    window_start, window_assignment
        BA-PF only: first slot and per-slot UE index of the current window,
        or ``None`` when the window was not flagged and PF is used instead.
    """

    avg_rates: np.ndarray
    ema_weight: float = 0.5
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    window_start: int | None = None
    window_len: int = 0
    window_assignment: np.ndarray | None = None

    def __post_init__(self):
        self.avg_rates = np.array(self.avg_rates, dtype=float)
        if not 0.0 <= self.ema_weight <= 1.0:
            raise ParameterError(f"ema_weight must be in [0, 1], got {self.ema_weight}")
        if np.any(self.avg_rates < 0):
            raise ParameterError("average rates must be non-negative")


@dataclass(frozen=True, eq=False)
class PredictedWindow:
    """Predicted rates for slots ``start .. start + len(rates) - 1``."""

    start: int
    rates: np.ndarray  # (n_slots, n_ues) bit/s
    blockage: bool


def pick(priority, u01):
    """Index of the largest priority; ties resolved by the uniform ``u01``.

    When every priority is zero the pick is uniform over all UEs.
    """
    priority = np.asarray(priority, dtype=float)
    best = priority.max()
    if best <= 0:
        candidates = np.arange(priority.size)
    else:
        candidates = np.flatnonzero(priority == best)
    return int(candidates[int(u01 * candidates.size)])


def pf_priority(feasible, avg_rates):
    """Feasible rate over average rate; infinite for a zero average."""
    feasible = np.asarray(feasible, dtype=float)
    avg = np.asarray(avg_rates, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        prio = np.where(avg > 0, feasible / avg, np.inf)
    return np.where(feasible > 0, prio, 0.0)


def pf_select(feasible, state):
    """Proportional-fair choice for one slot."""
    return pick(pf_priority(feasible, state.avg_rates), state.rng.random())


def maxmin_select(state):
    """UE with the lowest average rate; a zero average ranks first."""
    avg = state.avg_rates
    with np.errstate(divide="ignore", over="ignore"):
        prio = np.where(avg > 0, 1.0 / avg, np.inf)
    return pick(prio, state.rng.random())


def update_avg(state, realized):
    """Fold this slot's realized rates into the moving average in place."""
    w = state.ema_weight
    state.avg_rates = (1.0 - w) * state.avg_rates + w * np.asarray(realized, dtype=float)
    return state


def bapf_schedule_window(pred_rates, rng=None, uniforms=None):
    """Assign every slot of a prediction window, last slot first.

    Working backwards, each slot goes to the UE maximizing its predicted rate
    divided by the predicted rate it has already been given in the later
    slots of the window.  A UE with nothing assigned yet and a positive
    predicted rate outranks everyone; among several such UEs the highest
    predicted rate wins.

    Parameters
    ----------
    pred_rates : array_like, shape (n_slots, n_ues)
        Predicted feasible rate per slot and UE.
    rng : Generator, optional
        Source of the per-slot tie-break uniforms (``n_slots`` draws).
    uniforms : array_like, optional
        Explicit tie-break uniforms, one per slot, in slot order.

    Returns
    -------
    ndarray of int
        UE index for each slot of the window.
    """
    rates = np.asarray(pred_rates, dtype=float)
    if rates.ndim != 2:
        raise ParameterError("pred_rates must be a (n_slots, n_ues) array")
    n, n_ues = rates.shape
    if uniforms is None:
        if not hasattr(rng, "random"):
            rng = np.random.default_rng(rng)
        uniforms = rng.random(n)
    uniforms = np.asarray(uniforms, dtype=float)
    assignment = np.empty(n, dtype=np.int64)
    sums = np.zeros(n_ues)
    for k in range(n - 1, -1, -1):
        r = rates[k]
        fresh = (sums == 0) & (r > 0)
        if fresh.any():
            prio = np.where(fresh, r, 0.0)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                prio = np.where((sums > 0) & (r > 0), r / sums, 0.0)
        u = pick(prio, uniforms[k])
        assignment[k] = u
        sums[u] += r[u]
    return assignment


def schedule_slot(policy, state, t, feasible, window=None):
    """Pick the UE for slot ``t`` under ``policy``.

    For ``"bapf"`` a :class:`PredictedWindow` must be supplied on the first
    slot of each window.  A flagged window is assigned in one pass and its
    slots are then served from the stored assignment; an unflagged window
    falls back to PF slot by slot.
    """
    if policy == "pf":
        return pf_select(feasible, state)
    if policy == "maxmin":
        return maxmin_select(state)
    if policy != "bapf":
        raise SchedulingError(f"unknown policy {policy!r}")

    if window is not None and window.start == t:
        state.window_start = t
        state.window_len = len(window.rates)
        state.window_assignment = (
            bapf_schedule_window(window.rates, state.rng) if window.blockage else None
        )
    start = state.window_start
    if start is None or not start <= t < start + state.window_len:
        raise SchedulingError(f"BA-PF has no prediction window covering slot {t}")
    if state.window_assignment is not None:
        return int(state.window_assignment[t - start])
    return pf_select(feasible, state)


def assignment_matrix(assignment, n_ues):
    """Binary ``x_u(t)`` matrix of shape ``(n_ues, n_slots)``."""
    assignment = np.asarray(assignment)
    x = np.zeros((n_ues, assignment.size), dtype=np.int8)
    x[assignment, np.arange(assignment.size)] = 1
    return x
