"""Fast self-checks behind ``mmwsim validate``.

Each check returns ``(name, passed, detail)``.  They run on short horizons
and finish in a few seconds.
"""
from __future__ import annotations

import numpy as np

from .blockage import LEGAL_TRANSITIONS, BlockageParams, ChannelState, generate_trace, trace_from_arrivals
from .channel import LinkBudget
from .engine import ScenarioConfig, build_channel, schedule_drop, schedule_drop_reference
from .metrics import jain_index
from .schedulers import bapf_schedule_window

__all__ = ["trace_violations", "run_checks"]


def trace_violations(trace, params):
    """List of human-readable invariant violations in an attenuation trace."""
    problems = []
    v, s = trace.values, trace.states
    amax = params.max_attenuation
    up = params.decay_rate * trace.slot_duration
    down = params.rise_rate * trace.slot_duration
    if v.min() < 0 or v.max() > amax:
        problems.append("attenuation outside [0, A_max]")
    if np.any(v[s == ChannelState.LOS] != 0):
        problems.append("non-zero attenuation in LOS")
    if np.any(v[s == ChannelState.NLOS] != amax):
        problems.append("attenuation below A_max in NLOS")
    change = np.flatnonzero(s[1:] != s[:-1])
    for k in change:
        pair = (ChannelState(s[k]), ChannelState(s[k + 1]))
        if pair not in LEGAL_TRANSITIONS:
            problems.append(f"illegal transition {pair[0].name}->{pair[1].name} at slot {k + 1}")
    dv = np.diff(v)
    same = s[1:] == s[:-1]
    decay = same & (s[1:] == ChannelState.DECAY)
    rise = same & (s[1:] == ChannelState.RISE)
    if not np.allclose(dv[decay], up, rtol=0, atol=1e-9):
        problems.append("DECAY slope differs from decay rate")
    if not np.allclose(dv[rise], -down, rtol=0, atol=1e-9):
        problems.append("RISE slope differs from rise rate")
    flat = same & ((s[1:] == ChannelState.LOS) | (s[1:] == ChannelState.NLOS))
    if np.any(dv[flat] != 0):
        problems.append("attenuation changes inside LOS/NLOS")
    # boundary slots: increments never overshoot a ramp step
    if np.any(dv > up + 1e-9) or np.any(dv < -down - 1e-9):
        problems.append("boundary increment exceeds ramp step")
    return problems


def _check_traces():
    params = BlockageParams(arrival_rate=4.0, mean_duration=300.0)
    bad = []
    for seed in range(20):
        trace = generate_trace(params, 48000, 0.0625, seed)
        bad += trace_violations(trace, params)
    return not bad, "20 random traces" if not bad else bad[0]


def _check_merge():
    params = BlockageParams()
    t = trace_from_arrivals(params, [0.0, 10.0], [500.0, 800.0], 30000, 0.0625)
    nlos = np.flatnonzero(t.states == ChannelState.NLOS)
    runs = np.count_nonzero(np.diff(nlos) > 1) + 1
    expected_end = int(np.ceil((200.0 + 800.0) / 0.0625))
    ok = runs == 1 and nlos[-1] + 1 == expected_end
    return ok, f"one NLOS interval ending at slot {nlos[-1] + 1}"


def _check_hand_trace():
    got = bapf_schedule_window([[4e9, 4e9], [0.0, 4e9]], uniforms=[0.5, 0.5])
    return got.tolist() == [0, 1], f"assignment {got.tolist()}"


def _check_kernel_equivalence():
    cfg = ScenarioConfig(horizon=4000).with_blockage(arrival_rate=6.0, mean_duration=80.0)
    mismatches = []
    for policy in ("pf", "maxmin", "bapf"):
        channel = build_channel(cfg, 11)
        fast = schedule_drop(cfg, channel, policy, keep_assignment=True)
        slow, _ = schedule_drop_reference(cfg, channel, policy)
        if not np.array_equal(fast.assignment, slow):
            mismatches.append(policy)
    return not mismatches, "compiled loop matches reference" if not mismatches else f"mismatch: {mismatches}"


def _check_fallback():
    cfg = ScenarioConfig(horizon=8000).with_blockage(arrival_rate=0.0)
    channel = build_channel(cfg, 5)
    pf = schedule_drop(cfg, channel, "pf", keep_assignment=True)
    ba = schedule_drop(cfg, channel, "bapf", keep_assignment=True)
    return pf == ba, "BA-PF equals PF without blockers"


def _check_noise():
    p_n = LinkBudget().noise_power
    return abs(p_n + 71.99) <= 0.01, f"noise power {p_n:.4f} dBm"


def _check_jain():
    rng = np.random.default_rng(0)
    ok = True
    for _ in range(200):
        r = rng.exponential(size=rng.integers(1, 20))
        j = jain_index(r)
        ok &= 1.0 / r.size - 1e-12 <= j <= 1.0 + 1e-12
        ok &= abs(jain_index(3.7 * r) - j) < 1e-12
    return bool(ok), "bounds and scale invariance"


CHECKS = {
    "trace-invariants": _check_traces,
    "merge-rule": _check_merge,
    "bapf-hand-trace": _check_hand_trace,
    "kernel-equivalence": _check_kernel_equivalence,
    "bapf-fallback": _check_fallback,
    "noise-power": _check_noise,
    "jain-bounds": _check_jain,
}


def run_checks():
    results = []
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
