"""Compiled per-slot scheduling loop used by the engine.

Mirrors :mod:`mmwsim.schedulers` operation for operation so the two produce
bit-identical assignments.  Keep them in sync.
"""
import numpy as np
from numba import njit

PF = 0
MAXMIN = 1
BAPF = 2

POLICY_CODES = {"pf": PF, "maxmin": MAXMIN, "bapf": BAPF}


@njit(cache=True, nogil=True)
def _pick(prio, u01):
    n = prio.size
    best = prio[0]
    for k in range(1, n):
        if prio[k] > best:
            best = prio[k]
    if best <= 0.0:
        return int(u01 * n)
    count = 0
    for k in range(n):
        if prio[k] == best:
            count += 1
    j = int(u01 * count)
    for k in range(n):
        if prio[k] == best:
            if j == 0:
                return k
            j -= 1
    return n - 1  # unreachable


@njit(cache=True, nogil=True)
def _pf_priority(feasible, avg, prio):
    for k in range(feasible.size):
        f = feasible[k]
        if f > 0.0:
            prio[k] = f / avg[k] if avg[k] > 0.0 else np.inf
        else:
            prio[k] = 0.0


@njit(cache=True, nogil=True)
def bapf_window(rates, uniforms, out):
    n, n_ues = rates.shape
    sums = np.zeros(n_ues)
    prio = np.empty(n_ues)
    for k in range(n - 1, -1, -1):
        any_fresh = False
        for u in range(n_ues):
            if sums[u] == 0.0 and rates[k, u] > 0.0:
                any_fresh = True
                break
        for u in range(n_ues):
            r = rates[k, u]
            if any_fresh:
                prio[u] = r if (sums[u] == 0.0 and r > 0.0) else 0.0
            else:
                prio[u] = r / sums[u] if (sums[u] > 0.0 and r > 0.0) else 0.0
        u_star = _pick(prio, uniforms[k])
        out[k] = u_star
        sums[u_star] += rates[k, u_star]


@njit(cache=True, nogil=True)
def run_slots(feasible, init_avg, w, uniforms, policy, window_len, flags, pred_rates):
    """Schedule every slot of a drop.

    Returns the per-slot UE index, the per-UE mean realized rate and the
    final moving averages.
    """
    T, n_ues = feasible.shape
    assign = np.empty(T, dtype=np.int64)
    avg = init_avg.copy()
    total = np.zeros(n_ues)
    prio = np.empty(n_ues)
    in_window = False
    for t in range(T):
        if policy == BAPF and t % window_len == 0:
            in_window = flags[t // window_len]
            if in_window:
                stop = min(t + window_len, T)
                bapf_window(pred_rates[t:stop], uniforms[t:stop], assign[t:stop])
        if policy == BAPF and in_window:
            u = assign[t]
        elif policy == MAXMIN:
            for k in range(n_ues):
                prio[k] = 1.0 / avg[k] if avg[k] > 0.0 else np.inf
            u = _pick(prio, uniforms[t])
        else:
            _pf_priority(feasible[t], avg, prio)
            u = _pick(prio, uniforms[t])
        assign[t] = u
        r = feasible[t, u]
        total[u] += r
        for k in range(n_ues):
            rk = r if k == u else 0.0
            avg[k] = (1.0 - w) * avg[k] + w * rk
    return assign, total / T, avg
