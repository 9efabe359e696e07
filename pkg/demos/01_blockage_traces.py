"""Blockage traces: one blocker, merged blockers, and a random frame.

Run with ``python demos/01_blockage_traces.py``.  Saves a figure when
matplotlib is installed.
"""
# %%
import numpy as np

from mmwsim import BlockageParams, ChannelState, generate_trace, trace_from_arrivals

DT = 0.0625  # ms per slot
params = BlockageParams(arrival_rate=1.0, mean_duration=1000.0)

# %% A single blocker at t = 0 holding the link for 300 ms
single = trace_from_arrivals(params, [0.0], [300.0], 12_000, DT)
for state in ChannelState:
    slots = np.count_nonzero(single.states == state)
    print(f"{state.name:5s} {slots:6d} slots = {slots * DT:7.2f} ms")

# %% Two blockers overlapping: the longer one sets the NLOS end
merged = trace_from_arrivals(params, [0.0, 50.0], [300.0, 600.0], 16_000, DT)
nlos = np.flatnonzero(merged.states == ChannelState.NLOS)
print(f"merged NLOS from {nlos[0] * DT:.1f} ms to {(nlos[-1] + 1) * DT:.1f} ms")

# %% A full 3 s frame for scenario (c)
frame = generate_trace(BlockageParams(arrival_rate=2.0, mean_duration=3000.0), 48_000, DT, seed=4)
blocked = np.mean(frame.states == ChannelState.NLOS)
print(f"scenario (c) frame: {frame.blockage_count()} NLOS episodes, {blocked:.0%} of slots in NLOS")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    t = np.arange(len(frame)) * DT
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(t, frame.values)
    ax.set_xlabel("time [ms]")
    ax.set_ylabel("attenuation [dB]")
    fig.tight_layout()
    fig.savefig("blockage_trace.png", dpi=120)
    print("saved blockage_trace.png")
