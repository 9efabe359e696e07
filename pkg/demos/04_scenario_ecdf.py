"""Compare PF, MaxMin and BA-PF in one blockage scenario.

Uses 40 drops so it runs in a few seconds; the acceptance suite uses 200.
"""
# %%
import sys

from mmwsim import ScenarioConfig, ScenarioGrid, run_campaign

lam, tau = (float(x) for x in sys.argv[1:3]) if len(sys.argv) > 2 else (2.0, 3000.0)
config = ScenarioConfig(drops=40, master_seed=1)
grid = ScenarioGrid((lam,), (tau,), (50.0, 200.0, 500.0))
results = run_campaign(config, grid)

# %%
pf = next(r for p, r in results if p.policy == "pf")
print(f"lambda_B = {lam} /s, tau_B = {tau} ms, {config.drops} drops")
print(f"{'policy':8} {'n_T':>5} {'p1 [Mb/s]':>10} {'gain':>7} {'mean [Gb/s]':>12} {'Jain':>6}")
for point, r in results:
    nt = "" if point.window_ms is None else f"{point.window_ms:g}"
    gain = r.p1_rate / pf.p1_rate - 1
    print(f"{point.policy:8} {nt:>5} {r.p1_rate / 1e6:10.1f} {gain:+7.0%} {r.mean_rate / 1e9:12.3f} {r.jain_mean:6.3f}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for point, r in results:
        label = point.policy if point.window_ms is None else f"{point.policy} n_T={point.window_ms:g} ms"
        ax.step(r.ecdf_values / 1e9, r.ecdf_probs, where="post", label=label)
    ax.set_xlabel("average user rate [Gb/s]")
    ax.set_ylabel("ECDF")
    ax.legend()
    fig.tight_layout()
    fig.savefig("scenario_ecdf.png", dpi=120)
    print("saved scenario_ecdf.png")
