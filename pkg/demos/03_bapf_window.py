"""How BA-PF reorders a prediction window around an upcoming blockage."""
# %%
import numpy as np

from mmwsim import bapf_schedule_window

G = 1e9
n_slots = 16
rates = np.full((n_slots, 3), 3 * G)
rates[:, 1] = 2 * G
# UE 0 falls into outage halfway through the window
rates[8:, 0] = 0.0

assignment = bapf_schedule_window(rates, rng=0)
print("slot :", " ".join(f"{k:2d}" for k in range(n_slots)))
print("UE   :", " ".join(f"{u:2d}" for u in assignment))
print("UE 0 served in slots", np.flatnonzero(assignment == 0).tolist(), "- all before the blockage")
print("slots per UE:", np.bincount(assignment, minlength=3).tolist())
