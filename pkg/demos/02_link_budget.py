"""Received power, SNR and rate across the cell, with and without blockage."""
# %%
import numpy as np

from mmwsim import LinkBudget, UeGeometry, feasible_rate, received_power, snr

lb = LinkBudget()
print(f"noise power {lb.noise_power:.2f} dBm")

# %%
print(f"{'radius':>6} {'dist':>6} {'p_rx':>8} {'SNR':>7} {'rate':>9}  {'SNR@40dB':>8}")
for radius in (0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0):
    geom = UeGeometry(radius, 2.0)
    p = received_power(lb, geom)
    z = snr(p, lb.noise_power)
    z_blocked = snr(received_power(lb, geom, 40.0), lb.noise_power)
    rate = feasible_rate(z, lb)
    print(f"{radius:6.1f} {geom.distance:6.2f} {p:8.2f} {z:7.2f} {rate / 1e9:7.2f}Gb {z_blocked:8.2f}")

# %% How long a DECAY ramp takes to push each UE into outage
for radius in (0.0, 7.5, 15.0):
    z = snr(received_power(lb, UeGeometry(radius, 2.0)), lb.noise_power)
    print(f"r = {radius:4.1f} m: outage {z / 0.2:6.1f} ms after DECAY starts")
