"""Link budget, SNR and Shannon rate with outage.

All power arithmetic stays in the dB domain; SNR is converted to linear only
inside the Shannon formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GeometryError, ParameterError

__all__ = [
    "THERMAL_NOISE_DENSITY",
    "LinkBudget",
    "UeGeometry",
    "noise_power",
    "received_power",
    "snr",
    "feasible_rate",
    "instantaneous_rate",
    "db_to_linear",
    "linear_to_db",
]

THERMAL_NOISE_DENSITY = -174.0  # dBm/Hz


def db_to_linear(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def noise_power(bandwidth, noise_figure):
    """Thermal noise power in dBm over ``bandwidth`` Hz."""
    if not bandwidth > 0:
        raise ParameterError(f"bandwidth must be > 0, got {bandwidth}")
    return THERMAL_NOISE_DENSITY + 10.0 * math.log10(bandwidth) + noise_figure


@dataclass(frozen=True)
class LinkBudget:
    """Static radio parameters shared by every UE link.

    Defaults are the indoor 60 GHz ceiling-AP setup: 100 mW transmit power,
    3.16 dBi AP gain, omnidirectional UE, 63.4 dB loss at 1 m with exponent
    1.72, 2 GHz bandwidth and a 9 dB noise figure.
    """

    tx_power: float = 20.0  # dBm
    tx_gain: float = 3.16  # dBi
    rx_gain: float = 0.0  # dBi
    ref_loss: float = 63.4  # dB at 1 m
    pathloss_exponent: float = 1.72
    bandwidth: float = 2e9  # Hz
    noise_figure: float = 9.0  # dB
    snr_threshold: float = 0.0  # dB
    beamwidth: float = 170.0  # degrees, full cone angle

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ParameterError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.pathloss_exponent > 0:
            raise ParameterError(
                f"pathloss_exponent must be > 0, got {self.pathloss_exponent}"
            )
        if not 0 < self.beamwidth <= 360:
            raise ParameterError(f"beamwidth must be in (0, 360], got {self.beamwidth}")

    @property
    def noise_power(self):
        """Noise power in dBm."""
        return noise_power(self.bandwidth, self.noise_figure)


@dataclass(frozen=True)
class UeGeometry:
    """Position of a UE relative to the ceiling AP."""

    radius: float  # planar distance from the cell centre, m
    ap_height: float  # AP height above the UE antenna, m

    def __post_init__(self):
        if self.radius < 0 or self.ap_height < 0:
            raise GeometryError("radius and ap_height must be non-negative")

    @property
    def distance(self):
        return math.hypot(self.radius, self.ap_height)

    @property
    def boresight_angle(self):
        """Angle off the downward boresight, in degrees."""
        return math.degrees(math.atan2(self.radius, self.ap_height))

    def in_coverage(self, beamwidth):
        return self.boresight_angle <= beamwidth / 2.0


def received_power(lb, geom, attenuation=0.0):
    """Received power in dBm.

    ``geom`` is a :class:`UeGeometry` or an AP-UE distance in metres (scalar
    or array).  ``attenuation`` is the blockage loss in dB and broadcasts
    against the distance.
    """
    d = np.asarray(getattr(geom, "distance", geom), dtype=float)
    if np.any(d <= 0):
        raise GeometryError("AP-UE distance must be > 0")
    attenuation = np.asarray(attenuation, dtype=float)
    if np.any(attenuation < 0):
        raise ParameterError("attenuation must be >= 0")
    p = (
        lb.tx_power
        + lb.tx_gain
        + lb.rx_gain
        - lb.ref_loss
        - 10.0 * lb.pathloss_exponent * np.log10(d)
        - attenuation
    )
    return p if p.ndim else float(p)


def snr(p_rx, p_n):
    """SNR in dB."""
    z = np.asarray(p_rx, dtype=float) - p_n
    return z if z.ndim else float(z)


def feasible_rate(z, lb):
    """Rate in bit/s a UE would get if scheduled at SNR ``z`` dB.

    Zero when ``z <= snr_threshold`` (outage).
    """
    z = np.asarray(z, dtype=float)
    rate = lb.bandwidth * np.log2(1.0 + db_to_linear(z))
    rate = np.where(z > lb.snr_threshold, rate, 0.0)
    return rate if rate.ndim else float(rate)


def instantaneous_rate(z, allocated, lb):
    """Realized rate in bit/s: the feasible rate gated by the allocation."""
    rate = np.where(np.asarray(allocated, dtype=bool), feasible_rate(z, lb), 0.0)
    return rate if rate.ndim else float(rate)
