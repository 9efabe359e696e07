"""Received-power prediction with Gaussian error, and blockage detection.

The predictor has oracle access to the true future received power and adds
i.i.d. Gaussian error in the dB domain.  A window is flagged as containing a
blockage when its predicted power swings by more than a detection threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = [
    "DEFAULT_ERROR_STD",
    "PredictionParams",
    "predict_window",
    "detect_blockage",
    "window_flags",
]

# error std (dB) paired with each prediction window (ms); longer is noisier
DEFAULT_ERROR_STD = {50.0: 1e-3, 200.0: 1e-2, 500.0: 1e-1}


@dataclass(frozen=True)
class PredictionParams:
    """Prediction window length, error level and detection threshold.

    ``error_std=None`` picks the error paired with ``window_ms`` in
    :data:`DEFAULT_ERROR_STD`.
    """

    window_ms: float = 50.0
    error_std: float | None = None  # dB
    detection_threshold: float = 3.0  # dB

    def __post_init__(self):
        if not self.window_ms > 0:
            raise ParameterError(f"window_ms must be > 0, got {self.window_ms}")
        if self.error_std is not None and not self.error_std >= 0:
            raise ParameterError(f"error_std must be >= 0, got {self.error_std}")
        if not self.detection_threshold > 0:
            raise ParameterError(
                f"detection_threshold must be > 0, got {self.detection_threshold}"
            )
        if self.error_std is None and float(self.window_ms) not in DEFAULT_ERROR_STD:
            raise ParameterError(
                f"no default error_std for a {self.window_ms} ms window; set it explicitly"
            )

    @property
    def sigma(self):
        if self.error_std is not None:
            return float(self.error_std)
        return DEFAULT_ERROR_STD[float(self.window_ms)]

    def window_slots(self, slot_duration):
        """Window length in slots for ``slot_duration`` ms slots."""
        n = int(round(self.window_ms / slot_duration))
        if n < 1:
            raise ParameterError("prediction window is shorter than one slot")
        return n


def predict_window(true_powers, sigma, seed=None):
    """Noisy estimate of ``true_powers`` (dBm) with N(0, sigma^2) dB error."""
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    true_powers = np.asarray(true_powers, dtype=float)
    if sigma == 0:
        return true_powers.copy()
    rng = np.random.default_rng(seed)
    return true_powers + rng.normal(0.0, sigma, size=true_powers.shape)


def detect_blockage(window, threshold=3.0):
    """True if the power range within ``window`` exceeds ``threshold`` dB."""
    window = np.asarray(window, dtype=float)
    if window.size == 0:
        raise ParameterError("cannot detect blockage in an empty window")
    return bool(np.ptp(window) > threshold)


def window_flags(predicted, window_len, threshold=3.0):
    """Blockage flag for each back-to-back window of a ``(T, n_U)`` power array.

    A window is flagged when any UE's predicted power varies by more than
    ``threshold`` dB inside it.  The last window may be shorter than
    ``window_len``.
    """
    predicted = np.asarray(predicted, dtype=float)
    T = predicted.shape[0]
    n_win = -(-T // window_len)
    flags = np.zeros(n_win, dtype=bool)
    full = T // window_len
    if full:
        blocks = predicted[: full * window_len].reshape(full, window_len, -1)
        flags[:full] = (blocks.max(axis=1) - blocks.min(axis=1) > threshold).any(axis=1)
    if full < n_win:
        tail = predicted[full * window_len :]
        flags[full] = bool((np.ptp(tail, axis=0) > threshold).any())
    return flags
