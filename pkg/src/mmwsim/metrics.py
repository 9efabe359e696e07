"""Rate statistics: ECDF, percentiles, mean rate and Jain's fairness index."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = ["MetricsReport", "jain_index", "percentile", "mean_rate", "ecdf", "build_report"]


def _samples(samples):
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ParameterError("no samples")
    return samples


def jain_index(rates):
    """Jain's fairness index ``(sum r)^2 / (n * sum r^2)``."""
    r = _samples(rates)
    if np.any(r < 0):
        raise ParameterError("rates must be non-negative")
    sq = np.dot(r, r)
    if sq == 0:
        raise ParameterError("Jain index is undefined when every rate is zero")
    return float(r.sum() ** 2 / (r.size * sq))


def percentile(samples, q):
    """``q``-th percentile, linearly interpolated between order statistics."""
    if not 0 < q < 100:
        raise ParameterError(f"q must be in (0, 100), got {q}")
    return float(np.percentile(_samples(samples), q, method="linear"))


def mean_rate(samples):
    return float(np.mean(_samples(samples)))


def ecdf(samples):
    """Step points of the empirical CDF.

    Returns the distinct sorted values and, for each, the fraction of samples
    less than or equal to it.
    """
    s = np.sort(_samples(samples))
    values = np.unique(s)
    probs = np.searchsorted(s, values, side="right") / s.size
    return values, probs


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Summary of per-UE average rates pooled over drops.

    ``jain_mean`` averages the per-drop Jain index; ``jain_pooled`` is the
    index of all samples together.
    """

    samples: np.ndarray
    ecdf_values: np.ndarray
    ecdf_probs: np.ndarray
    p1_rate: float
    mean_rate: float
    jain_mean: float
    jain_pooled: float
    drops: int

    @property
    def sample_count(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, MetricsReport):
            return NotImplemented
        return (
            np.array_equal(self.samples, other.samples)
            and self.p1_rate == other.p1_rate
            and self.mean_rate == other.mean_rate
            and self.jain_mean == other.jain_mean
            and self.jain_pooled == other.jain_pooled
            and self.drops == other.drops
        )


def _jain_or_nan(rates):
    try:
        return jain_index(rates)
    except ParameterError:
        return float("nan")


def build_report(per_drop_rates):
    """Aggregate a list of per-drop rate vectors into a :class:`MetricsReport`."""
    per_drop_rates = [np.asarray(r, dtype=float) for r in per_drop_rates]
    if not per_drop_rates:
        raise ParameterError("no drops to aggregate")
    samples = np.concatenate(per_drop_rates)
    values, probs = ecdf(samples)
    # a drop where every UE is starved has no defined index; skip it
    per_drop = np.array([_jain_or_nan(r) for r in per_drop_rates])
    return MetricsReport(
        samples=samples,
        ecdf_values=values,
        ecdf_probs=probs,
        p1_rate=percentile(samples, 1),
        mean_rate=mean_rate(samples),
        jain_mean=float(np.nanmean(per_drop)) if np.isfinite(per_drop).any() else float("nan"),
        jain_pooled=_jain_or_nan(samples),
        drops=len(per_drop_rates),
    )
