"""Universal threshold, hard/soft shrinkage and empirical Wiener weights."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThresholdMode",
    "ThresholdSpec",
    "universal_threshold",
    "hard_threshold_complex",
    "soft_threshold_complex",
    "hard_threshold_real",
    "soft_threshold_real",
    "shrink",
    "wiener_attenuate",
    "wiener_weights",
]


class ThresholdMode(str, enum.Enum):
    HARD = "hard"
    SOFT = "soft"


@dataclass(frozen=True)
class ThresholdSpec:
    eta: float
    sigma: float
    group_card: int
    mode: ThresholdMode = ThresholdMode.HARD

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.group_card < 1:
            raise ValueError(f"group cardinality must be >= 1, got {self.group_card}")


def universal_threshold(spec: ThresholdSpec) -> float:
    """``eta * sigma * sqrt(2 ln(n1 n2 J))`` (natural log)."""
    return spec.eta * spec.sigma * math.sqrt(2.0 * math.log(spec.group_card))


def _count(out: np.ndarray) -> int:
    return int(np.count_nonzero(out))


def hard_threshold_complex(core, delta: float):
    core = np.asarray(core)
    out = np.where(np.abs(core) >= delta, core, 0).astype(core.dtype, copy=False)
    return out, _count(out)


def soft_threshold_complex(core, delta: float):
    """Shrink moduli by ``delta``; the phase of every survivor is kept exactly."""
    core = np.asarray(core)
    mag = np.abs(core)
    keep = mag > delta
    scale = np.where(keep, (mag - delta) / np.where(keep, mag, 1.0), 0.0)
    out = (core * scale).astype(core.dtype, copy=False)
    return out, _count(out)


def hard_threshold_real(core, delta: float):
    core = np.asarray(core)
    out = np.where(np.abs(core) >= delta, core, 0.0).astype(core.dtype, copy=False)
    return out, _count(out)


def soft_threshold_real(core, delta: float):
    core = np.asarray(core)
    out = np.sign(core) * np.maximum(np.abs(core) - delta, 0.0)
    return out.astype(core.dtype, copy=False), _count(out)


def shrink(core: np.ndarray, delta, mode: ThresholdMode, batch_axes: int = 1):
    """Batched thresholding used by the filters.

    ``delta`` broadcasts against the leading ``batch_axes`` axes of ``core``.
    Returns ``(out, retained)`` with one retained count per batch entry.
    Real and complex cores share the same formulas (modulus-based).
    """
    core = np.asarray(core)
    delta = np.asarray(delta, dtype=float)
    delta = delta.reshape(delta.shape + (1,) * (core.ndim - delta.ndim))
    mag = np.abs(core)
    if ThresholdMode(mode) is ThresholdMode.HARD:
        out = np.where(mag >= delta, core, 0)
    else:
        keep = mag > delta
        out = core * np.where(keep, (mag - delta) / np.where(keep, mag, 1.0), 0.0)
    out = out.astype(core.dtype, copy=False)
    axes = tuple(range(batch_axes, core.ndim))
    return out, np.count_nonzero(out, axis=axes)


def wiener_weights(pilot_core: np.ndarray, sigma: float) -> np.ndarray:
    """``|p|^2 / (|p|^2 + sigma^2)``, zero where the pilot coefficient is zero."""
    p2 = np.abs(pilot_core) ** 2
    den = p2 + sigma ** 2
    return np.where(den > 0, p2 / np.where(den > 0, den, 1.0), 0.0)


def wiener_attenuate(noisy_core, pilot_core, sigma: float):
    """Empirical Wiener shrinkage of ``noisy_core`` guided by ``pilot_core``.

    Returns ``(filtered, weight_energy)`` with ``weight_energy = sum(w**2)``.
    """
    noisy_core = np.asarray(noisy_core)
    pilot_core = np.asarray(pilot_core)
    if noisy_core.shape != pilot_core.shape:
        raise ValueError(f"core shapes differ: {noisy_core.shape} vs {pilot_core.shape}")
    w = wiener_weights(pilot_core, sigma)
    return (noisy_core * w).astype(noisy_core.dtype, copy=False), float(np.sum(w ** 2))
