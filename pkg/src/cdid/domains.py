"""Group representations for the three sparsity types.

* complex (CD): the complex ``n1 x n2 x J`` group as is;
* real/imaginary (ImRe): a real ``n1 x n2 x J x 2`` tensor, slabs Re and Im;
* amplitude/phase (PhAm): a real ``n1 x n2 x J x 2`` tensor, slabs |u| and arg u.

All conversions are elementwise, so they accept any leading batch axes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .grouping import PatchGroup
from .tensor import HosvdFactors, hosvd, hosvd_synthesis

__all__ = [
    "SparsityType",
    "GroupSpectrum",
    "principal_angle",
    "to_domain",
    "from_domain",
    "analyze",
    "synthesize",
]


class SparsityType(str, enum.Enum):
    COMPLEX = "cd"
    REIM = "imre"
    AMPHASE = "pham"

    @property
    def is_real(self) -> bool:
        return self is not SparsityType.COMPLEX


def principal_angle(u) -> np.ndarray:
    """``arg u`` in ``[-pi, pi)``, with ``arg 0 = 0``."""
    u = np.asarray(u)
    phi = np.angle(u)
    phi = np.where(phi >= np.pi, phi - 2 * np.pi, phi)
    return np.where(u == 0, 0.0, phi)


def _patches(g):
    return g.patches if isinstance(g, PatchGroup) else np.asarray(g)


def to_domain(g, s: SparsityType) -> np.ndarray:
    u = _patches(g)
    s = SparsityType(s)
    if s is SparsityType.COMPLEX:
        return u.astype(complex, copy=False)
    if s is SparsityType.REIM:
        return np.stack([u.real, u.imag], axis=-1).astype(float, copy=False)
    return np.stack([np.abs(u), principal_angle(u)], axis=-1)


def from_domain(t, s: SparsityType) -> np.ndarray:
    """Inverse of :func:`to_domain`; returns the complex group.

    Negative amplitudes (possible after filtering) are clamped to zero.
    """
    t = np.asarray(t)
    s = SparsityType(s)
    if s is SparsityType.COMPLEX:
        return t.astype(complex, copy=False)
    if t.shape[-1] != 2:
        raise ValueError(f"{s.name} tensor needs a last axis of extent 2, got {t.shape}")
    if np.iscomplexobj(t):
        t = t.real
    if s is SparsityType.REIM:
        return t[..., 0] + 1j * t[..., 1]
    return np.maximum(t[..., 0], 0.0) * np.exp(1j * t[..., 1])


@dataclass
class GroupSpectrum:
    factors: HosvdFactors
    sparsity: SparsityType
    coords: np.ndarray = None
    ref_index: int = 0


def analyze(g: PatchGroup, s: SparsityType) -> GroupSpectrum:
    """HOSVD spectrum of a group in the representation of type ``s``."""
    return GroupSpectrum(hosvd(to_domain(g, s)), SparsityType(s),
                         getattr(g, "coords", None), getattr(g, "ref_index", 0))


def synthesize(spec: GroupSpectrum) -> np.ndarray:
    return from_domain(hosvd_synthesis(spec.factors), spec.sparsity)
