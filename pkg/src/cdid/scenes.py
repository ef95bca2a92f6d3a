"""Synthetic complex test scenes and the additive circular Gaussian noise model."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SceneKind",
    "TestScene",
    "NoiseSpec",
    "BUILTIN_SCENES",
    "build_scene",
    "builtin_scene",
    "truncated_gauss",
    "hills",
    "noise_sigma",
    "rng_for",
    "make_noisy",
]

AMPLITUDE_MIN = 0.5
AMPLITUDE_MEAN = 1.0

# generator constants; the exact surfaces are not published, these are pinned
GAUSS_RHO = 0.6
GAUSS_CLIP = 0.5
HILLS_BUMPS = (
    # (row centre, col centre, width, height) in [-1, 1] coordinates
    (-0.45, -0.40, 0.38, 1.00),
    (-0.35, 0.45, 0.32, 0.70),
    (0.45, -0.30, 0.34, 0.80),
    (0.40, 0.40, 0.42, 0.90),
)


class SceneKind(str, enum.Enum):
    INTERFEROMETRIC = "interf"
    ABSOLUTE = "abs"


@dataclass
class TestScene:
    phase: np.ndarray  # radians
    amplitude: np.ndarray
    kind: SceneKind
    name: str

    @property
    def clean(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phase.shape


@dataclass(frozen=True)
class NoiseSpec:
    sigma_phi: float
    seed: int = 0
    runs: int = 1

    def __post_init__(self):
        if not 0 < self.sigma_phi <= 2:
            raise ValueError(f"sigma_phi must lie in (0, 2], got {self.sigma_phi}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def _grid(size: int):
    t = np.linspace(-1.0, 1.0, size)
    return np.meshgrid(t, t, indexing="ij")


def truncated_gauss(size: int = 256, rho: float = GAUSS_RHO, clip: float = GAUSS_CLIP) -> np.ndarray:
    """Isotropic Gaussian bump cut flat at ``clip``."""
    y, x = _grid(size)
    return np.minimum(np.exp(-(x ** 2 + y ** 2) / rho ** 2), clip)


def hills(size: int = 256, bumps=HILLS_BUMPS) -> np.ndarray:
    """Sum of four fixed Gaussian bumps."""
    y, x = _grid(size)
    out = np.zeros((size, size))
    for cy, cx, width, height in bumps:
        out += height * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / width ** 2)
    return out


BUILTIN_SCENES = {"gauss": truncated_gauss, "hills": hills}
ABSOLUTE_RANGE = {"gauss": 16 * math.pi, "hills": 20 * math.pi}


def build_scene(name: str, phase_source, kind=SceneKind.INTERFEROMETRIC,
                phase_max: float | None = None) -> TestScene:
    """Scale ``phase_source`` to the phase interval of ``kind`` and derive the
    amplitude as the affine function of the phase with min 0.5 and mean 1.

    Interferometric phases span ``[0, pi/2]``; absolute phases span
    ``[0, phase_max]`` (16 pi for ``gauss``, 20 pi for ``hills``, else 16 pi).
    """
    kind = SceneKind(kind)
    src = np.asarray(phase_source, dtype=float)
    if src.ndim != 2:
        raise ValueError("phase source must be 2-D")
    lo, hi = float(src.min()), float(src.max())
    if not hi > lo:
        raise ValueError("phase source is constant")
    if phase_max is None:
        if kind is SceneKind.INTERFEROMETRIC:
            phase_max = math.pi / 2
        else:
            phase_max = ABSOLUTE_RANGE.get(name, 16 * math.pi)
    phase = (src - lo) / (hi - lo) * phase_max
    mean = float(phase.mean())
    if not mean > 0:
        raise ValueError("amplitude constraints unsolvable: mean phase equals its minimum")
    slope = (AMPLITUDE_MEAN - AMPLITUDE_MIN) / mean
    amplitude = AMPLITUDE_MIN + slope * phase
    return TestScene(phase=phase, amplitude=amplitude, kind=kind, name=name)


def builtin_scene(name: str, kind=SceneKind.INTERFEROMETRIC, size: int = 256) -> TestScene:
    try:
        gen = BUILTIN_SCENES[name]
    except KeyError:
        raise ValueError(f"unknown scene {name!r}; built-ins are {sorted(BUILTIN_SCENES)}") from None
    return build_scene(name, gen(size), kind)


def noise_sigma(sigma_phi: float, amplitude) -> float:
    """Complex noise std giving phase noise ``sigma_phi`` at the mean amplitude."""
    return float(sigma_phi * np.mean(amplitude) * math.sqrt(2.0))


def rng_for(seed: int, run: int = 0) -> np.random.Generator:
    """PCG64 stream keyed by ``(seed, run)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(run)])))


def make_noisy(scene: TestScene, spec: NoiseSpec, run: int = 0) -> np.ndarray:
    """``z = a exp(j phi) + eps`` with Re eps, Im eps iid N(0, sigma^2 / 2)."""
    sigma = noise_sigma(spec.sigma_phi, scene.amplitude)
    eps = rng_for(spec.seed, run).standard_normal((2,) + scene.shape)
    return scene.clean + (sigma / math.sqrt(2.0)) * (eps[0] + 1j * eps[1])
