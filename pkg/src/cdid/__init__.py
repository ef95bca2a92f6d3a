"""Complex-domain image denoising with group-wise HOSVD sparsity."""

__version__ = "0.1.0"

from .config import DEFAULT_SCHEDULE, DeltaSemantics, FilterConfig  # noqa: E402
from .domains import SparsityType  # noqa: E402
from .metrics import MetricReport, evaluate, unwrap_simple, wrap  # noqa: E402
from .pipelines import (  # noqa: E402
    ALGORITHMS,
    cdf_ht,
    cdf_iterative,
    cdf_wiener,
    run_algorithms,
    run_named_algorithm,
)
from .scenes import NoiseSpec, SceneKind, TestScene, build_scene, builtin_scene, make_noisy  # noqa: E402
from .shrinkage import ThresholdMode  # noqa: E402

__all__ = [
    "ALGORITHMS",
    "DEFAULT_SCHEDULE",
    "DeltaSemantics",
    "FilterConfig",
    "MetricReport",
    "NoiseSpec",
    "SceneKind",
    "SparsityType",
    "TestScene",
    "ThresholdMode",
    "build_scene",
    "builtin_scene",
    "cdf_ht",
    "cdf_iterative",
    "cdf_wiener",
    "evaluate",
    "make_noisy",
    "run_algorithms",
    "run_named_algorithm",
    "unwrap_simple",
    "wrap",
]
