"""Filter configuration shared by the pipelines and the CLI."""
from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass

from .domains import SparsityType
from .shrinkage import ThresholdMode

__all__ = ["DeltaSemantics", "FilterConfig", "DEFAULT_SCHEDULE"]

# (alpha_t, delta_t) for the three-step iterative filter
DEFAULT_SCHEDULE = ((1.0, 0.9), (0.35, 0.5), (0.25, 0.4))


class DeltaSemantics(str, enum.Enum):
    """How an iteration's ``delta_t`` enters the threshold.

    ``eta``: ``delta_t`` replaces the ``eta`` multiplier of the universal
    threshold (sigma stays the noise level of the input ``z``).
    ``absolute``: ``delta_t`` is the threshold itself.
    """

    ETA = "eta"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class FilterConfig:
    n1: int = 8
    n2: int = 8
    step: int = 3
    search_window: int = 39
    j_max: int = 32
    sparsity: SparsityType = SparsityType.REIM
    threshold_mode: ThresholdMode = ThresholdMode.HARD
    eta: float = 1.0
    wiener: bool = False
    sigma: float = 0.0
    iter_schedule: tuple = DEFAULT_SCHEDULE
    delta_semantics: DeltaSemantics = DeltaSemantics.ETA

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "sparsity", SparsityType(self.sparsity))
        set_(self, "threshold_mode", ThresholdMode(self.threshold_mode))
        set_(self, "delta_semantics", DeltaSemantics(self.delta_semantics))
        if self.iter_schedule is not None:
            set_(self, "iter_schedule",
                 tuple((float(a), float(d)) for a, d in self.iter_schedule))
        for name in ("n1", "n2", "step", "search_window", "j_max"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.search_window % 2 == 0:
            raise ValueError("search_window must be odd")
        if self.step > min(self.n1, self.n2):
            raise ValueError("step larger than the patch leaves pixels uncovered")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")

    def replace(self, **changes) -> "FilterConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, enum.Enum):
                d[k] = v.value
        if d["iter_schedule"] is not None:
            d["iter_schedule"] = [list(p) for p in d["iter_schedule"]]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FilterConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
