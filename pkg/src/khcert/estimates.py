"""Small value types returned by the numerical routines."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

EXACT = "exact"
MONTE_CARLO = "monte-carlo"
QUADRATURE = "quadrature"
SEARCH = "search-lower-bound"


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume or signed-measure value with its sampling error.

    ``stderr`` is zero exactly when ``method`` is ``"exact"``.
    """

    value: float
    stderr: float = 0.0
    method: str = EXACT
    samples: int | None = None
    seed: int | None = None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ErrorEstimate:
    """Absolute quadrature error |node average - integral|."""

    value: float
    stderr: float = 0.0
    method: str = EXACT
    integral: complex = 0.0
    node_average: complex = 0.0

    def to_dict(self):
        d = asdict(self)
        for key in ("integral", "node_average"):
            z = complex(d[key])
            d[key] = [z.real, z.imag]
        return d


@dataclass(frozen=True)
class DiscrepancyEstimate:
    value: float
    mode: str
    stderr: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0.0 or not math.isfinite(self.value):
            raise ValueError(f"discrepancy must be a finite non-negative number, got {self.value}")
        if self.mode == EXACT and self.stderr != 0.0:
            raise ValueError("exact estimates carry no stderr")

    def to_dict(self):
        return {"value": self.value, "mode": self.mode, "stderr": self.stderr, "params": self.params}
