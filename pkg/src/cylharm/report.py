"""Result containers returned by every expansion."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Method(str, Enum):
    PARABOLIC_K0 = "ParabolicK0"
    PARABOLIC_J0 = "ParabolicJ0"
    ELLIPTIC_J0 = "EllipticJ0"
    ELLIPTIC_K0 = "EllipticK0"
    DIRECT = "Direct"


@dataclass(frozen=True)
class SeriesTruncation:
    """Cap and stopping tolerance for the discrete (n-indexed) series."""

    max_n: int = 80
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.max_n < 1:
            raise ValueError("max_n must be positive")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


@dataclass
class ExpansionReport:
    """Value of an expansion together with its convergence diagnostics.

    ``terms`` holds per-term magnitudes (series) or per-panel contributions
    (integrals) when the producer records them.
    """

    value: float
    method: Method
    truncation_used: tuple[int, ...] = ()
    tail_estimate: float = 0.0
    oracle_residual: float | None = None
    evals: int = 0
    terms: np.ndarray | None = field(default=None, repr=False)
    imag_residual: float | None = None

    def __post_init__(self):
        if not self.tail_estimate >= 0:
            raise ValueError(f"tail_estimate must be non-negative, got {self.tail_estimate}")

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "value": self.value,
            "truncation_used": list(self.truncation_used),
            "tail_estimate": self.tail_estimate,
            "oracle_residual": self.oracle_residual,
            "evals": self.evals,
        }
