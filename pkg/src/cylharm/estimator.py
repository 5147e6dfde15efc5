"""scikit-learn style front end for batch evaluation of ``1/|x - x0|``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import laplace3d
from .errors import DomainError
from .laplace3d import CylinderPoint
from .quadrature import QuadratureSpec
from .report import ExpansionReport, Method

_METHODS = {
    "direct": Method.DIRECT,
    "parabolic-k0": Method.PARABOLIC_K0,
    "parabolic-j0": Method.PARABOLIC_J0,
    "elliptic-j0": Method.ELLIPTIC_J0,
    "elliptic-k0": Method.ELLIPTIC_K0,
}


def evaluate(method: str | Method, x: CylinderPoint, x0: CylinderPoint, rel_tol: float = 1e-7, c_focal=None):
    """One expansion by CLI-style method name; returns an :class:`ExpansionReport`
    (``Direct`` reports carry the exact value and zero tail)."""
    m = method if isinstance(method, Method) else _METHODS[method]
    if m is Method.DIRECT:
        return ExpansionReport(value=laplace3d.direct(x, x0), method=m, evals=1)
    quad = QuadratureSpec(rel_tol=rel_tol)
    fn = laplace3d.EXPANSIONS[m]
    if m in (Method.ELLIPTIC_J0, Method.ELLIPTIC_K0):
        if c_focal is None:
            raise DomainError("missing focal parameter")
        return fn(x, x0, quad, c_focal=c_focal)
    return fn(x, x0, quad)


class FundamentalSolution(BaseEstimator):
    """Evaluate ``1/|x - x0|`` for rows ``[x, y, z, x0, y0, z0]``.

    There is nothing to learn, so :meth:`fit` only validates the parameters;
    the class exists so the expansions plug into scikit-learn style
    pipelines and parameter sweeps.

    Parameters
    ----------
    method : str
        One of ``direct``, ``parabolic-k0``, ``parabolic-j0``,
        ``elliptic-j0``, ``elliptic-k0``.
    rel_tol : float
        Target relative accuracy of the outer integral.
    c_focal : float or None
        Focal parameter, required by the elliptic methods.
    """

    def __init__(self, method: str = "parabolic-k0", rel_tol: float = 1e-7, c_focal: float | None = None):
        self.method = method
        self.rel_tol = rel_tol
        self.c_focal = c_focal

    def fit(self, X=None, y=None):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method.startswith("elliptic") and self.c_focal is None:
            raise DomainError("missing focal parameter")
        QuadratureSpec(rel_tol=self.rel_tol)
        self.reports_ = []
        return self

    def predict(self, X) -> np.ndarray:
        """Values for each row of ``X`` (shape ``(n, 6)``); full reports are
        kept in ``reports_``."""
        if not hasattr(self, "reports_"):
            self.fit()
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 6:
            raise ValueError("X must have shape (n, 6)")
        self.reports_ = [
            evaluate(self.method, CylinderPoint(*row[:3]), CylinderPoint(*row[3:]), self.rel_tol, self.c_focal)
            for row in X
        ]
        return np.array([r.value for r in self.reports_])

    def score(self, X, y=None) -> float:
        """Negative largest relative deviation from the exact reciprocal distance."""
        X = np.asarray(X, dtype=float)
        exact = 1.0 / np.linalg.norm(X[:, :3] - X[:, 3:], axis=1)
        return -float(np.max(np.abs(self.predict(X) / exact - 1.0)))
