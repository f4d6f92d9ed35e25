"""Finite-difference coordinate geometry used to cross-check the algebraic engine.

Everything here works from a bare metric evaluator ``x -> g(x)`` and knows
nothing about Lie algebras, so agreement with :mod:`aalg.curvature` is a
genuine independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metric import LorentzianStructure, coordinate_metric, left_invariant_frame

COND_LIMIT = 1e12


class ConditioningError(ValueError):
    """Metric too close to singular for finite differences."""


@dataclass(frozen=True)
class MetricField:
    evaluator: Callable[[np.ndarray], np.ndarray]
    h: float = 1e-3

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")

    @classmethod
    def from_structure(cls, struct: LorentzianStructure, h: float = 1e-3) -> "MetricField":
        return cls(lambda x: coordinate_metric(struct, x), h)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)


def _metric_derivatives(field: MetricField, x: np.ndarray) -> np.ndarray:
    """``dg[d, i, j] = d_d g_ij`` by central differences."""
    n = x.size
    h = field.h
    dg = np.empty((n, n, n))
    for d in range(n):
        e = np.zeros(n)
        e[d] = h
        dg[d] = (field(x + e) - field(x - e)) / (2 * h)
    return dg


def christoffel_fd(field: MetricField, x) -> np.ndarray:
    """``G[a, b, c] = Gamma^a_{bc}`` from central differences of the metric."""
    x = np.asarray(x, dtype=float)
    g = field(x)
    if g.shape != (x.size, x.size):
        raise ValueError("evaluator returned a matrix of the wrong shape")
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError(f"metric condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    ginv = np.linalg.inv(g)
    dg = _metric_derivatives(field, x)
    # lower[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    lower = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    G = 0.5 * np.einsum("ad,dbc->abc", ginv, lower)
    return 0.5 * (G + G.transpose(0, 2, 1))


def ricci_fd(field: MetricField, x) -> np.ndarray:
    """Coordinate Ricci tensor via nested central differences.

    All n directions are differentiated, even where the metric is known to
    be constant, so the check does not lean on homogeneity.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = field.h
    G = christoffel_fd(field, x)
    dG = np.empty((n, n, n, n))  # dG[e, a, b, c] = d_e Gamma^a_bc
    for e in range(n):
        s = np.zeros(n)
        s[e] = h
        dG[e] = (christoffel_fd(field, x + s) - christoffel_fd(field, x - s)) / (2 * h)
    ric = (np.einsum("aabc->bc", dG)
           - np.einsum("baac->bc", dG)
           + np.einsum("aad,dbc->bc", G, G)
           - np.einsum("abd,dac->bc", G, G))
    return ric


def frame_ricci(fd_ric: np.ndarray, x, struct: LorentzianStructure) -> np.ndarray:
    """Components of a coordinate-basis tensor on the left-invariant frame."""
    F, _ = left_invariant_frame(struct, x)
    return F.T @ fd_ric @ F


def compare_frames(algebraic_ric, fd_ric, x, struct: LorentzianStructure) -> float:
    """Max absolute difference after moving ``fd_ric`` to the X-frame."""
    return float(np.abs(frame_ricci(fd_ric, x, struct) - np.asarray(algebraic_ric)).max())


@dataclass
class OracleRun:
    max_error: float
    errors: list
    points: np.ndarray
    h: float
    order: float | None = None
    max_asymmetry: float = 0.0


def run_oracle(struct: LorentzianStructure, algebraic_ric, num_points: int = 10,
               seed: int = 0, h: float = 1e-3, box: float = 1.0,
               check_order: bool = False) -> OracleRun:
    """Compare fd Ricci with ``algebraic_ric`` at random points in ``[-box, box]^n``.

    With ``check_order`` the first point is redone at ``h/2`` and the
    observed order ``log2(err_h / err_{h/2})`` is reported.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(num_points, struct.n))
    field = MetricField.from_structure(struct, h)
    errs, asym = [], 0.0
    for x in pts:
        R = ricci_fd(field, x)
        asym = max(asym, float(np.abs(R - R.T).max()))
        errs.append(compare_frames(algebraic_ric, R, x, struct))
    order = None
    if check_order and num_points:
        order = convergence_order(struct, algebraic_ric, pts[0], h)
    return OracleRun(max(errs, default=0.0), errs, pts, h, order, asym)


def convergence_order(struct: LorentzianStructure, algebraic_ric, x, h: float = 1e-3) -> float:
    e1 = compare_frames(algebraic_ric, ricci_fd(MetricField.from_structure(struct, h), x), x, struct)
    e2 = compare_frames(algebraic_ric, ricci_fd(MetricField.from_structure(struct, h / 2), x), x, struct)
    if e2 == 0:
        return float("inf")
    return float(np.log2(e1 / e2))
