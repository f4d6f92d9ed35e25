"""Generalized Petrov solutions P(lambda_3, ..., lambda_{n-1}).

The associated matrix is ``[[alpha, -beta], [beta, alpha]] (+) Diag(lambda)``
with the case-(b) metric.  Ricci-flatness fixes
``alpha = -sum(lambda) / 2`` and ``beta = sqrt(alpha^2 + sum(lambda^2) / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import LorentzianStructure, coordinate_metric

CONSTRAINT_TOL = 1e-14


class DomainError(ValueError):
    """Parameters outside the domain of the Petrov family."""


@dataclass(frozen=True)
class PetrovSolution:
    lambdas: tuple
    alpha: float
    beta: float
    degenerate: bool = False

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if self.degenerate:
            return
        r1, r2 = constraint_residuals(lam, self.alpha, self.beta)
        scale = max(1.0, self.alpha**2 + self.beta**2 + sum(v * v for v in lam))
        if abs(r1) > CONSTRAINT_TOL * max(1.0, sum(abs(v) for v in lam)) \
                or abs(r2) > CONSTRAINT_TOL * scale:
            raise DomainError(f"parameters violate the Ricci-flat constraints ({r1:.3g}, {r2:.3g})")
        if self.alpha > 0 or self.beta <= 0:
            raise DomainError("Petrov parameters need alpha <= 0 and beta > 0")

    @property
    def n(self) -> int:
        return len(self.lambdas) + 3

    def structure(self) -> LorentzianStructure:
        return LorentzianStructure.from_case(associated_matrix(self), "b")


def constraint_residuals(lambdas, alpha: float, beta: float) -> tuple[float, float]:
    lam = np.asarray(lambdas, dtype=float)
    return (2 * alpha + lam.sum(),
            2 * alpha**2 - 2 * beta**2 + float(lam @ lam))


def build(lambdas, allow_minkowski: bool = False) -> PetrovSolution:
    """Solve the Ricci-flat constraints for (alpha, beta).

    Raises :class:`DomainError` when ``sum(lambdas) < 0`` (negate every
    lambda to obtain an isometric solution with alpha <= 0) and when all
    lambdas vanish, which forces alpha = beta = 0 (Minkowski space) unless
    ``allow_minkowski`` is set.
    """
    lam = tuple(float(v) for v in lambdas)
    if len(lam) < 1:
        raise DomainError("need at least one lambda (n >= 4)")
    if not all(np.isfinite(lam)):
        raise DomainError("lambdas must be finite")
    total = float(np.sum(lam))
    if total < 0:
        raise DomainError(
            f"sum of lambdas is {total:g} < 0, which gives alpha > 0; "
            "negate all lambdas for the isometric normalisation alpha <= 0")
    if not any(lam):
        if allow_minkowski:
            return PetrovSolution(lam, 0.0, 0.0, degenerate=True)
        raise DomainError("all lambdas zero gives alpha = beta = 0 (Minkowski space)")
    alpha = -total / 2
    beta = float(np.sqrt(alpha**2 + float(np.dot(lam, lam)) / 2))
    return PetrovSolution(lam, alpha, beta)


def associated_matrix(sol: PetrovSolution) -> np.ndarray:
    m = sol.n - 1
    A = np.zeros((m, m))
    A[:2, :2] = [[sol.alpha, -sol.beta], [sol.beta, sol.alpha]]
    A[2:, 2:] = np.diag(sol.lambdas)
    return A


def metric_at(sol: PetrovSolution, x) -> np.ndarray:
    """Coordinate metric from the explicit line element."""
    x = np.asarray(x, dtype=float)
    n = sol.n
    if x.shape != (n,):
        raise ValueError(f"point must have length {n}")
    xn = x[n - 1]
    g = np.zeros((n, n))
    w = np.exp(-2 * sol.alpha * xn)
    c, s = np.cos(2 * sol.beta * xn), np.sin(2 * sol.beta * xn)
    g[:2, :2] = w * np.array([[-c, -s], [-s, c]])
    for i, lam in enumerate(sol.lambdas, start=2):
        g[i, i] = np.exp(-2 * lam * xn)
    g[n - 1, n - 1] = 1.0
    return g


def is_simply_transitive(lambdas) -> bool:
    lam = list(lambdas)
    return all(a > b for a, b in zip(lam, lam[1:]))


def classical_petrov_metric(x) -> np.ndarray:
    """The four-dimensional Petrov line element (without the k^2 factor)."""
    x4 = float(x[3])
    g = np.zeros((4, 4))
    w = np.exp(x4)
    c, s = np.cos(np.sqrt(3) * x4), np.sin(np.sqrt(3) * x4)
    g[:2, :2] = w * np.array([[-c, -s], [-s, c]])
    g[2, 2] = np.exp(-2 * x4)
    g[3, 3] = 1.0
    return g


@dataclass
class ClassicalReduction:
    k_squared: float
    verified: bool
    max_deviation: float
    beta_over_abs_alpha: float


def to_classical_petrov(sol: PetrovSolution, num_points: int = 100, seed: int = 0,
                        box: float = 2.0, tol: float = 1e-12) -> ClassicalReduction:
    """Rescale ``x' = -2 alpha x`` and compare ``k^2 ds^2`` with the Petrov form.

    The left side is evaluated through the matrix-exponential coordinate
    metric, the right side through the explicit classical line element.
    """
    if sol.n != 4:
        raise DomainError(f"classical reduction needs n = 4, got n = {sol.n}")
    k = -2 * sol.alpha
    struct = sol.structure()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for xp in rng.uniform(-box, box, size=(num_points, 4)):
        # k^2 ds^2 in x' coordinates: g_ij(x'/k) dx'_i dx'_j
        lhs = coordinate_metric(struct, xp / k)
        worst = max(worst, float(np.abs(lhs - classical_petrov_metric(xp)).max()))
    return ClassicalReduction(k * k, worst < tol, worst, sol.beta / abs(sol.alpha))
