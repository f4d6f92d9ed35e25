"""Almost abelian Lie algebras.

An almost abelian algebra of dimension ``n`` is fixed by its associated
matrix ``A`` of size ``(n-1) x (n-1)``: the generators ``X_1..X_{n-1}`` span
an abelian ideal and ``[X_n, X_j] = sum_i A[i, j] X_i``.  Vectors are
component arrays in the basis ``X_1..X_n`` (0-based in code).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CASES = ("a", "b", "c")


def _as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"associated matrix must be square, got shape {A.shape}")
    return A


def check_case(case: str) -> str:
    if case not in CASES:
        raise ValueError(f"metric case must be one of {CASES}, got {case!r}")
    return case


def lorentz_J(m: int) -> np.ndarray:
    """``Diag(-1, 1, ..., 1)`` of size m."""
    J = np.eye(m)
    J[0, 0] = -1.0
    return J


@dataclass(frozen=True, eq=False)
class AlmostAbelianAlgebra:
    n: int
    A: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A)
        if self.n < 3:
            raise ValueError(f"dimension n must be >= 3, got {self.n}")
        if A.shape[0] != self.n - 1:
            raise ValueError(
                f"associated matrix must be {self.n - 1}x{self.n - 1} for n={self.n}, "
                f"got {A.shape[0]}x{A.shape[1]}")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @classmethod
    def from_matrix(cls, A) -> "AlmostAbelianAlgebra":
        A = _as_matrix(A)
        return cls(A.shape[0] + 1, A)

    def basis(self, a: int) -> np.ndarray:
        """Unit vector of ``X_{a+1}``."""
        e = np.zeros(self.n)
        e[a] = 1.0
        return e

    def structure_constants(self) -> np.ndarray:
        """Array ``C`` with ``[X_b, X_c] = sum_a C[a, b, c] X_a``."""
        n = self.n
        C = np.zeros((n, n, n))
        C[: n - 1, n - 1, : n - 1] = self.A
        C[: n - 1, : n - 1, n - 1] = -self.A
        return C


def _check_vec(alg: AlmostAbelianAlgebra, x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (alg.n,):
        raise ValueError(f"{name} must have length {alg.n}, got shape {x.shape}")
    return x


def bracket(alg: AlmostAbelianAlgebra, x, y) -> np.ndarray:
    x = _check_vec(alg, x, "x")
    y = _check_vec(alg, y, "y")
    n = alg.n
    out = np.zeros(n)
    # [x, y] = x_n * A y' - y_n * A x'  (primes: ideal components)
    out[: n - 1] = alg.A @ (x[n - 1] * y[: n - 1] - y[n - 1] * x[: n - 1])
    return out


def ad_matrices(alg: AlmostAbelianAlgebra) -> list[np.ndarray]:
    """Matrices of ``ad X_1, ..., ad X_n`` acting on component vectors."""
    C = alg.structure_constants()
    return [C[:, b, :].copy() for b in range(alg.n)]


def killing_form(alg: AlmostAbelianAlgebra) -> np.ndarray:
    C = alg.structure_constants()
    return np.einsum("kxj,jyk->xy", C, C)


def mean_curvature(alg: AlmostAbelianAlgebra, metric_case: str) -> np.ndarray:
    """Mean curvature vector H, defined by ``<H, X> = tr ad X``.

    Uses the closed forms for the three standard metric classes.
    """
    check_case(metric_case)
    n = alg.n
    trA = float(np.trace(alg.A))
    H = np.zeros(n)
    if metric_case == "a":
        H[n - 1] = -trA
    elif metric_case == "b":
        H[n - 1] = trA
    else:
        H[n - 2] = trA
    return H


@dataclass(frozen=True, eq=False)
class SymSkewDecomposition:
    S: np.ndarray
    T: np.ndarray


@dataclass(frozen=True, eq=False)
class JDecomposition:
    S_L: np.ndarray
    T_L: np.ndarray
    J: np.ndarray


@dataclass(frozen=True, eq=False)
class BlockCDecomposition:
    Aprime: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float
    Sprime: np.ndarray
    Tprime: np.ndarray

    def assemble(self) -> np.ndarray:
        m = self.Aprime.shape[0]
        A = np.empty((m + 1, m + 1))
        A[:m, :m] = self.Aprime
        A[:m, m] = self.b
        A[m, :m] = self.c
        A[m, m] = self.d
        return A


def decompose(alg: AlmostAbelianAlgebra, metric_case: str):
    """Split ``A`` according to the metric class.

    (a) symmetric + skew; (b) J-symmetric + J-skew with
    ``J = Diag(-1, 1, ..., 1)``; (c) block form ``[[A', b], [c^T, d]]`` with
    ``A'`` further split into symmetric and skew parts.
    """
    check_case(metric_case)
    A = alg.A
    if metric_case == "a":
        return SymSkewDecomposition(S=(A + A.T) / 2, T=(A - A.T) / 2)
    if metric_case == "b":
        J = lorentz_J(A.shape[0])
        JAtJ = J @ A.T @ J
        return JDecomposition(S_L=(A + JAtJ) / 2, T_L=(A - JAtJ) / 2, J=J)
    m = A.shape[0] - 1
    Ap = A[:m, :m].copy()
    return BlockCDecomposition(
        Aprime=Ap,
        b=A[:m, m].copy(),
        c=A[m, :m].copy(),
        d=float(A[m, m]),
        Sprime=(Ap + Ap.T) / 2,
        Tprime=(Ap - Ap.T) / 2,
    )


def transform(alg: AlmostAbelianAlgebra, eta, P, cscale: float):
    """Change of generators ``[X'] = [X] blockdiag(P, cscale)``.

    Returns the new algebra (associated matrix ``cscale P^-1 A P``) and the
    transformed metric matrix.
    """
    P = np.asarray(P, dtype=float)
    eta = np.asarray(eta, dtype=float)
    m = alg.n - 1
    if P.shape != (m, m):
        raise ValueError(f"P must be {m}x{m}, got {P.shape}")
    if eta.shape != (alg.n, alg.n):
        raise ValueError(f"eta must be {alg.n}x{alg.n}, got {eta.shape}")
    if cscale == 0:
        raise ValueError("cscale must be nonzero")
    if np.linalg.matrix_rank(P) < m:
        raise ValueError("P is singular")
    Abar = cscale * np.linalg.solve(P, alg.A @ P)
    B = np.zeros((alg.n, alg.n))
    B[:m, :m] = P
    B[m, m] = cscale
    return AlmostAbelianAlgebra(alg.n, Abar), B.T @ eta @ B
