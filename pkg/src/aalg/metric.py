"""Lorentzian inner products on almost abelian algebras and their coordinate form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlmostAbelianAlgebra, check_case

SIGNATURE_TOL = 1e-10


def eta_matrix(case: str, n: int) -> np.ndarray:
    check_case(case)
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    eta = np.eye(n)
    if case == "a":
        eta[n - 1, n - 1] = -1.0
    elif case == "b":
        eta[0, 0] = -1.0
    else:
        eta[n - 2, n - 2] = eta[n - 1, n - 1] = 0.0
        eta[n - 2, n - 1] = eta[n - 1, n - 2] = 1.0
    return eta


def negative_index(g: np.ndarray, tol: float = SIGNATURE_TOL) -> int:
    """Number of eigenvalues below ``-tol``; raises if any lies within tol of 0."""
    w = np.linalg.eigvalsh(g)
    if np.any(np.abs(w) <= tol):
        raise ValueError("metric is degenerate")
    return int(np.sum(w < 0))


@dataclass(frozen=True, eq=False)
class LorentzianStructure:
    alg: AlmostAbelianAlgebra
    case: str
    eta: np.ndarray

    def __post_init__(self):
        check_case(self.case)
        eta = np.array(self.eta, dtype=float)
        if not np.array_equal(eta, eta_matrix(self.case, self.alg.n)):
            raise ValueError(f"eta does not match metric case ({self.case})")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def from_case(cls, A, case: str) -> "LorentzianStructure":
        alg = AlmostAbelianAlgebra.from_matrix(A)
        return cls(alg, case, eta_matrix(case, alg.n))

    @property
    def n(self) -> int:
        return self.alg.n

    @property
    def A(self) -> np.ndarray:
        return self.alg.A


def structure_from_json(spec: dict) -> LorentzianStructure:
    """Build from ``{"n": 4, "metric": "b", "A": [[...], ...]}``."""
    try:
        n = int(spec["n"])
        case = spec["metric"]
        A = spec["A"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"algebra spec needs keys n, metric, A: {exc}") from None
    rows = [list(r) for r in A]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("A must be square")
    return LorentzianStructure(AlmostAbelianAlgebra(n, rows), case, eta_matrix(case, n))


def structure_to_json(struct: LorentzianStructure) -> dict:
    return {"n": struct.n, "metric": struct.case, "A": struct.A.tolist()}


def inner(struct: LorentzianStructure, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (struct.n,) or y.shape != (struct.n,):
        raise ValueError(f"vectors must have length {struct.n}")
    return float(x @ struct.eta @ y)


@dataclass(frozen=True, eq=False)
class OrthonormalFrame:
    basis: np.ndarray  # columns are e_1..e_n in X-basis components
    signs: np.ndarray


def orthonormal_frame(struct: LorentzianStructure) -> OrthonormalFrame:
    n = struct.n
    if struct.case in ("a", "b"):
        return OrthonormalFrame(np.eye(n), np.diag(struct.eta).copy())
    E = np.eye(n)
    s = 1.0 / np.sqrt(2.0)
    E[:, n - 2] = 0.0
    E[:, n - 1] = 0.0
    E[n - 2, n - 2] = E[n - 1, n - 2] = s
    E[n - 2, n - 1] = s
    E[n - 1, n - 1] = -s
    signs = np.ones(n)
    signs[n - 1] = -1.0
    return OrthonormalFrame(E, signs)


def _canonical_blocks(A: np.ndarray):
    """Return (alpha, beta, tail) if A is [[a,-b],[b,a]] (+) diagonal, else None."""
    m = A.shape[0]
    D = A.copy()
    if m >= 2 and A[0, 0] == A[1, 1] and A[0, 1] == -A[1, 0]:
        D[:2, :2] = 0.0
        D[2:, 2:] = 0.0
        if not D.any() and not (A[2:, 2:] - np.diag(np.diag(A[2:, 2:]))).any():
            return float(A[0, 0]), float(A[1, 0]), np.diag(A)[2:].copy()
    return None


def exp_associated(A: np.ndarray, t: float) -> np.ndarray:
    """``exp(A t)``.

    Closed form when ``A`` is a rotation-scaling block plus a diagonal tail
    (or purely diagonal); Pade scaling-and-squaring otherwise.
    """
    A = np.asarray(A, dtype=float)
    if not (A - np.diag(np.diag(A))).any():
        return np.diag(np.exp(np.diag(A) * t))
    blocks = _canonical_blocks(A)
    if blocks is None:
        from scipy.linalg import expm  # deferred: keeps CLI start-up fast
        return expm(A * t)
    alpha, beta, tail = blocks
    E = np.zeros_like(A)
    ea = np.exp(alpha * t)
    c, s = np.cos(beta * t), np.sin(beta * t)
    E[:2, :2] = ea * np.array([[c, -s], [s, c]])
    E[2:, 2:] = np.diag(np.exp(tail * t))
    return E


def left_invariant_frame(struct: LorentzianStructure, x):
    """Frame and coframe matrices at the point x.

    Column ``i`` of the frame holds the coordinate components of ``X_i``;
    row ``i`` of the coframe holds those of ``omega^i``.
    """
    x = np.asarray(x, dtype=float)
    n = struct.n
    frame = np.eye(n)
    coframe = np.eye(n)
    frame[: n - 1, : n - 1] = exp_associated(struct.A, x[n - 1])
    coframe[: n - 1, : n - 1] = exp_associated(struct.A, -x[n - 1])
    return frame, coframe


def coordinate_metric(struct: LorentzianStructure, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (struct.n,):
        raise ValueError(f"point must have length {struct.n}")
    _, W = left_invariant_frame(struct, x)
    g = W.T @ struct.eta @ W
    return (g + g.T) / 2
