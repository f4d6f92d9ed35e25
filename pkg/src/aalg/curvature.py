"""Levi-Civita connection, curvature and Ricci tensor of left-invariant metrics.

Everything is expressed in the basis ``X_1..X_n``.  ``L[a]`` is the matrix of
``Y -> nabla_{X_a} Y`` on left-invariant fields and ``R[a, b]`` the matrix of
the curvature operator ``R(X_a, X_b) = [L_a, L_b] - L_{[X_a, X_b]}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import decompose, lorentz_J
from .metric import LorentzianStructure, inner, orthonormal_frame

DEFAULT_TOL = 1e-10


def levi_civita(struct: LorentzianStructure) -> np.ndarray:
    """Connection operators, shape ``(n, n, n)``; ``L[a]`` is an n x n matrix.

    Solves ``2<L_a Y, Z> = -<X_a,[Y,Z]> + <Y,[Z,X_a]> + <Z,[X_a,Y]>`` on basis
    pairs and applies ``eta^-1``.
    """
    eta = struct.eta
    C = struct.alg.structure_constants()
    # low[k, b, c] = <X_k, [X_b, X_c]>
    low = np.einsum("ka,abc->kbc", eta, C)
    # rhs[a, z, y] = -<X_a,[X_y,X_z]> + <X_y,[X_z,X_a]> + <X_z,[X_a,X_y]>
    rhs = (-np.einsum("ayz->azy", low)
           + np.einsum("yza->azy", low)
           + np.einsum("zay->azy", low))
    return 0.5 * np.einsum("kz,azy->aky", np.linalg.inv(eta), rhs)


def curvature(struct: LorentzianStructure, L: np.ndarray | None = None) -> np.ndarray:
    """Curvature operators, shape ``(n, n, n, n)``; ``R[a, b]`` is n x n."""
    if L is None:
        L = levi_civita(struct)
    C = struct.alg.structure_constants()
    LL = np.einsum("aij,bjk->abik", L, L)
    return LL - LL.transpose(1, 0, 2, 3) - np.einsum("cab,cij->abij", C, L)


def ricci_general(struct: LorentzianStructure) -> np.ndarray:
    """Ricci tensor from the frame formula with Killing form and mean curvature.

    The mean curvature vector is obtained from its definition
    ``<H, X> = tr ad X`` rather than from a per-case closed form.
    """
    eta = struct.eta
    C = struct.alg.structure_constants()
    frame = orthonormal_frame(struct)
    E, eps = frame.basis, frame.signs

    # [X_x, e_a] and [e_a, e_b]
    B = np.einsum("kxc,ca->kxa", C, E)
    D = np.einsum("kbc,bi,cj->kij", C, E, E)
    etaB = np.einsum("lk,kxa->lxa", eta, B)
    term1 = -0.5 * np.einsum("a,kxa,kya->xy", eps, B, etaB)
    etaD = np.einsum("xk,kij->xij", eta, D)
    term2 = 0.25 * np.einsum("i,j,xij,yij->xy", eps, eps, etaD, etaD)
    K = np.einsum("kxj,jyk->xy", C, C)
    trad = np.einsum("kxk->x", C)
    H = np.linalg.solve(eta, trad)
    adH = np.einsum("b,kbx->kx", H, C)  # column x = [H, X_x]
    M = eta @ adH  # M[y, x] = <X_y, [H, X_x]>
    term4 = -0.5 * (M.T + M)
    Ric = term1 + term2 - 0.5 * K + term4
    return (Ric + Ric.T) / 2


def ricci_from_curvature(struct: LorentzianStructure, R: np.ndarray | None = None) -> np.ndarray:
    """``Ric(X, Y) = sum_c eps_c <R(e_c, X) Y, e_c>``."""
    if R is None:
        R = curvature(struct)
    frame = orthonormal_frame(struct)
    E, eps = frame.basis, frame.signs
    # R(e_c, X_x) = sum_a E[a, c] R[a, x]
    Rc = np.einsum("ac,axij->cxij", E, R)
    # <R(e_c, X_x) X_y, e_c> = e_c^T eta R(e_c, X_x)[:, y]
    return np.einsum("c,ic,ij,cxjy->xy", eps, E, struct.eta, Rc)


def ricci_closed_form(struct: LorentzianStructure) -> np.ndarray:
    n = struct.n
    dec = decompose(struct.alg, struct.case)
    Ric = np.zeros((n, n))
    if struct.case == "a":
        S, T = dec.S, dec.T
        Ric[: n - 1, : n - 1] = S @ T - T @ S + np.trace(S) * S
        Ric[n - 1, n - 1] = -np.trace(S @ S)
    elif struct.case == "b":
        S, T, J = dec.S_L, dec.T_L, dec.J
        Ric[: n - 1, : n - 1] = -J @ (S @ T - T @ S + np.trace(S) * S)
        Ric[n - 1, n - 1] = -np.trace(S @ S)
    else:
        m = n - 2
        S, T, b, c, d = dec.Sprime, dec.Tprime, dec.b, dec.c, dec.d
        trS = np.trace(S)
        Im = np.eye(m)
        Ric[:m, :m] = -np.outer(b, b)
        # column n carries A'^T b, i.e. (S' - T') b
        Ric[:m, n - 1] = (trS * Im + S - T) @ b
        Ric[n - 1, :m] = b @ (trS * Im + S + T)
        Ric[m, n - 1] = Ric[n - 1, m] = b @ b
        Ric[n - 1, n - 1] = 2 * d * trS - 2 * np.trace(S @ S) - 2 * b @ c
        Ric *= 0.5
    return Ric


@dataclass
class RicciFlatReport:
    ricci_flat: bool
    max_abs_ricci: float
    closed_form: bool
    conditions: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ricci_flat


def _sym_rank(M: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def ricci_flat_conditions(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> dict:
    """Closed-form Ricci-flat criteria per metric class.

    Case (b) uses ``[S_L, T_L] = O`` in place of the normalisation
    ``T_L = O``; case (c) uses ``tr S'^2 = d tr S'`` so that d need not be
    rescaled to 0 or 1 first.
    """
    dec = decompose(struct.alg, struct.case)
    if struct.case == "a":
        return {"S_zero": bool(np.abs(dec.S).max() < tol)}
    if struct.case == "b":
        S, T = dec.S_L, dec.T_L
        return {
            "tr_S_L": float(np.trace(S)),
            "tr_S_L_sq": float(np.trace(S @ S)),
            "S_L_T_L_commute": bool(np.abs(S @ T - T @ S).max() < tol),
            "T_L_zero": bool(np.abs(T).max() < tol),
            "trace_conditions": bool(abs(np.trace(S)) < tol and abs(np.trace(S @ S)) < tol),
        }
    S = dec.Sprime
    return {
        "b_zero": bool(np.abs(dec.b).max(initial=0.0) < tol),
        "d": dec.d,
        "trace_condition": bool(abs(np.trace(S @ S) - dec.d * np.trace(S)) < tol),
    }


def _closed_ricci_flat(struct, cond) -> bool:
    if struct.case == "a":
        return cond["S_zero"]
    if struct.case == "b":
        return cond["trace_conditions"] and cond["S_L_T_L_commute"]
    return cond["b_zero"] and cond["trace_condition"]


def is_ricci_flat(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> RicciFlatReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    Ric = ricci_general(struct)
    mx = float(np.abs(Ric).max())
    cond = ricci_flat_conditions(struct, tol)
    return RicciFlatReport(mx < tol, mx, _closed_ricci_flat(struct, cond), cond)


def flat_conditions(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> bool:
    """Closed-form flatness criterion, independent of the curvature operators."""
    if not _closed_ricci_flat(struct, ricci_flat_conditions(struct, tol)):
        return False
    dec = decompose(struct.alg, struct.case)
    if struct.case == "a":
        return True
    if struct.case == "b":
        S = dec.S_L
        return bool(np.abs(S @ S).max() < tol and _sym_rank(S, tol) <= 1)
    S, T, d = dec.Sprime, dec.Tprime, dec.d
    return bool(np.abs(S @ S - d * S).max(initial=0.0) < tol
                and np.abs(S @ T - T @ S).max(initial=0.0) < tol)


def is_flat(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.abs(curvature(struct)).max() < tol)


def covariant_derivative_R(struct: LorentzianStructure, L=None, R=None) -> np.ndarray:
    """``nabla R`` as array ``DR[z, x, y]`` of n x n operators.

    ``(nabla_Z R)(X, Y) = L_Z R(X,Y) - R(L_Z X, Y) - R(X, L_Z Y) - R(X,Y) L_Z``.
    """
    if L is None:
        L = levi_civita(struct)
    if R is None:
        R = curvature(struct, L)
    t1 = np.einsum("zij,xyjk->zxyik", L, R)
    # L_Z X_x = sum_c L[z][c, x] X_c
    t2 = np.einsum("zcx,cyij->zxyij", L, R)
    t3 = np.einsum("zcy,xcij->zxyij", L, R)
    t4 = np.einsum("xyij,zjk->zxyik", R, L)
    return t1 - t2 - t3 - t4


def is_locally_symmetric(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.abs(covariant_derivative_R(struct)).max() < tol)


def eta_orthogonal_complement(struct: LorentzianStructure, v) -> np.ndarray:
    """Columns span ``{x : <x, v> = 0}`` (w.r.t. eta)."""
    w = struct.eta @ np.asarray(v, dtype=float)
    _, _, Vt = np.linalg.svd(w[None, :])
    return Vt[1:].T


@dataclass
class WaveReport:
    null: bool
    kind: str
    kind_ok: bool
    transversally_flat: bool
    recurrence_factors: list

    def is_wave(self) -> bool:
        return self.null and self.kind_ok and self.transversally_flat


def check_wave(struct: LorentzianStructure, v, kind: str = "parallel",
               tol: float = DEFAULT_TOL) -> WaveReport:
    """Test a left-invariant vector field for the pp-/pr-wave conditions.

    ``kind="parallel"`` requires ``L_a v = 0`` for all a; ``"recurrent"``
    requires each ``L_a v`` to be a multiple of v (the factors are reported).
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (struct.n,):
        raise ValueError(f"v must have length {struct.n}")
    if not np.any(v):
        raise ValueError("v must be nonzero")
    if kind not in ("parallel", "recurrent"):
        raise ValueError(f"kind must be 'parallel' or 'recurrent', got {kind!r}")
    L = levi_civita(struct)
    R = curvature(struct, L)
    scale = max(1.0, float(np.abs(v).max()))
    null = abs(inner(struct, v, v)) < tol * scale**2

    Lv = np.einsum("aij,j->ai", L, v)
    vv = v @ v
    factors = (Lv @ v) / vv
    if kind == "parallel":
        ok = bool(np.abs(Lv).max() < tol * scale)
    else:
        ok = bool(np.abs(Lv - np.outer(factors, v)).max() < tol * scale)

    P = eta_orthogonal_complement(struct, v)
    Rperp = np.einsum("ap,bq,abij->pqij", P, P, R)
    return WaveReport(null, kind, ok, bool(np.abs(Rperp).max() < tol),
                      [float(f) for f in factors])


@dataclass
class CurvaturePackage:
    L: np.ndarray
    R: np.ndarray
    ricci: np.ndarray


def curvature_package(struct: LorentzianStructure) -> CurvaturePackage:
    L = levi_civita(struct)
    R = curvature(struct, L)
    return CurvaturePackage(L, R, ricci_general(struct))


def rank_S_L(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> int:
    """Rank of the J-symmetric part (case (b) only)."""
    if struct.case != "b":
        raise ValueError("rank_S_L is defined for metric case (b)")
    return _sym_rank(decompose(struct.alg, "b").S_L, tol)


__all__ = [
    "DEFAULT_TOL", "levi_civita", "curvature", "ricci_general", "ricci_from_curvature",
    "ricci_closed_form", "ricci_flat_conditions", "is_ricci_flat", "flat_conditions",
    "is_flat", "covariant_derivative_R", "is_locally_symmetric", "check_wave",
    "eta_orthogonal_complement", "curvature_package", "rank_S_L", "lorentz_J",
    "RicciFlatReport", "WaveReport", "CurvaturePackage",
]
