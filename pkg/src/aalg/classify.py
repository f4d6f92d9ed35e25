"""Ricci-flat classification, normal forms and finite symmetry groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .curvature import DEFAULT_TOL, curvature, is_flat, is_ricci_flat
from .metric import LorentzianStructure
from .petrov import DomainError, PetrovSolution, is_simply_transitive

NORMAL_FORMS = ("diagonal", "rotation_i", "jordan_ii", "nilpotent_iii")


def normal_form_block(kind: str, **params) -> np.ndarray:
    if kind == "rotation_i":
        a, b = float(params["alpha"]), float(params["beta"])
        if not b > 0:
            raise ValueError("rotation_i needs beta > 0")
        return np.array([[a, -b], [b, a]])
    if kind == "jordan_ii":
        g = float(params.get("gamma", 0.0))
        return np.array([[-1 + g, -1.0], [1.0, 1 + g]])
    if kind == "nilpotent_iii":
        d = float(params.get("delta", 0.0))
        return np.array([[-d, -d, -1.0], [d, d, 1.0], [1.0, 1.0, 0.0]])
    if kind == "diagonal":
        return np.zeros((0, 0))
    raise ValueError(f"unknown normal form {kind!r}; expected one of {NORMAL_FORMS}")


def normal_form_template(kind: str, params: dict | None, n: int, tail=None) -> np.ndarray:
    """Associated matrix ``block (+) Diag(tail)`` of size n-1.

    ``tail`` defaults to zeros filling the remaining slots.  For
    ``kind="diagonal"`` the tail is the whole diagonal.
    """
    block = normal_form_block(kind, **(params or {}))
    m = n - 1
    k = block.shape[0]
    if k > m:
        raise ValueError(f"{kind} block needs n - 1 >= {k}, got n = {n}")
    tail = np.zeros(m - k) if tail is None else np.asarray(tail, dtype=float)
    if tail.shape != (m - k,):
        raise ValueError(f"tail must have length {m - k}, got {tail.shape}")
    A = np.zeros((m, m))
    A[:k, :k] = block
    A[k:, k:] = np.diag(tail)
    return A


@dataclass
class RicciFlatClass:
    tag: str  # Flat, PetrovFamily, PlaneWaveB, PlaneWaveC, NotRicciFlat, UnrecognizedPresentation
    params: dict = field(default_factory=dict)


def _offdiag_zero(M: np.ndarray, tol: float) -> bool:
    return bool(np.abs(M - np.diag(np.diag(M))).max(initial=0.0) < tol)


def _match_petrov(A: np.ndarray, tol: float):
    m = A.shape[0]
    if m < 3:
        return None
    a11, a12, a21, a22 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    if abs(a11 - a22) > tol or abs(a12 + a21) > tol or abs(a21) < tol:
        return None
    rest = A.copy()
    rest[:2, :2] = 0.0
    if not _offdiag_zero(rest, tol) or np.abs(rest[:2]).max() > tol:
        return None
    alpha, beta = float(a11), float(a21)
    lam = np.diag(A)[2:].copy()
    notes = []
    if beta < 0:
        # conjugation by Diag(1, -1, 1, ...) preserves eta_b and flips beta
        beta = -beta
        notes.append("beta sign normalised")
    if alpha > 0:
        # P = Diag(-1, 1, ...), c = -1 flips alpha and every lambda
        alpha, lam = -alpha, -lam
        notes.append("alpha sign normalised (lambdas negated)")
    return {"alpha": alpha, "beta": beta, "lambda": lam.tolist(), "normalisations": notes}


def _match_plane_wave_b(A: np.ndarray, tol: float):
    m = A.shape[0]
    if m < 3:
        return None
    delta = float(A[1, 0])
    expected = np.zeros_like(A)
    expected[:3, :3] = normal_form_block("nilpotent_iii", delta=delta)
    if np.abs(A - expected).max() < tol:
        return {"delta": delta}
    return None


def classify_ricci_flat(struct: LorentzianStructure, tol: float = DEFAULT_TOL) -> RicciFlatClass:
    """Place a structure in the Ricci-flat trichotomy.

    Non-flat families are recognised only in their canonical presentation;
    other Ricci-flat non-flat matrices are reported as
    ``UnrecognizedPresentation``.
    """
    rf = is_ricci_flat(struct, tol)
    if not rf.ricci_flat:
        return RicciFlatClass("NotRicciFlat", {"max_abs_ricci": rf.max_abs_ricci})
    if is_flat(struct, tol):
        return RicciFlatClass("Flat")
    A = struct.A
    if struct.case == "b":
        p = _match_petrov(A, tol)
        if p is not None:
            return RicciFlatClass("PetrovFamily", p)
        p = _match_plane_wave_b(A, tol)
        if p is not None:
            return RicciFlatClass("PlaneWaveB", p)
    elif struct.case == "c":
        m = A.shape[0] - 1
        d = float(A[m, m])
        if np.abs(A[:m, m]).max() < tol and abs(d) > tol:
            return RicciFlatClass("PlaneWaveC", {
                "d": d,
                "Aprime": (A[:m, :m] / d).tolist(),
                "c": (A[m, :m] / d**2).tolist(),
            })
    return RicciFlatClass("UnrecognizedPresentation")


def decomposability(lambdas) -> tuple[list, int]:
    lam = [float(v) for v in lambdas]
    core = [v for v in lam if v != 0]
    return core, len(lam) - len(core)


def is_special_palindrome(lambdas, tol: float = 0.0) -> bool:
    """Antisymmetric pattern ``(k1..k_{h-1}, [0,] -k_{h-1}..-k1)`` with all k > 0.

    ``tol = 0`` compares exactly; pass a small tolerance for computed values.
    """
    lam = [float(v) for v in lambdas]
    L = len(lam)
    if L < 2:
        return False
    half = L // 2
    if L % 2 == 1:
        if abs(lam[half]) > tol:
            return False
    if any(v <= tol for v in lam[:half]):
        return False
    return all(abs(lam[i] + lam[L - 1 - i]) <= tol for i in range(half))


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    family: str  # "gamma1" or "gamma2"
    is_isometry_sym: bool
    is_automorphism: bool


def gamma1(n: int):
    """``Diag(tau, tau, tau_3, ..., tau_n)`` over all sign choices."""
    for tau, *rest in itertools.product((1.0, -1.0), repeat=n - 1):
        yield np.diag([tau, tau, *rest])


def gamma2(n: int):
    """``Diag(tau', -tau') (+) antidiag(tau'_3..tau'_{n-1}) (+) (tau'_n)``.

    Row ``3 + k`` carries ``tau'_{3+k}`` in column ``n - 1 - k`` (1-based),
    i.e. the middle slots are reversed.
    """
    if n < 5:
        return
    mid = n - 3
    for tau, *rest in itertools.product((1.0, -1.0), repeat=n - 1):
        M = np.zeros((n, n))
        M[0, 0], M[1, 1] = tau, -tau
        for k in range(mid):
            M[2 + k, 2 + mid - 1 - k] = rest[k]
        M[n - 1, n - 1] = rest[-1]
        yield M


def _preserves_curvature(Phi, R, tol) -> bool:
    Pinv = np.linalg.inv(Phi)
    lhs = np.einsum("ca,db,cdij->abij", Phi, Phi, R)
    rhs = np.einsum("ik,abkl,lj->abij", Phi, R, Pinv)
    return bool(np.abs(lhs - rhs).max() < tol)


def _preserves_bracket(Phi, C, tol) -> bool:
    lhs = np.einsum("ka,abc->kbc", Phi, C)
    rhs = np.einsum("db,ec,kde->kbc", Phi, Phi, C)
    return bool(np.abs(lhs - rhs).max() < tol)


def is_lorentz(Phi: np.ndarray) -> bool:
    J = np.eye(Phi.shape[0])
    J[0, 0] = -1.0
    return bool(np.array_equal(Phi.T @ J @ Phi, J))


def enumerate_sym_group(petrov: PetrovSolution, tol: float = DEFAULT_TOL) -> list[GroupElement]:
    """Curvature-preserving elements among the candidate sets Gamma_1, Gamma_2.

    Each candidate is tested for ``R(Phi X_a, Phi X_b) = Phi R(X_a, X_b) Phi^-1``
    on all basis pairs and flagged as an automorphism when it also preserves
    brackets.  Only retained elements are returned.
    """
    if petrov.degenerate or not is_simply_transitive(petrov.lambdas):
        raise DomainError("symmetry enumeration needs strictly decreasing lambdas "
                          "and a non-degenerate solution")
    struct = petrov.structure()
    R = curvature(struct)
    C = struct.alg.structure_constants()
    n = struct.n
    out = []
    for family, gen in (("gamma1", gamma1(n)), ("gamma2", gamma2(n))):
        for Phi in gen:
            if _preserves_curvature(Phi, R, tol):
                out.append(GroupElement(Phi, family, True, _preserves_bracket(Phi, C, tol)))
    return out


@dataclass
class IsotropyDescriptor:
    order: int
    abelian: bool
    label: str
    has_order_four: bool


def _z2_power(k: int) -> str:
    return "Z2" if k == 1 else f"Z2^{k}"


def isotropy_structure(elements) -> IsotropyDescriptor:
    """Order, abelianness and a group label for the automorphism subset.

    Accepts GroupElements (non-automorphisms are dropped) or bare matrices.
    """
    mats = [e.matrix if isinstance(e, GroupElement) else np.asarray(e) for e in elements
            if not isinstance(e, GroupElement) or e.is_automorphism]
    if not mats:
        raise ValueError("no automorphisms supplied")
    n = mats[0].shape[0]
    order = len(mats)
    abelian = all(np.array_equal(a @ b, b @ a) for a, b in itertools.combinations(mats, 2))
    I = np.eye(n)
    has4 = any(not np.array_equal(M @ M, I) for M in mats)
    k = int(round(np.log2(order)))
    if 2**k != order:
        label = f"order {order}"
    elif abelian and not has4:
        label = _z2_power(k)
    elif not abelian and has4 and k >= 3:
        label = "Z2 x D4" if n == 5 else (
            "D4" if k == 3 else f"{_z2_power(k - 3)} x| D4")
    else:
        label = f"order {order}"
    return IsotropyDescriptor(order, abelian, label, has4)


def group_closed(mats) -> bool:
    """Closure under products and inverses, by enumeration."""
    def key(M):
        return (np.asarray(M).round(12) + 0.0).tobytes()

    keys = {key(M) for M in mats}
    return all(key(np.linalg.inv(a)) in keys and all(key(a @ b) in keys for b in mats)
               for a in mats)
