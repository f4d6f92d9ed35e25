"""Geodesic flow and closed timelike curves of the Petrov-type metrics.

Geodesics are integrated as the Arnold-Euler system for the algebra-valued
velocity ``u``; ``Q(u) = -u_1^2 + u_2^2 + ... + u_n^2`` is conserved.
The CTC witness is the closed curve

    c(t) = (3 sin t, -sin 2t, 0, ..., 0, (pi/2)(1 - cos t)) / beta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .petrov import metric_at


class IntegrationError(RuntimeError):
    """Step-size underflow or another failure of the adaptive integrator."""


@dataclass(frozen=True)
class MetricParameters:
    """(alpha, beta, lambdas) without the Ricci-flat constraints.

    Completeness and the CTC construction only need ``beta != 0``.
    """
    lambdas: tuple
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))

    @property
    def n(self) -> int:
        return len(self.lambdas) + 3


def conserved_quantity(u) -> float:
    u = np.asarray(u, dtype=float)
    return float(-u[0] ** 2 + u[1:] @ u[1:])


def _rhs(sol):
    """Unchecked right-hand side closure; the integrator calls this."""
    a, b = float(sol.alpha), float(sol.beta)
    lam = np.asarray(sol.lambdas, dtype=float)

    def f(u):
        un = u[-1]
        mid = u[2:-1]
        du = np.empty_like(u)
        du[0] = un * (a * u[0] - b * u[1])
        du[1] = un * (b * u[0] + a * u[1])
        du[2:-1] = (un * lam) * mid
        du[-1] = a * (u[0] * u[0] - u[1] * u[1]) - 2 * b * u[0] * u[1] - lam @ (mid * mid)
        return du
    return f


def arnold_euler_rhs(sol, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (sol.n,):
        raise ValueError(f"state must have length {sol.n}")
    return _rhs(sol)(u)


def reduced_rhs(sol, v) -> np.ndarray:
    """Right-hand side on the invariant set ``u_1 = u_2 = 0``; v = (u_3..u_n)."""
    v = np.asarray(v, dtype=float)
    lam = np.asarray(sol.lambdas, dtype=float)
    vn = v[-1]
    dv = np.empty_like(v)
    dv[:-1] = lam * vn * v[:-1]
    dv[-1] = -lam @ (v[:-1] * v[:-1])
    return dv


# Dormand-Prince 5(4), FSAL
_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _dp_step(f, y, fy, h):
    K = np.empty((7, y.size))
    K[0] = fy
    for s in range(1, 7):
        K[s] = f(y + h * (_A[s, :s] @ K[:s]))
    # FSAL: the last stage is evaluated at the 5th-order solution
    y_new = y + h * (_A[6] @ K[:6])
    return y_new, K[6], h * (_E @ K)


@dataclass
class GeodesicTrajectory:
    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    q: np.ndarray
    max_q_drift: float
    n_accepted: int
    n_rejected: int
    underflow_events: int = 0
    reduced: bool = False
    stats: dict = field(default_factory=dict)

    def at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation between accepted steps."""
        ts = self.t
        forward = ts[-1] >= ts[0]
        if not (min(ts[0], ts[-1]) <= t <= max(ts[0], ts[-1])):
            raise ValueError("t outside the integrated range")
        key = ts if forward else -ts
        tt = t if forward else -t
        i = int(np.clip(np.searchsorted(key, tt, side="right") - 1, 0, len(ts) - 2))
        h = ts[i + 1] - ts[i]
        s = (t - ts[i]) / h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return (h00 * self.u[i] + h10 * h * self.du[i]
                + h01 * self.u[i + 1] + h11 * h * self.du[i + 1])


def _integrate(f, y0, t_end, tol, angle_rate=None, max_steps=10_000_000):
    y = np.array(y0, dtype=float)
    t = 0.0
    direction = 1.0 if t_end >= 0 else -1.0
    span = abs(t_end)
    fy = f(y)
    scale0 = tol + tol * np.abs(y)
    d0, d1 = np.abs(y / scale0).max(), np.abs(fy / scale0).max()
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(h, span) if span > 0 else 0.0
    ts, ys, fs = [0.0], [y.copy()], [fy.copy()]
    accepted = rejected = 0
    while abs(t) < span:
        if accepted + rejected > max_steps:
            raise IntegrationError("step budget exhausted")
        h = min(h, span - abs(t))
        if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={direction * abs(t):.6g}")
        y_new, f_new, err_vec = _dp_step(f, y, fy, direction * h)
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.abs(err_vec / scale).max())
        if angle_rate is not None and h * max(angle_rate(y), angle_rate(y_new)) >= math.pi / 2:
            rejected += 1
            h *= 0.5
            continue
        if err <= 1.0:
            accepted += 1
            t = abs(t) + h
            y, fy = y_new, f_new
            ts.append(direction * t)
            ys.append(y.copy())
            fs.append(fy.copy())
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
    return np.array(ts), np.array(ys), np.array(fs), accepted, rejected


def integrate_geodesic(sol, u0, t_end: float, tol: float = 1e-10) -> GeodesicTrajectory:
    """Adaptive Dormand-Prince integration of the Arnold-Euler system.

    ``tol`` is used as both absolute and relative tolerance.  Initial data
    with ``u_1 = u_2 = 0`` are routed through the reduced system on the
    sphere ``u_3^2 + ... + u_n^2 = const``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not math.isfinite(t_end):
        raise ValueError("t_end must be finite")
    u0 = np.asarray(u0, dtype=float)
    n = sol.n
    if u0.shape != (n,):
        raise ValueError(f"initial state must have length {n}")
    reduced = u0[0] == 0 and u0[1] == 0
    if reduced:
        ts, vs, fvs, acc, rej = _integrate(lambda v: reduced_rhs(sol, v), u0[2:], t_end, tol)
        us = np.zeros((len(ts), n))
        us[:, 2:] = vs
        dus = np.zeros_like(us)
        dus[:, 2:] = fvs
    else:
        beta = abs(sol.beta)
        ts, us, dus, acc, rej = _integrate(
            _rhs(sol), u0, t_end, tol,
            angle_rate=lambda u: beta * abs(u[n - 1]))
    q = -us[:, 0] ** 2 + np.einsum("ij,ij->i", us[:, 1:], us[:, 1:])
    drift = float(np.abs(q - q[0]).max())
    steps = np.abs(np.diff(ts))
    stats = {"min_step": float(steps.min(initial=0.0)), "max_step": float(steps.max(initial=0.0))}
    if reduced:
        stats["sphere_radius_sq"] = float(q[0])
        stats["sphere_drift"] = drift
    return GeodesicTrajectory(ts, us, dus, q, drift, acc, rej, 0, reduced, stats)


@dataclass
class PolarReport:
    applicable: bool
    max_relative_residual: float = float("nan")
    theta_monotone: bool = True
    r_min: float = float("nan")
    r_max: float = float("nan")
    theta: np.ndarray | None = None


def unwrap_angle(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Continuous polar angle along a sampled planar path.

    Increments come from ``atan2(cross, dot)`` of consecutive samples, so
    each must be smaller than pi in magnitude.
    """
    th = np.empty(len(x))
    th[0] = math.atan2(y[0], x[0])
    cross = x[:-1] * y[1:] - y[:-1] * x[1:]
    dot = x[:-1] * x[1:] + y[:-1] * y[1:]
    th[1:] = th[0] + np.cumsum(np.arctan2(cross, dot))
    return th


def polar_diagnostics(traj: GeodesicTrajectory, sol) -> PolarReport:
    """Check ``r = r0 exp((alpha/beta)(theta - theta0))`` along a trajectory."""
    u1, u2, un = traj.u[:, 0], traj.u[:, 1], traj.u[:, -1]
    r = np.hypot(u1, u2)
    if np.any(r == 0):
        return PolarReport(applicable=False)
    theta = unwrap_angle(u1, u2)
    pred = r[0] * np.exp((sol.alpha / sol.beta) * (theta - theta[0]))
    resid = float(np.abs((r - pred) / r).max())
    # theta' = beta u_n: on stretches where u_n keeps one sign theta is monotone
    dth = np.diff(theta)
    sgn = np.sign(un)
    same = (sgn[:-1] == sgn[1:]) & (sgn[:-1] != 0)
    expected = np.sign(sol.beta) * sgn[:-1]
    monotone = bool(np.all(dth[same] * expected[same] >= 0))
    return PolarReport(True, resid, monotone, float(r.min()), float(r.max()), theta)


# --- closed timelike curve -------------------------------------------------

def ctc_curve(t, beta: float, n: int = 4) -> np.ndarray:
    """Point(s) on the closed curve in R^n; shape ``t.shape + (n,)``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if n < 4:
        raise ValueError("n must be >= 4")
    t = np.asarray(t, dtype=float)
    x = np.zeros(t.shape + (n,))
    x[..., 0] = 3 * np.sin(t) / beta
    x[..., 1] = -np.sin(2 * t) / beta
    x[..., n - 1] = (math.pi / 2) * (1 - np.cos(t)) / beta
    return x


def ctc_velocity(t: float, beta: float, n: int) -> np.ndarray:
    v = np.zeros(n)
    v[0] = 3 * math.cos(t) / beta
    v[1] = -2 * math.cos(2 * t) / beta
    v[n - 1] = (math.pi / 2) * math.sin(t) / beta
    return v


def f_curve(t):
    """``cos(pi cos t)(9cos^2 t - 4cos^2 2t) + 12 sin(pi cos t) cos 2t cos t``."""
    t = np.asarray(t, dtype=float)
    c, c2 = np.cos(t), np.cos(2 * t)
    pc = np.pi * c
    return np.cos(pc) * (9 * c**2 - 4 * c2**2) + 12 * np.sin(pc) * c2 * c


def ctc_velocity_norm(t, sol):
    """``g(c'(t), c'(t))`` from the closed form in terms of f."""
    if not sol.beta > 0:
        raise ValueError("beta must be positive")
    t = np.asarray(t, dtype=float)
    a, b = sol.alpha, sol.beta
    expo = np.exp(np.pi * abs(a) / b * (1 - np.cos(t)))
    return (expo * f_curve(t) + (np.pi**2 / 4) * np.sin(t) ** 2) / b**2


def ctc_velocity_norm_direct(t: float, sol) -> float:
    """``c'(t)^T g(c(t)) c'(t)`` with the full coordinate metric."""
    n = sol.n
    v = ctc_velocity(t, sol.beta, n)
    return float(v @ metric_at(sol, ctc_curve(t, sol.beta, n)) @ v)


def _golden_max(f, lo, hi, tol):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = (a + b) / 2
    return t, f(t)


@dataclass
class FMax:
    t_star: float
    f_star: float
    grid_max: float


def f_max(search_tol: float = 1e-12, grid: int = 16384) -> FMax:
    """Maximum of f over one period: dense grid, then golden-section refinement."""
    if not search_tol > 0:
        raise ValueError("search_tol must be positive")
    ts = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    fs = f_curve(ts)
    i = int(np.argmax(fs))
    step = ts[1] - ts[0]
    t_star, f_star = _golden_max(lambda s: float(f_curve(s)), ts[i] - step, ts[i] + step, search_tol)
    f_star = max(f_star, float(fs[i]))
    return FMax(float(np.mod(t_star, 2 * np.pi)), f_star, float(fs[i]))


@dataclass
class CtcVerdict:
    all_timelike: bool
    worst_norm: float
    f_star: float
    bound: float
    bound_holds: bool
    exp_factor_min: float
    num_samples: int


def ctc_samples(num_samples: int) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, num_samples, endpoint=False)


def verify_ctc(sol, num_samples: int = 10000) -> CtcVerdict:
    """Sample the witness curve and check it is timelike everywhere.

    Also reports the analytic bound ``(f_star + pi^2/4) / beta^2``, valid
    because the exponential factor is at least one and f_star is negative.
    """
    if num_samples < 1000:
        raise ValueError("num_samples must be at least 1000")
    ts = ctc_samples(num_samples)
    norms = ctc_velocity_norm(ts, sol)
    fm = f_max()
    bound = (fm.f_star + np.pi**2 / 4) / sol.beta**2
    expo = np.exp(np.pi * abs(sol.alpha) / sol.beta * (1 - np.cos(ts)))
    worst = float(norms.max())
    return CtcVerdict(bool(np.all(norms < 0)), worst, fm.f_star, float(bound),
                      bool(fm.f_star + np.pi**2 / 4 < 0 and worst <= bound),
                      float(expo.min()), num_samples)


# --- CSV -------------------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def write_trajectory_csv(path, traj: GeodesicTrajectory) -> None:
    n = traj.u.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *[f"u{i}" for i in range(1, n + 1)], "Q"])
        for t, u, q in zip(traj.t, traj.u, traj.q):
            w.writerow([_fmt(t), *map(_fmt, u), _fmt(q)])


def read_trajectory_csv(path):
    """Returns ``(t, u, Q)`` arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(x) for x in r] for r in rows[1:]])
    return data[:, 0], data[:, 1:-1], data[:, -1]


def write_ctc_csv(path, sol, num_samples: int) -> None:
    n = sol.n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *[f"x{i}" for i in range(1, n + 1)], "norm"])
        ts = ctc_samples(num_samples)
        norms = ctc_velocity_norm(ts, sol)
        for t, g in zip(ts, norms):
            w.writerow([_fmt(t), *map(_fmt, ctc_curve(t, sol.beta, n)), _fmt(g)])


def write_plot_data(directory, sol, num_samples: int = 2000) -> list[Path]:
    """Data behind the f(t) plot, the 3-D CTC and its two planar projections."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    ts = ctc_samples(num_samples)
    n = sol.n
    pts = ctc_curve(ts, sol.beta, n)[:, [0, 1, n - 1]]
    files = {
        "f_curve.csv": (["t", "f", "minus_pi_sq_over_4"],
                        [[t, f, -np.pi**2 / 4] for t, f in zip(ts, f_curve(ts))]),
        "ctc_3d.csv": (["t", "x1", "x2", f"x{n}"], [[t, *p] for t, p in zip(ts, pts)]),
        f"ctc_x1x{n}.csv": (["t", "x1", f"x{n}"], [[t, p[0], p[2]] for t, p in zip(ts, pts)]),
        f"ctc_x2x{n}.csv": (["t", "x2", f"x{n}"], [[t, p[1], p[2]] for t, p in zip(ts, pts)]),
    }
    out = []
    for name, (header, rows) in files.items():
        p = d / name
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows([[_fmt(v) for v in r] for r in rows])
        out.append(p)
    return out
