"""Independent reference solutions.

Two tools live here.  ``manufactured_problem`` turns an analytic profile u*
into a problem it solves exactly, and ``shooting_solve`` integrates the
first-order system ``u' = psi(w)``, ``w' = lam f(t, u, psi(w))`` with RK4 and
matches the free initial value ``w(0)`` to the right boundary condition.
Neither uses the fixed-point machinery, so both can check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .apriori import r0_bound
from .errors import GridMismatch, NoBracket
from .grid import C1GridFunction, nodes
from .phi import PhiModel
from .problem import Dirichlet, ProblemInstance, RhsFunction, SturmLiouville

SHOOTING_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Profile:
    """An exact solution with its first two derivatives, as code and as text."""

    name: str
    u: Callable
    du: Callable
    ddu: Callable
    u_src: str
    du_src: str
    ddu_src: str


def _num(c):
    return repr(float(c))


def polynomial(coeffs, name=None) -> Profile:
    """``sum_k coeffs[k] t**k`` for degree up to 4."""
    c = [float(a) for a in coeffs]
    if not 1 <= len(c) <= 5:
        raise ValueError("polynomial profiles have degree 0..4")
    dc = [k * c[k] for k in range(1, len(c))] or [0.0]
    ddc = [k * dc[k] for k in range(1, len(dc))] or [0.0]

    def src(cs):
        terms = []
        for k, a in enumerate(cs):
            if a == 0.0:
                continue
            if k == 0:
                terms.append(_num(a))
            elif k == 1:
                terms.append(f"{_num(a)}*t")
            else:
                terms.append(f"{_num(a)}*t^{k}")
        return " + ".join(terms) if terms else "0"

    return Profile(
        name or f"poly{len(c) - 1}",
        lambda t: np.polynomial.polynomial.polyval(t, c),
        lambda t: np.polynomial.polynomial.polyval(t, dc),
        lambda t: np.polynomial.polynomial.polyval(t, ddc),
        src(c),
        src(dc),
        src(ddc),
    )


def sine(k: int = 1, amp: float = 1.0) -> Profile:
    """``amp sin(k pi t)``."""
    w = k * math.pi
    a = float(amp)
    return Profile(
        f"sin{k}" if a == 1.0 else f"sin{k}x{a:g}",
        lambda t: a * np.sin(w * t),
        lambda t: a * w * np.cos(w * t),
        lambda t: -a * w * w * np.sin(w * t),
        f"{_num(a)}*sin({_num(w)}*t)",
        f"{_num(a * w)}*cos({_num(w)}*t)",
        f"-{_num(a * w * w)}*sin({_num(w)}*t)",
    )


def sinh_scaled(scale: float = 1.0) -> Profile:
    """``sinh(scale t) / sinh(scale)``; sinh is written through exp."""
    s = float(scale)
    d = math.sinh(s)
    return Profile(
        "sinh" if s == 1.0 else f"sinh{s:g}",
        lambda t: np.sinh(s * t) / d,
        lambda t: s * np.cosh(s * t) / d,
        lambda t: s * s * np.sinh(s * t) / d,
        f"(exp({_num(s)}*t) - exp(-{_num(s)}*t))/{_num(2 * d)}",
        f"{_num(s)}*(exp({_num(s)}*t) + exp(-{_num(s)}*t))/{_num(2 * d)}",
        f"{_num(s * s)}*(exp({_num(s)}*t) - exp(-{_num(s)}*t))/{_num(2 * d)}",
    )


CATALOG = {
    "linear": polynomial([0.0, 1.0], "linear"),
    "quadratic": polynomial([0.0, 0.0, 0.5], "quadratic"),
    "cubic": polynomial([0.0, 0.5, 0.0, 1.0], "cubic"),
    "quartic": polynomial([0.2, 1.0, -1.0, 0.0, 1.0], "quartic"),
    "sin": sine(1),
    "sin2": sine(2),
    "sinh": sinh_scaled(1.0),
}


def profile_by_name(name: str) -> Profile:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; choose from {', '.join(CATALOG)}") from None


def _g_source(phi: PhiModel, prof: Profile) -> str:
    """Text of ``d/dt phi(u*') = phi'(u*') u*''``."""
    parts = []
    for p, w in zip(phi.spec.exponents, phi.spec.weights):
        c = w * p * (p - 1.0)
        if p == 2.0:
            parts.append(_num(c))
        else:
            parts.append(f"{_num(c)}*abs({prof.du_src})^{_num(p - 2.0)}")
    return f"({' + '.join(parts)})*({prof.ddu_src})"


def manufactured_problem(
    phi: PhiModel,
    profile: Profile | str,
    bc_kind: str = "dirichlet",
    grid_n: int = 200,
    sl_coeffs=(1.0, 1.0, 1.0, 1.0),
):
    """Problem whose exact solution is ``profile``, and that solution sampled.

    The right-hand side is ``g(t) + (x - u*(t))`` with
    ``g = phi'(u*') u*''``.  The coupling term makes ``x f(t, x, 0) > 0``
    hold beyond ``R = 1 + max |g - u*|``.  ``S0 = 0`` and ``T0`` is the
    maximum of ``|f|`` over the ``r0`` box, both with a 1% margin over a
    dense sample.

    Under a p < 2 model, ``g`` is singular wherever ``u*'`` vanishes.  A zero
    at t = 0 only is accepted and flagged on the instance; interior zeros
    are rejected.
    """
    prof = profile_by_name(profile) if isinstance(profile, str) else profile
    dense = np.linspace(0.0, 1.0, 8193)
    singular = False
    if min(phi.spec.exponents) < 2.0:
        slope = np.abs(prof.du(dense))
        if np.any(slope[1:] == 0.0) or np.min(slope[1:]) < 1e-12:
            raise ValueError(f"profile {prof.name!r} has u*' = 0 inside (0, 1]; phi' is singular there")
        singular = bool(slope[0] == 0.0 and np.any(prof.ddu(dense[:1]) != 0.0))
    t_lo = 1.0 / grid_n if singular else 0.0
    ts = np.linspace(t_lo, 1.0, 8193)
    g = phi.dphi(prof.du(ts)) * prof.ddu(ts)
    gap = float(np.max(np.abs(g - prof.u(ts))))
    R = 1.01 * (1.0 + gap)

    u0, du0 = float(prof.u(0.0)), float(prof.du(0.0))
    u1, du1 = float(prof.u(1.0)), float(prof.du(1.0))
    if bc_kind == "dirichlet":
        bc = Dirichlet(u0, u1)
    elif bc_kind == "sturm_liouville":
        alpha, beta, a, b = sl_coeffs
        bc = SturmLiouville(alpha, beta, -alpha * u0 + beta * du0, a, b, a * u1 + b * du1)
    else:
        raise ValueError(f"unknown bc_kind {bc_kind!r}")

    expr = f"{_g_source(phi, prof)} + x - ({prof.u_src})"
    draft = ProblemInstance(phi, bc, RhsFunction(expr, R, 0.0, 0.0), grid_n, singular)
    r0 = r0_bound(draft)
    T0 = 1.01 * (gap + r0)
    problem = ProblemInstance(phi, bc, RhsFunction(expr, R, 0.0, T0), grid_n, singular)
    t = nodes(grid_n)
    exact = C1GridFunction.from_arrays(prof.u(t), prof.du(t))
    return problem, exact


@dataclass
class ShootingResult:
    u: C1GridFunction
    free_param: float
    bc_residual: float
    rk4_steps: int


def _initial_u(p, w0, psi0):
    bc = p.bc
    if isinstance(bc, Dirichlet):
        return np.full_like(w0, bc.A)
    return (bc.beta * psi0 - bc.A) / bc.alpha


def _integrate(p, lam, w0, steps, record_every):
    """RK4 for a batch of initial values ``w0``; returns sampled u and w."""
    phi = p.phi
    w = np.array(w0, dtype=float)
    u = _initial_u(p, w, phi.psi(w))
    h = 1.0 / steps
    us, ws = [u.copy()], [w.copy()]

    def rhs(t, u, w):
        du = phi.psi(w)
        if lam == 0.0:
            return du, np.zeros_like(w)
        tt = np.full_like(w, t)
        return du, lam * p.rhs(tt, u, du)

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            t = k * h
            a1, b1 = rhs(t, u, w)
            a2, b2 = rhs(t + 0.5 * h, u + 0.5 * h * a1, w + 0.5 * h * b1)
            a3, b3 = rhs(t + 0.5 * h, u + 0.5 * h * a2, w + 0.5 * h * b2)
            a4, b4 = rhs(t + h, u + h * a3, w + h * b3)
            u = u + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
            w = w + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
            if (k + 1) % record_every == 0:
                us.append(u.copy())
                ws.append(w.copy())
    return np.array(us), np.array(ws)


def _miss(p, u1, w1):
    bc = p.bc
    if isinstance(bc, Dirichlet):
        return u1 - bc.B
    return bc.a * u1 + bc.b * p.phi.psi(w1) - bc.B


def shooting_solve(
    p: ProblemInstance, lam: float = 1.0, tol: float = SHOOTING_TOLERANCE, sections: int = 16
) -> ShootingResult:
    """Shoot on ``w(0) = phi(u'(0))`` with 4 RK4 steps per grid interval.

    The miss at t = 1 is treated as increasing in ``w(0)``.  The search
    interval starts at ``+-phi(2 r0 + 1)`` and doubles until it brackets a
    sign change; multisection then narrows it and secant steps finish the
    match.

    Raises:
        NoBracket: when no sign change turns up.
    """
    n = p.grid_n
    steps = 4 * n

    def miss(w0):
        us, ws = _integrate(p, lam, w0, steps, steps)
        m = _miss(p, us[-1], ws[-1])
        # a blown-up trajectory counts as overshooting in the direction of w0
        return np.where(np.isfinite(m), m, np.where(w0 >= center, np.inf, -np.inf))

    W = p.phi.phi(2.0 * r0_bound(p) + 1.0)
    center = 0.0
    lo, hi = -W, W
    for _ in range(60):
        m_lo, m_hi = miss(np.array([lo, hi]))
        if m_lo <= 0.0 <= m_hi:
            break
        lo, hi = 2.0 * lo, 2.0 * hi
    else:
        raise NoBracket(f"no sign change of the shooting miss on [{lo:g}, {hi:g}]")

    scale = max(1.0, abs(getattr(p.bc, "B", 0.0)))
    target = tol * scale
    for _ in range(80):
        if hi - lo <= 1e-3 * max(1.0, abs(lo), abs(hi)):
            break
        grid = np.linspace(lo, hi, sections + 1)
        m = miss(grid)
        exact = np.flatnonzero(m == 0.0)
        if exact.size:
            lo = hi = grid[exact[0]]
            m_lo = m_hi = 0.0
            break
        j = int(np.flatnonzero(m > 0.0)[0])
        lo, hi, m_lo, m_hi = grid[j - 1], grid[j], m[j - 1], m[j]

    best_w, best_m = (lo, m_lo) if abs(m_lo) <= abs(m_hi) else (hi, m_hi)
    a, fa, b, fb = lo, m_lo, hi, m_hi
    for _ in range(60):
        if abs(best_m) <= target:
            break
        if fb != fa and np.isfinite(fa) and np.isfinite(fb):
            cand = b - fb * (b - a) / (fb - fa)
        else:
            cand = 0.5 * (lo + hi)
        if not (lo <= cand <= hi):
            cand = 0.5 * (lo + hi)
        fc = float(miss(np.array([cand]))[0])
        if abs(fc) < abs(best_m):
            best_w, best_m = cand, fc
        if fc < 0:
            lo = cand
        elif fc > 0:
            hi = cand
        a, fa, b, fb = b, fb, cand, fc

    us, ws = _integrate(p, lam, np.array([best_w]), steps, 4)
    u = us[:, 0]
    w = ws[:, 0]
    sol = C1GridFunction.from_arrays(u, p.phi.psi(w))
    return ShootingResult(sol, float(best_w), float(abs(best_m)), steps)


def compare(u_num: C1GridFunction, u_ref: C1GridFunction) -> tuple[float, float]:
    """Nodal sup differences of u and of du."""
    if u_num.n != u_ref.n:
        raise GridMismatch(f"grid sizes differ: {u_num.n} vs {u_ref.n}")
    return (
        float(np.max(np.abs(u_num.u.values - u_ref.u.values))),
        float(np.max(np.abs(u_num.du.values - u_ref.du.values))),
    )
