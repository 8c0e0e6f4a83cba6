"""Damped Picard iteration on ``u -> K(lam N(u))`` with continuation in lam.

The path starts at lam = 0, where the map is constant and its value is the
affine function meeting the boundary conditions, and marches lam up to 1,
warm-starting each stage from the previous converged iterate.  A stage that
stalls is retried with half the step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .apriori import BoundCertificate, bound_certificate
from .errors import DomainError, IterationCap, NonConvergence
from .grid import C1GridFunction, GridFunction, c1_norm
from .operators import apply_K, bc_residuals
from .problem import ProblemInstance

log = logging.getLogger(__name__)

_BLOWUP = 1e12


@dataclass(frozen=True)
class SolverConfig:
    theta: float = 0.7
    fixpoint_tol: float = 1e-10
    max_picard_iters: int = 500
    lambda_step0: float = 0.25
    lambda_step_min: float = 2.0**-10

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if not self.fixpoint_tol > 0:
            raise ValueError("fixpoint_tol must be > 0")
        if self.max_picard_iters < 1:
            raise ValueError("max_picard_iters must be >= 1")
        if not 0.0 < self.lambda_step0 <= 1.0:
            raise ValueError("lambda_step0 must lie in (0, 1]")
        if not 0.0 < self.lambda_step_min <= self.lambda_step0:
            raise ValueError("need 0 < lambda_step_min <= lambda_step0")


@dataclass
class Solution:
    u: C1GridFunction
    lambda_reached: float
    fixpoint_residual: float
    strong_residual: float
    picard_iters_total: int
    certificate: BoundCertificate | None = None
    bc_residuals: tuple[float, float] = (0.0, 0.0)
    stages: list[tuple[float, int]] = field(default_factory=list)


def apply_N(p: ProblemInstance, u: C1GridFunction) -> GridFunction:
    """Nodewise ``f(t_j, u_j, u'_j)``."""
    return GridFunction(p.rhs(u.t, u.u.values, u.du.values))


def picard_step(p: ProblemInstance, u: C1GridFunction, lam: float, theta: float) -> C1GridFunction:
    """``(1 - theta) u + theta K(lam N(u))``."""
    return u.blend(_image(p, u, lam), theta)


def _image(p, u, lam):
    if lam == 0.0:
        v = GridFunction.zeros(u.n)
    else:
        v = lam * apply_N(p, u)
    return apply_K(p.phi, v, p.bc)


def strong_residual(p: ProblemInstance, u: C1GridFunction, lam: float) -> float:
    """Max over interval midpoints of ``|n (phi(du_{j+1}) - phi(du_j)) - lam f(mid)|``."""
    n = u.n
    w = p.phi.phi(u.du.values)
    lhs = np.diff(w) * n
    if lam == 0.0:
        return float(np.max(np.abs(lhs)))
    tm = (np.arange(n) + 0.5) / n
    um = 0.5 * (u.u.values[1:] + u.u.values[:-1])
    dm = 0.5 * (u.du.values[1:] + u.du.values[:-1])
    return float(np.max(np.abs(lhs - lam * p.rhs(tm, um, dm))))


def linear_solution(p: ProblemInstance, n: int | None = None) -> C1GridFunction:
    """``K(0)``: the affine function satisfying the boundary conditions."""
    return apply_K(p.phi, GridFunction.zeros(n or p.grid_n), p.bc)


def _iterate(p, u, lam, cfg):
    """Picard iterations at fixed lam; returns (u, residual, iters, converged)."""
    res = math.inf
    for k in range(1, cfg.max_picard_iters + 1):
        try:
            ku = _image(p, u, lam)
        except (DomainError, IterationCap, FloatingPointError, ValueError) as exc:
            log.debug("stage lam=%g failed at iteration %d: %s", lam, k, exc)
            return u, res, k, False
        res = c1_norm(ku - u)
        if res <= cfg.fixpoint_tol:
            return u, res, k, True
        if not math.isfinite(res) or res > _BLOWUP:
            return u, res, k, False
        u = u.blend(ku, cfg.theta)
    return u, res, cfg.max_picard_iters, False


def solve(
    p: ProblemInstance,
    cfg: SolverConfig | None = None,
    *,
    lambda_target: float = 1.0,
    initial: C1GridFunction | None = None,
) -> Solution:
    """Continue from lam = 0 to ``lambda_target`` and return the fixed point.

    Convergence at each stage means ``||K(lam N(u)) - u||_C1 <= fixpoint_tol``,
    which also bounds the damped step ``||u_{k+1} - u_k||``.

    Raises:
        NonConvergence: if the lam step falls below ``lambda_step_min``.
    """
    cfg = cfg or SolverConfig()
    if not 0.0 <= lambda_target <= 1.0:
        raise ValueError("lambda_target must lie in [0, 1]")
    u0 = initial if initial is not None else linear_solution(p)
    u, res, iters, ok = _iterate(p, u0, 0.0, cfg)
    if not ok:
        raise NonConvergence(0.0, res)
    total = iters
    stages = [(0.0, iters)]
    lam = 0.0
    step = cfg.lambda_step0
    while lam < lambda_target:
        nxt = min(lambda_target, lam + step)
        cand, res, iters, ok = _iterate(p, u, nxt, cfg)
        total += iters
        if ok:
            u, lam = cand, nxt
            stages.append((lam, iters))
            log.debug("lam=%g converged in %d iterations", lam, iters)
            continue
        step *= 0.5
        log.debug("lam=%g stalled (residual %.3e); step -> %g", nxt, res, step)
        if step < cfg.lambda_step_min:
            raise NonConvergence(lam, res)
    try:
        cert = bound_certificate(p)
    except (ValueError, IterationCap):
        cert = None
    return Solution(
        u=u,
        lambda_reached=lam,
        fixpoint_residual=res,
        strong_residual=strong_residual(p, u, lam),
        picard_iters_total=total,
        certificate=cert,
        bc_residuals=bc_residuals(u, p.bc),
        stages=stages,
    )
