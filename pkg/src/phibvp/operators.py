"""The solution operator of ``d/dt phi(u') = v`` under boundary conditions.

``khat(v, c1, c2)`` builds ``u(t) = c1 + int_0^t psi(int_0^s v + c2) ds``.
For a given ``v`` exactly one pair (c1, c2) makes ``u`` satisfy the boundary
conditions; it is found by bisection on a scalar map that is increasing in
``c2``.  Only monotonicity is used because ``psi'`` may vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import C1GridFunction, GridFunction, cumtrapz, trapz
from .phi import PhiModel
from .problem import BoundaryConditions, Dirichlet, SturmLiouville
from .roots import solve_increasing

CONSTANTS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ConstantsSolution:
    c1: float
    c2: float
    residual: float
    iterations: int


def khat(phi: PhiModel, v: GridFunction, c1: float, c2: float) -> C1GridFunction:
    V = cumtrapz(v).values
    du = phi.psi(V + c2)
    du[0] = phi.psi(c2)
    u = c1 + cumtrapz(GridFunction(du)).values
    u[0] = c1
    return C1GridFunction(GridFunction(u), GridFunction(du))


def g_dirichlet(phi: PhiModel, v: GridFunction, A: float, c: float) -> float:
    """u(1) for u = khat(v, A, c)."""
    V = cumtrapz(v).values
    return A + trapz(phi.psi(V + c))


def g_sturm_liouville(phi: PhiModel, v: GridFunction, bc: SturmLiouville, c: float) -> float:
    """``a u(1) + b u'(1)`` once c1 is eliminated through the left condition."""
    V = cumtrapz(v).values
    return _g_sl(phi, V, bc, c)


def _g_sl(phi, V, bc, c):
    slope = phi.psi(V + c)
    u1 = -bc.A / bc.alpha + (bc.beta / bc.alpha) * phi.psi(c) + trapz(slope)
    return bc.a * u1 + bc.b * slope[-1]


def solve_constants(
    phi: PhiModel, v: GridFunction, bc: BoundaryConditions, tol: float = CONSTANTS_TOLERANCE
) -> ConstantsSolution:
    """Find (c1, c2) so that ``khat(v, c1, c2)`` meets ``bc``.

    Raises:
        IterationCap: when no bracket is found within 200 doublings.
    """
    V = cumtrapz(v).values
    if isinstance(bc, Dirichlet):
        fun = lambda c: bc.A + trapz(phi.psi(V + c))
        c2, res, it = solve_increasing(fun, bc.B, ftol=tol)
        return ConstantsSolution(bc.A, c2, res, it)
    fun = lambda c: _g_sl(phi, V, bc, c)
    c2, res, it = solve_increasing(fun, bc.B, ftol=tol)
    c1 = -bc.A / bc.alpha + (bc.beta / bc.alpha) * phi.psi(c2)
    return ConstantsSolution(c1, c2, res, it)


def apply_K(phi: PhiModel, v: GridFunction, bc: BoundaryConditions, tol: float = CONSTANTS_TOLERANCE) -> C1GridFunction:
    sol = solve_constants(phi, v, bc, tol)
    return khat(phi, v, sol.c1, sol.c2)


def bc_residuals(u: C1GridFunction, bc: BoundaryConditions) -> tuple[float, float]:
    """Left and right boundary-condition residuals of ``u``."""
    uu, dd = u.u.values, u.du.values
    return bc.residuals(uu[0], dd[0], uu[-1], dd[-1])


def discrete_L(phi: PhiModel, u: C1GridFunction) -> np.ndarray:
    """Midpoint difference ``n (phi(du_{j+1}) - phi(du_j))``, one value per interval."""
    return np.diff(phi.phi(u.du.values)) * u.n
