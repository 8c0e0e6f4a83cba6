# %% [markdown]
# # Cross-checking against a shooting method
#
# The shooting oracle integrates u' = psi(w), w' = lam f(t, u, psi(w)) with
# RK4 and matches w(0) to the right boundary condition.  It shares no code
# with the fixed-point solver apart from phi and the right-hand side.

# %%
import math

from phibvp import PhiModel, compare, manufactured_problem, shooting_solve, solve
from phibvp.oracle import CATALOG

phi = PhiModel.power_sum([2.0], [0.5])
print(f"{'profile':10s} {'bc':16s} {'|u - u_shoot|':>14s} {'|du - du_shoot|':>16s}")
for name in CATALOG:
    for kind in ("dirichlet", "sturm_liouville"):
        p, _ = manufactured_problem(phi, name, kind, 200)
        eu, edu = compare(solve(p).u, shooting_solve(p).u)
        print(f"{name:10s} {kind:16s} {eu:14.3e} {edu:16.3e}")

# %% [markdown]
# RK4 is fourth order: halving the step cuts the error by about 16.

# %%
from phibvp import Dirichlet, ProblemInstance, RhsFunction

prev = None
for n in (16, 32, 64):
    p = ProblemInstance(phi, Dirichlet(0.0, 1.0), RhsFunction("x", 1.0, 0.0, 2.0), n)
    shot = shooting_solve(p)
    err = max(abs(u - math.sinh(t) / math.sinh(1.0)) for t, u in zip(shot.u.t, shot.u.u.values))
    print(f"n={n:3d}  w(0)={shot.free_param:.12f}  err={err:.2e}" + (f"  ratio={prev / err:.1f}" if prev else ""))
    prev = err
