# %% [markdown]
# # Solving by damped fixed-point iteration and continuation
#
# The fixed points of u -> K(lam N(u)), with N(u) = f(t, u, u'), solve
# d/dt phi(u') = lam f.  The solver starts at lam = 0, where the answer is
# the affine function meeting the boundary conditions, and marches lam to 1.
# The test problem u'' = u, u(0) = 0, u(1) = 1 has the solution
# sinh(t)/sinh(1).

# %%
import math

import numpy as np

from phibvp import Dirichlet, PhiModel, ProblemInstance, RhsFunction, certify, solve

p = ProblemInstance(
    PhiModel.power_sum([2.0], [0.5]),
    Dirichlet(0.0, 1.0),
    RhsFunction("x", R=1.0, S0=0.0, T0=2.0),
    grid_n=200,
)
sol = solve(p)
print("stages (lambda, Picard iterations):", sol.stages)
print("fixed-point residual:", sol.fixpoint_residual)
print("strong residual     :", sol.strong_residual)

# %%
exact = np.sinh(sol.u.t) / math.sinh(1.0)
print("sup error vs sinh(t)/sinh(1):", np.max(np.abs(sol.u.u.values - exact)))

# %% [markdown]
# Every solution should sit inside the a priori box |u| <= r0, |u'| <= r1.
# Here |u| reaches r0 = 1 exactly, at t = 1.

# %%
print(sol.certificate)
print(certify(sol.u, sol.certificate))
