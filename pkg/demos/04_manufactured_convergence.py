# %% [markdown]
# # Grid convergence on manufactured solutions
#
# Pick an exact profile u*, set f = d/dt phi(u*') + (x - u*) and solve.
# The coupling term (x - u*) keeps the sign condition x f(t, x, 0) > 0 for
# large |x|.  For p = 1.5 and u* = t^2/2, phi'(u*') is singular at t = 0,
# so the instance is flagged and f(0) is extrapolated from the interior.

# %%
import numpy as np

from phibvp import PhiModel, compare, manufactured_problem, solve

cases = [
    ("sin", PhiModel.power_sum([2.0], [0.5]), "dirichlet"),
    ("sin2", PhiModel.power_sum([2.0], [0.5]), "sturm_liouville"),
    ("cubic", PhiModel.power_sum([1.8]), "dirichlet"),
    ("quadratic", PhiModel.power_sum([1.5]), "dirichlet"),
]

for name, phi, bc_kind in cases:
    print(f"\n{name}, p={phi.spec.exponents}, {bc_kind}")
    prev = None
    for n in (50, 100, 200, 400):
        p, exact = manufactured_problem(phi, name, bc_kind, n)
        err = compare(solve(p).u, exact)[0]
        order = f"{np.log2(prev / err):5.2f}" if prev else "     "
        print(f"  n={n:4d}  sup err {err:.3e}  order {order}  singular={p.left_endpoint_singular}")
        prev = err
