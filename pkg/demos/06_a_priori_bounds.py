# %% [markdown]
# # A priori bounds
#
# Under the sign condition (radius R) and the growth condition
# |f| <= S0 (phi(v) v - Phi(v)) + T0, every solution obeys |u| <= r0 and
# |u'| <= r1 for all lam in (0, 1].  The chain of constants is printed below.

# %%
import mpmath

from phibvp import PhiModel, r1_bound

lap = PhiModel.power_sum([2.0], [0.5])
cert = r1_bound(lap, r0=1.0, S0=1.0, T0=1.0)
print(cert)

mpmath.mp.dps = 30
print("sqrt(2 (4 e^2 - 1)) =", mpmath.sqrt(2 * (4 * mpmath.e**2 - 1)))

# %% [markdown]
# With S0 = 0 the exponential step is skipped and r1 = psi(phi(2 r0) + T0).

# %%
print(r1_bound(lap, 1.0, 0.0, 1.0))

# %% [markdown]
# r1 grows with r0 and T0, but not with S0 when T0 > 0: the bound carries
# a T0/S0 term, so it blows up as S0 -> 0 before the exponential takes over.

# %%
for s0 in (1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0):
    print(f"S0={s0:<6g} r1={r1_bound(lap, 1.0, s0, 1.0).r1:10.4f}   (T0=0: {r1_bound(lap, 1.0, s0, 0.0).r1:8.4f})")
