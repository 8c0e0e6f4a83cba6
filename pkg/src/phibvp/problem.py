"""Boundary conditions, right-hand sides and problem instances.

A problem is ``d/dt phi(u') = f(t, u, u')`` on [0, 1] with either Dirichlet
or Sturm-Liouville conditions.  The right-hand side carries the constants the
existence theory needs: ``R`` from the sign condition ``x f(t, x, 0) > 0`` for
``|x| > R``, and scalar bounds ``S0``, ``T0`` with
``|f(t, x, v)| <= S0 (phi(v) v - Phi(v)) + T0`` on the certified box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import ValidationError
from .expr import Expression
from .phi import PhiModel

SAMPLING_SEED = 20160901


@dataclass(frozen=True)
class Dirichlet:
    """u(0) = A, u(1) = B."""

    A: float
    B: float

    kind = "dirichlet"

    def residuals(self, u0, du0, u1, du1):
        return (abs(u0 - self.A), abs(u1 - self.B))


@dataclass(frozen=True)
class SturmLiouville:
    """-alpha u(0) + beta u'(0) = A and a u(1) + b u'(1) = B, all coefficients > 0."""

    alpha: float
    beta: float
    A: float
    a: float
    b: float
    B: float

    kind = "sturm_liouville"

    def __post_init__(self):
        for name in ("alpha", "beta", "a", "b"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValidationError(f"bc.{name}", f"must be > 0, got {val}")

    def residuals(self, u0, du0, u1, du1):
        return (
            abs(-self.alpha * u0 + self.beta * du0 - self.A),
            abs(self.a * u1 + self.b * du1 - self.B),
        )


BoundaryConditions = Dirichlet | SturmLiouville


@dataclass(frozen=True)
class RhsFunction:
    """f(t, x, v) as an expression plus its growth metadata."""

    expr: Expression
    R: float
    S0: float = 0.0
    T0: float = 0.0
    v_box: float | None = None

    def __post_init__(self):
        if isinstance(self.expr, str):
            object.__setattr__(self, "expr", Expression(self.expr))
        if not (np.isfinite(self.R) and self.R > 0):
            raise ValidationError("f.R", f"must be > 0, got {self.R}")
        if not (np.isfinite(self.S0) and self.S0 >= 0):
            raise ValidationError("f.S0", f"must be >= 0, got {self.S0}")
        if not (np.isfinite(self.T0) and self.T0 >= 0):
            raise ValidationError("f.T0", f"must be >= 0, got {self.T0}")
        if self.v_box is not None and not (np.isfinite(self.v_box) and self.v_box > 0):
            raise ValidationError("f.v_box", f"must be > 0, got {self.v_box}")


@dataclass(frozen=True)
class ProblemInstance:
    """Phi, boundary conditions, right-hand side and grid size.

    ``left_endpoint_singular`` marks right-hand sides that are undefined at
    t = 0 but integrable there (manufactured profiles with u'(0) = 0 under a
    p < 2 model).  Nodal values at t = 0 are then replaced by the linear
    extrapolation ``2 f(h) - f(2h)`` and sampling checks start at t = h.
    """

    phi: PhiModel
    bc: BoundaryConditions
    f: RhsFunction
    grid_n: int = 200
    left_endpoint_singular: bool = False

    def __post_init__(self):
        if int(self.grid_n) != self.grid_n or self.grid_n < 16 or self.grid_n % 2:
            raise ValidationError("grid_n", f"must be an even integer >= 16, got {self.grid_n}")

    def with_grid(self, n: int) -> "ProblemInstance":
        return ProblemInstance(self.phi, self.bc, self.f, n, self.left_endpoint_singular)

    @property
    def t_floor(self) -> float:
        """Smallest t used by sampling checks."""
        return 1.0 / self.grid_n if self.left_endpoint_singular else 0.0

    def rhs(self, t, x, v):
        """Vectorized f with the singular-endpoint substitution applied."""
        if not self.left_endpoint_singular:
            return self.f.expr(t, x, v)
        t, x, v = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, x, v)))
        at0 = t == 0.0
        if not np.any(at0):
            return self.f.expr(t, x, v)
        h = 1.0 / self.grid_n
        near = self.f.expr(np.where(at0, h, t), x, v)
        far = self.f.expr(np.where(at0, 2.0 * h, t), x, v)
        out = np.where(at0, 2.0 * near - far, near)
        return float(out) if out.ndim == 0 else out


def eval_f(p: ProblemInstance, t, x, v):
    return p.rhs(t, x, v)


def check_sign_condition(p: ProblemInstance, n_t: int = 64, n_x: int = 64) -> bool:
    """Sample ``x f(t, x, 0) > 0`` on t in [0, 1] and R < |x| <= 2R.

    Only a finite window beyond R is sampled; a pass is evidence, not proof.
    """
    if n_t < 2 or n_x < 2:
        raise ValueError("n_t and n_x must be >= 2")
    R = p.f.R
    ts = np.linspace(p.t_floor, 1.0, n_t)
    mags = R + R * np.arange(1, n_x + 1) / n_x
    xs = np.concatenate([mags, -mags])
    T, X = np.meshgrid(ts, xs, indexing="ij")
    vals = X * p.rhs(T, X, 0.0)
    return bool(np.all(vals > 0))


def sign_condition_witness(p: ProblemInstance, n_t: int = 64, n_x: int = 64):
    """First sample ``(t, x)`` violating the sign condition, or None."""
    R = p.f.R
    ts = np.linspace(p.t_floor, 1.0, n_t)
    mags = R + R * np.arange(1, n_x + 1) / n_x
    xs = np.concatenate([mags, -mags])
    T, X = np.meshgrid(ts, xs, indexing="ij")
    vals = X * p.rhs(T, X, 0.0)
    bad = np.argwhere(~(vals > 0))
    if bad.size == 0:
        return None
    i, j = bad[0]
    return float(T[i, j]), float(X[i, j])


@dataclass
class GrowthReport:
    """Result of checking declared (S0, T0) against sampled |f|.

    On failure ``witness`` is the sample ``(t, x, v)`` with the largest
    excess and ``min_T0`` is the smallest T0 that would have passed with the
    declared S0.
    """

    passed: bool
    S0: float
    T0: float
    r: float
    v_box: float
    samples: int
    witness: tuple[float, float, float] | None = None
    min_T0: float | None = None
    max_excess: float = 0.0

    def to_dict(self):
        return {
            "passed": self.passed,
            "S0": self.S0,
            "T0": self.T0,
            "r": self.r,
            "v_box": self.v_box,
            "samples": self.samples,
            "witness": list(self.witness) if self.witness else None,
            "min_T0": self.min_T0,
            "max_excess": self.max_excess,
            "note": "sampled, not proven",
        }


def growth_samples(t_lo: float, r: float, v_box: float, samples: int) -> np.ndarray:
    """Deterministic points covering [t_lo, 1] x [-r, r] x [-v_box, v_box].

    Box corners and face centres come first (positive x before negative),
    followed by an unscrambled Halton sequence.
    """
    edges = []
    for x in (r, -r, 0.0):
        for t in (1.0, t_lo, 0.5 * (t_lo + 1.0)):
            for v in (v_box, -v_box, 0.0):
                edges.append((t, x, v))
    edges = np.array(edges)
    halton = qmc.Halton(d=3, scramble=False, seed=SAMPLING_SEED).random(samples)
    lo = np.array([t_lo, -r, -v_box])
    hi = np.array([1.0, r, v_box])
    return np.vstack([edges, qmc.scale(halton, lo, hi)])


def default_v_box(p: ProblemInstance, r1: float | None = None) -> float:
    if p.f.v_box is not None:
        return p.f.v_box
    if r1 is not None and np.isfinite(r1) and r1 > 0:
        return r1
    return 10.0 * (1.0 + p.f.R)


def estimate_growth_constants(
    p: ProblemInstance, r: float, samples: int = 4096, v_box: float | None = None
) -> GrowthReport:
    """Check the declared growth bound at deterministic samples of the box."""
    if not r > 0:
        raise ValueError("r must be > 0")
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    vb = default_v_box(p) if v_box is None else v_box
    pts = growth_samples(p.t_floor, r, vb, samples)
    t, x, v = pts.T
    fv = np.abs(p.rhs(t, x, v))
    young = p.phi.phi(v) * v - p.phi.Phi(v)
    bound = p.f.S0 * young + p.f.T0
    excess = fv - bound
    k = int(np.argmax(excess))
    passed = bool(excess[k] <= 0.0)
    report = GrowthReport(passed, p.f.S0, p.f.T0, float(r), float(vb), len(pts), max_excess=float(excess[k]))
    if not passed:
        report.witness = (float(t[k]), float(x[k]), float(v[k]))
        report.min_T0 = float(np.max(fv - p.f.S0 * young))
    return report
