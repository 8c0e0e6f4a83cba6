"""Convex power-sum functions Phi and the derived maps phi = Phi', psi = phi^-1.

The built-in family is ``Phi(x) = sum_i w_i |x|**p_i`` with ``1 < p_i <= 2``
and ``w_i > 0``.  With a single exponent ``p`` and weight ``1/p`` the operator
``d/dt phi(u')`` is the p-Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IterationCap, ValidationError

DEFAULT_PSI_TOLERANCE = 1e-12
_MAX_DOUBLINGS = 200
_MAX_BISECTIONS = 400


@dataclass(frozen=True)
class PowerSum:
    """Exponents and weights of ``Phi(x) = sum_i w_i |x|**p_i``."""

    exponents: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        exps = tuple(float(p) for p in self.exponents)
        ws = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "weights", ws)
        if not exps:
            raise ValidationError("phi.exponents", "must be a nonempty list")
        if len(ws) != len(exps):
            raise ValidationError(
                "phi.weights", f"expected {len(exps)} weights, got {len(ws)}"
            )
        for i, p in enumerate(exps):
            if not (1.0 < p <= 2.0):
                raise ValidationError(f"phi.exponents[{i}]", f"must satisfy 1 < p <= 2, got {p}")
        for i, w in enumerate(ws):
            if not (w > 0.0 and np.isfinite(w)):
                raise ValidationError(f"phi.weights[{i}]", f"must be a positive number, got {w}")

    @classmethod
    def of(cls, exponents, weights=None):
        """Build from exponents; weights default to ``1/p_i``."""
        exponents = [float(p) for p in exponents]
        if weights is None:
            weights = [1.0 / p if p != 0 else 0.0 for p in exponents]
        return cls(tuple(exponents), tuple(weights))


PhiSpec = PowerSum


def k_phi_of(spec: PowerSum) -> float:
    """Largest k with ``k * Phi(x) <= phi(x) * x``; for power sums, ``min p_i``."""
    return min(spec.exponents)


@dataclass(frozen=True)
class PhiModel:
    """Phi together with its derivative, inverse derivative and constant k_Phi.

    ``k_phi`` defaults to :func:`k_phi_of`; it can be overridden (for instance
    to reproduce a problem file that states it), in which case
    :func:`check_assumptions` is what catches an overstated value.
    """

    spec: PowerSum
    k_phi: float = None
    psi_tolerance: float = DEFAULT_PSI_TOLERANCE
    _coef: np.ndarray = field(init=False, repr=False, compare=False)
    _pow: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k_phi is None:
            object.__setattr__(self, "k_phi", k_phi_of(self.spec))
        if not self.k_phi > 1.0:
            raise ValidationError("phi.k_phi", f"must be > 1, got {self.k_phi}")
        if not self.psi_tolerance > 0.0:
            raise ValidationError("phi.psi_tolerance", "must be > 0")
        p = np.array(self.spec.exponents)
        w = np.array(self.spec.weights)
        object.__setattr__(self, "_coef", (w * p).reshape(-1, 1))
        object.__setattr__(self, "_pow", (p - 1.0).reshape(-1, 1))

    @classmethod
    def power_sum(cls, exponents, weights=None, **kwargs):
        return cls(PowerSum.of(exponents, weights), **kwargs)

    @property
    def single_term(self):
        return len(self.spec.exponents) == 1

    def Phi(self, x):
        """Phi(x); even, zero at zero."""
        ax = np.abs(np.asarray(x, dtype=float))
        out = sum(w * _abspow(ax, p) for p, w in zip(self.spec.exponents, self.spec.weights))
        return _like(x, out)

    def phi(self, x):
        """phi(x) = Phi'(x); odd and strictly increasing."""
        x = np.asarray(x, dtype=float)
        out = np.sign(x) * self._phi_pos(np.abs(x))
        return _like(x, out)

    def dphi(self, x):
        """phi'(x); infinite at 0 when some exponent is below 2."""
        ax = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(ax)
        with np.errstate(divide="ignore"):
            for p, w in zip(self.spec.exponents, self.spec.weights):
                if p == 2.0:
                    out = out + 2.0 * w
                else:
                    out = out + w * p * (p - 1.0) * np.power(ax, p - 2.0)
        return _like(x, out)

    def _phi_pos(self, ax):
        out = np.zeros_like(ax)
        for p, w in zip(self.spec.exponents, self.spec.weights):
            out = out + w * p * _abspow(ax, p - 1.0)
        return out

    def psi(self, y):
        """Inverse of phi.

        Closed form for a single exponent; for sums, bisection on
        ``phi(x) = y`` run to full double precision.

        Raises:
            IterationCap: if no bracket can be found (malformed model).
        """
        y = np.asarray(y, dtype=float)
        ay = np.abs(y)
        if self.single_term:
            (p,), (w,) = self.spec.exponents, self.spec.weights
            if p == 2.0:
                out = ay / (2.0 * w)
            else:
                out = np.power(ay / (w * p), 1.0 / (p - 1.0))
        else:
            out = self._psi_bisect(np.atleast_1d(ay)).reshape(ay.shape)
        return _like(y, np.sign(y) * out)

    def _psi_bisect(self, ay):
        out = np.zeros_like(ay)
        pos = ay > 0
        if not np.any(pos):
            return out
        y = ay[pos]
        lo, hi = self._psi_bracket(y)
        # Newton on phi(x) = y, falling back to bisection whenever a step
        # leaves the bracket; the bracket shrinks every iteration either way
        x = 0.5 * (lo + hi)
        for _ in range(_MAX_BISECTIONS):
            r = self._phi_pos(x) - y
            lo = np.where(r < 0, x, lo)
            hi = np.where(r > 0, x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                nxt = x - r / self._dphi_pos(x)
            inside = np.isfinite(nxt) & (nxt > lo) & (nxt < hi)
            nxt = np.where(inside, nxt, 0.5 * (lo + hi))
            done = (r == 0) | (np.abs(nxt - x) <= 2.0 * np.spacing(x)) | (hi - lo <= 2.0 * np.spacing(hi))
            x = np.where(done, x, nxt)
            if np.all(done):
                break
        out[pos] = x
        return out

    def _dphi_pos(self, ax):
        out = np.zeros_like(ax)
        for p, w in zip(self.spec.exponents, self.spec.weights):
            if p == 2.0:
                out = out + 2.0 * w
            else:
                out = out + w * p * (p - 1.0) * np.power(ax, p - 2.0)
        return out

    def _psi_bracket(self, y):
        # each term alone is <= phi, and the largest of k terms is >= phi/k
        e = self._pow
        c = self._coef
        k = len(self.spec.exponents)
        with np.errstate(over="ignore", divide="ignore"):
            hi = np.min(np.power(y / c, 1.0 / e), axis=0)
            lo = np.min(np.power(y / (k * c), 1.0 / e), axis=0)
        lo = np.where(np.isfinite(lo), lo, 0.0)
        hi = np.where(np.isfinite(hi) & (hi > 0), hi, 1.0)
        # fall back to geometric expansion wherever the analytic bracket
        # was lost to overflow or underflow
        for _ in range(_MAX_DOUBLINGS):
            short = self._phi_pos(hi) < y
            if not np.any(short):
                break
            lo = np.where(short, hi, lo)
            hi = np.where(short, 2.0 * hi, hi)
        else:
            raise IterationCap("psi: bracket expansion exceeded cap")
        lo = np.where(self._phi_pos(lo) > y, 0.0, lo)
        return lo, hi


def _abspow(ax, p):
    if p == 1.0:
        return ax
    if p == 2.0:
        return ax * ax
    return np.power(ax, p)


def _like(x, out):
    return float(out) if np.ndim(x) == 0 else out


def phi_value(m: PhiModel, x):
    return m.Phi(x)


def phi_prime(m: PhiModel, x):
    return m.phi(x)


def psi(m: PhiModel, w):
    return m.psi(w)


@dataclass
class Check:
    """Outcome of one sampled assumption check."""

    passed: bool
    detail: str = ""
    value: float | None = None

    def to_dict(self):
        return {"passed": bool(self.passed), "detail": self.detail, "value": self.value}


@dataclass
class AssumptionReport:
    checks: dict[str, Check]

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self):
        return {"passed": self.passed, "checks": {k: c.to_dict() for k, c in self.checks.items()}}


def check_assumptions(m: PhiModel, sample_xs) -> AssumptionReport:
    """Sample the convexity, normalization, inverse and k_Phi assumptions on Phi.

    Failures are reported, never raised.
    """
    xs = np.asarray(sample_xs, dtype=float).ravel()
    if xs.size == 0 or not np.all(np.isfinite(xs)):
        raise ValueError("sample_xs must be nonempty and finite")
    checks = {}

    # superlinear growth holds for every power sum since all p_i > 1
    checks["phi1_superlinear"] = Check(
        min(m.spec.exponents) > 1.0, "symbolic: power sum with all exponents > 1 (assumed, not sampled)"
    )

    srt = np.unique(xs)
    phis = m.phi(srt)
    gaps = np.diff(phis)
    mono = bool(np.all(gaps > 0))
    checks["phi1_monotone"] = Check(
        mono, f"phi strictly increasing on {srt.size} distinct samples",
        float(np.min(gaps)) if gaps.size else None,
    )

    z_Phi, z_phi = m.Phi(0.0), m.phi(0.0)
    checks["phi2_zero"] = Check(z_Phi == 0.0 and z_phi == 0.0, "Phi(0) = phi(0) = 0", max(abs(z_Phi), abs(z_phi)))

    rt = np.abs(m.psi(m.phi(xs)) - xs) / np.maximum(1.0, np.abs(xs))
    worst_rt = float(np.max(rt))
    checks["phi3_psi_roundtrip"] = Check(
        worst_rt <= m.psi_tolerance, f"max relative |psi(phi(x)) - x| <= {m.psi_tolerance:g}", worst_rt
    )

    lhs = m.k_phi * m.Phi(xs)
    rhs = m.phi(xs) * xs
    excess = (lhs - rhs) / np.maximum(1.0, np.abs(rhs))
    worst = float(np.max(excess))
    bad = int(np.argmax(excess))
    checks["phi4_k_inequality"] = Check(
        worst <= 1e-12,
        f"k_phi*Phi(x) <= phi(x)*x with k_phi={m.k_phi:g}"
        + ("" if worst <= 1e-12 else f"; violated at x={xs[bad]:.17g}"),
        worst,
    )
    return AssumptionReport(checks)


BUILTIN_MODELS = {
    "laplacian": PowerSum.of([2.0], [0.5]),
    "p1.5": PowerSum.of([1.5]),
    "p1.1": PowerSum.of([1.1]),
    "p1.8": PowerSum.of([1.8]),
    "mixed_2_1.5": PowerSum.of([2.0, 1.5]),
    "mixed_1.2_1.6_2": PowerSum.of([1.2, 1.6, 2.0], [1.0, 0.3, 2.0]),
}
