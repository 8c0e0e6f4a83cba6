"""A priori radii for solutions of the lambda-family of problems.

``r0`` bounds ``|u|`` and ``r1`` bounds ``|u'|`` for every solution of
``d/dt phi(u') = lam f(t, u, u')`` with ``0 < lam <= 1``.  The derivative
bound goes through three constants:

* ``C = 2 r0`` bounds ``|u'(t0)|`` at some point (mean value theorem, since
  ``|u(1) - u(0)| <= 2 r0``);
* ``C0 = S0 (phi(C) C - Phi(C)) + T0``;
* ``E = ((T0 + C0) exp(2 S0 r0) - T0) / S0`` bounds ``(k_Phi - 1) Phi(u')``.

With ``S0 = 0`` the exponential step degenerates to 0/0; integrating
``|d/dt phi(u')| <= T0`` directly gives ``r1 = psi(phi(C) + T0)`` instead.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import C1GridFunction
from .phi import PhiModel
from .problem import Dirichlet, ProblemInstance
from .roots import solve_increasing

CERTIFY_SLACK = 1e-9


@dataclass(frozen=True)
class BoundCertificate:
    r0: float
    r1: float
    C: float
    C0: float
    E: float
    s0_used: float
    t0_used: float
    k_phi: float
    branch: str  # "gronwall" or "direct"
    degenerate: bool = False

    def to_dict(self):
        return asdict(self)


def r0_bound(p: ProblemInstance) -> float:
    bc = p.bc
    if isinstance(bc, Dirichlet):
        return max(p.f.R, abs(bc.A), abs(bc.B))
    return max(p.f.R, abs(bc.A / bc.alpha), abs(bc.B / bc.a))


def r1_bound(phi: PhiModel, r0: float, S0: float, T0: float, rtol: float = 1e-12) -> BoundCertificate:
    if not phi.k_phi > 1.0:
        raise ValueError(f"k_phi must exceed 1, got {phi.k_phi}")
    if r0 < 0 or S0 < 0 or T0 < 0:
        raise ValueError("r0, S0 and T0 must be non-negative")
    C = 2.0 * r0
    C0 = S0 * (phi.phi(C) * C - phi.Phi(C)) + T0
    if S0 > 0:
        E = ((T0 + C0) * math.exp(2.0 * S0 * r0) - T0) / S0
        if E == 0.0:
            return BoundCertificate(r0, C, C, C0, 0.0, S0, T0, phi.k_phi, "gronwall", degenerate=True)
        k1 = phi.k_phi - 1.0
        r1, _, _ = solve_increasing(
            lambda x: k1 * phi.Phi(x), E, lo=0.0, hi=1.0, ftol=rtol * E, max_iter=2000
        )
        return BoundCertificate(r0, r1, C, C0, E, S0, T0, phi.k_phi, "gronwall")
    # Gronwall step skipped: |phi(u')| <= phi(C) + T0 directly
    E = phi.phi(C) + T0
    r1 = phi.psi(E)
    return BoundCertificate(r0, r1, C, C0, E, S0, T0, phi.k_phi, "direct", degenerate=(r1 == 0.0))


def bound_certificate(p: ProblemInstance) -> BoundCertificate:
    return r1_bound(p.phi, r0_bound(p), p.f.S0, p.f.T0)


@dataclass
class CertReport:
    passed: bool
    u_sup: float
    du_sup: float
    r0: float
    r1: float
    u_ok: bool
    du_ok: bool
    u_witness_t: float | None = None
    du_witness_t: float | None = None

    def to_dict(self):
        return asdict(self)


def certify(u: C1GridFunction, cert: BoundCertificate, slack: float = CERTIFY_SLACK) -> CertReport:
    """Compare nodal sup norms of u and u' against the certified radii."""
    au = np.abs(u.u.values)
    adu = np.abs(u.du.values)
    iu, idu = int(np.argmax(au)), int(np.argmax(adu))
    u_ok = bool(au[iu] <= cert.r0 + slack)
    du_ok = bool(adu[idu] <= cert.r1 + slack)
    t = u.t
    return CertReport(
        u_ok and du_ok,
        float(au[iu]),
        float(adu[idu]),
        cert.r0,
        cert.r1,
        u_ok,
        du_ok,
        None if u_ok else float(t[iu]),
        None if du_ok else float(t[idu]),
    )
