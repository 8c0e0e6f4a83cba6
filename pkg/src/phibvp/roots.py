"""Bracketed root finding for monotone increasing scalar maps."""

from __future__ import annotations

import math

from .errors import IterationCap


def expand_bracket(fun, target, lo=-1.0, hi=1.0, max_doublings=200):
    """Widen ``[lo, hi]`` geometrically until ``fun(lo) <= target <= fun(hi)``.

    Returns ``(lo, hi, f_lo, f_hi)``.  Each step moves the offending end out
    by the current width and pulls the other end in to the old position, so
    the bracket doubles while staying valid on the side already found.
    """
    f_lo, f_hi = fun(lo), fun(hi)
    for _ in range(max_doublings):
        if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
            raise IterationCap(f"non-finite map value while bracketing [{lo}, {hi}]")
        if f_lo > target:
            width = hi - lo
            hi, f_hi = lo, f_lo
            lo = lo - 2.0 * width
            f_lo = fun(lo)
        elif f_hi < target:
            width = hi - lo
            lo, f_lo = hi, f_hi
            hi = hi + 2.0 * width
            f_hi = fun(hi)
        else:
            return lo, hi, f_lo, f_hi
    raise IterationCap(f"bracket expansion exceeded {max_doublings} doublings")


def solve_increasing(fun, target, lo=-1.0, hi=1.0, ftol=1e-12, max_doublings=200, max_iter=400):
    """Solve ``fun(x) = target`` for an increasing ``fun``.

    Illinois-style false position inside an expanding bracket.  A bisection
    step is forced whenever two consecutive steps fail to halve the bracket,
    so the worst case is bisection.  Stops once ``|fun(x) - target| <= ftol``
    or the bracket can no longer be split in floating point.  Returns
    ``(x, residual, iterations)`` for the best point seen.
    """
    lo, hi, f_lo, f_hi = expand_bracket(fun, target, lo, hi, max_doublings)
    g_lo, g_hi = f_lo - target, f_hi - target
    best = (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)
    it = 0
    if abs(best[1]) <= ftol:
        return best[0], abs(best[1]), it
    side = 0
    width_ref = hi - lo
    slow = 0
    while it < max_iter:
        it += 1
        if slow >= 2 or g_hi == g_lo:
            x = 0.5 * (lo + hi)
            slow = 0
            width_ref = hi - lo
        else:
            x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
            if not lo < x < hi:
                x = 0.5 * (lo + hi)
        if x <= lo or x >= hi:
            break
        g = fun(x) - target
        if not math.isfinite(g):
            raise FloatingPointError(f"non-finite value at x={x}")
        if abs(g) < abs(best[1]):
            best = (x, g)
        if abs(g) <= ftol:
            break
        if g < 0:
            lo, g_lo = x, g
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi = x, g
            if side == 1:
                g_lo *= 0.5
            side = 1
        if hi - lo > 0.5 * width_ref:
            slow += 1
        else:
            slow = 0
            width_ref = hi - lo
    return best[0], abs(best[1]), it
