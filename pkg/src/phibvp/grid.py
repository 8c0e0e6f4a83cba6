"""Functions sampled on the uniform grid t_i = i/n of [0, 1]."""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch


def nodes(n: int) -> np.ndarray:
    return np.arange(n + 1) / n


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at the n+1 nodes of a uniform grid on [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("a grid function needs at least two nodal values")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, fun, n: int):
        return cls(np.broadcast_to(fun(nodes(n)), (n + 1,)))

    @classmethod
    def zeros(cls, n: int):
        return cls(np.zeros(n + 1))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def t(self) -> np.ndarray:
        return nodes(self.n)

    def __len__(self):
        return self.values.size

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.n != self.n:
                raise GridMismatch(f"grid sizes differ: {self.n} vs {other.n}")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.values - self._other(other))

    def __mul__(self, scalar):
        return GridFunction(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(-self.values)


@dataclass(frozen=True, eq=False)
class C1GridFunction:
    """A pair (u, du) on a common grid; du is the derivative of u."""

    u: GridFunction
    du: GridFunction

    def __post_init__(self):
        if self.u.n != self.du.n:
            raise GridMismatch(f"u has n={self.u.n} but du has n={self.du.n}")

    @classmethod
    def from_arrays(cls, u, du):
        return cls(GridFunction(u), GridFunction(du))

    @classmethod
    def sample(cls, u, du, n: int):
        return cls(GridFunction.sample(u, n), GridFunction.sample(du, n))

    @property
    def n(self) -> int:
        return self.u.n

    @property
    def t(self) -> np.ndarray:
        return self.u.t

    def blend(self, other: "C1GridFunction", theta: float) -> "C1GridFunction":
        """``(1 - theta) * self + theta * other`` on both components."""
        return C1GridFunction(
            GridFunction((1.0 - theta) * self.u.values + theta * self.u._other(other.u)),
            GridFunction((1.0 - theta) * self.du.values + theta * self.du._other(other.du)),
        )

    def __sub__(self, other):
        return C1GridFunction(self.u - other.u, self.du - other.du)


def cumtrapz(v: GridFunction) -> GridFunction:
    """Running composite-trapezoid integral, starting from 0 at t = 0."""
    vals = v.values
    h = 1.0 / v.n
    out = np.empty_like(vals)
    out[0] = 0.0
    np.cumsum(0.5 * h * (vals[1:] + vals[:-1]), out=out[1:])
    return GridFunction(out)


def trapz(vals: np.ndarray) -> float:
    """Composite trapezoid over all of [0, 1] for raw nodal values."""
    h = 1.0 / (vals.size - 1)
    return float(h * (np.sum(vals) - 0.5 * (vals[0] + vals[-1])))


def sup_norm(g: GridFunction) -> float:
    """Max |value| over nodes (no inter-node maximization)."""
    return float(np.max(np.abs(g.values)))


def c1_norm(g: C1GridFunction) -> float:
    return max(sup_norm(g.u), sup_norm(g.du))


def lerp(g: GridFunction, t):
    """Piecewise-linear interpolation; exact at nodes."""
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)):
        raise ValueError("t must lie in [0, 1]")
    out = np.interp(t_arr, g.t, g.values)
    return float(out) if t_arr.ndim == 0 else out


def to_csv(g: C1GridFunction) -> str:
    """Render ``t,u,du`` rows with 17 significant digits and LF endings."""
    buf = io.StringIO()
    buf.write("t,u,du\n")
    for t, u, du in zip(g.t, g.u.values, g.du.values):
        buf.write(f"{t:.17g},{u:.17g},{du:.17g}\n")
    return buf.getvalue()


def from_csv(text: str) -> C1GridFunction:
    lines = text.strip("\n").split("\n")
    if lines[0].strip() != "t,u,du":
        raise ValueError(f"expected header 't,u,du', got {lines[0]!r}")
    rows = np.array([[float(c) for c in line.split(",")] for line in lines[1:]])
    n = rows.shape[0] - 1
    if not np.allclose(rows[:, 0], nodes(n), rtol=0, atol=1e-15):
        raise ValueError("t column is not a uniform grid on [0, 1]")
    return C1GridFunction.from_arrays(rows[:, 1], rows[:, 2])


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(g: C1GridFunction, path) -> None:
    write_atomic(path, to_csv(g))


def read_csv(path) -> C1GridFunction:
    with open(path, newline="") as fh:
        return from_csv(fh.read())
