"""Uniform meshes, sampled complex functions and cumulative integration.

Every coefficient, the seed solution and every formal power lives on the
same :class:`Grid`.  Integrals are always taken from the basepoint ``x0``,
which must be a mesh node.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import GridMismatch, InputError

# quadrature rule -> number of interpolation nodes per cell
RULES = {"trapezoid": 2, "cubic": 4, "quintic": 6, "septic": 8, "nonic": 10}


@dataclass(frozen=True)
class Grid:
    """Uniform mesh ``x1 + m (x2 - x1) / M`` for ``m = 0..M``.

    Attributes:
        x1, x2: interval endpoints, ``x2 > x1``.
        M: number of subintervals.
        i0: mesh index of the basepoint ``x0``.
        rule: cumulative quadrature rule, named after the degree of the
            local interpolant: ``"trapezoid"`` (order 2), ``"cubic"`` (4),
            ``"quintic"`` (6, default), ``"septic"`` (8), ``"nonic"`` (10).
    """

    x1: float
    x2: float
    M: int
    i0: int = 0
    rule: str = "quintic"

    def __post_init__(self):
        if not self.x2 > self.x1:
            raise InputError(f"need x2 > x1, got [{self.x1}, {self.x2}]")
        if int(self.M) != self.M or self.M < 1:
            raise InputError(f"M must be a positive integer, got {self.M}")
        if not 0 <= self.i0 <= self.M:
            raise InputError(f"basepoint index {self.i0} outside 0..{self.M}")
        if self.rule not in RULES:
            raise InputError(f"unknown quadrature rule {self.rule!r}")

    @property
    def h(self) -> float:
        return (self.x2 - self.x1) / self.M

    @property
    def x(self) -> np.ndarray:
        return self.x1 + np.arange(self.M + 1) * self.h

    @property
    def x0(self) -> float:
        return float(self.x[self.i0])

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SampledFunction":
        """Sample a vectorised callable at the mesh nodes."""
        vals = np.broadcast_to(np.asarray(fn(self.x), dtype=complex), (self.M + 1,))
        return SampledFunction(self, vals)

    def constant(self, c: complex) -> "SampledFunction":
        return SampledFunction(self, np.full(self.M + 1, c, dtype=complex))

    def with_basepoint(self, i0: int) -> "Grid":
        return Grid(self.x1, self.x2, self.M, i0, self.rule)

    def with_rule(self, rule: str) -> "Grid":
        return Grid(self.x1, self.x2, self.M, self.i0, rule)


Operand = Union["SampledFunction", complex, float, int]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex values of a function at the ``M + 1`` nodes of a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.M + 1,):
            raise GridMismatch(
                f"expected {self.grid.M + 1} samples, got shape {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def _other(self, other: Operand):
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise GridMismatch("sampled functions live on different grids")
            return other.values
        return other

    def __add__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self.values / self._other(other))

    def __rtruediv__(self, other: Operand) -> "SampledFunction":
        return SampledFunction(self.grid, self._other(other) / self.values)

    def __neg__(self) -> "SampledFunction":
        return SampledFunction(self.grid, -self.values)

    def __pow__(self, k) -> "SampledFunction":
        return SampledFunction(self.grid, self.values**k)

    def conj(self) -> "SampledFunction":
        return SampledFunction(self.grid, np.conj(self.values))

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def at(self, index: int) -> complex:
        return complex(self.values[index])

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag


@lru_cache(maxsize=None)
def _cell_weights(npts: int) -> np.ndarray:
    """``W[o, k]``: weight of stencil node ``k`` when integrating over the
    cell ``[t_o, t_o + 1]`` the polynomial through nodes ``t = 0..npts-1``."""
    t = np.arange(npts, dtype=float)
    V = t[None, :] ** np.arange(npts)[:, None]
    W = np.empty((npts - 1, npts))
    for o in range(npts - 1):
        mom = ((o + 1.0) ** np.arange(1, npts + 1) - o ** np.arange(1, npts + 1)) / np.arange(1, npts + 1)
        W[o] = np.linalg.solve(V, mom)
    return W


def interval_integrals(values: np.ndarray, h: float, rule: str) -> np.ndarray:
    """Integrals of the sampled function over each of the ``M`` cells.

    Higher-order rules integrate the interpolating polynomial through the
    rule's nodes centred on each cell (shifted inwards near the ends).
    """
    f = np.asarray(values)
    M = f.shape[-1] - 1
    npts = RULES[rule]
    if npts == 2 or M < npts - 1:
        return 0.5 * h * (f[..., :-1] + f[..., 1:])
    W = _cell_weights(npts)
    half = npts // 2 - 1
    out = np.empty(f.shape[:-1] + (M,), dtype=np.result_type(f, float))
    n_int = M - 2 * half
    acc = 0.0
    for k in range(npts):
        acc = acc + W[half, k] * f[..., k : k + n_int]
    out[..., half : half + n_int] = acc
    for m in range(half):
        out[..., m] = f[..., :npts] @ W[m]
        out[..., M - 1 - m] = f[..., M + 1 - npts :] @ W[npts - 2 - m]
    return h * out


def cumulative_array(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Array form of :func:`cumulative_integral`; works along the last axis."""
    cells = interval_integrals(values, grid.h, grid.rule)
    g = np.zeros(cells.shape[:-1] + (grid.M + 1,), dtype=cells.dtype)
    np.cumsum(cells, axis=-1, out=g[..., 1:])
    if grid.i0:
        g = g - g[..., grid.i0 : grid.i0 + 1]
    return g


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Signed integral of ``f`` from the basepoint to every mesh node."""
    return SampledFunction(f.grid, cumulative_array(f.values, f.grid))


def sup_abs(f: SampledFunction) -> float:
    """Maximum of ``|f|`` over the mesh."""
    return float(np.max(np.abs(f.values)))


def load_tabulated(path: Union[str, Path], grid: Grid) -> SampledFunction:
    """Read a ``x,re[,im]`` CSV table whose rows coincide with the mesh nodes."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty table")
    header, body = rows[0], [r for r in rows[1:] if r]
    if len(header) not in (2, 3):
        raise InputError(f"{path}: expected columns x,re[,im], got {header}")
    try:
        data = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise InputError(f"{path}: ragged rows")
    if data.shape[0] != grid.M + 1:
        raise InputError(f"{path}: {data.shape[0]} rows, mesh has {grid.M + 1} nodes")
    scale = max(abs(grid.x1), abs(grid.x2), 1.0)
    if np.max(np.abs(data[:, 0] - grid.x)) > 1e-12 * scale:
        raise InputError(f"{path}: x column does not match the mesh")
    vals = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return SampledFunction(grid, vals)


def write_tabulated(path: Union[str, Path], f: SampledFunction) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "re", "im"])
        for x, v in zip(f.grid.x, f.values):
            w.writerow([f"{x:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
