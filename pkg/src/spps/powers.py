"""Formal-power tables for both series families.

Entries are stored *rescaled*: each power is divided by the factorial of
its true degree, so series assembly is a plain weighted sum and the table
never sees factorial growth.  Recursion for a rescaled entry ``T[j]``::

    |j| odd:   T[j] = int( w_i * T[j - e_i] )                 i = odd axis
    |j| even:  T[j] = int( 1/(p u0^2) * sum_i T[j - e_i] )

with ``w_i = r_i u0^2``.  In generalized mode ``w_i = u0 R_i[u0]`` and the
odd step gains ``(s_i/p) * sum_k T[j - e_i - e_k]``; the degree factor that
appears in the unrescaled recursion cancels exactly against the factorials.

The two families run through the same builder and differ only in the entry
at the origin (``1`` versus ``int 1/(p u0^2)``) and in the value assigned to
the degree-zero pseudo entries just below the origin (``0`` versus ``1/d``),
which only the generalized odd step ever reads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from .errors import DivisionBlowup, GridMismatch
from .grid import Grid, SampledFunction, cumulative_array
from .indices import MultiIndex, admissible_of_degree, degree, odd_axis, step

XTILDE = "XTILDE"
X = "X"
FULL = "full"
ENDPOINT = "endpoint"

OVERFLOW_GUARD = 1e250


@dataclass
class PowerTable:
    """Rescaled formal powers of one family up to (shifted) degree ``2N``.

    In ``full`` mode ``entries[j]`` is the array of mesh values; in
    ``endpoint`` mode it is the pair ``[value at x0, value at x2]``.
    """

    family: str
    d: int
    N: int
    mode: str
    grid: Grid
    generalized: bool
    entries: Dict[MultiIndex, np.ndarray] = field(repr=False)
    rescaled: bool = True

    @property
    def max_degree(self) -> int:
        return 2 * self.N

    def true_degree(self, j: MultiIndex) -> int:
        return degree(j) + (1 if self.family == X else 0)

    def __contains__(self, j) -> bool:
        return tuple(j) in self.entries

    def __getitem__(self, j) -> np.ndarray:
        """Entry at ``j``; zero for indices with a negative component."""
        j = tuple(j)
        if j in self.entries:
            return self.entries[j]
        if any(v < 0 for v in j):
            return np.zeros(self._width, dtype=complex)
        raise KeyError(j)

    @property
    def _width(self) -> int:
        return self.grid.M + 1 if self.mode == FULL else 2

    def unrescaled(self, j) -> np.ndarray:
        return self[j] * float(factorial(self.true_degree(tuple(j))))

    def at_x2(self, j) -> complex:
        return complex(self[j][-1])

    def at_x0(self, j) -> complex:
        v = self[j]
        return complex(v[self.grid.i0] if self.mode == FULL else v[0])

    def dump_csv(self, path: Union[str, Path]) -> None:
        """Debug dump with columns ``family,j1..jd,x,re,im``."""
        if self.mode == FULL:
            xs = self.grid.x
        else:
            xs = np.array([self.grid.x0, self.grid.x2])
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["family"] + [f"j{i + 1}" for i in range(self.d)] + ["x", "re", "im"])
            for j, vals in self.entries.items():
                for x, v in zip(xs, vals):
                    w.writerow([self.family, *j, f"{x:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def _as_array(f, grid: Grid) -> np.ndarray:
    if isinstance(f, SampledFunction):
        if f.grid != grid:
            raise GridMismatch("coefficient sampled on a different grid")
        return f.values
    return np.broadcast_to(np.asarray(f, dtype=complex), (grid.M + 1,))


def _guard(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)) or np.max(np.abs(arr), initial=0.0) > OVERFLOW_GUARD:
        raise DivisionBlowup(f"{what} exceeds the overflow guard")


def _build(
    family: str,
    seed,
    p: SampledFunction,
    r: Sequence[SampledFunction],
    s: Optional[Sequence[SampledFunction]],
    N: int,
    mode: str,
) -> PowerTable:
    grid = seed.u0.grid
    d = len(r)
    if d < 1:
        raise ValueError("need at least one spectral parameter")
    if N < 0:
        raise ValueError("N must be nonnegative")
    if mode not in (FULL, ENDPOINT):
        raise ValueError(f"unknown mode {mode!r}")

    u0 = seed.u0.values
    u0sq = u0 * u0
    pv = _as_array(p, grid)
    inv_pu0sq = 1.0 / (pv * u0sq)
    _guard(inv_pu0sq, "1/(p u0^2)")
    weights = [_as_array(ri, grid) * u0sq for ri in r]
    s_over_p = None
    if s is not None:
        if len(s) != d:
            raise ValueError("s must have the same length as r")
        u0u0p = u0 * seed.u0_prime.values
        weights = [w + _as_array(si, grid) * u0u0p for w, si in zip(weights, s)]
        s_over_p = [_as_array(si, grid) / pv for si in s]

    origin = (0,) * d
    if family == XTILDE:
        seed_entry = np.ones(grid.M + 1, dtype=complex)
        below_origin = 0.0
    else:
        seed_entry = cumulative_array(inv_pu0sq, grid)
        below_origin = 1.0 / d

    i0 = grid.i0
    keep_full = mode == FULL
    entries: Dict[MultiIndex, np.ndarray] = {}
    rows: Dict[MultiIndex, np.ndarray] = {origin: seed_entry}
    prev: Dict[MultiIndex, np.ndarray] = {}
    zero = np.zeros(grid.M + 1, dtype=complex)

    def lookup(j: MultiIndex) -> np.ndarray:
        return rows.get(j, prev.get(j, zero))

    def store(layer: Dict[MultiIndex, np.ndarray]) -> None:
        for j, v in layer.items():
            entries[j] = v if keep_full else np.array([v[i0], v[-1]])

    store(rows)
    for m in range(1, 2 * N + 1):
        layer = admissible_of_degree(d, m)
        integrands = np.empty((len(layer), grid.M + 1), dtype=complex)
        for row, j in enumerate(layer):
            if m % 2:
                i = odd_axis(j)
                pred = step(j, i)
                f = weights[i] * lookup(pred)
                if s_over_p is not None:
                    if degree(pred) == 0:
                        grand = d * below_origin
                    else:
                        grand = sum(lookup(step(pred, k)) for k in range(d) if pred[k] > 0)
                    f = f + s_over_p[i] * grand
            else:
                f = inv_pu0sq * sum(lookup(step(j, i)) for i in range(d) if j[i] > 0)
            integrands[row] = f
        block = cumulative_array(integrands, grid)
        _guard(block, f"formal powers of degree {m}")
        # only the two newest degrees are ever read by the recursion
        prev, rows = rows, {j: block[row] for row, j in enumerate(layer)}
        store(rows)

    return PowerTable(family, d, N, mode, grid, s is not None, entries)


def build_xtilde(seed, p, r, N: int, mode: str = FULL) -> PowerTable:
    """First family (series for ``u1``), built from the constant 1."""
    return _build(XTILDE, seed, p, list(r), None, N, mode)


def build_x(seed, p, r, N: int, mode: str = FULL) -> PowerTable:
    """Second family (series for ``u2``) at shifted indices ``k``.

    The entry at ``k`` is the rescaled power of true degree ``|k| + 1``.
    """
    return _build(X, seed, p, list(r), None, N, mode)


def build_generalized(seed, p, r, s, N: int, mode: str = FULL, family: str = XTILDE) -> PowerTable:
    """Either family for ``L y = sum_i lambda_i (r_i y + s_i y')``.

    Derivatives of the previous powers never get differenced numerically:
    they are rebuilt from the grand-predecessors, so only ``u0'`` (from the
    seed) is needed.
    """
    if family not in (XTILDE, X):
        raise ValueError(f"unknown family {family!r}")
    return _build(family, seed, p, list(r), list(s), N, mode)
