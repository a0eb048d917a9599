"""Truncated power series in the spectral parameters.

``u1 = u0 sum_n T~[2n] lam^n`` and ``u2 = u0 sum_n T[2n] lam^n`` with rescaled
table entries, plus the matching derivative series.  The second family's
derivative carries one constant term, ``1/(p u0)``, that has no table entry
and is kept in :attr:`SeriesSolution.constant_extra`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import OrderMismatch
from .grid import Grid, SampledFunction
from .indices import MultiIndex, monomials, step
from .powers import FULL, X, XTILDE, PowerTable

KINDS = ("U1", "U2", "U1P", "U2P")
NORMALIZED = ("V1", "V2", "V1P", "V2P")


def monomial_values(indices: Sequence[MultiIndex], lam: Sequence[complex]) -> np.ndarray:
    """``lam^n`` for every exponent tuple ``n`` in ``indices``."""
    lam = np.asarray(lam, dtype=complex)
    top = max((max(n) for n in indices), default=0)
    pows = lam[:, None] ** np.arange(top + 1)[None, :]
    idx = np.asarray(indices, dtype=int).reshape(len(indices), len(lam))
    return np.prod(pows[np.arange(len(lam))[None, :], idx], axis=1)


@dataclass
class SeriesSolution:
    """One of u1, u2, u1', u2' (or their normalized versions).

    ``coeffs[t]`` is the coefficient function of ``lam^indices[t]``: mesh
    values in ``full`` mode, ``[value at x0, value at x2]`` in ``endpoint``
    mode.
    """

    kind: str
    indices: List[MultiIndex]
    coeffs: np.ndarray = field(repr=False)
    N: int
    d: int
    mode: str
    grid: Grid
    constant_extra: Optional[np.ndarray] = field(default=None, repr=False)

    def evaluate(self, lam: Sequence[complex], with_tail: bool = False):
        """Sum of the truncated series at ``lam``.

        Returns a :class:`SampledFunction` in full mode and the complex value
        at ``x2`` in endpoint mode.  With ``with_tail`` the maximum magnitude
        of the combined degree-``N`` terms is returned as well.
        """
        if len(lam) != self.d:
            raise ValueError(f"expected {self.d} spectral parameters, got {len(lam)}")
        mono = monomial_values(self.indices, lam)
        vals = mono @ self.coeffs
        if self.constant_extra is not None:
            vals = vals + self.constant_extra
        out = SampledFunction(self.grid, vals) if self.mode == FULL else complex(vals[-1])
        if not with_tail:
            return out
        top = np.array([sum(n) == self.N for n in self.indices])
        tail = float(np.max(np.abs(mono[top] @ self.coeffs[top]), initial=0.0))
        return out, tail

    def column(self, point: int) -> np.ndarray:
        """Coefficients at one stored point, with the constant extra folded in."""
        col = np.array(self.coeffs[:, point])
        if self.constant_extra is not None:
            col[0] += self.constant_extra[point]
        return col

    def endpoint_coefficients(self) -> np.ndarray:
        """Scalar coefficients of the series evaluated at ``x2``."""
        return self.column(-1)

    def combine(self, a: complex, other: Optional["SeriesSolution"], b: complex, kind: str) -> "SeriesSolution":
        """``a * self + b * other`` (``other`` may be None)."""
        coeffs = a * self.coeffs
        extra = None if self.constant_extra is None else a * self.constant_extra
        if other is not None:
            if other.indices != self.indices:
                raise ValueError("series have different index sets")
            coeffs = coeffs + b * other.coeffs
            if other.constant_extra is not None:
                extra = b * other.constant_extra if extra is None else extra + b * other.constant_extra
        return replace(self, kind=kind, coeffs=coeffs, constant_extra=extra)


@dataclass
class SeriesSet:
    """A full set of four series sharing grid, order and mode.

    ``center`` is the expansion point in parameter space; :meth:`evaluate`
    takes absolute parameter values and shifts them by the center.
    """

    series: Dict[str, SeriesSolution]
    seed: object
    p_at: np.ndarray = field(repr=False)
    center: np.ndarray = None

    def __post_init__(self):
        if self.center is None:
            self.center = np.zeros(self.d, dtype=complex)

    def __getitem__(self, kind: str) -> SeriesSolution:
        return self.series[kind]

    @property
    def normalized(self) -> bool:
        return "V1" in self.series

    @property
    def d(self) -> int:
        return next(iter(self.series.values())).d

    @property
    def N(self) -> int:
        return next(iter(self.series.values())).N

    @property
    def mode(self) -> str:
        return next(iter(self.series.values())).mode

    @property
    def grid(self) -> Grid:
        return next(iter(self.series.values())).grid

    def evaluate(self, lam: Sequence[complex]) -> Dict[str, object]:
        mu = np.asarray(lam, dtype=complex) - self.center
        return {k: s.evaluate(mu) for k, s in self.series.items()}

    def dump_csv(self, path: Union[str, Path], lam: Sequence[complex]) -> None:
        """Write ``x,re(v1),im(v1),...,re(v2p),im(v2p)`` for one parameter point."""
        vals = self.evaluate(lam)
        kinds = NORMALIZED if self.normalized else KINDS
        cols = [np.atleast_1d(vals[k].values if self.mode == FULL else vals[k]) for k in kinds]
        xs = self.grid.x if self.mode == FULL else np.array([self.grid.x2])
        names = ["v1", "v2", "v1p", "v2p"] if self.normalized else ["u1", "u2", "u1p", "u2p"]
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x"] + [f"{part}({n})" for n in names for part in ("re", "im")])
            for m, x in enumerate(xs):
                row = [f"{x:.17g}"]
                for c in cols:
                    row += [f"{c[m].real:.17g}", f"{c[m].imag:.17g}"]
                w.writerow(row)


def _points(arr: np.ndarray, mode: str, grid: Grid) -> np.ndarray:
    return arr if mode == FULL else np.array([arr[grid.i0], arr[-1]])


def assemble(xt: PowerTable, xs: PowerTable, seed, p: SampledFunction, N: int) -> SeriesSet:
    """Build U1, U2, U1P, U2P to total order ``N`` from the two tables."""
    if xt.family != XTILDE or xs.family != X:
        raise ValueError("need one table of each family, first family first")
    if xt.max_degree < 2 * N or xs.max_degree < 2 * N:
        raise OrderMismatch(f"tables hold degrees <= {min(xt.max_degree, xs.max_degree)}, need {2 * N}")
    if xt.mode != xs.mode or xt.d != xs.d:
        raise ValueError("tables differ in mode or dimension")
    mode, d, grid = xt.mode, xt.d, xt.grid

    u0 = _points(seed.u0.values, mode, grid)
    u0p = _points(seed.u0_prime.values, mode, grid)
    pv = _points(p.values, mode, grid)
    inv_pu0 = 1.0 / (pv * u0)

    indices = monomials(d, N)
    n_terms, width = len(indices), len(u0)
    out = {k: np.empty((n_terms, width), dtype=complex) for k in KINDS}
    for t, n in enumerate(indices):
        j = tuple(2 * v for v in n)
        a, b = xt[j], xs[j]
        da = sum((xt[step(j, i)] for i in range(d) if j[i] > 0), np.zeros(width, dtype=complex))
        db = sum((xs[step(j, i)] for i in range(d) if j[i] > 0), np.zeros(width, dtype=complex))
        out["U1"][t] = u0 * a
        out["U2"][t] = u0 * b
        out["U1P"][t] = u0p * a + inv_pu0 * da
        out["U2P"][t] = u0p * b + inv_pu0 * db
    series = {
        k: SeriesSolution(k, indices, out[k], N, d, mode, grid, inv_pu0 if k == "U2P" else None)
        for k in KINDS
    }
    return SeriesSet(series, seed, pv)


def normalize(sset: SeriesSet) -> SeriesSet:
    """Combine into v1, v2 with ``v1(x0)=1, v1'(x0)=0, v2(x0)=0, v2'(x0)=1``."""
    grid = sset.grid
    u00 = sset.seed.u0.at(grid.i0)
    u0p0 = sset.seed.u0_prime.at(grid.i0)
    p0 = complex(sset.p_at[grid.i0] if sset.mode == FULL else sset.p_at[0])
    a, b = 1.0 / u00, -p0 * u0p0
    c = p0 * u00
    S = sset.series
    series = {
        "V1": S["U1"].combine(a, S["U2"], b, "V1"),
        "V2": S["U2"].combine(c, None, 0.0, "V2"),
        "V1P": S["U1P"].combine(a, S["U2P"], b, "V1P"),
        "V2P": S["U2P"].combine(c, None, 0.0, "V2P"),
    }
    return SeriesSet(series, sset.seed, sset.p_at, sset.center)


def recenter(problem, lam0: Sequence[complex], seed0=None) -> SeriesSet:
    """Normalized series in powers of ``lam - lam0``.

    ``q`` is replaced by ``q - sum_i lam0_i r_i`` and a fresh seed is built
    for the shifted equation unless ``seed0`` is supplied.  Only available
    for the plain (``s = 0``) equation.
    """
    shifted = problem.shifted(lam0)
    sset = shifted.build_series(seed=seed0)
    sset.center = np.asarray(lam0, dtype=complex)
    return sset
