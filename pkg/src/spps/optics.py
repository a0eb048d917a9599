"""Reflection and transmission of an s-polarized wave by a graded layer.

Inside the layer ``0 <= x <= b`` the field obeys ``u'' = (beta^2 - k^2 n(x)^2) u``,
a two-parameter problem with ``p = 1``, ``q = 0``, ``r1 = 1``, ``r2 = n^2``
at ``lam = (beta^2, -k^2)``.  The series are built once; every angle and
wavelength afterwards is a polynomial evaluation.

The layer may be split into equal segments, each with its own series about
its left end.  The endpoint values then come from the product of the
segments' 2x2 transfer matrices ``[[v1, v2], [v1', v2']]``.  One segment is
the plain single-expansion method; more segments shrink the parameter
radius each expansion has to cover.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exprparse
from .errors import EvanescentRegime, InputError
from .grid import Grid, SampledFunction
from .output import write_csv
from .oracle import rk4_solve
from .powers import ENDPOINT, build_x, build_xtilde
from .seed import seed_from_samples
from .series import SeriesSet, assemble, normalize

OK = "OK"
SKIPPED = "SKIPPED"
EVANESCENT = "EVANESCENT"


@dataclass
class OpticsConfig:
    """Layer description plus the discretisation used for its series.

    Attributes:
        n1, n2: refractive indices of the incidence and exit media.
        b: layer width.
        profile: ``n(x)`` sampled on a mesh of ``[0, b]``; the mesh size,
            basepoint and quadrature rule of the series are taken from it.
        N: truncation order.
        segments: number of equal sub-layers, must divide the mesh size.
        profile_expr: optional closed form of ``n(x)``, used by the RK4
            reference to resample on a finer mesh.
    """

    n1: float
    n2: float
    b: float
    profile: SampledFunction
    N: int = 16
    segments: int = 1
    profile_expr: Optional[exprparse.Expr] = None
    _series: Optional[List[SeriesSet]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise InputError("refractive indices n1, n2 must be >= 1")
        if not self.b > 0:
            raise InputError("layer width b must be positive")
        g = self.profile.grid
        if abs(g.x1) > 1e-14 * self.b or abs(g.x2 - self.b) > 1e-12 * self.b:
            raise InputError("profile must be sampled on [0, b]")
        vals = self.profile.values
        if np.any(np.abs(vals.imag) > 0) or np.any(vals.real < 1):
            raise InputError("profile must be real and >= 1 on the mesh")
        if self.segments < 1 or g.M % self.segments:
            raise InputError(f"segments={self.segments} must divide M={g.M}")

    @classmethod
    def from_expression(
        cls, n1, n2, b, profile: str, M: int, N: int = 16, rule: str = "quintic", segments: int = 1
    ) -> "OpticsConfig":
        grid = Grid(0.0, float(b), int(M), 0, rule)
        expr = exprparse.parse(profile)
        return cls(float(n1), float(n2), float(b), exprparse.sample(expr, grid), int(N), int(segments), expr)

    @property
    def M(self) -> int:
        return self.profile.grid.M

    @property
    def series(self) -> List[SeriesSet]:
        """Endpoint-mode normalized series, one set per segment."""
        if self._series is None:
            self._series = [self._segment_series(k) for k in range(self.segments)]
        return self._series

    def _segment_series(self, k: int) -> SeriesSet:
        g = self.profile.grid
        m = g.M // self.segments
        lo, hi = k * m, (k + 1) * m
        sub = Grid(float(g.x[lo]), float(g.x[hi]) if hi < g.M else g.x2, m, 0, g.rule)
        n = SampledFunction(sub, self.profile.values[lo : hi + 1])
        one, zero = sub.constant(1.0), sub.constant(0.0)
        r = [one, n * n]
        seed = seed_from_samples(one, zero)
        xt = build_xtilde(seed, one, r, self.N, ENDPOINT)
        xs = build_x(seed, one, r, self.N, ENDPOINT)
        return normalize(assemble(xt, xs, seed, one, self.N))

    def endpoint_values(self, lam: Sequence[complex]) -> Tuple[complex, complex, complex, complex]:
        """``(v1, v1', v2, v2')`` at ``x = b`` for normalized data at ``x = 0``."""
        P = np.eye(2, dtype=complex)
        for sset in self.series:
            v = sset.evaluate(lam)
            P = np.array([[v["V1"], v["V2"]], [v["V1P"], v["V2P"]]]) @ P
        return complex(P[0, 0]), complex(P[1, 0]), complex(P[0, 1]), complex(P[1, 1])


@dataclass(frozen=True)
class RTResult:
    R: complex
    T: complex
    abs_R2: float
    weighted_abs_T2: float
    energy_defect: Optional[float]


def wave_numbers(cfg: OpticsConfig, beta: float, k: float) -> Tuple[complex, complex]:
    """Principal roots ``k_i = sqrt(k^2 n_i^2 - beta^2)``.

    Raises:
        EvanescentRegime: a wave is not propagating on one side.
    """
    k1sq = k * k * cfg.n1**2 - beta * beta
    k2sq = k * k * cfg.n2**2 - beta * beta
    if k1sq <= 0 or k2sq <= 0:
        raise EvanescentRegime(f"no propagating wave for beta={beta}, k={k}")
    return complex(np.sqrt(k1sq)), complex(np.sqrt(k2sq))


def rt_from_values(cfg: OpticsConfig, beta: float, k: float, vals) -> RTResult:
    """R and T from the four endpoint values of the normalized solutions."""
    v1, v1p, v2, v2p = vals
    k1, k2 = wave_numbers(cfg, beta, k)
    D = (v1p - k1 * k2 * v2) + 1j * (k2 * v1 + k1 * v2p)
    R = (-k1 * k2 * v2 - v1p - 1j * k2 * v1 + 1j * k1 * v2p) / D
    T = 2j * k1 * (v1 * v2p - v1p * v2) * np.exp(-1j * k2 * cfg.b) / D
    aR2 = abs(R) ** 2
    wT2 = cfg.n2 / cfg.n1 * abs(T) ** 2
    defect = aR2 + wT2 - 1.0 if beta == 0 else None
    return RTResult(complex(R), complex(T), float(aR2), float(wT2), defect)


def rt_at(cfg: OpticsConfig, beta: float, k: float) -> RTResult:
    """Reflection and transmission coefficients at propagation constant
    ``beta`` and wave number ``k``."""
    wave_numbers(cfg, beta, k)
    return rt_from_values(cfg, beta, k, cfg.endpoint_values([beta * beta, -k * k]))


@dataclass(frozen=True)
class ScanRow:
    beta: float  # dimensionless beta * b
    b_over_lambda: float
    status: str
    result: Optional[RTResult] = None


def rt_scan(cfg: OpticsConfig, beta_values: Sequence[float], bl_values: Sequence[float]) -> List[ScanRow]:
    """Tabulate R, T over dimensionless ``beta * b`` and ``b / lambda``.

    Cells with ``b/lambda < beta b / (2 pi)`` are marked SKIPPED, evanescent
    cells EVANESCENT.
    """
    cfg.series  # one build, shared by every cell
    rows = []
    for bb in beta_values:
        for bl in bl_values:
            if bl < bb / (2 * np.pi):
                rows.append(ScanRow(float(bb), float(bl), SKIPPED))
                continue
            beta, k = bb / cfg.b, 2 * np.pi * bl / cfg.b
            try:
                rows.append(ScanRow(float(bb), float(bl), OK, rt_at(cfg, beta, k)))
            except EvanescentRegime:
                rows.append(ScanRow(float(bb), float(bl), EVANESCENT))
    return rows


SCAN_HEADER = [
    "beta", "b_over_lambda", "reR", "imR", "reT", "imT",
    "absR2", "weighted_absT2", "energy_defect", "status",
]


def write_scan_csv(path: Union[str, Path], rows: Sequence[ScanRow]) -> None:
    def line(row: ScanRow):
        res = row.result
        if res is None:
            return [row.beta, row.b_over_lambda] + ["nan"] * 7 + [row.status]
        defect = "NA" if res.energy_defect is None else res.energy_defect
        return [
            row.beta, row.b_over_lambda, res.R.real, res.R.imag, res.T.real, res.T.imag,
            res.abs_R2, res.weighted_abs_T2, defect, row.status,
        ]

    write_csv(path, SCAN_HEADER, (line(r) for r in rows))


def reference_values(cfg: OpticsConfig, beta: float, k: float, M_fine: int = 20000, substeps: int = 1):
    """RK4 endpoint values ``(v1, v1', v2, v2')`` at ``x = b``.

    Resamples the closed-form profile on ``M_fine`` cells when it is known;
    otherwise integrates on the profile mesh with ``substeps`` RK4 steps per
    cell.
    """
    if cfg.profile_expr is not None:
        grid = Grid(0.0, cfg.b, int(M_fine))
        n = exprparse.sample(cfg.profile_expr, grid)
    else:
        n = cfg.profile
        grid = n.grid
    one = grid.constant(1.0)
    y, yp = rk4_solve(one, grid.constant(0.0), [one, n * n], None, [beta * beta, -k * k],
                      [1.0, 0.0], [0.0, 1.0], substeps)
    return complex(y[0, -1]), complex(yp[0, -1]), complex(y[1, -1]), complex(yp[1, -1])


def reference_rt(cfg: OpticsConfig, beta: float, k: float, **kw) -> RTResult:
    return rt_from_values(cfg, beta, k, reference_values(cfg, beta, k, **kw))


def load_config(path_or_doc: Union[str, Path, dict]) -> OpticsConfig:
    """Layer configuration from a JSON document.

    Keys: ``n1``, ``n2``, ``b``, ``profile`` (expression in ``x``),
    ``mesh: {M, rule}``, ``order``, optional ``segments``.
    """
    if isinstance(path_or_doc, dict):
        doc = path_or_doc
    else:
        try:
            doc = json.loads(Path(path_or_doc).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read optics config {path_or_doc}: {exc}") from None
    try:
        mesh = doc["mesh"]
        return OpticsConfig.from_expression(
            exprparse.constant_value(doc["n1"]).real,
            exprparse.constant_value(doc["n2"]).real,
            exprparse.constant_value(doc["b"]).real,
            str(doc["profile"]),
            int(mesh["M"]),
            int(doc["order"]),
            mesh.get("rule", "quintic"),
            int(doc.get("segments", 1)),
        )
    except KeyError as exc:
        raise InputError(f"optics config: missing key {exc.args[0]!r}") from None
