"""Problem definitions and the full table -> series pipeline.

A problem is ``(p y')' + q y = sum_i lambda_i (r_i y + s_i y')`` on a grid,
with an order ``N``, a storage mode and (optionally) boundary conditions.
Problem files are JSON documents; see README for the schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from . import exprparse
from .errors import InputError
from .grid import Grid, SampledFunction, load_tabulated
from .powers import ENDPOINT, FULL, build_generalized, build_x, build_xtilde
from .seed import SeedSolution, build_seed, seed_from_samples
from .series import SeriesSet, assemble, normalize


@dataclass(frozen=True)
class BoundaryConditions:
    """``alpha v(x1) + alpha_p v'(x1) = 0`` and ``beta v(x2) + beta_p v'(x2) = 0``."""

    alpha: complex = 1.0
    alpha_p: complex = 0.0
    beta: complex = 1.0
    beta_p: complex = 0.0

    def __post_init__(self):
        if self.alpha == 0 and self.alpha_p == 0:
            raise InputError("boundary condition at x1 is trivial (alpha = alpha_p = 0)")
        if self.beta == 0 and self.beta_p == 0:
            raise InputError("boundary condition at x2 is trivial (beta = beta_p = 0)")


DIRICHLET = BoundaryConditions(1.0, 0.0, 1.0, 0.0)


@dataclass
class Problem:
    grid: Grid
    p: SampledFunction
    q: SampledFunction
    r: List[SampledFunction]
    s: Optional[List[SampledFunction]] = None
    N: int = 10
    mode: str = FULL
    seed: Optional[SeedSolution] = None
    seed_order: Optional[int] = None
    bc: BoundaryConditions = DIRICHLET
    source: Dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return len(self.r)

    @classmethod
    def from_expressions(
        cls,
        x1: float,
        x2: float,
        M: int,
        p: str,
        q: str,
        r: Sequence[str],
        s: Optional[Sequence[str]] = None,
        N: int = 10,
        mode: str = FULL,
        seed: Optional[Sequence[str]] = None,
        bc: BoundaryConditions = DIRICHLET,
        rule: str = "quintic",
        i0: int = 0,
    ) -> "Problem":
        """Build a problem from coefficient expression strings.

        ``seed`` is ``None`` for automatic construction or a pair of
        expressions ``(u0, u0')``.
        """
        grid = Grid(float(x1), float(x2), int(M), i0, rule)
        smp = lambda src: exprparse.sample(exprparse.parse(src), grid)
        seed_sol = None
        if seed is not None:
            seed_sol = seed_from_samples(smp(seed[0]), smp(seed[1]))
        return cls(
            grid,
            smp(p),
            smp(q),
            [smp(ri) for ri in r],
            None if s is None else [smp(si) for si in s],
            N,
            mode,
            seed_sol,
            None,
            bc,
        )

    def build_seed(self) -> SeedSolution:
        if self.seed is None:
            self.seed = build_seed(self.p, self.q, self.seed_order or self.N + 4)
        return self.seed

    def build_tables(self):
        seed = self.build_seed()
        if self.s is None:
            return (
                build_xtilde(seed, self.p, self.r, self.N, self.mode),
                build_x(seed, self.p, self.r, self.N, self.mode),
            )
        return (
            build_generalized(seed, self.p, self.r, self.s, self.N, self.mode, "XTILDE"),
            build_generalized(seed, self.p, self.r, self.s, self.N, self.mode, "X"),
        )

    def build_series(self, seed: Optional[SeedSolution] = None, normalized: bool = True) -> SeriesSet:
        if seed is not None:
            self.seed = seed
        xt, xs = self.build_tables()
        sset = assemble(xt, xs, self.seed, self.p, self.N)
        return normalize(sset) if normalized else sset

    def shifted(self, lam0: Sequence[complex]) -> "Problem":
        """Same problem with ``q`` replaced by ``q - sum_i lam0_i r_i``."""
        if self.s is not None:
            raise InputError("recentering is only supported for s = 0")
        if len(lam0) != self.d:
            raise ValueError("center has the wrong dimension")
        q = self.q
        for l0, ri in zip(lam0, self.r):
            q = q - complex(l0) * ri
        return replace(self, q=q, seed=None)

    def with_mode(self, mode: str) -> "Problem":
        return replace(self, mode=mode)


# -- problem files -----------------------------------------------------------


def _require(doc: Dict, path: str):
    cur = doc
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            raise InputError(f"problem file: missing key '{path}'")
        cur = cur[key]
    return cur


def _coefficient(spec, grid: Grid, base: Path, name: str) -> SampledFunction:
    if isinstance(spec, (int, float)):
        return grid.constant(float(spec))
    if isinstance(spec, str):
        return exprparse.sample(exprparse.parse(spec), grid)
    if isinstance(spec, dict) and "csv" in spec:
        return load_tabulated(base / spec["csv"], grid)
    raise InputError(f"problem file: coefficient '{name}' must be an expression or {{\"csv\": path}}")


def problem_from_dict(doc: Dict, base: Union[str, Path] = ".") -> Problem:
    """Build a :class:`Problem` from a parsed problem document."""
    base = Path(base)
    x1 = exprparse.constant_value(_require(doc, "interval.x1")).real
    x2 = exprparse.constant_value(_require(doc, "interval.x2")).real
    mesh = _require(doc, "mesh")
    M = int(_require(doc, "mesh.M"))
    grid = Grid(x1, x2, M, int(mesh.get("x0_index", 0)), mesh.get("rule", "quintic"))
    N = int(_require(doc, "order"))
    d = int(_require(doc, "d"))
    if d < 1:
        raise InputError("problem file: 'd' must be at least 1")
    coeffs = _require(doc, "coefficients")
    p = _coefficient(_require(doc, "coefficients.p"), grid, base, "p")
    q = _coefficient(_require(doc, "coefficients.q"), grid, base, "q")
    r_spec = _require(doc, "coefficients.r")
    if not isinstance(r_spec, list) or len(r_spec) != d:
        raise InputError(f"problem file: 'coefficients.r' must be a list of length d={d}")
    r = [_coefficient(v, grid, base, f"r[{i + 1}]") for i, v in enumerate(r_spec)]
    s = None
    if coeffs.get("s") is not None:
        if not isinstance(coeffs["s"], list) or len(coeffs["s"]) != d:
            raise InputError(f"problem file: 'coefficients.s' must be a list of length d={d}")
        s = [_coefficient(v, grid, base, f"s[{i + 1}]") for i, v in enumerate(coeffs["s"])]

    seed_doc = doc.get("seed", "auto")
    seed = None
    seed_order = None
    if isinstance(seed_doc, dict):
        if "u0" in seed_doc:
            seed = seed_from_samples(
                _coefficient(seed_doc["u0"], grid, base, "seed.u0"),
                _coefficient(_require(seed_doc, "u0_prime"), grid, base, "seed.u0_prime"),
            )
        seed_order = seed_doc.get("order")
    elif str(seed_doc).lower() != "auto":
        raise InputError("problem file: 'seed' must be \"auto\" or an object")

    bdoc = doc.get("boundary", {})
    bc = BoundaryConditions(
        *(exprparse.constant_value(bdoc.get(k, dflt)) for k, dflt in
          (("alpha", 1), ("alpha_p", 0), ("beta", 1), ("beta_p", 0)))
    )
    mode = str(doc.get("mode", FULL)).lower()
    if mode not in (FULL, ENDPOINT):
        raise InputError(f"problem file: unknown mode {mode!r}")
    return Problem(grid, p, q, r, s, N, mode, seed, seed_order, bc, source=doc)


def load_problem(path: Union[str, Path]) -> Problem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file {path}: {exc}") from None
    return problem_from_dict(doc, path.parent)
