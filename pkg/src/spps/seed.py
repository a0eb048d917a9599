"""Nonvanishing particular solutions of ``(p u')' + q u = 0``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatch, NonconvergedSeed, SeedVanishes, ZeroOnMesh
from .grid import SampledFunction, cumulative_array
from .powers import FULL, build_x, build_xtilde


@dataclass(frozen=True)
class SeedSolution:
    u0: SampledFunction
    u0_prime: SampledFunction
    min_abs: float
    residual: Optional[float] = None

    @property
    def grid(self):
        return self.u0.grid


def seed_residual(seed: SeedSolution, p: SampledFunction, q: SampledFunction) -> float:
    """Max of ``|p u0' - (p u0')(x0) + int_{x0}^x q u0|`` over the mesh.

    This is ``L u0 = 0`` in integrated form, evaluated with the mesh
    quadrature, so it is not limited by a finite-difference error.
    """
    flux = p.values * seed.u0_prime.values
    acc = cumulative_array(q.values * seed.u0.values, seed.grid)
    return float(np.max(np.abs(flux - flux[seed.grid.i0] + acc)))


def seed_from_samples(u0: SampledFunction, u0_prime: SampledFunction) -> SeedSolution:
    """Wrap a user-supplied solution of ``L u0 = 0`` and its derivative."""
    if u0.grid != u0_prime.grid:
        raise GridMismatch("u0 and u0' are sampled on different grids")
    min_abs = float(np.min(np.abs(u0.values)))
    if min_abs == 0.0:
        raise ZeroOnMesh("seed u0 vanishes at a mesh node")
    return SeedSolution(u0, u0_prime, min_abs)


def build_seed(p: SampledFunction, q: SampledFunction, N0: int, tol: float = 1e-8) -> SeedSolution:
    """Construct ``u0 = w1 + i w2`` from the single-parameter expansion.

    ``w1``, ``w2`` solve ``(p y')' = -q y`` and are obtained as power series
    at parameter value 1 around the trivial seed ``1`` (valid because
    ``(p 1')' = 0``).  Their Wronskian never vanishes, hence neither does
    ``w1 + i w2`` for real ``p``, ``q``.

    Raises:
        NonconvergedSeed: the order-``N0`` terms still exceed ``tol``
            relative to ``|u0(x2)|``.
        SeedVanishes: ``min |u0| < 1e-12 sup |u0|`` on the mesh.
    """
    if p.grid != q.grid:
        raise GridMismatch("p and q are sampled on different grids")
    grid = p.grid
    one = grid.constant(1.0)
    trivial = SeedSolution(one, grid.constant(0.0), 1.0)
    r = [-q]
    xt = build_xtilde(trivial, p, r, N0, FULL)
    xs = build_x(trivial, p, r, N0, FULL)

    w1 = sum(xt[(2 * n,)] for n in range(N0 + 1))
    w2 = sum(xs[(2 * n,)] for n in range(N0 + 1))
    inv_p = 1.0 / p.values
    w1p = inv_p * sum((xt[(2 * n - 1,)] for n in range(1, N0 + 1)), np.zeros_like(w1))
    w2p = inv_p * (1.0 + sum((xs[(2 * n - 1,)] for n in range(1, N0 + 1)), np.zeros_like(w2)))

    u0 = w1 + 1j * w2
    u0p = w1p + 1j * w2p
    tail = abs(xt[(2 * N0,)][-1]) + abs(xs[(2 * N0,)][-1])
    if N0 > 0 and tail > tol * max(abs(u0[-1]), 1.0):
        raise NonconvergedSeed(f"seed series not converged at order {N0} (tail {tail:.3g})")
    mag = np.abs(u0)
    if mag.min() < 1e-12 * mag.max():
        raise SeedVanishes("constructed seed u0 (nearly) vanishes on the mesh")
    seed = SeedSolution(SampledFunction(grid, u0), SampledFunction(grid, u0p), float(mag.min()))
    return SeedSolution(seed.u0, seed.u0_prime, seed.min_abs, seed_residual(seed, p, q))
