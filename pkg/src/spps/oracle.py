"""Independent reference computations used to cross-check the series.

* :func:`rk4_solve` integrates the equation at a fixed parameter point with
  classical fixed-step RK4, so trajectories land on mesh nodes.
* :func:`nested_integral_direct` expands one formal power into its separate
  nested-integral summands and integrates each on its own.
* :func:`meissner_curve` returns points of a known eigencurve of the
  sign-potential problem on ``[-1, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DivisionBlowup, NoSignChange
from .grid import SampledFunction, cumulative_array
from .indices import MultiIndex, degree, is_admissible, odd_axis, path_count, step, x_term_count
from .powers import OVERFLOW_GUARD, XTILDE


@dataclass(frozen=True)
class IVPResult:
    y: SampledFunction
    y_prime: SampledFunction


def _interp_nodes(values: np.ndarray, frac: float) -> np.ndarray:
    """Cubic Lagrange interpolation at ``m + frac`` for every cell ``m``.

    Uses nodes ``m-1 .. m+2``, shifted inwards at the two end cells; linear
    when the mesh has fewer than four nodes.
    """
    M = len(values) - 1
    if M < 3:
        return (1.0 - frac) * values[:-1] + frac * values[1:]
    start = np.clip(np.arange(M) - 1, 0, M - 3)
    t = np.arange(M) + frac - start  # position inside the 4-node stencil
    out = np.zeros(M, dtype=np.result_type(values, float))
    for k in range(4):
        w = np.ones(M)
        for l in range(4):
            if l != k:
                w = w * (t - l) / (k - l)
        out = out + w * values[start + k]
    return out


def _propagators(a: np.ndarray, b: np.ndarray, c: np.ndarray, h: float, substeps: int) -> np.ndarray:
    """RK4 one-cell transfer matrices for ``Y' = [[0, a], [b, c]] Y``.

    ``a``, ``b``, ``c`` are sampled at the ``2 * substeps + 1`` stage positions
    of every cell (shape ``(2 * substeps + 1, M)``).  Returns ``(M, 2, 2)``.
    """
    M = a.shape[1]
    eye = np.broadcast_to(np.eye(2, dtype=complex), (M, 2, 2))

    def mat(k):
        A = np.zeros((M, 2, 2), dtype=complex)
        A[:, 0, 1] = a[k]
        A[:, 1, 0] = b[k]
        A[:, 1, 1] = c[k]
        return A

    dt = h / substeps
    P = np.array(eye)
    for sub in range(substeps):
        A1, A2, A3 = mat(2 * sub), mat(2 * sub + 1), mat(2 * sub + 2)
        K1 = A1
        K2 = A2 @ (eye + 0.5 * dt * K1)
        K3 = A2 @ (eye + 0.5 * dt * K2)
        K4 = A3 @ (eye + dt * K3)
        P = (eye + dt / 6.0 * (K1 + 2 * K2 + 2 * K3 + K4)) @ P
    return P


def rk4_solve(
    p: SampledFunction,
    q: SampledFunction,
    r: Sequence[SampledFunction],
    s: Optional[Sequence[SampledFunction]],
    lam: Sequence[complex],
    y0,
    yp0,
    substeps: int = 1,
):
    """Solve ``(p y')' + q y = sum_i lam_i (r_i y + s_i y')`` from the basepoint.

    The state is ``(y, p y')``, so no derivative of ``p`` is needed.
    Coefficients between nodes come from cubic interpolation of the samples.
    ``y0`` and ``yp0`` may be arrays of equal shape, in which case one
    trajectory is returned per initial condition.

    Returns:
        IVPResult for scalar initial data; otherwise a pair of arrays
        ``(y, y')`` of shape ``(K, M + 1)``.
    """
    if substeps < 1:
        raise ValueError("substeps must be at least 1")
    grid = p.grid
    lam = np.asarray(lam, dtype=complex)
    pv, qv = p.values, q.values
    R = sum(l * ri.values for l, ri in zip(lam, r))
    S = np.zeros_like(pv) if s is None else sum(l * si.values for l, si in zip(lam, s))

    fracs = np.arange(2 * substeps + 1) / (2 * substeps)
    stage = lambda arr: np.array([_interp_nodes(arr, f) for f in fracs])
    inv_p = stage(1.0 / pv)
    P = _propagators(inv_p, stage(R - qv), stage(S / pv), grid.h, substeps)

    scalar = np.ndim(y0) == 0 and np.ndim(yp0) == 0
    i0 = grid.i0
    Y0 = np.stack([np.atleast_1d(np.asarray(y0, dtype=complex)),
                   pv[i0] * np.atleast_1d(np.asarray(yp0, dtype=complex))])
    traj = np.empty((grid.M + 1, 2, Y0.shape[1]), dtype=complex)
    traj[i0] = Y0
    cur = Y0
    for m in range(i0, grid.M):
        cur = P[m] @ cur
        traj[m + 1] = cur
        if not np.all(np.isfinite(cur)) or np.max(np.abs(cur)) > OVERFLOW_GUARD:
            raise DivisionBlowup("RK4 trajectory exceeds the overflow guard")
    if i0 > 0:
        inv = np.linalg.inv(P[:i0])
        cur = Y0
        for m in range(i0 - 1, -1, -1):
            cur = inv[m] @ cur
            traj[m] = cur
    y, yp = traj[:, 0, :].T, traj[:, 1, :].T / pv
    if scalar:
        return IVPResult(SampledFunction(grid, y[0]), SampledFunction(grid, yp[0]))
    return y, yp


# -- direct nested integrals -------------------------------------------------

Term = Tuple[complex, List[np.ndarray]]


def nested_integral_direct(family: str, j: MultiIndex, seed, p, r, s=None) -> SampledFunction:
    """Rescaled formal power at ``j`` summed from its individual nested integrals.

    Every summand is one chain ``c * int(w_n * ... int(w_1))`` read off the
    recursion tree without sharing intermediate results, so the sum is an
    independent check of the table builder.  Intended for small ``|j|``.
    """
    grid = seed.u0.grid
    d = len(r)
    j = tuple(j)
    u0 = seed.u0.values
    inv_pu0sq = 1.0 / (p.values * u0 * u0)
    w = [ri.values * u0 * u0 for ri in r]
    sp = None
    if s is not None:
        w = [wi + si.values * u0 * seed.u0_prime.values for wi, si in zip(w, s)]
        sp = [si.values / p.values for si in s]
    below = 0.0 if family == XTILDE else 1.0 / d

    def terms(k: MultiIndex) -> List[Term]:
        if any(v < 0 for v in k) or not is_admissible(k):
            return []
        if degree(k) == 0:
            if family == XTILDE:
                return [(1.0, [])]
            return [(below, [inv_pu0sq]) for _ in range(d)]
        if degree(k) % 2:
            i = odd_axis(k)
            pred = step(k, i)
            out = [(c, ops + [w[i]]) for c, ops in terms(pred)]
            if sp is not None:
                if degree(pred) == 0:
                    out += [(below, [sp[i]]) for _ in range(d) if below]
                else:
                    for kk in range(d):
                        if pred[kk] > 0:
                            out += [(c, ops + [sp[i]]) for c, ops in terms(step(pred, kk))]
            return out
        out = []
        for i in range(d):
            if k[i] > 0:
                out += [(c, ops + [inv_pu0sq]) for c, ops in terms(step(k, i))]
        return out

    total = np.zeros(grid.M + 1, dtype=complex)
    for c, ops in terms(j):
        f = np.full(grid.M + 1, c, dtype=complex)
        for weight in ops:
            f = cumulative_array(weight * f, grid)
        total = total + f
    return SampledFunction(grid, total)


def nested_term_count(family: str, j: MultiIndex, d: int) -> int:
    """Number of summands :func:`nested_integral_direct` integrates (plain case)."""
    if any(v < 0 for v in j) or not is_admissible(tuple(j)):
        return 0
    return path_count(tuple(j)) if family == XTILDE else x_term_count(tuple(j))


# -- Meissner eigencurve -----------------------------------------------------


def meissner_curve(s: float, tol: float = 1e-12) -> Tuple[complex, complex]:
    """Point ``(s^2 - h^2, 2 i s h)`` with ``s sin 2s + h sinh 2h = 0``, ``h >= 0``.

    Raises:
        NoSignChange: ``s sin 2s > 0`` so no root with ``h >= 0`` exists.
    """
    c = s * np.sin(2 * s)
    if abs(c) <= 64 * np.finfo(float).eps * max(abs(s), 1.0):
        # band edges s = n pi / 2 up to rounding in sin
        c = 0.0
    if c > 0:
        raise NoSignChange(f"s sin(2s) = {c:.3g} > 0 at s = {s}")
    f = lambda h: c + h * np.sinh(2 * h)
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    h = 0.5 * (lo + hi) if c < 0 else 0.0
    return complex(s * s - h * h), complex(0.0, 2 * s * h)
