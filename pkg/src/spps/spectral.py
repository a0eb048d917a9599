"""Characteristic polynomials, sections, roots and eigencurve rasters.

For boundary conditions ``alpha v(x1) + alpha_p v'(x1) = 0`` and
``beta v(x2) + beta_p v'(x2) = 0`` with the normalized pair ``v1, v2``
based at ``x1``, the solution satisfying the left condition is
``alpha_p v1 - alpha v2`` and the right condition turns into

    chi = beta (alpha_p v1 - alpha v2) + beta_p (alpha_p v1' - alpha v2')

evaluated at ``x2``.  Its zero set is the spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import BasepointNotLeft, DegenerateZeroPolynomial, IndexOutOfRange, InputError
from .indices import MultiIndex
from .output import write_csv, write_json
from .powers import FULL
from .series import SeriesSet, monomial_values


@dataclass(frozen=True)
class CharPolynomial:
    """``sum_t coeffs[t] * (lam - center)^indices[t]``."""

    d: int
    N: int
    indices: Tuple[MultiIndex, ...]
    coeffs: np.ndarray = field(repr=False)
    center: Tuple[complex, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(tuple(int(v) for v in n) for n in self.indices))
        c = np.array(self.coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.center is None:
            object.__setattr__(self, "center", (0j,) * self.d)
        else:
            object.__setattr__(self, "center", tuple(complex(v) for v in self.center))

    def __call__(self, lam: Sequence[complex]) -> complex:
        if len(lam) != self.d:
            raise ValueError(f"expected {self.d} parameters, got {len(lam)}")
        mu = np.asarray(lam, dtype=complex) - np.asarray(self.center)
        return complex(monomial_values(self.indices, mu) @ self.coeffs)

    def coefficient(self, n: MultiIndex) -> complex:
        try:
            return complex(self.coeffs[self.indices.index(tuple(n))])
        except ValueError:
            return 0j

    def dense(self) -> np.ndarray:
        """Coefficient array ``C[n1, ..., nd]`` of shape ``(N + 1,) * d``."""
        C = np.zeros((self.N + 1,) * self.d, dtype=complex)
        for n, c in zip(self.indices, self.coeffs):
            C[n] += c
        return C

    def univariate(self) -> np.ndarray:
        """Ascending coefficients; only for ``d = 1``."""
        if self.d != 1:
            raise ValueError("not a univariate polynomial")
        return self.dense()

    def to_dict(self) -> Dict:
        return {
            "d": self.d,
            "N": self.N,
            "center": [[c.real, c.imag] for c in self.center],
            "coefficients": [
                {"n": list(n), "re": c.real, "im": c.imag} for n, c in zip(self.indices, self.coeffs)
            ],
        }

    @classmethod
    def from_dict(cls, doc: Dict) -> "CharPolynomial":
        terms = doc["coefficients"]
        return cls(
            int(doc["d"]),
            int(doc["N"]),
            tuple(tuple(t["n"]) for t in terms),
            np.array([complex(t["re"], t["im"]) for t in terms]),
            tuple(complex(a, b) for a, b in doc.get("center", [[0, 0]] * int(doc["d"]))),
        )


def characteristic_polynomial(sset: SeriesSet, bc) -> CharPolynomial:
    """Truncated characteristic function of the boundary value problem.

    Raises:
        BasepointNotLeft: the series are not based at ``x1``.
    """
    if sset.grid.i0 != 0:
        raise BasepointNotLeft("characteristic function needs the basepoint at x1")
    if not sset.normalized:
        raise InputError("characteristic function needs normalized series")
    v1 = sset["V1"].endpoint_coefficients()
    v2 = sset["V2"].endpoint_coefficients()
    v1p = sset["V1P"].endpoint_coefficients()
    v2p = sset["V2P"].endpoint_coefficients()
    chi = bc.beta * (bc.alpha_p * v1 - bc.alpha * v2) + bc.beta_p * (bc.alpha_p * v1p - bc.alpha * v2p)
    s = sset["V1"]
    return CharPolynomial(s.d, s.N, tuple(s.indices), chi, tuple(sset.center))


def section(chi: CharPolynomial, fixed: Dict[int, complex]) -> CharPolynomial:
    """Substitute values for some parameters (0-based axes in ``fixed``).

    The result is a polynomial in the remaining parameters, in increasing
    axis order.  With nothing fixed the polynomial is returned unchanged.
    """
    if not fixed:
        return chi
    for i in fixed:
        if not 0 <= i < chi.d:
            raise IndexOutOfRange(f"parameter axis {i} outside 0..{chi.d - 1}")
    free = [i for i in range(chi.d) if i not in fixed]
    if not free:
        raise InputError("section must leave at least one parameter free")
    mu = {i: complex(v) - chi.center[i] for i, v in fixed.items()}
    acc: Dict[MultiIndex, complex] = {}
    for n, c in zip(chi.indices, chi.coeffs):
        factor = c
        for i, m in mu.items():
            factor = factor * m ** n[i]
        key = tuple(n[i] for i in free)
        acc[key] = acc.get(key, 0j) + factor
    keys = sorted(acc, key=lambda n: (sum(n), n))
    return CharPolynomial(
        len(free), chi.N, tuple(keys), np.array([acc[k] for k in keys]), tuple(chi.center[i] for i in free)
    )


def pencil_section(chi: CharPolynomial) -> CharPolynomial:
    """Univariate polynomial obtained from ``lam_i = lam^(i - 1)`` (so ``lam_1 = 1``)."""
    if chi.d < 2:
        raise InputError("pencil reduction needs at least two parameters")
    if any(c != 0 for c in chi.center):
        raise InputError("pencil reduction needs an expansion about the origin")
    top = max(sum(i * v for i, v in enumerate(n)) for n in chi.indices)
    out = np.zeros(top + 1, dtype=complex)
    for n, c in zip(chi.indices, chi.coeffs):
        out[sum(i * v for i, v in enumerate(n))] += c
    return CharPolynomial(1, top, tuple((k,) for k in range(top + 1)), out)


# -- univariate roots --------------------------------------------------------


@dataclass(frozen=True)
class Root:
    value: complex
    residual: float
    trusted: bool

    def to_dict(self) -> Dict:
        return {"re": self.value.real, "im": self.value.imag, "residual": self.residual, "trusted": self.trusted}


def _strip(c: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Drop negligible top-degree coefficients.

    A coefficient is negligible when its term, measured on the disk of the
    given radius, is below ``1e-300 + 1e-14`` times the largest such term.
    """
    mag = np.abs(c)
    if np.isfinite(radius) and radius > 0:
        with np.errstate(over="ignore", under="ignore"):
            mag = mag * radius ** np.arange(len(c), dtype=float)
    thresh = 1e-300 + 1e-14 * mag.max(initial=0.0)
    keep = np.nonzero(mag > thresh)[0]
    if keep.size == 0:
        raise DegenerateZeroPolynomial("all coefficients are negligible")
    return c[: keep[-1] + 1]


def default_trust_radius(coeffs: np.ndarray) -> float:
    """Radius where the top-degree term reaches ``1e-3`` of the lowest one."""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(np.abs(c) > 1e-300)[0]
    if nz.size == 0:
        raise DegenerateZeroPolynomial("all coefficients are negligible")
    low, top = int(nz[0]), int(nz[-1])
    if top == low:
        return float("inf")
    return float((1e-3 * abs(c[low]) / abs(c[top])) ** (1.0 / (top - low)))


def _horner(c: np.ndarray, z: complex) -> Tuple[complex, complex]:
    val, der = 0j, 0j
    for a in c[::-1]:
        der = der * z + val
        val = val * z + a
    return val, der


def roots_univariate(poly: Union[CharPolynomial, Sequence[complex]], trust_radius: Optional[float] = None) -> List[Root]:
    """All roots of a univariate polynomial (ascending coefficients or CharPolynomial).

    Companion-matrix eigenvalues of the rescaled polynomial, polished by a
    few Newton steps.  Top coefficients whose terms are negligible on the
    trust disk are dropped first.  Roots farther than ``trust_radius`` from the center
    are flagged untrusted.

    Raises:
        DegenerateZeroPolynomial: every coefficient is negligible.
    """
    center = 0j
    if isinstance(poly, CharPolynomial):
        center = poly.center[0]
        raw = poly.univariate()
    else:
        raw = np.asarray(poly, dtype=complex)
    if trust_radius is None:
        trust_radius = default_trust_radius(raw)
    c = _strip(raw, trust_radius)
    n = len(c) - 1
    if n < 1:
        return []
    nz = np.nonzero(np.abs(c) > 0)[0]
    low = int(nz[0])
    # rescale lam = sigma * mu so the extreme coefficients have equal size
    sigma = (abs(c[low]) / abs(c[n])) ** (1.0 / (n - low)) if n > low else 1.0
    scaled = c * sigma ** np.arange(n + 1)
    mu = np.roots(scaled[::-1])
    out = []
    for z in mu * sigma:
        val, der = _horner(c, z)
        for _ in range(3):
            if der == 0:
                break
            cand = z - val / der
            cval, cder = _horner(c, cand)
            if abs(cval) >= abs(val):
                break
            z, val, der = cand, cval, cder
        out.append(Root(complex(z + center), float(abs(val)), bool(abs(z) <= trust_radius)))
    out.sort(key=lambda rt: (rt.value.real, rt.value.imag))
    return out


# -- rasters -----------------------------------------------------------------


@dataclass(frozen=True)
class AxisSpec:
    """Affine map ``t -> offset + direction * t`` for ``t`` in ``[lo, hi]``."""

    lo: float
    hi: float
    direction: complex = 1.0
    offset: complex = 0.0

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        """``re:lo:hi`` or ``im:lo:hi``."""
        parts = text.split(":")
        if len(parts) != 3 or parts[0] not in ("re", "im"):
            raise InputError(f"axis spec must look like re|im:lo:hi, got {text!r}")
        try:
            lo, hi = float(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"axis bounds must be numbers, got {text!r}") from None
        return cls(lo, hi, 1.0 if parts[0] == "re" else 1j)

    def ticks(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)

    def lam(self, t) -> np.ndarray:
        return self.offset + self.direction * np.asarray(t, dtype=float)


@dataclass
class Raster:
    t1: np.ndarray
    t2: np.ndarray
    values: np.ndarray  # values[a, b] = chi(lam1(t1[a]), lam2(t2[b]))
    is_real: bool
    polylines: List[np.ndarray]  # arrays of (t1, t2) vertices
    ridges: List[Tuple[float, float]]

    @property
    def log10abs(self) -> np.ndarray:
        return np.log10(np.abs(self.values) + 1e-300)


def evaluate_grid(chi: CharPolynomial, lam1: np.ndarray, lam2: np.ndarray) -> np.ndarray:
    """``chi`` on the tensor grid ``lam1 x lam2`` (d = 2)."""
    if chi.d != 2:
        raise InputError("raster evaluation needs exactly two parameters")
    C = chi.dense()
    mu1 = np.asarray(lam1, dtype=complex) - chi.center[0]
    mu2 = np.asarray(lam2, dtype=complex) - chi.center[1]
    P1 = mu1[:, None] ** np.arange(chi.N + 1)[None, :]
    P2 = mu2[:, None] ** np.arange(chi.N + 1)[None, :]
    return P1 @ C @ P2.T


# corner order: 0 = (a, b), 1 = (a+1, b), 2 = (a+1, b+1), 3 = (a, b+1);
# edge e joins corners e and e+1 (mod 4)
_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))


def marching_squares(t1: np.ndarray, t2: np.ndarray, F: np.ndarray) -> List[np.ndarray]:
    """Zero-level polylines of the real array ``F[a, b]`` sampled at ``(t1[a], t2[b])``."""
    pos = F > 0
    n1, n2 = F.shape
    corners = ((0, 0), (1, 0), (1, 1), (0, 1))

    def edge_key(a, b, e):
        (da, db), (ea, eb) = corners[_EDGES[e][0]], corners[_EDGES[e][1]]
        p, q = (a + da, b + db), (a + ea, b + eb)
        return (p, q) if p < q else (q, p)

    def edge_point(key):
        (a0, b0), (a1, b1) = key
        f0, f1 = F[a0, b0], F[a1, b1]
        s = f0 / (f0 - f1) if f0 != f1 else 0.5
        return (t1[a0] + s * (t1[a1] - t1[a0]), t2[b0] + s * (t2[b1] - t2[b0]))

    adj: Dict = {}
    for a in range(n1 - 1):
        for b in range(n2 - 1):
            mask = tuple(bool(pos[a + da, b + db]) for da, db in corners)
            if all(mask) or not any(mask):
                continue
            center = 0.25 * (F[a, b] + F[a + 1, b] + F[a + 1, b + 1] + F[a, b + 1]) > 0
            crossing = [e for e, (i, j) in enumerate(_EDGES) if mask[i] != mask[j]]
            if len(crossing) == 2:
                pairs = [tuple(crossing)]
            elif mask[0] == center:
                # corners 0 and 2 joined through the centre: cut off 1 and 3
                pairs = [(0, 1), (2, 3)]
            else:
                pairs = [(3, 0), (1, 2)]
            for e1, e2 in pairs:
                k1, k2 = edge_key(a, b, e1), edge_key(a, b, e2)
                adj.setdefault(k1, []).append(k2)
                adj.setdefault(k2, []).append(k1)

    seen = set()
    lines = []

    def walk(start):
        path = [start]
        seen.add(start)
        cur = start
        while True:
            nxt = [k for k in adj[cur] if k not in seen]
            if not nxt:
                break
            cur = nxt[0]
            seen.add(cur)
            path.append(cur)
        # close loops
        if len(path) > 2 and start in adj[path[-1]]:
            path.append(start)
        return path

    # open chains first (endpoints have a single neighbour), then loops
    for k in sorted(adj):
        if k not in seen and len(adj[k]) == 1:
            lines.append(walk(k))
    for k in sorted(adj):
        if k not in seen:
            lines.append(walk(k))
    return [np.array([edge_point(k) for k in path]) for path in lines]


def _ridges(t1: np.ndarray, t2: np.ndarray, L: np.ndarray) -> List[Tuple[float, float]]:
    """Grid points that are local minima of ``L`` along either axis and lie
    in the lowest decile of the raster."""
    cut = np.percentile(L, 10)
    out = []
    n1, n2 = L.shape
    for a in range(n1):
        for b in range(n2):
            v = L[a, b]
            if v > cut:
                continue
            along1 = 0 < a < n1 - 1 and v < L[a - 1, b] and v <= L[a + 1, b]
            along2 = 0 < b < n2 - 1 and v < L[a, b - 1] and v <= L[a, b + 1]
            if along1 or along2:
                out.append((float(t1[a]), float(t2[b])))
    return out


def eigencurve_raster(chi: CharPolynomial, axis1: AxisSpec, axis2: AxisSpec, n1: int, n2: int) -> Raster:
    """Sample ``chi`` on an ``n1 x n2`` grid and extract its zero set.

    When ``chi`` is real on the grid, zero curves come from marching squares
    on the sign; otherwise there is no sign structure and only the minima
    ridges of ``log10 |chi|`` are reported.
    """
    if n1 < 2 or n2 < 2:
        raise InputError("raster needs at least 2 x 2 samples")
    t1, t2 = axis1.ticks(n1), axis2.ticks(n2)
    Z = evaluate_grid(chi, axis1.lam(t1), axis2.lam(t2))
    scale = np.max(np.abs(Z), initial=0.0)
    is_real = bool(np.all(np.abs(Z.imag) <= 1e-12 * scale))
    if is_real:
        lines = marching_squares(t1, t2, Z.real)
        return Raster(t1, t2, Z, True, lines, [])
    L = np.log10(np.abs(Z) + 1e-300)
    return Raster(t1, t2, Z, False, [], _ridges(t1, t2, L))


def evaluate_at_points(sset: SeriesSet, points: Sequence[int]) -> Dict[str, List[CharPolynomial]]:
    """Every series at the given mesh indices, as polynomials in the parameters.

    Raises:
        IndexOutOfRange: a point is not a mesh index.
    """
    if sset.mode != FULL:
        raise InputError("point evaluation needs full-mode series")
    M = sset.grid.M
    for m in points:
        if not 0 <= int(m) <= M:
            raise IndexOutOfRange(f"mesh index {m} outside 0..{M}")
    out = {}
    for kind, ser in sset.series.items():
        out[kind] = [
            CharPolynomial(ser.d, ser.N, tuple(ser.indices), ser.column(int(m)), tuple(sset.center))
            for m in points
        ]
    return out


# -- writers -----------------------------------------------------------------


def write_raster_csv(path, raster: Raster) -> None:
    L = raster.log10abs
    rows = (
        (raster.t1[a], raster.t2[b], raster.values[a, b].real, raster.values[a, b].imag, L[a, b])
        for a in range(len(raster.t1))
        for b in range(len(raster.t2))
    )
    write_csv(path, ["t1", "t2", "re(chi)", "im(chi)", "log10abs"], rows)


def write_polylines_json(path, raster: Raster) -> None:
    write_json(path, [[[float(u), float(v)] for u, v in line] for line in raster.polylines])


def write_ridges_json(path, raster: Raster) -> None:
    write_json(path, [[u, v] for u, v in raster.ridges])


def write_roots_json(path, roots: Sequence[Root]) -> None:
    write_json(path, [rt.to_dict() for rt in roots])
