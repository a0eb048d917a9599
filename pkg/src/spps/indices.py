"""Multiindex combinatorics for the formal-power tables.

Multiindices are plain tuples of nonnegative ints.  Axis numbers are
0-based throughout the package (``i = 0`` is the first spectral parameter).
The second family of formal powers is indexed by the integer shift ``k``
of its fractional index, so both families share the same lattice.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial, prod
from typing import Iterator, List, Optional, Tuple

MultiIndex = Tuple[int, ...]


def degree(j: MultiIndex) -> int:
    return sum(j)


def is_admissible(j: MultiIndex) -> bool:
    """At most one odd entry and no negative entries."""
    return all(v >= 0 for v in j) and sum(v & 1 for v in j) <= 1


def odd_axis(j: MultiIndex) -> Optional[int]:
    """Axis of the (unique) odd entry of an admissible odd index, else None."""
    odd = [i for i, v in enumerate(j) if v & 1]
    return odd[0] if len(odd) == 1 else None


def step(j: MultiIndex, i: int, by: int = -1) -> MultiIndex:
    return j[:i] + (j[i] + by,) + j[i + 1 :]


def predecessors(j: MultiIndex) -> List[Tuple[int, MultiIndex]]:
    """Predecessors ``(i, j - e_i)`` used by the recursion.

    For odd ``j`` this is the single predecessor along the odd axis; for
    even ``j`` it is every ``j - e_i`` with nonnegative entries.
    """
    if degree(j) % 2:
        i = odd_axis(j)
        if i is None:
            return []
        return [(i, step(j, i))]
    return [(i, step(j, i)) for i in range(len(j)) if j[i] > 0]


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def admissible_of_degree(d: int, m: int) -> Tuple[MultiIndex, ...]:
    """Admissible indices of degree ``m`` in lexicographic order."""
    return tuple(j for j in _compositions(m, d) if is_admissible(j))


def enumerate_admissible(d: int, max_degree: int) -> List[MultiIndex]:
    """All admissible indices with ``|j| <= max_degree``, degree-major."""
    if d < 1 or max_degree < 0:
        raise ValueError("need d >= 1 and max_degree >= 0")
    out: List[MultiIndex] = []
    for m in range(max_degree + 1):
        out.extend(admissible_of_degree(d, m))
    return out


def monomials(d: int, N: int) -> List[MultiIndex]:
    """Exponent tuples ``n >= 0`` with ``|n| <= N``, degree-major."""
    out: List[MultiIndex] = []
    for m in range(N + 1):
        out.extend(_compositions(m, d))
    return out


def path_count(j: MultiIndex) -> int:
    """Number of advancing lattice paths from the origin to ``j``.

    Equals the number of nested-integral summands making up the first
    family's formal power at ``j``.
    """
    return factorial(degree(j) // 2) // prod(factorial(v // 2) for v in j)


def x_term_count(k: MultiIndex) -> int:
    """Summand count of the second family at shifted index ``k``.

    Each of the ``d`` degree-zero starting constants contributes one path,
    so the count is ``d`` times :func:`path_count`; every summand carries a
    factor ``1/d``.
    """
    return len(k) * path_count(k)
