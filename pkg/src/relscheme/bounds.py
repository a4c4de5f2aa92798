"""Checkers and explicit-bound calculators for the diameter inequalities.

Every verdict is computed in exact integer or rational arithmetic; a
report never compares floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import relation as rel_mod
from .metrics import (
    boundary,
    directed_diameter,
    undirected_diameter,
)
from .relation import Relation
from .scheme import Scheme, in_s_union

Exact = Union[int, Fraction]

__all__ = [
    "BoundReport",
    "check_ruzsa",
    "check_comm_ind",
    "check_expansion",
    "check_expansion_half",
    "comm_bound",
    "ceil_log2_log2",
    "mains_explicit_bound",
    "mains_check",
    "check_star_ratio",
    "check_pigeonhole_doubling",
]


@dataclass(frozen=True)
class BoundReport:
    name: str
    lhs: Exact
    rhs: Exact
    holds: bool
    witness: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "holds": self.holds,
            "witness": self.witness,
        }


def _report(name: str, lhs: Exact, rhs: Exact, witness: Optional[str] = None) -> BoundReport:
    return BoundReport(name, lhs, rhs, lhs <= rhs, witness)


def check_ruzsa(a: Relation, b: Relation, c: Relation) -> BoundReport:
    """Triangle inequality for graph norms: |ac||b| <= |ab||b*c|, b regular."""
    a._same_domain(b)
    a._same_domain(c)
    bad = b.irregular_point()
    if bad is not None:
        raise ValueError(
            f"b must be regular: point {bad} has out-degree "
            f"{b.rows[bad].bit_count()} != {b.rows[0].bit_count()}"
        )
    lhs = a.product(c).norm() * b.norm()
    rhs = a.product(b).norm() * b.transpose().product(c).norm()
    return _report("ruzsa", lhs, rhs)


def check_comm_ind(scheme: Scheme, a: Relation, b: Relation) -> BoundReport:
    """Squared form of |aa*|^(1/2) |b|^(1/2) <= |ab| for S-union relations."""
    for name, r in (("a", a), ("b", b)):
        if not in_s_union(scheme, r):
            raise ValueError(f"{name} is not a union of basis classes")
    lhs = a.product(a.transpose()).norm() * b.norm()
    ab = a.product(b).norm()
    return _report("comm-ind", lhs, ab * ab)


def _expansion_preconditions(scheme: Scheme, b: Relation, T) -> set[int]:
    if not in_s_union(scheme, b):
        raise ValueError("b is not a union of basis classes")
    if not b.is_symmetric():
        raise ValueError("b must be symmetric (b = b*)")
    T = set(T)
    if not T:
        raise ValueError("T must be nonempty")
    for p in T:
        if not 0 <= p < b.n:
            raise ValueError(f"point {p} outside 0..{b.n - 1}")
    return T


def check_expansion(scheme: Scheme, b: Relation, T) -> BoundReport:
    """Vertex-expansion lower bound 2(1 - |T|/n) / (diam(b) + |T|/n).

    lhs is the predicted bound, rhs the measured ratio |boundary|/|T|,
    both exact rationals.
    """
    T = _expansion_preconditions(scheme, b, T)
    n = b.n
    d = undirected_diameter(b)
    t = Fraction(len(T), n)
    bound = 2 * (1 - t) / (d + t)
    ratio = Fraction(len(boundary(b, T)), len(T))
    return _report("expansion", bound, ratio, witness=f"|T|={len(T)} diam={d}")


def check_expansion_half(scheme: Scheme, b: Relation, T) -> BoundReport:
    """Simplified bound 2/(2 diam + 1), valid when |T| <= n/2."""
    T = _expansion_preconditions(scheme, b, T)
    if 2 * len(T) > b.n:
        raise ValueError("simplified bound needs |T| <= n/2")
    d = undirected_diameter(b)
    bound = Fraction(2, 2 * d + 1)
    ratio = Fraction(len(boundary(b, T)), len(T))
    return _report("expansion-half", bound, ratio, witness=f"|T|={len(T)} diam={d}")


def _commutativity_witness(a: Relation) -> Optional[tuple]:
    """A pair on which a a* and a* a differ, or None if they commute."""
    at = a.transpose()
    left = a.product(at)
    right = at.product(a)
    if left == right:
        return None
    for i, (r, s) in enumerate(zip(left.rows, right.rows)):
        d = r ^ s
        if d:
            return (i, (d & -d).bit_length() - 1)
    return None


def ceil_log2_log2(n: int) -> int:
    """Smallest j with 2^(2^j) >= n; matches ceil(log2 log2 n) for n >= 2.

    For n < 4 this follows the convention ceil(log2 max(1, log2 n)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    j = 0
    while (1 << (1 << j)) < n:
        j += 1
    return j


def comm_bound(scheme: Scheme, a: Relation) -> BoundReport:
    """diam->(a u 1) <= 2 diam(a) (ceil log log n + 1) for aa* = a*a."""
    if not in_s_union(scheme, a):
        raise ValueError("a is not a union of basis classes")
    w = _commutativity_witness(a)
    if w is not None:
        raise ValueError(f"a a* != a* a: relations differ at pair {w}")
    n = a.n
    d = undirected_diameter(a)
    lhs = directed_diameter(a.with_loops())
    rhs = 2 * d * (ceil_log2_log2(n) + 1)
    return _report("comm-bound", lhs, rhs, witness=f"n={n} diam={d}")


def mains_explicit_bound(d: int, n: int) -> int:
    """Explicit directed-diameter majorant 2 m (k + 1).

    k = ceil(1 + 4 d log2 n) bounds the number of steps before the norm
    growth factor drops below sqrt(1 + 1/2d); m is the smallest integer
    with (1 + 1/2d)^(m/2) > n/2, found by exact integer powering.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    # ceil(4 d log2 n) = ceil(log2 n^(4d))
    k = 1 + (n ** (4 * d) - 1).bit_length()
    # smallest m with ((2d+1)/2d)^m > (n/2)^2, i.e. 4 (2d+1)^m > n^2 (2d)^m
    m = 1
    num = 2 * d + 1
    den = 2 * d
    lhs_pow, rhs_pow = num, den
    while 4 * lhs_pow <= n * n * rhs_pow:
        m += 1
        lhs_pow *= num
        rhs_pow *= den
    return 2 * m * (k + 1)


def mains_check(scheme: Scheme, a: Relation) -> BoundReport:
    """Measured diam->(a u 1) against the explicit majorant."""
    if not in_s_union(scheme, a):
        raise ValueError("a is not a union of basis classes")
    n = a.n
    d = undirected_diameter(a)
    lhs = directed_diameter(a.with_loops())
    rhs = mains_explicit_bound(d, n)
    return _report("mains", lhs, rhs, witness=f"n={n} diam={d}")


def check_star_ratio(scheme: Scheme, a: Relation, t: Relation) -> BoundReport:
    """Growth ratio |t a a*| / |t| >= 1 + 1/(2 diam a) for |t| <= n/2.

    Requires a in S-union with the diagonal inside a (pass a with loops
    already adjoined) and t in S-union.
    """
    if not in_s_union(scheme, a):
        raise ValueError("a is not a union of basis classes")
    if not rel_mod.diagonal(a.n) <= a:
        raise ValueError("a must contain the diagonal")
    if not in_s_union(scheme, t):
        raise ValueError("t is not a union of basis classes")
    if 2 * t.norm() > a.n:
        raise ValueError("star ratio needs |t| <= n/2")
    d = undirected_diameter(a)
    lhs = 1 + Fraction(1, 2 * d)
    grown = t.product(a).product(a.transpose()).norm()
    rhs = Fraction(grown, t.norm())
    return _report("star-ratio", lhs, rhs, witness=f"diam={d}")


def check_pigeonhole_doubling(a: Relation) -> BoundReport:
    """a a = Omega x Omega for biregular a with |a| > n/2.

    lhs is the number of pairs missing from the product (0 when it holds).
    """
    if not a.is_biregular():
        raise ValueError("a must be biregular")
    n = a.n
    if 2 * a.norm() <= n:
        raise ValueError(f"need norm > n/2, got {a.norm()} <= {n}/2")
    sq = a.product(a)
    missing = n * n - sq.pair_count()
    return _report("pigeonhole-doubling", missing, 0, witness=f"norm={a.norm()} n={n}")
