"""Homogeneous coherent configurations (schemes).

A scheme is a partition of Omega x Omega into basis relations that
contains the diagonal, is closed under transposition, and has constant
triple-intersection numbers.  Constructors: pair orbits of a transitive
permutation group, and the coarsest stable refinement of a seed pair
coloring (2-dimensional WL).  Both certify the axioms before returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import relation as rel_mod
from .bitops import bit_indices
from .metrics import UNREACHABLE, directed_distances
from .relation import Relation

__all__ = [
    "Scheme",
    "SchemeViolation",
    "SchemeCheck",
    "verify_scheme",
    "pair_orbit_scheme",
    "wl_closure",
    "WLResult",
    "in_s_union",
    "distance_partition_in_s_union",
    "path_count_invariance_check",
    "IntransitiveGroupError",
    "parse_generators",
    "identity_perm",
    "perm_inverse",
    "perm_compose",
    "is_permutation",
    "point_orbit",
    "random_s_union",
]


# -- permutations -------------------------------------------------------------


def is_permutation(images) -> bool:
    n = len(images)
    seen = [False] * n
    for v in images:
        if not 0 <= v < n or seen[v]:
            return False
        seen[v] = True
    return True


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def perm_inverse(p) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def perm_compose(p, q) -> tuple:
    """Apply p, then q."""
    return tuple(q[v] for v in p)


def point_orbit(n: int, generators, start: int = 0) -> set[int]:
    orbit = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in generators:
            y = g[x]
            if y not in orbit:
                orbit.add(y)
                stack.append(y)
    return orbit


class IntransitiveGroupError(ValueError):
    pass


def parse_generators(text: str):
    """Generator file: first line n, then one generator per line (n images)."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("line 1: empty input, expected point count")
    try:
        n = int(lines[0].split()[0])
    except ValueError:
        raise ValueError(f"line 1: expected point count, got {lines[0]!r}") from None
    gens = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != n:
            raise ValueError(f"line {ln}: expected {n} images, got {len(parts)}")
        try:
            images = tuple(int(x) for x in parts)
        except ValueError:
            raise ValueError(f"line {ln}: non-integer image") from None
        if not is_permutation(images):
            raise ValueError(f"line {ln}: not a bijection on 0..{n - 1}")
        gens.append(images)
    if not gens:
        raise ValueError("no generators given")
    return n, gens


# -- the scheme object ---------------------------------------------------------


@dataclass(frozen=True)
class SchemeViolation:
    kind: str  # partition | diagonal | transpose | constants
    detail: str
    triple: Optional[tuple] = None  # (a, b, c) basis indices for axiom-3 failures
    pairs: Optional[tuple] = None   # two witness pairs with different counts

    def __str__(self):
        return f"{self.kind}: {self.detail}"


class Scheme:
    """A certified homogeneous coherent configuration.

    color[a, b] is the basis-relation index of the pair (a, b); the
    diagonal is the single class `diagonal_color`.
    """

    def __init__(self, n: int, color: np.ndarray, transpose_map, diagonal_color: int):
        self.n = n
        self.color = color
        self.rank = int(color.max()) + 1
        self.transpose_map = tuple(transpose_map)
        self.diagonal_color = diagonal_color
        self._basis_cache: dict[int, Relation] = {}
        self._sc: Optional[np.ndarray] = None
        # flat class index, reused by membership and constancy checks
        flat = color.ravel()
        self._order = np.argsort(flat, kind="stable")
        self._sizes = np.bincount(flat, minlength=self.rank)
        self._starts = np.concatenate(([0], np.cumsum(self._sizes)))

    def __repr__(self):
        return f"Scheme(n={self.n}, rank={self.rank})"

    def basis_relation(self, i: int) -> Relation:
        if i not in self._basis_cache:
            if not 0 <= i < self.rank:
                raise ValueError(f"basis index {i} outside 0..{self.rank - 1}")
            self._basis_cache[i] = Relation.from_bool_matrix(self.color == i)
        return self._basis_cache[i]

    def basis_relations(self):
        return [self.basis_relation(i) for i in range(self.rank)]

    def union_of(self, indices) -> Relation:
        mask = np.isin(self.color, np.asarray(sorted(set(indices))))
        return Relation.from_bool_matrix(mask)

    def class_size(self, i: int) -> int:
        return int(self._sizes[i])

    def structure_constants(self) -> np.ndarray:
        """Tensor sc[b, c, a] = number of g with (x,g) in b, (g,y) in c, for (x,y) in a."""
        if self._sc is None:
            r = self.rank
            mats = np.stack([(self.color == i).astype(np.float64) for i in range(r)])
            sc = np.zeros((r, r, r), dtype=np.int64)
            reps = [int(self._order[self._starts[a]]) for a in range(r)]
            rep_idx = np.array(reps)
            for b in range(r):
                prods = np.matmul(mats[b], mats)  # (r, n, n)
                flat = prods.reshape(r, -1)
                sc[b, :, :] = np.rint(flat[:, rep_idx]).astype(np.int64)
            self._sc = sc
        return self._sc

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "rank": self.rank,
            "color_matrix": [int(c) for c in self.color.ravel()],
            "transpose_map": list(self.transpose_map),
        }


@dataclass
class SchemeCheck:
    ok: bool
    scheme: Optional[Scheme] = None
    violation: Optional[SchemeViolation] = None


def _color_from_basis(basis) -> Optional[np.ndarray]:
    n = basis[0].n
    color = np.full((n, n), -1, dtype=np.int32)
    for i, r in enumerate(basis):
        m = r.to_bool_matrix()
        if (color[m] != -1).any():
            return None
        color[m] = i
    if (color == -1).any():
        return None
    return color


def verify_scheme(basis, sample: int = 0) -> SchemeCheck:
    """Check the scheme axioms for a list of relations.

    Returns a structured result; on failure the violation names the first
    offending triple and a pair of witnesses.  With sample > 0 only that
    many random (b, c) products are checked (not a certificate); the
    default is the exhaustive check.
    """
    if not basis:
        return SchemeCheck(False, violation=SchemeViolation("partition", "no relations given"))
    n = basis[0].n
    for r in basis:
        if r.n != n:
            return SchemeCheck(False, violation=SchemeViolation("partition", "mixed domains"))
        if r.is_empty():
            return SchemeCheck(False, violation=SchemeViolation("partition", "empty basis relation"))
    color = _color_from_basis(basis)
    if color is None:
        return SchemeCheck(
            False, violation=SchemeViolation("partition", "relations do not partition Omega x Omega")
        )

    # axiom 1: the diagonal is one of the classes
    diag_colors = {int(color[i, i]) for i in range(n)}
    if len(diag_colors) != 1:
        return SchemeCheck(
            False,
            violation=SchemeViolation("diagonal", f"diagonal splits into classes {sorted(diag_colors)}"),
        )
    dc = diag_colors.pop()
    if basis[dc].pair_count() != n:
        return SchemeCheck(
            False,
            violation=SchemeViolation("diagonal", f"class {dc} strictly contains the diagonal"),
        )

    # axiom 2: transpose closure
    rank = len(basis)
    index = {b.rows: i for i, b in enumerate(basis)}
    tmap = []
    for i, b in enumerate(basis):
        t = b.transpose()
        j = index.get(t.rows)
        if j is None:
            return SchemeCheck(
                False,
                violation=SchemeViolation("transpose", f"transpose of class {i} is not a class"),
            )
        tmap.append(j)

    scheme = Scheme(n, color, tmap, dc)

    # axiom 3: constant triple-intersection numbers.
    # count matrix for (b, c) is the integer product A_b A_c; it must be
    # constant on every class.  float64 matmul is exact (counts <= n < 2^53).
    rng = np.random.default_rng(0)
    mats = np.stack([(color == i).astype(np.float64) for i in range(rank)])
    order, starts = scheme._order, scheme._starts
    if sample > 0:
        bc_pairs = [tuple(p) for p in rng.integers(0, rank, size=(sample, 2))]
    else:
        bc_pairs = [(b, c) for b in range(rank) for c in range(rank)]
    for b, c in bc_pairs:
        m = (mats[b] @ mats[c]).ravel()
        vals = m[order]
        lo = np.minimum.reduceat(vals, starts[:-1])
        hi = np.maximum.reduceat(vals, starts[:-1])
        bad = np.nonzero(lo != hi)[0]
        if bad.size:
            a = int(bad[0])
            seg = vals[starts[a]:starts[a + 1]]
            i_lo = int(order[starts[a] + int(np.argmin(seg))])
            i_hi = int(order[starts[a] + int(np.argmax(seg))])
            p1, p2 = divmod(i_lo, n), divmod(i_hi, n)
            return SchemeCheck(
                False,
                violation=SchemeViolation(
                    "constants",
                    f"count for (b={b}, c={c}) varies on class {a}: "
                    f"{int(seg.min())} at {p1} vs {int(seg.max())} at {p2}",
                    triple=(a, b, c),
                    pairs=(p1, p2),
                ),
            )
    return SchemeCheck(True, scheme=scheme)


# -- constructors ---------------------------------------------------------------


def pair_orbit_scheme(n: int, generators, certify: bool = True) -> Scheme:
    """Scheme whose classes are the orbits of the generated group on pairs.

    The group must be transitive on points; otherwise the configuration is
    not homogeneous and IntransitiveGroupError is raised.
    """
    for g in generators:
        if len(g) != n or not is_permutation(g):
            raise ValueError("generators must be bijections on 0..n-1")
    orb = point_orbit(n, generators, 0)
    if len(orb) != n:
        raise IntransitiveGroupError(
            f"group is intransitive: orbit of 0 has size {len(orb)} < {n}"
        )
    color = np.full((n, n), -1, dtype=np.int32)
    nxt = 0
    for a in range(n):
        for b in range(n):
            if color[a, b] != -1:
                continue
            color[a, b] = nxt
            stack = [(a, b)]
            while stack:
                x, y = stack.pop()
                for g in generators:
                    p = (g[x], g[y])
                    if color[p] == -1:
                        color[p] = nxt
                        stack.append(p)
            nxt += 1
    basis = [Relation.from_bool_matrix(color == i) for i in range(nxt)]
    if certify:
        check = verify_scheme(basis)
        if not check.ok:
            raise AssertionError(f"pair-orbit construction failed axioms: {check.violation}")
        return check.scheme
    dc = int(color[0, 0])
    tmap = [int(color[tuple(np.argwhere(color == i)[0][::-1])]) for i in range(nxt)]
    return Scheme(n, color, tmap, dc)


@dataclass
class WLResult:
    homogeneous: bool
    scheme: Optional[Scheme]
    color: np.ndarray
    rounds: int
    seed_in_s_union: list = field(default_factory=list)


def wl_closure(seeds, certify: bool = True) -> WLResult:
    """Coarsest pair coloring refining {seed cells, diagonal} stable under
    one-step refinement by intermediate-point color-pair multisets.

    Colors are canonicalized every round by sorting signatures, so the
    result is deterministic.  If the stable coloring splits the diagonal
    the configuration is not homogeneous and no Scheme is returned.
    """
    if not seeds:
        raise ValueError("need at least one seed relation")
    n = seeds[0].n
    for s in seeds:
        if s.n != n:
            raise ValueError("seed relations must share a domain")

    # initial coloring: diagonal flag + seed membership pattern
    key = np.zeros((n, n), dtype=np.int64)
    for s in seeds:
        key = key * 2 + s.to_bool_matrix()
    key = key * 2 + np.eye(n, dtype=np.int64)
    _, color = np.unique(key, return_inverse=True)
    color = color.reshape(n, n).astype(np.int32)

    rounds = 0
    while True:
        rank = int(color.max()) + 1
        # signature of (a, b): old color + sorted multiset of
        # (color(a, g), color(g, b)) over g
        sigs = {}
        new_ids = np.empty((n, n), dtype=np.int32)
        sig_list = []
        for a in range(n):
            codes = color[a, :][:, None].astype(np.int64) * rank + color  # (g, b)
            codes.sort(axis=0)
            for b in range(n):
                sig = (int(color[a, b]), codes[:, b].tobytes())
                idx = sigs.get(sig)
                if idx is None:
                    idx = len(sig_list)
                    sigs[sig] = idx
                    sig_list.append(sig)
                new_ids[a, b] = idx
        rounds += 1
        new_rank = len(sig_list)
        # canonical renumbering: sort signatures (old color first keeps refinement)
        perm = sorted(range(new_rank), key=lambda i: sig_list[i])
        remap = np.empty(new_rank, dtype=np.int32)
        for newc, old in enumerate(perm):
            remap[old] = newc
        new_color = remap[new_ids]
        if new_rank == rank:
            color = new_color
            break
        color = new_color

    diag = {int(color[i, i]) for i in range(n)}
    if len(diag) > 1:
        return WLResult(False, None, color, rounds)

    rank = int(color.max()) + 1
    basis = [Relation.from_bool_matrix(color == i) for i in range(rank)]
    if certify:
        check = verify_scheme(basis)
        if not check.ok:
            raise AssertionError(f"stable coloring failed axioms: {check.violation}")
        scheme = check.scheme
    else:
        dc = int(color[0, 0])
        index = {b.rows: i for i, b in enumerate(basis)}
        tmap = [index[b.transpose().rows] for b in basis]
        scheme = Scheme(n, color, tmap, dc)
    membership = [in_s_union(scheme, s) for s in seeds]
    return WLResult(True, scheme, color, rounds, membership)


# -- S-union queries -------------------------------------------------------------


def in_s_union(scheme: Scheme, rel: Relation) -> bool:
    """True iff rel is a union of basis classes."""
    if rel.n != scheme.n:
        raise ValueError("domain mismatch")
    sel = rel.to_bool_matrix().ravel()
    inside = np.bincount(scheme.color.ravel()[sel], minlength=scheme.rank)
    return bool(((inside == 0) | (inside == scheme._sizes)).all())


def s_union_classes(scheme: Scheme, rel: Relation) -> list[int]:
    sel = rel.to_bool_matrix().ravel()
    inside = np.bincount(scheme.color.ravel()[sel], minlength=scheme.rank)
    if not ((inside == 0) | (inside == scheme._sizes)).all():
        raise ValueError("relation is not a union of basis classes")
    return [i for i in range(scheme.rank) if inside[i]]


def distance_partition_in_s_union(scheme: Scheme, b: Relation) -> bool:
    """Whether every distance-i graph of b lies in S-union.

    Preconditions (checked): b in S-union, b symmetric, b connected.
    Equivalent formulation used here: the distance is constant on every
    basis class.
    """
    if not in_s_union(scheme, b):
        raise ValueError("b is not in S-union")
    if not b.is_symmetric():
        raise ValueError("b must be symmetric")
    dm = directed_distances(b)
    if not dm.is_strongly_connected():
        raise ValueError("b must be connected")
    d = dm.dist.ravel()[scheme._order].astype(np.int64)
    starts = scheme._starts[:-1]
    lo = np.minimum.reduceat(d, starts)
    hi = np.maximum.reduceat(d, starts)
    return bool((lo == hi).all())


def path_count_invariance_check(scheme: Scheme, chain, r: int) -> bool:
    """Whether the number of colored tuples is constant over the class r.

    chain = [r_1, ..., r_{m-1}] prescribes the class of each consecutive
    pair in tuples (v_1, ..., v_m); counts are taken over all (u, w) in
    class r with v_1 = u, v_m = w.  Exact integer matrix products.
    """
    if len(chain) < 1:
        raise ValueError("chain must have length >= 1")
    for i in chain:
        if not 0 <= i < scheme.rank:
            raise ValueError(f"chain index {i} outside 0..{scheme.rank - 1}")
    acc = (scheme.color == chain[0]).astype(np.int64)
    for i in chain[1:]:
        acc = acc @ (scheme.color == i).astype(np.int64)
    vals = acc.ravel()[scheme._order]
    s, e = scheme._starts[r], scheme._starts[r + 1]
    seg = vals[s:e]
    return bool((seg == seg[0]).all())


def random_s_union(scheme: Scheme, rng, nonempty: bool = True) -> Relation:
    """Random union of basis classes (each class in or out with prob 1/2)."""
    while True:
        picks = [i for i in range(scheme.rank) if rng.random() < 0.5]
        if picks or not nonempty:
            return scheme.union_of(picks)
