"""BFS-based metrics on relations viewed as directed graphs.

Unreachable pairs are marked with the sentinel UNREACHABLE (-1); every
aggregation skips the sentinel explicitly rather than treating it as a
large distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitops import bit_indices
from .relation import Relation

UNREACHABLE = -1


class ConnectivityError(ValueError):
    """Raised when an operation requires a connectivity the input lacks."""


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    dist: np.ndarray  # int32, UNREACHABLE where no directed path

    def __getitem__(self, pair):
        return int(self.dist[pair])

    def is_strongly_connected(self) -> bool:
        return bool((self.dist != UNREACHABLE).all())

    def max_finite(self) -> int:
        d = self.dist[self.dist != UNREACHABLE]
        return int(d.max())


@dataclass(frozen=True)
class GeodesicCounts:
    n: int
    p: list  # p[x][y]: number of shortest directed x->y paths, 0 if unreachable


def bfs_distances(rel: Relation, source: int) -> list[int]:
    """Distances from `source` along out-edges; UNREACHABLE where no path."""
    n = rel.n
    rows = rel.rows
    dist = [UNREACHABLE] * n
    dist[source] = 0
    seen = 1 << source
    frontier = rows[source] & ~seen
    level = 1
    while frontier:
        nxt = 0
        for v in bit_indices(frontier):
            dist[v] = level
            nxt |= rows[v]
        seen |= frontier
        frontier = nxt & ~seen
        level += 1
    return dist


def directed_distances(rel: Relation) -> DistanceMatrix:
    n = rel.n
    m = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        m[s] = bfs_distances(rel, s)
    return DistanceMatrix(n, m)


def eccentricity(rel: Relation, source: int) -> int:
    """Max distance from source; raises if some point is unreachable."""
    dist = bfs_distances(rel, source)
    ecc = 0
    for v, d in enumerate(dist):
        if d == UNREACHABLE:
            raise ConnectivityError(
                f"point {v} not reachable from point {source}"
            )
        if d > ecc:
            ecc = d
    return ecc


def is_strongly_connected(rel: Relation) -> bool:
    # reachability from 0 along out-edges and along in-edges
    n = rel.n
    if UNREACHABLE in bfs_distances(rel, 0):
        return False
    return UNREACHABLE not in bfs_distances(rel.transpose(), 0)


def directed_diameter(rel: Relation) -> int:
    """Largest directed distance over ordered pairs; needs strong connectivity."""
    best = 0
    for s in range(rel.n):
        e = eccentricity(rel, s)
        if e > best:
            best = e
    return best


def undirected_diameter(rel: Relation) -> int:
    """Directed diameter of the symmetrization a | a*."""
    sym = rel.union(rel.transpose())
    try:
        return directed_diameter(sym)
    except ConnectivityError as e:
        raise ConnectivityError(f"relation is disconnected: {e}") from None


def directed_girth(rel: Relation):
    """Length of the shortest directed cycle, or None if acyclic.

    A self-loop counts as a cycle of length 1.  Computed as
    min over edges (u, v) of dist(v, u) + 1.
    """
    n = rel.n
    for i in range(n):
        if rel.rows[i] >> i & 1:
            return 1
    rev = rel.transpose()
    best = None
    for v in range(n):
        # dist from v back to each in-neighbor u of v, i.e. rev-BFS targets
        if rel.rows[v] == 0:
            continue
        dist = bfs_distances(rel, v)
        incoming = rev.rows[v]
        for u in bit_indices(incoming):
            d = dist[u]
            if d != UNREACHABLE and (best is None or d + 1 < best):
                best = d + 1
                if best == 2:
                    return 2
    return best


def boundary(rel: Relation, points) -> set[int]:
    """Vertices outside T adjacent in the symmetric relation to T."""
    T = set(points)
    if not T:
        raise ValueError("T must be nonempty")
    if not rel.is_symmetric():
        raise ValueError("boundary requires a symmetric relation (b = b*)")
    return rel.neighborhood(T) - T


def geodesic_counts(rel: Relation) -> GeodesicCounts:
    """Counts of shortest directed paths between all ordered pairs.

    Standard BFS DAG counting: p(x,y) = sum of p(x,u) over in-neighbors u
    of y one level closer to x.  Exact (Python ints).
    """
    n = rel.n
    rev = rel.transpose()
    table = []
    for s in range(n):
        dist = bfs_distances(rel, s)
        p = [0] * n
        p[s] = 1
        order = sorted((d, v) for v, d in enumerate(dist) if d != UNREACHABLE)
        for d, v in order:
            if d == 0:
                continue
            acc = 0
            for u in bit_indices(rev.rows[v]):
                if dist[u] == d - 1:
                    acc += p[u]
            p[v] = acc
        table.append(p)
    return GeodesicCounts(n, table)


def through_vertex_count(rel: Relation, z: int) -> Fraction:
    """Sum over pairs (x, y) of (geodesics through z) / (all geodesics).

    Exact rational.  Requires a symmetric connected relation.
    """
    if not rel.is_symmetric():
        raise ValueError("through_vertex_count requires a symmetric relation")
    n = rel.n
    dm = directed_distances(rel)
    if not dm.is_strongly_connected():
        raise ConnectivityError("relation is disconnected")
    gc = geodesic_counts(rel)
    d = dm.dist
    p = gc.p
    total = Fraction(0)
    for x in range(n):
        dxz = int(d[x, z])
        pxz = p[x][z]
        for y in range(n):
            if dxz + int(d[z, y]) == int(d[x, y]):
                total += Fraction(pxz * p[z][y], p[x][y])
    return total


def distance_plus_one_sum(rel: Relation) -> int:
    """Sum over all ordered pairs of (distance + 1); requires connectivity."""
    dm = directed_distances(rel)
    if not dm.is_strongly_connected():
        raise ConnectivityError("relation is disconnected")
    return int((dm.dist + 1).sum())
