"""Dense bitset relations on a finite point set.

A relation on n points is a subset of pairs (alpha, beta) with
0 <= alpha, beta < n, stored as n row bitsets: bit beta of row alpha is
set iff the pair belongs to the relation.  Rows are Python ints, so
union/intersection/product are word-parallel, and instances are
immutable and safe to share.
"""

from __future__ import annotations

import numpy as np

from .bitops import bit_indices, mask_of

__all__ = [
    "Relation",
    "empty",
    "full",
    "diagonal",
    "from_pairs",
    "parse_edge_list",
    "parse_dense",
]


class Relation:
    """A subset of {0..n-1} x {0..n-1}, one int bitset per row."""

    __slots__ = ("n", "rows", "_mask")

    def __init__(self, n: int, rows):
        if n < 1:
            raise ValueError("point set must be nonempty (n >= 1)")
        rows = tuple(rows)
        if len(rows) != n:
            raise ValueError(f"expected {n} rows, got {len(rows)}")
        mask = (1 << n) - 1
        for i, r in enumerate(rows):
            if r < 0 or r & ~mask:
                raise ValueError(f"row {i} has bits outside 0..{n - 1}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_mask", mask)

    def __setattr__(self, *a):
        raise AttributeError("Relation is immutable")

    # -- basic protocol ------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Relation)
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.n, self.rows))

    def __contains__(self, pair):
        a, b = pair
        return 0 <= a < self.n and 0 <= b < self.n and self.rows[a] >> b & 1

    def __le__(self, other):
        self._same_domain(other)
        return all(r & ~s == 0 for r, s in zip(self.rows, other.rows))

    def __repr__(self):
        return f"Relation(n={self.n}, pairs={self.pair_count()})"

    def _same_domain(self, other: "Relation"):
        if self.n != other.n:
            raise ValueError(
                f"domain mismatch: {self.n} points vs {other.n} points"
            )

    # -- set algebra ----------------------------------------------------

    def union(self, other: "Relation") -> "Relation":
        self._same_domain(other)
        return Relation(self.n, (r | s for r, s in zip(self.rows, other.rows)))

    def intersect(self, other: "Relation") -> "Relation":
        self._same_domain(other)
        return Relation(self.n, (r & s for r, s in zip(self.rows, other.rows)))

    def complement(self) -> "Relation":
        m = self._mask
        return Relation(self.n, (r ^ m for r in self.rows))

    def difference(self, other: "Relation") -> "Relation":
        self._same_domain(other)
        return Relation(self.n, (r & ~s for r, s in zip(self.rows, other.rows)))

    __or__ = union
    __and__ = intersect
    __invert__ = complement

    # -- relation algebra -------------------------------------------------

    def product(self, other: "Relation") -> "Relation":
        """Relation composition: pairs (a, b) with some g, (a,g) here, (g,b) there.

        Row sweep: for each set bit g of row a, OR row g of `other` in.
        """
        self._same_domain(other)
        orows = other.rows
        out = []
        for r in self.rows:
            acc = 0
            for g in bit_indices(r):
                acc |= orows[g]
            out.append(acc)
        return Relation(self.n, out)

    __mul__ = product

    def transpose(self) -> "Relation":
        n = self.n
        if n > 1024:
            return self._transpose_numpy()
        cols = [0] * n
        for a, r in enumerate(self.rows):
            bit = 1 << a
            for b in bit_indices(r):
                cols[b] |= bit
        return Relation(n, cols)

    def _transpose_numpy(self) -> "Relation":
        # pack rows into a uint8 matrix, transpose in chunks
        n = self.n
        nb = (n + 7) // 8
        m = np.zeros((n, nb), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            if r:
                m[i, : (r.bit_length() + 7) // 8] = np.frombuffer(
                    r.to_bytes((r.bit_length() + 7) // 8, "little"), dtype=np.uint8
                )
        bits = np.unpackbits(m, axis=1, bitorder="little", count=n)
        packed = np.packbits(bits.T, axis=1, bitorder="little")
        out = [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]
        return Relation(n, out)

    @property
    def T(self) -> "Relation":
        return self.transpose()

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    # -- degrees and norms ----------------------------------------------

    def out_degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def in_degrees(self) -> list[int]:
        return self.transpose().out_degrees()

    def norm(self) -> int:
        """Maximum out-degree over all points."""
        return max(r.bit_count() for r in self.rows)

    def is_regular(self) -> bool:
        """All out-degrees equal."""
        d = self.rows[0].bit_count()
        return all(r.bit_count() == d for r in self.rows)

    def irregular_point(self):
        """A point whose out-degree differs from point 0's, or None."""
        d = self.rows[0].bit_count()
        for i, r in enumerate(self.rows):
            if r.bit_count() != d:
                return i
        return None

    def is_biregular(self) -> bool:
        """All out-degrees and all in-degrees equal the same constant."""
        if not self.is_regular():
            return False
        d = self.rows[0].bit_count()
        return all(c == d for c in self.in_degrees())

    # -- neighborhoods and powers ------------------------------------------

    def neighborhood(self, points) -> set[int]:
        """Union of rows indexed by `points` (the set T·a)."""
        acc = 0
        for p in points:
            if not 0 <= p < self.n:
                raise ValueError(f"point {p} outside 0..{self.n - 1}")
            acc |= self.rows[p]
        return set(bit_indices(acc))

    def neighborhood_bits(self, pointmask: int) -> int:
        acc = 0
        for p in bit_indices(pointmask):
            acc |= self.rows[p]
        return acc

    def with_loops(self) -> "Relation":
        return Relation(self.n, (r | (1 << i) for i, r in enumerate(self.rows)))

    def power_with_loops(self, k: int) -> "Relation":
        """k-fold product of (self | diagonal), by repeated squaring."""
        if k < 1:
            raise ValueError("k must be >= 1")
        base = self.with_loops()
        acc = None
        sq = base
        while k:
            if k & 1:
                acc = sq if acc is None else acc.product(sq)
            k >>= 1
            if k:
                sq = sq.product(sq)
        return acc

    # -- enumeration ------------------------------------------------------

    def pairs(self):
        for a, r in enumerate(self.rows):
            for b in bit_indices(r):
                yield (a, b)

    def pair_count(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def is_empty(self) -> bool:
        return all(r == 0 for r in self.rows)

    def is_full(self) -> bool:
        m = self._mask
        return all(r == m for r in self.rows)

    def to_bool_matrix(self) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n), dtype=bool)
        for i, r in enumerate(self.rows):
            if r:
                out[i, bit_indices(r)] = True
        return out

    @staticmethod
    def from_bool_matrix(m) -> "Relation":
        m = np.asarray(m, dtype=bool)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("matrix must be square")
        packed = np.packbits(m, axis=1, bitorder="little")
        return Relation(n, (int.from_bytes(packed[i].tobytes(), "little") for i in range(n)))

    # -- text formats ----------------------------------------------------

    def to_edge_list(self) -> str:
        lines = [str(self.n)]
        lines.extend(f"{a} {b}" for a, b in self.pairs())
        return "\n".join(lines) + "\n"

    def to_dense_text(self) -> str:
        lines = [str(self.n)]
        for r in self.rows:
            lines.append("".join("1" if r >> b & 1 else "0" for b in range(self.n)))
        return "\n".join(lines) + "\n"


# -- constructors ------------------------------------------------------------


def empty(n: int) -> Relation:
    return Relation(n, (0,) * n)


def full(n: int) -> Relation:
    m = (1 << n) - 1
    return Relation(n, (m,) * n)


def diagonal(n: int) -> Relation:
    return Relation(n, (1 << i for i in range(n)))


def from_pairs(n: int, pairs) -> Relation:
    rows = [0] * n
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair ({a}, {b}) outside 0..{n - 1}")
        rows[a] |= 1 << b
    return Relation(n, rows)


def cycle(n: int) -> Relation:
    """Directed n-cycle: i -> i+1 mod n."""
    return Relation(n, (1 << ((i + 1) % n) for i in range(n)))


def from_row_masks(n: int, masks) -> Relation:
    return Relation(n, masks)


# -- parsers ------------------------------------------------------------------


def parse_edge_list(text: str) -> Relation:
    """Parse the edge-list format: first line n, then one `a b` pair per line."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("line 1: empty input, expected point count")
    try:
        n = int(lines[0].split()[0])
    except (ValueError, IndexError):
        raise ValueError(f"line 1: expected point count, got {lines[0]!r}") from None
    if n < 1:
        raise ValueError("line 1: point count must be >= 1")
    rows = [0] * n
    for ln, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise ValueError(f"line {ln}: expected `alpha beta`, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {ln}: non-integer pair {line!r}") from None
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"line {ln}: pair ({a}, {b}) outside 0..{n - 1}")
        rows[a] |= 1 << b
    return Relation(n, rows)


def parse_dense(text: str) -> Relation:
    """Parse the dense format: first line n, then n lines of 0/1 characters."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("line 1: empty input, expected point count")
    try:
        n = int(lines[0].split()[0])
    except (ValueError, IndexError):
        raise ValueError(f"line 1: expected point count, got {lines[0]!r}") from None
    if n < 1:
        raise ValueError("line 1: point count must be >= 1")
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} matrix rows, got {len(lines) - 1}")
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if len(s) != n or set(s) - {"0", "1"}:
            raise ValueError(f"line {ln}: expected {n} characters of 0/1")
        rows.append(int(s[::-1], 2))
    return Relation(n, rows)
