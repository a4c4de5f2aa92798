"""Bit-level helpers for row bitsets stored as Python ints."""

_BYTE_BITS = tuple(
    tuple(j for j in range(8) if b >> j & 1) for b in range(256)
)


def bit_indices(x: int) -> list[int]:
    """Indices of set bits of x, ascending."""
    if x == 0:
        return []
    if x.bit_length() <= 256:
        out = []
        while x:
            lsb = x & -x
            out.append(lsb.bit_length() - 1)
            x ^= lsb
        return out
    # wide rows: one C-level conversion, then a byte-table walk
    out = []
    nb = (x.bit_length() + 7) // 8
    for i, byte in enumerate(x.to_bytes(nb, "little")):
        if byte:
            base = i << 3
            for j in _BYTE_BITS[byte]:
                out.append(base + j)
    return out


def iter_bits(x: int):
    """Yield indices of set bits of x, ascending."""
    while x:
        lsb = x & -x
        yield lsb.bit_length() - 1
        x ^= lsb


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m
