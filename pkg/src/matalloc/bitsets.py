"""Bitmask subsets and small integer-vector helpers.

Ground sets are 0..n-1; subsets are Python int bitmasks (arbitrary width,
canonical for n <= 64 per the data model). Vectors over a ground set are
plain tuples indexed by element.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def elements(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def size(mask: int) -> int:
    return mask.bit_count()


def submasks(mask: int) -> Iterator[int]:
    """All submasks of mask, descending from mask to 0 (0 included)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def full_mask(n: int) -> int:
    return (1 << n) - 1


def check_subset(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ValueError(f"subset 0b{mask:b} out of range for ground set of size {n}")


def vec_sum(vec, mask: int):
    """x(S): sum of vector entries over the elements of mask."""
    total = 0
    for e in bits(mask):
        total += vec[e]
    return total


def vec_support(vec) -> int:
    m = 0
    for e, v in enumerate(vec):
        if v:
            m |= 1 << e
    return m


def indicator(mask: int, n: int, value=1) -> tuple:
    """The vector value * 1_mask as a tuple of length n."""
    return tuple(value if (mask >> e) & 1 else 0 for e in range(n))
