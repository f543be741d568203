"""Subsets of a small finite carrier stored as integer bit masks.

Element ``i`` of the carrier is present in a mask ``m`` iff ``m >> i & 1``.
Masks are plain ints so they hash, compare and union for free.
"""

from typing import Iterable, Iterator

#: Default cap on carrier size. Exhaustive checks are the bottleneck long
#: before masks get wide, so this is a sanity limit rather than a hard one.
MAX_CARRIER = 64


def from_elements(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        if e < 0:
            raise ValueError(f"negative element index {e}")
        mask |= 1 << e
    return mask


def singleton(e: int) -> int:
    return 1 << e


def elements(mask: int) -> Iterator[int]:
    """Yield the members of ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def size(mask: int) -> int:
    return bin(mask).count("1")


def is_singleton(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def only(mask: int) -> int:
    """The unique member of a singleton mask."""
    if not is_singleton(mask):
        raise ValueError(f"mask {mask:#b} is not a singleton")
    return mask.bit_length() - 1


def contains(mask: int, e: int) -> bool:
    return (mask >> e) & 1 == 1


def issubset(a: int, b: int) -> bool:
    return a & ~b == 0


def full(n: int) -> int:
    return (1 << n) - 1


def lowest(mask: int) -> int:
    """Smallest member of a nonempty mask."""
    if mask == 0:
        raise ValueError("empty mask has no lowest member")
    return (mask & -mask).bit_length() - 1
