"""Integer partitions and Young-diagram node calculus.

Partitions index the graded bases of every level space in this package and
the summation sets of the exact series identities.  The enumeration order is
fixed (reverse lexicographic, largest first) so that bases, seed lists and
reports are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple


class Node(NamedTuple):
    """A cell of a Young diagram; row and column are 1-based."""

    row: int
    col: int


@dataclass(frozen=True)
class Partition:
    """A weakly decreasing tuple of positive integers."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        prev = None
        for p in self.parts:
            if not isinstance(p, int) or p < 1:
                raise ValueError("parts must be positive integers, got %r" % (p,))
            if prev is not None and p > prev:
                raise ValueError("parts must be weakly decreasing")
            prev = p

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def contains(self, node) -> bool:
        """Whether the cell (row, col) lies inside the diagram."""
        row, col = node
        return 1 <= row <= len(self.parts) and 1 <= col <= self.parts[row - 1]


def _descending_parts(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _descending_parts(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> tuple[Partition, ...]:
    """All partitions of n in reverse lexicographic order, (n) first.

    The empty partition is the sole partition of 0.  Negative n is a usage
    error.
    """
    if n < 0:
        raise ValueError("cannot partition a negative integer")
    return tuple(Partition(parts) for parts in _descending_parts(n, n))


def enumerate_pairs(n: int) -> tuple[tuple[Partition, Partition], ...]:
    """All ordered pairs (lam, mu) with |lam| + |mu| = n.

    First component's size ascends from 0 to n; within a size class the
    reverse lexicographic order of enumerate_partitions applies to each slot.
    """
    if n < 0:
        raise ValueError("cannot partition a negative integer")
    out = []
    for k in range(n + 1):
        for lam in enumerate_partitions(k):
            for mu in enumerate_partitions(n - k):
                out.append((lam, mu))
    return tuple(out)


def nodes(lam: Partition) -> list[Node]:
    """The cells of the diagram, row by row, columns left to right."""
    return [Node(a, b) for a, row in enumerate(lam.parts, start=1)
            for b in range(1, row + 1)]


def node_weight(node: Node, q1: complex, q3: complex) -> complex:
    """Multiplicative weight q3^(row-1) * q1^(col-1) of a diagram cell."""
    return (q3 ** (node.row - 1)) * (q1 ** (node.col - 1))


def partitions_up_to(max_size: int) -> Iterator[Partition]:
    """All partitions with size <= max_size, sizes ascending."""
    for n in range(max_size + 1):
        yield from enumerate_partitions(n)
