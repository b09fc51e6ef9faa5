"""Partition enumerators for the sums over Bethe-parameter subsets, and memo keys.

Everything here works on indices; callers bind indices to parameter values.
All enumerators are lazy.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, NamedTuple, Sequence


@dataclass(frozen=True)
class Bipartition:
    part_I: tuple[int, ...]
    part_II: tuple[int, ...]

    def split(self, values: Sequence) -> tuple[tuple, tuple]:
        return tuple(values[i] for i in self.part_I), tuple(values[i] for i in self.part_II)


def bipartitions(n: int, size: int | None = None) -> Iterator[Bipartition]:
    """All splits of range(n) into (I, II); restricted to #I == size if given."""
    sizes = range(n + 1) if size is None else (size,)
    full = range(n)
    for k in sizes:
        for chosen in combinations(full, k):
            rest = tuple(i for i in full if i not in chosen)
            yield Bipartition(chosen, rest)


def enum_sum_partitions(r: Sequence[int]) -> Iterator[tuple[tuple[Bipartition, Bipartition], ...]]:
    """Joint splits of s and t, color by color, with #s_I == #t_I in every color.

    Yields one tuple per joint partition holding a ``(s_split, t_split)``
    pair for each color.  The count is prod_k binomial(2 r_k, r_k).
    """
    if any(n < 0 for n in r):
        raise ValueError("cardinalities must be non-negative")

    def per_color(n):
        for k in range(n + 1):
            for sp in bipartitions(n, k):
                for tp in bipartitions(n, k):
                    yield sp, tp

    # product() materializes its inputs, so nest generators instead
    def rec(colors):
        if not colors:
            yield ()
            return
        for head in per_color(colors[0]):
            for tail in rec(colors[1:]):
                yield (head,) + tail

    yield from rec(tuple(r))


def enum_all_bipartitions(r: Sequence[int]) -> Iterator[tuple[Bipartition, ...]]:
    """Unrestricted splits of every color (the coproduct sums)."""
    def rec(colors):
        if not colors:
            yield ()
            return
        for head in bipartitions(colors[0]):
            for tail in rec(colors[1:]):
                yield (head,) + tail

    yield from rec(tuple(r))


class RecursionChainPartition(NamedTuple):
    depth: int
    picks: tuple[int, ...]


def enum_recursion_partitions(choices: Sequence[int]) -> Iterator[RecursionChainPartition]:
    """Singleton chains through consecutive colors.

    ``choices[k]`` is the number of ways to pick the single element of the
    k-th color along the chain (the set size, or a product of sizes when
    two sets are cut at once).  Depth d picks one element in each of the first
    d colors; the first color with no choices blocks every deeper chain.
    """
    for depth in range(len(choices) + 1):
        if depth and choices[depth - 1] == 0:
            return
        for picks in product(*(range(c) for c in choices[:depth])):
            yield RecursionChainPartition(depth, picks)


def multiset_key(level: int, params: Sequence[Sequence], orientation: str, sort_key=None) -> tuple:
    """Canonical, hashable key: order inside a color is irrelevant, color order is not."""
    if orientation not in ("q", "q_inv"):
        raise ValueError("orientation must be 'q' or 'q_inv'")
    return (
        level,
        orientation,
        tuple(tuple(sorted(color, key=sort_key)) for color in params),
    )
