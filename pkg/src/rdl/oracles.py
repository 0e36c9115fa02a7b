"""Brute-force reference answers for small views.

These deliberately share no code with the subset DP or the DFS engines: they
enumerate vertex orderings and set partitions directly. Only usable for a
handful of vertices.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Iterator

from rdl.colouring import PrefixView
from rdl.paths import DirectedPath


def _edge_set(view: PrefixView, colour: int) -> frozenset:
    return frozenset(view.edges(colour))


def _is_path(edges: frozenset, seq) -> bool:
    return all((a, b) in edges for a, b in zip(seq, seq[1:]))


def longest_path_by_permutations(view: PrefixView, colour: int) -> DirectedPath:
    """Lexicographically least longest path, scanning k-permutations from k = n down."""
    vs = view.vertices
    edges = _edge_set(view, colour)
    for k in range(len(vs), 0, -1):
        for seq in permutations(vs, k):
            if _is_path(edges, seq):
                return DirectedPath(seq, colour)
    return DirectedPath((), colour)


def longest_from_by_enumeration(view: PrefixView, colour: int, v: int) -> int:
    """Longest path from v, enumerating every simple path by plain recursion."""

    def grow(path: list[int]) -> int:
        best = len(path) - 1
        for u in view.vertices:
            if u not in path and view.colour(path[-1], u) == colour:
                path.append(u)
                best = max(best, grow(path))
                path.pop()
        return best

    return grow([v])


def set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [(head,)] + part
        for i in range(len(part)):
            yield part[:i] + [(head,) + part[i]] + part[i + 1:]


def min_cover_by_partitions(view: PrefixView, colour: int) -> tuple[int, tuple[int, ...]]:
    """(minimum number of paths, lexicographically least sorted start tuple among minima)."""

    edges = _edge_set(view, colour)

    @lru_cache(maxsize=None)
    def starts(block: frozenset) -> frozenset:
        return frozenset(seq[0] for seq in permutations(sorted(block)) if _is_path(edges, seq))

    best: tuple[int, tuple[int, ...]] | None = None
    for part in set_partitions(view.vertices):
        firsts = []
        for block in part:
            s = starts(frozenset(block))
            if not s:
                break
            firsts.append(min(s))
        else:
            cand = (len(part), tuple(sorted(firsts)))
            if best is None or cand < best:
                best = cand
    assert best is not None
    return best
