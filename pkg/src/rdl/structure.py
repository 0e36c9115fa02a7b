"""Recognising the c_r pattern in a 2-coloured view.

The pattern on ordered classes C_0 < ... < C_{r-1}: inside a class both
directions are blue, edges from a lower class to a higher one are blue and the
reverse edges are red.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from rdl.colouring import BLUE, RED, PrefixView
from rdl.errors import NotCrStructure, RedPathTooLong
from rdl.paths import LevelPartition, scan_levels


class Violation(NamedTuple):
    edge: tuple[int, int]
    expected: int
    actual: int

    def to_line(self) -> str:
        m, n = self.edge
        return f"({m},{n}) expected={self.expected} actual={self.actual}"


@dataclass(frozen=True)
class PatternReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_lines(self) -> list[str]:
        return [v.to_line() for v in self.violations]


@dataclass(frozen=True)
class CrStructure:
    exceptional: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return len(self.classes)

    def to_lines(self) -> list[str]:
        lines = ["U: " + " ".join(map(str, self.exceptional))]
        lines += [f"class {i}: " + " ".join(map(str, c)) for i, c in enumerate(self.classes)]
        return [line.rstrip() for line in lines]


def _class_index(view: PrefixView, classes, exclude) -> tuple[np.ndarray, np.ndarray]:
    exclude = set(exclude)
    owner: dict[int, int] = {}
    for i, cls in enumerate(classes):
        for v in cls:
            if v not in view:
                raise ValueError(f"malformed partition: vertex {v} not in view")
            if v in exclude:
                raise ValueError(f"malformed partition: vertex {v} is excluded")
            if v in owner:
                raise ValueError(f"malformed partition: vertex {v} in two classes")
            owner[v] = i
    missing = [v for v in view.vertices if v not in exclude and v not in owner]
    if missing:
        raise ValueError(f"malformed partition: vertex {missing[0]} not covered")
    kept = [v for v in view.vertices if v in owner]
    idx = np.array([view.index(v) for v in kept], dtype=np.int64)
    cls = np.array([owner[v] for v in kept], dtype=np.int64)
    return idx, cls


def pattern_check(view: PrefixView, classes: Sequence[Iterable[int]],
                  exclude: Iterable[int] = ()) -> PatternReport:
    """Compare every retained ordered pair with the c_r pattern for ``classes``."""
    idx, cls = _class_index(view, classes, exclude)
    if idx.size < 2:
        return PatternReport(())
    actual = view.colours[np.ix_(idx, idx)]
    expected = np.where(cls[:, None] > cls[None, :], RED, BLUE).astype(np.int8)
    bad = actual != expected
    np.fill_diagonal(bad, False)
    vs = view.vertices
    found = tuple(
        Violation((vs[idx[i]], vs[idx[j]]), int(expected[i, j]), int(actual[i, j]))
        for i, j in np.argwhere(bad).tolist()
    )
    return PatternReport(found)


def claim1_check(view: PrefixView, partition: LevelPartition) -> int | None:
    """First vertex at level i with more than i in-neighbours (in the partition's colour) at level i.

    Returns None when every vertex satisfies the bound.
    """
    levels = partition.levels
    for v, lv in levels.items():
        same = sum(1 for u in view.in_neighbours(v, partition.colour) if levels.get(u) == lv)
        if same > lv:
            return v
    return None


# -- exact minimum hitting set -------------------------------------------------

def _packing_bound(sets: Sequence[frozenset]) -> int:
    used: set = set()
    count = 0
    for s in sorted(sets, key=len):
        if used.isdisjoint(s):
            used |= s
            count += 1
    return count


def _lp_bound(sets: Sequence[frozenset]) -> int:
    """Ceiling of the fractional hitting-set optimum, a lower bound on the integral one."""
    verts = sorted(set().union(*sets))
    col = {v: i for i, v in enumerate(verts)}
    rows = np.zeros((len(sets), len(verts)))
    for i, s in enumerate(sets):
        rows[i, [col[v] for v in s]] = -1.0
    res = linprog(np.ones(len(verts)), A_ub=rows, b_ub=-np.ones(len(sets)), bounds=(0, 1),
                  method="highs")
    if res.status != 0:
        return 0
    return math.ceil(res.fun - 1e-6)


def _feasible(sets: list[frozenset], k: int) -> bool:
    """Is there a set of at most k vertices meeting every member of ``sets``?"""
    if not sets:
        return True
    if k <= 0 or any(not s for s in sets):
        return False
    pair_nbrs: dict[int, set[int]] = {}
    for s in sets:
        if len(s) == 2:
            a, b = s
            pair_nbrs.setdefault(a, set()).add(b)
            pair_nbrs.setdefault(b, set()).add(a)
    # a vertex in more than k pairs must be taken, or its k+ partners would be
    forced = [v for v, nb in pair_nbrs.items() if len(nb) > k]
    if forced:
        v = min(forced)
        return _feasible([s for s in sets if v not in s], k - 1)
    if _packing_bound(sets) > k:
        return False
    if pair_nbrs:
        v = max(sorted(pair_nbrs), key=lambda x: len(pair_nbrs[x]))
        nbrs = pair_nbrs[v]
        if len(nbrs) >= 2:
            if _feasible([s for s in sets if v not in s], k - 1):
                return True
            if len(nbrs) > k:
                return False
            rest = [s - {v} for s in sets if nbrs.isdisjoint(s)]
            return _feasible(rest, k - len(nbrs))
    pivot = min(sets, key=lambda s: (len(s), sorted(s)))
    tried: set = set()
    for x in sorted(pivot):
        branch = [s - tried for s in sets if x not in s]
        if _feasible(branch, k - 1):
            return True
        tried.add(x)
    return False


def _hitting_sets(family: Sequence[frozenset], k: int) -> Iterator[tuple[int, ...]]:
    """Hitting sets of exactly k vertices drawn from the members, in lexicographic order.

    Vertices are decided in increasing order, include before exclude, so the
    sorted tuples come out lexicographically; branches that cannot be
    completed within k are cut with ``_feasible``.
    """
    verts = sorted(set().union(*family)) if family else []

    def walk(i: int, chosen: list[int], unhit: list[frozenset], excluded: frozenset):
        if not unhit:
            if len(chosen) == k:
                yield tuple(chosen)
            return
        if len(chosen) == k or i == len(verts):
            return
        if not _feasible([s - excluded for s in unhit], k - len(chosen)):
            return
        v = verts[i]
        chosen.append(v)
        yield from walk(i + 1, chosen, [s for s in unhit if v not in s], excluded)
        chosen.pop()
        yield from walk(i + 1, chosen, unhit, excluded | {v})

    if k == 0:
        if not family:
            yield ()
        return
    yield from walk(0, [], list(family), frozenset())


def _first_hitting_set(family, limit: int, banned=()) -> tuple[int, ...] | None:
    """Least hitting set by (size, lexicographic order) that contains no banned set."""
    family = sorted(set(family), key=lambda s: (len(s), sorted(s)))
    if any(not s for s in family):
        return None
    start = max(_packing_bound(family), _lp_bound(family)) if family else 0
    for k in range(start, limit + 1):
        for cand in _hitting_sets(family, k):
            if not any(b <= set(cand) for b in banned):
                return cand
    return None


def min_hitting_set(sets: Iterable[Iterable[int]], limit: int) -> tuple[int, ...] | None:
    """Smallest vertex set meeting every member of ``sets``, lexicographically least among those.

    Returns None when every hitting set has more than ``limit`` vertices.
    """
    return _first_hitting_set({frozenset(s) for s in sets}, limit)


# -- detector ------------------------------------------------------------------

def _local_obstacles(view: PrefixView) -> list[frozenset]:
    """Vertex sets of size 2 or 3 that can never sit inside a c_r pattern.

    Write a >= b when (a, b) is blue both ways or red from a to b. A view has
    the pattern (for some number of classes) exactly when no pair is red both
    ways and >= is transitive; classes are then the blue-both-ways blocks.
    Pairs red both ways come back first; otherwise one triple a >= b >= c with
    c above a is returned for each offending ordered pair (a, c).
    """
    vs = view.vertices
    c = view.colours
    off = ~np.eye(len(vs), dtype=bool)
    red = (c == RED) & off
    both = np.triu(red & red.T, 1)
    if both.any():
        return [frozenset((vs[i], vs[j])) for i, j in np.argwhere(both).tolist()]
    blue = (c == BLUE) & off
    geq = (blue & blue.T) | red
    g = geq.astype(np.int32)
    broken = ((g @ g) > 0) & ~geq & off
    found = []
    for a, cc in np.argwhere(broken).tolist():
        b = int(np.flatnonzero(geq[a] & geq[:, cc])[0])
        found.append(frozenset((vs[a], vs[b], vs[cc])))
    return found


def detect_cr_structure(view: PrefixView, r: int, max_exceptional: int = 16,
                        time_cap_ms: int | None = None) -> CrStructure:
    """Find the least vertex set U whose removal leaves a copy of the c_r pattern.

    U is minimum in size and lexicographically least among minima. Having the
    pattern (empty classes allowed) survives vertex deletion, so every
    obstruction found in a remainder (a pair red both ways, a triple breaking
    transitivity, a red path of length r) must be hit by U. Candidates are
    least hitting sets of the obstructions collected so far; a candidate whose
    remainder is a pattern with fewer than r non-empty classes is banned
    together with its supersets, since deleting vertices never adds a class.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    obstacles: set[frozenset] = set()
    paths: set[frozenset] = set()
    banned: list[frozenset] = []
    residual = 0
    while True:
        removed = _first_hitting_set(obstacles, max_exceptional, banned)
        if removed is None:
            break
        rest = view.without(removed)
        fresh = set(_local_obstacles(rest))
        if not fresh:
            levels, witnesses = scan_levels(rest, RED, r, time_cap_ms)
            fresh = {frozenset(w.vertices) for w in witnesses}
            paths |= fresh
        if fresh:
            residual = len(fresh)
            obstacles |= fresh
            continue
        classes = tuple(tuple(v for v in rest.vertices if levels[v] == i) for i in range(r))
        if all(classes):
            report = pattern_check(rest, classes)
            if not report.ok:
                raise AssertionError(f"detector produced an invalid structure: {report.to_lines()[0]}")
            return CrStructure(removed, classes)
        banned.append(frozenset(removed))
        residual = sum(1 for c in classes if not c)
    if paths and _first_hitting_set(obstacles - paths, max_exceptional, banned) is not None:
        raise RedPathTooLong(
            f"red path of length >= {r} present; no exceptional set of size <= "
            f"{max_exceptional} removes them all", residual, ())
    raise NotCrStructure(
        f"not c_{r}: no exceptional set of size <= {max_exceptional} leaves the pattern with "
        f"{r} non-empty classes ({len(obstacles)} obstructions collected)", residual, ())
