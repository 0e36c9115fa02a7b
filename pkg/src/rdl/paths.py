"""Monochromatic directed paths in a PrefixView.

Two exact engines back the longest-path queries:

* a subset DP over bitmasks (``max_exact_vertices`` <= 20 by default), which
  for every vertex subset records which vertices start a Hamiltonian path of
  that subset;
* a depth-capped DFS that is exact whenever no path reaches the cap, pruned by
  an upper bound from the strongly connected components of the colour class.

Searches resolve ties towards the lexicographically least vertex sequence.
"""

from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field
from graphlib import TopologicalSorter
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from rdl._validation import check_colour, check_in_view
from rdl.colouring import BLUE, ColouringRule, PrefixView
from rdl.errors import (
    BudgetExceeded,
    DepthCapReached,
    OutOfDomainError,
    ParseError,
    PreconditionViolation,
    SpliceIncomplete,
)

# Hard ceiling for the bitmask tables (uint32 start sets, 2**n entries).
_DP_HARD_LIMIT = 26


@dataclass(frozen=True)
class DirectedPath:
    vertices: tuple[int, ...]
    colour: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))

    @property
    def length(self) -> int:
        """Number of edges; -1 for the empty path."""
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return list(zip(vs, vs[1:]))

    def to_line(self) -> str:
        return f"path colour={self.colour} : " + " ".join(map(str, self.vertices))

    @classmethod
    def from_line(cls, line: str) -> DirectedPath:
        head, sep, body = line.strip().partition(":")
        words = head.split()
        if not sep or len(words) != 2 or words[0] != "path" or not words[1].startswith("colour="):
            raise ParseError(f"malformed path line {line!r}")
        try:
            colour = int(words[1][len("colour="):])
            vertices = tuple(int(t) for t in body.split())
        except ValueError:
            raise ParseError(f"malformed path line {line!r}") from None
        return cls(vertices, colour)


class Orientation(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class OrientedPath:
    """A path whose consecutive pairs may point either way.

    ``orientations[i]`` is FORWARD when the edge runs vertices[i] -> vertices[i+1].
    """

    vertices: tuple[int, ...]
    orientations: tuple[Orientation, ...]

    def __post_init__(self):
        orient = tuple(Orientation(o) for o in self.orientations)
        object.__setattr__(self, "orientations", orient)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("oriented path repeats a vertex")
        if self.vertices and len(orient) != len(self.vertices) - 1:
            raise ValueError("need one orientation per consecutive pair")

    @classmethod
    def directed(cls, vertices: Sequence[int]) -> OrientedPath:
        return cls(tuple(vertices), (Orientation.FORWARD,) * max(len(vertices) - 1, 0))


@dataclass(frozen=True)
class SearchBudget:
    max_exact_vertices: int = 20
    depth_cap: int | None = None
    time_cap_ms: int | None = None

    def __post_init__(self):
        for name in ("max_exact_vertices", "depth_cap", "time_cap_ms"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class PathReport:
    ok: bool
    edge: tuple[int, int] | None = None
    reason: str = ""


@dataclass(frozen=True)
class LevelPartition:
    """Vertex -> length of the longest ``colour`` path starting there, within ``ground``."""

    levels: Mapping[int, int]
    colour: int
    ground: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "levels", dict(sorted(self.levels.items())))
        if not self.ground:
            object.__setattr__(self, "ground", tuple(self.levels))

    def __getitem__(self, v: int) -> int:
        return self.levels[v]

    @property
    def height(self) -> int:
        return max(self.levels.values(), default=-1) + 1

    def level_set(self, i: int) -> tuple[int, ...]:
        return tuple(v for v, lv in self.levels.items() if lv == i)

    def sets(self) -> list[tuple[int, ...]]:
        return [self.level_set(i) for i in range(self.height)]

    def to_lines(self) -> list[str]:
        return [f"level {i} : " + " ".join(map(str, s)) for i, s in enumerate(self.sets())]


class _Clock:
    def __init__(self, time_cap_ms: int | None):
        self.deadline = None if time_cap_ms is None else time.monotonic() + time_cap_ms / 1000
        self.ticks = 0

    def expired(self) -> bool:
        self.ticks += 1
        if self.deadline is None or self.ticks & 1023:
            return False
        return time.monotonic() > self.deadline


def validate_path(view: PrefixView, path: DirectedPath) -> PathReport:
    check_in_view(view, path.vertices)
    seen = set()
    for v in path.vertices:
        if v in seen:
            return PathReport(False, None, f"vertex {v} repeats")
        seen.add(v)
    for m, n in path.edges():
        actual = view.colour(m, n)
        if actual != path.colour:
            return PathReport(False, (m, n), f"edge ({m},{n}) has colour {actual}, not {path.colour}")
    return PathReport(True)


# -- subset DP ---------------------------------------------------------------

class _SubsetTable:
    """For every subset S of the view: bitmask of vertices starting a Hamiltonian path of S."""

    def __init__(self, out_masks: Sequence[int]):
        n = len(out_masks)
        if n > _DP_HARD_LIMIT:
            raise BudgetExceeded(f"subset DP limited to {_DP_HARD_LIMIT} vertices, view has {n}")
        self.n = n
        size = 1 << n
        masks = np.arange(size, dtype=np.uint32)
        pop = np.bitwise_count(masks).astype(np.int8)
        order = np.argsort(pop, kind="stable").astype(np.uint32)
        cuts = np.searchsorted(pop[order], np.arange(n + 2))
        self.layers = [order[cuts[p]:cuts[p + 1]] for p in range(n + 1)]
        self.pop = pop
        reach = np.zeros(size, dtype=np.uint32)
        singles = np.left_shift(np.uint32(1), np.arange(n, dtype=np.uint32))
        reach[singles] = singles
        out = [np.uint32(m) for m in out_masks]
        for p in range(2, n + 1):
            layer = self.layers[p]
            for s in range(n):
                bit = np.uint32(1 << s)
                m = layer[(layer & bit) != 0]
                ok = (reach[m ^ bit] & out[s]) != 0
                reach[m[ok]] |= bit
        self.reach = reach

    def longest_from_each(self) -> list[int]:
        return [int(self.pop[(self.reach >> np.uint32(s)) & np.uint32(1) == 1].max()) - 1
                for s in range(self.n)]

    def starters(self, q: int, avoid: int) -> int:
        """Vertices starting a path on q vertices that avoids the ``avoid`` mask."""
        layer = self.layers[q]
        sel = layer[(layer & np.uint32(avoid)) == 0]
        if sel.size == 0:
            return 0
        return int(np.bitwise_or.reduce(self.reach[sel]))


def _lowest_bit_index(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _longest_by_subset_dp(view: PrefixView, colour: int) -> DirectedPath:
    out = view.out_masks(colour)
    table = _SubsetTable(out)
    longest = max(table.longest_from_each())
    q = longest + 1
    first = _lowest_bit_index(table.starters(q, 0))
    seq = [first]
    used = 1 << first
    for q in range(longest, 0, -1):
        cand = out[seq[-1]] & table.starters(q, used) & ~used
        nxt = _lowest_bit_index(cand)
        seq.append(nxt)
        used |= 1 << nxt
    vs = view.vertices
    return DirectedPath(tuple(vs[i] for i in seq), colour)


def exact_levels(view: PrefixView, colour: int) -> dict[int, int]:
    """Longest ``colour`` path length from every vertex, by subset DP."""
    table = _SubsetTable(view.out_masks(colour))
    return dict(zip(view.vertices, table.longest_from_each()))


# -- depth-capped DFS --------------------------------------------------------

def path_length_bounds(view: PrefixView, colour: int, cap: int) -> list[int]:
    """Upper bound (clipped to ``cap``) on the longest ``colour`` path from each vertex.

    A simple path meets the strongly connected components along a chain of
    the condensation, using at most |C| vertices of each component C.
    """
    n = len(view)
    mat = view.colours == colour
    ncomp, labels = connected_components(csr_matrix(mat), directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=ncomp).tolist()
    rows, cols = np.nonzero(mat)
    lr, lc = labels[rows], labels[cols]
    cross = lr != lc
    pairs = np.unique(lr[cross].astype(np.int64) * ncomp + lc[cross])
    succ: dict[int, set[int]] = {c: set() for c in range(ncomp)}
    for code in pairs.tolist():
        succ[code // ncomp].add(code % ncomp)
    best = [0] * ncomp
    # successors are given as dependencies, so sinks come out first
    for c in TopologicalSorter(succ).static_order():
        best[c] = sizes[c] + max((best[d] for d in succ[c]), default=0)
    return [min(cap, best[labels[i]] - 1) for i in range(n)]


def _dfs_longest(adj, bound, start: int, cap: int, floor: int, clock: _Clock):
    """Lexicographically least path from ``start`` with more than ``floor`` edges.

    Returns the longest such path as a list of indices, or None when none beats
    ``floor``. Raises DepthCapReached (witness in indices) on reaching ``cap``.
    """
    if bound[start] <= floor:
        return None
    best, best_len = None, floor
    if floor < 0:
        best, best_len = [start], 0
        if best_len >= bound[start]:
            return best
    on = bytearray(len(adj))
    on[start] = 1
    path = [start]
    cursor = [0]
    while path:
        row = adj[path[-1]]
        k = cursor[-1]
        depth = len(path)
        advanced = False
        while k < len(row):
            u = row[k]
            k += 1
            if on[u] or depth + bound[u] <= best_len:
                continue
            cursor[-1] = k
            path.append(u)
            on[u] = 1
            cursor.append(0)
            if depth > best_len:
                best, best_len = path[:], depth
                if depth >= cap:
                    raise DepthCapReached(cap, best)
                if best_len >= bound[start]:
                    return best
            advanced = True
            break
        if not advanced:
            on[path.pop()] = 0
            cursor.pop()
        if clock.expired():
            raise BudgetExceeded("time cap exceeded during path search", lower_bound=best)
    return best


def _to_path(view: PrefixView, indices, colour: int) -> DirectedPath:
    vs = view.vertices
    return DirectedPath(tuple(vs[i] for i in indices), colour)


def _longest_by_dfs(view, colour, cap, clock) -> DirectedPath:
    adj = view.out_indices(colour)
    bound = path_length_bounds(view, colour, cap)
    best = None
    best_len = -1
    try:
        for s in range(len(view)):
            found = _dfs_longest(adj, bound, s, cap, best_len, clock)
            if found is not None:
                best, best_len = found, len(found) - 1
    except DepthCapReached as exc:
        raise DepthCapReached(cap, _to_path(view, exc.witness, colour)) from None
    except BudgetExceeded as exc:
        partial = exc.lower_bound if exc.lower_bound and len(exc.lower_bound) > best_len + 1 else best
        raise BudgetExceeded(str(exc), lower_bound=_to_path(view, partial or [0], colour)) from None
    return _to_path(view, best, colour)


def _greedy_walk(view: PrefixView, colour: int) -> DirectedPath:
    """Cheap lower bound: from each start, keep taking the least unused out-neighbour."""
    adj = view.out_indices(colour)
    best: list[int] = [0]
    for s in range(len(view)):
        path, used = [s], {s}
        while True:
            nxt = next((u for u in adj[path[-1]] if u not in used), None)
            if nxt is None:
                break
            path.append(nxt)
            used.add(nxt)
        if len(path) > len(best):
            best = path
    return _to_path(view, best, colour)


def longest_mono_path_exact(view: PrefixView, colour: int,
                            budget: SearchBudget = SearchBudget()) -> DirectedPath:
    """A longest ``colour`` directed path, lexicographically least among maxima.

    With ``budget.depth_cap`` set the depth-capped DFS is used and a path of
    that many edges raises DepthCapReached. Otherwise the subset DP runs if the
    view is within ``budget.max_exact_vertices``.
    """
    check_colour(view, colour)
    if budget.depth_cap is not None:
        return _longest_by_dfs(view, colour, budget.depth_cap, _Clock(budget.time_cap_ms))
    if len(view) <= budget.max_exact_vertices:
        return _longest_by_subset_dp(view, colour)
    raise BudgetExceeded(
        f"view has {len(view)} vertices, exact limit is {budget.max_exact_vertices}; set a depth cap",
        lower_bound=_greedy_walk(view, colour),
    )


def longest_from(view: PrefixView, colour: int, v: int, depth_cap: int | None = None,
                 time_cap_ms: int | None = None) -> int:
    """Exact longest ``colour`` path length from ``v``.

    Raises DepthCapReached when a path of ``depth_cap`` edges exists, since the
    answer is then only known to be at least the cap.
    """
    check_colour(view, colour)
    if depth_cap is not None and depth_cap < 1:
        raise ValueError(f"depth cap must be >= 1, got {depth_cap}")
    i = view.index(v)
    cap = depth_cap if depth_cap is not None else len(view)
    bound = path_length_bounds(view, colour, cap)
    try:
        best = _dfs_longest(view.out_indices(colour), bound, i, cap, -1, _Clock(time_cap_ms))
    except DepthCapReached as exc:
        raise DepthCapReached(cap, _to_path(view, exc.witness, colour)) from None
    return len(best) - 1


def scan_levels(view: PrefixView, colour: int, cap: int, time_cap_ms: int | None = None
                ) -> tuple[dict[int, int], list[DirectedPath]]:
    """Levels for every vertex whose longest path stays below ``cap``.

    Vertices that reach the cap are left out of the level map; for each of
    them a witness path of ``cap`` edges is returned instead.
    """
    adj = view.out_indices(colour)
    bound = path_length_bounds(view, colour, cap)
    clock = _Clock(time_cap_ms)
    levels: dict[int, int] = {}
    witnesses: list[DirectedPath] = []
    for i, v in enumerate(view.vertices):
        try:
            best = _dfs_longest(adj, bound, i, cap, -1, clock)
        except DepthCapReached as exc:
            witnesses.append(_to_path(view, exc.witness, colour))
            continue
        levels[v] = len(best) - 1
    return levels, witnesses


def level_partition(view: PrefixView, colour: int, depth_cap: int | None = None,
                    budget: SearchBudget = SearchBudget()) -> LevelPartition:
    """Partition vertices by the length of the longest ``colour`` path starting there.

    Without a depth cap, small views use the subset DP and larger ones an
    uncapped DFS (cap = |view|, which no simple path reaches).
    """
    check_colour(view, colour)
    if depth_cap is None and len(view) <= budget.max_exact_vertices:
        return LevelPartition(exact_levels(view, colour), colour, view.vertices)
    cap = depth_cap if depth_cap is not None else len(view)
    levels, witnesses = scan_levels(view, colour, cap, budget.time_cap_ms)
    if witnesses:
        raise DepthCapReached(cap, witnesses[0])
    return LevelPartition(levels, colour, view.vertices)


# -- constructions -----------------------------------------------------------

def greedy_mono_path(view: PrefixView, colour: int, target: Iterable[int]
                     ) -> tuple[DirectedPath, tuple[int, ...]]:
    """Thread a ``colour`` path through ``target`` in increasing order.

    From the current end p, the least target v not yet on the path is
    appended directly if (p, v) has the colour, otherwise through the least
    vertex u off the path with (p, u) and (u, v) both of that colour. A target
    with neither option is skipped. Returns the path and the targets it misses.
    """
    check_colour(view, colour)
    targets = sorted(set(target))
    check_in_view(view, targets)
    if not targets:
        return DirectedPath((), colour), ()
    out, inn = view.out_masks(colour), view.in_masks(colour)
    idx = [view.index(v) for v in targets]
    path = [idx[0]]
    used = 1 << idx[0]
    for t in idx[1:]:
        if used >> t & 1:
            continue
        p = path[-1]
        if out[p] >> t & 1:
            path.append(t)
            used |= 1 << t
            continue
        via = out[p] & inn[t] & ~used & ~(1 << t)
        if via:
            u = _lowest_bit_index(via)
            path.extend((u, t))
            used |= (1 << u) | (1 << t)
    vs = view.vertices
    skipped = tuple(v for v, i in zip(targets, idx) if not used >> i & 1)
    return DirectedPath(tuple(vs[i] for i in path), colour), skipped


def splice_via_matching(view: PrefixView, p: DirectedPath, q: DirectedPath,
                        matching: Iterable[tuple[int, int]], colour: int = BLUE) -> DirectedPath:
    """Merge two disjoint ``colour`` paths into one using matching edges from Q to P.

    First step: with the matching edge (q_k, p_j), j > 1, set
    S = p_1..p_{j-1} q_1..q_k p_j. Each later step takes the next matching
    edge (q_k2, p_j2) with k2 > k1 and j2 > j1 and appends
    p_{j1+1}..p_{j2-1} q_{k1+1}..q_k2 p_j2. Matching edges are chosen by least
    k2, then least j2. Once Q is used up the rest of P is appended.
    """
    for path in (p, q):
        if path.colour != colour:
            raise PreconditionViolation(f"path {path.vertices} is not of colour {colour}")
        report = validate_path(view, path)
        if not report.ok:
            raise PreconditionViolation(f"invalid input path: {report.reason}", report.edge)
    if not p.vertices or not q.vertices:
        raise PreconditionViolation("both paths must be non-empty")
    if set(p.vertices) & set(q.vertices):
        raise PreconditionViolation("paths are not vertex-disjoint")
    pos_p = {v: j for j, v in enumerate(p.vertices, start=1)}
    pos_q = {v: k for k, v in enumerate(q.vertices, start=1)}
    pairs = []
    heads, tails = set(), set()
    for a, b in matching:
        if a not in pos_q or b not in pos_p:
            raise PreconditionViolation(f"matching edge ({a},{b}) does not run from Q to P", (a, b))
        if a in heads or b in tails:
            raise PreconditionViolation(f"matching edge ({a},{b}) shares an endpoint", (a, b))
        if view.colour(a, b) != colour:
            raise PreconditionViolation(f"matching edge ({a},{b}) is not colour {colour}", (a, b))
        heads.add(a)
        tails.add(b)
        pairs.append((pos_q[a], pos_p[b]))
    pairs.sort()

    P, Q = p.vertices, q.vertices

    def bridge(m: int, n: int) -> None:
        if view.colour(m, n) != colour:
            raise PreconditionViolation(f"bridging edge ({m},{n}) is not colour {colour}", (m, n))

    first = next(((k, j) for k, j in pairs if j > 1), None)
    if first is None:
        raise SpliceIncomplete("no matching edge into P beyond its first vertex", partial=p)
    k1, j1 = first
    bridge(P[j1 - 2], Q[0])
    seq = list(P[:j1 - 1]) + list(Q[:k1]) + [P[j1 - 1]]
    while k1 < len(Q):
        nxt = next(((k, j) for k, j in pairs if k > k1 and j > j1), None)
        if nxt is None:
            raise SpliceIncomplete(
                f"matching exhausted with {len(Q) - k1} vertices of Q unused",
                partial=DirectedPath(tuple(seq), colour),
            )
        k2, j2 = nxt
        bridge(P[j2 - 2] if j2 - 1 > j1 else P[j1 - 1], Q[k1])
        seq += list(P[j1:j2 - 1]) + list(Q[k1:k2]) + [P[j2 - 1]]
        k1, j1 = k2, j2
    seq += list(P[j1:])
    return DirectedPath(tuple(seq), colour)


def bitrev_key(v: int, k: int) -> int:
    """The k low bits of v read in reverse, so bit 0 of v is the top bit of the key."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    low = v & ((1 << k) - 1)
    return int(f"{low:0{k}b}"[::-1], 2)


def bitrev_keys(values: np.ndarray, k: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    key = np.zeros_like(values)
    for b in range(k):
        key |= ((values >> b) & 1) << (k - 1 - b)
    return key


def count_switches(path: OrientedPath) -> int:
    """Vertices whose in- or out-degree inside the path is zero."""
    n = len(path.vertices)
    indeg = [0] * n
    outdeg = [0] * n
    for i, o in enumerate(path.orientations):
        src, dst = (i, i + 1) if o is Orientation.FORWARD else (i + 1, i)
        outdeg[src] += 1
        indeg[dst] += 1
    return sum(1 for i in range(n) if indeg[i] == 0 or outdeg[i] == 0)


def mono_walk_sample(rule: ColouringRule, colour: int, start: int, steps: int,
                     horizon: int, seed: int) -> DirectedPath:
    """Seeded random ``colour`` path from ``start`` inside [1..horizon].

    Each step picks uniformly among unvisited out-neighbours of the right
    colour; a few random probes are tried before falling back to a full scan.
    """
    if not 1 <= start <= horizon:
        raise OutOfDomainError(f"start {start} outside [1..{horizon}]")
    rng = random.Random(seed)
    path = [start]
    seen = {start}
    for _ in range(steps):
        cur = path[-1]
        nxt = None
        for _ in range(32):
            t = rng.randint(1, horizon)
            if t not in seen and rule.colour_of(cur, t) == colour:
                nxt = t
                break
        if nxt is None:
            cand = np.arange(1, horizon + 1, dtype=np.int64)
            ok = rule.colour_row(cur, cand) == colour
            ok[[v - 1 for v in seen]] = False
            pool = np.flatnonzero(ok)
            if pool.size == 0:
                break
            nxt = int(pool[rng.randrange(pool.size)]) + 1
        path.append(nxt)
        seen.add(nxt)
    return DirectedPath(tuple(path), colour)
