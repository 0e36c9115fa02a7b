"""Vertex-disjoint monochromatic path covers, and the random harness for the covering conjecture."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rdl._validation import check_colour
from rdl.colouring import BLUE, RED, Extremal, PrefixView, SeededRandom, prefix
from rdl.errors import BudgetExceeded, DepthCapReached, HarnessInfeasible
from rdl.paths import DirectedPath, SearchBudget, longest_mono_path_exact, validate_path

CAVEAT = ("finite truncation: covers of [1..n] are neither evidence for nor against "
          "the statement about the infinite digraph")

_INF = 10_000


@dataclass(frozen=True)
class PathCover:
    paths: tuple[DirectedPath, ...]
    colour: int
    ground: tuple[int, ...]

    def __len__(self):
        return len(self.paths)

    def problems(self, view: PrefixView) -> list[str]:
        """Reasons this is not a valid cover of ``ground``; empty when valid."""
        out = []
        seen: set[int] = set()
        for p in self.paths:
            if p.colour != self.colour:
                out.append(f"path {p.vertices} has colour {p.colour}")
            report = validate_path(view, p)
            if not report.ok:
                out.append(report.reason)
            if seen & set(p.vertices):
                out.append(f"path {p.vertices} overlaps an earlier path")
            seen |= set(p.vertices)
        if seen != set(self.ground):
            out.append("paths do not cover the ground set exactly")
        return out

    def to_lines(self) -> list[str]:
        return [f"cover colour={self.colour} paths={len(self.paths)}"] + [p.to_line() for p in self.paths]


def greedy_path_cover(view: PrefixView, colour: int) -> PathCover:
    """Start at the least uncovered vertex and keep taking its least uncovered out-neighbour."""
    check_colour(view, colour)
    adj = view.out_indices(colour)
    covered = bytearray(len(view))
    vs = view.vertices
    paths = []
    for s in range(len(view)):
        if covered[s]:
            continue
        path = [s]
        covered[s] = 1
        while True:
            nxt = next((u for u in adj[path[-1]] if not covered[u]), None)
            if nxt is None:
                break
            path.append(nxt)
            covered[nxt] = 1
        paths.append(DirectedPath(tuple(vs[i] for i in path), colour))
    return PathCover(tuple(paths), colour, vs)


def _cover_table(in_lists: Sequence[Sequence[int]], n: int, must_start: int = 0,
                 no_start: int = 0) -> tuple[np.ndarray, list[np.ndarray]]:
    """dp[S, u]: fewest paths covering S when laid out one after another ending at u.

    Bit i of ``must_start`` forces vertex i to begin a path; bit i of
    ``no_start`` forbids it.
    """
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    pop = np.bitwise_count(masks)
    order = np.argsort(pop, kind="stable")
    cuts = np.searchsorted(pop[order], np.arange(n + 2))
    layers = [order[cuts[p]:cuts[p + 1]] for p in range(n + 1)]
    dp = np.full((size, n), _INF, dtype=np.int16)
    for u in range(n):
        if not no_start >> u & 1:
            dp[1 << u, u] = 1
    for p in range(2, n + 1):
        layer = layers[p]
        for u in range(n):
            bit = 1 << u
            m = layer[(layer & bit) != 0]
            prev = dp[m ^ bit]
            best = np.full(m.size, _INF, dtype=np.int16)
            if not no_start >> u & 1:
                best = np.minimum(best, prev.min(axis=1) + 1)
            if not must_start >> u & 1 and in_lists[u]:
                best = np.minimum(best, prev[:, list(in_lists[u])].min(axis=1))
            dp[m, u] = np.minimum(best, _INF)
    return dp, layers


def _reconstruct(dp: np.ndarray, in_lists, n: int, must_start: int, no_start: int
                 ) -> list[list[int]]:
    full = (1 << n) - 1
    target = int(dp[full].min())
    u = int(np.flatnonzero(dp[full] == target)[0])
    mask, value = full, target
    order: list[tuple[int, bool]] = []
    while True:
        prev_mask = mask ^ (1 << u)
        if prev_mask == 0:
            order.append((u, True))
            break
        row = dp[prev_mask]
        ext = [v for v in in_lists[u] if row[v] == value] if not must_start >> u & 1 else []
        if ext:
            order.append((u, False))
            u = ext[0]
        else:
            assert not no_start >> u & 1
            order.append((u, True))
            u = int(np.flatnonzero(row == value - 1)[0])
            value -= 1
        mask = prev_mask
    paths: list[list[int]] = []
    for v, is_start in reversed(order):
        if is_start:
            paths.append([v])
        else:
            paths[-1].append(v)
    return paths


def min_path_cover_exact(view: PrefixView, colour: int,
                         budget: SearchBudget = SearchBudget()) -> PathCover:
    """Fewest vertex-disjoint ``colour`` paths covering the view.

    Ties go to the lexicographically least sorted tuple of path starts; the
    start set is fixed one vertex at a time by re-running the subset DP with
    forced and forbidden starts.
    """
    check_colour(view, colour)
    n = len(view)
    if n > budget.max_exact_vertices:
        raise BudgetExceeded(
            f"view has {n} vertices, exact cover limit is {budget.max_exact_vertices}",
            upper_bound=greedy_path_cover(view, colour),
        )
    in_lists = view.in_indices(colour)
    dp, _ = _cover_table(in_lists, n)
    k = int(dp[(1 << n) - 1].min())
    must, forbid = 0, 0
    for v in range(n):
        if bin(must).count("1") == k:
            forbid |= ((1 << n) - 1) & ~must & ~((1 << v) - 1)
            break
        trial, _ = _cover_table(in_lists, n, must | (1 << v), forbid)
        if int(trial[(1 << n) - 1].min()) == k:
            must |= 1 << v
        else:
            forbid |= 1 << v
    dp, _ = _cover_table(in_lists, n, must, forbid)
    vs = view.vertices
    paths = _reconstruct(dp, in_lists, n, must, forbid)
    paths.sort(key=lambda p: p[0])
    return PathCover(tuple(DirectedPath(tuple(vs[i] for i in p), colour) for p in paths),
                     colour, vs)


# -- conjecture harness --------------------------------------------------------

@dataclass(frozen=True)
class Trial:
    index: int
    seed: int
    cover: int
    rejected: int

    def to_line(self) -> str:
        return f"trial {self.index} seed {self.seed} cover {self.cover} rejected {self.rejected}"


@dataclass(frozen=True)
class HarnessReport:
    r: int
    n: int
    weights: tuple[int, int]
    trials: tuple[Trial, ...]
    control_cover: int
    caveat: str = CAVEAT

    @property
    def max_cover(self) -> int:
        return max((t.cover for t in self.trials), default=0)

    @property
    def exceeding(self) -> tuple[Trial, ...]:
        return tuple(t for t in self.trials if t.cover > self.r)

    def distribution(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for t in self.trials:
            dist[t.cover] = dist.get(t.cover, 0) + 1
        return dict(sorted(dist.items()))

    def to_lines(self) -> list[str]:
        lines = [f"conjecture r={self.r} n={self.n} trials={len(self.trials)} "
                 f"weights={self.weights[0]}:{self.weights[1]}"]
        lines += [t.to_line() for t in self.trials]
        lines.append("distribution " + " ".join(f"{k}:{v}" for k, v in self.distribution().items()))
        lines.append(f"max_cover {self.max_cover}")
        lines.append("exceeding " + (" ".join(str(t.index) for t in self.exceeding) or "none"))
        lines.append(f"control extremal:{self.r} cover {self.control_cover}")
        lines.append(f"caveat {self.caveat}")
        return lines


def default_red_weights(r: int, n: int, scale: int = 1_000_000) -> tuple[int, int]:
    """Red/blue weights making about one red path of length r expected per sample."""
    ordered = math.perm(n, r + 1)
    p = min(0.5, ordered ** (-1.0 / r)) if ordered else 0.5
    red = max(1, round(p * scale))
    return red, scale - red


def conjecture_harness(r: int, n: int, trials: int, seed: int,
                       weights: tuple[int, int] | None = None,
                       max_attempts: int = 200_000,
                       budget: SearchBudget = SearchBudget()) -> HarnessReport:
    """Sample 2-colourings of [1..n] with no red path of length r and record min blue covers.

    Samples come from SeededRandom colourings; a sample is rejected when the
    depth-capped search finds a red path of length r. Trial seeds are drawn
    from ``random.Random(seed)``, so the report depends only on the arguments.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if n > budget.max_exact_vertices:
        raise BudgetExceeded(f"n={n} exceeds exact cover limit {budget.max_exact_vertices}")
    weights = tuple(weights) if weights is not None else default_red_weights(r, n)
    rng = random.Random(seed)
    done: list[Trial] = []
    attempts = 0
    for i in range(trials):
        rejected = 0
        while True:
            if attempts >= max_attempts:
                raise HarnessInfeasible(
                    f"gave up after {attempts} samples with {len(done)} of {trials} trials accepted",
                    {"attempts": attempts, "accepted": len(done), "rejected_current": rejected,
                     "weights": weights},
                )
            attempts += 1
            s = rng.getrandbits(48)
            view = prefix(SeededRandom(2, s, weights), n)
            try:
                longest_mono_path_exact(view, RED, SearchBudget(depth_cap=r))
            except DepthCapReached:
                rejected += 1
                continue
            break
        cover = min_path_cover_exact(view, BLUE, budget)
        problems = cover.problems(view)
        if problems:
            raise AssertionError(f"trial {i}: invalid cover: {problems[0]}")
        done.append(Trial(i, s, len(cover), rejected))
    return HarnessReport(r, n, weights, tuple(done), _control_cover(r, n, budget))


def _control_cover(r: int, n: int, budget: SearchBudget) -> int:
    if r >= 2:
        control = prefix(Extremal(r), n)
    else:
        # c_1 has a single class: every edge blue
        colours = np.full((n, n), BLUE, dtype=np.int8)
        np.fill_diagonal(colours, 0)
        control = PrefixView(range(1, n + 1), colours, 2)
    return len(min_path_cover_exact(control, BLUE, budget))
