"""Invariant suites run by ``rdl verify``. Each check yields one PASS/FAIL line."""

from __future__ import annotations

import inspect
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from rdl.colouring import (
    BLUE, RED, DensityZero, Explicit, Extremal, PrefixView, ProductExtremal, SeededRandom,
    class_tuple, materialize, prefix,
)
from rdl.cover import min_path_cover_exact
from rdl.density import exact_periodic_density, path_density
from rdl.errors import RdlError
from rdl.oracles import longest_path_by_permutations, min_cover_by_partitions
from rdl.paths import (
    DirectedPath, SearchBudget, bitrev_keys, exact_levels, greedy_mono_path, level_partition,
    longest_mono_path_exact, mono_walk_sample, splice_via_matching, validate_path,
    LevelPartition,
)
from rdl.structure import claim1_check

SUITES = ("density-zero", "extremal", "product", "claims", "all")


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_line(self) -> str:
        line = f"{'PASS' if self.ok else 'FAIL'} {self.name}"
        return f"{line} : {self.detail}" if self.detail else line


def _longest(view: PrefixView, colour: int, cap: int) -> DirectedPath:
    if len(view) <= 20:
        return longest_mono_path_exact(view, colour)
    return longest_mono_path_exact(view, colour, SearchBudget(depth_cap=cap))


# -- density zero --------------------------------------------------------------

def bitrev_violations(n: int, k: int, colours: np.ndarray | None = None) -> int:
    """Ordered pairs in [1..n] breaking key monotonicity for DensityZero at this k."""
    v = np.arange(1, n + 1, dtype=np.int64)
    if colours is None:
        colours = DensityZero().colour_matrix(v)
    key = bitrev_keys(v, k)
    km, kn = key[:, None], key[None, :]
    res = v % (1 << k)
    differ = res[:, None] != res[None, :]
    off = ~np.eye(n, dtype=bool)
    red = (colours == RED) & off
    blue = (colours == BLUE) & off
    bad = red & ((km > kn) | ((km < kn) != differ))
    bad |= blue & ((km < kn) | ((km > kn) != differ))
    return int(bad.sum())


def confinement_violation(path: DirectedPath, k: int) -> int | None:
    """Index where the path returns to a residue class mod 2**k it already left, else None."""
    departed: set[int] = set()
    prev = None
    for i, v in enumerate(path.vertices):
        c = v % (1 << k)
        if c in departed:
            return i
        if prev is not None and c != prev:
            departed.add(prev)
        prev = c
    return None


def density_zero_suite(n: int, walks: int = 200, horizon: int = 100_000, steps: int = 64,
                       seed: int = 0) -> list[Check]:
    checks = []
    v = np.arange(1, n + 1, dtype=np.int64)
    colours = DensityZero().colour_matrix(v)
    off = ~np.eye(n, dtype=bool)
    red = (colours == RED) & off
    split = int((red == red.T)[off].sum())
    checks.append(Check(f"dz-pair-split n={n}", split == 0, f"{split} pairs without exactly one red direction"))
    kmax = max(1, (n).bit_length() - 1)
    bad = {k: bitrev_violations(n, k, colours) for k in range(1, kmax + 1)}
    total = sum(bad.values())
    checks.append(Check(f"dz-bitrev-monotone n={n} k<={kmax}", total == 0, f"{total} violations"))
    rng = random.Random(seed)
    broken = 0
    for i in range(walks):
        start = rng.randint(1, horizon)
        walk = mono_walk_sample(DensityZero(), RED, start, steps, horizon, seed * 100_003 + i)
        if not validate_path(materialize(DensityZero(), walk.vertices), walk).ok:
            broken += 1
            continue
        broken += sum(confinement_violation(walk, k) is not None for k in range(1, 9))
    checks.append(Check(f"dz-confinement walks={walks} horizon={horizon}", broken == 0,
                        f"{broken} violations"))
    return checks


# -- extremal ------------------------------------------------------------------

def _class_laws(view: PrefixView, r: int) -> int:
    v = np.asarray(view.vertices, dtype=np.int64)
    cls = v % r
    lo = cls[:, None] < cls[None, :]
    same = cls[:, None] == cls[None, :]
    off = ~np.eye(len(v), dtype=bool)
    c = view.colours
    bad = off & same & ((c != BLUE) | (c.T != BLUE))
    bad |= lo & ((c != BLUE) | (c.T != RED))
    return int(bad.sum())


def extremal_suite(n: int) -> list[Check]:
    checks = []
    for r in (2, 3, 4, 5):
        if n < r:
            continue
        view = prefix(Extremal(r), n)
        bad = _class_laws(view, r)
        checks.append(Check(f"extremal r={r} class-laws n={n}", bad == 0, f"{bad} violations"))
        longest = _longest(view, RED, r + 1)
        checks.append(Check(f"extremal r={r} longest-red", longest.length == r - 1,
                            f"length {longest.length}"))
        levels = level_partition(view, RED, depth_cap=r)
        wrong = sum(1 for x, lv in levels.levels.items() if lv != x % r)
        checks.append(Check(f"extremal r={r} levels-are-residues", wrong == 0, f"{wrong} misplaced"))
        for i in range(r):
            target = levels.level_set(i)
            path, skipped = greedy_mono_path(view, BLUE, target)
            ok = (not skipped and validate_path(view, path).ok
                  and set(path.vertices) == set(target)
                  and path_density(path, n) == Fraction(len(target), n))
            if n % r == 0:
                ok = ok and path_density(path, n) == Fraction(1, r)
            checks.append(Check(f"extremal r={r} greedy-blue class {i}", ok,
                                f"density {path_density(path, n)} skipped {len(skipped)}"))
    return checks


# -- product -------------------------------------------------------------------

def product_suite(n: int) -> list[Check]:
    checks = []
    small = list(range(1, min(n, 60) + 1))
    for r in (2, 3, 4, 5):
        same = np.array_equal(ProductExtremal((r,)).colour_matrix(small), Extremal(r).colour_matrix(small))
        checks.append(Check(f"product k=1 r={r} equals extremal", same))
    moduli = (2, 3)
    rule = ProductExtremal(moduli)
    view = prefix(rule, n)
    for t, r in enumerate(moduli, start=1):
        got = _longest(view, t, r + 1).length
        checks.append(Check(f"product {moduli} longest colour {t}", got == r - 1, f"length {got}"))
    for tup in sorted({class_tuple(x, moduli) for x in range(6)}):
        target = [x for x in view.vertices if class_tuple(x, moduli) == tup]
        path, skipped = greedy_mono_path(view, rule.colour_count, target)
        ok = not skipped and validate_path(view, path).ok and set(path.vertices) == set(target)
        if n % 6 == 0:
            ok = ok and path_density(path, n) == Fraction(1, 6)
        checks.append(Check(f"product {moduli} greedy colour 3 class {tup}", ok,
                            f"density {path_density(path, n)}"))
    dens = exact_periodic_density({(1, 2)}, moduli)
    checks.append(Check("product (2,3) class density", dens == Fraction(1, 6), str(dens)))
    return checks


# -- claims --------------------------------------------------------------------

def _acyclic(view: PrefixView, colour: int, ground) -> bool:
    ground = set(ground)
    indeg = {u: 0 for u in ground}
    for u in ground:
        for w in view.out_neighbours(u, colour):
            if w in ground:
                indeg[w] += 1
    stack = [u for u, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for w in view.out_neighbours(u, colour):
            if w in ground:
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
    return seen == len(ground)


def level_consistency(view: PrefixView, partition: LevelPartition) -> bool:
    """Local consistency of a level assignment with the edges of its colour.

    Always: level 0 exactly at vertices with no out-edge in the ground set, and
    a vertex at level i >= 1 has an out-neighbour at level >= i - 1. When the
    colour class is acyclic on the ground set, the stronger layered laws hold
    too: every edge drops at least one level and some edge drops exactly one.
    Cycles break the stronger form (both ends of a 2-cycle sit at level 1).
    """
    lv = partition.levels
    c = partition.colour
    strong = _acyclic(view, c, lv)
    for u in lv:
        outs = [w for w in view.out_neighbours(u, c) if w in lv]
        if (lv[u] == 0) != (not outs):
            return False
        if lv[u] >= 1 and not any(lv[w] >= lv[u] - 1 for w in outs):
            return False
        if strong:
            if any(lv[u] < lv[w] + 1 for w in outs):
                return False
            if lv[u] >= 1 and not any(lv[w] == lv[u] - 1 for w in outs):
                return False
    return True


def random_view(n: int, seed: int, red_weight: int | None = None) -> PrefixView:
    rng = random.Random(seed)
    w = red_weight if red_weight is not None else rng.randint(1, 9)
    return prefix(SeededRandom(2, seed, (w, 10 - w)), n)


def splice_instance(seed: int, size_p: int | None = None, size_q: int | None = None,
                    n_matching: int | None = None):
    """A colouring with two blue paths P, Q and a blue matching from Q to P that splices.

    All P -> Q edges are blue, the matching indices increase in both paths and
    its last edge leaves the final vertex of Q; every other pair is random.
    """
    rng = random.Random(seed)
    size_p = size_p or rng.randint(2, 8)
    size_q = size_q or rng.randint(1, 8)
    n = size_p + size_q + rng.randint(0, 4)
    verts = list(range(1, n + 1))
    rng.shuffle(verts)
    P, Q = verts[:size_p], verts[size_p:size_p + size_q]
    pairs = {(a, b): rng.choice((RED, BLUE)) for a in range(1, n + 1) for b in range(1, n + 1) if a != b}
    for path in (P, Q):
        for a, b in zip(path, path[1:]):
            pairs[(a, b)] = BLUE
    for a in P:
        for b in Q:
            pairs[(a, b)] = BLUE
    m = n_matching or rng.randint(1, min(size_p - 1, size_q))
    ks = sorted(rng.sample(range(1, size_q), m - 1)) + [size_q]
    js = sorted(rng.sample(range(2, size_p + 1), m))
    matching = [(Q[k - 1], P[j - 1]) for k, j in zip(ks, js)]
    for e in matching:
        pairs[e] = BLUE
    view = materialize(Explicit.from_pairs(n, pairs, 2), range(1, n + 1))
    return view, DirectedPath(tuple(P), BLUE), DirectedPath(tuple(Q), BLUE), matching


def claims_suite(n: int, views: int = 200, seed: int = 0) -> list[Check]:
    checks = []
    size = min(n, 16)
    failures = inconsistent = 0
    for i in range(views):
        view = random_view(size, seed * 7919 + i)
        part = LevelPartition(exact_levels(view, RED), RED, view.vertices)
        failures += claim1_check(view, part) is not None
        inconsistent += not level_consistency(view, part)
    checks.append(Check(f"claim1 views={views} n={size}", failures == 0, f"{failures} counterexamples"))
    checks.append(Check(f"level-consistency views={views} n={size}", inconsistent == 0,
                        f"{inconsistent} inconsistent"))
    checks.extend(oracle_checks(seed=seed))
    bad = 0
    for i in range(50):
        view, p, q, m = splice_instance(seed * 104_729 + i)
        try:
            s = splice_via_matching(view, p, q, m)
        except RdlError:
            bad += 1
            continue
        bad += not (validate_path(view, s).ok and set(s.vertices) == set(p.vertices) | set(q.vertices))
    checks.append(Check("splice-soundness instances=50", bad == 0, f"{bad} failures"))
    return checks


def oracle_checks(longest_views: int = 100, cover_views: int = 50, seed: int = 0) -> list[Check]:
    rng = random.Random(seed)
    disagree = 0
    for i in range(longest_views):
        view = random_view(rng.randint(2, 9), seed * 31 + i)
        for colour in (RED, BLUE):
            disagree += (longest_mono_path_exact(view, colour).vertices
                         != longest_path_by_permutations(view, colour).vertices)
    out = [Check(f"oracle longest views={longest_views}", disagree == 0, f"{disagree} disagreements")]
    disagree = 0
    for i in range(cover_views):
        view = random_view(rng.randint(2, 8), seed * 37 + 10_000 + i)
        cover = min_path_cover_exact(view, BLUE)
        got = (len(cover), tuple(sorted(p.vertices[0] for p in cover.paths)))
        disagree += bool(cover.problems(view)) or got != min_cover_by_partitions(view, BLUE)
    out.append(Check(f"oracle cover views={cover_views}", disagree == 0, f"{disagree} disagreements"))
    return out


def run_suite(name: str, n: int, **kwargs) -> list[Check]:
    table: dict[str, Callable[..., list[Check]]] = {
        "density-zero": density_zero_suite,
        "extremal": extremal_suite,
        "product": product_suite,
        "claims": claims_suite,
    }
    if name == "all":
        out = []
        for key in table:
            out += run_suite(key, n, **kwargs)
        return out
    if name not in table:
        raise ValueError(f"unknown suite {name!r}")
    fn = table[name]
    accepted = inspect.signature(fn).parameters
    return fn(n, **{k: v for k, v in kwargs.items() if k in accepted})
