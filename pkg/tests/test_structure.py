from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from rdl.colouring import BLUE, RED, Explicit, Extremal, Perturbed, materialize, prefix
from rdl.errors import NotCrStructure, RedPathTooLong
from rdl.paths import LevelPartition, exact_levels, level_partition
from rdl.structure import (
    CrStructure, Violation, claim1_check, detect_cr_structure, min_hitting_set, pattern_check,
)
from rdl.suites import random_view


def _pattern_view(assignment: dict[int, int]):
    """Explicit c_r pattern on the given vertices with the given class indices."""
    vs = sorted(assignment)
    n = max(vs)
    pairs = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b:
                ca, cb = assignment.get(a, 0), assignment.get(b, 0)
                pairs[(a, b)] = RED if ca > cb else BLUE
    return materialize(Explicit.from_pairs(n, pairs, 2), vs)


def _all_blue(n: int):
    return _pattern_view({v: 0 for v in range(1, n + 1)})


class TestPatternCheck:
    def test_extremal_passes(self):
        view = prefix(Extremal(4), 40)
        classes = [[v for v in view.vertices if v % 4 == i] for i in range(4)]
        assert pattern_check(view, classes).ok

    def test_single_flip(self):
        view = prefix(Perturbed(Extremal(4), {(1, 2): RED}), 40)
        classes = [[v for v in view.vertices if v % 4 == i] for i in range(4)]
        report = pattern_check(view, classes)
        assert report.violations == (Violation((1, 2), BLUE, RED),)
        assert report.to_lines() == ["(1,2) expected=2 actual=1"]

    def test_single_class_all_blue(self):
        view = _all_blue(7)
        assert pattern_check(view, [view.vertices]).ok

    def test_exclude(self):
        view = prefix(Perturbed(Extremal(3), {(1, 2): RED}), 12)
        classes = [[v for v in view.vertices if v % 3 == i and v != 1] for i in range(3)]
        assert pattern_check(view, classes, exclude=[1]).ok

    def test_violations_sorted(self):
        view = random_view(10, 1)
        report = pattern_check(view, [view.vertices[:5], view.vertices[5:]])
        edges = [v.edge for v in report.violations]
        assert edges == sorted(edges) and report.ok == (not edges)

    @pytest.mark.parametrize("classes, exclude", [
        ([[1, 2], [2, 3]], ()),
        ([[1, 2]], ()),
        ([[1, 2, 3, 9]], ()),
        ([[1, 2, 3]], [3]),
    ])
    def test_malformed(self, classes, exclude):
        with pytest.raises(ValueError, match="malformed partition"):
            pattern_check(_all_blue(3), classes, exclude)


class TestRigidity:
    @pytest.mark.parametrize("r, n", [(r, n) for r in (2, 3) for n in range(2 * r, 10)])
    def test_extremal_unique_partition(self, r, n):
        view = prefix(Extremal(r), n)
        passing = []
        for labels in itertools.product(range(r), repeat=n):
            if len(set(labels)) < r:
                continue
            classes = [[v for v, c in zip(view.vertices, labels) if c == i] for i in range(r)]
            if pattern_check(view, classes).ok:
                passing.append(labels)
        assert passing == [tuple(v % r for v in view.vertices)]

    @given(st.lists(st.integers(0, 2), min_size=6, max_size=9))
    @settings(max_examples=15, deadline=None)
    def test_random_pattern_unique(self, labels):
        r = 3
        counts = [labels.count(i) for i in range(r)]
        if min(counts) < 2:
            return
        view = _pattern_view({v: c for v, c in enumerate(labels, start=1)})
        passing = 0
        for other in itertools.product(range(r), repeat=len(labels)):
            classes = [[v for v, c in zip(view.vertices, other) if c == i] for i in range(r)]
            if all(classes) and pattern_check(view, classes).ok:
                passing += 1
                assert list(other) == labels
        assert passing == 1


class TestHittingSet:
    def test_basic(self):
        assert min_hitting_set([], 3) == ()
        assert min_hitting_set([{1, 2}, {2, 3}], 3) == (2,)
        assert min_hitting_set([{1, 2}, {3, 4}], 3) == (1, 3)
        assert min_hitting_set([{1, 2}, {3, 4}], 1) is None
        assert min_hitting_set([set()], 5) is None

    @given(st.lists(st.sets(st.integers(1, 8), min_size=1, max_size=3), max_size=10))
    @settings(max_examples=80, deadline=None)
    def test_against_brute_force(self, family):
        want = None
        for k in range(0, 9):
            for cand in itertools.combinations(range(1, 9), k):
                if all(set(cand) & s for s in family):
                    want = cand
                    break
            if want is not None:
                break
        assert min_hitting_set(family, 8) == want


def _brute_detect(view, r, limit):
    for k in range(limit + 1):
        for removed in itertools.combinations(view.vertices, k):
            rest = view.without(removed)
            levels = exact_levels(rest, RED)
            if max(levels.values()) >= r:
                continue
            classes = [tuple(v for v in rest.vertices if levels[v] == i) for i in range(r)]
            if all(classes) and pattern_check(rest, classes).ok:
                return removed, tuple(classes)
    return None


class TestDetector:
    def test_extremal(self):
        found = detect_cr_structure(prefix(Extremal(3), 60), 3)
        assert found.exceptional == ()
        assert found.classes == tuple(tuple(v for v in range(1, 61) if v % 3 == i) for i in range(3))

    def test_red_block(self):
        overrides = {(a, b): RED for a in (1, 2, 3) for b in (1, 2, 3) if a != b}
        view = prefix(Perturbed(Extremal(3), overrides), 60)
        found = detect_cr_structure(view, 3)
        assert set(found.exceptional) <= {1, 2, 3}
        assert pattern_check(view.without(found.exceptional), found.classes).ok

    def test_random_is_not_cr(self):
        for seed in range(3):
            with pytest.raises(NotCrStructure) as info:
                detect_cr_structure(random_view(30, seed, red_weight=5), 3)
            assert info.value.residual_violations > 0

    def test_too_few_classes(self):
        with pytest.raises(NotCrStructure):
            detect_cr_structure(_all_blue(9), 2)
        assert detect_cr_structure(_all_blue(9), 1).classes == (tuple(range(1, 10)),)

    def test_red_path_too_long(self):
        with pytest.raises(RedPathTooLong):
            detect_cr_structure(prefix(Extremal(4), 40), 2, max_exceptional=3)

    def test_lines(self):
        found = CrStructure((1, 5), ((2, 3), (4,)))
        assert found.to_lines() == ["U: 1 5", "class 0: 2 3", "class 1: 4"]
        assert CrStructure((), ((1,),)).to_lines() == ["U:", "class 0: 1"]

    def test_bad_r(self):
        with pytest.raises(ValueError):
            detect_cr_structure(_all_blue(3), 0)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_brute_force(self, seed):
        rng = random.Random(seed)
        r = rng.choice((2, 3))
        n = rng.randint(2 * r + 1, 10)
        touched = rng.sample(range(1, n + 1), rng.randint(1, 3))
        overrides = {(a, b): rng.choice((RED, BLUE)) for a in touched
                     for b in range(1, n + 1) if a != b and rng.random() < 0.5}
        view = prefix(Perturbed(Extremal(r), overrides), n)
        want = _brute_detect(view, r, 5)
        try:
            found = detect_cr_structure(view, r, max_exceptional=5)
            got = (found.exceptional, found.classes)
        except NotCrStructure:
            got = None
        assert got == want

    @pytest.mark.parametrize("r", [2, 3, 4])
    @pytest.mark.parametrize("u", [1, 3, 5])
    def test_recovers_perturbations(self, r, u):
        rng = random.Random(r * 10 + u)
        overrides = {(a, b): rng.choice((RED, BLUE)) for a in range(1, u + 1)
                     for b in range(1, 60) if a != b and rng.random() < 0.3}
        view = prefix(Perturbed(Extremal(r), overrides), 60)
        found = detect_cr_structure(view, r, max_exceptional=u)
        assert len(found.exceptional) <= u
        assert pattern_check(view.without(found.exceptional), found.classes).ok


class TestClaim1:
    def test_examples(self):
        view = prefix(Extremal(4), 16)
        assert claim1_check(view, level_partition(view, RED)) is None
        single = prefix(Extremal(2), 1)
        assert claim1_check(single, level_partition(single, RED)) is None

    @given(seed=st.integers(0, 10**6), n=st.integers(1, 12))
    @settings(max_examples=60, deadline=None)
    def test_holds_for_any_colouring(self, seed, n):
        view = random_view(n, seed)
        assert claim1_check(view, LevelPartition(exact_levels(view, RED), RED, view.vertices)) is None

    def test_reports_counterexample(self):
        # a hand-made (invalid) partition: both 1 and 2 at level 0 with a red edge between them
        view = _pattern_view({1: 1, 2: 0, 3: 0})
        bogus = LevelPartition({1: 0, 2: 0, 3: 0}, RED)
        assert claim1_check(view, bogus) == 2
