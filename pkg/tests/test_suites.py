from __future__ import annotations

import numpy as np
import pytest

from rdl.colouring import BLUE, RED, DensityZero, Explicit, materialize
from rdl.paths import DirectedPath, LevelPartition, exact_levels, level_partition, splice_via_matching, validate_path
from rdl.suites import (
    Check, bitrev_violations, confinement_violation, level_consistency, random_view, run_suite,
    splice_instance,
)


def test_check_lines():
    assert Check("a", True).to_line() == "PASS a"
    assert Check("b", False, "3 bad").to_line() == "FAIL b : 3 bad"


@pytest.mark.parametrize("name, n", [("density-zero", 64), ("extremal", 24), ("product", 12), ("claims", 10)])
def test_suites_pass(name, n):
    checks = run_suite(name, n, walks=10, views=20)
    assert checks and all(c.ok for c in checks), [c.to_line() for c in checks if not c.ok]


def test_all_concatenates():
    names = [c.name for c in run_suite("all", 10, walks=5, views=5)]
    assert any(x.startswith("dz-") for x in names) and any(x.startswith("claim1") for x in names)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", 10)


def test_bitrev_detects_flip():
    v = np.arange(1, 33)
    colours = DensityZero().colour_matrix(v)
    assert bitrev_violations(32, 3, colours) == 0
    colours[0, 1], colours[1, 0] = colours[1, 0], colours[0, 1]
    assert bitrev_violations(32, 1, colours) > 0


def test_confinement():
    assert confinement_violation(DirectedPath((1, 3, 2, 4), RED), 1) is None
    assert confinement_violation(DirectedPath((1, 2, 3), RED), 1) == 2


def test_level_consistency_two_cycle():
    # red 2-cycle between 1 and 2, both red into 3: the edge 1 -> 2 stays on one level
    pairs = {(1, 2): RED, (2, 1): RED, (1, 3): RED, (2, 3): RED, (3, 1): BLUE, (3, 2): BLUE}
    view = materialize(Explicit.from_pairs(3, pairs, 2), [1, 2, 3])
    levels = exact_levels(view, RED)
    assert levels == {1: 2, 2: 2, 3: 0}
    assert level_consistency(view, LevelPartition(levels, RED, view.vertices))
    assert not level_consistency(view, LevelPartition({1: 0, 2: 1, 3: 0}, RED, view.vertices))


def test_level_consistency_random():
    for seed in range(30):
        view = random_view(9, seed)
        assert level_consistency(view, level_partition(view, RED))


@pytest.mark.parametrize("seed", range(20))
def test_splice_instances_are_valid(seed):
    view, p, q, matching = splice_instance(seed)
    assert validate_path(view, p).ok and validate_path(view, q).ok
    assert all(view.colour(a, b) == BLUE for a, b in matching)
    out = splice_via_matching(view, p, q, matching)
    assert validate_path(view, out).ok
    assert sorted(out.vertices) == sorted(p.vertices + q.vertices)


def test_random_view_deterministic():
    assert random_view(8, 3) == random_view(8, 3)
    assert random_view(8, 3, red_weight=9) != random_view(8, 3, red_weight=1)
