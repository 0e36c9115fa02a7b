from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdl.colouring import (
    BLUE, RED, DensityZero, Explicit, Extremal, Perturbed, ProductExtremal,
    SeededRandom, class_tuple, materialize, parse_rule, parse_view, prefix, read_view,
    residue_class, serialize_view, write_view,
)
from rdl.errors import InvalidPairError, OutOfDomainError, ParseError

pos = st.integers(min_value=1, max_value=10**6)


def _dz_reference(m: int, n: int) -> int:
    """DensityZero straight from the residue description, no bit tricks."""
    t = 1
    while m % 2**t == n % 2**t:
        t += 1
    half = 2 ** (t - 1)
    return RED if m % 2**t < half else BLUE


class TestExamples:
    def test_density_zero(self):
        dz = DensityZero()
        assert dz.colour_of(1, 2) == BLUE and dz.colour_of(2, 1) == RED
        assert dz.colour_of(1, 3) == RED and dz.colour_of(3, 1) == BLUE

    def test_extremal(self):
        e = Extremal(3)
        assert e.colour_of(1, 4) == BLUE and e.colour_of(4, 1) == BLUE
        assert e.colour_of(3, 1) == BLUE and e.colour_of(1, 3) == RED

    def test_product(self):
        p = ProductExtremal((2, 3))
        assert p.colour_count == 3
        assert p.colour_of(5, 6) == 1 and p.colour_of(6, 5) == 3

    def test_materialize(self):
        view = materialize(Extremal(2), [1, 2, 3, 4])
        assert set(view.edges(RED)) == {(1, 2), (1, 4), (3, 2), (3, 4)}
        assert materialize(DensityZero(), [7]).edges(RED) == []
        assert len(prefix(DensityZero(), 8).edges(RED)) == 28

    def test_residues(self):
        assert residue_class(7, 3) == 1
        assert class_tuple(6, (2, 3)) == (0, 0)
        assert class_tuple(5, (2, 3)) == (1, 2)
        with pytest.raises(ValueError):
            residue_class(7, 0)


class TestErrors:
    def test_loop_and_nonpositive(self):
        for rule in (DensityZero(), Extremal(3), SeededRandom(2, 1)):
            with pytest.raises(InvalidPairError):
                rule.colour_of(4, 4)
            with pytest.raises(InvalidPairError):
                rule.colour_of(0, 4)

    def test_explicit_domain(self):
        rule = Explicit(prefix(Extremal(2), 4).colours)
        assert rule.colour_of(1, 2) == RED
        with pytest.raises(OutOfDomainError):
            rule.colour_of(1, 5)

    def test_bad_constructions(self):
        with pytest.raises(ValueError):
            Extremal(1)
        with pytest.raises(ValueError):
            ProductExtremal((2, 1))
        with pytest.raises(ValueError):
            SeededRandom(2, 0, (1, 0))
        with pytest.raises(ValueError):
            Explicit(np.zeros((3, 3)))

    def test_parse_rule(self):
        assert parse_rule("density-zero") == DensityZero()
        assert parse_rule("extremal:4") == Extremal(4)
        assert parse_rule("product:2,3") == ProductExtremal((2, 3))
        assert parse_rule("random:3:9") == SeededRandom(3, 9)
        for bad in ("extremal", "extremal:x", "nope", "random:2", "density-zero:3"):
            with pytest.raises(ValueError):
                parse_rule(bad)


class TestScalarVersusVector:
    @pytest.mark.parametrize("rule", [
        DensityZero(), Extremal(2), Extremal(5), ProductExtremal((2, 3)), ProductExtremal((3, 2, 4)),
        SeededRandom(2, 17), SeededRandom(3, 2**63 + 5, (5, 1, 3)),
        Perturbed(Extremal(3), {(1, 2): RED, (5, 4): BLUE, (2, 9): RED}),
    ], ids=repr)
    def test_matrix_matches_colour_of(self, rule):
        vs = [1, 2, 3, 4, 5, 6, 7, 9, 12, 31, 64, 100, 1023]
        mat = rule.colour_matrix(vs)
        for i, m in enumerate(vs):
            for j, n in enumerate(vs):
                if m != n:
                    assert mat[i, j] == rule.colour_of(m, n), (m, n)
        row = rule.colour_row(vs[3], np.array([v for v in vs if v != vs[3]]))
        assert row.tolist() == [rule.colour_of(vs[3], v) for v in vs if v != vs[3]]

    @given(seed=st.integers(min_value=0, max_value=2**64 - 1),
           w=st.lists(st.integers(min_value=1, max_value=1000), min_size=2, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_seeded_random_agreement(self, seed, w):
        rule = SeededRandom(len(w), seed, tuple(w))
        vs = list(range(1, 13))
        mat = rule.colour_matrix(vs)
        assert all(mat[i, j] == rule.colour_of(i + 1, j + 1) for i in range(12) for j in range(12) if i != j)


class TestProperties:
    @given(pos, pos)
    def test_density_zero_reference_and_split(self, m, n):
        if m == n:
            return
        dz = DensityZero()
        assert dz.colour_of(m, n) == _dz_reference(m, n)
        assert {dz.colour_of(m, n), dz.colour_of(n, m)} == {RED, BLUE}

    @given(pos, pos, st.integers(min_value=2, max_value=9))
    def test_extremal_class_laws(self, m, n, r):
        if m == n:
            return
        e = Extremal(r)
        if m % r == n % r:
            assert e.colour_of(m, n) == e.colour_of(n, m) == BLUE
        elif m % r < n % r:
            assert (e.colour_of(m, n), e.colour_of(n, m)) == (BLUE, RED)

    def test_product_single_modulus_is_extremal(self):
        vs = list(range(1, 61))
        for r in range(2, 7):
            assert np.array_equal(ProductExtremal((r,)).colour_matrix(vs), Extremal(r).colour_matrix(vs))

    @given(pos, pos)
    def test_product_rule(self, m, n):
        if m == n:
            return
        moduli = (2, 3, 5)
        c = ProductExtremal(moduli).colour_of(m, n)
        a, b = class_tuple(m, moduli), class_tuple(n, moduli)
        if a == b:
            assert c == 4
        else:
            t = next(i for i in range(3) if a[i] != b[i])
            assert c == (t + 1 if a[t] > b[t] else 4)

    def test_view_adjacency_partitions_pairs(self):
        view = prefix(SeededRandom(3, 4), 15)
        pairs = [e for c in (1, 2, 3) for e in view.edges(c)]
        assert len(pairs) == len(set(pairs)) == 15 * 14
        for c in (1, 2, 3):
            outs = {(u, w) for u in view.vertices for w in view.out_neighbours(u, c)}
            ins = {(w, u) for u in view.vertices for w in view.in_neighbours(u, c)}
            assert outs == ins == set(view.edges(c))

    def test_determinism(self):
        assert prefix(SeededRandom(2, 5), 20) == prefix(SeededRandom(2, 5), 20)
        assert prefix(SeededRandom(2, 5), 20) != prefix(SeededRandom(2, 6), 20)

    def test_perturbed_overrides_only_listed_pairs(self):
        base = Extremal(3)
        rule = Perturbed(base, {(1, 2): RED})
        assert rule.touched == {1, 2}
        assert rule.colour_of(1, 2) == RED and base.colour_of(1, 2) == BLUE
        assert rule.colour_of(2, 1) == base.colour_of(2, 1)

    def test_view_ops(self):
        view = prefix(Extremal(3), 9)
        sub = view.without([1, 5])
        assert sub.vertices == (2, 3, 4, 6, 7, 8, 9)
        assert sub.colour(2, 3) == view.colour(2, 3)
        assert not sub.is_prefix() and view.is_prefix()
        flipped = view.recoloured({(1, 4): RED})
        assert flipped.colour(1, 4) == RED and view.colour(1, 4) == BLUE
        with pytest.raises(OutOfDomainError):
            view.colour(1, 10)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        view = prefix(Extremal(3), 9)
        rule, vs = parse_view(serialize_view(view))
        assert vs == tuple(range(1, 10))
        assert np.array_equal(rule.table, view.colours)
        write_view(view, tmp_path / "e.txt")
        assert read_view(tmp_path / "e.txt") == view

    @given(seed=st.integers(min_value=0, max_value=2**32), n=st.integers(min_value=1, max_value=12),
           k=st.integers(min_value=2, max_value=4))
    @settings(max_examples=30, deadline=None)
    def test_round_trip_random(self, seed, n, k):
        view = prefix(SeededRandom(k, seed), n)
        rule, _ = parse_view(serialize_view(view))
        assert np.array_equal(rule.table, view.colours) and rule.colour_count == k

    def test_format(self):
        text = serialize_view(prefix(Extremal(2), 2)).decode()
        assert text == "dcolour v1 n=2 colours=2\n1 2 1\n2 1 2\n"

    def test_comments_ignored(self):
        rule, _ = parse_view("# hi\ndcolour v1 n=2 colours=2\n# mid\n1 2 1\n2 1 2\n")
        assert rule.colour_of(1, 2) == RED

    @pytest.mark.parametrize("text, fragment", [
        ("dcolour v2 n=2 colours=2\n1 2 1\n2 1 2\n", "line 1: malformed header"),
        ("dcolour v1 n=2 colours=2\n1 2 1\n2 2 2\n", "line 3: loop"),
        ("dcolour v1 n=2 colours=2\n1 2 1\n1 2 1\n2 1 2\n", "line 3: duplicate"),
        ("dcolour v1 n=2 colours=2\n2 1 2\n", "incomplete table: missing pair (1,2)"),
        ("dcolour v1 n=2 colours=2\n1 2 3\n2 1 2\n", "line 2: colour 3"),
        ("dcolour v1 n=2 colours=2\n1 3 1\n2 1 2\n", "line 2: pair (1,3) outside"),
        ("dcolour v1 n=2 colours=2\n2 1 2\n1 2 1\n", "line 3: pair (1,2) out of lexicographic order"),
        ("dcolour v1 n=2 colours=2\n1  2 1\n2 1 2\n", "line 2: expected"),
        ("", "missing header"),
    ])
    def test_parse_errors(self, text, fragment):
        with pytest.raises(ParseError) as info:
            parse_view(text)
        assert fragment in str(info.value)

    def test_only_prefix_views(self):
        with pytest.raises(ValueError):
            serialize_view(materialize(Extremal(2), [2, 3]))
