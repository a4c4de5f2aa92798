import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relscheme import relation as R


def brute_product(a, b):
    """Triple-loop oracle for relation composition."""
    n = a.n
    out = set()
    for x in range(n):
        for g in range(n):
            if (x, g) in a:
                for y in range(n):
                    if (g, y) in b:
                        out.add((x, y))
    return out


def random_relation(rng, n):
    return R.Relation(n, (rng.getrandbits(n) for _ in range(n)))


@st.composite
def relations(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    rows = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    return R.Relation(n, rows)


@st.composite
def relation_pairs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    rows1 = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    rows2 = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    return R.Relation(n, rows1), R.Relation(n, rows2)


class TestConstruction:
    def test_empty_domain_rejected(self):
        with pytest.raises(ValueError):
            R.Relation(0, ())

    def test_row_count_checked(self):
        with pytest.raises(ValueError):
            R.Relation(3, (0, 0))

    def test_out_of_range_bits_rejected(self):
        with pytest.raises(ValueError):
            R.Relation(2, (0b100, 0))

    def test_empty_and_full_representable(self):
        assert R.empty(4).is_empty()
        assert R.full(4).is_full()
        assert R.empty(1).n == 1

    def test_from_pairs_range_check(self):
        with pytest.raises(ValueError):
            R.from_pairs(3, [(0, 3)])

    def test_immutable(self):
        r = R.diagonal(3)
        with pytest.raises(AttributeError):
            r.n = 5


class TestProduct:
    def test_identity(self):
        rng = random.Random(0)
        for n in (1, 4, 9):
            a = random_relation(rng, n)
            d = R.diagonal(n)
            assert a.product(d) == a
            assert d.product(a) == a

    def test_three_cycle_squared(self):
        c3 = R.from_pairs(3, [(0, 1), (1, 2), (2, 0)])
        assert set(c3.product(c3).pairs()) == {(0, 2), (1, 0), (2, 1)}

    def test_empty_absorbs(self):
        rng = random.Random(1)
        a = random_relation(rng, 5)
        assert R.empty(5).product(a).is_empty()
        assert a.product(R.empty(5)).is_empty()

    def test_domain_mismatch(self):
        with pytest.raises(ValueError):
            R.full(3).product(R.full(4))

    @settings(max_examples=60)
    @given(relation_pairs(max_n=16))
    def test_matches_brute_force(self, pair):
        a, b = pair
        assert set(a.product(b).pairs()) == brute_product(a, b)


class TestTranspose:
    def test_diagonal_symmetric(self):
        assert R.diagonal(4).transpose() == R.diagonal(4)

    def test_single_pair(self):
        r = R.from_pairs(2, [(0, 1)])
        assert set(r.transpose().pairs()) == {(1, 0)}

    @settings(max_examples=50)
    @given(relations())
    def test_involution(self, a):
        assert a.transpose().transpose() == a

    @settings(max_examples=40)
    @given(relation_pairs())
    def test_antihomomorphism(self, pair):
        a, b = pair
        assert a.product(b).transpose() == b.transpose().product(a.transpose())

    @settings(max_examples=40)
    @given(relation_pairs())
    def test_distributes_over_union(self, pair):
        a, b = pair
        assert a.union(b).transpose() == a.transpose().union(b.transpose())

    def test_numpy_path_agrees(self):
        rng = random.Random(3)
        n = 70
        a = random_relation(rng, n)
        assert a._transpose_numpy() == R.Relation(
            n, [sum(1 << x for x in range(n) if (x, b) in a) for b in range(n)]
        )


class TestSetAlgebra:
    def test_union_with_complement_is_full(self):
        rng = random.Random(2)
        a = random_relation(rng, 6)
        assert a.union(a.complement()).is_full()

    def test_diagonal_meets_complement_empty(self):
        d = R.diagonal(5)
        assert d.intersect(d.complement()).is_empty()

    def test_cycle_symmetrization(self):
        c3 = R.from_pairs(3, [(0, 1), (1, 2), (2, 0)])
        sym = c3.union(c3.transpose())
        assert sym.pair_count() == 6
        assert sym.is_symmetric()


class TestNormAndDegrees:
    def test_diagonal_norm(self):
        assert R.diagonal(5).norm() == 1

    def test_full_norm(self):
        assert R.full(5).norm() == 5

    def test_cycle_norm(self):
        assert R.cycle(3).norm() == 1

    @settings(max_examples=40)
    @given(relation_pairs())
    def test_submultiplicative(self, pair):
        a, b = pair
        assert a.product(b).norm() <= a.norm() * b.norm()

    def test_regularity(self):
        assert R.cycle(3).is_regular()
        assert not R.from_pairs(3, [(0, 1), (0, 2)]).is_regular()

    def test_biregular_norm_equals_transpose_norm(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randrange(2, 10)
            a = random_relation(rng, n)
            if a.is_biregular():
                assert a.norm() == a.transpose().norm()
        # biregular example: a cycle
        c = R.cycle(7)
        assert c.is_biregular() and c.norm() == c.transpose().norm()


class TestNeighborhood:
    def test_singleton_is_row(self):
        r = R.from_pairs(4, [(0, 1), (0, 3), (2, 0)])
        assert r.neighborhood({0}) == {1, 3}

    def test_empty_set(self):
        assert R.full(3).neighborhood(set()) == set()

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            R.full(3).neighborhood({5})

    def test_closure_reaches_everything(self):
        c = R.cycle(6)
        t = {0}
        for _ in range(6):
            t = t | c.neighborhood(t)
        assert t == set(range(6))


class TestPowerWithLoops:
    def test_k1_is_union_with_diagonal(self):
        rng = random.Random(7)
        a = random_relation(rng, 6)
        assert a.power_with_loops(1) == a.union(R.diagonal(6))

    def test_three_cycle_square_full(self):
        c3 = R.from_pairs(3, [(0, 1), (1, 2), (2, 0)])
        assert c3.power_with_loops(2).is_full()

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            R.full(2).power_with_loops(0)

    @settings(max_examples=30)
    @given(relations(max_n=8), st.integers(1, 5))
    def test_monotone_in_k(self, a, k):
        assert a.power_with_loops(k) <= a.power_with_loops(k + 1)

    @settings(max_examples=25)
    @given(relations(max_n=8))
    def test_stabilizes(self, a):
        prev = a.power_with_loops(1)
        stable_at = None
        for k in range(2, a.n + 3):
            cur = a.power_with_loops(k)
            if cur == prev and stable_at is None:
                stable_at = k
            if stable_at is not None:
                assert cur == prev
            prev = cur


class TestTextFormats:
    def test_edge_list_roundtrip(self):
        rng = random.Random(11)
        a = random_relation(rng, 7)
        assert R.parse_edge_list(a.to_edge_list()) == a

    def test_dense_roundtrip(self):
        rng = random.Random(12)
        a = random_relation(rng, 7)
        assert R.parse_dense(a.to_dense_text()) == a

    def test_edge_list_out_of_range(self):
        with pytest.raises(ValueError, match="line 3"):
            R.parse_edge_list("2\n0 1\n0 2\n")

    def test_edge_list_bad_pair(self):
        with pytest.raises(ValueError, match="line 2"):
            R.parse_edge_list("2\n0\n")

    def test_dense_out_of_range_char(self):
        with pytest.raises(ValueError, match="line 2"):
            R.parse_dense("2\n02\n00\n")

    def test_dense_wrong_row_count(self):
        with pytest.raises(ValueError):
            R.parse_dense("3\n000\n000\n")

    def test_empty_input(self):
        with pytest.raises(ValueError, match="line 1"):
            R.parse_edge_list("")
