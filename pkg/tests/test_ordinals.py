import pytest
from hypothesis import given, strategies as st

from witnessbench import ordinals as O
from witnessbench.ordinals import CodedOrdinal, OrdinalM, SeriesOrdinal

from oracles import ordinal_cmp, split_code

codes = st.integers(min_value=0, max_value=4000)
levels = st.integers(min_value=1, max_value=3)


class TestCoding:
    def test_level_one_examples(self):
        assert O.encode(OrdinalM.one(0, 0)).code == 0
        assert O.encode(OrdinalM.one(1, 1)).code == 5

    def test_level_two_omega_to_the_omega(self):
        omega = OrdinalM.one(1, 0)
        assert O.encode(omega).code == 1
        assert O.encode(OrdinalM.sum([omega])).code == 2

    def test_nu_theta(self):
        assert (O.nu(0), O.theta(0)) == (0, 0)
        assert (O.nu(5), O.theta(5)) == (1, 1)

    @given(codes)
    def test_nu_theta_match_factorisation(self, x):
        assert (O.nu(x), O.theta(x)) == split_code(x)

    @given(codes, levels)
    def test_decode_encode_roundtrip(self, x, m):
        o = O.decode(x, m)
        assert O.encode(o) == CodedOrdinal(m, x)
        assert O.decode(O.encode(o)) == o

    def test_bad_exponent_order_rejected(self):
        one = OrdinalM.one(0, 1)
        two = OrdinalM.one(0, 2)
        with pytest.raises(O.InvalidCode):
            OrdinalM.sum([one, two])
        with pytest.raises(O.InvalidCode):
            O.code_from_exponents([0, 1], 2)

    def test_negative_code(self):
        with pytest.raises(O.InvalidCode):
            CodedOrdinal(1, -1)
        with pytest.raises(O.InvalidCode):
            O.nu(-3)


class TestOrder:
    def test_examples(self):
        assert O.less(0, 1, 1)
        assert not O.less(7, 7, 2)
        assert O.less(2, 2 + 1, 2)

    def test_level_mismatch(self):
        with pytest.raises(O.LevelMismatch):
            O.less(CodedOrdinal(1, 0), CodedOrdinal(2, 0))
        with pytest.raises(O.LevelMismatch):
            O.less(1, 2)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_isomorphic_to_cantor_normal_form(self, m):
        for a in range(64):
            for b in range(64):
                assert O.less(a, b, m) == (ordinal_cmp(a, b, m) < 0), (a, b, m)

    @given(codes, codes, codes, levels)
    def test_strict_total_order(self, a, b, c, m):
        assert not O.less(a, a, m)
        if a != b:
            assert O.less(a, b, m) != O.less(b, a, m)
        if O.less(a, b, m) and O.less(b, c, m):
            assert O.less(a, c, m)

    @given(st.integers(min_value=1, max_value=4000), st.integers(min_value=1, max_value=3))
    def test_eta_is_largest_exponent(self, a, p):
        exps = [i for i in range(a.bit_length()) if a >> i & 1]
        e = O.eta(a, p)
        assert e in exps
        assert all(x == e or ordinal_cmp(x, e, p) < 0 for x in exps)

    def test_eta_examples(self):
        assert O.eta(2**3 + 2**1, 1) == 3
        with pytest.raises(O.InvalidCode):
            O.eta(0, 1)


class TestSeries:
    def test_level_one_lexicographic(self):
        assert O.compare_series(SeriesOrdinal.base(3, 0), SeriesOrdinal.base(2, 9)) == 1

    def test_longer_sum_is_larger(self):
        a, b = SeriesOrdinal.base(2, 0), SeriesOrdinal.base(1, 0)
        assert O.compare_series(SeriesOrdinal.of([a, b], 2), SeriesOrdinal.of([a], 2)) == 1

    def test_absorbed_summands_ignored(self):
        small, big = SeriesOrdinal.base(0, 1), SeriesOrdinal.base(5, 0)
        # w^small + w^big == w^big
        assert O.compare_series(SeriesOrdinal.of([small, big], 2), SeriesOrdinal.of([big], 2)) == 0

    def test_level_mismatch(self):
        with pytest.raises(O.LevelMismatch):
            O.compare_series(SeriesOrdinal.base(0, 0), SeriesOrdinal.of([], 2))


class TestFiniteOrderRecursion:
    def test_base_clause(self):
        assert O.pr_finite_order_eval(lambda _: 7, lambda a, m, r: r + 1, lambda m: m - 1, 1, 0, 0) == 7

    def test_against_loop(self):
        # predecessor in the level-1 order on codes w*0+b = 2b: each step drops b by one
        def pred(m):
            a, b = O.nu(m), O.theta(m)
            return O.encode(OrdinalM.one(a, b - 1)).code
        m = O.encode(OrdinalM.one(0, 5)).code
        got = O.pr_finite_order_eval(lambda _: 1, lambda a, k, r: r + 1, pred, 1, m, 0)
        expect, cur = 1, m
        while cur:
            cur = pred(cur)
            expect += 1
        assert got == expect == 6

    def test_descent_violation(self):
        with pytest.raises(O.DescentViolation):
            O.pr_finite_order_eval(lambda _: 0, lambda a, m, r: r, lambda m: m, 1, 3, 0)

    def test_budget(self):
        with pytest.raises(O.BudgetExceeded):
            O.pr_finite_order_eval(lambda _: 0, lambda a, m, r: r, lambda m: m - 2, 1, 2 * 10**4, 0, budget=10)
