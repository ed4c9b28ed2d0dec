import random

import pytest

from plinv.cache import Cache
from plinv.curves import (
    ADDITIVE,
    GOOD,
    NONSPLIT,
    SPLIT,
    CurveError,
    WeierstrassCurve,
    conductor,
    curve_by_label,
    curve_table,
    curve_l_invariant,
    invariants,
    is_fundamental_discriminant,
    j_of_q,
    j_q_coefficients,
    kronecker,
    minimal_model_at,
    point_count,
    quadratic_twist,
    reduction_type,
    tate_period,
    _legendre,
    _node_is_split,
)
from plinv.padic import PadicNumber

from helpers import assert_same


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    return Cache(str(tmp_path_factory.mktemp("jq")))


def scale_up(curve, u):
    """The non-minimal model with x -> x/u^2, y -> y/u^3."""
    a1, a2, a3, a4, a6 = curve.a_invariants
    return WeierstrassCurve(a1 * u, a2 * u ** 2, a3 * u ** 3, a4 * u ** 4, a6 * u ** 6)


class TestInvariants:
    def test_y2_x3_minus_x(self):
        e = WeierstrassCurve(0, 0, 0, -1, 0)
        c4, c6, disc, j = invariants(e)
        assert (c4, disc, j) == (48, 64, 1728)

    def test_11a1_discriminant(self):
        e = curve_by_label("11a1")
        assert e.discriminant == -161051 == -(11 ** 5)

    def test_scaling_preserves_j(self):
        e = WeierstrassCurve(0, 0, 0, -1, 0)
        big = scale_up(e, 2)
        assert big.discriminant == 64 * 2 ** 12
        assert big.j_invariant == e.j_invariant

    def test_singular_model_rejected(self):
        with pytest.raises(CurveError, match="singular"):
            WeierstrassCurve(0, 0, 0, 0, 0)

    def test_identity_holds_for_table(self):
        for label, (e, _) in curve_table().items():
            c4, c6, disc, _ = invariants(e)
            assert 1728 * disc == c4 ** 3 - c6 ** 2


class TestMinimalModel:
    def test_11a1_already_minimal(self):
        e = curve_by_label("11a1")
        assert minimal_model_at(e, 11) == e

    def test_two_power_descent(self):
        e = WeierstrassCurve(0, 0, 0, -(2 ** 6), 0)
        m = minimal_model_at(e, 2)
        assert m.a_invariants == (0, 0, 0, -4, 0)
        # v(disc) drops by exactly 12 and the result is 2-minimal
        assert e.discriminant == m.discriminant * 2 ** 12
        assert minimal_model_at(m, 2) == m

    def test_good_prime_untouched(self):
        e = curve_by_label("11a1")
        assert minimal_model_at(e, 7) == e

    def test_scale_up_round_trip(self):
        rng = random.Random(2024)
        for _ in range(8):
            ai = [rng.randrange(-3, 4) for _ in range(5)]
            try:
                e = WeierstrassCurve(*ai)
            except CurveError:
                continue
            for p in (2, 3, 5, 7):
                big = scale_up(e, p)
                m = minimal_model_at(big, p)
                # descent must recover the original discriminant valuation
                dv_orig = minimal_model_at(e, p).discriminant
                assert abs(m.discriminant) == abs(dv_orig)


class TestReduction:
    def test_11a1_at_11_split(self):
        r = reduction_type(curve_by_label("11a1"), 11)
        assert r.kind == SPLIT and r.v_delta == 5 and r.ap == 1
        # quadratic-residue oracle: -c6 = -20008 = 1 mod 11, a square
        assert _legendre(-curve_by_label("11a1").c6, 11) == 1

    def test_11a1_at_2_good(self):
        r = reduction_type(curve_by_label("11a1"), 2)
        assert r.kind == GOOD and r.ap == -2
        # point-count oracle by hand: 4 affine points + infinity
        assert point_count(curve_by_label("11a1"), 2) == 5

    def test_additive_at_2(self):
        r = reduction_type(WeierstrassCurve(0, 0, 0, -1, 0), 2)
        assert r.kind == ADDITIVE and r.ap == 0

    def test_split_test_two_routes_agree(self):
        # tangent-cone rationality == quadratic residue of -c6 at odd p
        for label in ("11a1", "14a1", "15a1", "17a1", "21a1", "37b1"):
            e = curve_by_label(label)
            for p in (3, 5, 7, 11, 13, 17, 37):
                r = reduction_type(e, p)
                if r.is_multiplicative and p != 2:
                    assert _node_is_split(r.minimal, p) == (r.kind == SPLIT)

    def test_multiplicative_iff_vc4_zero(self):
        for label, (e, _) in curve_table().items():
            for p in (2, 3, 5, 7, 11, 13, 17, 37):
                r = reduction_type(e, p)
                if r.is_multiplicative:
                    assert r.minimal.c4 % p != 0 and r.v_delta > 0
                    assert r.v_j == -r.v_delta < 0

    def test_hasse_bound(self):
        for label, (e, _) in curve_table().items():
            for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
                r = reduction_type(e, p)
                if r.kind == GOOD:
                    assert r.ap * r.ap <= 4 * p

    def test_semistable_conductors(self):
        for label in ("11a1", "11a2", "11a3", "14a1", "15a1", "17a1", "21a1", "37b1"):
            e, n = curve_table()[label]
            assert conductor(e) == n


class TestKronecker:
    def test_small_values(self):
        assert kronecker(5, 11) == 1
        assert kronecker(-4, 11) == -1
        assert kronecker(-7, 11) == 1
        assert kronecker(13, 11) == -1
        assert kronecker(12, 11) == 1
        assert kronecker(11, 11) == 0

    def test_matches_legendre_for_odd_primes(self):
        for p in (3, 5, 7, 13):
            for d in range(-20, 21):
                if d % p:
                    assert kronecker(d, p) == _legendre(d, p)

    def test_fundamental_discriminants(self):
        fundamentals = {-8, -7, -4, -3, 5, 8, 12, 13, -11, 21}
        not_fundamental = {0, 1, 2, 3, 4, -1, -2, -5, 9, 25, 45}
        for d in fundamentals:
            assert is_fundamental_discriminant(d), d
        for d in not_fundamental:
            assert not is_fundamental_discriminant(d), d


class TestTwist:
    def test_twist_preserves_j(self):
        e = curve_by_label("11a1")
        for d in (5, -4, -7, 13):
            t = quadratic_twist(e, d)
            assert t.j_invariant == e.j_invariant

    def test_twist_discriminant_scale(self):
        e = curve_by_label("11a1")
        for d in (5, -4, -7):
            t = quadratic_twist(e, d)
            assert abs(t.discriminant) == abs(d) ** 6 * abs(e.discriminant)

    def test_twist_flips_split_by_chi(self):
        e = curve_by_label("11a1")
        for d in (5, -4, -7, 13):
            t = quadratic_twist(e, d)
            r = reduction_type(t, 11)
            expected = SPLIT if kronecker(d, 11) == 1 else NONSPLIT
            assert r.kind == expected

    def test_bundled_twists_match_twist_op(self):
        e = curve_by_label("11a1")
        for d, label in ((5, "11a1tw5"), (-4, "11a1tw-4"), (-7, "11a1tw-7")):
            t = quadratic_twist(e, d)
            assert t.a_invariants == curve_by_label(label).a_invariants


class TestJSeries:
    def test_classical_coefficients(self):
        c = j_q_coefficients(3, Cache(enabled=False))
        assert c[0] == 744
        assert c[1] == 196884
        assert c[2] == 21493760
        assert c[3] == 864299970

    def test_cache_round_trip(self, tmp_path):
        cache = Cache(str(tmp_path))
        a = j_q_coefficients(5, cache)
        b = j_q_coefficients(4, cache)  # served from disk
        assert a[:5] == b


class TestTatePeriod:
    PAIRS = [("11a1", 11), ("15a1", 5), ("21a1", 3), ("17a1", 17), ("14a1", 7), ("14a1", 2), ("37b1", 37)]

    def test_round_trip_defining_identity(self, cache):
        prec = 14
        for label, p in self.PAIRS:
            e = curve_by_label(label)
            red = reduction_type(e, p)
            tp = tate_period(e, p, prec, cache)
            assert tp.q.ord() == red.v_delta
            jq = j_of_q(tp.q, cache=cache)
            jexp = PadicNumber.from_fraction(p, red.minimal.j_invariant, prec + 10)
            d = jq - jexp
            # agree to >= prec - v(delta) - 2 digits beyond ord(j) = -v(delta)
            assert d.is_zero
            assert d.abs_prec - (-red.v_delta) >= prec - red.v_delta - 2

    def test_leading_term(self, cache):
        for label, p in [("11a1", 11), ("15a1", 5), ("37b1", 37)]:
            e = curve_by_label(label)
            tp = tate_period(e, p, 16, cache)
            m = tp.v_delta
            j = PadicNumber.from_fraction(p, reduction_type(e, p).minimal.j_invariant, 40)
            qj = tp.q * j
            one = PadicNumber.from_int(p, 1, 30)
            assert (qj - one).ord() >= m
            # after removing the 744-correction the next term is O(q^2)
            assert (qj - one - 744 * tp.q).ord() >= 2 * m

    def test_no_tate_period_at_good_prime(self):
        with pytest.raises(CurveError, match="no Tate period"):
            tate_period(curve_by_label("11a1"), 7)

    def test_isogeny_class_invariance(self, cache):
        vals = [curve_l_invariant(curve_by_label(l), 11, 14, cache) for l in ("11a1", "11a2", "11a3")]
        assert_same(vals[0], vals[1], 14)
        assert_same(vals[0], vals[2], 14)

    def test_li_stable_under_precision(self, cache):
        lo = curve_l_invariant(curve_by_label("11a1"), 11, 12, cache)
        hi = curve_l_invariant(curve_by_label("11a1"), 11, 20, cache)
        d = lo - hi
        assert d.is_zero and d.abs_prec >= lo.abs_prec

    def test_li_matches_li_of_period(self, cache):
        from plinv.periods import li

        tp = tate_period(curve_by_label("11a1"), 11, 14, cache)
        assert_same(curve_l_invariant(curve_by_label("11a1"), 11, 14, cache),
                    li(tp.period, "iwasawa", 14))

    def test_twist_invariance_when_split(self, cache):
        # chi_D(11) = 1: locally trivial twist keeps the Tate parameter
        l0 = curve_l_invariant(curve_by_label("11a1"), 11, 14, cache)
        lt = curve_l_invariant(curve_by_label("11a1tw5"), 11, 14, cache)
        assert_same(l0, lt, 14)
