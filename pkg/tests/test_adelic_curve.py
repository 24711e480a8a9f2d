import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelic_heights.adelic_curve import (
    AdelicFamily,
    LogLinear,
    NefStatus,
    Place,
    ToricCompactifiedDivisor,
    abs_value,
    boundary_height,
    canonical_fn,
    extended_height,
    global_energy,
    global_height,
    log_abs,
    nef_status,
    point_height,
    point_height_exact,
    product_formula_check,
    roof,
    strongly_nef_local_check,
    support,
    twist,
)
from adelic_heights.convex_calculus.functions import (
    AffinePiece,
    AlphaPiece,
    ConcaveFn,
)

INF = Place.infinity()


def hyperplane_divisor() -> ToricCompactifiedDivisor:
    return ToricCompactifiedDivisor(0, 1)


def canonical_family() -> AdelicFamily:
    return AdelicFamily(hyperplane_divisor())


def alpha_profile(alpha) -> ConcaveFn:
    a = F(alpha)
    return ConcaveFn([0], [AlphaPiece(a, 1, 0), AffinePiece(0, 1 / a)])


def alpha_family(alpha, place=Place.prime(2)) -> AdelicFamily:
    return AdelicFamily(hyperplane_divisor(), {place: alpha_profile(alpha)})


def closed_form_energy(alpha) -> float:
    a = F(alpha)
    if a >= F(1, 2):
        return -math.inf
    return float((2 - 3 * a) / (a * (2 * a - 1)))


def bounded_profile(rng: random.Random) -> ConcaveFn:
    """Random concave profile with slopes (1, 0): a bounded deviation
    from the canonical ramp."""
    kinks = rng.randint(1, 3)
    slopes = sorted(
        {F(rng.randint(1, 9), 10) for _ in range(kinks)} - {F(0), F(1)},
        reverse=True,
    )
    slopes = [F(1)] + slopes + [F(0)]
    bps = sorted(rng.sample(range(-5, 6), len(slopes) - 1))
    pieces = [AffinePiece(slopes[0], F(rng.randint(-3, 3)))]
    for b, s in zip(bps, slopes[1:]):
        b = F(b)
        val = pieces[-1].slope * b + pieces[-1].intercept
        pieces.append(AffinePiece(s, val - s * b))
    return ConcaveFn(bps, pieces)


rationals = st.fractions(
    min_value=F(-(10**6)), max_value=F(10**6), max_denominator=10**6
).filter(lambda q: q != 0)


class TestPlaces:
    def test_prime_validation(self):
        with pytest.raises(ValueError, match="prime"):
            Place.prime(6)
        Place.prime(2)
        Place.prime(97)

    def test_ordering(self):
        places = [INF, Place.prime(5), Place.prime(2)]
        assert sorted(places) == [Place.prime(2), Place.prime(5), INF]

    def test_abs_value_worked_example(self):
        q = F(12, 5)
        assert abs_value(q, Place.prime(2)) == F(1, 4)
        assert abs_value(q, Place.prime(3)) == F(1, 3)
        assert abs_value(q, Place.prime(5)) == F(5)
        assert abs_value(q, INF) == F(12, 5)

    def test_abs_value_of_one_and_p(self):
        for place in (Place.prime(2), Place.prime(7), INF):
            assert abs_value(1, place) == 1
        for p in (2, 3, 5, 11):
            assert abs_value(p, Place.prime(p)) == F(1, p)

    def test_support(self):
        assert support(F(12, 5)) == [Place.prime(2), Place.prime(3), Place.prime(5)]
        assert support(1) == []
        with pytest.raises(ValueError):
            support(0)

    def test_log_linear_algebra(self):
        x = LogLinear({2: F(3), 5: F(-1)})
        y = LogLinear({2: F(-3), 3: F(2)})
        assert (x + y).coeffs == {3: F(2), 5: F(-1)}
        assert (x - x).is_zero()
        assert x.scale(F(1, 3)).coeffs == {2: F(1), 5: F(-1, 3)}
        assert float(LogLinear({2: 1})) == pytest.approx(math.log(2))
        assert LogLinear({2: 0}).is_zero()
        assert hash(x) == hash(LogLinear({5: F(-1), 2: F(3)}))

    def test_log_abs_matches_numeric(self):
        q = F(-140, 99)
        for place in (Place.prime(2), Place.prime(3), Place.prime(7), INF):
            assert float(log_abs(q, place)) == pytest.approx(
                math.log(float(abs_value(q, place)))
            )

    def test_product_formula_worked_examples(self):
        assert product_formula_check(F(12, 5)).is_zero()
        assert product_formula_check(1).is_zero()
        assert product_formula_check(F(-7, 3)).is_zero()

    @given(rationals)
    @settings(max_examples=60, deadline=None)
    def test_product_formula_random(self, q):
        assert product_formula_check(q).is_zero()


class TestFamily:
    def test_divisor_validation(self):
        d = ToricCompactifiedDivisor(F(1, 2), F(3, 2))
        assert d.degree == 2
        with pytest.raises(ValueError, match="degree"):
            ToricCompactifiedDivisor(1, -2)

    def test_canonical_fn_shape(self):
        psi = canonical_fn(ToricCompactifiedDivisor(1, 2))
        assert psi.slope_neg == 2 and psi.slope_pos == -1
        assert psi.value_exact(F(0)) == 0
        # degree zero degenerates to a single line
        line = canonical_fn(ToricCompactifiedDivisor(-1, 1))
        assert line.breakpoints == () and line.slope_neg == 1

    def test_exception_table_drops_canonical(self):
        fam = AdelicFamily(
            hyperplane_divisor(), {Place.prime(3): canonical_fn(hyperplane_divisor())}
        )
        assert fam.is_canonical()
        assert fam.places() == []

    def test_psi_at_defaults_to_canonical(self):
        fam = alpha_family(F(1, 4))
        assert fam.psi_at(Place.prime(7)) == canonical_fn(hyperplane_divisor())
        assert fam.psi_at(Place.prime(2)) == alpha_profile(F(1, 4))

    def test_places_sorted(self):
        psi = canonical_fn(hyperplane_divisor()).shift(-1)
        fam = AdelicFamily(
            hyperplane_divisor(),
            {INF: psi, Place.prime(5): psi, Place.prime(2): psi},
        )
        assert fam.places() == [Place.prime(2), Place.prime(5), INF]

    def test_strict_slope_validation(self):
        bad = ConcaveFn.affine(F(1, 2))
        with pytest.raises(ValueError, match="slope"):
            AdelicFamily(hyperplane_divisor(), {INF: bad})
        loose = AdelicFamily(hyperplane_divisor(), {INF: bad}, strict=False)
        assert not loose.slope_valid
        assert loose.singular_places == (INF,)

    def test_singular_flags(self):
        fam = alpha_family(F(1, 4))
        assert fam.singular_places == (Place.prime(2),)
        shifted = twist(canonical_family(), {INF: 1})
        assert shifted.singular_places == ()

    def test_strongly_nef_local_check(self):
        d = hyperplane_divisor()
        assert strongly_nef_local_check(canonical_fn(d), d) == (True, True)
        assert strongly_nef_local_check(alpha_profile(F(1, 4)), d) == (True, False)
        assert strongly_nef_local_check(ConcaveFn.affine(F(1, 2)), d)[0] is False


class TestRoof:
    def test_canonical_roof_is_zero(self):
        theta = roof(canonical_family())
        assert theta.domain == (F(0), F(1))
        assert theta.endpoints() == (F(0), F(0))
        assert theta.value(F(1, 3)) == F(0)
        assert theta.minimum() == F(0)

    def test_shifted_roof_is_constant(self):
        # psi = canonical + c dualizes to -c
        psi = canonical_fn(hyperplane_divisor()).shift(F(3, 2))
        theta = roof(AdelicFamily(hyperplane_divisor(), {INF: psi}))
        assert theta.endpoints() == (F(-3, 2), F(-3, 2))
        assert theta.value(F(1, 2)) == F(-3, 2)

    def test_alpha_roof_closed_form(self):
        theta = roof(alpha_family(F(1, 4)))
        left, right = theta.endpoints()
        assert left == pytest.approx(-4.0)
        assert right == -math.inf
        m = 0.5
        expected = m - 1 - 3 * (1 - m) ** (-1 / 3)
        assert theta(m) == pytest.approx(expected, abs=1e-12)

    def test_roof_sums_over_places(self):
        psi = canonical_fn(hyperplane_divisor()).shift(1)
        fam = AdelicFamily(
            hyperplane_divisor(), {Place.prime(2): psi, Place.prime(3): psi}
        )
        theta = roof(fam)
        assert theta.value(F(1, 2)) == F(-2)

    def test_roof_requires_matching_slopes(self):
        loose = AdelicFamily(
            hyperplane_divisor(), {INF: ConcaveFn.affine(F(1, 2))}, strict=False
        )
        with pytest.raises(ValueError, match="slope"):
            roof(loose)


class TestHeights:
    def test_canonical_global_height_zero_exact(self):
        h = global_height(canonical_family())
        assert isinstance(h, F) and h == 0

    def test_boundary_heights_canonical(self):
        fam = canonical_family()
        assert boundary_height(fam, "zero") == F(0)
        assert boundary_height(fam, "infinity") == F(0)
        with pytest.raises(ValueError):
            boundary_height(fam, "one")

    def test_point_height_weil(self):
        fam = canonical_family()
        assert point_height(fam, 2) == pytest.approx(math.log(2))
        assert point_height(fam, 1) == 0.0
        assert point_height(fam, F(3, 7)) == pytest.approx(math.log(7))
        with pytest.raises(ValueError):
            point_height(fam, 0)

    def test_point_height_exact_weil(self):
        fam = canonical_family()
        assert point_height_exact(fam, 2) == LogLinear({2: 1})
        assert point_height_exact(fam, F(12, 5)) == log_abs(12, INF)
        assert point_height_exact(fam, F(5, 12)) == log_abs(12, INF)
        assert point_height_exact(fam, -1).is_zero()

    @given(rationals)
    @settings(max_examples=60, deadline=None)
    def test_point_height_exact_matches_weil_oracle(self, t):
        fam = canonical_family()
        expected = log_abs(max(abs(t.numerator), t.denominator), INF)
        assert point_height_exact(fam, t) == expected

    def test_point_height_exact_rejects_exceptions(self):
        with pytest.raises(ValueError, match="canonical"):
            point_height_exact(alpha_family(F(1, 4)), 2)

    def test_alpha_point_height_at_one(self):
        # only the exceptional place contributes: -psi_v(0) = -1/alpha
        assert point_height(alpha_family(F(1, 4)), 1) == pytest.approx(-4.0)

    def test_point_height_matches_exact_float(self):
        fam = canonical_family()
        rng = random.Random(5)
        for _ in range(25):
            t = F(rng.randint(-999, 999) or 1, rng.randint(1, 999))
            assert point_height(fam, t) == pytest.approx(
                float(point_height_exact(fam, t)), abs=1e-9
            )

    def test_point_height_dominates_roof_left_endpoint(self):
        # a = 0 puts every point height above the roof value at 0
        fam = alpha_family(F(1, 4))
        floor = float(boundary_height(fam, "zero"))
        rng = random.Random(17)
        for _ in range(20):
            t = F(rng.randint(-50, 50) or 3, rng.randint(1, 50))
            assert point_height(fam, t) >= floor - 1e-9

    def test_alpha_heights_both_routes(self):
        for alpha in (F(1, 10), F(1, 4), F(2, 5)):
            expected = closed_form_energy(alpha)
            fam = alpha_family(alpha)
            assert global_height(fam) == pytest.approx(expected, abs=1e-6)
            assert extended_height(canonical_family(), fam) == pytest.approx(
                expected, abs=1e-6
            )

    def test_alpha_divergent_heights(self):
        for alpha in (F(1, 2), F(3, 4)):
            fam = alpha_family(alpha)
            assert global_height(fam) == -math.inf
            assert extended_height(canonical_family(), fam) == -math.inf

    def test_degree_zero_height(self):
        fam = AdelicFamily(ToricCompactifiedDivisor(-1, 1))
        assert global_height(fam) == 0


class TestEnergy:
    def test_self_energy_zero(self):
        fam = alpha_family(F(1, 4))
        assert global_energy(fam, fam) == 0.0

    def test_divisor_mismatch(self):
        with pytest.raises(ValueError, match="divisor"):
            global_energy(
                canonical_family(), AdelicFamily(ToricCompactifiedDivisor(1, 1))
            )

    def test_shift_energy(self):
        # lowering by c at one place costs 2c (two unit masses)
        shifted = twist(canonical_family(), {INF: F(5, 4)})
        assert global_energy(canonical_family(), shifted) == pytest.approx(2.5)

    def test_energy_matches_closed_form(self):
        for alpha in (F(1, 10), F(1, 4)):
            got = global_energy(canonical_family(), alpha_family(alpha))
            assert got == pytest.approx(closed_form_energy(alpha), abs=1e-6)

    def test_divergent_energy(self):
        assert global_energy(canonical_family(), alpha_family(F(1, 2))) == -math.inf

    def test_precondition_error_names_place(self):
        with pytest.raises(ValueError, match=r"Place\(2\)"):
            global_energy(alpha_family(F(1, 4)), canonical_family())

    def test_additivity_over_places(self):
        rng = random.Random(29)
        psi2, psi3 = bounded_profile(rng), bounded_profile(rng)
        both = AdelicFamily(
            hyperplane_divisor(), {Place.prime(2): psi2, Place.prime(3): psi3}
        )
        only2 = AdelicFamily(hyperplane_divisor(), {Place.prime(2): psi2})
        only3 = AdelicFamily(hyperplane_divisor(), {Place.prime(3): psi3})
        ref = canonical_family()
        total = global_energy(ref, both)
        parts = global_energy(ref, only2) + global_energy(ref, only3)
        assert total == pytest.approx(parts, abs=1e-9)

    def test_global_transitivity(self):
        rng = random.Random(31)
        for _ in range(10):
            fams = [
                AdelicFamily(hyperplane_divisor(), {Place.prime(5): bounded_profile(rng)})
                for _ in range(3)
            ]
            e01 = global_energy(fams[0], fams[1])
            e12 = global_energy(fams[1], fams[2])
            e02 = global_energy(fams[0], fams[2])
            assert e01 + e12 == pytest.approx(e02, abs=1e-6)


class TestExtendedHeight:
    def test_reference_must_be_nef(self):
        with pytest.raises(ValueError, match="nef"):
            extended_height(alpha_family(F(1, 4)), alpha_family(F(1, 4)))

    def test_reduces_to_height_on_equal_families(self):
        fam = twist(canonical_family(), {INF: 2})
        assert extended_height(fam, fam) == global_height(fam) == 4

    def test_ample_reference(self):
        # reference lifted above zero stays a valid base point
        ref = twist(canonical_family(), {INF: 1})
        sing = twist(alpha_family(F(1, 4)), {INF: 1})
        got = extended_height(ref, sing)
        assert got == pytest.approx(2.0 + closed_form_energy(F(1, 4)), abs=1e-6)


class TestNefStatus:
    def test_canonical_nef_only(self):
        status = nef_status(canonical_family())
        assert status == NefStatus("S_nef_only", F(0))

    def test_twisted_ample(self):
        status = nef_status(twist(canonical_family(), {INF: F(1, 2)}))
        assert status.status == "S_ample"
        assert status.mu_min_asy == F(1, 2)

    def test_raised_profile_loses_nef(self):
        # psi = canonical + c sends the roof to -c
        psi = canonical_fn(hyperplane_divisor()).shift(F(1, 3))
        fam = AdelicFamily(hyperplane_divisor(), {Place.prime(7): psi})
        status = nef_status(fam)
        assert status.status == "relatively_nef_only"
        assert status.mu_min_asy == F(-1, 3)

    def test_alpha_family_singular_roof(self):
        status = nef_status(alpha_family(F(1, 4)))
        assert status.status == "relatively_nef_only"
        assert status.mu_min_asy == -math.inf

    def test_invalid_slopes(self):
        loose = AdelicFamily(
            hyperplane_divisor(), {INF: ConcaveFn.affine(F(1, 2))}, strict=False
        )
        status = nef_status(loose)
        assert status.status == "not_relatively_nef"
        assert status.mu_min_asy is None

    def test_twist_upgrades_to_ample(self):
        fam = AdelicFamily(
            hyperplane_divisor(),
            {Place.prime(2): canonical_fn(hyperplane_divisor()).shift(F(1, 3))},
        )
        assert nef_status(fam).status == "relatively_nef_only"
        assert nef_status(twist(fam, {INF: 10})).status == "S_ample"


class TestTwist:
    def test_zero_twist_is_identity(self):
        fam = alpha_family(F(1, 4))
        out = twist(fam, {INF: 0})
        assert out.exceptions == fam.exceptions

    def test_twist_composes_and_cancels(self):
        fam = canonical_family()
        there = twist(fam, {Place.prime(3): F(2, 7)})
        back = twist(there, {Place.prime(3): F(-2, 7)})
        assert back.is_canonical()

    def test_height_covariance_degree_one(self):
        fam = canonical_family()
        c = {INF: F(3, 4), Place.prime(2): F(1, 4)}
        assert global_height(twist(fam, c)) == 2  # 2 * sum(c)
        assert global_height(twist(fam, {INF: 1})) == 2

    def test_height_covariance_general_degree(self):
        # gain is 2 * degree * sum(c): the roof domain has length a + b
        fam = AdelicFamily(ToricCompactifiedDivisor(1, 2))
        before = global_height(fam)
        after = global_height(twist(fam, {INF: F(1, 2)}))
        assert after - before == 2 * 3 * F(1, 2)

    def test_point_height_covariance(self):
        fam = canonical_family()
        c = {INF: F(1, 2), Place.prime(5): F(1, 3)}
        shift = float(F(1, 2) + F(1, 3))
        rng = random.Random(13)
        for _ in range(10):
            t = F(rng.randint(1, 200), rng.randint(1, 200))
            assert point_height(twist(fam, c), t) == pytest.approx(
                point_height(fam, t) + shift, abs=1e-9
            )

    def test_roof_covariance(self):
        fam = alpha_family(F(1, 4))
        lifted = roof(twist(fam, {INF: F(1, 5)}))
        base = roof(fam)
        for m in (0.0, 0.25, 0.5, 0.9):
            assert lifted(m) == pytest.approx(base(m) + 0.2, abs=1e-12)

    def test_height_consistency_after_twist(self):
        # the energy route tracks the roof route through a twist
        ref = canonical_family()
        sing = twist(alpha_family(F(1, 4)), {Place.prime(3): F(-1, 2)})
        assert extended_height(ref, sing) == pytest.approx(
            global_height(sing), abs=1e-6
        )
