"""Exact cone geometry, the order metric, and pairing extension."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelic_heights.divisorial_core import (
    AdmissibilityError,
    Cell,
    CompletionElement,
    Constraint,
    DivisorialSpace,
    IntersectionMap,
    PositivityError,
    RationalVector,
    SemilinearCone,
    check_intersection_axioms,
    completion_distance,
    cone_closure_contains,
    cone_contains,
    d_b,
    extend_intersection,
    leq,
)

V = RationalVector
F = Fraction


def standard_cone(dim=2):
    rows = []
    for i in range(dim):
        rows.append(tuple(1 if j == i else 0 for j in range(dim)))
    return SemilinearCone.from_halfspaces(rows, dim)


def standard_space(dim=2):
    return DivisorialSpace(dim, standard_cone(dim))


def half_open_cone():
    """(positive x1, any x2) union (x1 = 0, x2 >= 0): a pointed cone whose
    order metric vanishes on a nonzero difference."""
    open_half = Cell((Constraint((1, 0), strict=True),))
    boundary = Cell((Constraint((1, 0)), Constraint((-1, 0)), Constraint((0, 1))))
    return SemilinearCone([open_half, boundary], 2)


rational = st.fractions(min_value=-5, max_value=5, max_denominator=12)
vec2 = st.tuples(rational, rational).map(V)


class TestCones:
    def test_zero_in_every_cone(self):
        assert cone_contains(standard_cone(), V([0, 0]))
        assert cone_contains(half_open_cone(), V([0, 0]))

    def test_standard_membership(self):
        c = standard_cone()
        assert cone_contains(c, V([1, 2]))
        assert not cone_contains(c, V([-1, 2]))
        assert not cone_contains(c, V([F(1, 3), F(-1, 7)]))

    def test_generated_cone_membership(self):
        # hull of (1,2) and (2,1); interior, boundary, and outside points
        c = SemilinearCone.from_generators([V([1, 2]), V([2, 1])], 2)
        assert cone_contains(c, V([1, 1]))
        assert cone_contains(c, V([3, 3]))
        assert cone_contains(c, V([1, 2]))
        assert cone_contains(c, V([2, 1]))
        assert not cone_contains(c, V([1, 3]))
        assert not cone_contains(c, V([3, 1]))
        assert not cone_contains(c, V([-1, -1]))

    def test_generated_cone_halfplane_and_full(self):
        half = SemilinearCone.from_generators([V([1, 0]), V([-1, 0]), V([0, 1])], 2)
        assert cone_contains(half, V([5, 0]))
        assert cone_contains(half, V([-5, 0]))
        assert cone_contains(half, V([0, 1]))
        assert not cone_contains(half, V([0, -1]))
        full = SemilinearCone.from_generators(
            [V([1, 0]), V([-1, 1]), V([-1, -1])], 2
        )
        for p in [V([7, -3]), V([-2, 5]), V([0, -1])]:
            assert cone_contains(full, p)

    def test_generated_ray_and_line(self):
        ray = SemilinearCone.from_generators([V([2, 4])], 2)
        assert cone_contains(ray, V([1, 2]))
        assert not cone_contains(ray, V([-1, -2]))
        assert not cone_contains(ray, V([1, 3]))
        line = SemilinearCone.from_generators([V([1, 1]), V([-1, -1])], 2)
        assert cone_contains(line, V([-3, -3]))
        assert not cone_contains(line, V([1, 0]))

    def test_non_cone_union_rejected(self):
        q2 = Cell((Constraint((-1, 0)), Constraint((0, 1))))
        q4 = Cell((Constraint((1, 0)), Constraint((0, -1))))
        with pytest.raises(ValueError, match="sum escapes"):
            SemilinearCone([q2, q4], 2)

    def test_closure_of_half_open_cone(self):
        c = half_open_cone()
        assert not cone_contains(c, V([0, -1]))
        assert cone_closure_contains(c, V([0, -1]))
        assert not cone_closure_contains(c, V([-1, 0]))

    def test_closure_drops_empty_cells(self):
        empty = Cell((Constraint((1, 0), strict=True), Constraint((-1, 0), strict=True)))
        c = SemilinearCone([empty, Cell((Constraint((1, 0)), Constraint((0, 1))))], 2)
        # the empty cell must not resurrect the x2-axis in the closure
        assert not cone_closure_contains(c, V([0, -1]))
        assert cone_closure_contains(c, V([1, 0]))


class TestSpace:
    def test_pointedness_rejects_halfplane(self):
        half = SemilinearCone.from_halfspaces([(0, 1)], 2)
        with pytest.raises(ValueError, match="pointed"):
            DivisorialSpace(2, half)

    def test_half_open_cone_is_pointed(self):
        DivisorialSpace(2, half_open_cone())

    def test_order_relation(self):
        sp = standard_space()
        assert leq(sp, V([0, 0]), V([1, 2]))
        assert leq(sp, V([1, 1]), V([1, 1]))
        assert not leq(sp, V([1, 2]), V([0, 0]))
        assert not leq(sp, V([0, 1]), V([1, 0]))


class TestOrderMetric:
    def test_chebyshev_formula(self):
        sp = standard_space()
        b = V([1, 1])
        assert d_b(sp, b, V([0, 0]), V([F(1, 3), F(-1, 5)])) == F(1, 3)
        assert d_b(sp, b, V([2, 7]), V([2, 7])) == 0
        assert d_b(sp, b, V([0, 0]), V([5, 0])) == 1  # capped

    def test_unreachable_direction_gives_cap(self):
        sp = standard_space()
        assert d_b(sp, V([1, 0]), V([0, 1]), V([0, 0])) == 1

    def test_degenerate_distance_on_half_open_cone(self):
        sp = DivisorialSpace(2, half_open_cone())
        dist = d_b(sp, V([1, 0]), V([0, 1]), V([0, 0]))
        assert dist == 0  # distinct points at distance zero: pseudo-metric only

    def test_gauge_must_be_in_cone(self):
        sp = standard_space()
        with pytest.raises(ValueError, match="gauge"):
            d_b(sp, V([-1, 0]), V([0, 0]), V([0, 0]))

    @given(vec2, vec2)
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, x, y):
        sp = standard_space()
        b = V([1, 1])
        assert d_b(sp, b, x, y) == d_b(sp, b, y, x)

    @given(vec2, vec2, vec2)
    @settings(max_examples=60, deadline=None)
    def test_triangle_inequality(self, x, y, z):
        sp = standard_space()
        b = V([1, 1])
        assert d_b(sp, b, x, z) <= d_b(sp, b, x, y) + d_b(sp, b, y, z)

    @given(vec2)
    @settings(max_examples=30, deadline=None)
    def test_identity_points(self, x):
        sp = standard_space()
        assert d_b(sp, V([1, 1]), x, x) == 0

    @given(vec2, vec2)
    @settings(max_examples=60, deadline=None)
    def test_larger_gauge_shrinks_distance(self, x, y):
        sp = standard_space()
        assert d_b(sp, V([2, 2]), x, y) <= d_b(sp, V([1, 1]), x, y)


class TestClosureWitness:
    def witness_criterion(self, cone, x, witnesses, ns):
        """x + y/n stays in the cone for every sampled n, for some witness y."""
        return any(
            all(cone.contains(x + y * F(1, n)) for n in ns) for y in witnesses
        )

    def test_agreement_on_half_open_cone(self):
        cone = half_open_cone()
        witnesses = [V([1, 0]), V([0, 1]), V([1, 1])]
        ns = [1, 10, 100, 1000, 10**4, 10**5, 10**6]
        for x in [V([0, -1]), V([0, 5]), V([1, -7]), V([-1, 0]), V([F(-1, 2), 3])]:
            assert cone_closure_contains(cone, x) == self.witness_criterion(
                cone, x, witnesses, ns
            )

    def test_agreement_on_generated_cones(self):
        gens = [V([1, 2]), V([2, 1])]
        cone = SemilinearCone.from_generators(gens, 2)
        ns = [1, 10, 100, 1000, 10**4, 10**5, 10**6]
        for x in [V([1, 1]), V([1, 2]), V([0, 1]), V([-1, 1])]:
            # closed cone: closure membership is plain membership
            assert cone_closure_contains(cone, x) == cone.contains(x)
            assert cone_closure_contains(cone, x) == self.witness_criterion(
                cone, x, gens + [gens[0] + gens[1]], ns
            )


def reciprocal_element(sp, b, drift):
    """Terms (1, 1/n) + drift with exact modulus ceil(1/eps)."""

    def seq(n):
        return V([1, F(1, n + 1)]) + drift

    def modulus(eps):
        return int(1 / Fraction(eps)) + 1

    return CompletionElement(sp, b, seq, modulus)


class TestCompletion:
    def test_modulus_spot_check_rejects_lies(self):
        sp = standard_space()
        b = V([1, 1])
        with pytest.raises(ValueError, match="modulus fails"):
            CompletionElement(sp, b, lambda n: V([n, 0]), lambda eps: 0)

    def test_distance_to_limit_point(self):
        sp = standard_space()
        b = V([1, 1])
        x = reciprocal_element(sp, b, V([0, 0]))
        y = CompletionElement.constant(sp, b, V([1, 0]))
        assert completion_distance(x, y, F(1, 1000)) <= F(1, 1000)

    def test_distance_between_shifted_sequences(self):
        sp = standard_space()
        b = V([1, 1])
        x = reciprocal_element(sp, b, V([0, 0]))
        y = reciprocal_element(sp, b, V([F(1, 2), 0]))
        eps = F(1, 10**6)
        d = completion_distance(x, y, eps)
        assert abs(d - F(1, 2)) <= eps


def hyperbolic_map(sp):
    # pairing x1*y2 + x2*y1 on the plane
    return IntersectionMap(sp, 2, {(0, 1): 1})


class TestIntersection:
    def test_evaluate_multilinear_table(self):
        sp = standard_space()
        h = hyperbolic_map(sp)
        assert h(V([1, 2]), V([3, 4])) == 10
        assert h(V([1, 0]), V([0, 1])) == 1
        assert h(V([1, 0]), V([1, 0])) == 0

    def test_axiom_report(self):
        sp = standard_space()
        h = hyperbolic_map(sp)
        gens = [V([1, 0]), V([0, 1]), V([1, 1])]
        report = check_intersection_axioms(h, gens, gens)
        assert report["passed"]
        assert report["nef_nonnegative"]
        assert all(w is not None for w in report["amplitude_witnesses"].values())

    def test_axiom_report_catches_negativity(self):
        sp = standard_space()
        bad = IntersectionMap(sp, 2, {(0, 0): -1})
        report = check_intersection_axioms(bad, [V([1, 0])], [V([1, 0])])
        assert not report["passed"]
        assert not report["nef_nonnegative"]

    def test_extension_hits_limit(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        x = CompletionElement(
            sp, b, lambda n: V([1, F(1, n + 1)]), lambda e: int(1 / Fraction(e)) + 1
        )
        y = CompletionElement(
            sp, b, lambda n: V([F(1, n + 1), 1]), lambda e: int(1 / Fraction(e)) + 1
        )
        val = extend_intersection(h, [x, y], F(1, 10**6), b)
        assert abs(val - 1) <= 1e-6

    def test_extension_requires_dominating_gauge(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        x = CompletionElement.constant(sp, b, V([1, 0]))
        with pytest.raises(AdmissibilityError, match="dominate"):
            extend_intersection(h, [x, x], F(1, 100), V([1, 0]))

    def test_extension_rejects_non_nef_terms(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        x = CompletionElement.constant(sp, b, V([1, -1]))
        with pytest.raises(PositivityError):
            extend_intersection(h, [x, x], F(1, 100), b)

    def test_extension_additive_in_slot(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        eps = F(1, 10**6)

        def elem(f):
            return CompletionElement(
                sp, b, f, lambda e: int(1 / Fraction(e)) + 1
            )

        x1 = elem(lambda n: V([1, F(1, n + 1)]))
        x2 = elem(lambda n: V([0, 1]))
        xs = elem(lambda n: V([1, F(1, n + 1)]) + V([0, 1]))
        y = elem(lambda n: V([F(1, n + 1), 1]))
        lhs = extend_intersection(h, [xs, y], eps, b)
        rhs = extend_intersection(h, [x1, y], eps, b) + extend_intersection(
            h, [x2, y], eps, b
        )
        assert abs(lhs - rhs) <= 2 * float(eps)

    def test_extension_symmetric(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        eps = F(1, 10**6)
        x = CompletionElement(
            sp, b, lambda n: V([1, F(1, n + 1)]), lambda e: int(1 / Fraction(e)) + 1
        )
        y = CompletionElement(
            sp, b, lambda n: V([2, F(2, n + 1)]), lambda e: int(2 / Fraction(e)) + 1
        )
        assert abs(
            extend_intersection(h, [x, y], eps, b)
            - extend_intersection(h, [y, x], eps, b)
        ) <= 2 * float(eps)

    def test_extension_positivity(self):
        sp = standard_space()
        b = V([1, 1])
        h = hyperbolic_map(sp)
        x = CompletionElement(
            sp, b, lambda n: V([F(1, n + 1), F(1, n + 1)]),
            lambda e: int(1 / Fraction(e)) + 1,
        )
        val = extend_intersection(h, [x, x], F(1, 10**6), b)
        assert val >= -1e-6
