import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bundlesig.circle import (LiftedMap, MoebiusMap, PLMap, Q, Rotation, canonical_lift,
                              circle_map_from_json, classical_euler_cocycle, compose, displacement,
                              identity_map, lift_defect, lift_evaluate, moebius_rotation,
                              to_fraction, translation_number)
from bundlesig.errors import AmbiguousLift, MixedExactnessError

from .strategies import (classical_cocycle_oracle, exact_maps, pl_maps, pointwise_compose,
                         rationals01, rotations)

F = Fraction
EXAMPLE_PL = PLMap(((0, 0, F(3, 2)), (F(1, 2), F(3, 4), F(1, 2))))


class TestRationals:
    def test_reduced_and_positive_denominator(self):
        q = to_fraction(F(6, -8))
        assert (q.numerator, q.denominator) == (-3, 4)

    def test_strings_parse(self):
        assert to_fraction("2/6") == F(1, 3)

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            to_fraction(0.5)


class TestCompose:
    def test_rotations_add(self):
        assert compose(Rotation(F(1, 3)), Rotation(F(1, 4))) == Rotation(F(7, 12))

    @given(exact_maps)
    def test_identity_is_neutral(self, f):
        assert compose(identity_map(), f) == f
        assert compose(f, identity_map()) == f

    def test_example_pl_square_matches_two_stage_evaluation(self):
        ff = compose(EXAMPLE_PL, EXAMPLE_PL)
        for k in range(10):
            x = F(k, 10)
            assert ff.lift(x) == pointwise_compose(EXAMPLE_PL, EXAMPLE_PL, x)

    def test_example_pl_segment_value(self):
        assert lift_evaluate(canonical_lift(EXAMPLE_PL, 0), F(1, 4)) == F(3, 8)

    @given(exact_maps, exact_maps, st.lists(rationals01, min_size=5, max_size=5))
    def test_composition_pointwise(self, f, g, xs):
        h = compose(f, g)
        for x in xs:
            # reference lifts may differ by an integer; compare on the circle
            assert (h.lift(x) - pointwise_compose(f, g, x)).denominator == 1

    @given(pl_maps(), rotations)
    def test_rotation_shortcuts_match_general_composition(self, f, r):
        from bundlesig.circle import _compose_pl
        assert compose(f, r) == _compose_pl(f.to_pl(), r.to_pl())
        assert compose(r, f) == _compose_pl(r.to_pl(), f.to_pl())

    def test_rotation_and_pl_stay_exact(self):
        assert compose(Rotation(F(1, 2)), EXAMPLE_PL).exact

    def test_mixed_exactness_raises(self):
        with pytest.raises(MixedExactnessError):
            compose(Rotation(F(1, 2)), moebius_rotation(0.25))

    def test_pl_with_unit_slope_collapses_to_rotation(self):
        f = compose(EXAMPLE_PL, EXAMPLE_PL.inverse())
        assert f == Rotation(0)

    @given(exact_maps)
    def test_inverse(self, f):
        assert compose(f, f.inverse()).is_identity()

    def test_moebius_compose_matches_pointwise(self):
        a = MoebiusMap((2.0, 1.0, 1.0, 1.0))
        b = moebius_rotation(0.3)
        ab = compose(a, b)
        for k in range(8):
            x = k / 8
            assert abs((ab.lift(x) - b.lift(a.lift(x))) - round(ab.lift(x) - b.lift(a.lift(x)))) < 1e-12


class TestPLValidation:
    def test_rise_must_be_one(self):
        with pytest.raises(ValueError):
            PLMap(((0, 0, 2),))

    def test_discontinuity_rejected(self):
        with pytest.raises(ValueError):
            PLMap(((0, 0, F(3, 2)), (F(1, 2), F(1, 2), F(1, 2))))

    def test_nonpositive_slope_rejected(self):
        with pytest.raises(ValueError):
            PLMap(((0, 0, 0),))

    def test_normal_form_inserts_origin(self):
        f = PLMap(((F(1, 4), F(1, 2), 1),))
        assert f.breakpoints[0][0] == 0

    def test_moebius_determinant_checked(self):
        with pytest.raises(ValueError):
            MoebiusMap((1.0, 0.0, 0.0, 2.0))


class TestLifts:
    @given(st.one_of(exact_maps), rationals01, rationals01)
    def test_degree_one(self, h, x0, x):
        L = canonical_lift(h, x0)
        assert L(x + 1) == L(x) + 1

    @given(exact_maps, rationals01, st.lists(rationals01, min_size=2, max_size=6, unique=True))
    def test_monotone(self, h, x0, xs):
        L = canonical_lift(h, x0)
        xs = sorted(xs)
        values = [L(x) for x in xs]
        assert all(a < b for a, b in zip(values, values[1:]))

    @given(exact_maps, rationals01)
    def test_canonical_condition(self, h, x0):
        d = canonical_lift(h, x0)(x0) - x0
        assert 0 <= d < 1

    def test_rotation_three_quarters(self):
        for x0 in (0, F(1, 2)):
            L = canonical_lift(Rotation(F(3, 4)), x0)
            assert L(0) == F(3, 4)
            assert L(x0) - x0 == F(3, 4)

    def test_identity_lift(self):
        L = canonical_lift(identity_map(), F(2, 9))
        assert L(F(5, 7)) == F(5, 7)

    def test_half_turn_translation(self):
        assert canonical_lift(Rotation(F(1, 2)), 0)(F(3, 4)) == F(5, 4)

    def test_numeric_ambiguity_raises(self):
        # x -> 2x on the affine chart fixes the line at angle 0, i.e. x = 1/2
        h = MoebiusMap((math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2)))
        with pytest.raises(AmbiguousLift):
            canonical_lift(h, F(1, 2))

    def test_numeric_identity_is_not_ambiguous(self):
        assert canonical_lift(identity_map(False), 0)(0.25) == 0.25

    def test_numeric_lift_canonical(self):
        h = MoebiusMap((2.0, 1.0, 1.0, 1.0))
        L = canonical_lift(h, F(1, 3))
        assert 0 <= L(1 / 3) - 1 / 3 < 1

    def test_numeric_lift_degree_one_and_monotone(self):
        h = MoebiusMap((2.0, 1.0, 1.0, 1.0))
        xs = [k / 50 for k in range(-50, 100)]
        vals = [h.lift(x) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        for x in xs:
            assert abs(h.lift(x + 1) - h.lift(x) - 1) < 1e-12

    def test_moebius_rotation_is_a_shift(self):
        r = moebius_rotation(0.3)
        assert abs(r.lift(0.1) - 0.4) < 1e-12

    @given(exact_maps, exact_maps, st.integers(-3, 3), st.integers(-3, 3))
    def test_composition_consistency(self, g, h, k1, k2):
        # any lifts of g and h compose to a lift of gh differing by a translation
        product = LiftedMap(g, k1).then(LiftedMap(h, k2))
        t = lift_defect(canonical_lift(compose(g, h), 0), product)
        assert isinstance(t, int)


class TestClassicalCocycle:
    def test_half_turns(self):
        assert classical_euler_cocycle(Rotation(F(1, 2)), Rotation(F(1, 2))) == 1

    def test_third_turns(self):
        assert classical_euler_cocycle(Rotation(F(1, 3)), Rotation(F(1, 3))) == 0

    @given(exact_maps, rationals01)
    def test_normalized(self, h, x0):
        assert classical_euler_cocycle(identity_map(), h, x0) == 0
        assert classical_euler_cocycle(h, identity_map(), x0) == 0

    @given(exact_maps, exact_maps, rationals01)
    def test_values_match_floor_oracle(self, g, h, x0):
        c = classical_euler_cocycle(g, h, x0)
        assert c in (0, 1)
        assert c == classical_cocycle_oracle(g, h, x0)

    @settings(max_examples=60)
    @given(exact_maps, exact_maps, exact_maps, rationals01)
    def test_cocycle_identity(self, f, g, h, x0):
        c = lambda a, b: classical_euler_cocycle(a, b, x0)  # noqa: E731
        assert c(f, g) + c(compose(f, g), h) == c(f, compose(g, h)) + c(g, h)

    def test_numeric_values_in_range(self):
        a = MoebiusMap((2.0, 1.0, 1.0, 1.0))
        b = moebius_rotation(0.7)
        assert classical_euler_cocycle(a, b, F(1, 3)) in (0, 1)

    def test_mixed_rejected(self):
        with pytest.raises(MixedExactnessError):
            classical_euler_cocycle(Rotation(0), moebius_rotation(0.1))


class TestTranslationNumber:
    def test_rotation(self):
        lo, hi = translation_number(LiftedMap(Rotation(F(1, 3))), 30)
        assert lo <= F(1, 3) <= hi and hi - lo <= F(2, 30)

    def test_identity(self):
        lo, hi = translation_number(LiftedMap(identity_map()), 5)
        assert lo <= 0 <= hi

    def test_example_pl_has_rotation_number_zero(self):
        # the example fixes 0, so its rotation number is 0
        assert EXAMPLE_PL.lift(0) == 0
        lo, hi = translation_number(canonical_lift(EXAMPLE_PL, 0), 100)
        assert lo <= 0 <= hi

    def test_iterations_positive(self):
        with pytest.raises(ValueError):
            translation_number(LiftedMap(identity_map()), 0)


class TestJson:
    @given(exact_maps)
    def test_round_trip_exact(self, f):
        assert circle_map_from_json(f.to_json()) == f

    def test_round_trip_moebius(self):
        f = MoebiusMap((2.0, 1.0, 1.0, 1.0))
        assert circle_map_from_json(f.to_json()) == f

    def test_rotation_schema(self):
        assert Rotation(F(3, 4)).to_json() == {"kind": "rotation", "theta": "3/4"}

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            circle_map_from_json({"kind": "spline"})


def test_displacement_of_rotation():
    assert abs(displacement(moebius_rotation(0.25)) - 0.25) < 1e-12


@given(pl_maps(), rotations)
def test_pl_breakpoint_budget(f, r):
    assert len(f.to_pl().breakpoints) <= 4
    assert isinstance(compose(r, r), Rotation)


def test_q_is_fraction_compatible():
    assert Q(1, 3) == F(1, 3) and hash(Q(1, 3)) == hash(F(1, 3))
