import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bundlesig import linalg
from bundlesig.errors import DimensionMismatch, RelatorViolation, ZeroVector
from bundlesig.meyer import (CERTIFIED, SP_ONLY, SignatureReport, SpMatrix, TwistWord, meyer_cocycle,
                             pairing, signature_from_monodromy, sp_from_json, symplectic_form,
                             transvection, twist_word_from_json)
from bundlesig.sampling import (disjoint_twist_images, random_class, random_sp,
                                random_sp_representation, random_twist_word)
from bundlesig.surface import Representation, generator_names

F = Fraction

seeds = st.integers(0, 10**6)
genera = st.integers(1, 3)


def as_ints(m: SpMatrix):
    return [[int(x) for x in row] for row in m.entries]


def formula_transvection(c, k, g):
    """Oracle: apply ``x -> x + k <x, c> c`` to each basis vector and read off the columns."""
    cols = []
    for j in range(2 * g):
        e = [0] * (2 * g)
        e[j] = 1
        p = pairing(e, c, g)
        cols.append([e[i] + k * p * c[i] for i in range(2 * g)])
    return [[int(cols[j][i]) for j in range(2 * g)] for i in range(2 * g)]


def numeric_signature(form):
    ev = np.linalg.eigvalsh(np.array(form, dtype=float))
    return int((ev > 1e-9).sum() - (ev < -1e-9).sum())


class TestTransvection:
    def test_e1_genus_one(self):
        # <x, e1> = -x2, so e1 picks up -x2
        assert as_ints(transvection((1, 0), 1, 1)) == [[1, -1], [0, 1]]

    def test_e2_genus_one(self):
        assert as_ints(transvection((0, 1), 1, 1)) == [[1, 0], [1, 1]]

    def test_zero_power_is_identity(self):
        assert transvection((1, 2, 0, -1), 0, 2).is_identity()

    def test_zero_class(self):
        with pytest.raises(ZeroVector):
            transvection((0, 0), 1, 1)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            transvection((1, 0, 0), 1, 1)

    @given(seeds, genera, st.integers(-3, 3))
    def test_matches_formula_and_is_symplectic(self, seed, g, k):
        c = random_class(random.Random(seed), g)
        m = transvection(c, k, g)
        assert as_ints(m) == formula_transvection(c, k, g)
        assert m.is_symplectic() and m.is_integral()

    @given(seeds, genera)
    def test_powers_add(self, seed, g):
        c = random_class(random.Random(seed), g)
        assert transvection(c, 2, g) * transvection(c, -3, g) == transvection(c, -1, g)


class TestSpMatrix:
    def test_non_symplectic_rejected(self):
        with pytest.raises(ValueError):
            SpMatrix(((2, 0), (0, 2)), 1)

    def test_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            SpMatrix(((1, 0), (0, 1)), 2)

    def test_form(self):
        j = symplectic_form(1)
        assert j == ((0, 1), (-1, 0))

    @given(seeds, genera)
    def test_inverse(self, seed, g):
        m = random_sp(random.Random(seed), g)
        assert (m * m.inverse()).is_identity()

    @given(seeds, genera)
    def test_products_stay_symplectic(self, seed, g):
        rng = random.Random(seed)
        assert (random_sp(rng, g) * random_sp(rng, g)).is_symplectic()

    def test_rational_entries_allowed(self):
        m = SpMatrix(((F(2), 0), (0, F(1, 2))), 1)
        assert not m.is_integral()


class TestJson:
    @given(seeds, genera)
    def test_twist_word_round_trip(self, seed, g):
        w = random_twist_word(random.Random(seed), g, 5)
        assert twist_word_from_json(w.to_json()) == w
        assert sp_from_json(w.to_json()) == w.matrix()

    def test_matrix_round_trip(self):
        m = transvection((1, 1), 2, 1)
        assert sp_from_json(m.to_json()) == m

    def test_schema(self):
        w = TwistWord(1, (((1, 0), 2),))
        assert w.to_json() == {"g": 1, "letters": [{"c": [1, 0], "k": 2}]}


class TestMeyerCocycle:
    @given(seeds, genera)
    def test_identity_slots(self, seed, g):
        b = random_sp(random.Random(seed), g)
        one = SpMatrix.identity(g)
        assert meyer_cocycle(one, b) == 0
        assert meyer_cocycle(b, one) == 0

    @given(seeds, genera)
    def test_inverse_pair(self, seed, g):
        a = random_sp(random.Random(seed), g)
        assert meyer_cocycle(a, a.inverse()) == 0

    @settings(max_examples=60, deadline=None)
    @given(seeds, genera)
    def test_cocycle_identity(self, seed, g):
        rng = random.Random(seed)
        a, b, c = (random_sp(rng, g) for _ in range(3))
        assert (meyer_cocycle(a, b) + meyer_cocycle(a * b, c)
                == meyer_cocycle(a, b * c) + meyer_cocycle(b, c))

    @settings(max_examples=60, deadline=None)
    @given(seeds, genera)
    def test_range(self, seed, g):
        rng = random.Random(seed)
        assert abs(meyer_cocycle(random_sp(rng, g), random_sp(rng, g))) <= 2 * g

    def test_mismatched_genus(self):
        with pytest.raises(DimensionMismatch):
            meyer_cocycle(SpMatrix.identity(1), SpMatrix.identity(2))

    def test_same_twist_twice(self):
        # the form on V is one-dimensional and definite; reversing the twist flips it
        t = transvection((1, 0), 1, 1)
        assert meyer_cocycle(t, t) == -1
        assert meyer_cocycle(t.inverse(), t.inverse()) == 1

    @settings(max_examples=40, deadline=None)
    @given(seeds, genera)
    def test_conjugation_invariant(self, seed, g):
        rng = random.Random(seed)
        a, b, x = (random_sp(rng, g, 6) for _ in range(3))
        xi = x.inverse()
        assert meyer_cocycle(xi * a * x, xi * b * x) == meyer_cocycle(a, b)


class TestExactSignature:
    @settings(max_examples=80)
    @given(st.integers(1, 5), st.data())
    def test_matches_eigenvalue_count(self, d, data):
        entries = st.integers(-3, 3)
        m = [[data.draw(entries) for _ in range(d)] for _ in range(d)]
        form = [[F(m[i][j] + m[j][i]) for j in range(d)] for i in range(d)]
        assert linalg.signature(form) == numeric_signature(form)

    def test_zero_diagonal(self):
        assert linalg.signature([[F(0), F(1)], [F(1), F(0)]]) == 0
        assert linalg.signature([[F(0), F(1), F(0)], [F(1), F(0), F(0)], [F(0), F(0), F(-2)]]) == -1


def sp_rep(genus, images, certified=True):
    return Representation(genus, "sp", dict(zip(generator_names(genus), images)),
                          certified=certified)


class TestSignatureFromMonodromy:
    @pytest.mark.parametrize("g, h", [(1, 1), (2, 2), (3, 2)])
    def test_trivial(self, g, h):
        r = signature_from_monodromy(sp_rep(h, [SpMatrix.identity(g)] * (2 * h)))
        assert r.sigma == 0 and r.verdict_3 and r.verdict_2

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.integers(1, 2), st.integers(1, 3))
    def test_free_factoring_vanishes(self, seed, g, h):
        rep = random_sp_representation(random.Random(seed), g, h, kind="free")
        assert signature_from_monodromy(rep).sigma == 0

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.integers(1, 3))
    def test_torus_disjoint_twists(self, seed, g):
        rep = sp_rep(1, disjoint_twist_images(random.Random(seed), g, 1))
        r = signature_from_monodromy(rep)
        assert r.certification == CERTIFIED and r.chi == 0 and r.sigma == 0

    def test_relator_violation(self):
        a = transvection((1, 0), 1, 1)
        b = transvection((0, 1), 1, 1)
        with pytest.raises(RelatorViolation):
            signature_from_monodromy(sp_rep(1, [a, b]))

    def test_sp_only_tag(self):
        rep = random_sp_representation(random.Random(1), 2, 2, kind="sp-only")
        r = signature_from_monodromy(rep)
        assert r.certification == SP_ONLY and not r.certified

    def test_wrong_target(self):
        from bundlesig.circle import Rotation
        with pytest.raises(ValueError):
            signature_from_monodromy(Representation(1, "circle", {"a1": Rotation(0),
                                                                  "b1": Rotation(0)}))


class TestReport:
    def test_verdicts(self):
        r = SignatureReport(4, 3, 3, CERTIFIED)
        assert r.chi == 16 and r.verdict_3 and r.verdict_2 and r.mod4

    def test_failing_verdicts(self):
        r = SignatureReport(3, 2, 2, SP_ONLY)
        assert not r.verdict_3 and r.verdict_2 is False and not r.mod4

    def test_csv_keys(self):
        assert list(SignatureReport(0, 2, 2, CERTIFIED).to_json()) == \
            ["g", "h", "sigma", "chiE", "v3", "v2", "mod4", "cert"]
