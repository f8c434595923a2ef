import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bundlesig.branched import (PROXY_LABEL, BranchedCovering, SimplicialComplex, SimplicialMap,
                                boundary, coboundary, default_corpus_dir, degree_report,
                                fundamental_cycle_of_cover, load_corpus, local_degree, orient,
                                parse_cover, pullback, transfer, validate_unfolded)
from bundlesig.errors import (DegenerateMap, NotHomogeneous, NotOrientable, NotSurjective,
                              NotValidated)

F = Fraction

CORPUS = {e.name: e for e in load_corpus()}
TETRA = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def covering(name):
    e = CORPUS[name]
    return validate_unfolded(e.map, e.branch).covering


def random_cochain(rng, K, k):
    return {s: F(rng.randint(-20, 20), rng.randint(1, 9)) for s in K.simplices_of_dim(k)}


def nonzero(c):
    return {s: v for s, v in c.items() if v != 0}


class TestComplex:
    def test_face_closure(self):
        K = SimplicialComplex([(2, 0, 1)])
        assert len(K) == 7 and K.dim == 2 and (0, 2) in K

    def test_homogeneous(self):
        assert SimplicialComplex(TETRA).is_homogeneous()
        assert not SimplicialComplex([(0, 1, 2), (2, 3)]).is_homogeneous()

    def test_boundary_of_boundary(self):
        K = SimplicialComplex(TETRA)
        chain = {s: 1 for s in K.top_simplices()}
        assert boundary(boundary(chain, 2), 1) == {}

    @given(st.integers(0, 10**6))
    def test_coboundary_squares_to_zero(self, seed):
        K = SimplicialComplex(TETRA)
        c = random_cochain(random.Random(seed), K, 0)
        assert coboundary(K, coboundary(K, c, 0), 1) == {}

    def test_orientation_of_sphere(self):
        signs = orient(SimplicialComplex(TETRA))
        chain = dict(signs)
        assert boundary(chain, 2) == {}

    def test_non_pseudomanifold_not_orientable(self):
        with pytest.raises(NotOrientable):
            orient(SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 1, 4)]))

    def test_open_band_rejected(self):
        with pytest.raises(NotOrientable):
            orient(SimplicialComplex([(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 0), (4, 0, 1)]))

    def test_projective_plane_not_orientable(self):
        # six-vertex RP^2: every edge lies in exactly two triangles
        rp2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2), (2, 3, 5), (3, 4, 6),
               (4, 5, 2), (5, 6, 3), (6, 2, 4)]
        with pytest.raises(NotOrientable, match="coherent"):
            orient(SimplicialComplex(rp2))


class TestCorpus:
    def test_three_entries(self):
        assert sorted(CORPUS) == ["branched_sphere", "doubling_circle", "identity_sphere"]

    @pytest.mark.parametrize("name, degree", [("identity_sphere", 1), ("doubling_circle", 2),
                                              ("branched_sphere", 2)])
    def test_validates_with_expected_degree(self, name, degree):
        e = CORPUS[name]
        report = validate_unfolded(e.map, e.branch)
        assert report.valid, report.diagnostics
        assert report.degree == degree == e.expected_degree
        assert report.proxy == PROXY_LABEL

    def test_env_override(self, tmp_path, monkeypatch):
        src = default_corpus_dir() / "doubling_circle.cover"
        (tmp_path / "only.cover").write_text(src.read_text())
        monkeypatch.setenv("BUNDLESIG_CORPUS", str(tmp_path))
        assert [e.name for e in load_corpus()] == ["doubling_circle"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_corpus(tmp_path / "nope")


class TestLocalDegree:
    def test_identity(self):
        cov = covering("identity_sphere")
        assert all(local_degree(cov.map, v) == 1 for v in cov.source.vertices)

    def test_doubling_unbranched(self):
        cov = covering("doubling_circle")
        assert {local_degree(cov.map, v) for v in cov.source.vertices} == {1}

    def test_poles(self):
        cov = covering("branched_sphere")
        assert local_degree(cov.map, 6) == 2 and local_degree(cov.map, 7) == 2
        assert local_degree(cov.map, 0) == 1

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_fiber_sums_equal_degree(self, name):
        assert degree_report(covering(name)).summation_holds()

    def test_degenerate(self):
        K = SimplicialComplex([(0, 1)])
        phi = SimplicialMap(K, SimplicialComplex([(0,)]), {0: 0, 1: 0})
        with pytest.raises(DegenerateMap):
            local_degree(phi, 0)


class TestValidation:
    def test_not_homogeneous(self):
        X = SimplicialComplex([(0, 1, 2), (2, 3)])
        phi = SimplicialMap(X, X, {v: v for v in X.vertices})
        with pytest.raises(NotHomogeneous):
            validate_unfolded(phi)

    def test_not_surjective(self):
        X = SimplicialComplex([(0, 1), (1, 2)])
        Y = SimplicialComplex([(0, 1), (1, 2), (2, 0)])
        with pytest.raises(NotSurjective):
            validate_unfolded(SimplicialMap(X, Y, {0: 0, 1: 1, 2: 2}))

    def test_degenerate(self):
        X = SimplicialComplex([(0, 1), (1, 2), (2, 3), (3, 0)])
        Y = SimplicialComplex([(0, 1), (1, 2), (2, 0)])
        with pytest.raises(DegenerateMap):
            validate_unfolded(SimplicialMap(X, Y, {0: 0, 1: 1, 2: 2, 3: 2}))

    def test_branched_sphere_needs_its_branch_set(self):
        e = CORPUS["branched_sphere"]
        report = validate_unfolded(e.map)
        assert not report.valid and report.covering is None
        assert any("fiber count" in d for d in report.diagnostics)

    def test_uneven_fibers(self):
        # pentagon onto a triangle: edge 0-1 has two preimages, edge 1-2 only one
        X = SimplicialComplex([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        Y = SimplicialComplex([(0, 1), (1, 2), (2, 0)])
        phi = SimplicialMap(X, Y, {0: 0, 1: 1, 2: 2, 3: 0, 4: 2})
        report = validate_unfolded(phi)
        assert not report.valid

    def test_branch_of_wrong_codimension(self):
        e = CORPUS["doubling_circle"]
        report = validate_unfolded(e.map, [(0,)])
        assert not report.valid


class TestTransfer:
    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_transfer_after_pullback_is_degree(self, name):
        cov = covering(name)
        rng = random.Random(name)
        for k in range(cov.target.dim + 1):
            for _ in range(30):
                c = random_cochain(rng, cov.target, k)
                assert transfer(cov, pullback(cov, c, k), k) == {t: cov.degree * v
                                                                  for t, v in nonzero(c).items()}

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_commutes_with_coboundary(self, name):
        cov = covering(name)
        rng = random.Random(1)
        for k in range(cov.source.dim):
            c = random_cochain(rng, cov.source, k)
            lhs = transfer(cov, coboundary(cov.source, c, k), k + 1)
            rhs = coboundary(cov.target, transfer(cov, c, k), k)
            assert lhs == rhs

    def test_zero_cochain(self):
        cov = covering("branched_sphere")
        assert transfer(cov, {}, 1) == {}

    def test_pole_weighted_by_two(self):
        cov = covering("branched_sphere")
        assert transfer(cov, {(6,): F(5, 3)}, 0) == {(3,): F(10, 3)}

    def test_unbranched_vertex_weight_one(self):
        cov = covering("branched_sphere")
        assert transfer(cov, {(0,): F(1)}, 0) == {(0,): F(1)}

    @settings(max_examples=30)
    @given(st.integers(0, 10**6), st.integers(-5, 5))
    def test_linear(self, seed, k):
        cov = covering("doubling_circle")
        rng = random.Random(seed)
        a, b = random_cochain(rng, cov.source, 1), random_cochain(rng, cov.source, 1)
        combo = {s: a[s] + k * b[s] for s in a}
        ta, tb = transfer(cov, a, 1), transfer(cov, b, 1)
        expected = nonzero({t: ta.get(t, 0) + k * tb.get(t, 0) for t in cov.target.simplices_of_dim(1)})
        assert transfer(cov, combo, 1) == expected

    def test_needs_validation(self):
        with pytest.raises(NotValidated):
            transfer(CORPUS["doubling_circle"].map, {}, 0)


class TestFundamentalCycle:
    def test_identity(self):
        cov = covering("identity_sphere")
        chain = fundamental_cycle_of_cover(cov)
        assert chain == orient(cov.target)

    def test_doubling_circle(self):
        chain = fundamental_cycle_of_cover(covering("doubling_circle"))
        assert len(chain) == 6 and boundary(chain, 1) == {}

    def test_branched_sphere(self):
        chain = fundamental_cycle_of_cover(covering("branched_sphere"))
        assert len(chain) == 12 and boundary(chain, 2) == {}

    def test_needs_validation(self):
        with pytest.raises(NotValidated):
            fundamental_cycle_of_cover(CORPUS["identity_sphere"].map)

    def test_covering_type(self):
        assert isinstance(covering("identity_sphere"), BranchedCovering)


class TestParse:
    def test_comments_and_sections(self):
        data = parse_cover("# hi\nname x\ndegree 1\nsource\n0 1\nend\ntarget\n0 1 # edge\nend\n"
                           "map\n0 0\n1 1\nend\n")
        assert data["name"] == "x" and data["source"] == [(0, 1)] and data["map"] == {0: 0, 1: 1}

    @pytest.mark.parametrize("text", [
        "source\n0 1\n",
        "bogus 3\n",
        "source\n0 1\nend\ntarget\n0 1\nend\nmap\n0\nend\n",
        "name x\n",
    ])
    def test_errors(self, text):
        with pytest.raises(ValueError):
            parse_cover(text)

    def test_map_must_land_in_target(self):
        with pytest.raises(ValueError):
            SimplicialMap(SimplicialComplex([(0, 1)]), SimplicialComplex([(0,), (1,)]), {0: 0, 1: 1})
