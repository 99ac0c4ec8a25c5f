from fractions import Fraction

import numpy as np
import pytest

import mahler3d as M

import oracles


def test_c_theta_fixture_values(cube_r, octa_r, cubocta_r):
    # e3 is parallel to the four side facets of the cube
    assert M.c_theta(cube_r, M.direction((0, 0, 1))) == 2
    assert M.c_theta(octa_r, M.direction((3, 5, 7))) == 0
    # in the plane of one square facet pair of the cuboctahedron
    assert M.c_theta(cubocta_r, M.direction((1, 1, 0))) == 1


def test_c_theta_sign_invariant(cubocta_r):
    a = M.c_theta(cubocta_r, M.direction((1, 1, 0)))
    b = M.c_theta(cubocta_r, M.direction((-1, -1, 0)))
    assert a == b


def test_c_theta_matches_oracle(cube_d, cubocta_d, hex_prism_r):
    bodies = [cube_d, cubocta_d, M.to_double(hex_prism_r)]
    dirs = [(0.0, 0.0, 1.0), (1.0, 1.0, 0.0), (3.0, 5.0, 7.0),
            (1.0, 0.0, 0.0)]
    for P in bodies:
        for v in dirs:
            got = M.c_theta(P, M.direction(v))
            ref = oracles.c_theta_oracle(P.as_array(), v)
            assert got == ref


def test_dimension_bound_fixtures(cube_r, octa_r, cubocta_r):
    rep = M.dimension_bound(cube_r, M.direction((0, 0, 1)))
    assert (rep.bound, rep.dim_actual, rep.nontrivial_certified) == \
        (3, 3, False)
    rep = M.dimension_bound(octa_r, M.direction((3, 5, 7)))
    assert (rep.bound, rep.dim_actual, rep.nontrivial_certified) == \
        (3, 3, False)
    rep = M.dimension_bound(cubocta_r, M.direction((1, 1, 0)))
    assert (rep.bound, rep.dim_actual, rep.nontrivial_certified) == \
        (4, 4, True)
    assert rep.witness_speed is not None


def test_dimension_bound_never_violated_on_corpus(corpus50):
    rng = np.random.default_rng(9)
    for P in corpus50[:20]:
        for _ in range(4):
            v = tuple(float(x) for x in rng.normal(size=3))
            rep = M.dimension_bound(P, M.direction(v))
            assert rep.dim_actual >= rep.bound


def test_generic_direction_avoids_facets(cube_r, cubocta_r):
    th = M.generic_direction([cube_r, cubocta_r], seed=1)
    for P in (cube_r, cubocta_r):
        assert M.c_theta(P, th) == 0
        for f in P.lattice.I2:
            n, _ = P.lattice.facet_planes[f]
            assert sum(c * x for c, x in zip(th.carrier, n)) != 0


def test_in_plane_direction_parallel_to_its_facet_only(cubocta_r):
    lat = cubocta_r.lattice
    squares = [f for f in lat.I2 if lat.m(f) == 4]
    f = squares[0]
    th = M.in_plane_direction(cubocta_r, f)
    mate = lat.opposite_facet[f]
    for g in lat.I2:
        n, _ = lat.facet_planes[g]
        d = sum(c * x for c, x in zip(th.carrier, n))
        if g in (f, mate):
            assert d == 0
        else:
            assert d != 0


def _check_witness(P, cls):
    """Re-derive the claimed witness from scratch and certify it."""
    ev = cls.evidence
    side = ev["witness_side"]
    B = P if side == "primal" else M.polar(P)
    th = M.direction(ev["witness_theta"])
    S = M.admissible_space(B, th)
    alpha = M.speed_vector(B, ev["witness_speed"])
    assert float(M.admissibility_residual(B, th, alpha)) == 0
    assert not M.is_trivial(S, alpha)
    assert ev["witness_dim"] >= ev["witness_bound"] > 3


def test_classify_cube(cube_r):
    cls = M.classify_minimizer_candidate(cube_r)
    assert cls.verdict == M.PARALLELEPIPED
    assert (cls.evidence["V"], cls.evidence["F"]) == (8, 6)


def test_classify_octa(octa_r):
    cls = M.classify_minimizer_candidate(octa_r)
    assert cls.verdict == M.AFFINE_OCTAHEDRON
    assert (cls.evidence["V"], cls.evidence["F"]) == (6, 8)


def test_classify_affine_images(cube_r, octa_r):
    A = [[2, 1, 0], [0, 1, 5], [0, 0, 3]]
    assert M.classify_minimizer_candidate(
        M.linear_image(cube_r, A)).verdict == M.PARALLELEPIPED
    assert M.classify_minimizer_candidate(
        M.linear_image(octa_r, A)).verdict == M.AFFINE_OCTAHEDRON


def test_classify_cubocta_excluded_with_witness(cubocta_r):
    cls = M.classify_minimizer_candidate(cubocta_r)
    assert cls.verdict == M.EXCLUDED
    _check_witness(cubocta_r, cls)


def test_classify_polar_swaps(cube_r, cubocta_r):
    assert M.classify_minimizer_candidate(
        M.polar(cube_r)).verdict == M.AFFINE_OCTAHEDRON
    cls = M.classify_minimizer_candidate(M.polar(cubocta_r))
    assert cls.verdict == M.EXCLUDED


def test_classify_hex_prism_excluded(hex_prism_r):
    lat = hex_prism_r.lattice
    assert (lat.V, lat.F) == (12, 8)
    cls = M.classify_minimizer_candidate(hex_prism_r)
    assert cls.verdict == M.EXCLUDED
    _check_witness(hex_prism_r, cls)


def test_classify_double_input_snaps(cube_d, cubocta_d):
    assert M.classify_minimizer_candidate(cube_d).verdict == M.PARALLELEPIPED
    assert M.classify_minimizer_candidate(cubocta_d).verdict == M.EXCLUDED


def test_classify_random_simplicial_excluded(corpus50):
    # random bodies with more than 3 pairs are neither parallelepipeds nor
    # octahedra; 3-pair bodies are affine octahedra by the 6-vertex census
    for P in corpus50[:8]:
        cls = M.classify_minimizer_candidate(P)
        if P.n_pairs == 3:
            assert cls.verdict == M.AFFINE_OCTAHEDRON
        else:
            assert cls.verdict == M.EXCLUDED


def test_dimension_report_fields(cubocta_r):
    rep = M.dimension_bound(cubocta_r, M.direction((1, 1, 0)))
    assert rep.c_theta == Fraction(1)
    assert rep.space.dim == rep.dim_actual
