from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull

import mahler3d as M
from mahler3d.errors import (DegenerateDeformation, InputError, NoPersistence,
                             ParallelismAmbiguity)

import oracles


def test_direction_normalizes_and_rejects_zero():
    d = M.direction((3, 0, 4))
    assert np.allclose(d.theta, (0.6, 0.0, 0.8))
    carrier = np.array([float(c) for c in d.carrier])
    assert np.linalg.norm(carrier) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InputError):
        M.direction((0, 0, 0))


def test_speed_vector_enforces_oddness(cube_r):
    with pytest.raises(InputError):
        M.speed_vector(cube_r, [1] * cube_r.V)
    alpha = M.speed_vector(cube_r, [1, 2, 3, 4, -1, -2, -3, -4])
    assert alpha.alpha[4] == -alpha.alpha[0]


def test_trivial_speeds_always_admissible(cube_r, cubocta_d):
    for P in (cube_r, cubocta_d):
        th = M.direction((3, 5, 7))
        S = M.admissible_space(P, th)
        for w in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            tv = M.trivial_speed(P, w)
            res = M.admissibility_residual(P, th, tv)
            assert float(res) <= 1e-9
            assert M.is_trivial(S, tv)


def test_admissible_dims_fixtures(cube_r, cube_d, octa_r, cubocta_r,
                                  cubocta_d):
    cases = [
        (cube_r, (1, 1, 1), 3),
        (cube_d, (1, 1, 1), 3),
        (octa_r, (3, 5, 7), 3),
        (cubocta_r, (1, 1, 0), 4),   # parallel to a square facet pair
        (cubocta_d, (1, 1, 0), 4),
        (cubocta_r, (3, 5, 7), 3),
    ]
    for P, vec, dim in cases:
        th = M.direction(vec if P.kernel == M.RATIONAL
                         else tuple(float(x) for x in vec))
        assert M.admissible_space(P, th).dim == dim


def test_admissible_dim_matches_dense_oracle(cube_d, cubocta_d, corpus50):
    rng = np.random.default_rng(5)
    bodies = [cube_d, cubocta_d] + corpus50[:8]
    for P in bodies:
        v = tuple(float(x) for x in rng.integers(-9, 10, 3))
        if not any(v):
            v = (1.0, 2.0, 3.0)
        got = M.admissible_space(P, M.direction(v)).dim
        # oracle solutions are full-length but odd, one per reduced vector
        ref = oracles.admissible_dim_oracle(P.as_array(), v)
        assert got == ref


def test_nontrivial_certification_cubocta(cubocta_r):
    th = M.direction((1, 1, 0))
    S = M.admissible_space(cubocta_r, th)
    extra = [b for b in S.basis if not M.is_trivial(S, b)]
    assert extra
    comp = M.nontrivial_component(S, extra[0])
    assert np.abs(np.asarray(comp, dtype=float)).max() > 1e-6


def test_deform_identity_at_zero(cubocta_r):
    th = M.direction((1, 1, 0))
    alpha = M.trivial_speed(cubocta_r, (1, 0, 0))
    Q = M.deform(cubocta_r, th, alpha, 0)
    assert Q.vertices == cubocta_r.vertices


def test_deform_preserves_lattice_small_t(cubocta_d):
    th = M.direction((1.0, 1.0, 0.0))
    S = M.admissible_space(cubocta_d, th)
    for alpha in S.basis:
        Q = M.deform(cubocta_d, th, alpha, 1e-3)
        assert M.same_labeled_lattice(Q.lattice, cubocta_d.lattice)


def test_deform_collapse_raises(cube_r):
    # alpha_i = x_i with theta = -e1 flattens the body at t = 1
    th = M.direction((-1, 0, 0))
    alpha = M.trivial_speed(cube_r, (1, 0, 0))
    with pytest.raises(DegenerateDeformation):
        M.deform(cube_r, th, alpha, 1)


def test_persistence_zero_speed_hits_cap(cube_r):
    alpha = M.speed_vector(cube_r, [0] * cube_r.V)
    c = M.persistence_interval(cube_r, M.direction((1, 0, 0)), alpha)
    assert c == pytest.approx(1e6)


def test_persistence_expansion_stops_before_collapse(cube_r):
    # volume (1 + t) * 8 along this system; hull degenerates at t = -1
    th = M.direction((1, 0, 0))
    alpha = M.trivial_speed(cube_r, (1, 0, 0))
    c = M.persistence_interval(cube_r, th, alpha)
    assert 0.05 <= float(c) < 1.0
    for t in (-c, Fraction(float(c)) / 2, c):
        Q = M.deform(cube_r, th, alpha, Fraction(float(t)))
        assert M.same_labeled_lattice(Q.lattice, cube_r.lattice)


def test_persistence_rejects_inadmissible_speed(cubocta_r):
    th = M.direction((3, 5, 7))
    # odd but violates facet affineness for a generic direction
    vals = [1, 0, 0, 0, 0, 0]
    alpha = M.speed_vector(cubocta_r, vals + [-v for v in vals])
    assert float(M.admissibility_residual(cubocta_r, th, alpha)) > 0
    with pytest.raises(NoPersistence):
        M.persistence_interval(cubocta_r, th, alpha)


def test_shadow_system_certifies(cubocta_r):
    th = M.direction((1, 1, 0))
    S = M.admissible_space(cubocta_r, th)
    alpha = next(b for b in S.basis if not M.is_trivial(S, b))
    sys_ = M.shadow_system(cubocta_r, th, alpha)
    assert sys_.c > 0
    assert sys_.base is cubocta_r


def test_volume_affine_exact_slope(cube_r):
    # expansion by diag(1+t, 1, 1): volume 8(1+t), slope exactly 8
    th = M.direction((1, 0, 0))
    alpha = M.trivial_speed(cube_r, (1, 0, 0))
    sys_ = M.shadow_system(cube_r, th, alpha)
    rep = M.check_volume_affine(sys_)
    assert rep["exact"]
    assert rep["slope"] == pytest.approx(8.0, rel=1e-12)
    assert abs(rep["quad_coeff"]) <= 1e-10


def test_volume_affine_matches_scipy(cubocta_d):
    th = M.direction((1.0, 1.0, 0.0))
    S = M.admissible_space(cubocta_d, th)
    alpha = next(b for b in S.basis if not M.is_trivial(S, b))
    sys_ = M.shadow_system(cubocta_d, th, alpha)
    rep = M.check_volume_affine(sys_)
    c = sys_.c
    for t in (-c / 2, c / 3):
        Q = M.deform(cubocta_d, th, alpha, t)
        ref = ConvexHull(Q.as_array()).volume
        assert rep["intercept"] + rep["slope"] * t == pytest.approx(
            ref, rel=1e-8)


def test_inverse_polar_convex(cubocta_r, cubocta_d):
    for P in (cubocta_r, cubocta_d):
        vec = (1, 1, 0) if P.kernel == M.RATIONAL else (1.0, 1.0, 0.0)
        th = M.direction(vec)
        S = M.admissible_space(P, th)
        alpha = next(b for b in S.basis if not M.is_trivial(S, b))
        sys_ = M.shadow_system(P, th, alpha)
        rep = M.check_inverse_polar_convexity(sys_)
        assert float(rep["min_second_diff"]) > 0


def test_parallelism_ambiguity_band(cube_d):
    # |theta . n| lands between 1e-14 and 1e-10 against the z facet
    th = M.direction((1.0, 0.0, 1e-12))
    with pytest.raises(ParallelismAmbiguity):
        M.admissible_space(cube_d, th)
