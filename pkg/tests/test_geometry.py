from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull

import mahler3d as M
from mahler3d.errors import (DegenerateInput, InputError, SingularMatrix,
                             ToleranceConflict)

import oracles
from conftest import CUBE_REPS, CUBOCTA_REPS, OCTA_REPS, random_corpus


def test_cube_counts_and_volume(cube_r):
    lat = cube_r.lattice
    assert (lat.V, lat.E, lat.F) == (8, 12, 6)
    assert lat.facet_size_census() == {4: 6}
    assert M.volume(cube_r) == Fraction(8)


def test_octa_counts_and_volume(octa_r):
    lat = octa_r.lattice
    assert (lat.V, lat.E, lat.F) == (6, 12, 8)
    assert lat.facet_size_census() == {3: 8}
    assert M.volume(octa_r) == Fraction(4, 3)


def test_cubocta_counts_and_volume(cubocta_r):
    lat = cubocta_r.lattice
    assert (lat.V, lat.E, lat.F) == (12, 24, 14)
    assert lat.facet_size_census() == {3: 8, 4: 6}
    assert M.volume(cubocta_r) == Fraction(20, 3)


def test_double_kernel_matches_rational(cube_d, octa_d, cubocta_d):
    for P, vol in ((cube_d, 8.0), (octa_d, 4 / 3), (cubocta_d, 20 / 3)):
        assert M.volume(P) == pytest.approx(vol, rel=1e-12)


def test_euler_formula_everywhere(corpus50):
    for P in corpus50:
        lat = P.lattice
        assert lat.V - lat.E + lat.F == 2


def test_counts_match_oracle_on_random_bodies(corpus50):
    for P in corpus50[:20]:
        pts = P.as_array()
        assert (P.lattice.V, P.lattice.E, P.lattice.F) == \
            oracles.hull_counts(pts)


def test_volume_matches_scipy_on_random_bodies(corpus50):
    for P in corpus50[:20]:
        ref = ConvexHull(P.as_array()).volume
        assert float(M.volume(P)) == pytest.approx(ref, rel=1e-9)


def test_vertex_layout_reps_first_antipodal_exact(corpus50, cube_r):
    for P in corpus50[:10] + [cube_r]:
        k = P.n_pairs
        assert P.V == 2 * k
        for i in range(k):
            assert P.pairing[i] == i + k
            assert all(P.vertices[i + k][c] == -P.vertices[i][c]
                       for c in range(3))


def test_interior_point_dedup():
    # the origin and a deep interior pair must be dropped
    P = M.build_sym_polytope(CUBE_REPS + [(0, 0, 0), (Fraction(1, 2), 0, 0)],
                             kernel=M.RATIONAL)
    assert P.V == 8


def test_duplicate_points_collapse():
    P = M.build_sym_polytope(CUBE_REPS + CUBE_REPS, kernel=M.RATIONAL)
    assert P.V == 8


def test_degenerate_input_rejected():
    with pytest.raises(DegenerateInput):
        M.build_sym_polytope([(1, 0, 0), (0, 1, 0)], kernel=M.RATIONAL)
    with pytest.raises(DegenerateInput):
        # coplanar through the origin: not full-dimensional
        M.build_sym_polytope([(1, 0, 0), (0, 1, 0), (1, 1, 0)],
                             kernel=M.RATIONAL)


def test_empty_input_rejected():
    with pytest.raises(InputError):
        M.build_sym_polytope([], kernel=M.RATIONAL)


def test_near_duplicate_merges_or_conflicts():
    # an almost-mirror point within the merge tolerance gets absorbed
    pts = [(1.0, 1.0, 1.0), (1.0, 1.0, -1.0), (1.0, -1.0, 1.0),
           (-1.0, 1.0, 1.0), (-1.0 + 1e-12, -1.0, -1.0 - 1e-12)]
    P = M.build_sym_polytope(pts, kernel=M.DOUBLE, tol=1e-9)
    assert P.V == 8
    # exact kernel never merges: distinct points inside tol are a conflict
    with pytest.raises(ToleranceConflict):
        M.build_sym_polytope(
            [(1, 0, 0), (Fraction(10 ** 12 + 1, 10 ** 12), 0, 0),
             (0, 1, 0), (0, 0, 1)], kernel=M.RATIONAL, tol=1e-9)


def test_linear_image_scales_volume(cube_r):
    A = [[2, 1, 0], [0, 1, 0], [0, 0, 3]]
    Q = M.linear_image(cube_r, A)
    assert M.volume(Q) == Fraction(8) * 6  # |det A| = 6
    with pytest.raises(SingularMatrix):
        M.linear_image(cube_r, [[1, 0, 0], [2, 0, 0], [0, 0, 1]])


def test_linear_image_random_dets(corpus50):
    rng = np.random.default_rng(3)
    for P in corpus50[:5]:
        A = rng.normal(size=(3, 3))
        while abs(np.linalg.det(A)) < 0.3:
            A = rng.normal(size=(3, 3))
        Q = M.linear_image(P, A)
        assert float(M.volume(Q)) == pytest.approx(
            abs(np.linalg.det(A)) * float(M.volume(P)), rel=1e-9)


def test_general_polytope_volume():
    simplex = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    P = M.build_polytope(simplex, kernel=M.RATIONAL)
    assert P.volume() == Fraction(1, 6)


def test_snap_and_to_double_round_trip(cubocta_d):
    R = M.snap_to_rational(cubocta_d)
    assert R.kernel == M.RATIONAL
    assert M.same_labeled_lattice(R.lattice, cubocta_d.lattice)
    D = M.to_double(R)
    assert D.kernel == M.DOUBLE
    assert np.allclose(D.as_array(), cubocta_d.as_array())


def test_save_load_round_trip_exact(tmp_path, cubocta_r):
    path = tmp_path / "body.json"
    M.save_polytope(cubocta_r, str(path))
    Q = M.load_polytope(str(path), kernel=M.RATIONAL)
    assert Q.vertices == cubocta_r.vertices
    assert M.same_labeled_lattice(Q.lattice, cubocta_r.lattice)


def test_load_accepts_fraction_strings():
    P = M.load_polytope({"vertices": [["1/2", "1/2", "1/2"],
                                      ["1/2", "1/2", "-1/2"],
                                      ["1/2", "-1/2", "1/2"],
                                      ["-1/2", "1/2", "1/2"]],
                         "symmetric": True}, kernel=M.RATIONAL)
    assert M.volume(P) == Fraction(1)


def test_face_lattice_incidences(cubocta_r):
    lat = cubocta_r.lattice
    # every edge lies on exactly two facets, every facet cycle closes
    for e in range(lat.E):
        assert len(lat.phi2[e]) == 2
    for f in lat.I2:
        cyc = lat.facet_cycles[f]
        assert len(set(cyc)) == len(cyc) >= 3
    # opposite facets pair up antipodally
    for f in lat.I2:
        mate = lat.opposite_facet[f]
        assert lat.opposite_facet[mate] == f
        a = frozenset(cyc_v for cyc_v in lat.facet_cycles[f])
        b = frozenset(cubocta_r.pairing[v] for v in lat.facet_cycles[mate])
        assert a == b
