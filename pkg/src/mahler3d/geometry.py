"""Origin-symmetric 3D polytope kernel: construction, symmetry pairing, face
lattice, and volume, over two arithmetic backends.

Coordinates are exact ``Fraction`` triples under the ``"rational"`` kernel and
float64 triples under ``"double"``.  Combinatorial decisions (facet
membership, extreme-point status, lattice identity) never depend on rounding
in rational mode; double mode applies the scaled tolerances from ``hull``.

Vertex layout convention: vertices[0..k-1] are pair representatives and
vertices[k+i] == -vertices[i] exactly, so the antipodal pairing is the index
involution i <-> i+k.  All constructors produce coordinates for the
representatives only and mirror them by exact negation, which makes the
pairing invariant structural rather than numerical.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels, hull as _hull
from .errors import (DegenerateInput, InputError, NumericalDegeneracy,
                     SingularMatrix, ToleranceConflict)
from .hull import cross, dot, neg, sub

RATIONAL = "rational"
DOUBLE = "double"
_KERNELS = (RATIONAL, DOUBLE)


def _as_coord(x, kernel):
    if kernel == RATIONAL:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, (int, float)):
            return Fraction(x)
        raise InputError(f"cannot interpret coordinate {x!r} rationally")
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def as_point(p, kernel):
    """Coerce a length-3 sequence to a coordinate triple of the kernel's type."""
    if len(p) != 3:
        raise InputError(f"point of length {len(p)}")
    t = tuple(_as_coord(c, kernel) for c in p)
    if kernel == DOUBLE and not all(np.isfinite(c) for c in t):
        raise InputError(f"non-finite coordinate in {p!r}")
    return t


class FaceLattice:
    """Labeled incidence structure of a 3-polytope.

    Vertices, edges, and facets carry integer labels (I0, I1, I2).  phi1 maps
    a vertex to its incident edge labels, phi2 an edge to its two incident
    facets, and phi0 a facet to its vertex cycle, ordered along the boundary
    consistently with the outward normal.  facet_planes[k] = (n, h) with the
    facet on {x : n.x = h}; normals are unit length in double mode and
    unnormalized exact vectors in rational mode.
    """

    def __init__(self, n_vertices, edges, facet_cycles, facet_planes,
                 opposite_facet=None):
        self.n_vertices = n_vertices
        self.edges = edges                    # tuple of sorted (i, j)
        self.facet_cycles = facet_cycles      # tuple of vertex-label cycles
        self.facet_planes = facet_planes      # tuple of (normal, offset)
        self.opposite_facet = opposite_facet  # facet involution, symmetric case
        edge_label = {e: k for k, e in enumerate(edges)}
        phi1 = [set() for _ in range(n_vertices)]
        phi2 = [[] for _ in edges]
        for f, cyc in enumerate(facet_cycles):
            m = len(cyc)
            for a in range(m):
                i, j = cyc[a], cyc[(a + 1) % m]
                k = edge_label[(min(i, j), max(i, j))]
                phi2[k].append(f)
                phi1[i].add(k)
        self.phi1 = tuple(frozenset(s) for s in phi1)
        self.phi2 = tuple(tuple(sorted(p)) for p in phi2)
        self._vertex_facet_cycles = None

    @property
    def V(self):
        return self.n_vertices

    @property
    def E(self):
        return len(self.edges)

    @property
    def F(self):
        return len(self.facet_cycles)

    @property
    def I0(self):
        return range(self.V)

    @property
    def I1(self):
        return range(self.E)

    @property
    def I2(self):
        return range(self.F)

    def phi0(self, k):
        return self.facet_cycles[k]

    def facet_sets(self):
        return [frozenset(c) for c in self.facet_cycles]

    def m(self, k):
        return len(self.facet_cycles[k])

    def d(self, i):
        return len(self.phi1[i])

    def facet_size_census(self):
        census = {}
        for c in self.facet_cycles:
            census[len(c)] = census.get(len(c), 0) + 1
        return census

    def signature(self):
        """Canonical token for labeled-lattice equality tests."""
        return (self.n_vertices,
                tuple(sorted(tuple(sorted(c)) for c in self.facet_cycles)))

    def vertex_facet_cycles(self):
        """For each vertex, its incident facets in cyclic order around it.

        This is the facet-cycle data of the order-reversed (polar) lattice.
        """
        if self._vertex_facet_cycles is not None:
            return self._vertex_facet_cycles
        edge_label = {e: k for k, e in enumerate(self.edges)}
        nxt = {}  # (facet, vertex) -> successor vertex in that facet's cycle
        for f, cyc in enumerate(self.facet_cycles):
            m = len(cyc)
            for a in range(m):
                nxt[(f, cyc[a])] = cyc[(a + 1) % m]
        out = []
        for v in range(self.n_vertices):
            incident = sorted(f for f, cyc in enumerate(self.facet_cycles) if v in cyc)
            start = incident[0]
            ring = [start]
            f = start
            while True:
                w = nxt[(f, v)]
                k = edge_label[(min(v, w), max(v, w))]
                a, b = self.phi2[k]
                f = b if a == f else a
                if f == start:
                    break
                ring.append(f)
                if len(ring) > len(incident):
                    raise NumericalDegeneracy(
                        f"facet ring around vertex {v} does not close", offending=[v])
            if len(ring) != len(incident):
                raise NumericalDegeneracy(
                    f"facet ring around vertex {v} misses facets", offending=[v])
            out.append(tuple(ring))
        self._vertex_facet_cycles = tuple(out)
        return self._vertex_facet_cycles


def same_labeled_lattice(a, b):
    """Equality of labeled face lattices (identical vertex labels, same
    facet vertex-sets; edges and incidence maps then agree as well)."""
    return a.signature() == b.signature()


def _build_lattice(n, hull_data, pairing=None):
    """Assemble a FaceLattice from hull output; indices must already be
    relabeled to the final vertex order."""
    edge_count = {}
    for f in hull_data:
        cyc = f[0]
        m = len(cyc)
        for a in range(m):
            i, j = cyc[a], cyc[(a + 1) % m]
            e = (min(i, j), max(i, j))
            edge_count[e] = edge_count.get(e, 0) + 1
    bad = [e for e, c in edge_count.items() if c != 2]
    if bad:
        raise NumericalDegeneracy(f"edges not shared by exactly two facets: {bad[:4]}",
                                  offending=bad)
    edges = tuple(sorted(edge_count))
    cycles = tuple(f[0] for f in hull_data)
    planes = tuple((f[1], f[2]) for f in hull_data)

    opposite = None
    if pairing is not None:
        key_to_label = {tuple(sorted(c)): k for k, c in enumerate(cycles)}
        opposite = []
        for c in cycles:
            mk = tuple(sorted(pairing[i] for i in c))
            if mk not in key_to_label:
                raise NumericalDegeneracy("facet family not closed under antipodal map",
                                          offending=list(c))
            opposite.append(key_to_label[mk])
        opposite = tuple(opposite)

    lat = FaceLattice(n, edges, cycles, planes, opposite_facet=opposite)
    if lat.V - lat.E + lat.F != 2:
        raise NumericalDegeneracy(
            f"Euler check failed: V={lat.V} E={lat.E} F={lat.F}")
    return lat


def _canonicalize_pair_planes(cycles_planes, pairing):
    """Force the plane of each antipodal facet to be the exact negation of its
    representative's, so polar vertices pair exactly."""
    key_of = [tuple(sorted(c)) for c, _, _ in cycles_planes]
    index = {k: i for i, k in enumerate(key_of)}
    out = list(cycles_planes)
    for i, k in enumerate(key_of):
        mk = tuple(sorted(pairing[v] for v in k))
        j = index.get(mk)
        if j is None or j == i:
            raise NumericalDegeneracy("unpaired facet", offending=list(k))
        if k < mk:
            cyc, n, h = out[j]
            rn, rh = out[i][1], out[i][2]
            out[j] = (cyc, neg(rn), rh)
    return out


class SymPolytope:
    """Origin-symmetric 3D polytope as an exactly-paired vertex list with its
    face lattice.

    Immutable after construction.  ``vertices[pairing[i]] == -vertices[i]``
    holds coordinate-for-coordinate; every listed vertex is extreme; the
    origin is interior (every facet offset is positive).
    """

    def __init__(self, vertices, pairing, dim_certificate, lattice, kernel):
        self.vertices = vertices
        self.pairing = pairing
        self.dim_certificate = dim_certificate
        self.lattice = lattice
        self.kernel = kernel
        self._array = None

    @property
    def V(self):
        return len(self.vertices)

    @property
    def n_pairs(self):
        return len(self.vertices) // 2

    def rep_indices(self):
        return range(self.n_pairs)

    def as_array(self):
        if self._array is None:
            self._array = np.array([[float(c) for c in v] for v in self.vertices])
        return self._array

    def inradius(self):
        """Distance from the origin to the nearest facet plane."""
        if self.kernel == RATIONAL:
            vals = []
            for n, h in self.lattice.facet_planes:
                nn2 = dot(n, n)
                vals.append(h * h / nn2)
            r2 = min(vals)
            return float(r2) ** 0.5
        return min(h for _, h in self.lattice.facet_planes)

    def circumradius(self):
        return max(float(dot(v, v)) for v in self.vertices) ** 0.5

    def to_json_dict(self):
        reps = [self.vertices[i] for i in self.rep_indices()]
        if self.kernel == RATIONAL:
            verts = [[str(c) for c in v] for v in reps]
        else:
            verts = [[float(c) for c in v] for v in reps]
        return {"vertices": verts, "symmetric": True}

    def __repr__(self):
        return (f"SymPolytope(V={self.V}, E={self.lattice.E}, "
                f"F={self.lattice.F}, kernel={self.kernel!r})")


def _dedupe_and_pair(points, tol, kernel):
    """Mirror, deduplicate, and symmetrize an input point list.

    Returns the representative coordinate list.  Clusters of points within
    tol collapse to their symmetrized mean; surviving distinct points closer
    than tol raise ToleranceConflict.
    """
    if kernel == RATIONAL:
        full = list(points) + [neg(p) for p in points]
        uniq = list(dict.fromkeys(full))
        if tol:
            t2 = tol * tol
            for a in range(len(uniq)):
                for b in range(a + 1, len(uniq)):
                    d = sub(uniq[a], uniq[b])
                    if dot(d, d) <= t2:
                        raise ToleranceConflict(
                            f"points {uniq[a]} and {uniq[b]} within tol but distinct")
        reps = []
        seen = set()
        for p in uniq:
            if p in seen:
                continue
            np_ = neg(p)
            if np_ not in uniq:
                raise ToleranceConflict(f"point {p} lost its antipode")  # unreachable
            if p == np_:
                continue  # origin; never a vertex
            seen.add(p)
            seen.add(np_)
            reps.append(max(p, np_))
        return reps

    full = [tuple(map(float, p)) for p in points]
    full = full + [neg(p) for p in full]
    n = len(full)
    t2 = tol * tol
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            d = sub(full[a], full[b])
            if dot(d, d) <= t2:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    clusters = {}
    for a in range(n):
        clusters.setdefault(find(a), []).append(a)
    # symmetrized cluster means: the antipodal image of a cluster is a cluster
    reps = []
    done = set()
    for root, members in sorted(clusters.items()):
        if root in done:
            continue
        mean = tuple(sum(full[m][c] for m in members) / len(members) for c in range(3))
        anti = neg(mean)
        # locate the antipodal cluster through any member's mirror
        mirror_root = find((members[0] + n // 2) % n)
        done.add(root)
        done.add(mirror_root)
        if mirror_root == root:
            continue  # self-antipodal cluster collapses to the origin
        reps.append(max(mean, anti))
    for a in range(len(reps)):
        pts = [reps[a], neg(reps[a])]
        for b in range(a + 1, len(reps)):
            for p in pts:
                for q in (reps[b], neg(reps[b])):
                    d = sub(p, q)
                    if dot(d, d) <= t2:
                        raise ToleranceConflict(
                            f"points {p} and {q} within tol but not identified")
    return reps


def _assemble(reps, kernel, keep_order, dist_tol=None):
    """Hull the mirrored representative list and build a SymPolytope.

    keep_order=False sorts representatives canonically (public construction);
    keep_order=True preserves the given order so vertex labels survive a
    deformation.  Non-extreme pairs are dropped.
    """
    if not keep_order:
        reps = sorted(reps, reverse=True)
    k = len(reps)
    points = list(reps) + [neg(p) for p in reps]
    origin = (Fraction(0),) * 3 if kernel == RATIONAL else (0.0, 0.0, 0.0)
    h = _hull.hull_3d(points, exact=(kernel == RATIONAL), ref=origin, dist_tol=dist_tol)

    corner = set(h.corners)
    mirror = {i: (i + k) % (2 * k) for i in range(2 * k)}
    for i in corner:
        if mirror[i] not in corner:
            raise NumericalDegeneracy(
                f"extreme-point set not antipodally closed at index {i}", offending=[i])
    kept_reps = [i for i in range(k) if i in corner]
    if len(kept_reps) < 3:
        raise DegenerateInput("fewer than three antipodal vertex pairs")
    new_of = {}
    for a, i in enumerate(kept_reps):
        new_of[i] = a
        new_of[i + k] = a + len(kept_reps)
    vertices = tuple([points[i] for i in kept_reps]
                     + [points[i + k] for i in kept_reps])
    kk = len(kept_reps)
    pairing = tuple([a + kk for a in range(kk)] + [a for a in range(kk)])

    relabeled = []
    for f in h.facets:
        cyc = _hull._canonical_cycle(tuple(new_of[i] for i in f.cycle))
        relabeled.append((cyc, f.normal, f.offset))
    relabeled.sort(key=lambda t: tuple(sorted(t[0])))
    relabeled = _canonicalize_pair_planes(relabeled, pairing)
    lattice = _build_lattice(len(vertices), relabeled, pairing=pairing)
    cert = _find_dim_certificate(vertices, kernel)
    return SymPolytope(vertices, pairing, cert, lattice, kernel)


def _find_dim_certificate(vertices, kernel):
    tol2 = 0
    if kernel == DOUBLE:
        scale = max(1.0, max(abs(c) for v in vertices for c in v))
        tol2 = (_hull.AREA_TOL_REL * scale * scale) ** 2
    dim, cert = _hull.affine_dim(list(vertices), kernel == RATIONAL, tol2=tol2)
    if dim < 3:
        raise DegenerateInput(f"vertex set has affine dimension {dim}")
    return tuple(cert)


def build_sym_polytope(points, tol=None, kernel=RATIONAL):
    """Hull of points together with their antipodes, as a SymPolytope.

    Input points are mirrored, symmetrized so the antipodal pairing is exact,
    and reduced to the extreme points.  ``tol`` is the point-identification
    tolerance (defaults: 0 in rational mode, 1e-9 x scale in double mode).

    Raises DegenerateInput when the affine hull has dimension < 3 and
    ToleranceConflict when two distinct points sit within tol of each other
    without being identified by symmetrization.
    """
    if kernel not in _KERNELS:
        raise InputError(f"unknown kernel {kernel!r}")
    pts = [as_point(p, kernel) for p in points]
    if not pts:
        raise DegenerateInput("empty point set")
    if tol is None:
        if kernel == RATIONAL:
            tol = 0
        else:
            scale = max(1.0, max(abs(c) for p in pts for c in p))
            tol = 1e-9 * scale
    if tol < 0:
        raise InputError("tol must be nonnegative")
    if kernel == RATIONAL and tol:
        tol = Fraction(tol)
    reps = _dedupe_and_pair(pts, tol, kernel)
    if len(reps) < 3:
        raise DegenerateInput("need at least three antipodal vertex pairs")
    return _assemble(reps, kernel, keep_order=False)


def from_representatives(reps, kernel, dist_tol=None):
    """SymPolytope from already-symmetrized representative coordinates,
    preserving their order (labels survive when no vertex drops out)."""
    return _assemble(list(reps), kernel, keep_order=True, dist_tol=dist_tol)


def face_lattice(P):
    """The labeled face lattice of ``P`` (computed at construction)."""
    return P.lattice


def volume(P):
    """|P| by signed tetrahedra over the origin, per facet fan.

    Exact Fraction in rational mode.
    """
    lat = P.lattice
    if P.kernel == RATIONAL:
        total = Fraction(0)
        for cyc in lat.facet_cycles:
            v0 = P.vertices[cyc[0]]
            for a in range(1, len(cyc) - 1):
                v1 = P.vertices[cyc[a]]
                v2 = P.vertices[cyc[a + 1]]
                total += dot(v0, cross(v1, v2))
        return total / 6
    flat = []
    offsets = [0]
    for cyc in lat.facet_cycles:
        flat.extend(cyc)
        offsets.append(len(flat))
    return _kernels.fan_volume(P.as_array(), np.array(flat), np.array(offsets))


def linear_image(P, A):
    """Image of ``P`` under an invertible linear map (3x3 row-major matrix).

    Raises SingularMatrix when |det A| is below tolerance.  Symmetry is
    preserved structurally: images are computed for pair representatives and
    mirrored by exact negation.
    """
    if P.kernel == RATIONAL:
        M = [[_as_coord(A[i][j], RATIONAL) for j in range(3)] for i in range(3)]
        det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
               - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
               + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
        if det == 0:
            raise SingularMatrix("matrix is singular")
        reps = []
        for i in P.rep_indices():
            v = P.vertices[i]
            reps.append(tuple(M[r][0] * v[0] + M[r][1] * v[1] + M[r][2] * v[2]
                              for r in range(3)))
    else:
        M = np.asarray(A, dtype=float)
        det = np.linalg.det(M)
        scale = max(1.0, float(np.abs(M).max())) ** 3
        if abs(det) <= 1e-12 * scale:
            raise SingularMatrix(f"matrix determinant {det:.3e} below tolerance")
        reps = [tuple(float(c) for c in M @ np.array(P.vertices[i]))
                for i in P.rep_indices()]
    Q = from_representatives(reps, P.kernel)
    if Q.V != P.V:
        raise NumericalDegeneracy(
            f"linear image lost vertices ({P.V} -> {Q.V})")
    return Q


class ConvexPolytope:
    """General-position convex polytope (no symmetry), used only for Santalo
    diagnostics on deformed polars."""

    def __init__(self, vertices, lattice, kernel):
        self.vertices = vertices
        self.lattice = lattice
        self.kernel = kernel

    @property
    def V(self):
        return len(self.vertices)

    def volume(self):
        if self.kernel == RATIONAL:
            total = Fraction(0)
            for cyc in self.lattice.facet_cycles:
                v0 = self.vertices[cyc[0]]
                for a in range(1, len(cyc) - 1):
                    total += dot(v0, cross(self.vertices[cyc[a]],
                                           self.vertices[cyc[a + 1]]))
            return total / 6
        arr = np.array(self.vertices, dtype=float)
        flat = []
        offsets = [0]
        for cyc in self.lattice.facet_cycles:
            flat.extend(cyc)
            offsets.append(len(flat))
        return _kernels.fan_volume(arr, np.array(flat), np.array(offsets))

    def centroid(self):
        n = len(self.vertices)
        return tuple(sum(v[c] for v in self.vertices) / n for c in range(3))


def build_polytope(points, kernel=DOUBLE, tol=None):
    """General convex polytope from a point list (extreme points kept)."""
    pts = [as_point(p, kernel) for p in points]
    if len(pts) < 4:
        raise DegenerateInput("need at least four points")
    uniq = list(dict.fromkeys(pts)) if kernel == RATIONAL else pts
    n = len(uniq)
    ref = tuple(sum(p[c] for p in uniq) / n for c in range(3))
    h = _hull.hull_3d(uniq, exact=(kernel == RATIONAL), ref=ref, dist_tol=tol)
    new_of = {i: a for a, i in enumerate(h.corners)}
    vertices = tuple(uniq[i] for i in h.corners)
    relabeled = []
    for f in h.facets:
        cyc = _hull._canonical_cycle(tuple(new_of[i] for i in f.cycle))
        relabeled.append((cyc, f.normal, f.offset))
    relabeled.sort(key=lambda t: tuple(sorted(t[0])))
    lattice = _build_lattice(len(vertices), relabeled)
    return ConvexPolytope(vertices, lattice, kernel)


def snap_to_rational(P, bits=40):
    """Round a double-kernel polytope to dyadic rationals (denominator 2^bits)
    and rebuild it on the exact kernel.  Combinatorial verdicts downstream
    then cannot flip on rounding."""
    if P.kernel == RATIONAL:
        return P
    den = 1 << bits
    reps = []
    for i in P.rep_indices():
        reps.append(tuple(Fraction(round(c * den), den) for c in P.vertices[i]))
    return from_representatives(reps, RATIONAL)


def to_double(P):
    """Rebuild a rational polytope on the float64 kernel."""
    if P.kernel == DOUBLE:
        return P
    reps = [tuple(float(c) for c in P.vertices[i]) for i in P.rep_indices()]
    return from_representatives(reps, DOUBLE)


def load_polytope(source, kernel=RATIONAL, tol=None):
    """Load the JSON polytope format {"vertices": [[x,y,z],...], "symmetric": true}.

    With "symmetric": true only one point per antipodal pair need be listed;
    the loader mirrors.  Coordinates may be numbers or decimal/fraction
    strings (strings are exact in rational mode).
    """
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = source
    if not isinstance(data, dict) or "vertices" not in data:
        raise InputError("polytope JSON must be an object with a 'vertices' key")
    pts = data["vertices"]
    return build_sym_polytope(pts, tol=tol, kernel=kernel)


def save_polytope(P, path):
    with open(path, "w") as fh:
        json.dump(P.to_json_dict(), fh, indent=2)
        fh.write("\n")
