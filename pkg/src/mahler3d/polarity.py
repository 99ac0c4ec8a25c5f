"""Polar duality and the volume product.

The polar body K deg = {y : x.y <= 1 for all x in K} of a vertex-presented
polytope is produced directly from facet planes: the facet {n.x = h}
contributes the vertex n/h, and the face lattice of the polar is the
order-reversed lattice of the input (facets become vertices, vertex rings
become facet cycles).  No half-space intersection is performed anywhere in
this module; verify_incidence_duality instead re-hulls the produced vertex
set and compares lattices.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geometry as G
from .errors import (CenterOutsideBody, DualityViolation, NonConvergence,
                     NumericalDegeneracy)
from .hull import _canonical_cycle, _newell_normal, dot, neg, sub

MAHLER_BOUND = Fraction(32, 3)


@dataclass(frozen=True)
class VolumeProductReport:
    volume_primal: object
    volume_polar: object
    product: object
    santalo_point: tuple
    mahler_gap: object
    kernel: str


def polar(P):
    """The polar body of ``P`` as a SymPolytope with the order-reversed lattice.

    Vertices are n/h over facet planes; the facet cycle attached to each
    original vertex v is v's facet ring, oriented outward along v.  Because
    antipodal facet planes of ``P`` are exact negations, the polar's vertex
    pairing is again exact.
    """
    lat = P.lattice
    opp = lat.opposite_facet
    rep_facets = sorted({min(f, opp[f]) for f in lat.I2})
    K = len(rep_facets)
    new_of = {}
    for a, f in enumerate(rep_facets):
        new_of[f] = a
        new_of[opp[f]] = a + K
    reps = []
    for f in rep_facets:
        n, h = lat.facet_planes[f]
        reps.append((n[0] / h, n[1] / h, n[2] / h))
    vertices = tuple(reps) + tuple(neg(p) for p in reps)
    pairing = tuple(list(range(K, 2 * K)) + list(range(K)))

    rings = lat.vertex_facet_cycles()
    tagged = []
    for v in range(P.V):
        cyc = tuple(new_of[f] for f in rings[v])
        pv = P.vertices[v]
        nw = _newell_normal(vertices, cyc)
        side = dot(nw, pv)
        if side == 0:
            raise NumericalDegeneracy("degenerate polar facet", offending=list(cyc))
        if side < 0:
            cyc = tuple(reversed(cyc))
        if P.kernel == G.RATIONAL:
            plane = (pv, Fraction(1))
        else:
            L = float(dot(pv, pv)) ** 0.5
            plane = ((pv[0] / L, pv[1] / L, pv[2] / L), 1.0 / L)
        tagged.append((_canonical_cycle(cyc), plane[0], plane[1], v))
    tagged.sort(key=lambda t: tuple(sorted(t[0])))
    lattice = G._build_lattice(2 * K, [(c, n, h) for c, n, h, _ in tagged],
                               pairing=pairing)
    cert = G._find_dim_certificate(vertices, P.kernel)
    Q = G.SymPolytope(vertices, pairing, cert, lattice, P.kernel)
    # bookkeeping for the order reversal, consumed by verify_incidence_duality
    Q._primal_facet_of_vertex = tuple(rep_facets + [opp[f] for f in rep_facets])
    Q._primal_vertex_of_facet = tuple(t[3] for t in tagged)
    return Q


def _require_interior(lat, z, tol):
    margins = []
    for n, h in lat.facet_planes:
        margins.append(h - dot(n, z))
    worst = min(margins)
    if worst <= tol:
        raise CenterOutsideBody(
            f"center {tuple(map(float, z))} has facet margin {float(worst):.3e}")
    return margins


def santalo_polar(P, z, tol=None):
    """The Santalo polar K^z = z + (K - z) deg as a general ConvexPolytope.

    ``z`` must be interior with margin > tol (default 0 exact, 1e-12 double).
    The output lattice is the order reversal of P's; combinatorics do not
    depend on z while z stays interior.
    """
    kernel = P.kernel
    z = G.as_point(z, kernel)
    if tol is None:
        tol = 0 if kernel == G.RATIONAL else 1e-12
    lat = P.lattice
    margins = _require_interior(lat, z, tol)
    vertices = []
    for k in range(lat.F):
        n, _ = lat.facet_planes[k]
        m = margins[k]
        vertices.append((z[0] + n[0] / m, z[1] + n[1] / m, z[2] + n[2] / m))
    vertices = tuple(vertices)

    rings = lat.vertex_facet_cycles()
    data = []
    for v in range(P.V):
        cyc = rings[v]
        d = sub(P.vertices[v], z)
        nw = _newell_normal(vertices, cyc)
        side = dot(nw, d)
        if side == 0:
            raise NumericalDegeneracy("degenerate Santalo-polar facet",
                                      offending=list(cyc))
        if side < 0:
            cyc = tuple(reversed(cyc))
        h = 1 + dot(z, d)
        if kernel == G.DOUBLE:
            L = float(dot(d, d)) ** 0.5
            d = (d[0] / L, d[1] / L, d[2] / L)
            h = (1.0 + dot(z, sub(P.vertices[v], z))) / L
        data.append((_canonical_cycle(cyc), d, h))
    data.sort(key=lambda t: tuple(sorted(t[0])))
    lattice = G._build_lattice(lat.F, data)
    return G.ConvexPolytope(vertices, lattice, kernel)


def _fast_santalo_volume_fn(Q):
    """Closure z -> |Q^z| over float data with the combinatorics fixed once.

    Valid on the interior chamber (where the dual lattice is constant);
    returns +inf outside the margin.
    """
    lat = Q.lattice
    normals = np.array([[float(c) for c in n] for n, _ in lat.facet_planes])
    offsets = np.array([float(h) for _, h in lat.facet_planes])
    verts = np.array([[float(c) for c in v] for v in Q.vertices])
    z0 = verts.mean(axis=0)
    m0 = offsets - normals @ z0
    if m0.min() <= 0:
        raise NumericalDegeneracy("vertex centroid not strictly interior")
    pts0 = z0[None, :] + normals / m0[:, None]
    flat = []
    starts = [0]
    for v, ring in enumerate(lat.vertex_facet_cycles()):
        cyc = list(ring)
        nw = np.zeros(3)
        k = len(cyc)
        for a in range(k):
            p, q = pts0[cyc[a]], pts0[cyc[(a + 1) % k]]
            nw += np.cross(p, q)
        if float(nw @ (verts[v] - z0)) < 0:
            cyc.reverse()
        flat.extend(cyc)
        starts.append(len(flat))
    flat = np.array(flat)
    starts = np.array(starts)
    margin_floor = 1e-12 * max(1.0, float(np.abs(offsets).max()))

    def f(z):
        m = offsets - normals @ z
        if m.min() <= margin_floor:
            return np.inf
        pts = z[None, :] + normals / m[:, None]
        total = 0.0
        for a in range(len(starts) - 1):
            cyc = flat[starts[a]:starts[a + 1]]
            v0 = pts[cyc[0]]
            for b in range(1, len(cyc) - 1):
                v1 = pts[cyc[b]] - v0
                v2 = pts[cyc[b + 1]] - v0
                total += (v0[0] * (v1[1] * v2[2] - v1[2] * v2[1])
                          + v0[1] * (v1[2] * v2[0] - v1[0] * v2[2])
                          + v0[2] * (v1[0] * v2[1] - v1[1] * v2[0]))
        return abs(total) / 6.0

    return f


def _coordinate_search(f, z, step, budget=200):
    fz = f(z)
    for _ in range(budget):
        improved = False
        for axis in range(3):
            for sgn in (1.0, -1.0):
                trial = z.copy()
                trial[axis] += sgn * step
                ft = f(trial)
                if ft < fz:
                    z, fz = trial, ft
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-14:
                break
    return z, fz


def santalo_point(Q, gtol=1e-8, max_iters=200):
    """Interior minimizer of z -> |Q^z|.

    Symmetric input short-circuits to the origin (the functional's gradient
    vanishes there by central symmetry).  Otherwise a damped quasi-Newton
    iteration with central-difference gradients (step 1e-6 x diameter) runs
    from the vertex centroid, with a coordinate-search fallback; raises
    NonConvergence carrying the best iterate if the gradient norm never
    reaches gtol.
    """
    if isinstance(Q, G.SymPolytope):
        zero = Fraction(0) if Q.kernel == G.RATIONAL else 0.0
        return (zero, zero, zero)

    f = _fast_santalo_volume_fn(Q)
    arr = np.array([[float(c) for c in v] for v in Q.vertices])
    z = arr.mean(axis=0)
    diam = float(np.ptp(arr, axis=0).max())
    h = 1e-6 * diam

    def grad(z):
        g = np.zeros(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            g[i] = (f(z + e) - f(z - e)) / (2 * h)
        return g

    fz = f(z)
    if not np.isfinite(fz):
        raise NonConvergence("centroid start infeasible", best=tuple(z),
                             grad_norm=float("inf"))
    H = np.eye(3)
    g = grad(z)
    scaled = False
    for _ in range(max_iters):
        gn = float(np.linalg.norm(g))
        if gn <= gtol:
            return tuple(float(c) for c in z)
        if not scaled:
            H *= 0.05 * diam / max(gn, 1e-30)
            scaled = True
        p = -H @ g
        t = 1.0
        slope = float(g @ p)
        while t > 1e-14:
            zt = z + t * p
            ft = f(zt)
            if np.isfinite(ft) and ft <= fz + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        gt = grad(zt)
        s = zt - z
        y = gt - g
        sy = float(s @ y)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            rho = 1.0 / sy
            I = np.eye(3)
            H = (I - rho * np.outer(s, y)) @ H @ (I - rho * np.outer(y, s)) \
                + rho * np.outer(s, s)
        z, fz, g = zt, ft, gt

    z, fz = _coordinate_search(f, z, 0.01 * diam)
    g = grad(z)
    gn = float(np.linalg.norm(g))
    if gn <= gtol:
        return tuple(float(c) for c in z)
    raise NonConvergence("Santalo-point iteration exhausted", best=tuple(z),
                         grad_norm=gn)


def volume_product(P):
    """|P| x |P deg| with its gap against the sharp cube value 32/3.

    Exact rational arithmetic end to end under the rational kernel; the
    reported santalo_point is the exact origin, as forced by symmetry.
    """
    vol = G.volume(P)
    pol = G.volume(polar(P))
    prod = vol * pol
    if P.kernel == G.RATIONAL:
        zero = Fraction(0)
        gap = prod - MAHLER_BOUND
    else:
        zero = 0.0
        gap = prod - float(MAHLER_BOUND)
    return VolumeProductReport(volume_primal=vol, volume_polar=pol,
                               product=prod, santalo_point=(zero, zero, zero),
                               mahler_gap=gap, kernel=P.kernel)


def _hausdorff_vertex_distance(A, B):
    a = np.array([[float(c) for c in v] for v in A])
    b = np.array([[float(c) for c in v] for v in B])
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))


def verify_incidence_duality(P):
    """Cross-check the order-reversal construction of polar(P).

    Checks, raising DualityViolation on any failure:
      1. count swap: V(P deg) = F(P) and F(P deg) = V(P);
      2. incidence transpose: v in facet k of P iff the dual vertex of k lies
         on the dual facet of v;
      3. independent reconstruction: re-hulling the polar's vertex set
         reproduces its labeled face lattice exactly;
      4. bipolarity: vertex set of (P deg) deg matches that of P (exactly in
         rational mode, within 1e-9 x scale Hausdorff in double mode).
    """
    Q = polar(P)
    latP, latQ = P.lattice, Q.lattice
    if Q.V != latP.F or latQ.F != P.V:
        raise DualityViolation(
            f"count swap failed: V(polar)={Q.V} vs F={latP.F}, "
            f"F(polar)={latQ.F} vs V={P.V}")

    pairs_P = {(v, k) for k in latP.I2 for v in latP.facet_cycles[k]}
    fac_of = Q._primal_facet_of_vertex
    ver_of = Q._primal_vertex_of_facet
    pairs_Q = {(ver_of[j], fac_of[q])
               for j in latQ.I2 for q in latQ.facet_cycles[j]}
    if pairs_P != pairs_Q:
        raise DualityViolation(
            f"incidence transpose failed: {len(pairs_P ^ pairs_Q)} mismatches")

    R = G.from_representatives([Q.vertices[i] for i in Q.rep_indices()], Q.kernel)
    if not G.same_labeled_lattice(latQ, R.lattice):
        raise DualityViolation("polar lattice fails independent re-hull")

    B = polar(Q)
    if P.kernel == G.RATIONAL:
        ok = set(B.vertices) == set(P.vertices)
        haus = 0.0 if ok else None
    else:
        scale = max(1.0, P.circumradius())
        haus = _hausdorff_vertex_distance(B.vertices, P.vertices)
        ok = haus <= 1e-9 * scale
    if not ok:
        raise DualityViolation(
            f"bipolar vertex set mismatch (Hausdorff {haus})")

    return {"V": P.V, "F": latP.F, "polar_V": Q.V, "polar_F": latQ.F,
            "transpose_ok": True, "reconstruction_ok": True, "bipolar_ok": True}
