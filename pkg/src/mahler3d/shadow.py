"""Symmetric shadow systems: admissible speed spaces, deformation along a
direction, persistence of the face lattice, and the two trajectory checkers
(volume affineness, inverse polar-volume convexity).

A speed vector assigns one real per vertex, odd under the antipodal pairing.
The admissible space for a direction theta consists of the odd speeds that
restrict to an affine function on every facet not parallel to theta; facets
parallel to theta impose nothing.  Constraint rows are assembled in reduced
coordinates (one variable per vertex pair) and only one facet per opposite
pair contributes, since the antipodal facet repeats the same rows.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import geometry as G, polarity as PO
from .errors import (AffinenessViolation, ConvexityViolation,
                     DegenerateDeformation, DegenerateInput, InputError,
                     InternalInconsistency, NoPersistence,
                     NumericalDegeneracy, ParallelismAmbiguity)
from .hull import cross, dot, neg, sub

PARALLEL_TOL = 1e-14      # |theta.n| at or below this counts as parallel (double)
AMBIGUITY_TOL = 1e-10     # band (PARALLEL_TOL, AMBIGUITY_TOL] is refused
TRIPLE_AREA_REL = 1e-12   # facet triple selection: area >= this x diameter^2
DEFAULT_C_MAX = 1e6


@dataclass(frozen=True)
class Direction:
    """A unit direction, optionally carrying an exact rational vector along
    the same ray so parallelism tests can be decided without rounding."""
    theta: tuple
    carrier: tuple


def direction(vec):
    """Build a Direction from any numeric triple.

    The input components are taken as mathematically exact (floats are exact
    binary rationals), giving an exact carrier; ``theta`` is the float unit
    vector, and the carrier is rescaled to near-unit length so rational-mode
    and double-mode deformations share one parametrization scale.
    """
    if isinstance(vec, Direction):
        return vec
    c = tuple(G._as_coord(x, G.RATIONAL) for x in vec)
    if len(c) != 3 or all(x == 0 for x in c):
        raise InputError(f"invalid direction {vec!r}")
    L = float(dot(c, c)) ** 0.5
    theta = (float(c[0]) / L, float(c[1]) / L, float(c[2]) / L)
    nrm = sum(t * t for t in theta) ** 0.5
    if abs(nrm - 1.0) > 1e-12:
        raise InputError("direction could not be normalized")
    rL = Fraction(L)
    carrier = (c[0] / rL, c[1] / rL, c[2] / rL)
    return Direction(theta=theta, carrier=carrier)


@dataclass(frozen=True)
class SpeedVector:
    """Per-vertex speeds, odd under the pairing: alpha[pair(i)] = -alpha[i]."""
    alpha: tuple

    def as_array(self):
        return np.array([float(a) for a in self.alpha])

    def max_abs(self):
        return max(abs(float(a)) for a in self.alpha)


def speed_vector(P, values):
    """Coerce ``values`` to a SpeedVector for ``P``, enforcing oddness."""
    if isinstance(values, SpeedVector):
        vals = values.alpha
    else:
        vals = tuple(values)
    if len(vals) != P.V:
        raise InputError(f"speed length {len(vals)} != V = {P.V}")
    if P.kernel == G.RATIONAL:
        vals = tuple(G._as_coord(a, G.RATIONAL) for a in vals)
        for i in range(P.V):
            if vals[P.pairing[i]] != -vals[i]:
                raise InputError(f"speed not odd at vertex {i}")
    else:
        vals = tuple(float(a) for a in vals)
        scale = max(1.0, max(abs(a) for a in vals))
        for i in range(P.V):
            if abs(vals[P.pairing[i]] + vals[i]) > 1e-12 * scale:
                raise InputError(f"speed not odd at vertex {i}")
    return SpeedVector(alpha=vals)


def trivial_speed(P, w):
    """The globally affine speed alpha_i = w.x_i (odd by symmetry)."""
    w = G.as_point(w, P.kernel)
    return SpeedVector(alpha=tuple(dot(w, v) for v in P.vertices))


@dataclass(frozen=True)
class SpeedSpace:
    base: object
    theta: Direction
    basis: tuple          # SpeedVectors spanning the admissible space
    trivial_basis: tuple  # speeds from w = e1, e2, e3
    dim: int


def _unit_normal(n):
    L = float(dot(n, n)) ** 0.5
    return (float(n[0]) / L, float(n[1]) / L, float(n[2]) / L)


def is_parallel(theta, normal, kernel):
    """Whether theta lies in the facet plane direction lin(G - G), i.e.
    theta.n_G = 0.  Exact via the rational carrier when both sides are exact;
    thresholded in double mode with a refusal band.
    """
    if kernel == G.RATIONAL:
        return dot(theta.carrier, normal) == 0
    d = abs(dot(theta.theta, _unit_normal(normal)))
    if d <= PARALLEL_TOL:
        return True
    if d <= AMBIGUITY_TOL:
        raise ParallelismAmbiguity(
            f"|theta.n| = {d:.3e} inside the undecidable band "
            f"({PARALLEL_TOL:g}, {AMBIGUITY_TOL:g}]")
    return False


def _facet_triple_and_bary(P, cycle):
    """Deterministic affinely independent triple of facet corners plus the
    barycentric coordinates of every remaining corner with respect to it.

    Works in the 2D projection that drops the dominant normal axis; the
    triple is the first (in lexicographic cyclic-position order) whose area
    clears TRIPLE_AREA_REL x diameter^2.
    """
    a3 = [P.vertices[i] for i in cycle]
    m = len(cycle)
    if m == 3:
        triple = (0, 1, 2)
        rest = ()
    else:
        nrm = cross(sub(a3[1], a3[0]), sub(a3[2], a3[0]))
        if all(c == 0 for c in nrm):
            nrm = cross(sub(a3[1], a3[0]), sub(a3[3], a3[0]))
        keep = _best_axes(nrm)
        p2 = [(v[keep[0]], v[keep[1]]) for v in a3]
        if P.kernel == G.RATIONAL:
            thresh = 0
        else:
            diam2 = 0.0
            for i in range(m):
                for j in range(i + 1, m):
                    d = (p2[i][0] - p2[j][0], p2[i][1] - p2[j][1])
                    diam2 = max(diam2, d[0] * d[0] + d[1] * d[1])
            thresh = TRIPLE_AREA_REL * diam2
        triple = None
        for cand in itertools.combinations(range(m), 3):
            a, b, c = (p2[k] for k in cand)
            area2 = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            if area2 > thresh:
                triple = cand
                break
        if triple is None:
            raise NumericalDegeneracy("no affinely independent facet triple",
                                      offending=list(cycle))
        rest = tuple(k for k in range(m) if k not in triple)

    if not rest:
        return triple, {}

    nrm = cross(sub(a3[triple[1]], a3[triple[0]]), sub(a3[triple[2]], a3[triple[0]]))
    keep = _best_axes(nrm)
    p2 = [(v[keep[0]], v[keep[1]]) for v in a3]
    ax, ay = p2[triple[0]]
    bx, by = p2[triple[1]]
    cx, cy = p2[triple[2]]
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    bary = {}
    for k in rest:
        px, py = p2[k]
        l2 = ((px - ax) * (cy - ay) - (py - ay) * (cx - ax)) / det
        l3 = ((bx - ax) * (py - ay) - (by - ay) * (px - ax)) / det
        l1 = 1 - l2 - l3
        bary[k] = (l1, l2, l3)
    return triple, bary


def _best_axes(normal):
    an = [abs(float(normal[0])), abs(float(normal[1])), abs(float(normal[2]))]
    drop = an.index(max(an))
    keep = [0, 1, 2]
    keep.remove(drop)
    return keep


def _constraint_rows(P, theta):
    """Reduced constraint rows (length V/2) of the admissibility system."""
    lat = P.lattice
    k = P.n_pairs
    zero = Fraction(0) if P.kernel == G.RATIONAL else 0.0
    rows = []
    seen_pairs = set()
    for f in lat.I2:
        mate = lat.opposite_facet[f]
        key = (min(f, mate), max(f, mate))
        if key in seen_pairs:
            continue
        seen_pairs.add(key)
        g = key[0]
        n, _ = lat.facet_planes[g]
        if is_parallel(theta, n, P.kernel):
            continue
        cycle = lat.facet_cycles[g]
        triple, bary = _facet_triple_and_bary(P, cycle)
        for pos, lam in bary.items():
            row = [zero] * k
            contrib = [(cycle[pos], 1)] + [
                (cycle[triple[q]], -lam[q]) for q in range(3)]
            for v, coef in contrib:
                if v < k:
                    row[v] = row[v] + coef
                else:
                    row[v - k] = row[v - k] - coef
            rows.append(row)
    return rows


def _rational_nullspace(rows, n):
    M = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for c in range(n):
        p = None
        for i in range(r, len(M)):
            if M[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c]
        M[r] = [x / inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                fct = M[i][c]
                M[i] = [x - fct * y for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            v[pc] = -M[i][fc]
        basis.append(v)
    return basis


def _lift(P, beta):
    return SpeedVector(alpha=tuple(list(beta) + [-b for b in beta]))


def admissible_space(P, theta):
    """The linear space of theta-admissible symmetric speeds, as a basis of
    full-length SpeedVectors together with the trivial (globally affine)
    basis from w = e1, e2, e3.

    Facets parallel to theta contribute no rows; every other facet, one per
    antipodal pair, pins its corners beyond an affinely independent triple to
    the affine interpolation through that triple.  Rational kernel: exact
    nullspace by fraction-free elimination.  Double kernel: SVD nullspace.
    """
    theta = direction(theta)
    k = P.n_pairs
    rows = _constraint_rows(P, theta)
    if P.kernel == G.RATIONAL:
        beta_basis = _rational_nullspace(rows, k)
    else:
        if rows:
            # Facet planes of double-kernel bodies (polars in particular) are
            # planar only to ~1e-10 of scale, which leaks into the rows as
            # tiny spurious singular values; a machine-precision rank cutoff
            # would count them and shrink the nullspace below the trivial
            # speeds.  Rank therefore uses a loose relative cutoff, and the
            # trivial-containment check below guards the other direction.
            ns = scipy.linalg.null_space(np.array(rows, dtype=float),
                                         rcond=1e-8)
            beta_basis = [tuple(ns[:, j]) for j in range(ns.shape[1])]
        else:
            eye = np.eye(k)
            beta_basis = [tuple(eye[:, j]) for j in range(k)]
    basis = tuple(_lift(P, b) for b in beta_basis)
    trivial = tuple(trivial_speed(P, w)
                    for w in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    if P.kernel == G.RATIONAL:
        lim = None
    else:
        # Barycentric weights in the rows amplify facet non-planarity: a
        # skewed quad planar to ~1e-9 of scale can push a trivial speed's
        # residual to ~1e-7.  A genuine wiring bug produces O(1) residuals,
        # so the guard sits between the two regimes.
        row_mag = max((max(abs(c) for c in r) for r in rows), default=1.0)
        lim = 1e-6 * max(1.0, row_mag)
    for tv in trivial:
        res = admissibility_residual(P, theta, tv, rows=rows)
        bad = (res != 0) if lim is None else (res > lim * max(1.0, tv.max_abs()))
        if bad:
            raise InternalInconsistency(
                f"trivial speed violates admissibility rows (residual {res})")
    dim = len(basis)
    if dim < 3:
        raise InternalInconsistency(f"admissible dimension {dim} < 3")
    return SpeedSpace(base=P, theta=theta, basis=basis,
                      trivial_basis=trivial, dim=dim)


def admissibility_residual(P, theta, alpha, rows=None):
    """Max violation of the admissibility rows by ``alpha`` (0 means member)."""
    theta = direction(theta)
    alpha = speed_vector(P, alpha)
    if rows is None:
        rows = _constraint_rows(P, theta)
    k = P.n_pairs
    beta = alpha.alpha[:k]
    worst = Fraction(0) if P.kernel == G.RATIONAL else 0.0
    for row in rows:
        v = sum(c * b for c, b in zip(row, beta))
        worst = max(worst, abs(v))
    return worst


def is_trivial(S, alpha, tol=1e-9):
    """Whether ``alpha`` lies in the span of the globally affine speeds,
    up to least-squares residual <= tol x ||alpha||."""
    a = speed_vector(S.base, alpha).as_array()
    na = float(np.linalg.norm(a))
    if na == 0:
        return True
    T = np.stack([tv.as_array() for tv in S.trivial_basis], axis=1)
    coef = np.linalg.lstsq(T, a, rcond=None)[0]
    r = float(np.linalg.norm(T @ coef - a))
    return r <= tol * na


def nontrivial_component(S, alpha):
    """The component of ``alpha`` orthogonal to the trivial span (float)."""
    a = speed_vector(S.base, alpha).as_array()
    T = np.stack([tv.as_array() for tv in S.trivial_basis], axis=1)
    Q, _ = np.linalg.qr(T)
    return a - Q @ (Q.T @ a)


def deform(P, theta, alpha, t):
    """conv{x_i + t alpha_i u} for u along theta, rebuilt with labels kept.

    u is the exact near-unit carrier in rational mode and the float unit
    vector in double mode.  Oddness makes the result origin-symmetric; the
    vertex list shrinks if a moved point stops being extreme (callers detect
    that through lattice comparison).
    """
    theta = direction(theta)
    alpha = speed_vector(P, alpha)
    if P.kernel == G.RATIONAL:
        u = theta.carrier
        t = G._as_coord(t, G.RATIONAL)
    else:
        u = theta.theta
        t = float(t)
    reps = []
    for i in P.rep_indices():
        x = P.vertices[i]
        a = alpha.alpha[i]
        reps.append((x[0] + t * a * u[0], x[1] + t * a * u[1], x[2] + t * a * u[2]))
    try:
        return G.from_representatives(reps, P.kernel)
    except DegenerateInput as e:
        raise DegenerateDeformation(f"deformation at t = {float(t)} collapsed: {e}")


@dataclass(frozen=True)
class ShadowSystem:
    """A certified deformation family: base polytope, direction, admissible
    speed, and persistence half-width c (the face lattice holds on [-c, c])."""
    base: object
    theta: Direction
    alpha: SpeedVector
    c: float


def shadow_system(P, theta, alpha, c=None, c_max=DEFAULT_C_MAX):
    theta = direction(theta)
    alpha = speed_vector(P, alpha)
    if c is None:
        c = persistence_interval(P, theta, alpha, c_max=c_max)
    c = float(c)
    if c <= 0:
        raise InputError("persistence half-width must be positive")
    return ShadowSystem(base=P, theta=theta, alpha=alpha, c=c)


def _deformed_same_lattice(P, theta, alpha, t):
    try:
        Q = deform(P, theta, alpha, t)
    except (DegenerateDeformation, NumericalDegeneracy):
        return None
    if G.same_labeled_lattice(P.lattice, Q.lattice):
        return Q
    return None


def _certify(P, theta, alpha, c, dyadic_depth, samples):
    """Full certification of a candidate half-width.

    Checks labeled-lattice equality on the uniform and dyadic schedules, and
    additionally that the volume is affine across the uniform samples: facet
    families alone cannot detect a pass through a degenerate collapse (an
    invertible map with flipped orientation preserves them), but the volume
    kinks there.
    """
    exact = P.kernel == G.RATIONAL
    if samples > 2:
        if exact:
            cq = Fraction(c)
            ts = [-cq + 2 * cq * i / (samples - 1) for i in range(samples)]
        else:
            ts = list(np.linspace(-c, c, samples))
        vols = []
        for t in ts:
            Q = _deformed_same_lattice(P, theta, alpha, t)
            if Q is None:
                return False
            vols.append(G.volume(Q))
        second = [vols[i + 1] - 2 * vols[i] + vols[i - 1]
                  for i in range(1, samples - 1)]
        if exact:
            if any(s != 0 for s in second):
                return False
        else:
            vmax = max(abs(float(v)) for v in vols)
            if any(abs(float(s)) > 1e-6 * vmax for s in second):
                return False
    dyadic = [c * 0.5 ** j for j in range(dyadic_depth + 1)]
    schedule = [0.0] + [s * t for t in dyadic for s in (1.0, -1.0)]
    for t in schedule:
        if _deformed_same_lattice(P, theta, alpha, t) is None:
            return False
    return True


def persistence_interval(P, theta, alpha, c_max=DEFAULT_C_MAX,
                         dyadic_depth=20, samples=32):
    """A certified half-width c > 0 on which the deformation keeps the
    labeled face lattice of ``P``.

    Search: doubling then bisection from c0 = 0.1 x inradius / ||alpha||_inf,
    probing only the endpoints; the candidate is then shrunk by 0.9 and
    certified on the dyadic-plus-uniform schedule (t = 0, +-c/2^j, and
    ``samples`` uniform points), which also requires the volume to stay
    affine across the uniform samples, rejecting intervals that silently
    pass through a degenerate collapse.  The candidate halves until
    certification succeeds; NoPersistence is raised when even c = 1e-12
    fails, which signals a non-admissible speed.
    """
    theta = direction(theta)
    alpha = speed_vector(P, alpha)
    amax = alpha.max_abs()
    if amax == 0:
        return float(c_max)
    c0 = 0.1 * P.inradius() / amax

    def endpoint_ok(c):
        return _deformed_same_lattice(P, theta, alpha, c) is not None and \
            _deformed_same_lattice(P, theta, alpha, -c) is not None

    c = c0
    if not endpoint_ok(c):
        lo, hi = 0.0, c
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if endpoint_ok(mid):
                lo = mid
                if hi - lo <= 0.05 * hi:
                    break
            else:
                hi = mid
        c = lo
    else:
        while c < c_max and endpoint_ok(min(2 * c, c_max)):
            c = min(2 * c, c_max)
            if c == c_max:
                break

    c = 0.9 * min(c, c_max)
    while c >= 1e-12:
        if _certify(P, theta, alpha, c, dyadic_depth, samples):
            return c
        c *= 0.5
    raise NoPersistence(
        "no positive persistence width down to 1e-12; speed is likely "
        "not admissible for this direction")


def check_volume_affine(S, samples=9):
    """Sample |P_t| on [-c, c] and verify t -> volume is affine.

    Fits a quadratic; the quadratic term's contribution over the interval
    must stay below 1e-8 of the linear scale.  On the rational kernel the
    second differences of the exact volumes must vanish identically.
    """
    if samples < 3:
        raise InputError("need at least 3 samples")
    P, theta, alpha, c = S.base, S.theta, S.alpha, S.c
    exact = P.kernel == G.RATIONAL
    if exact:
        cq = Fraction(c)
        ts = [-cq + 2 * cq * i / (samples - 1) for i in range(samples)]
    else:
        ts = list(np.linspace(-c, c, samples))
    vols = [G.volume(deform(P, theta, alpha, t)) for t in ts]

    tf = np.array([float(t) for t in ts])
    vf = np.array([float(v) for v in vols])
    a2, a1, a0 = np.polyfit(tf, vf, 2)
    fit = np.polyval([a2, a1, a0], tf)
    max_res = float(np.abs(fit - vf).max())
    lin_scale = max(abs(a0), abs(a1) * c)
    quad_effect = abs(a2) * c * c

    if exact:
        second = [vols[i + 1] - 2 * vols[i] + vols[i - 1]
                  for i in range(1, samples - 1)]
        if any(s != 0 for s in second):
            worst = max(abs(s) for s in second)
            raise AffinenessViolation(
                f"exact second difference {worst} != 0 along shadow system")
    elif quad_effect > 1e-8 * lin_scale:
        raise AffinenessViolation(
            f"quadratic term {quad_effect:.3e} exceeds 1e-8 x linear scale "
            f"{lin_scale:.3e} (max residual {max_res:.3e})")
    return {"slope": float(a1), "intercept": float(a0),
            "quad_coeff": float(a2), "max_residual": max_res,
            "samples": samples, "c": float(c), "exact": exact}


def check_inverse_polar_convexity(S, samples=9):
    """Sample f(t) = 1/|P_t polar| on [-c, c] and verify convexity through
    second differences (exact nonnegativity on the rational kernel, else
    >= -1e-8 x max|f|)."""
    if samples < 5:
        raise InputError("need at least 5 samples")
    P, theta, alpha, c = S.base, S.theta, S.alpha, S.c
    exact = P.kernel == G.RATIONAL
    if exact:
        cq = Fraction(c)
        ts = [-cq + 2 * cq * i / (samples - 1) for i in range(samples)]
    else:
        ts = list(np.linspace(-c, c, samples))
    fs = []
    for t in ts:
        Q = deform(P, theta, alpha, t)
        fs.append(1 / G.volume(PO.polar(Q)))
    second = [fs[i + 1] - 2 * fs[i] + fs[i - 1] for i in range(1, samples - 1)]
    fmax = max(abs(float(f)) for f in fs)
    min_d2 = min(float(s) for s in second)
    if exact:
        if any(s < 0 for s in second):
            raise ConvexityViolation(
                f"exact negative second difference {min(second)} in 1/|P_t polar|")
    elif min_d2 < -1e-8 * fmax:
        raise ConvexityViolation(
            f"second difference {min_d2:.3e} below -1e-8 x max|f| = {-1e-8 * fmax:.3e}")
    return {"min_second_diff": min_d2, "max_f": fmax,
            "samples": samples, "c": float(c), "exact": exact}
