"""Volume-product descent over origin-symmetric polytopes with a bounded
vertex budget, using certified non-trivial admissible speeds as moves.

Each iteration assembles candidate directions, extracts a non-trivial speed
from the admissible space of the current body or of its polar, certifies a
persistence interval, and line-searches the product along the deformation.
Polar-side moves re-polarize afterwards, which keeps the vertex count within
budget because the deformation preserves the polar's facet count.  Descent
stops at a terminal classification (Parallelepiped or AffineOctahedron), or
when no candidate improves the product beyond the termination tolerance.

The optimizer is heuristic: failing to find an improving move is evidence,
not proof, of local minimality, and the trace metadata says so.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import combinatorics as CB, geometry as G, polarity as PO, shadow as SH
from .errors import (CounterexampleAlarm, DegenerateDeformation,
                     GenerationFailure, InputError, InternalInconsistency,
                     NoPersistence, NumericalDegeneracy, ParallelismAmbiguity)
from .hull import sub

_DIRECTION_MODES = ("mixed", "random", "facet")


@dataclass(frozen=True)
class DescentConfig:
    max_vertices: int = 12
    direction_budget: int = 8
    line_search_samples: int = 24
    termination_tol: float = 1e-9
    seed: int = 0
    max_iters: int = 40
    direction_mode: str = "mixed"

    def __post_init__(self):
        if self.max_vertices < 6 or self.max_vertices % 2:
            raise InputError("max_vertices must be an even integer >= 6")
        if self.direction_mode not in _DIRECTION_MODES:
            raise InputError(f"direction_mode must be one of {_DIRECTION_MODES}")
        if self.line_search_samples < 4:
            raise InputError("line_search_samples must be at least 4")


@dataclass(frozen=True)
class DescentStep:
    snapshot: dict
    side: str
    theta: SH.Direction
    alpha: SH.SpeedVector
    t: float
    product_before: float
    product_after: float


@dataclass(frozen=True)
class DescentTrace:
    steps: tuple
    final: object
    final_classification: CB.MinimizerClassification
    final_gap: float
    stall_with_nontrivial_speed: bool
    meta: dict


def random_symmetric_polytope(n_pairs, seed, kernel=G.DOUBLE, retries=50):
    """A random SymPolytope with exactly ``n_pairs`` antipodal vertex pairs,
    sampled as unit-sphere points (deterministic per seed).

    Sphere points are in strictly convex position, so a draw only fails on
    near-degenerate configurations; such draws are retried from the same
    stream until the budget runs out.
    """
    if n_pairs < 3:
        raise InputError("need at least 3 vertex pairs")
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        pts = rng.normal(size=(n_pairs, 3))
        norms = np.linalg.norm(pts, axis=1)
        if norms.min() < 1e-12:
            continue
        pts = pts / norms[:, None]
        try:
            P = G.build_sym_polytope([tuple(map(float, p)) for p in pts],
                                     kernel=kernel)
        except (InputError, NumericalDegeneracy):
            continue
        if P.V == 2 * n_pairs:
            return P
    raise GenerationFailure(
        f"no valid {n_pairs}-pair polytope within {retries} draws (seed {seed})")


def _direction_key(d):
    t = d.theta
    lead = next((x for x in t if abs(x) > 1e-12), 1.0)
    s = 1.0 if lead > 0 else -1.0
    return tuple(round(s * x, 9) for x in t)


def _candidate_directions(P, Q, cfg, rng):
    """Random directions plus structure-derived ones: in-plane directions of
    non-triangular facets and shared-edge directions of adjacent
    quadrilateral pairs, on both the body and its polar."""
    dirs = []
    if cfg.direction_mode in ("mixed", "random"):
        for _ in range(cfg.direction_budget):
            v = rng.normal(size=3)
            L = float(np.linalg.norm(v))
            if L < 1e-9:
                v = np.array([1.0, 0.0, 0.0])
                L = 1.0
            dirs.append(SH.direction(tuple(float(x) for x in v)))
    if cfg.direction_mode in ("mixed", "facet"):
        for B in (P, Q):
            lat = B.lattice
            seen = set()
            for k in lat.I2:
                mate = lat.opposite_facet[k]
                key = (min(k, mate), max(k, mate))
                if key in seen or lat.m(k) <= 3:
                    continue
                seen.add(key)
                try:
                    dirs.append(CB.in_plane_direction(B, k))
                except (InternalInconsistency, ParallelismAmbiguity):
                    pass
            for e, (i, j) in enumerate(lat.edges):
                f1, f2 = lat.phi2[e]
                if lat.m(f1) == 4 and lat.m(f2) == 4 \
                        and lat.opposite_facet[f1] != f2:
                    try:
                        dirs.append(SH.direction(sub(B.vertices[j], B.vertices[i])))
                    except InputError:
                        pass
    uniq = []
    used = set()
    for d in dirs:
        k = _direction_key(d)
        if k not in used:
            used.add(k)
            uniq.append(d)
    return uniq


def _nontrivial_speed(space):
    """Largest-norm projection of the admissible basis onto the orthogonal
    complement of the trivial span, in reduced pair coordinates.

    Exact Gram-Schmidt arithmetic on the rational kernel so the extracted
    speed is itself exactly admissible; float QR otherwise.  Returns None
    when the space is entirely trivial.
    """
    B = space.base
    k = B.n_pairs
    if B.kernel == G.RATIONAL:
        ortho = []
        for tv in space.trivial_basis:
            v = list(tv.alpha[:k])
            for u in ortho:
                uv = sum(x * y for x, y in zip(u, v))
                uu = sum(x * x for x in u)
                v = [x - uv / uu * y for x, y in zip(v, u)]
            if any(x != 0 for x in v):
                ortho.append(v)
        best, best_n2 = None, Fraction(0)
        for sv in space.basis:
            v = list(sv.alpha[:k])
            for u in ortho:
                uv = sum(x * y for x, y in zip(u, v))
                uu = sum(x * x for x in u)
                v = [x - uv / uu * y for x, y in zip(v, u)]
            n2 = sum(x * x for x in v)
            if n2 > best_n2:
                best, best_n2 = v, n2
        if best is None:
            return None
        mx = max(abs(x) for x in best)
        beta = [x / mx for x in best]
        return SH.SpeedVector(tuple(beta) + tuple(-x for x in beta))
    T = np.stack([tv.as_array()[:k] for tv in space.trivial_basis], axis=1)
    Qo, _ = np.linalg.qr(T)
    best, best_n = None, 1e-8
    for sv in space.basis:
        b = sv.as_array()[:k]
        r = b - Qo @ (Qo.T @ b)
        n = float(np.linalg.norm(r))
        if n > best_n:
            best, best_n = r, n
    if best is None:
        return None
    beta = best / np.abs(best).max()
    return SH.SpeedVector(tuple(float(x) for x in beta)
                          + tuple(float(-x) for x in beta))


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _float_speed(alpha):
    return SH.SpeedVector(tuple(float(x) for x in alpha.alpha))


def _snap_iterate(P):
    """Round an exact iterate to the dyadic 2^-40 grid when that preserves
    the labeled face lattice; plain descent arithmetic otherwise compounds
    coordinate bit length move over move until hulls become intractable."""
    if P.kernel != G.RATIONAL:
        return P
    den = 1 << 40
    reps = [tuple(Fraction(round(float(x) * den), den) for x in P.vertices[i])
            for i in P.rep_indices()]
    try:
        snapped = G.from_representatives(reps, G.RATIONAL)
    except (InputError, NumericalDegeneracy):
        return P
    if snapped.V == P.V and G.same_labeled_lattice(snapped.lattice, P.lattice):
        return snapped
    return P


def _line_search(B, theta, alpha, c, samples, tol):
    """Minimize the volume product along the deformation over [-c, c].

    A uniform grid (always containing t = 0) seeds a golden-section
    refinement around the best grid point; ties break toward t = 0, since a
    flat product along a system through a minimizer is expected and
    wandering along the valley is pointless.  Returns (t, product at t,
    product spread over the grid).
    """
    cache = {}

    def g(t):
        if t not in cache:
            try:
                Q = SH.deform(B, theta, alpha, t)
                cache[t] = float(PO.volume_product(Q).product)
            except (DegenerateDeformation, NumericalDegeneracy):
                cache[t] = math.inf
        return cache[t]

    ts = list(np.linspace(-c, c, samples))
    if 0.0 not in ts:
        ts.append(0.0)
    vals = [(g(t), abs(t), t) for t in ts]
    finite = [v[0] for v in vals if math.isfinite(v[0])]
    spread = (max(finite) - min(finite)) if finite else 0.0
    vals.sort()
    t_best = vals[0][2]
    h = 2 * c / (samples - 1)
    lo = max(-c, t_best - h)
    hi = min(c, t_best + h)

    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = g(x1), g(x2)
    for _ in range(30):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = g(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = g(x2)
        if b - a < 1e-12 * max(1.0, c):
            break
    t_ref = x1 if f1 <= f2 else x2
    candidates = [(g(t), abs(t), t) for t in (t_best, t_ref, 0.0)]
    candidates.sort()
    best_f, _, best_t = candidates[0]
    if best_f >= g(0.0) - tol:
        best_t, best_f = 0.0, g(0.0)
    return best_t, best_f, spread


def descend(P0, cfg=None):
    """Greedy certified descent of the volume product from ``P0``.

    Every accepted move strictly decreases the product by more than the
    termination tolerance and stays inside a certified persistence interval,
    so the vertex count never drifts.  The trace records each move, the final
    classification, and the gap to 32/3; it also flags the suspicious stall
    where a non-trivial speed with a non-constant product exists but no
    sampled t improves.
    """
    cfg = cfg or DescentConfig()
    N = cfg.max_vertices
    if P0.V > N:
        raise InputError(f"start has V = {P0.V} > max_vertices = {N}")
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.termination_tol
    bound = float(Fraction(32, 3))
    P = P0
    steps = []
    stall = False
    terminated_by = "iteration-budget"
    final_cls = None
    for _ in range(cfg.max_iters):
        cls = CB.classify_minimizer_candidate(P)
        if cls.verdict in (CB.PARALLELEPIPED, CB.AFFINE_OCTAHEDRON):
            final_cls = cls
            terminated_by = "classification"
            break
        Q = PO.polar(P)
        before = float(PO.volume_product(P).product)
        dirs = _candidate_directions(P, Q, cfg, rng)
        candidates = []
        for th in dirs:
            for side, B in (("primal", P), ("polar", Q)):
                try:
                    space = SH.admissible_space(B, th)
                except ParallelismAmbiguity:
                    continue
                alpha = _nontrivial_speed(space)
                if alpha is not None:
                    candidates.append((side, B, th, alpha))
        saw_nontrivial = bool(candidates)
        saw_variation = False
        exact = P.kernel == G.RATIONAL
        # Search on a float proxy (the body itself on the double kernel);
        # exact bodies only pay exact-arithmetic cost for the accepted move.
        proxies = {"primal": G.to_double(P) if exact else P,
                   "polar": G.to_double(Q) if exact else Q}
        scored = []
        for idx, (side, B, th, alpha) in enumerate(candidates):
            Bp = proxies[side]
            ap = _float_speed(alpha) if exact else alpha
            try:
                c = SH.persistence_interval(Bp, th, ap)
            except (NoPersistence, NumericalDegeneracy):
                continue
            t, prod, spread = _line_search(Bp, th, ap, c,
                                           cfg.line_search_samples, tol)
            if spread > max(tol, 1e-9 * before):
                saw_variation = True
            if prod < before - tol:
                scored.append(((prod, abs(t), idx), side, B, th, alpha, t))
        scored.sort(key=lambda s: s[0])
        accepted = None
        for _, side, B, th, alpha, t in scored:
            if exact:
                try:
                    c_exact = SH.persistence_interval(B, th, alpha)
                except NoPersistence:
                    continue
                t = max(-c_exact, min(c_exact, t))
            try:
                moved = SH.deform(B, th, alpha, t)
            except (DegenerateDeformation, NumericalDegeneracy):
                continue
            newP = moved if side == "primal" else PO.polar(moved)
            after = float(PO.volume_product(newP).product)
            if after < before - tol and newP.V <= N:
                accepted = (side, th, alpha, t, newP, after)
                break
        if accepted is None:
            final_cls = cls
            stall = saw_nontrivial and saw_variation
            terminated_by = "no-improving-move"
            break
        side, th, alpha, t, newP, after = accepted
        steps.append(DescentStep(snapshot=P.to_json_dict(), side=side,
                                 theta=th, alpha=alpha, t=float(t),
                                 product_before=before, product_after=after))
        P = _snap_iterate(newP)
    if final_cls is None:
        final_cls = CB.classify_minimizer_candidate(P)
    gap = float(PO.volume_product(P).product) - bound
    if gap < -1e-6:
        raise CounterexampleAlarm(
            f"final product {bound + gap} below 32/3 - 1e-6",
            dump=P.to_json_dict())
    meta = {
        "iterations": len(steps),
        "terminated_by": terminated_by,
        "stall_with_nontrivial_speed": stall,
        "note": ("descent is heuristic: absence of an improving move is "
                 "evidence, not proof, of local minimality"),
        "config": {"max_vertices": cfg.max_vertices,
                   "direction_budget": cfg.direction_budget,
                   "line_search_samples": cfg.line_search_samples,
                   "termination_tol": cfg.termination_tol,
                   "seed": cfg.seed, "max_iters": cfg.max_iters,
                   "direction_mode": cfg.direction_mode},
    }
    if stall:
        meta["stall_note"] = ("non-trivial speed with non-constant product "
                              "found but no sampled t improved; a strict "
                              "local minimum cannot look like this")
    return DescentTrace(steps=tuple(steps), final=P,
                        final_classification=final_cls, final_gap=gap,
                        stall_with_nontrivial_speed=stall, meta=meta)


def corpus_verify(count, n_pairs_max=6, seed=2024, dirs_per_body=4,
                  bodies=None):
    """Generate ``count`` random symmetric polytopes (or verify the given
    bodies), assert the Mahler bound and the dimension bound on each, and
    summarize.

    Raises CounterexampleAlarm with a full polytope dump if any product
    falls below 32/3 - 1e-9, if a 6-vertex body fails to carry the
    octahedral lattice, and propagates BoundViolation from the dimension
    sweep.
    """
    if bodies is None and count < 1:
        raise InputError("count must be >= 1")
    if n_pairs_max < 3:
        raise InputError("n_pairs_max must be >= 3")
    rng = np.random.default_rng(seed)
    products = []
    checked_dirs = 0
    v6 = 0
    span = max(1, n_pairs_max - 2)
    if bodies is None:
        bodies = (random_symmetric_polytope(3 + (i % span),
                                            int(rng.integers(0, 2 ** 62)))
                  for i in range(count))
    for P in bodies:
        prod = float(PO.volume_product(P).product)
        if prod < float(Fraction(32, 3)) - 1e-9:
            raise CounterexampleAlarm(
                f"volume product {prod!r} below 32/3 - 1e-9",
                dump=P.to_json_dict())
        products.append(prod)
        for _ in range(dirs_per_body):
            v = rng.normal(size=3)
            L = float(np.linalg.norm(v))
            if L < 1e-9:
                continue
            try:
                CB.dimension_bound(P, SH.direction(tuple(float(x) for x in v)))
            except ParallelismAmbiguity:
                continue
            checked_dirs += 1
        if P.V == 6:
            v6 += 1
            lat = P.lattice
            if lat.F != 8 or lat.facet_size_census() != {3: 8}:
                raise CounterexampleAlarm(
                    "6-vertex symmetric body without the octahedral lattice",
                    dump=P.to_json_dict())
    arr = np.array(products)
    return {
        "count": len(products),
        "min_product": float(arr.min()),
        "median_product": float(np.median(arr)),
        "max_product": float(arr.max()),
        "mahler_bound": float(Fraction(32, 3)),
        "min_gap": float(arr.min()) - float(Fraction(32, 3)),
        "directions_checked": checked_dirs,
        "v6_bodies_checked": v6,
        "alarm": False,
    }
