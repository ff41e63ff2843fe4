"""Convergence regions: lemniscates, lemniscate annuli and split regions.

The controlling quantity is the focus product |prod_k (z - z_k)**m_k|. A
plain expansion converges where the product stays below the smallest
product value attained on the singularity set. The Laurent variant adds a
lower bound from the inner neighborhood of the singular foci, and the
split variant replaces the lower bound by a ratio inequality between the
regular and singular focus blocks.

Region boundaries are extracted as polylines by marching squares on a
regular grid, with one bisection pass that pins every vertex onto the
level set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GeometryError
from .points import PointSet

__all__ = [
    "RegionSpec",
    "lemniscate_radius",
    "annulus_radii",
    "dqp_parameters",
    "default_omega0_delta",
    "contains",
    "boundary_sample",
    "write_boundary_csv",
    "lemniscate_region",
    "annulus_region",
    "taylor_laurent_region",
]


def _locations(singularities):
    out = []
    for s in singularities:
        out.append(complex(getattr(s, "location", s)))
    return out


@dataclass(frozen=True)
class RegionSpec:
    """Membership data for one convergence region."""

    kind: str  # 'lemniscate' | 'annulus' | 'taylor-laurent'
    points: PointSet
    r: Optional[float] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    split: Optional[int] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind == "lemniscate":
            if self.r is None or self.r < 0:
                raise ValueError("lemniscate region needs r >= 0")
        elif self.kind == "annulus":
            if self.r1 is None or self.r2 is None:
                raise ValueError("annulus region needs r1 and r2")
            if self.r2 >= self.r1:
                warnings.warn("empty annulus: r2 >= r1", stacklevel=2)
        elif self.kind == "taylor-laurent":
            if self.r1 is None or self.r2 is None or self.split is None:
                raise ValueError("split region needs r1, r2 and the split index")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @property
    def is_empty(self) -> bool:
        if self.kind == "annulus":
            return self.r2 >= self.r1
        if self.kind == "lemniscate":
            return self.r == 0
        return False

    def contains(self, z: complex) -> bool:
        return contains(self, z)


def lemniscate_radius(S: PointSet, singularities) -> float:
    """Smallest focus-product value over the singularity set; inf if empty."""
    locs = _locations(singularities)
    if not locs:
        return math.inf
    r = math.inf
    for w in locs:
        if min(abs(w - z) for z in S.foci) <= 1e-12 * (1.0 + abs(w)):
            warnings.warn("a singularity coincides with a focus; radius is zero", stacklevel=2)
            return 0.0
        r = min(r, float(S.abs_product(w)))
    return r


def default_omega0_delta(S: PointSet, singularities, singular_indices) -> float:
    """0.1 times the least distance from the singular foci to other features."""
    locs = _locations(singularities)
    sing_foci = [S.foci[k] for k in singular_indices]
    others = [z for k, z in enumerate(S.foci) if k not in set(singular_indices)]
    others += [w for w in locs if all(abs(w - z) > 1e-12 * (1.0 + abs(z)) for z in sing_foci)]
    gaps = [abs(z - w) for z in sing_foci for w in others]
    gaps += [abs(a - b) for i, a in enumerate(sing_foci) for b in sing_foci[i + 1:]]
    return 0.1 * min(gaps) if gaps else 0.1


def _singular_focus_indices(S: PointSet, locs, delta: float):
    return [
        k for k, z in enumerate(S.foci)
        if any(abs(w - z) <= delta * (1.0 + 1e-12) for w in locs)
    ]


def _golden_extremum(fun, lo: float, hi: float, minimize: bool, iters: int = 60) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    sign = 1.0 if minimize else -1.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = sign * fun(c), sign * fun(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = sign * fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = sign * fun(d)
    return sign * min(fc, fd)


def _circle_extremum(fun, center: complex, radius: float, minimize: bool, samples: int = 4096) -> float:
    theta = 2.0 * math.pi * np.arange(samples) / samples
    w = center + radius * np.exp(1j * theta)
    vals = np.array([fun(x) for x in w])
    k = int(np.argmin(vals) if minimize else np.argmax(vals))
    step = 2.0 * math.pi / samples
    t0 = theta[k]
    g = lambda t: fun(center + radius * np.exp(1j * t))
    return _golden_extremum(g, t0 - step, t0 + step, minimize)


def annulus_radii(S: PointSet, singularities, delta: Optional[float] = None):
    """(r1, r2): outer bound from exterior singularities, inner bound from
    the boundaries of the delta disks around the singular foci."""
    locs = _locations(singularities)
    if delta is None:
        coincident = [
            k for k, z in enumerate(S.foci)
            if any(abs(w - z) <= 1e-9 * (1.0 + abs(z)) for w in locs)
        ]
        delta = default_omega0_delta(S, singularities, coincident) if coincident else 0.1
    idx = _singular_focus_indices(S, locs, delta)
    exterior = [
        w for w in locs
        if all(abs(w - S.foci[k]) > delta * (1.0 + 1e-12) for k in idx)
    ]
    r1 = lemniscate_radius(S, exterior) if exterior else math.inf
    if not idx:
        r2 = 0.0
    else:
        r2 = 0.0
        for k in idx:
            r2 = max(r2, _circle_extremum(lambda w: float(S.abs_product(w)), S.foci[k], delta, minimize=False))
    if r2 >= r1:
        warnings.warn("empty annulus: inner bound exceeds outer bound", stacklevel=2)
    return r1, r2


def dqp_parameters(S: PointSet, q: int, singularities, delta: Optional[float] = None):
    """(r1, r2) for the split region: r1 as usual, r2 the least ratio of the
    regular block product to the singular block product on the inner boundary."""
    if not 1 <= q < S.p:
        raise GeometryError("split must satisfy 1 <= q < p")
    locs = _locations(singularities)
    singular_idx = list(range(q, S.p))
    if delta is None:
        delta = default_omega0_delta(S, singularities, singular_idx)
    for k in range(q):
        if any(abs(w - S.foci[k]) <= delta * (1.0 + 1e-12) for w in locs):
            raise GeometryError("a regular focus carries or touches a singularity")
    Sq = S.restricted(range(q))
    Ss = S.restricted(singular_idx)
    exterior = [
        w for w in locs
        if all(abs(w - S.foci[k]) > delta * (1.0 + 1e-12) for k in singular_idx)
    ]
    r1 = lemniscate_radius(S, exterior) if exterior else math.inf

    def ratio(w):
        return float(Sq.abs_product(w) / Ss.abs_product(w))

    r2 = math.inf
    for k in singular_idx:
        r2 = min(r2, _circle_extremum(ratio, S.foci[k], delta, minimize=True))
    return r1, r2


def lemniscate_region(S: PointSet, singularities) -> RegionSpec:
    return RegionSpec("lemniscate", S, r=lemniscate_radius(S, singularities))


def annulus_region(S: PointSet, singularities, delta: Optional[float] = None) -> RegionSpec:
    if delta is None:
        locs = _locations(singularities)
        coincident = [
            k for k, z in enumerate(S.foci)
            if any(abs(w - z) <= 1e-9 * (1.0 + abs(z)) for w in locs)
        ]
        delta = default_omega0_delta(S, singularities, coincident) if coincident else 0.1
    r1, r2 = annulus_radii(S, singularities, delta)
    return RegionSpec("annulus", S, r1=r1, r2=r2, delta=delta)


def taylor_laurent_region(S: PointSet, q: int, singularities, delta: Optional[float] = None) -> RegionSpec:
    if delta is None:
        delta = default_omega0_delta(S, singularities, range(q, S.p))
    r1, r2 = dqp_parameters(S, q, singularities, delta)
    return RegionSpec("taylor-laurent", S, r1=r1, r2=r2, split=q, delta=delta)


def contains(R: RegionSpec, z: complex) -> bool:
    """Strict membership per the defining inequalities."""
    z = complex(z)
    prod = float(R.points.abs_product(z))
    if R.kind == "lemniscate":
        return prod < R.r
    if R.kind == "annulus":
        return R.r2 < prod < R.r1
    Sq = R.points.restricted(range(R.split))
    Ss = R.points.restricted(range(R.split, R.points.p))
    return prod < R.r1 and float(Sq.abs_product(z)) < R.r2 * float(Ss.abs_product(z))


# --------------------------------------------------------------------------
# Boundary extraction


def _level_functions(R: RegionSpec):
    S = R.points
    if R.kind == "lemniscate":
        if not math.isfinite(R.r):
            raise GeometryError("cannot sample the boundary of an unbounded region")
        return [(lambda x, y: S.abs_product(x + 1j * y) - R.r, R.r)]
    if R.kind == "annulus":
        out = []
        if math.isfinite(R.r1):
            out.append((lambda x, y: S.abs_product(x + 1j * y) - R.r1, R.r1))
        if R.r2 > 0:
            out.append((lambda x, y: S.abs_product(x + 1j * y) - R.r2, R.r2))
        if not out:
            raise GeometryError("no finite level to sample")
        return out
    Sq = S.restricted(range(R.split))
    Ss = S.restricted(range(R.split, S.p))
    out = []
    if math.isfinite(R.r1):
        out.append((lambda x, y: S.abs_product(x + 1j * y) - R.r1, R.r1))
    if math.isfinite(R.r2):
        out.append(
            (
                lambda x, y: Sq.abs_product(x + 1j * y) - R.r2 * Ss.abs_product(x + 1j * y),
                None,
            )
        )
    if not out:
        raise GeometryError("no finite level to sample")
    return out


def _default_box(R: RegionSpec):
    S = R.points
    finite = [v for v in (R.r, R.r1, R.r2) if v is not None and math.isfinite(v) and v > 0]
    if not finite:
        raise GeometryError("cannot bound the sampling box for infinite radii")
    pad = 2.0 * max(v ** (1.0 / S.m) for v in finite)
    if R.delta:
        pad = max(pad, 3.0 * R.delta)
    xs = [z.real for z in S.foci]
    ys = [z.imag for z in S.foci]
    return min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad


_EDGE_TABLE = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def _marching_squares(grid, xs, ys):
    """Zero-level segments of a scalar grid; returns chained polylines.

    Cells whose corners straddle zero contribute one segment (two in the
    saddle cases, split by the sign of the cell center). Segment endpoints
    live on grid edges, so chaining by shared edge identity reconstructs
    the connected components.
    """
    ny, nx = grid.shape
    sign = grid > 0

    def interp(ax, ay, av, bx, by, bv):
        t = av / (av - bv)
        return (ax + t * (bx - ax), ay + t * (by - ay))

    segments = []
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            corners = (
                (xs[ix], ys[iy], grid[iy, ix]),
                (xs[ix + 1], ys[iy], grid[iy, ix + 1]),
                (xs[ix + 1], ys[iy + 1], grid[iy + 1, ix + 1]),
                (xs[ix], ys[iy + 1], grid[iy + 1, ix]),
            )
            code = (
                (1 if sign[iy, ix] else 0)
                | (2 if sign[iy, ix + 1] else 0)
                | (4 if sign[iy + 1, ix + 1] else 0)
                | (8 if sign[iy + 1, ix] else 0)
            )
            if code in (0, 15):
                continue
            edge_ids = (
                ("h", ix, iy), ("v", ix + 1, iy), ("h", ix, iy + 1), ("v", ix, iy),
            )
            edge_corners = ((0, 1), (1, 2), (3, 2), (0, 3))

            def point_on(edge):
                a, b = edge_corners[edge]
                ax, ay, av = corners[a]
                bx, by, bv = corners[b]
                return interp(ax, ay, av, bx, by, bv)

            if code in (5, 10):
                center = sum(c[2] for c in corners) / 4.0
                if code == 5:
                    pairs = [(0, 1), (2, 3)] if center > 0 else [(3, 0), (1, 2)]
                else:
                    pairs = [(3, 0), (1, 2)] if center > 0 else [(0, 1), (2, 3)]
            else:
                pairs = _EDGE_TABLE[code]
            for ea, eb in pairs:
                segments.append(
                    (edge_ids[ea], point_on(ea), edge_ids[eb], point_on(eb))
                )

    adjacency: dict = {}
    coords: dict = {}
    for ida, pa, idb, pb in segments:
        coords[ida] = pa
        coords[idb] = pb
        adjacency.setdefault(ida, []).append(idb)
        adjacency.setdefault(idb, []).append(ida)

    visited = set()
    polylines = []
    for start in sorted(adjacency):
        if start in visited:
            continue
        # walk backwards to an endpoint if the chain is open
        tail = start
        prev = None
        for _ in range(len(adjacency) + 1):
            nbrs = [e for e in adjacency[tail] if e != prev]
            if len(adjacency[tail]) == 1 or not nbrs:
                break
            nxt = nbrs[0]
            if nxt == start:
                break  # closed loop
            prev, tail = tail, nxt
        chain = [tail]
        visited.add(tail)
        prev = None
        cur = tail
        while True:
            nbrs = [e for e in adjacency[cur] if e != prev and e not in visited]
            if not nbrs:
                break
            prev, cur = cur, nbrs[0]
            visited.add(cur)
            chain.append(cur)
        polylines.append([coords[e] for e in chain])
    return polylines


def boundary_sample(R: RegionSpec, resolution: int = 512, box=None):
    """Boundary polylines, one list of (x, y) vertices per connected component.

    The grid runs at the given resolution over the focus hull inflated by
    twice the m-th root of the radius (or over an explicit box). After
    extraction every vertex is pinned to the level set by bisection along
    its grid edge; components come back sorted by their leftmost vertex.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    x0, x1, y0, y1 = box if box is not None else _default_box(R)
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    X, Y = np.meshgrid(xs, ys)
    out = []
    for fun, _level in _level_functions(R):
        grid = np.asarray(fun(X, Y), dtype=float)
        for line in _marching_squares(grid, xs, ys):
            refined = [_bisect_vertex(fun, xs, ys, v) for v in line]
            out.append(np.array(refined))
    out.sort(key=lambda a: (float(np.min(a[:, 0])), float(np.min(a[:, 1]))))
    return out


def _bisect_vertex(fun, xs, ys, vertex, iters: int = 40):
    """Pin one marching-squares vertex to the level set along its grid edge."""
    x, y = vertex
    ix = int(np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2))
    iy = int(np.clip(np.searchsorted(ys, y) - 1, 0, len(ys) - 2))
    if abs(x - xs[ix]) < 1e-12 * max(1.0, abs(x)) or abs(x - xs[ix + 1]) < 1e-12 * max(1.0, abs(x)):
        # vertical edge: vary y
        a, b = ys[iy], ys[iy + 1]
        fa, fb = float(fun(x, a)), float(fun(x, b))
        if fa * fb > 0:
            return (x, y)
        for _ in range(iters):
            mid = 0.5 * (a + b)
            fm = float(fun(x, mid))
            if fa * fm <= 0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        return (x, 0.5 * (a + b))
    a, b = xs[ix], xs[ix + 1]
    fa, fb = float(fun(a, y)), float(fun(b, y))
    if fa * fb > 0:
        return (x, y)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = float(fun(mid, y))
        if fa * fm <= 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return (0.5 * (a + b), y)


def write_boundary_csv(polylines, path):
    """Serialize polylines as rows (component_id, x, y)."""
    import csv

    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["component_id", "x", "y"])
        for cid, line in enumerate(polylines):
            for x, y in line:
                writer.writerow([cid, repr(float(x)), repr(float(y))])
