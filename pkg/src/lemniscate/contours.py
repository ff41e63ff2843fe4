"""Integration contours and trapezoidal Cauchy integrals.

Contours are counterclockwise circles or disjoint unions of circles. The
quadrature is the trapezoidal rule on the periodic parameterization
w = c + rho * exp(i theta), which converges spectrally for integrands
analytic near the trace. Node counts double from 16 until the result
settles to the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .points import PointSet

__all__ = [
    "CirclePiece",
    "Contour",
    "QuadratureSettings",
    "QuadratureResult",
    "default_contour",
    "cauchy_integral",
    "validate_contour",
]


@dataclass(frozen=True)
class CirclePiece:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("circle radius must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class Contour:
    """Counterclockwise loop: one circle, or a union of disjoint circles."""

    pieces: tuple[CirclePiece, ...]
    kind: str = "single-loop"  # 'single-loop' | 'per-focus-union'

    def __post_init__(self):
        pieces = tuple(
            p if isinstance(p, CirclePiece) else CirclePiece(*p) for p in self.pieces
        )
        object.__setattr__(self, "pieces", pieces)
        if len(pieces) == 0:
            raise ValueError("contour needs at least one piece")
        if self.kind == "single-loop" and len(pieces) != 1:
            raise ValueError("single-loop contour must have exactly one piece")
        if self.kind == "per-focus-union":
            for i, a in enumerate(pieces):
                for b in pieces[i + 1:]:
                    if abs(a.center - b.center) <= a.radius + b.radius:
                        raise GeometryError("per-focus circles must bound disjoint closed disks")

    @classmethod
    def circle(cls, center, radius) -> "Contour":
        return cls((CirclePiece(center, radius),), "single-loop")

    def contains(self, z: complex) -> bool:
        return any(abs(z - p.center) < p.radius for p in self.pieces)

    def on_trace(self, z: complex, rel: float = 1e-9) -> bool:
        return any(abs(abs(z - p.center) - p.radius) <= rel * p.radius for p in self.pieces)


@dataclass(frozen=True)
class QuadratureSettings:
    tol: float = 1e-12
    max_nodes: int = 1 << 16
    start_nodes: int = 16


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    nodes_used: int
    est_error: float
    converged: bool


def cauchy_integral(
    integrand,
    contour: Contour,
    tol: float = 1e-12,
    max_nodes: int = 1 << 16,
    _reverse: bool = False,
    _history: list | None = None,
) -> QuadratureResult:
    """(2 pi i)^-1 times the contour integral of a vectorized integrand.

    Each circular piece is integrated with the trapezoidal rule; node
    counts double from 16 until the change |delta| drops below
    tol * max(1, |value|) or max_nodes is reached. The returned est_error
    is the magnitude of the change in the last doubling step, summed over
    pieces; ``converged`` is lowered when any piece ran out of nodes.
    """
    total = 0j
    nodes_total = 0
    err_total = 0.0
    converged = True
    for piece in contour.pieces:
        n = 16
        theta = 2.0 * math.pi * np.arange(n) / n
        w = piece.center + piece.radius * np.exp(1j * theta)
        # (1/2pi) * integral g(w) * (w - c) dtheta  ==  mean of g(w_k) (w_k - c)
        mean = complex(np.mean(integrand(w) * (w - piece.center)))
        piece_err = math.inf
        while True:
            offset = 2.0 * math.pi * (np.arange(n) + 0.5) / n
            w = piece.center + piece.radius * np.exp(1j * offset)
            refined = 0.5 * (mean + complex(np.mean(integrand(w) * (w - piece.center))))
            n *= 2
            piece_err = abs(refined - mean)
            if _history is not None:
                _history.append(piece_err)
            mean = refined
            if piece_err <= tol * max(1.0, abs(mean)):
                break
            if n >= max_nodes:
                converged = False
                break
        total += mean
        nodes_total += n
        err_total += piece_err
    if _reverse:
        total = -total
    return QuadratureResult(total, nodes_total, err_total, converged)


def _branch_points(f):
    return [s.location for s in getattr(f, "singularities", ()) if s.kind == "branch-point"]


def _ray_hits_circle(origin: complex, direction: complex, piece: CirclePiece) -> bool:
    """Whether {origin + t*direction, t >= 0} meets the circle trace."""
    d = direction / abs(direction)
    rel = origin - piece.center
    b = 2.0 * (d.conjugate() * rel).real
    c = abs(rel) ** 2 - piece.radius ** 2
    disc = b * b - 4.0 * c
    if disc < 0:
        return False
    sq = math.sqrt(disc)
    return (-b + sq) / 2.0 >= 0 or (-b - sq) / 2.0 >= 0


def validate_contour(f, contour: Contour, rel: float = 1e-9):
    """Reject contours passing through singularities or crossing branch cuts.

    Branch cuts are modeled as rays from each declared branch point directed
    away from the centroid of the contour pieces.
    """
    centroid = sum(p.center for p in contour.pieces) / len(contour.pieces)
    for s in getattr(f, "singularities", ()):
        if contour.on_trace(s.location, rel):
            raise GeometryError(f"singularity {s.location} lies on the contour")
    for b in _branch_points(f):
        direction = b - centroid
        if abs(direction) == 0.0:
            raise GeometryError(f"branch point {b} at the contour centroid")
        for piece in contour.pieces:
            if _ray_hits_circle(b, direction, piece):
                raise GeometryError(f"contour crosses the branch cut from {b}")


def default_contour(S: PointSet, f, mode: str, delta: float | None = None, split: int | None = None):
    """Standard contours separating the foci from the singularities of f.

    enclose-all:  one circle about the focus centroid whose radius is the
                  geometric mean of the largest focus distance and the
                  smallest singularity distance (radius max-focus-distance
                  plus one when f is entire).
    per-focus:    disjoint circles around each focus with radius 0.4 times
                  the smallest pairwise focus or focus-singularity distance.
    annulus-pair: (outer, inner) circles bracketing the union of small
                  disks around the singular foci; returns (gamma1, gamma2).
    """
    c0 = S.centroid
    sing = [s.location for s in getattr(f, "singularities", ())]
    if mode == "enclose-all":
        a = max(abs(z - c0) for z in S.foci)
        if not sing:
            contour = Contour.circle(c0, a + 1.0)
        else:
            d = min(abs(w - c0) for w in sing)
            if d <= a * (1.0 + 1e-12) or d == 0.0:
                raise GeometryError(
                    "a singularity is at least as close to the focus centroid as the farthest focus"
                )
            radius = math.sqrt(a * d) if a > 0 else d / 2.0
            contour = Contour.circle(c0, radius)
        validate_contour(f, contour)
        return contour

    if mode == "per-focus":
        cand = [abs(a - b) for i, a in enumerate(S.foci) for b in S.foci[i + 1:]]
        cand += [abs(z - w) for z in S.foci for w in sing]
        if not cand:
            base = 2.5
        else:
            base = min(cand)
            if base == 0.0:
                raise GeometryError("a singularity coincides with a focus")
        radius = 0.4 * base
        contour = Contour(tuple(CirclePiece(z, radius) for z in S.foci), "per-focus-union")
        validate_contour(f, contour)
        return contour

    if mode == "annulus-pair":
        if split is None:
            singular_idx = [
                k for k, z in enumerate(S.foci)
                if any(abs(z - w) < 1e-9 * (1.0 + abs(z)) for w in sing)
            ]
        else:
            if not 1 <= split < S.p:
                raise GeometryError("split must satisfy 1 <= q < p")
            singular_idx = list(range(split, S.p))
        if not singular_idx:
            raise GeometryError("annulus-pair mode needs singular foci")
        sing_foci = [S.foci[k] for k in singular_idx]
        regular_foci = [z for k, z in enumerate(S.foci) if k not in singular_idx]
        if delta is None:
            others = regular_foci + [w for w in sing if all(abs(w - z) > 1e-12 for z in sing_foci)]
            gaps = [abs(z - w) for z in sing_foci for w in others]
            gaps += [abs(a - b) for i, a in enumerate(sing_foci) for b in sing_foci[i + 1:]]
            delta = 0.1 * min(gaps) if gaps else 0.1
        cs = sum(sing_foci) / len(sing_foci)
        r2 = max(abs(z - cs) for z in sing_foci) + 2.0 * delta
        ext = [
            w for w in sing
            if all(abs(w - z) > delta * (1.0 + 1e-9) for z in sing_foci)
        ]
        inner_blockers = [abs(z - cs) for z in regular_foci]
        if any(d <= r2 * (1.0 + 1e-9) for d in inner_blockers):
            raise GeometryError("a regular focus falls inside the inner contour")
        lo = max([r2] + inner_blockers)
        if ext:
            d_ext = min(abs(w - cs) for w in ext)
            if d_ext <= lo * (1.0 + 1e-9):
                raise GeometryError("an exterior singularity blocks the outer contour")
            r1 = math.sqrt(lo * d_ext)
        else:
            r1 = 2.0 * lo + 1.0
        gamma1 = Contour.circle(cs, r1)
        gamma2 = Contour.circle(cs, r2)
        validate_contour(f, gamma1)
        validate_contour(f, gamma2)
        return gamma1, gamma2

    raise ValueError(f"unknown contour mode {mode!r}")
