"""Independent verification oracles.

Three cross-checks that share no computational machinery with the
expansion code paths they validate:

* confluent Hermite interpolation through divided differences, which must
  reproduce the expansion partial sums exactly;
* brute-force residue summation for rational functions, built on plain
  numpy polynomial arithmetic rather than the jet engine;
* log-log order fits of the exact remainder near a focus.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .contours import Contour, QuadratureSettings, default_contour
from .errors import DomainError
from .points import PointSet
from .taylor import remainder_exact

__all__ = [
    "HermitePolynomial",
    "hermite_interpolate",
    "residue_coeffs_rational",
    "remainder_order_check",
]


# --------------------------------------------------------------------------
# Confluent Hermite interpolation


@dataclass(frozen=True)
class HermitePolynomial:
    """Newton-form interpolant with confluent (repeated) nodes.

    Nodes follow the block ordering z_1 x m_1, ..., z_p x m_p, repeated
    once per block; newton_coeffs[k] is the divided difference over the
    first k+1 nodes of that sequence.
    """

    points: PointSet
    blocks: int
    node_seq: tuple[int, ...]
    newton_coeffs: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.newton_coeffs) - 1

    def __call__(self, z):
        foci = self.points.foci
        acc = self.newton_coeffs[-1]
        for k in range(len(self.newton_coeffs) - 2, -1, -1):
            acc = acc * (z - foci[self.node_seq[k]]) + self.newton_coeffs[k]
        return acc


def hermite_interpolate(f, S: PointSet, blocks: int, node_order=None) -> HermitePolynomial:
    """Interpolant matching f and its derivatives to order blocks*m_j - 1.

    Divided differences over repeated nodes depend only on the node
    multiset, so they are computed by recursion over focus occurrence
    counts; equal-node differences come straight from the scaled jets.
    ``node_order`` optionally permutes the per-block focus order (used to
    check that the interpolant does not depend on it).
    """
    order = tuple(node_order) if node_order is not None else tuple(range(S.p))
    if sorted(order) != list(range(S.p)):
        raise ValueError("node_order must be a permutation of the foci")
    node_seq = tuple(
        j for _rep in range(blocks) for j in order for _ in range(S.mults[j])
    )
    jets = [f.jet(S.foci[j], blocks * S.mults[j] - 1) for j in range(S.p)]

    memo: dict[tuple[int, ...], complex] = {}

    def dd(counts: tuple[int, ...]) -> complex:
        got = memo.get(counts)
        if got is not None:
            return got
        nz = [j for j, c in enumerate(counts) if c > 0]
        if len(nz) == 1:
            j = nz[0]
            value = jets[j].coeff(counts[j] - 1)
        else:
            a, b = nz[0], nz[-1]
            ca = tuple(c - (1 if j == a else 0) for j, c in enumerate(counts))
            cb = tuple(c - (1 if j == b else 0) for j, c in enumerate(counts))
            value = (dd(ca) - dd(cb)) / (S.foci[b] - S.foci[a])
        memo[counts] = value
        return value

    coeffs = []
    counts = [0] * S.p
    for j in node_seq:
        counts[j] += 1
        coeffs.append(dd(tuple(counts)))
    return HermitePolynomial(S, blocks, node_seq, tuple(coeffs))


# --------------------------------------------------------------------------
# Rational residue oracle (numpy polynomial arithmetic only)


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def _poly_pow(a: np.ndarray, e: int) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for _ in range(e):
        out = np.convolve(out, a)
    return out


def _deflate(p: np.ndarray, w0: complex):
    """Divide p by (w - w0); returns (quotient, remainder)."""
    q = np.zeros(max(len(p) - 1, 0), dtype=complex)
    acc = 0j
    for k in range(len(p) - 1, 0, -1):
        acc = acc * w0 + p[k]
        q[k - 1] = acc
    rem = acc * w0 + p[0] if len(p) else 0j
    return q, rem


def _shift_to(p: np.ndarray, w0: complex) -> np.ndarray:
    """Coefficients of p in powers of (w - w0), by repeated deflation."""
    out = np.zeros(len(p), dtype=complex)
    cur = np.array(p, dtype=complex)
    for i in range(len(p)):
        cur, rem = _deflate(cur, w0)
        out[i] = rem
        if len(cur) == 0:
            break
    return out


def _series_div(num: np.ndarray, den: np.ndarray, upto: int) -> np.ndarray:
    if abs(den[0]) == 0.0:
        raise ZeroDivisionError("deflated denominator still vanishes")
    q = np.zeros(upto + 1, dtype=complex)
    for k in range(upto + 1):
        acc = num[k] if k < len(num) else 0j
        for i in range(k):
            if k - i < len(den):
                acc -= q[i] * den[k - i]
        q[k] = acc / den[0]
    return q


def _as_rational_arrays(f) -> tuple[np.ndarray, np.ndarray]:
    from .functions import _rational, _trim_poly

    expr = getattr(f, "expr", None)
    if expr is None:
        raise DomainError("the residue oracle needs a parsed rational function")
    r = _rational(expr)
    if r is None:
        raise DomainError("the residue oracle only applies to rational functions")
    return _trim_poly(r[0]), _trim_poly(r[1])


def residue_coeffs_rational(f, S: PointSet, n: int, j: int, l: int) -> complex:
    """Coefficient a[n][j][l] by summing residues of the coefficient integrand.

    Applies to rational f. The integrand is num(w) over den(w) times the
    explicit focus factors; residues are taken at the foci, with any pole
    of f sitting exactly at a focus folded into that focus's order. Poles
    of f away from the foci are outside the coefficient contour and do not
    contribute.
    """
    if not 0 <= j < S.p or not 0 <= l < S.mults[j] or n < 0:
        raise IndexError("coefficient index out of range")
    num, den = _as_rational_arrays(f)
    total = 0j
    den_scale = float(np.max(np.abs(den))) or 1.0
    for k, (zk, mk) in enumerate(S):
        explicit = n * mk + (l + 1 if k == j else 0)
        # fold the order of den's root at the focus, if any
        den_red = np.array(den, dtype=complex)
        folded = 0
        while len(den_red) > 1:
            q, rem = _deflate(den_red, zk)
            if abs(rem) > 1e-8 * den_scale * max(1.0, abs(zk)) ** max(len(den_red) - 1, 1):
                break
            den_red, folded = q, folded + 1
        d = explicit + folded
        if d == 0:
            continue
        # remaining denominator: den_red times the other focus factors
        Q = den_red
        for s, (zs, ms) in enumerate(S):
            if s == k:
                continue
            e = n * ms + (l + 1 if s == j else 0)
            if e:
                Q = _poly_mul(Q, _poly_pow(np.array([-zs, 1.0], dtype=complex), e))
        num_s = _shift_to(num, zk)
        den_s = _shift_to(Q, zk)
        series = _series_div(num_s, den_s, d - 1)
        total += series[d - 1]
    return total


# --------------------------------------------------------------------------
# Remainder order fit


def remainder_order_check(
    f,
    S: PointSet,
    blocks: int,
    j: int,
    contour: Contour | None = None,
    seed: int = 7,
    settings: QuadratureSettings = QuadratureSettings(),
):
    """Log-log slope of the exact remainder approaching focus j.

    Probes z_j + t*u for t in 1e-2, 1e-3, 1e-4 along a fixed random unit
    direction u and fits the slope of log |r_N| against log t. Returns the
    string 'exact' when the remainder sits at quadrature noise everywhere.
    """
    if not 0 <= j < S.p:
        raise IndexError("focus index out of range")
    if contour is None:
        contour = default_contour(S, f, "enclose-all")
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    u = complex(np.cos(angle), np.sin(angle))
    ts = np.array([1e-2, 1e-3, 1e-4])
    rs = np.array(
        [abs(remainder_exact(f, S, blocks, S.foci[j] + t * u, contour, settings)) for t in ts]
    )
    if np.max(rs) < 1e-13:
        return "exact"
    slope, _ = np.polyfit(np.log(ts), np.log(rs), 1)
    return float(slope)
