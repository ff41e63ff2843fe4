"""Laurent and mixed Taylor-Laurent expansions in several points.

The Laurent form adds a second family of block polynomials t_n multiplying
negative powers of the focus product, capturing pole behavior inside a
closed neighborhood of the foci. The Taylor-Laurent form splits the foci:
the first q behave as Taylor points, the rest as Laurent points, and the
extra terms multiply powers of the mixed ratio

    R(z) = prod_{k<=q} (z - z_k)**m_k / prod_{k>q} (z - z_k)**m_k.

Each tensor can be computed from Cauchy integrals over a contour pair
(gamma1 outer, gamma2 inner) or, when the inner singularities are poles at
the foci with known orders, from series coefficients at the foci.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._parallel import pmap
from .contours import Contour, QuadratureSettings, cauchy_integral, validate_contour
from .errors import DomainError, GeometryError, QuadratureError
from .points import PointSet
from .taylor import (
    _coeff_table,
    _poly_block_eval,
    _taylor_factors,
    make_integrand,
    residue_sum_at_foci,
)

__all__ = [
    "PoleProfile",
    "LaurentExpansion",
    "TaylorLaurentExpansion",
    "expand_laurent_cauchy",
    "expand_laurent_poles",
    "expand_taylor_laurent_cauchy",
    "expand_taylor_laurent_poles",
    "eval_laurent",
    "eval_taylor_laurent",
    "laurent_remainder_exact",
    "principal_part_subtract",
]


@dataclass(frozen=True)
class PoleProfile:
    """Pole orders aligned with the foci; zero marks a regular focus."""

    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(r) for r in self.orders))
        if any(r < 0 for r in self.orders):
            raise ValueError("pole orders must be nonnegative")

    @classmethod
    def infer(cls, f, S: PointSet) -> "PoleProfile":
        return cls(tuple(f.pole_order_at(z) for z in S.foci))

    def validate_against(self, f, S: PointSet):
        """Check each declared order against the actual series of f."""
        for z, rho in zip(S.foci, self.orders):
            jet = f.laurent_jet(z, max(rho, 1))
            sig = jet.significant_val()
            if sig is not None and sig < -rho:
                raise DomainError(
                    f"declared pole order {rho} at {z} is too small (series starts at {sig})"
                )


def _profile_for(f, S: PointSet, profile: PoleProfile | None) -> PoleProfile:
    if profile is None:
        profile = PoleProfile.infer(f, S)
    if len(profile.orders) != S.p:
        raise ValueError("pole profile length must match the number of foci")
    profile.validate_against(f, S)
    return profile


# --------------------------------------------------------------------------
# Integrand factor lists


def _laurent_b_factors(S: PointSet, n: int, j: int, l: int):
    return [(zk, (n + 1) * mk) for zk, mk in S] + [(S.foci[j], -(l + 1))]


def _mixed_factors(S: PointSet, q: int, power: int, j: int, l: int):
    factors = []
    if power > 0:
        factors += [(S.foci[k], power * S.mults[k]) for k in range(q, S.p)]
        factors += [(S.foci[k], -power * S.mults[k]) for k in range(q)]
    return factors + [(S.foci[j], -(l + 1))]


# --------------------------------------------------------------------------
# Expansion containers


@dataclass(frozen=True)
class LaurentExpansion:
    """Tensors a[n][j][l] (positive powers) and b[n][j][l] (negative powers)."""

    points: PointSet
    blocks: int
    a: tuple
    b: tuple
    method: str

    def __call__(self, z):
        return eval_laurent(self, z)


@dataclass(frozen=True)
class TaylorLaurentExpansion:
    """Tensors a (all foci), b (foci before the split), c (foci after it)."""

    points: PointSet
    split: int
    blocks: int
    a: tuple
    b: tuple
    c: tuple
    method: str

    @property
    def s(self) -> int:
        return sum(self.points.mults[: self.split])

    def __call__(self, z):
        return eval_taylor_laurent(self, z)


def _validate_split(S: PointSet, q: int):
    if not 1 <= q < S.p:
        raise GeometryError("split must satisfy 1 <= q < p")


def _quad_coeff(f, factors, contour, settings) -> complex:
    result = cauchy_integral(make_integrand(f, factors), contour, settings.tol, settings.max_nodes)
    if not result.converged:
        raise QuadratureError(
            f"coefficient quadrature did not settle (est_error {result.est_error:.3e})"
        )
    return result.value


# --------------------------------------------------------------------------
# Laurent expansion (all foci inside the inner neighborhood)


def expand_laurent_cauchy(
    f,
    S: PointSet,
    blocks: int,
    gamma1: Contour,
    gamma2: Contour,
    settings: QuadratureSettings = QuadratureSettings(),
) -> LaurentExpansion:
    """Both tensors from Cauchy integrals: a over gamma1, b over gamma2."""
    validate_contour(f, gamma1)
    validate_contour(f, gamma2)
    a = _coeff_table(
        S, blocks, lambda n, j, l: _quad_coeff(f, _taylor_factors(S, n, j, l), gamma1, settings)
    )
    b = _coeff_table(
        S, blocks, lambda n, j, l: _quad_coeff(f, _laurent_b_factors(S, n, j, l), gamma2, settings)
    )
    return LaurentExpansion(points=S, blocks=blocks, a=a, b=b, method="cauchy")


def expand_laurent_poles(
    f, S: PointSet, blocks: int, profile: PoleProfile | None = None
) -> LaurentExpansion:
    """Both tensors from series coefficients at the foci (poles declared)."""
    profile = _profile_for(f, S, profile)
    a = _coeff_table(S, blocks, lambda n, j, l: residue_sum_at_foci(f, S, _taylor_factors(S, n, j, l)))
    b = _coeff_table(
        S, blocks, lambda n, j, l: residue_sum_at_foci(f, S, _laurent_b_factors(S, n, j, l))
    )
    return LaurentExpansion(points=S, blocks=blocks, a=a, b=b, method="derivative")


def eval_laurent(E: LaurentExpansion, z):
    P = E.points.product(z)
    total = None
    pos = None
    neg = 1.0 / P
    for n in range(E.blocks):
        qn = _poly_block_eval(E.points, E.a[n], z)
        tn = _poly_block_eval(E.points, E.b[n], z)
        term = (qn if pos is None else qn * pos) + tn * neg
        total = term if total is None else total + term
        pos = P if pos is None else pos * P
        neg = neg / P
    return total


# --------------------------------------------------------------------------
# Taylor-Laurent expansion (foci split into regular and singular blocks)


def expand_taylor_laurent_cauchy(
    f,
    S: PointSet,
    q: int,
    blocks: int,
    gamma1: Contour,
    gamma2: Contour,
    settings: QuadratureSettings = QuadratureSettings(),
) -> TaylorLaurentExpansion:
    """Tensors from Cauchy integrals; gamma2 encloses only foci after the split."""
    _validate_split(S, q)
    validate_contour(f, gamma1)
    validate_contour(f, gamma2)
    for k in range(q):
        if gamma2.contains(S.foci[k]):
            raise GeometryError("inner contour must exclude the regular foci")
    for k in range(q, S.p):
        if not gamma2.contains(S.foci[k]):
            raise GeometryError("inner contour must enclose the singular foci")
    a = _coeff_table(
        S, blocks, lambda n, j, l: _quad_coeff(f, _taylor_factors(S, n, j, l), gamma1, settings)
    )
    Sq = S.restricted(range(q))
    b = _coeff_table(
        Sq, blocks,
        lambda n, j, l: _quad_coeff(f, _mixed_factors(S, q, n, j, l), gamma2, settings),
    )
    Ss = S.restricted(range(q, S.p))
    c = _coeff_table(
        Ss, blocks,
        lambda n, j, l: _quad_coeff(f, _mixed_factors(S, q, n + 1, q + j, l), gamma2, settings),
    )
    return TaylorLaurentExpansion(points=S, split=q, blocks=blocks, a=a, b=b, c=c, method="cauchy")


def expand_taylor_laurent_poles(
    f, S: PointSet, q: int, blocks: int, profile: PoleProfile | None = None
) -> TaylorLaurentExpansion:
    """Tensors from series coefficients at the foci (poles declared after the split)."""
    _validate_split(S, q)
    profile = _profile_for(f, S, profile)
    if any(profile.orders[k] > 0 for k in range(q)):
        raise GeometryError("regular foci must not carry poles")
    singular = range(q, S.p)
    a = _coeff_table(S, blocks, lambda n, j, l: residue_sum_at_foci(f, S, _taylor_factors(S, n, j, l)))
    Sq = S.restricted(range(q))
    b = _coeff_table(
        Sq, blocks,
        lambda n, j, l: residue_sum_at_foci(f, S, _mixed_factors(S, q, n, j, l), include=singular),
    )
    Ss = S.restricted(singular)
    c = _coeff_table(
        Ss, blocks,
        lambda n, j, l: residue_sum_at_foci(
            f, S, _mixed_factors(S, q, n + 1, q + j, l), include=singular
        ),
    )
    return TaylorLaurentExpansion(
        points=S, split=q, blocks=blocks, a=a, b=b, c=c, method="derivative"
    )


def eval_taylor_laurent(E: TaylorLaurentExpansion, z):
    S, q = E.points, E.split
    P = S.product(z)
    Sq = S.restricted(range(q))
    Ss = S.restricted(range(q, S.p))
    R = Sq.product(z) / Ss.product(z)
    total = None
    pos = None
    ratio_n = None
    for n in range(E.blocks):
        qn = _poly_block_eval(S, E.a[n], z)
        t1 = -_poly_block_eval(Sq, E.b[n], z)
        t2 = _poly_block_eval(Ss, E.c[n], z)
        term = qn if pos is None else qn * pos
        term = term + (t1 if ratio_n is None else t1 * ratio_n)
        term = term + t2 * (R if ratio_n is None else ratio_n * R)
        total = term if total is None else total + term
        pos = P if pos is None else pos * P
        ratio_n = R if ratio_n is None else ratio_n * R
    return total


# --------------------------------------------------------------------------
# Remainders


def laurent_remainder_exact(
    f,
    S: PointSet,
    blocks: int,
    z: complex,
    gamma1: Contour,
    gamma2: Contour,
    q: int | None = None,
    settings: QuadratureSettings = QuadratureSettings(),
) -> complex:
    """Exact remainder as the difference of two Cauchy integrals.

    Without a split the annulus form applies; with a split the mixed ratio
    form. The point z must lie between gamma2 and gamma1.
    """
    z = complex(z)
    validate_contour(f, gamma1)
    validate_contour(f, gamma2)
    if gamma1.on_trace(z) or gamma2.on_trace(z):
        raise GeometryError("remainder requested at a point on a contour")
    if not gamma1.contains(z) or gamma2.contains(z):
        raise GeometryError("remainder point must lie between the contours")
    N = blocks
    outer_factors = [(z, -1)] + [(zk, -N * mk) for zk, mk in S]
    outer = cauchy_integral(make_integrand(f, outer_factors), gamma1, settings.tol, settings.max_nodes)
    if q is None:
        inner_factors = [(z, -1)] + [(zk, N * mk) for zk, mk in S]
        scale = S.product(z) ** (-N)
    else:
        _validate_split(S, q)
        inner_factors = [(z, -1)]
        inner_factors += [(S.foci[k], N * S.mults[k]) for k in range(q, S.p)]
        inner_factors += [(S.foci[k], -N * S.mults[k]) for k in range(q)]
        Sq = S.restricted(range(q))
        Ss = S.restricted(range(q, S.p))
        scale = (Sq.product(z) / Ss.product(z)) ** N
    inner = cauchy_integral(make_integrand(f, inner_factors), gamma2, settings.tol, settings.max_nodes)
    if not (outer.converged and inner.converged):
        raise QuadratureError("remainder quadrature did not settle")
    return outer.value * S.product(z) ** N - inner.value * scale


# --------------------------------------------------------------------------
# Principal-part subtraction


class SubtractedFunction:
    """f minus the finite negative-power sum that carries its poles at the foci.

    The result is analytic on the original domain up to removable points at
    the foci; it can be evaluated away from them and expanded in jets whose
    principal parts cancel to rounding.
    """

    def __init__(self, f, S: PointSet, profile: PoleProfile, depth: int, expansion: LaurentExpansion):
        self.base = f
        self.points = S
        self.profile = profile
        self.depth = depth  # number of subtracted blocks, possibly zero
        self.expansion = expansion
        self.singularities = tuple(
            s for s in getattr(f, "singularities", ())
            if all(abs(s.location - z) >= 1e-9 * (1.0 + abs(z)) for z in S.foci)
        )

    @property
    def entire(self) -> bool:
        return len(self.singularities) == 0

    def pole_order_at(self, z: complex) -> int:
        for s in self.singularities:
            if s.kind == "pole" and abs(s.location - z) < 1e-9 * (1.0 + abs(z)):
                return s.order
        return 0

    def subtracted_sum(self, z):
        """The removed principal part, sum_{n<=depth} t_n(z) * P(z)**-(n+1)."""
        if self.depth == 0:
            return 0j if not hasattr(z, "center") else z * 0
        P = self.points.product(z)
        neg = 1.0 / P
        total = None
        for n in range(self.depth):
            tn = _poly_block_eval(self.points, self.expansion.b[n], z)
            term = tn * neg
            total = term if total is None else total + term
            neg = neg / P
        return total

    def eval(self, z):
        return self.base.eval(z) - self.subtracted_sum(z)

    __call__ = eval

    def laurent_jet(self, center: complex, upto: int):
        jet = self.base.laurent_jet(center, upto)
        if self.depth:
            from .jets import Jet

            slack = 8 + 3 * self.depth * self.points.m
            var = Jet.variable(complex(center), max(upto, 0) + (jet.high - jet.val) + slack)
            jet = jet - self.subtracted_sum(var)
        return jet

    def jet(self, center: complex, order: int):
        from .jets import Jet

        jet = self.laurent_jet(center, order)
        sig = jet.significant_val()
        if sig is not None and sig < 0:
            raise DomainError(
                "subtraction left a pole behind; the declared pole orders are insufficient"
            )
        return Jet(complex(center), jet.taylor_coeffs(order))


def principal_part_subtract(f, S: PointSet, profile: PoleProfile | None = None) -> SubtractedFunction:
    """Remove the negative-power blocks so the rest is plainly expandable.

    Subtracts sum_{n=0}^{M} t_n(z) * P(z)**-(n+1) with M chosen from the
    declared pole orders; the returned function evaluates and expands like
    any other away from the (now removable) foci.
    """
    profile = _profile_for(f, S, profile)
    M = max(
        (math.floor((rho - 1) / m) for rho, m in zip(profile.orders, S.mults) if rho >= 1),
        default=-1,
    )
    depth = M + 1
    expansion = expand_laurent_poles(f, S, max(depth, 1), profile)
    return SubtractedFunction(f, S, profile, depth, expansion)
