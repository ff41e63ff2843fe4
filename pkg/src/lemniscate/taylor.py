"""Taylor expansion of an analytic function in several points.

For a point set S = {z_1 (m_1 times), ..., z_p (m_p times)} the expansion
reads

    f(z) = sum_n q_n(z) * prod_k (z - z_k)**(n m_k) + r_N(z)

with block polynomials q_n of degree m-1 anchored at the foci. The
coefficient tensor a[n][j][l] can be computed two independent ways: as a
Cauchy integral over a contour separating the foci from the singularities
(method 'cauchy'), or from series coefficients of f at the foci (method
'derivative'). The exact remainder r_N is a single Cauchy integral.

The derivative path evaluates residues of the coefficient integrand at the
foci through jet arithmetic. Because the jets tolerate finite principal
parts, it remains valid when poles of f sit at foci, in which case the
coefficients coincide with the Cauchy integral over any contour enclosing
all foci and excluding the remaining singularities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._parallel import pmap
from .contours import Contour, QuadratureSettings, cauchy_integral, default_contour, validate_contour
from .errors import DomainError, GeometryError, QuadratureError
from .jets import Jet
from .points import PointSet

__all__ = [
    "BasisPolynomial",
    "TaylorExpansion",
    "h_kernel",
    "confluent_kernel_limit",
    "coeff_cauchy",
    "coeff_derivative",
    "basis_eval",
    "expand_taylor",
    "eval_expansion",
    "remainder_exact",
]


# --------------------------------------------------------------------------
# Interpolation kernels


def h_kernel(w: complex, z: complex, nodes) -> complex:
    """Divided-difference kernel for distinct nodes.

    Equals (prod_k (w - z_k) - prod_k (z - z_k)) / (w - z), evaluated in the
    partial-fraction form that stays finite at w == z.
    """
    nodes = [complex(x) for x in nodes]
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if a == b:
                raise DomainError("h_kernel needs pairwise distinct nodes")
    total = 0j
    for j, zj in enumerate(nodes):
        num = 1.0 + 0j
        den = 1.0 + 0j
        for k, zk in enumerate(nodes):
            if k == j:
                continue
            num *= (w - zk) * (z - zk)
            den *= zj - zk
        total += num / den
    return total


def confluent_kernel_limit(z: complex, w: complex, z_m: complex, m: int) -> complex:
    """Limit of the kernel partial fractions when all m nodes merge at z_m."""
    if w == z_m:
        raise DomainError("kernel limit undefined at w == z_m")
    total = 0j
    ratio = (z - z_m) / (w - z_m)
    term = 1.0 / (w - z_m)
    for _ in range(m):
        total += term
        term *= ratio
    return total


# --------------------------------------------------------------------------
# Coefficient integrands and their residues at the foci


def make_integrand(f, factors):
    """Vectorized w -> f(w) * prod (w - a)**e for the given (a, e) factors."""

    def integrand(w):
        acc = f.eval(w)
        for a, e in factors:
            acc = acc * (w - a) ** e
        return acc

    return integrand


def residue_sum_at_foci(f, S: PointSet, factors, include=None) -> complex:
    """Sum of residues of f(w) * prod (w - a)**e at the selected foci.

    Residues are read off jets of f at each focus divided or multiplied by
    the exact polynomial jets of the factors. Foci where the integrand is
    analytic contribute zero.
    """
    indices = range(S.p) if include is None else include
    total = 0j
    for k in indices:
        zk = S.foci[k]
        e0 = sum(e for a, e in factors if a == zk)
        rho = f.pole_order_at(zk) if hasattr(f, "pole_order_at") else 0
        target = -1 - e0
        if target < -rho:
            continue  # integrand analytic or pole order too low for a residue
        jet = f.laurent_jet(zk, target)
        width = jet.high - jet.val
        bracket = jet
        for a, e in factors:
            if a == zk:
                continue
            bracket = bracket * Jet(zk, _binomial_coeffs(zk - a, e, width))
        total += bracket.coeff(target)
    return total


def _binomial_coeffs(d: complex, e: int, width: int) -> np.ndarray:
    """Coefficients of (d + t)**e for integer e of either sign, d nonzero."""
    c = np.zeros(width, dtype=complex)
    c[0] = d ** e
    top = min(e, width - 1) if e >= 0 else width - 1
    for i in range(1, top + 1):
        c[i] = c[i - 1] * (e - i + 1) / (i * d)
    return c


def _taylor_factors(S: PointSet, n: int, j: int, l: int):
    factors = [(S.foci[j], -(l + 1))]
    if n > 0:
        factors += [(zk, -n * mk) for zk, mk in S]
    return factors


# --------------------------------------------------------------------------
# Coefficient computation


def _check_indices(S: PointSet, n: int, j: int, l: int):
    if n < 0 or not 0 <= j < S.p or not 0 <= l < S.mults[j]:
        raise IndexError(f"coefficient index (n={n}, j={j}, l={l}) out of range")


def coeff_cauchy(
    f,
    S: PointSet,
    n: int,
    j: int,
    l: int,
    contour: Contour | None = None,
    settings: QuadratureSettings = QuadratureSettings(),
) -> complex:
    """Coefficient a[n][j][l] as a Cauchy integral over the given contour.

    The contour must enclose every focus and exclude the singularities of f
    away from the foci; by default an enclosing circle is constructed.
    """
    _check_indices(S, n, j, l)
    if contour is None:
        contour = default_contour(S, f, "enclose-all")
    else:
        validate_contour(f, contour)
    integrand = make_integrand(f, _taylor_factors(S, n, j, l))
    result = cauchy_integral(integrand, contour, settings.tol, settings.max_nodes)
    if not result.converged:
        raise QuadratureError(
            f"coefficient quadrature did not settle (est_error {result.est_error:.3e})"
        )
    return result.value


def coeff_derivative(f, S: PointSet, n: int, j: int, l: int) -> complex:
    """Coefficient a[n][j][l] from series coefficients of f at the foci.

    Each focus contributes one scaled derivative of f divided by the
    explicit product factors; derivative orders below zero contribute
    nothing unless f itself has a pole at that focus.
    """
    _check_indices(S, n, j, l)
    return residue_sum_at_foci(f, S, _taylor_factors(S, n, j, l))


# --------------------------------------------------------------------------
# Expansion containers and evaluation


@dataclass(frozen=True)
class BasisPolynomial:
    """One block polynomial of degree m-1: coefficients[j][l] anchored at z_j.

    The stored coefficients are the scaled derivatives of the block's
    generating function at each focus. The polynomial itself is the
    confluent Hermite interpolant carrying that data, so evaluation folds
    in the Taylor coefficients of the reciprocal basis prefactors; for
    simple foci this reduces to the plain anchored-basis sum.
    """

    points: PointSet
    coeffs: tuple[tuple[complex, ...], ...]


def basis_eval(q: BasisPolynomial, z):
    """Evaluate a block polynomial; works for scalars, arrays and jets."""
    return _poly_block_eval(q.points, q.coeffs, z)


@lru_cache(maxsize=128)
def _basis_corrections(S: PointSet) -> tuple:
    """Taylor coefficients at each focus of 1 / (anchored basis prefactor).

    beta[j][s] is the s-th coefficient of
    prod_{h != j} ((z_j - z_h) / (z - z_h))**m_h  expanded at z_j.
    """
    out = []
    for j, (zj, mj) in enumerate(S):
        beta = np.zeros(mj, dtype=complex)
        beta[0] = 1.0
        for h, (zh, mh) in enumerate(S):
            if h == j:
                continue
            beta = np.convolve(beta, _binomial_series(1.0 / (zj - zh), -mh, mj))[:mj]
        out.append(tuple(beta))
    return tuple(out)


def _binomial_series(c: complex, e: int, width: int) -> np.ndarray:
    """Coefficients of (1 + c t)**e for integer e of either sign."""
    out = np.zeros(width, dtype=complex)
    out[0] = 1.0
    top = min(e, width - 1) if e >= 0 else width - 1
    for i in range(1, top + 1):
        out[i] = out[i - 1] * c * (e - i + 1) / i
    return out


def _poly_block_eval(S: PointSet, coeffs, z):
    betas = _basis_corrections(S)
    total = None
    for j, (zj, mj) in enumerate(S):
        outer = None
        den = 1.0 + 0j
        for k, (zk, mk) in enumerate(S):
            if k == j:
                continue
            term = (z - zk) ** mk
            outer = term if outer is None else outer * term
            den *= (zj - zk) ** mk
        inner = 0j
        for l in range(mj - 1, -1, -1):
            folded = sum(coeffs[j][i] * betas[j][l - i] for i in range(l + 1))
            inner = inner * (z - zj) + folded
        term = inner if outer is None else outer * inner
        term = term / den
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class TaylorExpansion:
    """Coefficient tensor a[n][j][l] for n < blocks, plus evaluation."""

    points: PointSet
    blocks: int
    a: tuple[tuple[tuple[complex, ...], ...], ...]
    method: str

    def block(self, n: int) -> BasisPolynomial:
        return BasisPolynomial(self.points, self.a[n])

    def __call__(self, z):
        return eval_expansion(self, z)


def _coeff_table(S: PointSet, blocks: int, one_coeff) -> tuple:
    jobs = [(n, j, l) for n in range(blocks) for j in range(S.p) for l in range(S.mults[j])]
    values = pmap(lambda t: one_coeff(*t), jobs)
    table = []
    i = 0
    for n in range(blocks):
        row = []
        for j in range(S.p):
            row.append(tuple(values[i + l] for l in range(S.mults[j])))
            i += len(row[-1])
        table.append(tuple(row))
    return tuple(table)


def expand_taylor(
    f,
    S: PointSet,
    blocks: int,
    method: str = "derivative",
    contour: Contour | None = None,
    settings: QuadratureSettings = QuadratureSettings(),
) -> TaylorExpansion:
    """Populate a[n][j][l] for n < blocks by the chosen method."""
    if blocks < 1:
        raise ValueError("need at least one block")
    if method == "cauchy":
        loop = contour if contour is not None else default_contour(S, f, "enclose-all")
        a = _coeff_table(S, blocks, lambda n, j, l: coeff_cauchy(f, S, n, j, l, loop, settings))
    elif method == "derivative":
        a = _coeff_table(S, blocks, lambda n, j, l: coeff_derivative(f, S, n, j, l))
    else:
        raise ValueError(f"unknown method {method!r}")
    return TaylorExpansion(points=S, blocks=blocks, a=a, method=method)


def eval_expansion(E: TaylorExpansion, z):
    """Partial sum sum_n q_n(z) * P(z)**n with P computed once."""
    P = E.points.product(z)
    total = None
    power = None
    for n in range(E.blocks):
        qn = _poly_block_eval(E.points, E.a[n], z)
        term = qn if power is None else qn * power
        total = term if total is None else total + term
        power = P if power is None else power * P
    return total


def remainder_exact(
    f,
    S: PointSet,
    blocks: int,
    z: complex,
    contour: Contour | None = None,
    settings: QuadratureSettings = QuadratureSettings(),
) -> complex:
    """Exact remainder after ``blocks`` blocks as a single Cauchy integral.

    The contour must enclose z as well as every focus while excluding the
    singularities of f.
    """
    z = complex(z)
    if contour is None:
        contour = default_contour(S, f, "enclose-all")
    validate_contour(f, contour)
    if contour.on_trace(z):
        raise GeometryError("remainder requested at a point on the contour")
    if not contour.contains(z):
        raise GeometryError("remainder contour must enclose the evaluation point")
    N = blocks
    factors = [(z, -1)] + [(zk, -N * mk) for zk, mk in S]
    result = cauchy_integral(make_integrand(f, factors), contour, settings.tol, settings.max_nodes)
    if not result.converged:
        raise QuadratureError(
            f"remainder quadrature did not settle (est_error {result.est_error:.3e})"
        )
    return result.value * S.product(z) ** N
