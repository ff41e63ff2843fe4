import numpy as np
import pytest

from lemniscate import (
    Contour,
    DomainError,
    GeometryError,
    PointSet,
    PoleProfile,
    default_contour,
    eval_expansion,
    eval_laurent,
    eval_taylor_laurent,
    expand_laurent_cauchy,
    expand_laurent_poles,
    expand_taylor,
    expand_taylor_laurent_cauchy,
    expand_taylor_laurent_poles,
    laurent_remainder_exact,
    parse_function,
    principal_part_subtract,
)

S2 = PointSet.from_points([1, -1])
PURE = parse_function("1/((z-1)*(z+1))")
MIXED = parse_function("exp(z) + 1/(z-1)")


def tensor_max(t):
    return max((abs(v) for block in t for row in block for v in row), default=0.0)


def tensor_diff(ta, tb):
    return max(
        abs(a - b)
        for ba, bb in zip(ta, tb)
        for ra, rb in zip(ba, bb)
        for a, b in zip(ra, rb)
    )


def test_pure_pole_blocks():
    E = expand_laurent_poles(PURE, S2, 3)
    assert abs(E.b[0][0][0] - 1.0) < 1e-13
    assert abs(E.b[0][1][0] - 1.0) < 1e-13
    assert tensor_max(E.a) < 1e-13
    assert tensor_max(E.b[1:]) < 1e-13


def test_pure_pole_series_terminates():
    E = expand_laurent_poles(PURE, S2, 1)
    for z in (0.4, 2.0 + 1j, -0.3 + 0.8j):
        assert abs(eval_laurent(E, z) - PURE.eval(z)) < 1e-13


def test_cauchy_matches_pole_method():
    gamma1, gamma2 = default_contour(S2, PURE, "annulus-pair")
    Ec = expand_laurent_cauchy(PURE, S2, 3, gamma1, gamma2)
    Ep = expand_laurent_poles(PURE, S2, 3)
    assert tensor_diff(Ec.a, Ep.a) < 1e-10
    assert tensor_diff(Ec.b, Ep.b) < 1e-10


def test_mixed_function_splits_into_pole_and_taylor_parts():
    E = expand_laurent_poles(MIXED, S2, 3)
    # the pole at 1 shows up only in the first negative block
    assert abs(E.b[0][0][0] - 2.0) < 1e-13
    assert abs(E.b[0][1][0]) < 1e-13
    assert tensor_max(E.b[1:]) < 1e-13
    # positive-power blocks match the plain expansion of the entire part
    Et = expand_taylor(parse_function("exp(z)"), S2, 3)
    assert tensor_diff(E.a, Et.a) < 1e-12


def test_analytic_function_has_no_negative_part():
    f = parse_function("exp(z)")
    gamma1 = Contour.circle(0.0, 3.0)
    gamma2 = Contour.circle(0.0, 1.5)
    E = expand_laurent_cauchy(f, S2, 3, gamma1, gamma2)
    assert tensor_max(E.b) < 1e-12
    Et = expand_taylor(f, S2, 3)
    assert tensor_diff(E.a, Et.a) < 1e-11


def test_linearity_of_tensors():
    fa = PURE
    fb = parse_function("exp(z)")
    combo = parse_function("3*(1/((z-1)*(z+1))) - 2*exp(z)")
    profile = PoleProfile((1, 1))
    Ea = expand_laurent_poles(fa, S2, 3, profile)
    Eb = expand_laurent_poles(fb, S2, 3, PoleProfile((0, 0)))
    Ec = expand_laurent_poles(combo, S2, 3, profile)
    for n in range(3):
        for j in range(2):
            for l in range(1):
                assert abs(Ec.a[n][j][l] - (3 * Ea.a[n][j][l] - 2 * Eb.a[n][j][l])) < 1e-11
                assert abs(Ec.b[n][j][l] - (3 * Ea.b[n][j][l] - 2 * Eb.b[n][j][l])) < 1e-11


def test_laurent_remainder_identity():
    f = parse_function("1/((z-1)*(z+1)) + exp(z)")
    gamma1, gamma2 = default_contour(S2, f, "annulus-pair")
    E = expand_laurent_poles(f, S2, 4)
    rng = np.random.default_rng(5)
    count = 0
    while count < 10:
        z = complex(rng.uniform(-2.4, 2.4), rng.uniform(-2.4, 2.4))
        if not gamma1.contains(z) or gamma2.contains(z):
            continue
        r = laurent_remainder_exact(f, S2, 4, z, gamma1, gamma2)
        assert abs(f.eval(z) - eval_laurent(E, z) - r) < 1e-10
        count += 1


def test_remainder_vanishes_for_terminating_series():
    gamma1, gamma2 = default_contour(S2, PURE, "annulus-pair")
    r = laurent_remainder_exact(PURE, S2, 2, 2.2, gamma1, gamma2)
    assert abs(r) < 1e-12


def test_two_sided_decay_with_inner_singularity():
    # pole strictly inside the inner neighborhood but off the focus
    f = parse_function("1/(z - 0.05)")
    S = PointSet.from_points([0])
    gamma1 = Contour.circle(0.0, 2.0)
    gamma2 = Contour.circle(0.0, 0.15)
    z = 0.4
    rs = [abs(laurent_remainder_exact(f, S, N, z, gamma1, gamma2)) for N in range(3, 9)]
    ratios = [b / a for a, b in zip(rs, rs[1:])]
    fit = np.exp(np.mean(np.log(ratios)))
    # inner bound from the 0.1 disk: 0.1/0.4 = 0.25; true rate 0.05/0.4
    predicted = max(0.1 / abs(z), 0.0)
    assert predicted / 3 < fit < predicted * 3


def test_contour_independence_of_tensors():
    f = parse_function("1/((z-1)*(z+1)) + 1/(z-4)")
    tol = 1e-12
    variants = []
    for r1, r2 in ((3.0, 1.4), (3.5, 1.2)):
        E = expand_laurent_cauchy(
            f, S2, 2, Contour.circle(0.0, r1), Contour.circle(0.0, r2)
        )
        variants.append(E)
    assert tensor_diff(variants[0].a, variants[1].a) < 10 * tol
    assert tensor_diff(variants[0].b, variants[1].b) < 10 * tol


def test_pole_profile_validation():
    f = parse_function("1/((z-1)*(z+1)^2)")
    with pytest.raises(DomainError):
        expand_laurent_poles(f, S2, 2, PoleProfile((1, 1)))
    expand_laurent_poles(f, S2, 2, PoleProfile((1, 2)))


# --------------------------------------------------------------------------
# Taylor-Laurent


def test_taylor_laurent_captures_pole():
    f = parse_function("1/(z+1) + exp(z)")
    E = expand_taylor_laurent_poles(f, S2, 1, 3)
    assert abs(E.c[0][0][0] + 0.5) < 1e-13
    rng = np.random.default_rng(9)
    for _ in range(10):
        z = complex(rng.uniform(0.2, 1.6), rng.uniform(-0.8, 0.8))
        approx = eval_taylor_laurent(E, z)
        direct = f.eval(z)
        # truncation only; the identity test below pins the remainder
        assert abs(approx - direct) < 0.3


def test_taylor_laurent_dual_methods():
    f = parse_function("1/(z+1) + exp(z)")
    gamma1, gamma2 = default_contour(S2, f, "annulus-pair", split=1)
    Ec = expand_taylor_laurent_cauchy(f, S2, 1, 3, gamma1, gamma2)
    Ep = expand_taylor_laurent_poles(f, S2, 1, 3)
    assert tensor_diff(Ec.a, Ep.a) < 1e-10
    assert tensor_diff(Ec.b, Ep.b) < 1e-10
    assert tensor_diff(Ec.c, Ep.c) < 1e-10


def test_taylor_laurent_remainder_identity():
    f = parse_function("1/(z+1) + exp(z)")
    gamma1, gamma2 = default_contour(S2, f, "annulus-pair", split=1)
    E = expand_taylor_laurent_poles(f, S2, 1, 3)
    rng = np.random.default_rng(13)
    count = 0
    while count < 10:
        z = complex(rng.uniform(-0.2, 2.0), rng.uniform(-1.0, 1.0))
        if not gamma1.contains(z) or gamma2.contains(z) or abs(z - 1) < 0.05:
            continue
        r = laurent_remainder_exact(f, S2, 3, z, gamma1, gamma2, q=1)
        assert abs(f.eval(z) - eval_taylor_laurent(E, z) - r) < 1e-10
        count += 1


def test_taylor_laurent_analytic_degenerates():
    f = parse_function("exp(z)")
    gamma1 = Contour.circle(-1.0, 4.0)
    gamma2 = Contour.circle(-1.0, 0.5)
    E = expand_taylor_laurent_cauchy(f, S2, 1, 3, gamma1, gamma2)
    assert tensor_max(E.b) < 1e-12
    assert tensor_max(E.c) < 1e-12
    Et = expand_taylor(f, S2, 3)
    assert tensor_diff(E.a, Et.a) < 1e-11


def test_split_validation():
    f = parse_function("1/(z+1) + exp(z)")
    with pytest.raises(GeometryError):
        expand_taylor_laurent_poles(f, S2, 2, 3)  # split must be < p
    with pytest.raises(GeometryError):
        # pole sits on a focus declared regular by the split
        g = parse_function("1/(z-1) + exp(z)")
        expand_taylor_laurent_poles(g, S2, 1, 3)


# --------------------------------------------------------------------------
# principal part subtraction


def test_subtract_pure_pole_leaves_zero():
    g = principal_part_subtract(PURE, S2)
    for z in (0.5, 2.0j, -3.0, 1.7 + 0.4j):
        assert abs(g.eval(z)) < 1e-12


def test_subtract_recovers_entire_part():
    g = principal_part_subtract(MIXED, S2)
    for z in (0.5, 2.0j, -3.0, 1.7 + 0.4j):
        assert abs(g.eval(z) - np.exp(z)) < 1e-12


def test_subtract_analytic_function_is_identity():
    f = parse_function("exp(z)")
    g = principal_part_subtract(f, S2, PoleProfile((0, 0)))
    assert g.depth == 0
    for z in (0.5, 2.0j):
        assert abs(g.eval(z) - f.eval(z)) < 1e-14


def test_subtracted_function_expands_like_entire_part():
    # the leftover admits a plain expansion whose sum plus the removed
    # blocks reproduces the original function
    g = principal_part_subtract(MIXED, S2)
    E = expand_taylor(g, S2, 6)
    for z in (0.4, -0.5 + 0.3j, 1.3j):
        total = eval_expansion(E, z) + g.subtracted_sum(z)
        assert abs(total - MIXED.eval(z)) < 1e-6  # truncation of exp dominates
    # and against the exact entire part the agreement is tight
    Et = expand_taylor(parse_function("exp(z)"), S2, 6)
    for n in range(6):
        for j in range(2):
            assert abs(E.a[n][j][0] - Et.a[n][j][0]) < 1e-10


def test_insufficient_declared_order_detected():
    f = parse_function("1/((z-1)^2*(z+1))")
    shallow = f.with_singularities(
        [s if s.location != 1 else type(s)(1.0, "pole", 1) for s in f.singularities]
    )
    with pytest.raises(DomainError):
        principal_part_subtract(shallow, S2)
