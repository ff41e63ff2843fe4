import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from lemniscate import (
    PointSet,
    RegionSpec,
    annulus_radii,
    boundary_sample,
    contains,
    dqp_parameters,
    eval_expansion,
    expand_taylor,
    lemniscate_radius,
    parse_function,
)

S2 = PointSet.from_points([1, -1])


def test_radius_closed_forms():
    assert lemniscate_radius(S2, [3.0]) == pytest.approx(8.0)
    S = PointSet.from_points([(0, 2)])
    assert lemniscate_radius(S, [2.0]) == pytest.approx(4.0)
    assert lemniscate_radius(S2, []) == math.inf


def test_radius_zero_when_singularity_on_focus():
    with pytest.warns(UserWarning):
        assert lemniscate_radius(S2, [1.0]) == 0.0


def _dense_circle_extremum(S, center, radius, fun, minimize, samples=10_000):
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = [fun(center + radius * np.exp(1j * t)) for t in theta]
    return min(vals) if minimize else max(vals)


def test_annulus_inner_bound_matches_dense_sampling():
    f = parse_function("1/((z-1)*(z+1))")
    delta = 0.1
    r1, r2 = annulus_radii(S2, f.singularities, delta)
    assert r1 == math.inf
    oracle = max(
        _dense_circle_extremum(S2, z, delta, lambda w: float(S2.abs_product(w)), False)
        for z in S2.foci
    )
    assert r2 == pytest.approx(oracle, rel=1e-6)
    assert r2 == pytest.approx(0.21, rel=1e-2)


def test_annulus_inner_bound_shrinks_with_delta():
    f = parse_function("1/((z-1)*(z+1))")
    _, r2a = annulus_radii(S2, f.singularities, 0.1)
    _, r2b = annulus_radii(S2, f.singularities, 0.01)
    assert r2b < r2a
    assert r2b == pytest.approx(0.02, rel=2e-2)


def test_annulus_outer_bound_from_exterior_pole():
    f = parse_function("1/((z-1)*(z+1)) + 1/(z-3)")
    r1, _ = annulus_radii(S2, f.singularities, 0.1)
    assert r1 == pytest.approx(8.0)


def test_dqp_parameters_match_dense_sampling():
    f = parse_function("1/(z+1) + exp(z)")
    r1, r2 = dqp_parameters(S2, 1, f.singularities, 0.1)
    assert r1 == math.inf
    oracle = _dense_circle_extremum(
        S2, -1.0, 0.1, lambda w: abs(w - 1) / abs(w + 1), True
    )
    assert r2 == pytest.approx(oracle, rel=1e-6)
    assert r2 == pytest.approx(19.0, rel=1e-2)


def test_dqp_membership_inequality():
    f = parse_function("1/(z+1) + exp(z)")
    r1, r2 = dqp_parameters(S2, 1, f.singularities, 0.1)
    R = RegionSpec("taylor-laurent", S2, r1=r1, r2=r2, split=1, delta=0.1)
    assert contains(R, 0.0)  # |0-1| = 1 < r2 * |0+1|
    assert not contains(R, -1.001)


def test_contains_strict_on_boundary():
    R = RegionSpec("lemniscate", S2, r=8.0)
    assert contains(R, 0.0)
    assert not contains(R, 3.0)  # product exactly 8, strict inequality


def test_annulus_contains():
    A = RegionSpec("annulus", S2, r1=8.0, r2=0.5)
    assert contains(A, 0.0)  # product 1 strictly between
    assert not contains(A, 1.1)  # product 0.21 below the inner bound
    assert not contains(A, 3.0)  # product 8 not strictly below


def test_empty_annulus_flagged():
    with pytest.warns(UserWarning):
        RegionSpec("annulus", S2, r1=1.0, r2=2.0)


def test_unit_circle_boundary():
    R = RegionSpec("lemniscate", PointSet.from_points([0]), r=1.0)
    lines = boundary_sample(R, 128)
    assert len(lines) == 1
    radii = np.hypot(lines[0][:, 0], lines[0][:, 1])
    assert np.max(np.abs(radii - 1.0)) < 2 * np.pi / 128


def _flood_fill_components(R, box, resolution=256):
    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    X, Y = np.meshgrid(xs, ys)
    inside = R.points.abs_product(X + 1j * Y) < R.r
    _, count = ndimage.label(inside)
    return count


@pytest.mark.parametrize("r,expected", [(0.3, 2), (0.5, 2), (0.7, 2), (0.85, 2), (0.95, 2),
                                        (1.05, 1), (1.2, 1), (1.5, 1), (2.0, 1), (3.0, 1)])
def test_cassini_component_sweep(r, expected):
    R = RegionSpec("lemniscate", S2, r=r)
    lines = boundary_sample(R, 512)
    assert len(lines) == expected
    assert _flood_fill_components(R, (-3, 3, -3, 3)) == expected
    for line in lines:
        products = S2.abs_product(line[:, 0] + 1j * line[:, 1])
        assert np.max(np.abs(products - r)) <= 0.05 * r


def test_vertex_refinement_is_tight():
    R = RegionSpec("lemniscate", S2, r=2.0)
    for line in boundary_sample(R, 64):
        products = S2.abs_product(line[:, 0] + 1j * line[:, 1])
        assert np.max(np.abs(products - 2.0)) < 1e-9


def test_resolution_floor():
    R = RegionSpec("lemniscate", S2, r=1.0)
    with pytest.raises(ValueError):
        boundary_sample(R, 4)


@given(
    st.floats(min_value=0.1, max_value=5.0),
    st.floats(min_value=1.01, max_value=3.0),
    st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
)
@settings(deadline=None, max_examples=100)
def test_membership_monotone_in_radius(r, factor, z):
    small = RegionSpec("lemniscate", S2, r=r)
    large = RegionSpec("lemniscate", S2, r=r * factor)
    if contains(small, z):
        assert contains(large, z)


def test_membership_predicts_convergence():
    f = parse_function("1/(3-z)")
    R = RegionSpec("lemniscate", S2, r=lemniscate_radius(S2, [3.0]))
    inside = 0.0  # product 1, margin far above 20 percent
    outside = 3.4  # product 10.56 > 1.2 * 8
    tails_in = []
    tails_out = []
    for N in range(2, 11):
        E = expand_taylor(f, S2, N)
        tails_in.append(abs(f.eval(inside) - eval_expansion(E, inside)))
        tails_out.append(abs(f.eval(outside) - eval_expansion(E, outside)))
    assert contains(R, inside)
    assert all(b < a for a, b in zip(tails_in, tails_in[1:]))
    assert not contains(R, outside)
    assert tails_out[-1] > tails_out[0]
