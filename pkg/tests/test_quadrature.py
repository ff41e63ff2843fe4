import numpy as np
import pytest

from lemniscate import (
    CirclePiece,
    Contour,
    GeometryError,
    PointSet,
    cauchy_integral,
    default_contour,
    parse_function,
    validate_contour,
)

UNIT = Contour.circle(0.0, 1.0)


def test_residue_of_inverse():
    res = cauchy_integral(lambda w: 1.0 / w, UNIT)
    assert abs(res.value - 1.0) < 1e-14
    assert res.converged


def test_no_residue_for_inverse_square():
    res = cauchy_integral(lambda w: w ** -2.0, UNIT)
    assert abs(res.value) < 1e-14


def test_exp_over_cube():
    res = cauchy_integral(lambda w: np.exp(w) / w ** 3, UNIT)
    assert abs(res.value - 0.5) < 1e-14


def test_contour_independence():
    g = lambda w: np.exp(w) / w ** 2
    tol = 1e-12
    a = cauchy_integral(g, Contour.circle(0.0, 0.5), tol=tol)
    b = cauchy_integral(g, Contour.circle(0.0, 2.0), tol=tol)
    assert abs(a.value - b.value) < 10 * tol
    assert abs(a.value - 1.0) < 10 * tol


def test_spectral_error_decay():
    # pole at 1.3 gives a clean geometric staircase over the doublings
    history = []
    cauchy_integral(lambda w: 1.0 / (w - 1.3), UNIT, tol=1e-14, _history=history)
    meaningful = [
        (a, b) for a, b in zip(history, history[1:]) if a > 1e-13 and b > 0
    ]
    assert meaningful, "expected at least one resolvable doubling step"
    for a, b in meaningful:
        assert b <= a / 10.0 or b < 1e-13


def test_orientation_reversal_negates():
    g = lambda w: np.exp(w) / w
    forward = cauchy_integral(g, UNIT)
    backward = cauchy_integral(g, UNIT, _reverse=True)
    assert abs(forward.value + backward.value) < 1e-13


def test_nonconvergence_flagged():
    # pole glued to the contour trace; tiny node budget cannot resolve it
    g = lambda w: 1.0 / (w - 1.0000001)
    res = cauchy_integral(g, UNIT, tol=1e-14, max_nodes=64)
    assert not res.converged
    assert res.est_error > 0


def test_union_contour_sums_pieces():
    contour = Contour((CirclePiece(0.0, 0.5), CirclePiece(3.0, 0.5)), "per-focus-union")
    res = cauchy_integral(lambda w: 1.0 / w + 2.0 / (w - 3.0), contour)
    assert abs(res.value - 3.0) < 1e-13


def test_disjointness_enforced():
    with pytest.raises(GeometryError):
        Contour((CirclePiece(0.0, 1.0), CirclePiece(1.5, 1.0)), "per-focus-union")


def test_enclose_all_separates():
    S = PointSet.from_points([1, -1])
    f = parse_function("1/(3-z)")
    contour = default_contour(S, f, "enclose-all")
    (piece,) = contour.pieces
    assert abs(piece.center) < 1e-12
    assert 1.0 < piece.radius < 3.0


def test_enclose_all_entire_fallback():
    S = PointSet.from_points([0])
    contour = default_contour(S, parse_function("exp(z)"), "enclose-all")
    (piece,) = contour.pieces
    assert piece.radius == pytest.approx(1.0)


def test_per_focus_radii():
    S = PointSet.from_points([1, -1])
    contour = default_contour(S, parse_function("exp(z)"), "per-focus")
    assert len(contour.pieces) == 2
    for piece in contour.pieces:
        assert piece.radius == pytest.approx(0.8)


def test_per_focus_respects_singularities():
    S = PointSet.from_points([1, -1])
    contour = default_contour(S, parse_function("1/(z-1.5)"), "per-focus")
    for piece in contour.pieces:
        assert piece.radius == pytest.approx(0.2)


def test_geometry_error_when_singularity_at_focus():
    S = PointSet.from_points([1, -1])
    f = parse_function("1/(z-1)")
    with pytest.raises(GeometryError):
        default_contour(S, f, "enclose-all")


def test_geometry_error_when_singularity_too_close():
    S = PointSet.from_points([1, -1])
    f = parse_function("1/(z-0.5)")  # distance from centroid below focus spread
    with pytest.raises(GeometryError):
        default_contour(S, f, "enclose-all")


def test_branch_cut_crossing_rejected():
    f = parse_function("log(1 + z/4)")
    # circle reaching past the branch point crosses the outward cut
    with pytest.raises(GeometryError):
        validate_contour(f, Contour.circle(0.0, 5.0))
    validate_contour(f, Contour.circle(0.0, 2.0))


def test_annulus_pair_geometry():
    S = PointSet.from_points([1, -1])
    f = parse_function("1/((z-1)*(z+1)) + 1/(z-4)")
    gamma1, gamma2 = default_contour(S, f, "annulus-pair")
    assert gamma2.pieces[0].radius < gamma1.pieces[0].radius
    for z in S.foci:
        assert gamma2.contains(z)
    assert not gamma1.contains(4.0)
