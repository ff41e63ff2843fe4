import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemniscate import DomainError, Jet, parse_function
from lemniscate.jets import WindowError


def test_exp_jet():
    f = parse_function("exp(z)")
    jet = f.jet(0, 3)
    assert np.allclose(jet.coeffs, [1, 1, 0.5, 1 / 6], atol=1e-15)


def test_geometric_jet():
    f = parse_function("1/(3-z)")
    jet = f.jet(0, 2)
    assert np.allclose(jet.coeffs, [1 / 3, 1 / 9, 1 / 27], atol=1e-15)


def test_log_jet():
    f = parse_function("log(1+z)")
    jet = f.jet(0, 3)
    assert np.allclose(jet.coeffs, [0, 1, -0.5, 1 / 3], atol=1e-15)


FUNCS = ["exp(z)", "1/(3-z)", "log(4+z)", "z^5 - 2*z + 1", "sin(z)*cos(z)", "sqrt(4+z)"]
CENTERS = [0.0, 0.5, -0.25 + 0.4j, 1.2j]


def test_zeroth_coefficient_matches_eval():
    for text in FUNCS:
        f = parse_function(text)
        for c in CENTERS:
            jet = f.jet(c, 4)
            assert abs(jet.coeffs[0] - f.eval(c)) <= 1e-14 * (1 + abs(f.eval(c)))


def test_first_coefficient_matches_central_difference():
    rng = np.random.default_rng(42)
    h = 1e-5
    for text in FUNCS:
        f = parse_function(text)
        for _ in range(3):
            c = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
            d1 = f.jet(c, 2).coeffs[1]
            fd = (f.eval(c + h) - f.eval(c - h)) / (2 * h)
            assert abs(d1 - fd) <= 1e-6 * (1 + abs(d1))


def test_product_jet_is_cauchy_product():
    f = parse_function("exp(z)")
    g = parse_function("1/(3-z)")
    fg = parse_function("exp(z)/(3-z)")
    K = 6
    a = f.jet(0.2, K).coeffs
    b = g.jet(0.2, K).coeffs
    conv = np.convolve(a, b)[: K + 1]
    assert np.allclose(fg.jet(0.2, K).coeffs, conv, atol=1e-14)


coeff_lists = st.lists(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    min_size=3,
    max_size=8,
)


@given(coeff_lists, coeff_lists)
@settings(deadline=None)
def test_multiplication_matches_convolution(a, b):
    ja = Jet(0.0, a)
    jb = Jet(0.0, b)
    n = min(len(a), len(b))
    want = np.convolve(np.array(a), np.array(b))[:n]
    assert np.allclose((ja * jb).coeffs, want, atol=1e-9, rtol=1e-9)


@given(coeff_lists)
@settings(deadline=None)
def test_division_roundtrip(a):
    ja = Jet(0.0, a)
    jb = Jet(0.0, [1.5, -0.25, 0.125, 1.0])
    back = (ja * jb) / jb
    n = min(len(back.c), len(a))
    assert np.allclose(back.coeffs[:n], np.array(a)[:n], atol=1e-8, rtol=1e-8)


def test_exp_log_roundtrip():
    j = Jet(0.0, [2.0, 0.3, -0.1, 0.05, 0.2])
    back = j.log().exp()
    assert np.allclose(back.coeffs, j.coeffs, atol=1e-13)


def test_sqrt_squares_back():
    j = Jet(0.0, [4.0, 1.0, -0.2, 0.3])
    back = j.sqrt() ** 2
    assert np.allclose(back.coeffs, j.coeffs, atol=1e-13)


def test_integer_power_matches_repeated_multiplication():
    j = Jet(0.0, [1.0, 2.0, 0.5, -1.0, 0.25])
    assert np.allclose((j ** 3).coeffs, (j * j * j).coeffs, atol=1e-12)
    recip = j ** -2
    assert np.allclose((recip * j * j).coeffs, [1, 0, 0, 0, 0], atol=1e-12)


def test_laurent_jet_at_pole():
    f = parse_function("1/((z-1)*(z+1)^2)")
    jet = f.laurent_jet(1.0, 2)
    assert jet.val == -1
    # 1/((w-1)(w+1)^2) = t^-1 * (2+t)^-2 around w = 1
    assert abs(jet.coeff(-1) - 0.25) < 1e-14
    assert abs(jet.coeff(0) + 0.25) < 1e-14
    assert abs(jet.coeff(1) - 0.1875) < 1e-14


def test_double_pole_valuation():
    f = parse_function("1/((z-1)*(z+1)^2)")
    jet = f.laurent_jet(-1.0, 1)
    assert jet.val == -2
    # (w-1)^-1 at w = -1 is -(1/2)(1 + s/2 + ...)
    assert abs(jet.coeff(-2) + 0.5) < 1e-14
    assert abs(jet.coeff(-1) + 0.25) < 1e-14


def test_jet_refuses_pole_center():
    f = parse_function("1/(3-z)")
    with pytest.raises(DomainError):
        f.jet(3.0, 2)


def test_essential_singularity_rejected():
    f = parse_function("exp(1/z)")
    with pytest.raises(DomainError):
        f.laurent_jet(0.0, 3)


def test_log_branch_point_rejected():
    f = parse_function("log(z)")
    with pytest.raises(DomainError):
        f.jet(0.0, 2)


def test_window_error_on_overrun():
    j = Jet(0.0, [1.0, 2.0])
    with pytest.raises(WindowError):
        j.coeff(5)


def test_coefficients_read_only():
    j = Jet(0.0, [1.0, 2.0])
    with pytest.raises(ValueError):
        j.c[0] = 3.0
