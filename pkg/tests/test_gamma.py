import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtdyn.exceptions import NumericDomainError
from gtdyn.gamma import log_gamma_product, log_gamma_product_array


def test_real_arguments_match_mpmath():
    for x in (0.5, 1.5, 3.25, 17.0, 120.5):
        assert log_gamma_product(plus=[x]) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-14)


def test_negative_real_argument_product():
    # Γ(-0.5)Γ(-0.5) is positive although each factor is negative
    expected = 2 * float(mpmath.log(abs(mpmath.gamma(-0.5))))
    assert log_gamma_product(plus=[-0.5, -0.5]) == pytest.approx(expected, rel=1e-13)


@given(st.floats(-30, 30), st.floats(0.05, 30))
def test_conjugate_products_are_real(x, y):
    z = complex(x, y)
    got = log_gamma_product(minus=[z, z.conjugate()])
    expected = -2 * float(mpmath.re(mpmath.loggamma(mpmath.mpc(x, y))))
    assert got == pytest.approx(expected, rel=1e-10, abs=1e-9)


def test_pole_raises():
    with pytest.raises(NumericDomainError):
        log_gamma_product(plus=[-2.0])


def test_negative_product_raises():
    with pytest.raises(NumericDomainError):
        log_gamma_product(plus=[-0.5])


def test_array_form_matches_scalar():
    xs = np.array([0.5, 2.5, 7.5])
    arr = log_gamma_product_array(minus=[xs, xs + 1])
    assert arr == pytest.approx([log_gamma_product(minus=[x, x + 1]) for x in xs])
