import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtdyn.params import (AdmissiblePair, UvParams, ZwParams, check_admissible, measure_finite,
                          parse_number, parse_quadruple, shift_params, zw_from_mapping)


@pytest.mark.parametrize("a, b, expected", [
    (1j, -1j, True),
    (0.5, 0.5, True),
    (0.5, 1.5, False),
    (2, 0.5, False),
    (2.0, 2.0, False),
    (-0.3, -0.9, True),
    (1 + 2j, 1 + 2j, False),
    (1j, 0.5, False),
])
def test_check_admissible(a, b, expected):
    assert check_admissible(a, b) is expected


def test_conjugate_check_tolerates_rounding():
    a = complex(0.1 + 0.2, 1 / 3)
    b = complex(0.3, -(1 - 2 / 3))
    assert check_admissible(a, b)


def test_pair_rejects_inadmissible():
    with pytest.raises(ValueError):
        AdmissiblePair(0.5, 1.5)


def test_shift_examples():
    zw = ZwParams.from_values(0.5, 0.5, 0.5, 0.5)
    assert shift_params(zw, 1).as_tuple() == (0.5, 0.5, 0.5, 0.5)
    assert shift_params(zw, 3).as_tuple() == (2.5, 2.5, 0.5, 0.5)
    shifted = shift_params(ZwParams.from_values(1j, -1j, 0.5, 0.5), 2)
    assert shifted.as_tuple() == (1 + 1j, 1 - 1j, 0.5, 0.5)


def test_shift_rejects_level_zero():
    with pytest.raises(ValueError):
        shift_params(ZwParams.from_values(0.5, 0.5, 0.5, 0.5), 0)


def test_measure_finite_examples():
    uv = UvParams.from_values(0.5, 0.5, 0.5, 0.5)
    assert uv.sum_real == 2.0
    assert measure_finite(uv, 1)
    assert measure_finite(uv, 2)
    assert not measure_finite(uv, 3)


def test_parsing():
    assert parse_number("1+2i") == 1 + 2j
    assert parse_number({"re": 0.5, "im": -1}) == 0.5 - 1j
    assert parse_quadruple("0.5, 0.5,1j,-1j") == (0.5, 0.5, 1j, -1j)
    with pytest.raises(ValueError):
        parse_quadruple("1,2,3")
    zw = zw_from_mapping({"z": 0.5, "z'": 0.5, "w": {"re": 0, "im": 1}, "wp": {"re": 0, "im": -1}})
    assert zw.as_tuple() == (0.5, 0.5, 1j, -1j)
    with pytest.raises(ValueError):
        zw_from_mapping({"z": 0.5})


def test_swapped():
    zw = ZwParams.from_values(0.3, 0.3, 0.8, 0.8)
    assert zw.swapped().as_tuple() == (0.8, 0.8, 0.3, 0.3)


real_pairs = st.tuples(st.integers(-20, 20), st.floats(0.01, 0.99), st.floats(0.01, 0.99)).map(
    lambda t: (t[0] + t[1], t[0] + t[2]))
complex_pairs = st.tuples(st.floats(-20, 20), st.floats(0.01, 20)).map(
    lambda t: (complex(t[0], t[1]), complex(t[0], -t[1])))
pairs = st.one_of(real_pairs, complex_pairs)


@given(pairs)
def test_admissible_products_real_positive(pair):
    p = AdmissiblePair(*pair)
    for l in range(-100, 101):
        value = (p.a - l) * (p.b - l)
        assert abs(value.imag) <= 1e-12 * max(1.0, abs(value))
        assert value.real > 0


@given(pairs, pairs)
def test_shift_stays_admissible(zz, ww):
    zw = ZwParams.from_values(*zz, *ww)
    for N in range(1, 21):
        uv = shift_params(zw, N)
        assert check_admissible(*uv.uu.as_tuple())
        assert check_admissible(*uv.vv.as_tuple())


@given(pairs, pairs)
def test_measure_finite_monotone(uu, vv):
    uv = UvParams.from_values(*uu, *vv)
    flags = [measure_finite(uv, N) for N in range(1, 30)]
    assert flags == sorted(flags, reverse=True)
