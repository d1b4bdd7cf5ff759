import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtdyn.bdp1 import Bdp1Chain, dougall_rhs, log_dougall_rhs
from gtdyn.exceptions import MissingValueError, NumericDomainError
from gtdyn.params import UvParams


def mp_log_weight(uv, l):
    u, up, v, vp = (mpmath.mpc(x) for x in uv.as_tuple())
    w = 1 / (mpmath.gamma(u + 1 - l) * mpmath.gamma(up + 1 - l) * mpmath.gamma(v + 1 + l) * mpmath.gamma(vp + 1 + l))
    return float(mpmath.log(mpmath.re(w)))


@pytest.fixture
def chain(half_uv):
    return Bdp1Chain(half_uv)


@pytest.fixture
def conj_chain():
    return Bdp1Chain(UvParams.from_values(1j, -1j, 1j, -1j))


def test_rates(chain, conj_chain):
    assert chain.rate_up(0) == 0.25
    assert chain.rate_up(1) == 0.25
    assert chain.rate_down(0) == 0.25
    assert conj_chain.rate_up(3) == pytest.approx(10)
    assert conj_chain.rate_down(-3) == pytest.approx(10)


def test_reflection_swaps_rates():
    uv = UvParams.from_values(2.3, 2.6, 0.1 + 1j, 0.1 - 1j)
    a, b = Bdp1Chain(uv), Bdp1Chain(uv.swapped())
    for l in range(-8, 9):
        assert b.rate_down(-l) == pytest.approx(a.rate_up(l))


def test_generator_examples(chain):
    assert chain.generator_apply(lambda l: 1.0, 7) == 0
    assert chain.generator_apply(lambda l: float(l == 0), 0) == -0.5
    assert chain.generator_apply(float, 0) == 0


def test_generator_missing_value(chain):
    with pytest.raises(MissingValueError):
        chain.generator_apply({0: 1.0, 1: 2.0}, 0)


def test_log_weight_value(chain, half_uv):
    expected = -4 * float(mpmath.loggamma(1.5))
    assert chain.log_weight(0) == pytest.approx(expected, rel=1e-13)
    assert chain.log_weight(0) == pytest.approx(0.483129, abs=1e-6)
    assert chain.log_weight(5) == pytest.approx(mp_log_weight(half_uv, 5), rel=1e-12)


def test_log_weight_complex_against_mpmath():
    uv = UvParams.from_values(1.2 + 0.7j, 1.2 - 0.7j, 0.4, 0.9)
    ch = Bdp1Chain(uv)
    for l in (-12, -3, 0, 4, 15):
        assert ch.log_weight(l) == pytest.approx(mp_log_weight(uv, l), rel=1e-11, abs=1e-11)


def test_weight_reflection():
    uv = UvParams.from_values(2.3, 2.6, 0.1 + 1j, 0.1 - 1j)
    a, b = Bdp1Chain(uv), Bdp1Chain(uv.swapped())
    for l in range(-10, 11):
        assert a.log_weight(l) == pytest.approx(b.log_weight(-l), abs=1e-10)


def test_vectorized_weights_match(chain):
    ls = np.arange(-20, 21)
    assert chain.log_weights(ls) == pytest.approx([chain.log_weight(int(l)) for l in ls], abs=1e-12)


def test_dougall_closed_form(half_uv):
    assert dougall_rhs(half_uv) == pytest.approx(2.0, rel=1e-14)


def test_dougall_complex_positive():
    uv = UvParams.from_values(1j, -1j, 1j, -1j)
    u, up, v, vp = (mpmath.mpc(x) for x in uv.as_tuple())
    expected = mpmath.gamma(1) / (mpmath.gamma(u + v + 1) * mpmath.gamma(u + vp + 1)
                                  * mpmath.gamma(up + v + 1) * mpmath.gamma(up + vp + 1))
    assert dougall_rhs(uv) == pytest.approx(float(mpmath.re(expected)), rel=1e-12)
    # the sum decays like l^-2 here, so compare against a wide window with a tail allowance
    ls = np.arange(-4000, 4001)
    total = np.exp(Bdp1Chain(uv).log_weights(ls)).sum()
    assert total == pytest.approx(dougall_rhs(uv), rel=1e-3)


def test_dougall_window_large_sum():
    uv = UvParams.from_values(2.5, 2.7, 1.5, 1.2)
    total = np.exp(Bdp1Chain(uv).log_weights(np.arange(-40, 41))).sum()
    assert total == pytest.approx(dougall_rhs(uv), rel=1e-8)


def test_dougall_window_small_sum_has_visible_tail(chain):
    # with u+u'+v+v' = 2 the weights decay like l^-4 and the [-40, 40] window misses ~5e-7
    total = np.exp(chain.log_weights(np.arange(-40, 41))).sum()
    rel = abs(total / 2 - 1)
    assert 1e-7 < rel < 1e-6


def test_dougall_domain():
    with pytest.raises(NumericDomainError):
        log_dougall_rhs(UvParams.from_values(-0.5, -0.5, -0.5, -0.5))


def test_stationary_distribution(chain):
    dist = chain.stationary_distribution()
    assert dist[0] == pytest.approx(math.exp(-4 * math.lgamma(1.5)) / 2, rel=1e-13)
    assert dist[0] == pytest.approx(0.810569, abs=1e-6)
    assert sum(dist.values()) <= 1
    assert sum(dist.values()) == pytest.approx(1, abs=1e-6)
    for l in range(1, 30):
        assert dist[l] == pytest.approx(dist[-l], rel=1e-12)


def test_quadratic_growth(chain):
    for l in (1000, -1000):
        assert chain.rate_up(l) / l**2 == pytest.approx(1, rel=0.1)
        assert chain.rate_down(l) / l**2 == pytest.approx(1, rel=0.1)


def test_simulate_zero_time(chain):
    tr = chain.simulate(3, 0.0, seed=1)
    assert tr.events == [(0.0, 3)]
    assert tr.to_csv() == "time,state\n0.0,3\n"


def test_simulate_deterministic(chain):
    a = chain.simulate(0, 50.0, seed=11)
    b = chain.simulate(0, 50.0, seed=11)
    c = chain.simulate(0, 50.0, seed=12)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv() != c.to_csv()


def test_simulate_path_shape(chain):
    tr = chain.simulate(0, 200.0, seed=5)
    assert all(t1 < t2 for t1, t2 in zip(tr.times, tr.times[1:]))
    assert tr.times[-1] <= 200.0
    assert all(abs(a - b) == 1 for a, b in zip(tr.states, tr.states[1:]))
    assert sum(tr.occupation().values()) == pytest.approx(200.0)


def test_event_cap(chain):
    tr = chain.simulate(0, 1e6, seed=5, max_events=10)
    assert tr.truncated
    assert tr.event_count == 10


def test_long_run_occupation(chain):
    tr = chain.simulate(0, 1e5, seed=12)
    freq = tr.occupation_frequencies()
    dist = chain.stationary_distribution((-10, 10))
    tv = 0.5 * sum(abs(freq.get(l, 0.0) - p) for l, p in dist.items())
    assert tv < 0.02


admissible_real = st.tuples(st.integers(-3, 3), st.floats(0.02, 0.98), st.floats(0.02, 0.98)).map(
    lambda t: (t[0] + t[1], t[0] + t[2]))
admissible_conj = st.tuples(st.floats(-3, 3), st.floats(0.05, 3)).map(
    lambda t: (complex(t[0], t[1]), complex(t[0], -t[1])))
pairs = st.one_of(admissible_real, admissible_conj)


@given(pairs, pairs)
def test_detailed_balance_property(uu, vv):
    ch = Bdp1Chain(UvParams.from_values(*uu, *vv))
    for l in range(-50, 51):
        lhs = ch.log_weight(l) + math.log(ch.rate_up(l))
        rhs = ch.log_weight(l + 1) + math.log(ch.rate_down(l + 1))
        assert abs(lhs - rhs) < 1e-9


@given(pairs, pairs, st.integers(-60, 60), st.floats(-5, 5))
def test_generator_kills_constants(uu, vv, l, c):
    assert Bdp1Chain(UvParams.from_values(*uu, *vv)).generator_apply(lambda _: c, l) == 0


@settings(max_examples=40)
@given(pairs, pairs)
def test_dougall_window_property(uu, vv):
    uv = UvParams.from_values(*uu, *vv)
    if uv.sum_real < 8:
        uv = UvParams(uv.uu.shifted(math.ceil((8 - uv.sum_real) / 2)), uv.vv)
    total = np.exp(Bdp1Chain(uv).log_weights(np.arange(-40, 41))).sum()
    assert total == pytest.approx(dougall_rhs(uv), rel=1e-8)
