from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from gtdyn.pascal import (AbParams, PascalLevel, binomial_boundary_kernel, check_pascal_all, flow_6B,
                          generator_6A, generator_6B, hypergeometric_stationary, intertwining_residual,
                          link_matrix, pascal_link, rate_matrix_6A, rate_matrix_6B, simulate_batch,
                          simulate_path)

AB = AbParams(1.5, 2.5)


def test_params_and_level():
    with pytest.raises(ValueError):
        AbParams(0, 1)
    assert len(PascalLevel(4)) == 5
    assert list(PascalLevel(2).states) == [0, 1, 2]


def test_link_rows():
    k = pascal_link(3)
    assert k[1] == {1: Fraction(2, 3), 0: Fraction(1, 3)}
    assert k[0] == {0: 1}
    assert k[3] == {2: 1}
    with pytest.raises(ValueError):
        pascal_link(1)
    assert np.allclose(link_matrix(5).sum(axis=1), 1)


def test_generator_examples():
    F = {n: n * n for n in range(6)}
    assert generator_6A(5, AB, lambda n: 1.0, 2) == 0
    assert generator_6A(5, AB, F, 0) == pytest.approx(5 * AB.a * (F[1] - F[0]))
    assert generator_6B(5, 0.3, lambda n: 1.0, 4) == 0
    assert generator_6B(5, 0.0, F, 3) == pytest.approx(3 * (F[2] - F[3]))
    assert rate_matrix_6B(4, 0.0)[0, 1] == 0
    with pytest.raises(ValueError):
        generator_6B(5, 1.5, F, 0)


@pytest.mark.parametrize("N", range(2, 11))
def test_exact_intertwining(N):
    assert intertwining_residual(N, "6A", ab=AB) < 1e-12
    assert intertwining_residual(N, "6B", c=0.7) < 1e-12


def test_hypergeometric_law():
    assert hypergeometric_stationary(1, AbParams(1, 1)) == pytest.approx([0.5, 0.5])
    for N in range(1, 21):
        assert hypergeometric_stationary(N, AB).sum() == pytest.approx(1, abs=1e-12)
    for N in range(1, 11):
        M = hypergeometric_stationary(N, AB)
        assert np.abs(M @ rate_matrix_6A(N, AB)).max() < 1e-10
        if N >= 2:
            assert M @ link_matrix(N) == pytest.approx(hypergeometric_stationary(N - 1, AB), abs=1e-12)


def test_binomial_kernel():
    assert binomial_boundary_kernel(Fraction(1, 2), 2) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    assert binomial_boundary_kernel(0, 3) == [1, 0, 0, 0]
    for N in range(2, 11):
        for x in (0.1, 0.3, 0.5, 0.7, 0.9):
            pushed = np.array(binomial_boundary_kernel(x, N)) @ link_matrix(N)
            assert np.abs(pushed - binomial_boundary_kernel(x, N - 1)).max() < 1e-14


def test_binomial_stationary_for_model_b():
    for N in range(1, 11):
        assert np.abs(np.array(binomial_boundary_kernel(0.7, N)) @ rate_matrix_6B(N, 0.7)).max() < 1e-12


def test_flow():
    assert flow_6B(0.7, 0.2, 0.0) == 0.2
    assert flow_6B(0.7, 0.2, 50.0) == pytest.approx(0.7)
    assert flow_6B(0.7, 0.2, 1.0) == pytest.approx(0.5161, abs=1e-4)


def test_check_suite_passes():
    reports = check_pascal_all()
    assert len(reports) == 7
    assert all(r.passed for r in reports), [r.to_dict() for r in reports if not r.passed]


def test_simulate_path():
    tr = simulate_path(10, 5, 3.0, seed=2, c=0.4)
    assert all(0 <= n <= 10 for n in tr.states)
    assert tr.to_csv() == simulate_path(10, 5, 3.0, seed=2, c=0.4).to_csv()
    with pytest.raises(ValueError):
        simulate_path(10, 11, 1.0, seed=2, c=0.4)
    with pytest.raises(ValueError):
        simulate_path(10, 5, 1.0, seed=2, model="6A")


def test_simulate_path_absorbing_death_chain():
    tr = simulate_path(6, 0, 5.0, seed=1, c=0.0)
    assert tr.event_count == 0


def test_degenerate_limit():
    N = 200
    finals = simulate_batch(N, int(0.2 * N), 1.0, seed=21, runs=10_000, model="6B", c=0.7)
    assert finals.mean() / N == pytest.approx(flow_6B(0.7, 0.2, 1.0), abs=0.02)


@pytest.mark.slow
def test_model_a_beta_limit():
    N = 200
    finals = simulate_batch(N, N // 2, 2.0, seed=4, runs=10_000, model="6A", ab=AbParams(1, 1))
    ks = stats.kstest(finals / N, "uniform").statistic
    assert ks < 0.05
