import json

import pytest

from gtdyn.exceptions import NumericDomainError, WindowError
from gtdyn.links import link_row_float
from gtdyn.params import UvParams, ZwParams, shift_params
from gtdyn.verify import (BoxTruncation, VerificationReport, check_coherence, check_detailed_balance,
                          check_intertwine_generator, check_semigroup_mc, perturbed_link, window_mass)

ASYM_ZW = ZwParams.from_values(0.3, 0.3, 0.8, 0.8)


def test_box_truncation():
    box = BoxTruncation(2, 4, 3)
    assert len(box.states) == len(set(box.states)) == 9 * 8 // 2
    assert box.interior() == [(1, 0), (1, -1), (0, -1)]
    with pytest.raises(WindowError):
        BoxTruncation(2, 3, 3)


def test_report_pass_flag():
    assert VerificationReport("x", {}, 1e-10, 1e-9).passed
    assert not VerificationReport("x", {}, 2e-9, 1e-9).passed
    d = json.loads(VerificationReport("x", {"a": 1}, 0.0, 0.0).to_json())
    assert d["pass"] is True and d["check"] == "x"


def test_perturbed_link_changes_one_row():
    link = perturbed_link((2, 0))
    assert link((3, 0)) == link_row_float((3, 0))
    changed = dict(link((2, 0)))
    original = dict(link_row_float((2, 0)))
    assert sum(changed.values()) == pytest.approx(1)
    assert changed != pytest.approx(original)


@pytest.mark.parametrize("N", [2, 3])
def test_intertwine_passes(half_zw, complex_zw, N):
    for zw in (half_zw, complex_zw, ZwParams.from_values(1.4, 1.7, -0.6, -0.2)):
        report = check_intertwine_generator(zw, N, BoxTruncation(N, 12, 3))
        assert report.passed, report.to_dict()
        assert report.max_residual < 1e-9


def test_intertwine_negative_controls(half_zw):
    box = BoxTruncation(2, 12, 3)
    assert not check_intertwine_generator(half_zw, 2, box, link=perturbed_link((2, 0))).passed
    assert not check_intertwine_generator(half_zw, 2, box, upper_uv=shift_params(half_zw, 1)).passed


def test_intertwine_preconditions(half_zw):
    with pytest.raises(ValueError):
        check_intertwine_generator(half_zw, 1, BoxTruncation(1, 12, 3))
    with pytest.raises(WindowError):
        check_intertwine_generator(half_zw, 2, BoxTruncation(2, 12, 2))


def test_coherence_passes(half_zw):
    report = check_coherence(half_zw, 2, BoxTruncation(2, 25, 3))
    assert report.passed, report.to_dict()
    assert report.diagnostics["window_deficit"] < 1e-3


def test_coherence_swap_control():
    box = BoxTruncation(2, 25, 3)
    assert check_coherence(ASYM_ZW, 2, box).passed
    assert not check_coherence(ASYM_ZW, 2, box, upper_zw=ASYM_ZW.swapped()).passed


def test_coherence_domain():
    with pytest.raises(NumericDomainError):
        check_coherence(ZwParams.from_values(-0.6, -0.6, -0.4, -0.4), 2, BoxTruncation(2, 10, 3))


def test_window_mass_monotone(half_zw):
    masses = [window_mass(half_zw, 2, L, ref_bound=60) for L in (10, 15, 20, 25)]
    assert masses == sorted(masses)
    assert 0.99 < masses[-1] < 1


def test_detailed_balance_checks(half_uv):
    assert check_detailed_balance(half_uv, 1, 2000, seed=1).passed
    conj = UvParams.from_values(2 + 1j, 2 - 1j, 0.5 + 0.5j, 0.5 - 0.5j)
    assert check_detailed_balance(conj, 3, 2000, seed=2).passed
    bad = UvParams.from_values(0.5, 0.6, 0.5, 0.5)
    assert not check_detailed_balance(half_uv, 2, 2000, seed=3, measure_uv=bad).passed


def test_semigroup_zero_time_exact(half_zw):
    report = check_semigroup_mc(half_zw, 2, (2, 0), 0.0, 1000, seed=5)
    assert report.max_residual == 0.0
    assert report.passed


def test_semigroup_mc(half_zw):
    report = check_semigroup_mc(half_zw, 2, (2, 0), 0.1, 100_000, seed=5)
    assert report.passed, report.to_dict()


def test_semigroup_mc_perturbed_generator(half_zw):
    report = check_semigroup_mc(half_zw, 2, (2, 0), 0.1, 100_000, seed=5, upper_rate_scale=2.0)
    assert not report.passed, report.to_dict()


def test_semigroup_mc_deterministic(half_zw):
    a = check_semigroup_mc(half_zw, 2, (2, 0), 0.1, 5000, seed=8)
    b = check_semigroup_mc(half_zw, 2, (2, 0), 0.1, 5000, seed=8)
    assert a.to_dict() == b.to_dict()
