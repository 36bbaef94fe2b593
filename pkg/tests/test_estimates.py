import math

import pytest

from ewfsim import estimates


def test_phase_linear_in_each_argument():
    base = estimates.accumulated_phase(1, 1, 1, 1)
    assert base == pytest.approx(1 / estimates.CODATA.hbar)
    assert estimates.accumulated_phase(2, 3, 5, 7) == pytest.approx(210 * base)


def test_zero_phase():
    assert estimates.accumulated_phase(0, 9.8, 0.1, 1) == 0.0


def test_custom_constants():
    c = estimates.PhysicalConstants(hbar=1.0, G=1.0)
    assert estimates.delta_g_for_pi(1, 1, 1, c) == pytest.approx(math.pi)
    assert estimates.gravitational_acceleration(2, 2, c) == pytest.approx(0.5)


@pytest.mark.parametrize("args", [(-1, 1, 1, 1), (1, 1, -1, 1), (1, 1, 1, -1), (1, float("nan"), 1, 1)])
def test_phase_rejects(args):
    with pytest.raises(ValueError):
        estimates.accumulated_phase(*args)


@pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, 0), (1, float("inf"), 1)])
def test_delta_g_rejects(args):
    with pytest.raises(ValueError):
        estimates.delta_g_for_pi(*args)


def test_acceleration_rejects():
    with pytest.raises(ValueError):
        estimates.gravitational_acceleration(1, 0)
    with pytest.raises(ValueError):
        estimates.gravitational_acceleration(-1, 1)


def test_worked_example_inputs():
    assert (estimates.CAT_MASS, estimates.CAT_SEPARATION, estimates.CAT_TIME) == (4.0, 0.1, 1.0)
