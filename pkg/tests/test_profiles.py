import math

import numpy as np
import pytest

from campaignctl.profiles import (
    Constant,
    Cosine,
    SigmoidDown,
    SigmoidUp,
    Tabulated,
    as_profile,
    sample,
)

# the time-varying scenarios share one parameter set
BETA1 = SigmoidUp(low=0.01, high=2.0, steepness=2.0, center=3.0)
BETA2 = SigmoidDown(low=0.01, high=2.0, steepness=2.0, center=2.0)
BETA3 = Cosine(mean=1.0, amplitude=1.0, period=5.0)


def test_constant():
    p = Constant(0.3)
    assert p.at(0.0) == 0.3
    assert p.at(123.4) == 0.3


def test_cosine_values():
    assert BETA3.at(0.0) == pytest.approx(2.0, abs=1e-15)
    assert BETA3.at(1.25) == pytest.approx(1.0, abs=1e-15)


def test_cosine_periodic():
    assert BETA3.at(0.0) == pytest.approx(BETA3.at(5.0), abs=1e-12)


def test_sigmoid_up_value():
    # hand evaluation: 0.01 + 1.99 / (1 + e^6)
    assert BETA1.at(0.0) == pytest.approx(0.014920520081703201, abs=1e-12)


def test_sigmoid_down_decays_to_zero():
    # the defining formula decays to 0, not to `low`
    assert BETA2.at(1e3) == pytest.approx(0.0, abs=1e-12)
    assert BETA2.at(1e9) == pytest.approx(0.0, abs=1e-12)


def test_sigmoid_monotonicity():
    t = np.linspace(-5.0, 10.0, 400)
    up = sample(BETA1, t)
    down = sample(BETA2, t)
    assert np.all(np.diff(up) >= 0.0)
    assert np.all(np.diff(down) <= 0.0)


@pytest.mark.parametrize("profile", [BETA1, BETA2, BETA3])
def test_bounded_on_horizon(profile):
    values = sample(profile, np.linspace(0.0, 5.0, 1001))
    assert np.all(values >= 0.0)
    assert np.all(values <= 2.01)


def test_table_interpolation():
    p = Tabulated(times=(0.0, 1.0, 3.0), values=(1.0, 2.0, 0.0))
    assert p.at(0.0) == 1.0
    assert p.at(1.0) == 2.0
    assert p.at(0.5) == pytest.approx(1.5)
    assert p.at(2.0) == pytest.approx(1.0)


def test_table_domain_error():
    p = Tabulated(times=(0.0, 1.0), values=(1.0, 1.0))
    with pytest.raises(ValueError, match="outside table domain"):
        p.at(1.5)
    with pytest.raises(ValueError, match="outside table domain"):
        p.at(-0.1)


def test_table_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        Tabulated(times=(0.0, 0.0, 1.0), values=(1.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="nonnegative"):
        Tabulated(times=(0.0, 1.0), values=(1.0, -1.0))
    with pytest.raises(ValueError):
        Tabulated(times=(0.0, 1.0, 2.0), values=(1.0, 1.0))


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        Constant(-0.1)
    with pytest.raises(ValueError):
        SigmoidUp(low=-0.01, high=2.0, steepness=2.0, center=3.0)
    with pytest.raises(ValueError):
        Cosine(mean=1.0, amplitude=1.5, period=5.0)  # would dip below zero
    with pytest.raises(ValueError):
        Cosine(mean=1.0, amplitude=1.0, period=0.0)


def test_sigmoid_no_overflow_far_from_center():
    # extreme arguments must not overflow the underlying exponential
    assert BETA1.at(-1e6) == pytest.approx(0.01, abs=1e-12)
    assert BETA1.at(1e6) == pytest.approx(2.0, abs=1e-12)


def test_as_profile():
    p = as_profile(0.1)
    assert isinstance(p, Constant) and p.rate == 0.1
    assert as_profile(BETA3) is BETA3
    with pytest.raises(TypeError):
        as_profile("fast")


def test_profiles_are_value_objects():
    assert Constant(1.0) == Constant(1.0)
    assert BETA1 == SigmoidUp(low=0.01, high=2.0, steepness=2.0, center=3.0)
    with pytest.raises(Exception):
        BETA1.low = 0.5  # frozen
