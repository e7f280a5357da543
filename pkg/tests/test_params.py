import math

import pytest
from hypothesis import given, strategies as st

from plasmonsr import (
    CouplingSpec,
    EmitterParams,
    derive_scalars,
    populations_from_inversion,
    validate_regime,
)
from plasmonsr.params import blockade_theta, inverse_tau_prime, pump_inversion

from conftest import dephasings, emitters, pumps, tb_ratios


def codes(diags):
    return [d.code for d in diags]


def test_reference_scalars(ref_point):
    s = derive_scalars(ref_point)
    assert s.Delta0 == pytest.approx(0.5)
    assert s.Gamma == pytest.approx(5.5)
    assert s.theta == pytest.approx(1.2)


def test_zero_pump_scalars():
    p = EmitterParams.dimensionless(0.0, 0.3)
    s = derive_scalars(p)
    assert s.Delta0 == 0.0
    assert 1.0 / s.tau_prime == pytest.approx(2.0 / 1.3)


def test_dephasing_b():
    p = EmitterParams.dimensionless(1.0, 0.1, 10.0)
    assert p.dephasing * p.tau_b == pytest.approx(1.0)
    assert derive_scalars(p).b == pytest.approx(3.1)


def test_x_is_twice_gamma_tau_b():
    p = EmitterParams.dimensionless(1.0, 0.2)
    assert derive_scalars(p, 0.5).x == pytest.approx(0.2)


def test_physical_units_match_normalized():
    p = EmitterParams(pump_rate=2e9, tau_b=1e-10, tau_a=1e-9, dephasing=5e9)
    q = p.normalized()
    assert q.tau_a == 1.0
    a, b = derive_scalars(p), derive_scalars(q)
    assert a.Delta0 == pytest.approx(b.Delta0)
    assert a.theta == pytest.approx(b.theta)
    assert a.b == pytest.approx(b.b)
    assert a.tau_prime / p.tau_a == pytest.approx(b.tau_prime)
    assert a.Gamma * p.tau_a == pytest.approx(b.Gamma)


@pytest.mark.parametrize("kw", [
    dict(pump_rate=-1.0, tau_b=0.1),
    dict(pump_rate=1.0, tau_b=0.0),
    dict(pump_rate=1.0, tau_b=0.1, tau_a=-1.0),
    dict(pump_rate=1.0, tau_b=0.1, dephasing=-0.1),
    dict(pump_rate=math.nan, tau_b=0.1),
    dict(pump_rate=1.0, tau_b=math.inf),
])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        EmitterParams(**kw)


def test_populations_examples():
    p = EmitterParams.dimensionless(0.0, 0.1)
    pop = populations_from_inversion(p, 0.0)
    assert (pop.n_a, pop.n_b) == (0.0, 0.0)
    p = EmitterParams.dimensionless(1.0, 0.1)
    pop = populations_from_inversion(p, 0.5)
    assert pop.n_a == pytest.approx(0.5)
    assert pop.n_b == pytest.approx(0.0, abs=1e-15)


@given(emitters(), st.floats(-1.0, 1.0))
def test_populations_self_consistent(p, delta):
    pop = populations_from_inversion(p, delta)
    assert pop.inversion == pytest.approx(delta, abs=1e-12 * max(1.0, p.pump_rate * p.tau_b))
    assert pop.s == pop.n_a + pop.n_b


@given(emitters())
def test_populations_nonnegative_at_pump_inversion(p):
    pop = populations_from_inversion(p, pump_inversion(p))
    slack = 1e-14 * max(1.0, p.pump_rate * p.tau_b)
    assert pop.n_a >= -slack and pop.n_b >= -slack


@given(emitters())
def test_scalar_invariants(p):
    s = derive_scalars(p)
    assert 0.0 <= s.Delta0 < 1.0
    assert s.theta >= 1.0
    assert s.tau_prime > 0.0
    assert s.Gamma * p.tau_a >= 0.5 + 0.5 * p.tau_a / p.tau_b - 1e-12
    assert s.theta - 1.0 - p.pump_rate * p.tau_b == pytest.approx(p.tau_b / p.tau_a)
    assert blockade_theta(p) == s.theta
    assert inverse_tau_prime(p) == pytest.approx(1.0 / s.tau_prime)


@given(tb_ratios, dephasings, pumps, pumps)
def test_delta0_monotone(tb, deph, g1, g2):
    lo, hi = sorted((g1, g2))
    a = derive_scalars(EmitterParams.dimensionless(lo, tb, deph)).Delta0
    b = derive_scalars(EmitterParams.dimensionless(hi, tb, deph)).Delta0
    assert a <= b
    if hi > lo * (1 + 1e-9):
        assert a < b


def test_coupling_from_rabi_exact():
    c = CouplingSpec.from_rabi(2.0, 3.0, 400.0)
    assert c.gammas == (4.0 / 400.0, 9.0 / 400.0)
    assert c.rabis() == (2.0, 3.0)
    with pytest.raises(ValueError):
        CouplingSpec(0.1, 0.1, 2.0, 2.0, 400.0)
    with pytest.raises(ValueError):
        CouplingSpec(0.1, 0.1, rabi_1=1.0)
    with pytest.raises(ValueError):
        CouplingSpec(-0.1, 0.1)


def test_regime_inversion_bound():
    p = EmitterParams.dimensionless(1.0, 0.1)
    diags = validate_regime(p, CouplingSpec.symmetric(15.0))
    assert codes(diags) == ["inversion_bound", "inversion_bound"]
    assert "inversion bound violated" in diags[0].message


def test_regime_clean_point(ref_point):
    c = CouplingSpec.from_rabi(1.0, 1.0, 1000.0)
    assert validate_regime(ref_point, c) == []


def test_regime_weak_coupling_and_adiabatic(ref_point):
    c = CouplingSpec.from_rabi(10.0, 10.0, 20.0)
    got = set(codes(validate_regime(ref_point, c)))
    assert {"weak_coupling", "adiabatic_gamma"} <= got


def test_regime_detuning():
    p = EmitterParams.dimensionless(1.0, 0.1, detuning=0.5)
    diags = validate_regime(p, CouplingSpec.symmetric(0.1))
    assert codes(diags) == ["detuning"]
    assert "zero detuning" in diags[0].message


def test_regime_threshold_configurable(ref_point):
    c = CouplingSpec.from_rabi(1.0, 1.0, 100.0)
    assert validate_regime(ref_point, c, threshold=10) == []
    assert "weak_coupling" in codes(validate_regime(ref_point, c, threshold=200))
    with pytest.raises(ValueError):
        validate_regime(ref_point, c, threshold=0)
