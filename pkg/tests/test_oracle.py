import numpy as np
import pytest

from plasmonsr import EmitterParams, derive_scalars, steady_state_linear
from plasmonsr.oracle import (
    PUMP_MODELS,
    DegenerateKernelError,
    DensityState,
    Generator,
    SystemSpec,
    build_generator,
    compare_with_adiabatic,
    evolve,
    extract_moments,
    steady_state,
)


def random_state(dims, seed=0):
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityState(rho / np.trace(rho), tuple(dims))


def expect_rate(gen, rho, op):
    """d<X>/dt = Tr(X L(rho))."""
    drho = gen.apply(rho.matrix)
    X = op.toarray()
    return np.sum(drho * X.T), np.sum(rho.matrix * X.T)


@pytest.fixture(scope="module", params=PUMP_MODELS)
def uncoupled(request):
    p = EmitterParams.dimensionless(1.5, 0.3, 0.7)
    spec = SystemSpec((p, p), (0.0, 0.0), kappa=2.0, n_max=2, pump_model=request.param)
    return p, spec, build_generator(spec)


def test_spec_validation():
    p = EmitterParams.dimensionless(1.0, 0.1)
    for kw in (dict(kappa=0.0), dict(n_max=0), dict(pump_model="other"), dict(rabi=(np.nan, 1))):
        args = dict(emitters=(p, p), rabi=(1.0, 1.0), kappa=10.0)
        args.update(kw)
        with pytest.raises(ValueError):
            SystemSpec(**args)
    with pytest.raises(ValueError):
        build_generator(SystemSpec((p, p), (1.0, 1.0), 10.0, n_max=9))
    spec = SystemSpec.from_ratio(p, 0.25, 0.05)
    assert spec.kappa == pytest.approx(100.0)
    assert spec.gammas == pytest.approx((0.25, 0.25))


def test_trace_preservation(uncoupled):
    _, spec, gen = uncoupled
    rho = random_state(spec.dims)
    assert abs(np.trace(gen.apply(rho.matrix))) < 1e-12


def test_mean_value_equations(uncoupled):
    p, spec, gen = uncoupled
    rho = random_state(spec.dims, 1)
    ops = gen.ops
    s = derive_scalars(p)
    rate, val = expect_rate(gen, rho, ops["a"])
    assert rate == pytest.approx(-spec.kappa * val, abs=1e-12)
    extra = 0.5 * p.pump_rate if spec.pump_model == "ground_and_lower" else 0.0
    rate, val = expect_rate(gen, rho, ops["sigma1"])
    assert rate == pytest.approx(-(s.Gamma + extra) * val, abs=1e-12)
    na, _ = expect_rate(gen, rho, ops["na1"])
    nb, _ = expect_rate(gen, rho, ops["nb1"])
    va = np.sum(rho.matrix * ops["na1"].toarray().T)
    vb = np.sum(rho.matrix * ops["nb1"].toarray().T)
    if spec.pump_model == "ground_only":
        assert na == pytest.approx(p.pump_rate * (1 - va - vb) - va / p.tau_a, abs=1e-12)
        assert nb == pytest.approx(-vb / p.tau_b, abs=1e-12)
    else:
        assert na == pytest.approx(p.pump_rate * (1 - va) - va / p.tau_a, abs=1e-12)
        assert nb == pytest.approx(-vb / p.tau_b - p.pump_rate * vb, abs=1e-12)


def test_uncoupled_steady_state_is_product(uncoupled):
    p, spec, gen = uncoupled
    rho = steady_state(gen)
    m = extract_moments(rho, gen)
    d0 = derive_scalars(p).Delta0
    assert m.na == pytest.approx((d0, d0), abs=1e-12)
    assert m.nb == pytest.approx((0.0, 0.0), abs=1e-12)
    assert m.d12 == pytest.approx(m.d1 * m.d2, abs=1e-12)
    assert m.sigma == pytest.approx(0.0, abs=1e-12)
    assert m.n == pytest.approx(0.0, abs=1e-12)


def test_vacuum_without_pump():
    p = EmitterParams.dimensionless(0.0, 0.2)
    gen = build_generator(SystemSpec((p, p), (0.0, 0.0), 5.0, n_max=2))
    vac = DensityState.vacuum(gen.spec.dims)
    assert np.max(np.abs(gen.apply(vac.matrix))) == 0.0
    rho = steady_state(gen)
    assert np.max(np.abs(rho.matrix - vac.matrix)) < 1e-12
    m = extract_moments(vac, gen)
    assert (m.d1, m.d2, m.d12, m.sigma, m.n) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_degenerate_kernel_reported():
    p = EmitterParams.dimensionless(1.0, 0.2)
    spec = SystemSpec((p, p), (0.0, 0.0), 5.0, n_max=1)
    d = spec.hilbert_dim
    z = np.zeros((d * d, d * d), dtype=complex)
    import scipy.sparse as sp
    gen = Generator(z, sp.csr_matrix(z), spec, {})
    with pytest.raises(DegenerateKernelError):
        steady_state(gen)


@pytest.fixture(scope="module", params=PUMP_MODELS)
def driven(request):
    p = EmitterParams.dimensionless(1.0, 0.1, 0.5)
    spec = SystemSpec.from_ratio(p, 0.25, 0.1, n_max=3, pump_model=request.param)
    gen = build_generator(spec)
    return spec, gen, steady_state(gen)


def test_state_health(driven):
    spec, gen, rho = driven
    assert rho.health(1e-10) == []
    ev = rho.eigenvalues()
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
    res = np.max(np.abs(gen.sparse @ rho.matrix.reshape(-1)))
    assert res <= 1e-10 * np.abs(gen.matrix).max()


def test_permutation_symmetry(driven):
    _, gen, rho = driven
    a = extract_moments(rho, gen)
    b = extract_moments(rho.swapped(), gen)
    for x, y in [(a.d1, b.d2), (a.d2, b.d1), (a.d12, b.d12), (a.sigma, b.sigma), (a.n, b.n)]:
        assert x == pytest.approx(y, abs=1e-12)
    assert a.d1 == pytest.approx(a.d2, abs=1e-12)


def test_coherence_is_real(driven):
    _, gen, rho = driven
    m = extract_moments(rho, gen)
    assert abs(m.s12.imag) < 1e-8
    assert m.sigma > 0


def test_evolve_from_steady_state_is_constant(driven):
    _, gen, rho = driven
    traj = evolve(rho, gen, 5.0, n_samples=6)
    for s in traj.states:
        assert np.max(np.abs(s.matrix - rho.matrix)) < 1e-9


def test_evolve_single_emitter_rise():
    p = EmitterParams.dimensionless(2.0, 0.3)
    gen = build_generator(SystemSpec((p, p), (0.0, 0.0), 3.0, n_max=1))
    traj = evolve(DensityState.vacuum(gen.spec.dims), gen, 4.0, n_samples=41)
    na = np.array([extract_moments(s, gen).na[0] for s in traj.states])
    rate = p.pump_rate + 1.0 / p.tau_a
    expected = derive_scalars(p).Delta0 * (1 - np.exp(-rate * traj.t))
    assert np.max(np.abs(na - expected)) < 1e-9
    assert np.all(np.diff(na) > 0)
    assert all(abs(s.trace - 1) < 1e-9 for s in traj.states)


def test_evolve_rejects_invalid_state():
    p = EmitterParams.dimensionless(2.0, 0.3)
    gen = build_generator(SystemSpec((p, p), (0.0, 0.0), 3.0, n_max=1))
    bad = DensityState(2 * DensityState.vacuum(gen.spec.dims).matrix, gen.spec.dims)
    with pytest.raises(ValueError):
        evolve(bad, gen, 1.0)


@pytest.mark.parametrize("model", PUMP_MODELS)
def test_uncoupled_comparison_exact(model):
    p = EmitterParams.dimensionless(1.0, 0.1)
    c = compare_with_adiabatic(SystemSpec((p, p), (0.0, 0.0), 100.0, n_max=2, pump_model=model))
    assert c.discrepancy < 1e-12


def test_strong_coupling_flagged():
    p = EmitterParams.dimensionless(1.0, 0.1)
    c = compare_with_adiabatic(SystemSpec.from_ratio(p, 0.25, 0.5, n_max=3))
    assert "weak_coupling" in [d.code for d in c.diagnostics]
    assert not c.regime_ok


def test_comparison_requires_symmetric_resonant():
    p = EmitterParams.dimensionless(1.0, 0.1)
    q = EmitterParams.dimensionless(2.0, 0.1)
    with pytest.raises(ValueError):
        compare_with_adiabatic(SystemSpec((p, q), (1.0, 1.0), 100.0, n_max=1))
    r = EmitterParams.dimensionless(1.0, 0.1, detuning=0.2)
    with pytest.raises(ValueError):
        compare_with_adiabatic(SystemSpec((r, r), (1.0, 1.0), 100.0, n_max=1))


def test_detuned_oracle_runs():
    p = EmitterParams.dimensionless(1.0, 0.1, detuning=0.5)
    gen = build_generator(SystemSpec.from_ratio(p, 0.25, 0.1, n_max=2))
    assert steady_state(gen).health() == []


@pytest.mark.slow
def test_weak_coupling_close_to_moments():
    p = EmitterParams.dimensionless(1.0, 0.1)
    c = compare_with_adiabatic(SystemSpec.from_ratio(p, 0.25, 0.02, n_max=3))
    ad = steady_state_linear(p, 0.25, 0.25)
    assert c.oracle.d1 == pytest.approx(ad.d1, rel=0.05)
    assert c.cutoff_ok
