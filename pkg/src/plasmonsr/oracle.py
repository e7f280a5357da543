"""Brute-force master equation for two emitters and one lossy plasmon mode.

Each emitter has three levels ``{g, b, a}``: an incoherent pump ``g -> a``,
decays ``a -> g`` (``1/tau_a``) and ``b -> g`` (``1/tau_b``), pure dephasing
of the ``a-b`` coherence and coherent exchange ``s = |b><a|`` with the
plasmon. The plasmon is truncated at ``n_max`` quanta and damped so that
``d<a>/dt = -kappa <a>``.

Two pump models are available:

``"ground_only"``
    Pump from ``g`` only; gives ``Gamma_p (1 - n_a - n_b)`` in ``dn_a/dt``.
``"ground_and_lower"``
    Additional ``b -> a`` pump at the same rate; reproduces
    ``Gamma_p (1 - n_a)`` in ``dn_a/dt`` at the cost of a ``-Gamma_p n_b``
    loss in ``dn_b/dt`` and extra ``Gamma_p/2`` coherence damping.

Neither is singled out as exact; :func:`compare_with_adiabatic` reports
either against the moment equations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .moments import MomentState, plasmon_number_from_moments, steady_state_linear
from .params import CouplingSpec, Diagnostic, EmitterParams, validate_regime

__all__ = [
    "PUMP_MODELS",
    "MAX_FOCK",
    "SystemSpec",
    "Generator",
    "DensityState",
    "OracleMoments",
    "OracleTrajectory",
    "AdiabaticComparison",
    "DegenerateKernelError",
    "OracleIntegrationError",
    "build_generator",
    "steady_state",
    "evolve",
    "extract_moments",
    "compare_with_adiabatic",
]

PUMP_MODELS = ("ground_only", "ground_and_lower")
MAX_FOCK = 8
CUTOFF_TOL = 1e-8
_ABS_FLOOR = 1e-12

# single-emitter basis
G, B, A = 0, 1, 2


class DegenerateKernelError(np.linalg.LinAlgError):
    """Generator has no unique stationary state."""


class OracleIntegrationError(RuntimeError):
    pass


def _proj(i: int, j: int) -> np.ndarray:
    m = np.zeros((3, 3))
    m[i, j] = 1.0
    return m


@dataclass(frozen=True)
class SystemSpec:
    """Two emitters, their Rabi couplings and the plasmon mode."""

    emitters: tuple[EmitterParams, EmitterParams]
    rabi: tuple[float, float]
    kappa: float
    n_max: int = 4
    pump_model: str = "ground_only"

    def __post_init__(self):
        if len(self.emitters) != 2 or len(self.rabi) != 2:
            raise ValueError("exactly two emitters are supported")
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        for om in self.rabi:
            if not math.isfinite(om):
                raise ValueError("Rabi frequencies must be finite")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if self.pump_model not in PUMP_MODELS:
            raise ValueError(f"pump_model must be one of {PUMP_MODELS}, got {self.pump_model!r}")

    @classmethod
    def symmetric(cls, p: EmitterParams, gamma: float, kappa: float, **kw) -> "SystemSpec":
        """Equal coupling ``gamma`` realised with ``Omega = sqrt(gamma kappa)``."""
        om = math.sqrt(gamma * kappa)
        return cls((p, p), (om, om), kappa, **kw)

    @classmethod
    def from_ratio(cls, p: EmitterParams, gamma: float, rabi_over_kappa: float,
                   **kw) -> "SystemSpec":
        """Equal coupling ``gamma`` at a given ``Omega/kappa``; ``kappa = gamma/ratio**2``."""
        if not (gamma > 0 and rabi_over_kappa > 0):
            raise ValueError("gamma and rabi_over_kappa must be positive")
        kappa = gamma / rabi_over_kappa ** 2
        return cls((p, p), (rabi_over_kappa * kappa,) * 2, kappa, **kw)

    @property
    def gammas(self) -> tuple[float, float]:
        return tuple(om * om / self.kappa for om in self.rabi)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (3, 3, self.n_max + 1)

    @property
    def hilbert_dim(self) -> int:
        return 9 * (self.n_max + 1)


@dataclass(frozen=True)
class Generator:
    """Dense Liouvillian acting on row-major ``vec(rho)``."""

    matrix: np.ndarray
    sparse: sp.csr_matrix
    spec: SystemSpec
    ops: dict = field(repr=False)

    @property
    def hilbert_dim(self) -> int:
        return self.spec.hilbert_dim

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.hilbert_dim
        return (self.sparse @ np.asarray(rho).reshape(-1)).reshape(d, d)


@dataclass(frozen=True)
class DensityState:
    matrix: np.ndarray
    dims: tuple[int, int, int]

    @classmethod
    def vacuum(cls, dims: Sequence[int]) -> "DensityState":
        d = int(np.prod(dims))
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return cls(m, tuple(dims))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return np.linalg.eigvalsh(h)

    def health(self, tol: float = 1e-10) -> list[str]:
        """Violated state properties; empty when the state is valid."""
        problems = []
        if abs(self.trace - 1.0) > tol:
            problems.append(f"trace {self.trace:.3g} != 1")
        herr = self.hermiticity_error()
        if herr > tol:
            problems.append(f"not hermitian (max deviation {herr:.3g})")
        ev = self.eigenvalues()
        if ev[0] < -tol:
            problems.append(f"negative eigenvalue {ev[0]:.3g}")
        return problems

    def fock_populations(self) -> np.ndarray:
        d_em = self.dims[0] * self.dims[1]
        nf = self.dims[2]
        diag = np.real(np.diagonal(self.matrix)).reshape(d_em, nf)
        return diag.sum(axis=0)

    def top_fock_population(self) -> float:
        return float(self.fock_populations()[-1])

    def swapped(self) -> "DensityState":
        """State with the two emitter labels exchanged."""
        d1, d2, nf = self.dims
        t = self.matrix.reshape(d1, d2, nf, d1, d2, nf).transpose(1, 0, 2, 4, 3, 5)
        return DensityState(t.reshape(self.matrix.shape).copy(), (d2, d1, nf))


def _operators(spec: SystemSpec) -> dict:
    nf = spec.n_max + 1
    i3 = sp.identity(3, format="csr")
    ib = sp.identity(nf, format="csr")
    ann = sp.diags(np.sqrt(np.arange(1, nf, dtype=float)), 1, format="csr")

    def emb(op, site):
        parts = [i3, i3, ib]
        parts[site] = sp.csr_matrix(op)
        return sp.kron(sp.kron(parts[0], parts[1]), parts[2], format="csr")

    ops = {"a": emb(ann, 2)}
    for k in (0, 1):
        ops[f"sigma{k + 1}"] = emb(_proj(B, A), k)
        ops[f"na{k + 1}"] = emb(_proj(A, A), k)
        ops[f"nb{k + 1}"] = emb(_proj(B, B), k)
        ops[f"pump{k + 1}"] = emb(_proj(A, G), k)
        ops[f"decay_a{k + 1}"] = emb(_proj(G, A), k)
        ops[f"decay_b{k + 1}"] = emb(_proj(G, B), k)
        ops[f"refill{k + 1}"] = emb(_proj(A, B), k)
    return ops


def _dissipator(J: sp.csr_matrix, ident: sp.csr_matrix) -> sp.csr_matrix:
    JdJ = (J.conj().T @ J).tocsr()
    return (sp.kron(J, J.conj()) - 0.5 * sp.kron(JdJ, ident) - 0.5 * sp.kron(ident, JdJ.T)).tocsr()


def build_generator(spec: SystemSpec, max_fock: int = MAX_FOCK) -> Generator:
    """Assemble the Liouvillian of ``spec``.

    Raises ``ValueError`` when ``spec.n_max`` exceeds ``max_fock``.
    """
    if spec.n_max > max_fock:
        raise ValueError(f"n_max={spec.n_max} exceeds the configured maximum {max_fock}")
    ops = _operators(spec)
    d = spec.hilbert_dim
    ident = sp.identity(d, format="csr", dtype=complex)
    a = ops["a"]
    H = sp.csr_matrix((d, d), dtype=complex)
    jumps = [math.sqrt(2.0 * spec.kappa) * a]
    for k, (p, om) in enumerate(zip(spec.emitters, spec.rabi), start=1):
        s = ops[f"sigma{k}"]
        H = H - p.detuning * ops[f"na{k}"] - om * (s.T @ a + a.T @ s)
        if p.pump_rate > 0:
            jumps.append(math.sqrt(p.pump_rate) * ops[f"pump{k}"])
            if spec.pump_model == "ground_and_lower":
                jumps.append(math.sqrt(p.pump_rate) * ops[f"refill{k}"])
        jumps.append(math.sqrt(1.0 / p.tau_a) * ops[f"decay_a{k}"])
        jumps.append(math.sqrt(1.0 / p.tau_b) * ops[f"decay_b{k}"])
        if p.dephasing > 0:
            # D[sqrt(2 g) n_a] damps the a-b coherence at exactly g
            jumps.append(math.sqrt(2.0 * p.dephasing) * ops[f"na{k}"])
    H = H.tocsr()
    L = -1j * (sp.kron(H, ident) - sp.kron(ident, H.T))
    for J in jumps:
        L = L + _dissipator(sp.csr_matrix(J, dtype=complex), ident)
    L = L.tocsr()
    L.eliminate_zeros()
    return Generator(matrix=L.toarray(), sparse=L, spec=spec, ops=ops)


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=complex)
    row[:: d + 1] = 1.0
    return row


def steady_state(gen: Generator, residual_tol: float = 1e-10) -> DensityState:
    """Unique trace-one kernel element of the generator (dense solve)."""
    d = gen.hilbert_dim
    M = gen.matrix.copy()
    # rows of a trace-preserving generator sum to zero along the diagonal
    # entries, so one population equation is redundant and can carry Tr = 1
    M[0, :] = _trace_row(d)
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            v = scipy.linalg.solve(M, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
        raise DegenerateKernelError(
            f"generator kernel is not one-dimensional ({exc}); "
            "decoupled sectors, e.g. no pump and no decay path") from exc
    rho = v.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    res = np.max(np.abs(gen.sparse @ rho.reshape(-1)))
    scale = np.max(np.abs(gen.matrix).sum(axis=1)) * max(np.max(np.abs(rho)), 1.0)
    if res > residual_tol * scale:
        raise DegenerateKernelError(f"stationary residual {res:.3g} exceeds tolerance")
    return DensityState(rho, gen.spec.dims)


@dataclass(frozen=True)
class OracleTrajectory:
    t: np.ndarray
    states: list

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> DensityState:
        return self.states[-1]


def evolve(rho0: DensityState, gen: Generator, horizon: float, tol: float = 1e-9,
           n_samples: int = 51) -> OracleTrajectory:
    """Propagate ``rho0`` with the exact exponential of the generator.

    ``tol`` bounds the trace and hermiticity drift along the trajectory;
    exceeding it raises :class:`OracleIntegrationError`.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    problems = rho0.health(max(tol, 1e-10))
    if problems:
        raise ValueError("invalid initial state: " + "; ".join(problems))
    d = gen.hilbert_dim
    ts = np.linspace(0.0, horizon, n_samples)
    vs = expm_multiply(gen.sparse, rho0.matrix.reshape(-1).astype(complex),
                       start=0.0, stop=horizon, num=n_samples, endpoint=True)
    if not np.all(np.isfinite(vs)):
        raise OracleIntegrationError("propagation produced non-finite values")
    states = []
    for v in vs:
        st = DensityState(v.reshape(d, d), rho0.dims)
        if abs(st.trace - 1.0) > tol or st.hermiticity_error() > tol:
            raise OracleIntegrationError("trace or hermiticity drift exceeds tolerance")
        states.append(st)
    return OracleTrajectory(ts, states)


@dataclass(frozen=True)
class OracleMoments:
    d1: float
    d2: float
    d12: float
    sigma: float
    s12: complex
    n: float
    na: tuple[float, float]
    nb: tuple[float, float]

    @property
    def mean_inversion(self) -> float:
        return 0.5 * (self.d1 + self.d2)

    def as_moment_state(self) -> MomentState:
        return MomentState(self.sigma, self.d12, self.d1, self.d2)


def _expect(rho: np.ndarray, op) -> complex:
    # Tr(rho X) = sum_ij rho_ij X_ji
    X = op.toarray() if sp.issparse(op) else op
    return complex(np.sum(rho * X.T))


def extract_moments(rho: DensityState, gen: Generator) -> OracleMoments:
    ops = gen.ops
    m = rho.matrix
    na = tuple(_expect(m, ops[f"na{k}"]).real for k in (1, 2))
    nb = tuple(_expect(m, ops[f"nb{k}"]).real for k in (1, 2))
    inv1 = ops["na1"] - ops["nb1"]
    inv2 = ops["na2"] - ops["nb2"]
    s12 = _expect(m, ops["sigma1"].T @ ops["sigma2"])
    return OracleMoments(
        d1=na[0] - nb[0],
        d2=na[1] - nb[1],
        d12=_expect(m, inv1 @ inv2).real,
        sigma=2.0 * s12.real,
        s12=s12,
        n=_expect(m, ops["a"].T @ ops["a"]).real,
        na=na,
        nb=nb,
    )


def _rel(x: float, ref: float) -> float:
    if abs(ref) > _ABS_FLOOR:
        return abs(x - ref) / abs(ref)
    return abs(x - ref)


@dataclass(frozen=True)
class AdiabaticComparison:
    """Oracle steady state against the eliminated moment equations.

    ``discrepancy`` is the largest relative difference over ``d1, d2,
    sigma, n`` (absolute when the reference is below 1e-12).
    """

    spec: SystemSpec
    oracle: OracleMoments
    adiabatic: MomentState
    adiabatic_n: float
    relative: dict
    discrepancy: float
    diagnostics: list
    top_fock_population: float

    @property
    def regime_ok(self) -> bool:
        return not any(dg.code in ("weak_coupling", "adiabatic_gamma", "adiabatic_tau")
                       for dg in self.diagnostics)

    @property
    def cutoff_ok(self) -> bool:
        return self.top_fock_population < CUTOFF_TOL


def compare_with_adiabatic(spec: SystemSpec, threshold: float = 10.0) -> AdiabaticComparison:
    p1, p2 = spec.emitters
    if p1 != p2:
        raise ValueError("the moment equations assume identical emitter parameters")
    if p1.detuning != 0.0:
        raise ValueError("the moment equations assume zero detuning")
    g1, g2 = spec.gammas
    gen = build_generator(spec)
    rho = steady_state(gen)
    om = extract_moments(rho, gen)
    ad = steady_state_linear(p1, g1, g2)
    n_ad = plasmon_number_from_moments(ad, p1, g1, g2, spec.kappa)
    rel = {
        "d1": _rel(om.d1, ad.d1),
        "d2": _rel(om.d2, ad.d2),
        "d12": _rel(om.d12, ad.d12),
        "sigma": _rel(om.sigma, ad.sigma),
        "n": _rel(om.n, n_ad),
    }
    disc = max(rel["d1"], rel["d2"], rel["sigma"], rel["n"])
    coupling = CouplingSpec.from_rabi(abs(spec.rabi[0]), abs(spec.rabi[1]), spec.kappa)
    diags = validate_regime(p1, coupling, spec.kappa, threshold)
    top = rho.top_fock_population()
    if top >= CUTOFF_TOL:
        diags.append(Diagnostic("fock_cutoff",
                                f"top Fock level population {top:.3g} >= {CUTOFF_TOL:g}", top))
    return AdiabaticComparison(spec, om, ad, n_ad, rel, disc, diags, top)
