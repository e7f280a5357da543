"""Model parameters, the single-emitter pump/decay scheme and derived scalars.

All rates are measured in units of ``1/tau_a`` unless an explicit ``tau_a`` is
given; every formula below is written with ``tau_a`` kept explicit so that a
physical-unit parameter set can be passed through unchanged and normalised
with :meth:`EmitterParams.normalized`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

__all__ = [
    "EmitterParams",
    "CouplingSpec",
    "DerivedScalars",
    "Populations",
    "Diagnostic",
    "derive_scalars",
    "populations_from_inversion",
    "validate_regime",
    "DEFAULT_REGIME_THRESHOLD",
]

DEFAULT_REGIME_THRESHOLD = 10.0


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


def _check_nonneg(name: str, value: float) -> None:
    _check_finite(name, value)
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value!r}")


def _check_pos(name: str, value: float) -> None:
    _check_finite(name, value)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class EmitterParams:
    """Pump, relaxation and detuning of one emitter.

    Parameters
    ----------
    pump_rate : float
        Incoherent pump rate ``Gamma_p`` into the upper level.
    tau_b : float
        Lifetime of the lower level.
    tau_a : float, optional
        Lifetime of the upper level; 1 in the normalised unit system.
    dephasing : float, optional
        Pure dephasing rate of the transition dipole.
    detuning : float, optional
        Plasmon minus emitter frequency. The closed-form and moment
        routines require zero; only the master-equation oracle uses it.
    dipole : float, optional
        Transition dipole matrix element ``d_e`` (arbitrary units), used
        only by :mod:`plasmonsr.nearfield`.
    """

    pump_rate: float
    tau_b: float
    tau_a: float = 1.0
    dephasing: float = 0.0
    detuning: float = 0.0
    dipole: float = 1.0

    def __post_init__(self):
        _check_nonneg("pump_rate", self.pump_rate)
        _check_pos("tau_a", self.tau_a)
        _check_pos("tau_b", self.tau_b)
        _check_nonneg("dephasing", self.dephasing)
        _check_finite("detuning", self.detuning)
        _check_finite("dipole", self.dipole)

    @classmethod
    def dimensionless(cls, pump: float, tb_ratio: float, dephasing: float = 0.0,
                      detuning: float = 0.0) -> "EmitterParams":
        """Build from the figure-axis groups ``Gamma_p tau_a``, ``tau_b/tau_a``
        and ``Gamma_deph tau_a`` (so ``tau_a = 1``)."""
        return cls(pump_rate=pump, tau_b=tb_ratio, tau_a=1.0,
                   dephasing=dephasing, detuning=detuning)

    def normalized(self) -> "EmitterParams":
        """Same physics expressed with ``tau_a = 1``."""
        ta = self.tau_a
        return replace(self, pump_rate=self.pump_rate * ta, tau_b=self.tau_b / ta,
                       tau_a=1.0, dephasing=self.dephasing * ta,
                       detuning=self.detuning * ta)

    @property
    def upper_decay(self) -> float:
        return 1.0 / self.tau_a

    @property
    def lower_decay(self) -> float:
        return 1.0 / self.tau_b


@dataclass(frozen=True)
class CouplingSpec:
    """Enhanced spontaneous emission rates of the two emitters into the SPP.

    Either give ``gamma_1, gamma_2`` directly or use :meth:`from_rabi`, which
    sets ``gamma_i = rabi_i**2 / kappa``.
    """

    gamma_1: float
    gamma_2: float
    rabi_1: Optional[float] = None
    rabi_2: Optional[float] = None
    kappa: Optional[float] = None

    def __post_init__(self):
        _check_nonneg("gamma_1", self.gamma_1)
        _check_nonneg("gamma_2", self.gamma_2)
        given = [self.rabi_1 is not None, self.rabi_2 is not None, self.kappa is not None]
        if any(given) and not all(given):
            raise ValueError("rabi_1, rabi_2 and kappa must be given together")
        if all(given):
            _check_nonneg("rabi_1", self.rabi_1)
            _check_nonneg("rabi_2", self.rabi_2)
            _check_pos("kappa", self.kappa)
            for g, om in ((self.gamma_1, self.rabi_1), (self.gamma_2, self.rabi_2)):
                if g != om * om / self.kappa:
                    raise ValueError("gamma_i must equal rabi_i**2 / kappa")

    @classmethod
    def from_rabi(cls, rabi_1: float, rabi_2: float, kappa: float) -> "CouplingSpec":
        _check_pos("kappa", kappa)
        return cls(rabi_1 * rabi_1 / kappa, rabi_2 * rabi_2 / kappa, rabi_1, rabi_2, kappa)

    @classmethod
    def symmetric(cls, gamma: float) -> "CouplingSpec":
        return cls(gamma, gamma)

    @property
    def gammas(self) -> tuple[float, float]:
        return (self.gamma_1, self.gamma_2)

    def rabis(self, kappa: Optional[float] = None) -> tuple[float, float]:
        """Rabi frequencies, reconstructed as ``sqrt(gamma kappa)`` if needed."""
        if self.rabi_1 is not None:
            return (self.rabi_1, self.rabi_2)
        if kappa is None:
            raise ValueError("kappa is required to reconstruct Rabi frequencies")
        return (math.sqrt(self.gamma_1 * kappa), math.sqrt(self.gamma_2 * kappa))


@dataclass(frozen=True)
class DerivedScalars:
    """Scalars every other module consumes.

    Attributes
    ----------
    Gamma : float
        Polarisation relaxation rate (half the transition linewidth).
    Delta0 : float
        Inversion produced by the pump alone.
    tau_prime : float
        Effective relaxation time of the inversion.
    theta : float
        Blockade denominator ``1 + tau_b/tau_a + Gamma_p tau_b``.
    b : float
        High-pump constant ``1 + 2 Gamma_deph tau_b + tau_b/tau_a``.
    x : float
        Normalised coupling ``2 gamma tau_b``.
    """

    Gamma: float
    Delta0: float
    tau_prime: float
    theta: float
    b: float
    x: float


@dataclass(frozen=True)
class Populations:
    n_a: float
    n_b: float

    @property
    def s(self) -> float:
        return self.n_a + self.n_b

    @property
    def inversion(self) -> float:
        return self.n_a - self.n_b


@dataclass(frozen=True)
class Diagnostic:
    """A regime warning. ``code`` is stable; ``message`` is for humans."""

    code: str
    message: str
    value: float = float("nan")
    extra: dict = field(default_factory=dict, compare=False)


def polarization_rate(p: EmitterParams) -> float:
    return 0.5 / p.tau_a + 0.5 / p.tau_b + p.dephasing


def pump_inversion(p: EmitterParams) -> float:
    gt = p.pump_rate * p.tau_a
    return gt / (gt + 1.0)


def blockade_theta(p: EmitterParams) -> float:
    return 1.0 + p.tau_b / p.tau_a + p.pump_rate * p.tau_b


def inverse_tau_prime(p: EmitterParams) -> float:
    return (2.0 / p.tau_a) * (1.0 + p.pump_rate * p.tau_a) / blockade_theta(p)


def derive_scalars(p: EmitterParams, gamma: float = 0.0) -> DerivedScalars:
    """Closed-form scalars for emitter ``p`` coupled at rate ``gamma``."""
    _check_nonneg("gamma", gamma)
    return DerivedScalars(
        Gamma=polarization_rate(p),
        Delta0=pump_inversion(p),
        tau_prime=1.0 / inverse_tau_prime(p),
        theta=blockade_theta(p),
        b=1.0 + 2.0 * p.dephasing * p.tau_b + p.tau_b / p.tau_a,
        x=2.0 * gamma * p.tau_b,
    )


def populations_from_inversion(p: EmitterParams, inversion: float) -> Populations:
    """Upper/lower occupations at stationary total population for a given
    inversion."""
    theta = blockade_theta(p)
    gb = p.pump_rate * p.tau_b
    n_a = (gb + inversion) / theta
    n_b = gb - (p.tau_b / p.tau_a + gb) * n_a
    return Populations(n_a, n_b)


def validate_regime(p: EmitterParams, coupling: CouplingSpec, kappa: Optional[float] = None,
                    threshold: float = DEFAULT_REGIME_THRESHOLD) -> list[Diagnostic]:
    """Check the assumptions behind the analytic and moment results.

    Returns a list of :class:`Diagnostic`; an empty list means every check
    passed. Hard errors are raised only for non-finite or negative inputs.

    Codes
    -----
    ``inversion_bound``
        ``gamma_i tau_b >= 1``; stationary inversion may leave ``(-1, 1)``.
    ``adiabatic_gamma``
        ``kappa / Gamma`` below ``threshold``.
    ``adiabatic_tau``
        ``kappa tau'`` below ``threshold``.
    ``weak_coupling``
        ``kappa / Omega_i`` below ``threshold``.
    ``detuning``
        Non-zero detuning; the analytic path assumes it vanishes.
    """
    _check_pos("threshold", threshold)
    if kappa is None:
        kappa = coupling.kappa
    if kappa is not None:
        _check_pos("kappa", kappa)
    out: list[Diagnostic] = []
    for i, g in enumerate(coupling.gammas, start=1):
        gtb = g * p.tau_b
        if gtb >= 1.0:
            out.append(Diagnostic("inversion_bound",
                                  f"inversion bound violated: gamma_{i} tau_b = {gtb:.6g} >= 1",
                                  gtb, {"emitter": i}))
    if kappa is not None:
        Gamma = polarization_rate(p)
        r = kappa / Gamma
        if r < threshold:
            out.append(Diagnostic("adiabatic_gamma",
                                  f"kappa/Gamma = {r:.6g} below {threshold:g}", r))
        r = kappa / inverse_tau_prime(p)
        if r < threshold:
            out.append(Diagnostic("adiabatic_tau",
                                  f"kappa tau' = {r:.6g} below {threshold:g}", r))
        for i, om in enumerate(coupling.rabis(kappa), start=1):
            if om > 0 and kappa / om < threshold:
                out.append(Diagnostic("weak_coupling",
                                      f"kappa/Omega_{i} = {kappa / om:.6g} below {threshold:g}",
                                      kappa / om, {"emitter": i}))
    if p.detuning != 0.0:
        out.append(Diagnostic("detuning",
                              f"analytic path assumes zero detuning (delta = {p.detuning:.6g})",
                              p.detuning))
    return out


def require_resonant(p: EmitterParams) -> None:
    if p.detuning != 0.0:
        raise ValueError("analytic and moment routines require zero detuning; "
                         "use the master-equation oracle for detuned emitters")
