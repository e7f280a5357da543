"""Closed-form stationary inversion, plasmon number and relative quantum
efficiency for two equally coupled emitters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .params import (
    EmitterParams,
    derive_scalars,
    inverse_tau_prime,
    blockade_theta,
    polarization_rate,
    pump_inversion,
    require_resonant,
)

__all__ = [
    "SteadyReport",
    "NoEmissionError",
    "stationary_two_emitters",
    "stationary_single_emitter",
    "superradiance_term",
    "stationary_correlations",
    "plasmon_number",
    "normalized_plasmon_number",
    "rqe",
    "rqe_high_pump",
    "optimal_coupling",
    "max_rqe",
    "gamma_opt",
    "steady_report",
]

# slack for Delta_N > Delta0 that is pure roundoff (gamma -> 0)
_ROUNDOFF = 64 * 2.220446049250313e-16


class NoEmissionError(ZeroDivisionError):
    """RQE is 0/0 because neither configuration emits (zero pump)."""


@dataclass(frozen=True)
class SteadyReport:
    Delta2: float
    Delta1: float
    Sr: float
    R: float
    Sigma: float
    D12: float
    n_per_emitter: Optional[float] = None
    n_single: Optional[float] = None
    norm_plasmons_2: float = float("nan")
    norm_plasmons_1: float = float("nan")


def superradiance_term(p: EmitterParams, gamma: float) -> float:
    ta, tb, gp = p.tau_a, p.tau_b, p.pump_rate
    if gamma == 0.0:
        return 0.0
    Gamma = polarization_rate(p)
    return (gamma / (Gamma + gamma)) * (gp * ta + gp * tb * (1.0 + gp * ta)) \
        / (1.0 + ta * (gp + 2.0 * gamma))


def _inversion(p: EmitterParams, gamma: float, sr: float) -> float:
    ta, tb, gp = p.tau_a, p.tau_b, p.pump_rate
    return gp * ta * (1.0 - 2.0 * gamma * tb) / (1.0 + gp * ta + 2.0 * gamma * ta * (1.0 + sr))


def stationary_two_emitters(p: EmitterParams, gamma: float) -> tuple[float, float]:
    """Stationary inversion per emitter and the superradiance term ``Sr``.

    Returns
    -------
    (Delta2, Sr) : tuple of float
    """
    require_resonant(p)
    if not gamma >= 0:
        raise ValueError(f"gamma must be non-negative, got {gamma!r}")
    sr = superradiance_term(p, gamma)
    return _inversion(p, gamma, sr), sr


def stationary_single_emitter(p: EmitterParams, gamma: float) -> float:
    require_resonant(p)
    if not gamma >= 0:
        raise ValueError(f"gamma must be non-negative, got {gamma!r}")
    return _inversion(p, gamma, 0.0)


def stationary_correlations(p: EmitterParams, gamma: float,
                            delta2: Optional[float] = None) -> tuple[float, float]:
    """Stationary ``(Sigma, <Delta1 Delta2>)`` of the symmetric pair.

    Both follow linearly from the stationary inversion; the coefficient of
    ``Sigma`` is positive, so ``Sigma`` carries the sign of the inversion.
    """
    if delta2 is None:
        delta2, _ = stationary_two_emitters(p, gamma)
    theta = blockade_theta(p)
    itp = inverse_tau_prime(p)
    gb = p.pump_rate * p.tau_b
    d0 = pump_inversion(p)
    d12 = (2.0 * d0 * itp - 8.0 * gamma * gb / theta) * delta2 / (8.0 * gamma / theta + 2.0 * itp)
    sigma = 2.0 * gamma / (theta * (polarization_rate(p) + gamma)) * (d12 + gb * delta2)
    return sigma, d12


def normalized_plasmon_number(p: EmitterParams, delta_n: float) -> float:
    """``4 kappa tau_a n^(N)``; independent of ``kappa``."""
    d0 = pump_inversion(p)
    gap = d0 - delta_n
    if gap < 0:
        if gap < -_ROUNDOFF * max(1.0, abs(d0)):
            raise ValueError(f"inversion {delta_n!r} exceeds pump-only value {d0!r}; "
                             "the plasmon number would be negative")
        gap = 0.0
    return p.tau_a * inverse_tau_prime(p) * gap


def plasmon_number(p: EmitterParams, gamma: float, kappa: float, delta_n: float) -> float:
    """Stationary plasmons per emitter, ``(Delta0 - Delta_N) / (4 kappa tau')``.

    ``gamma`` is accepted for signature symmetry with the moment route; the
    plasmon number depends on it only through ``delta_n``.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    return normalized_plasmon_number(p, delta_n) / (4.0 * kappa * p.tau_a)


def rqe(p: EmitterParams, gamma: float) -> float:
    """Plasmons per emitter for the pair divided by the single-emitter value."""
    if not gamma > 0:
        raise ValueError("RQE is defined only for gamma > 0; use rqe_high_pump(0, b) "
                         "for the uncoupled limit")
    d0 = pump_inversion(p)
    d2, _ = stationary_two_emitters(p, gamma)
    d1 = stationary_single_emitter(p, gamma)
    den = d0 - d1
    if den == 0.0:
        raise NoEmissionError("no emission: single-emitter plasmon number is zero")
    return (d0 - d2) / den


def rqe_high_pump(x: float, b: float) -> float:
    """High-pump RQE as a function of ``x = 2 gamma tau_b`` and ``b``."""
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b!r}")
    return (b + 2.0 * x) / (b + x + x * x)


def optimal_coupling(b: float) -> float:
    """``x`` maximising :func:`rqe_high_pump` at fixed ``b``."""
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b!r}")
    return 0.5 * b * (math.sqrt(1.0 + 2.0 / b) - 1.0)


def max_rqe(b: float) -> float:
    return rqe_high_pump(optimal_coupling(b), b)


def steady_report(p: EmitterParams, gamma: float, kappa: Optional[float] = None) -> SteadyReport:
    """Everything stationary for one parameter point.

    ``R`` is NaN when ``gamma == 0`` or the pump vanishes; plasmon numbers are
    ``None`` without ``kappa``.
    """
    d2, sr = stationary_two_emitters(p, gamma)
    d1 = stationary_single_emitter(p, gamma)
    sigma, d12 = stationary_correlations(p, gamma, d2)
    try:
        r = rqe(p, gamma)
    except (ValueError, NoEmissionError):
        r = float("nan")
    n2 = plasmon_number(p, gamma, kappa, d2) if kappa is not None else None
    n1 = plasmon_number(p, gamma, kappa, d1) if kappa is not None else None
    return SteadyReport(
        Delta2=d2, Delta1=d1, Sr=sr, R=r, Sigma=sigma, D12=d12,
        n_per_emitter=n2, n_single=n1,
        norm_plasmons_2=normalized_plasmon_number(p, d2),
        norm_plasmons_1=normalized_plasmon_number(p, d1),
    )


def gamma_opt(p: EmitterParams) -> float:
    """Coupling rate at the high-pump RQE optimum for emitter ``p``."""
    return optimal_coupling(derive_scalars(p).b) / (2.0 * p.tau_b)
