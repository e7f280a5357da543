"""Closed moment system of two emitters after the plasmon is eliminated.

The state is ``(Sigma, <Delta1 Delta2>, <Delta1>, <Delta2>)`` with
``Sigma = <s1+ s2> + <s2+ s1>``. The equations are affine,
``dy/dt = M y + c``, so the stationary point is a 4x4 linear solve and the
transient is integrated by an adaptive Dormand-Prince kernel (compiled when
available, see :data:`KERNEL`).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .params import (
    EmitterParams,
    blockade_theta,
    inverse_tau_prime,
    polarization_rate,
    populations_from_inversion,
    pump_inversion,
    require_resonant,
)

try:
    if os.environ.get("PLASMONSR_PURE_PYTHON") == "1":
        raise ImportError("pure-Python kernel requested")
    from . import _kernels as _kernel_impl
    KERNEL = "cython"
except ImportError:
    from . import _kernels_py as _kernel_impl
    KERNEL = "python"

__all__ = [
    "MomentState",
    "Trajectory",
    "IntegrationError",
    "SingularSystemError",
    "moment_matrix",
    "moment_rhs",
    "steady_state_linear",
    "integrate_moments",
    "plasmon_number_from_moments",
    "KERNEL",
]


class IntegrationError(RuntimeError):
    pass


class SingularSystemError(np.linalg.LinAlgError):
    pass


class MomentState(NamedTuple):
    sigma: float
    d12: float
    d1: float
    d2: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    @classmethod
    def zero(cls) -> "MomentState":
        return cls(0.0, 0.0, 0.0, 0.0)

    @property
    def mean_inversion(self) -> float:
        return 0.5 * (self.d1 + self.d2)

    def physical_flags(self) -> list[str]:
        """Names of bounds the state violates; empty if physical."""
        flags = []
        if not all(math.isfinite(v) for v in self):
            flags.append("non_finite")
        if abs(self.d1) > 1 or abs(self.d2) > 1:
            flags.append("inversion_out_of_range")
        if abs(self.d12) > 1:
            flags.append("correlation_out_of_range")
        if abs(self.sigma) > 2:
            flags.append("coherence_out_of_range")
        return flags


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    n_accepted: int
    n_rejected: int

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> MomentState:
        return MomentState(*map(float, self.y[i]))

    @property
    def final(self) -> MomentState:
        return self.state(-1)


def moment_matrix(p: EmitterParams, gamma_1: float, gamma_2: float
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Affine generator ``(M, c)`` with ``dy/dt = M @ y + c``."""
    require_resonant(p)
    if gamma_1 < 0 or gamma_2 < 0:
        raise ValueError("coupling rates must be non-negative")
    theta = blockade_theta(p)
    itp = inverse_tau_prime(p)
    d0 = pump_inversion(p)
    gb = p.pump_rate * p.tau_b
    Gamma = polarization_rate(p)
    r = math.sqrt(gamma_1 * gamma_2)
    M = np.array([
        [-(2.0 * Gamma + gamma_1 + gamma_2), 4.0 * r / theta,
         2.0 * r * gb / theta, 2.0 * r * gb / theta],
        [0.0, -4.0 * ((gamma_1 + gamma_2) / theta + 0.5 * itp),
         -4.0 * gb * gamma_2 / theta + d0 * itp, -4.0 * gb * gamma_1 / theta + d0 * itp],
        [-2.0 * r, 0.0, -(4.0 * gamma_1 / theta + itp), 0.0],
        [-2.0 * r, 0.0, 0.0, -(4.0 * gamma_2 / theta + itp)],
    ])
    c = np.array([
        0.0,
        0.0,
        -4.0 * gamma_1 * gb / theta + itp * d0,
        -4.0 * gamma_2 * gb / theta + itp * d0,
    ])
    return M, c


def moment_rhs(s: MomentState, p: EmitterParams, gamma_1: float, gamma_2: float) -> MomentState:
    """Time derivative of every moment, in the same layout as ``s``."""
    M, c = moment_matrix(p, gamma_1, gamma_2)
    return MomentState(*map(float, M @ np.asarray(s, dtype=float) + c))


def steady_state_linear(p: EmitterParams, gamma_1: float, gamma_2: float) -> MomentState:
    M, c = moment_matrix(p, gamma_1, gamma_2)
    try:
        y = np.linalg.solve(M, -c)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"degenerate moment system: {exc}") from exc
    if not np.all(np.isfinite(y)):
        raise SingularSystemError("degenerate moment system: non-finite solution")
    return MomentState(*map(float, y))


def integrate_moments(s0: Optional[MomentState], p: EmitterParams, gamma_1: float,
                      gamma_2: float, horizon: float, rtol: float = 1e-9,
                      atol: float = 1e-12, n_samples: int = 101,
                      t_samples: Optional[np.ndarray] = None,
                      max_steps: int = 1_000_000) -> Trajectory:
    """Integrate the moment equations from ``s0`` (zero state by default).

    Samples are taken on ``n_samples`` evenly spaced times in ``[0, horizon]``
    unless ``t_samples`` is given. Raises :class:`IntegrationError` on
    step-size underflow or when ``max_steps`` is exhausted.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    if not rtol > 0 or not atol > 0:
        raise ValueError("tolerances must be positive")
    if s0 is None:
        s0 = MomentState.zero()
    if t_samples is None:
        if n_samples < 2:
            raise ValueError("need at least two samples")
        ts = np.linspace(0.0, horizon, n_samples)
    else:
        ts = np.asarray(t_samples, dtype=float)
        if ts.ndim != 1 or ts.size < 1 or ts[0] != 0.0 or np.any(np.diff(ts) <= 0) \
                or ts[-1] > horizon:
            raise ValueError("t_samples must start at 0, increase strictly and stay within horizon")
    M, c = moment_matrix(p, gamma_1, gamma_2)
    ys, status, n_acc, n_rej = _kernel_impl.integrate_affine(
        M, c, np.asarray(s0, dtype=float), ts, rtol, atol, max_steps)
    if status == _kernel_impl.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow")
    if status == _kernel_impl.STATUS_MAX_STEPS:
        raise IntegrationError(f"maximum number of steps ({max_steps}) exceeded")
    return Trajectory(ts, ys, int(n_acc), int(n_rej))


def plasmon_number_from_moments(s: MomentState, p: EmitterParams, gamma_1: float,
                                gamma_2: float, kappa: float) -> float:
    """Mean plasmon number from the emitter moments.

    Sum of the individual emission into the mode plus the interference
    term ``2 sqrt(g1 g2) Re<s1+ s2> = sqrt(g1 g2) Sigma``.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    na1 = populations_from_inversion(p, s.d1).n_a
    na2 = populations_from_inversion(p, s.d2).n_a
    r = math.sqrt(gamma_1 * gamma_2)
    return (gamma_1 * na1 + gamma_2 * na2 + 2.0 * r * (0.5 * s.sigma)) / kappa
