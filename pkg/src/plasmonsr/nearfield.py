"""Dark (quadrupole) nanorod mode and the emitter coupling it produces.

The rod lies on the z axis and is modelled as two point dipoles at ``z1``
and ``z2``; the dark mode drives them in antiphase, so the field at an
emitter is the difference of the two dipole fields. Units are normalised
with ``hbar = c = 1``. Vectors are stored as ``(z, rho)`` component pairs
in the plane spanned by the rod axis and the emitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NanorodSpec",
    "EmitterSite",
    "DarkModeField",
    "SingularPositionError",
    "EXCLUSION_KR",
    "mode_frequencies",
    "radial_profiles",
    "dipole_field",
    "dark_mode_field",
    "coupling_from_position",
    "field_map",
]

EXCLUSION_KR = 1e-3
E_Z = np.array([1.0, 0.0])
E_RHO = np.array([0.0, 1.0])


class SingularPositionError(ValueError):
    pass


@dataclass(frozen=True)
class NanorodSpec:
    """Two-part nanorod.

    Parameters
    ----------
    z1, z2 : float
        Dipole positions of the two halves on the rod axis.
    omega : float
        Frequency of one half on its own.
    splitting : float
        Coupling between the halves; the modes sit at ``omega -/+ splitting``.
    d : float
        Dipole matrix element of half the rod.
    n_ref : float
        Refractive index of the surroundings.
    kappa : float
        Damping rate of the dark mode.
    """

    z1: float
    z2: float
    omega: float
    splitting: float
    d: float = 1.0
    n_ref: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("z1", "z2", "omega", "splitting", "d", "n_ref", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.z1 == self.z2:
            raise ValueError("the two dipole positions must differ")
        if self.n_ref <= 0 or self.kappa <= 0:
            raise ValueError("n_ref and kappa must be positive")
        if self.omega + self.splitting <= 0:
            raise ValueError("dark-mode frequency must be positive")

    @property
    def dark_frequency(self) -> float:
        return self.omega + self.splitting

    @property
    def wavenumber(self) -> float:
        return self.n_ref * self.dark_frequency

    @property
    def prefactor(self) -> float:
        return self.n_ref * self.d * self.dark_frequency ** 3

    def warnings(self, threshold: float = 10.0) -> list[str]:
        """Mode splitting should dominate the linewidth for two clean modes."""
        if abs(self.splitting) < threshold * self.kappa:
            return [f"splitting/kappa = {abs(self.splitting) / self.kappa:.3g} below {threshold:g}; "
                    "bright and dark modes are not well separated"]
        return []


@dataclass(frozen=True)
class EmitterSite:
    z: float
    rho: float

    def separation(self, z_dipole: float) -> tuple[float, np.ndarray]:
        """Distance to a dipole on the axis and the unit vector pointing away from it."""
        vec = np.array([self.z - z_dipole, self.rho])
        r = float(np.hypot(*vec))
        if r == 0.0:
            raise SingularPositionError("emitter coincides with a rod dipole")
        return r, vec / r


@dataclass(frozen=True)
class DarkModeField:
    E: np.ndarray
    magnitude: float
    theta: float
    phase_z: float
    phase_rho: float

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)


def mode_frequencies(spec: NanorodSpec) -> tuple[float, float]:
    """``(bright, dark)`` mode frequencies."""
    return spec.omega - spec.splitting, spec.omega + spec.splitting


def radial_profiles(x):
    """Axial and radial dipole-field profiles ``(f_z, f_r)`` at ``x = k r``.

    Accepts scalars or arrays; raises for ``x <= 0``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise SingularPositionError("radial profiles need x > 0")
    inv = 1.0 / xa
    inv2 = inv * inv
    inv3 = inv2 * inv
    fz = inv + 1j * inv2 - inv3
    fr = -inv - 3j * inv2 + 3.0 * inv3
    if np.ndim(x) == 0:
        return complex(fz), complex(fr)
    return fz, fr


def dipole_field(spec: NanorodSpec, site: EmitterSite, j: int) -> np.ndarray:
    """Complex ``(E_z, E_rho)`` radiated by rod half ``j`` (1 or 2) at ``site``."""
    if j not in (1, 2):
        raise ValueError("part index must be 1 or 2")
    r, e = site.separation(spec.z1 if j == 1 else spec.z2)
    k = spec.wavenumber
    x = k * r
    if x < EXCLUSION_KR:
        raise SingularPositionError(f"k r = {x:.3g} inside the exclusion radius {EXCLUSION_KR:g}")
    fz, fr = radial_profiles(x)
    return spec.prefactor * (E_Z * fz + e * e[0] * fr) * np.exp(1j * x)


def dark_mode_field(spec: NanorodSpec, site: EmitterSite) -> DarkModeField:
    E = dipole_field(spec, site, 1) - dipole_field(spec, site, 2)
    az, arho = abs(E[0]), abs(E[1])
    mag = math.hypot(az, arho)
    theta = math.atan2(arho, az)
    return DarkModeField(E=E, magnitude=mag, theta=theta,
                         phase_z=float(np.angle(E[0])), phase_rho=float(np.angle(E[1])))


def coupling_from_position(spec: NanorodSpec, site: EmitterSite, d_e: float
                           ) -> tuple[float, float]:
    """Rabi frequency and enhanced emission rate ``(Omega, gamma)`` of an emitter."""
    field = dark_mode_field(spec, site)
    rabi = abs(d_e) * field.magnitude / (2.0 * math.sqrt(2.0))
    return rabi, rabi * rabi / spec.kappa


def field_map(spec: NanorodSpec, zs, rhos, d_e: float) -> list[dict]:
    """Rows of ``z, rho, |E|, theta, gamma`` (plus Rabi frequency and phases)
    over the grid ``zs x rhos``; points inside the exclusion radius get
    ``singular=True`` and NaN fields."""
    rows = []
    for z in zs:
        for rho in rhos:
            site = EmitterSite(float(z), float(rho))
            try:
                f = dark_mode_field(spec, site)
                rabi, gamma = coupling_from_position(spec, site, d_e)
                rows.append({"z": site.z, "rho": site.rho, "E_abs": f.magnitude,
                             "theta": f.theta, "gamma": gamma, "rabi": rabi,
                             "phase_z": f.phase_z, "phase_rho": f.phase_rho,
                             "singular": False})
            except SingularPositionError:
                nan = float("nan")
                rows.append({"z": site.z, "rho": site.rho, "E_abs": nan, "theta": nan,
                             "gamma": nan, "rabi": nan, "phase_z": nan, "phase_rho": nan,
                             "singular": True})
    return rows
