"""SI scenario descriptions and their natural-unit (hbar = eps0 = c = 1) form.

Internally every frequency and rate is in 1/s, separations are stored as
light-travel times R/c in seconds, and the transition dipole is pre-scaled by
1/sqrt(eps0 hbar c^3) so that gamma = omega0^3 |d|^2 / (3 pi) holds without
further constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _k

from .errors import ConfigError

EPS0 = _k.epsilon_0
HBAR = _k.hbar
C_LIGHT = _k.c
BOHR_RADIUS = _k.physical_constants["Bohr radius"][0]
E_CHARGE = _k.e

# d_nat = d_si * _DIPOLE_SCALE  [s]
_DIPOLE_SCALE = 1.0 / np.sqrt(EPS0 * HBAR * C_LIGHT**3)

DEFAULT_OMEGA0 = 1.0e10


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical scenario in SI units.

    ``beta`` is the inverse temperature in 1/J; ``None`` means the vacuum
    field (all thermal occupations vanish).  ``cutoff`` defaults to
    2 pi c / r_a when ``rydberg_n`` is given.
    """

    omega0: float
    dipole: tuple[float, float, float]
    separation: tuple[float, float, float]
    beta: float | None = None
    cutoff: float | None = None
    rydberg_n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dipole", tuple(float(v) for v in self.dipole))
        object.__setattr__(self, "separation", tuple(float(v) for v in self.separation))
        if len(self.dipole) != 3 or len(self.separation) != 3:
            raise ConfigError("dipole and separation must be 3-vectors")
        if not self.omega0 > 0:
            raise ConfigError(f"omega0 must be positive, got {self.omega0}")
        if not np.linalg.norm(self.separation) > 0:
            raise ConfigError("separation must be non-zero")
        if not np.linalg.norm(self.dipole) > 0:
            raise ConfigError("dipole must be non-zero")
        if self.beta is not None and not self.beta > 0:
            raise ConfigError("beta must be positive (use None for vacuum)")
        if self.rydberg_n is not None and self.rydberg_n < 1:
            raise ConfigError("rydberg_n must be >= 1")
        if self.cutoff is None and self.rydberg_n is None:
            raise ConfigError("cutoff is required when rydberg_n is not given")
        if self.effective_cutoff <= self.omega0:
            raise ConfigError("cutoff must exceed omega0")

    @property
    def vacuum(self) -> bool:
        return self.beta is None

    @property
    def effective_cutoff(self) -> float:
        if self.cutoff is not None:
            return float(self.cutoff)
        return 2 * np.pi * C_LIGHT / rydberg_radius(self.rydberg_n)


@dataclass(frozen=True)
class NaturalParams:
    omega0: float
    d: np.ndarray = field(repr=False)
    Rvec: np.ndarray = field(repr=False)
    beta: float | None
    cutoff: float
    pv_regulator_eps: float | None = None

    @property
    def R(self) -> float:
        return float(np.linalg.norm(self.Rvec))

    @property
    def Rhat(self) -> np.ndarray:
        return self.Rvec / self.R

    @property
    def vacuum(self) -> bool:
        return self.beta is None

    def with_separation(self, Rvec) -> "NaturalParams":
        return NaturalParams(self.omega0, self.d, np.asarray(Rvec, dtype=float),
                             self.beta, self.cutoff, self.pv_regulator_eps)


def rydberg_radius(n: int) -> float:
    """Characteristic Rydberg radius n^2 a0 in metres."""
    return n * n * BOHR_RADIUS


def to_natural(cfg: ScenarioConfig) -> NaturalParams:
    return NaturalParams(
        omega0=float(cfg.omega0),
        d=np.asarray(cfg.dipole, dtype=float) * _DIPOLE_SCALE,
        Rvec=np.asarray(cfg.separation, dtype=float) / C_LIGHT,
        beta=None if cfg.beta is None else cfg.beta * HBAR,
        cutoff=cfg.effective_cutoff,
    )


def to_si(params: NaturalParams, rydberg_n: int | None = None) -> ScenarioConfig:
    """Inverse of :func:`to_natural`."""
    return ScenarioConfig(
        omega0=params.omega0,
        dipole=tuple(params.d / _DIPOLE_SCALE),
        separation=tuple(params.Rvec * C_LIGHT),
        beta=None if params.beta is None else params.beta / HBAR,
        cutoff=params.cutoff,
        rydberg_n=rydberg_n,
    )


def rydberg_defaults(n: int, separation_ra: float = 10.0,
                     omega0: float = DEFAULT_OMEGA0) -> ScenarioConfig:
    """Rydberg-flavoured scenario: |d| = (3/2) n^2 a0 e along x, R along z.

    The separation is given in units of r_a = n^2 a0; vacuum field; cutoff
    2 pi c / r_a.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    r_a = rydberg_radius(n)
    return ScenarioConfig(
        omega0=omega0,
        dipole=(1.5 * n * n * BOHR_RADIUS * E_CHARGE, 0.0, 0.0),
        separation=(0.0, 0.0, separation_ra * r_a),
        beta=None,
        cutoff=None,
        rydberg_n=n,
    )
