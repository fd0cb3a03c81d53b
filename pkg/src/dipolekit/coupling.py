"""Coupling coefficients, rates and shifts for a pair of identical dipoles.

All inputs are in natural units (see :mod:`dipolekit.units`): frequencies in
1/s, separations as R/c in seconds, dipoles pre-scaled so that the
single-dipole rate is ``omega0**3 * |d|**2 / (3 pi)``.

The tensor contractions use

    P = |d|^2 - (d.Rhat)^2,    Q = |d|^2 - 3 (d.Rhat)^2,    x = omega R

so that ``d.tau.d = omega^3/(2 pi) (P sin x/x + Q (cos x/x^2 - sin x/x^3))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError
from .quadrature import pv_integrate, regulated_pv
from .units import NaturalParams

_SMALL_X = 0.1


# --------------------------------------------------------------------------
# radial functions


def _sinc(x):
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def _near_radial(x):
    """cos x / x^2 - sin x / x^3, with a series branch near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SMALL_X
    xs = np.where(small, x, 1.0)
    xl = np.where(small, 1.0, x)
    x2 = xs * xs
    series = -1 / 3 + x2 * (1 / 30 + x2 * (-1 / 840 + x2 * (1 / 45360 - x2 * 10 / 39916800)))
    direct = np.cos(xl) / xl**2 - np.sin(xl) / xl**3
    return np.where(small, series, direct)


def _check_separation(Rvec) -> tuple[float, np.ndarray]:
    Rvec = np.asarray(Rvec, dtype=float)
    R = float(np.linalg.norm(Rvec))
    if not R > 0:
        raise DomainError("zero separation; use the R -> 0 limit instead")
    return R, Rvec / R


def _projections(Rhat):
    eye = np.eye(3)
    rr = np.outer(Rhat, Rhat)
    return eye - rr, eye - 3 * rr


def _contractions(d, Rhat) -> tuple[float, float]:
    d = np.asarray(d, dtype=float)
    dd = float(d @ d)
    dr = float(d @ Rhat) ** 2
    return dd - dr, dd - 3 * dr


def thermal_occupation(omega, beta: float | None):
    """Bose-Einstein occupation 1/(exp(beta omega) - 1); zero when beta is None."""
    omega = np.asarray(omega, dtype=float)
    if beta is None:
        return np.zeros_like(omega) if omega.ndim else 0.0
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(beta * omega)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# tensors and closed forms


def tau_tensor(omega: float, Rvec) -> np.ndarray:
    """Collective-decay tensor; ``d @ tau @ d`` is the cross rate at ``omega``."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    R, Rhat = _check_separation(Rvec)
    trans, longi = _projections(Rhat)
    x = omega * R
    return omega**3 / (2 * np.pi) * (trans * _sinc(x) + longi * _near_radial(x))


def v_tensor(omega: float, Rvec) -> np.ndarray:
    """Resonant energy-transfer tensor; ``d @ V @ d`` is the retarded transfer shift."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    R, Rhat = _check_separation(Rvec)
    trans, longi = _projections(Rhat)
    x = omega * R
    c, s = np.cos(x), np.sin(x)
    return -omega**3 / (4 * np.pi) * (trans * c / x - longi * (s / x**2 + c / x**3))


def transverse_tensor(omega: float, Rvec) -> np.ndarray:
    """Transfer tensor from the transverse field alone (no static Coulomb part)."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    R, Rhat = _check_separation(Rvec)
    trans, longi = _projections(Rhat)
    x = omega * R
    one_minus_cos = 2 * np.sin(0.5 * x) ** 2
    return -omega**3 / (4 * np.pi) * (
        trans * np.cos(x) / x - longi * (np.sin(x) / x**2 - one_minus_cos / x**3))


def static_coulomb(d, Rvec) -> float:
    """Static dipole-dipole coupling d.(1 - 3 Rhat Rhat).d / (4 pi R^3)."""
    R, Rhat = _check_separation(Rvec)
    _, q = _contractions(d, Rhat)
    return q / (4 * np.pi * R**3)


def spontaneous_rate(omega0: float, d) -> float:
    """Single-dipole decay rate omega0^3 |d|^2 / (3 pi)."""
    d = np.asarray(d, dtype=float)
    return omega0**3 * float(d @ d) / (3 * np.pi)


def cross_contraction(omega, d, Rvec):
    """``d @ tau(omega) @ d`` for scalar or array ``omega``."""
    R, Rhat = _check_separation(Rvec)
    p, q = _contractions(d, Rhat)
    omega = np.asarray(omega, dtype=float)
    x = omega * R
    return omega**3 / (2 * np.pi) * (p * _sinc(x) + q * _near_radial(x))


def _transfer_parts(params: NaturalParams):
    R, Rhat = _check_separation(params.Rvec)
    p, q = _contractions(params.d, Rhat)
    x = params.omega0 * R
    pref = -params.omega0**3 / (4 * np.pi)
    return pref, p * np.cos(x) / x - q * np.sin(x) / x**2, q / x**3, x


def delta12(params: NaturalParams) -> float:
    """Retarded transfer shift d.V(omega0).d."""
    pref, common, near, x = _transfer_parts(params)
    return float(pref * (common - near * np.cos(x)))


def delta12_transverse(params: NaturalParams) -> float:
    """Transverse-field part of the transfer shift (retarded shift minus C)."""
    pref, common, near, x = _transfer_parts(params)
    return float(pref * (common + near * 2 * np.sin(0.5 * x) ** 2))


# --------------------------------------------------------------------------
# rates


def _occupation(omega, params, N):
    return thermal_occupation(abs(omega), params.beta) if N is None else N


def gamma_self(omega: float, params: NaturalParams, N: float | None = None) -> float:
    """gamma_mumu(omega) = (1+N) gamma omega/omega0; N(|omega|) times the
    spontaneous rate at |omega| for negative omega."""
    if omega == 0:
        raise DomainError("omega must be non-zero")
    N = _occupation(omega, params, N)
    spont = spontaneous_rate(params.omega0, params.d) * abs(omega) / params.omega0
    return (1 + N) * spont if omega > 0 else N * spont


def gamma_cross(omega: float, params: NaturalParams, N: float | None = None) -> float:
    """gamma_12(omega) = (1+N) d.tau(omega).d omega0^2/omega^2; negative omega
    as in :func:`gamma_self`."""
    if omega == 0:
        raise DomainError("omega must be non-zero")
    N = _occupation(omega, params, N)
    w = abs(omega)
    spont = float(cross_contraction(w, params.d, params.Rvec)) * params.omega0**2 / w**2
    return (1 + N) * spont if omega > 0 else N * spont


# --------------------------------------------------------------------------
# shifts


def delta_shift(params: NaturalParams) -> float:
    """Single-dipole transition shift with a hard cutoff at ``params.cutoff``."""
    g, w0, lam = spontaneous_rate(params.omega0, params.d), params.omega0, params.cutoff
    if params.vacuum:
        return -g / (2 * np.pi) * np.log((lam**2 - w0**2) / w0**2)
    beta = params.beta

    def f(x):
        return -x * (1 + 2 * thermal_occupation(x, beta)) / (w0 + x)

    return g / np.pi * pv_integrate(f, w0, 0.0, lam)


def _self_shift_closed(omega, gamma, omega0, cutoff):
    return gamma / (2 * np.pi * omega0) * (
        -cutoff - omega * np.log(abs((cutoff - omega) / omega)))


def pv_shift_self(omega: float, params: NaturalParams) -> float:
    """S_mumu(omega): principal-value integral over (0, cutoff)."""
    if omega == 0:
        raise DomainError("omega must be non-zero")
    lam = params.cutoff
    if not lam > abs(omega):
        raise DomainError("cutoff must exceed |omega|")
    g, w0 = spontaneous_rate(params.omega0, params.d), params.omega0
    if params.vacuum:
        return _self_shift_closed(omega, g, w0, lam)
    beta = params.beta

    def emit(x):
        return -(1 + thermal_occupation(x, beta)) * x

    def absorb(x):
        return thermal_occupation(x, beta) * x

    total = pv_integrate(emit, omega, 0.0, lam) + pv_integrate(absorb, -omega, 0.0, lam)
    return g / (2 * np.pi * w0) * total


def _regulator(params: NaturalParams, omega: float) -> float:
    if params.pv_regulator_eps is not None:
        return params.pv_regulator_eps
    return 0.01 * min(params.R, 1.0 / abs(omega))


def pv_shift_cross(omega: float, params: NaturalParams) -> float:
    """S_12(omega) over (0, inf) with an exponential regulator extrapolated to zero."""
    if omega == 0:
        raise DomainError("omega must be non-zero")
    R = params.R
    if not R > 0:
        raise DomainError("zero separation")
    w0, d, Rvec, beta = params.omega0, params.d, params.Rvec, params.beta

    def kernel(x):
        return cross_contraction(x, d, Rvec) * w0**2 / x**2 / (2 * np.pi)

    terms = [(lambda x: -kernel(x), omega)]
    if beta is not None:
        terms = [(lambda x: -(1 + thermal_occupation(x, beta)) * kernel(x), omega),
                 (lambda x: thermal_occupation(x, beta) * kernel(x), -omega)]
    scale = abs(cross_contraction(abs(omega), d, Rvec)) * w0**2 / omega**2 + abs(
        static_coulomb(d, Rvec))
    return regulated_pv(terms, _regulator(params, omega), cap=np.pi / R,
                        atol=1e-9 * scale)


def resonant_transfer_quadrature(params: NaturalParams) -> float:
    """Retarded transfer shift from its frequency integral,

        (1/pi) PV int_0^inf d.tau(x).d  x / (omega0^2 - x^2) dx,

    evaluated with an exp(-eps x) convergence factor extrapolated to eps = 0.
    Independent of the closed form returned by :func:`delta12`.
    """
    w0, d, Rvec = params.omega0, params.d, params.Rvec

    def f(x):
        return -cross_contraction(x, d, Rvec) * x / (w0 + x) / np.pi

    scale = abs(static_coulomb(d, Rvec)) + spontaneous_rate(w0, d)
    return regulated_pv([(f, w0)], _regulator(params, w0), cap=np.pi / params.R,
                        atol=1e-9 * scale)


# --------------------------------------------------------------------------
# bundle


@dataclass
class CouplingSet:
    """All coefficients of one scenario.

    ``N`` is the occupation at omega0, used by the dissipators; the shift
    integrals use the mode-resolved occupation.  Shift functions are cached
    per frequency.
    """

    params: NaturalParams
    C: float = field(init=False)
    gamma0: float = field(init=False)
    delta: float = field(init=False)
    delta12: float = field(init=False)
    delta12_transverse: float = field(init=False)
    N: float = field(init=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        p = self.params
        self.C = static_coulomb(p.d, p.Rvec)
        self.gamma0 = spontaneous_rate(p.omega0, p.d)
        self.delta = delta_shift(p)
        self.delta12 = delta12(p)
        self.delta12_transverse = delta12_transverse(p)
        self.N = float(thermal_occupation(p.omega0, p.beta))

    def gamma_self_at(self, omega: float) -> float:
        return gamma_self(omega, self.params, self.N)

    def gamma12_at(self, omega: float) -> float:
        return gamma_cross(omega, self.params, self.N)

    def S_self(self, omega: float) -> float:
        key = ("self", float(omega))
        if key not in self._cache:
            self._cache[key] = pv_shift_self(omega, self.params)
        return self._cache[key]

    def S_cross(self, omega: float) -> float:
        key = ("cross", float(omega))
        if key not in self._cache:
            self._cache[key] = pv_shift_cross(omega, self.params)
        return self._cache[key]

    def rate_matrix(self, omega: float) -> np.ndarray:
        s, c = self.gamma_self_at(omega), self.gamma12_at(omega)
        return np.array([[s, c], [c, s]])

    def spontaneous_matrix(self, omega: float) -> np.ndarray:
        """Rate matrix at omega > 0 without thermal enhancement."""
        s = gamma_self(omega, self.params, 0.0)
        c = gamma_cross(omega, self.params, 0.0)
        return np.array([[s, c], [c, s]])

    def shift_matrix(self, omega: float) -> np.ndarray:
        s, c = self.S_self(omega), self.S_cross(omega)
        return np.array([[s, c], [c, s]])


def couplings(params: NaturalParams) -> CouplingSet:
    return CouplingSet(params)


# --------------------------------------------------------------------------
# gauge-freedom integrands

AlphaChoice = Literal["coulomb", "multipolar", "symmetric", "constant"]


@dataclass(frozen=True)
class GaugeProbe:
    """Mode-dependent gauge parameter alpha_k and the derived u_k^+-."""

    choice: AlphaChoice
    omega0: float
    value: float | None = None

    def __post_init__(self):
        if self.choice not in ("coulomb", "multipolar", "symmetric", "constant"):
            raise DomainError(f"unknown gauge choice {self.choice!r}")
        if self.choice == "constant" and (self.value is None or not 0 <= self.value <= 1):
            raise DomainError("constant gauge needs a value in [0, 1]")

    def alpha(self, omega_k):
        omega_k = np.asarray(omega_k, dtype=float)
        if self.choice == "coulomb":
            return np.zeros_like(omega_k)
        if self.choice == "multipolar":
            return np.ones_like(omega_k)
        if self.choice == "symmetric":
            return self.omega0 / (self.omega0 + omega_k)
        return np.full_like(omega_k, self.value)

    def u_plus(self, omega_k):
        a = self.alpha(omega_k)
        r = np.sqrt(self.omega0 / np.asarray(omega_k, dtype=float))
        return (1 - a) * r - a / r

    def u_minus(self, omega_k):
        a = self.alpha(omega_k)
        r = np.sqrt(self.omega0 / np.asarray(omega_k, dtype=float))
        return (1 - a) * r + a / r


def _check_mode(omega_k, omega0):
    omega_k = np.asarray(omega_k, dtype=float)
    if np.any(omega_k <= 0):
        raise DomainError("omega_k must be positive")
    if np.any(omega_k == omega0):
        raise DomainError("omega_k = omega0 is a pole")
    return omega_k


def gauge_shift_integrand(level: Literal["excited", "ground"], omega_k, N_k, probe: GaugeProbe):
    """Level-shift integrand for an arbitrary gauge, self-energy pieces included.

    The result does not depend on the gauge: for the excited level it equals
    (omega0^2/omega_k) ((1+N)/(omega0-omega_k) + N/(omega0+omega_k)).
    """
    w0 = probe.omega0
    wk = _check_mode(omega_k, w0)
    N = np.asarray(N_k, dtype=float)
    a = probe.alpha(wk)
    up2, um2 = probe.u_plus(wk) ** 2, probe.u_minus(wk) ** 2
    self_energy = a * (a - 2) * (1 + 2 * N) * w0 / wk
    if level == "excited":
        return a * a - self_energy + w0 * (up2 * N / (wk + w0) - um2 * (1 + N) / (wk - w0))
    if level == "ground":
        return a * a + self_energy + w0 * (um2 * N / (wk - w0) - up2 * (1 + N) / (wk + w0))
    raise DomainError(f"level must be 'excited' or 'ground', got {level!r}")


def gauge_delta12_integrand(omega_k, probe: GaugeProbe):
    """Transfer-shift integrand for an arbitrary gauge; equals
    omega_k^2 / (omega0^2 - omega_k^2) for every choice."""
    w0 = probe.omega0
    wk = _check_mode(omega_k, w0)
    a = probe.alpha(wk)
    up, um = probe.u_plus(wk), probe.u_minus(wk)
    # 0.5 (up^2/(wk+w0) + um^2/(wk-w0)) over a common denominator; the two
    # fractions are O(w0/wk) apiece and cancel for soft modes
    r = np.sqrt(w0 / wk)
    even = 0.5 * (up * up + um * um)
    odd = 0.5 * (2 * a / r) * (2 * (1 - a) * r)  # (um - up)(um + up) / 2
    return a * a - 1 - w0 * (even * wk + odd * w0) / ((wk - w0) * (wk + w0))


def gauge_free_shift(level: Literal["excited", "ground"], omega_k, N_k, omega0: float):
    """Gauge-independent value of :func:`gauge_shift_integrand`."""
    wk = _check_mode(omega_k, omega0)
    N = np.asarray(N_k, dtype=float)
    if level == "excited":
        return omega0**2 / wk * ((1 + N) / (omega0 - wk) + N / (omega0 + wk))
    if level == "ground":
        return -(omega0**2) / wk * ((1 + N) / (omega0 + wk) + N / (omega0 - wk))
    raise DomainError(f"level must be 'excited' or 'ground', got {level!r}")


def gauge_free_transfer(omega_k, omega0: float):
    """Gauge-independent value of :func:`gauge_delta12_integrand`."""
    wk = _check_mode(omega_k, omega0)
    return wk**2 / (omega0**2 - wk**2)


def _shift_magnitude(omega_k, N_k, omega0: float):
    """Sum of the absolute values of the two terms of :func:`gauge_free_shift`."""
    wk = np.asarray(omega_k, dtype=float)
    N = np.asarray(N_k, dtype=float)
    return omega0**2 / wk * ((1 + N) / np.abs(omega0 - wk) + N / (omega0 + wk))


def gauge_deviation(probes, omega_k, N_k) -> dict:
    """Largest relative deviation of each probe's integrands from the gauge-free values.

    Returns ``{probe: deviation}`` over the excited and ground shift
    integrands and the transfer integrand at the given modes.  Deviations
    are relative to the magnitude of the terms making up each value: the
    ground-level integrand changes sign at omega_k = omega0 (1 + 2 N), where
    a pointwise relative error carries no information.
    """
    out = {}
    for probe in probes:
        w0 = probe.omega0
        mag = _shift_magnitude(omega_k, N_k, w0)
        worst = 0.0
        for got, ref, scale in (
            (gauge_shift_integrand("excited", omega_k, N_k, probe),
             gauge_free_shift("excited", omega_k, N_k, w0), mag),
            (gauge_shift_integrand("ground", omega_k, N_k, probe),
             gauge_free_shift("ground", omega_k, N_k, w0), mag),
            (gauge_delta12_integrand(omega_k, probe), gauge_free_transfer(omega_k, w0),
             np.abs(gauge_free_transfer(omega_k, w0))),
        ):
            worst = max(worst, float(np.max(np.abs(got - ref) / scale)))
        out[probe] = worst
    return out
