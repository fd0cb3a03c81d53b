"""Two-time correlations by quantum regression and the resulting emission spectra.

Operators and states passed to this module are expressed over the operator
basis of the generator they are used with (``L.basis``); use
``L.basis.from_bare`` to convert bare-basis operators.

Correlations oscillate at optical-like carriers (~1e10 1/s) for times of
~1e3 s.  Every function accepting ``omega_ref`` returns the correlation
multiplied by exp(-i omega_ref (t - t')), with the carrier removed inside the
extended-precision propagator, so nothing is lost to floating-point phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coupling import CouplingSet
from .dressed import DressedBasis, dressed_basis, lowering, sigma_x, symmetric_decay_rates
from .errors import DomainError
from .liouvillian import Liouvillian, sandwich

_I4 = np.eye(4)


# --------------------------------------------------------------------------
# transfer matrices and correlations


class TransferMatrix:
    """F(t) = exp(Lambda t) over the generator's operator basis."""

    def __init__(self, L: Liouvillian):
        self.L = L

    def __call__(self, t: float, omega_ref: float = 0.0) -> np.ndarray:
        return self.L.expm(t, omega_ref)


def _left(O: np.ndarray) -> np.ndarray:
    """Matrix of rho -> O rho, i.e. (O')_jk = tr(x_j^dagger O x_k)."""
    return sandwich(O, _I4)


def _row(O: np.ndarray) -> np.ndarray:
    """Row vector with entries tr(O x_i)."""
    return O.T.reshape(16)


def two_time_correlation(L: Liouvillian, O, Oprime, rho0, t: float, tprime: float,
                         omega_ref: float = 0.0) -> complex:
    """<O(t) O'(t')> = O^T F(t - t') O' F(t') rho, times exp(-i omega_ref (t - t'))."""
    if tprime < 0 or t < tprime:
        raise DomainError("need t >= t' >= 0")
    rho = np.asarray(rho0, dtype=complex).reshape(16)
    v = L.evolve(rho, tprime) if tprime > 0 else rho
    v = _left(np.asarray(Oprime)) @ v
    return complex(L.evolve_left(_row(np.asarray(O)), t - tprime, omega_ref) @ v)


def correlation_array(L: Liouvillian, p: int, t: float, tprime: float,
                      omega_ref: float = 0.0) -> np.ndarray:
    """C[n, m] = <x_n^dagger(t) x_m(t')> in the state x_p (0-based, row-major labels).

    Equals (F(t - t') X_m F(t'))_{np} with (X_m)_jk = tr(x_j^dagger x_m x_k).
    """
    r, c = divmod(p, 4)
    if r != c:
        raise DomainError("x_p must be diagonal")
    if tprime < 0 or t < tprime:
        raise DomainError("need t >= t' >= 0")
    e_p = np.zeros(16, dtype=complex)
    e_p[p] = 1.0
    v = L.evolve(e_p, tprime) if tprime > 0 else e_p
    F = L.expm(t - tprime, omega_ref)
    out = np.empty((16, 16), dtype=complex)
    for m in range(16):
        xm = np.zeros((4, 4))
        xm[divmod(m, 4)] = 1.0
        out[:, m] = F @ (_left(xm) @ v)
    return out


# --------------------------------------------------------------------------
# source fields


def source_operator(L: Liouvillian) -> np.ndarray:
    """Positive-frequency radiation source (detector geometry factored out).

    Bare picture: omega0^2 sum_mu sigma_mu^-.  Dressed picture: sum over
    energy-lowering dressed transitions n <- m of eps_nm^2 (sum_mu
    <eps_n|sigma_mu^x|eps_m>) theta_nm.  Returned over ``L.basis``.
    """
    if L.basis.kind == "bare":
        return L.omega0**2 * (lowering(1) + lowering(2)).astype(complex)
    b = L.dressed()
    return dressed_source(b)


def dressed_source(b: DressedBasis) -> np.ndarray:
    sx = b.to_dressed(sigma_x(1) + sigma_x(2))
    eps = b.eps
    out = np.zeros((4, 4), dtype=complex)
    for n in range(4):
        for m in range(4):
            if eps[n] < eps[m]:
                out[n, m] = (eps[n] - eps[m]) ** 2 * sx[n, m]
    return out


def detector_factor(d, r_vec) -> float:
    """|(1 - rhat rhat) d / (4 pi r)|^2 for a detector at ``r_vec`` from the pair."""
    r_vec = np.asarray(r_vec, dtype=float)
    r = float(np.linalg.norm(r_vec))
    if not r > 0:
        raise DomainError("detector distance must be positive")
    rhat = r_vec / r
    proj = (np.eye(3) - np.outer(rhat, rhat)) @ np.asarray(d, dtype=float)
    return float(proj @ proj) / (4 * np.pi * r) ** 2


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectrumCurve:
    """Spectrum sampled at ``omega_ref + detuning``.

    Frequencies near the carrier are stored as detunings so that widths of
    ~1e-2 1/s survive next to carriers of ~1e10 1/s.
    """

    omega_ref: float
    detuning: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    peak_center: float
    peak_height: float
    fwhm: float
    mu_det: float = 1.0
    metadata: dict = field(default_factory=dict)

    @property
    def omega_grid(self) -> np.ndarray:
        return self.omega_ref + self.detuning

    @property
    def peak_detuning(self) -> float:
        return self.peak_center - self.omega_ref

    def normalized(self) -> np.ndarray:
        return self.values / self.peak_height


def _default_detuning(width: float, points: int = 2001, span: float = 10.0) -> np.ndarray:
    return np.linspace(-span * width, span * width, points)


def lorentzian(center: float, width: float, height: float, detuning, omega_ref: float,
               mu_det: float, **metadata) -> SpectrumCurve:
    """Lorentzian of full width ``width`` peaking at ``center`` with ``height``."""
    x = np.asarray(detuning, dtype=float) - (center - omega_ref)
    values = height * (width / 2) ** 2 / ((width / 2) ** 2 + x**2)
    return SpectrumCurve(omega_ref, np.asarray(detuning, dtype=float), values,
                         center, height, width, mu_det, dict(metadata))


def standard_center(params, couplings: CouplingSet) -> float:
    """omega0 + Delta + Delta12."""
    return params.omega0 + couplings.delta + couplings.delta12


def spectrum_standard(params, couplings: CouplingSet, detuning=None, mu_det: float = 1.0,
                      omega_ref: float | None = None) -> SpectrumCurve:
    """Vacuum spectrum from the standard equation with symmetric initial state.

    ``detuning`` is measured from ``omega_ref`` (default: the peak).
    """
    if not couplings.N == 0:
        raise DomainError("spectra are defined for the vacuum field")
    gs0 = couplings.gamma0 + couplings.spontaneous_matrix(params.omega0)[0, 1]
    center = standard_center(params, couplings)
    height = 2 * params.omega0**4 * mu_det / (gs0 / 2) ** 2
    if detuning is None:
        detuning = _default_detuning(gs0)
    ref = center if omega_ref is None else omega_ref
    return lorentzian(center, gs0, height, detuning, ref, mu_det, decay_rate=gs0)


def symmetric_level_shift(basis: DressedBasis, couplings: CouplingSet) -> float:
    """Radiative shift of the symmetric-to-ground dressed transition frequency."""
    a, b, c, _ = basis.mix
    w1, w2 = basis.omega1, basis.omega2
    Ss, Sc = couplings.S_self, couplings.S_cross
    return 2 * (Ss(-w1) * (b * b - a * a) + Sc(-w1) * (b * b + a * a)
                + c * c * (Ss(w2) - Ss(-w2) + Sc(w2) - Sc(-w2)))


def shifted_symmetric_frequency(basis: DressedBasis, couplings: CouplingSet) -> float:
    """omega2 plus the radiative level shifts."""
    return basis.omega2 + symmetric_level_shift(basis, couplings)


def spectrum_new(params, couplings: CouplingSet, basis: DressedBasis | None = None,
                 detuning=None, mu_det: float = 1.0, omega_ref: float | None = None) -> SpectrumCurve:
    """Vacuum spectrum from the dressed (Coulomb-repartitioned) equation.

    ``detuning`` is measured from ``omega_ref`` (default: the peak).
    """
    if not couplings.N == 0:
        raise DomainError("spectra are defined for the vacuum field")
    if basis is None:
        basis = dressed_basis(params.omega0, couplings.C)
    gs, _ = symmetric_decay_rates(basis, couplings)
    center = shifted_symmetric_frequency(basis, couplings)
    height = (2 * basis.a * basis.omega2**2) ** 2 * mu_det / (gs / 2) ** 2
    if detuning is None:
        detuning = _default_detuning(gs)
    ref = center if omega_ref is None else omega_ref
    return lorentzian(center, gs, height, detuning, ref, mu_det, decay_rate=gs)


def peak_metadata(detuning: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """(peak detuning, height, fwhm) from sampled data; fwhm by linear
    interpolation of the half-maximum crossings (nan if not bracketed)."""
    k = int(np.argmax(values))
    height = float(values[k])
    half = 0.5 * height
    below_l = np.flatnonzero(values[:k] < half)
    below_r = np.flatnonzero(values[k:] < half)
    if height <= 0 or below_l.size == 0 or below_r.size == 0:
        return float(detuning[k]), height, float("nan")
    i = below_l[-1]
    j = k + below_r[0]
    xl = np.interp(half, [values[i], values[i + 1]], [detuning[i], detuning[i + 1]])
    xr = np.interp(half, [values[j], values[j - 1]], [detuning[j], detuning[j - 1]])
    return float(detuning[k]), height, float(xr - xl)


def correlation_grid(L: Liouvillian, rho0, times: np.ndarray, source: np.ndarray,
                     omega_ref: float) -> np.ndarray:
    """G[i, j] = <B^dagger(t_i) B(t_j)> exp(-i omega_ref (t_i - t_j)) on a uniform grid."""
    times = np.asarray(times, dtype=float)
    K = times.size
    h = times[1] - times[0] if K > 1 else 0.0
    if K > 1 and not np.allclose(np.diff(times), h, rtol=1e-9, atol=0):
        raise DomainError("times must be uniform")
    rho = np.asarray(rho0, dtype=complex).reshape(16)
    left = _left(source)
    Q = np.array([left @ L.evolve(rho, t) for t in times])
    r = source.conj().reshape(16)
    R = np.array([L.evolve_left(r, k * h, omega_ref) for k in range(K)])
    G = np.zeros((K, K), dtype=complex)
    for i in range(K):
        G[i, : i + 1] = np.einsum("kl,kl->k", R[i::-1], Q[: i + 1])
    lower = np.tril(G, -1)
    return G + lower.conj().T


def spectrum_numeric(L: Liouvillian, rho0, window: float, detuning, omega_ref: float,
                     points: int | None = None, mu_det: float = 1.0) -> SpectrumCurve:
    """Spectrum by trapezoidal double time integration of the regression correlations.

    The grid has at least 40 points per the fastest decay time of the
    generator unless ``points`` is given.  ``metadata['window_bias']`` is the
    correlation magnitude left at the end of the window relative to its
    maximum; ``metadata['window_warning']`` is set when it exceeds 1e-2.
    """
    if not window > 0:
        raise DomainError("window must be positive")
    if points is None:
        sp = L._spectral
        fastest = L.scale if sp.defective else float(np.max(np.abs(sp.rates)))
        points = max(int(np.ceil(40 * fastest * window)) + 1, 201)
    times = np.linspace(0.0, window, points)
    G = correlation_grid(L, rho0, times, source_operator(L), omega_ref)
    w = np.full(points, times[1] - times[0])
    w[[0, -1]] *= 0.5
    detuning = np.asarray(detuning, dtype=float)
    U = w[None, :] * np.exp(1j * detuning[:, None] * times[None, :])
    values = mu_det * np.real(np.einsum("di,ij,dj->d", U.conj(), G, U))
    gmax = float(np.max(np.abs(G))) if G.size else 0.0
    bias = float(abs(G[-1, -1]) / gmax) if gmax > 0 else 0.0
    if gmax == 0.0:
        values = np.zeros_like(detuning)
        center, height, fwhm = float("nan"), 0.0, float("nan")
    else:
        center, height, fwhm = peak_metadata(detuning, values)
        center += omega_ref
    meta = {"window": window, "points": points, "window_bias": bias,
            "window_warning": bias > 1e-2}
    return SpectrumCurve(omega_ref, detuning, values, center, height, fwhm, mu_det, meta)
