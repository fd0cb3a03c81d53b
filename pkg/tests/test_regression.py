import mpmath as mp
import numpy as np
import pytest

from dipolekit.coupling import couplings
from dipolekit.dressed import lowering, symmetric_decay_rates
from dipolekit.errors import DomainError
from dipolekit.liouvillian import (build_full_secular, build_partial_secular, build_standard,
                                   initial_state, steady_state)
from dipolekit.regression import (TransferMatrix, correlation_array, detector_factor,
                                  dressed_source, source_operator,
                                  spectrum_new, spectrum_numeric, spectrum_standard,
                                  standard_center, symmetric_level_shift, two_time_correlation)
from dipolekit.units import rydberg_defaults, to_natural

P50 = to_natural(rydberg_defaults(50, 10.0))
CS50 = couplings(P50)
SIGMA_MINUS = lowering(1) + lowering(2)


@pytest.fixture(scope="module")
def standard():
    return build_standard(P50, CS50)


@pytest.fixture(scope="module", params=["full", "partial"])
def dressed_gen(request):
    build = build_full_secular if request.param == "full" else build_partial_secular
    return build(P50, CS50)


def symmetric_carrier(L):
    """Exact transition frequency of the symmetric coherence, in extended precision."""
    b = L.dressed()
    with mp.workdps(30):
        return mp.mpf(b.eps[2]) - mp.mpf(b.eps[0]) + mp.mpf(symmetric_level_shift(b, CS50))


@pytest.mark.parametrize("t,tp", [(3.0, 1.0), (50.0, 20.0), (400.0, 100.0), (10.0, 10.0)])
def test_standard_summed_correlation(standard, t, tp):
    gs0 = CS50.gamma0 + CS50.spontaneous_matrix(P50.omega0)[0, 1]
    rho = initial_state("symmetric", standard)
    val = two_time_correlation(standard, SIGMA_MINUS.T, SIGMA_MINUS, rho, t, tp,
                               standard_center(P50, CS50))
    assert abs(val / (2 * np.exp(-gs0 * (t + tp) / 2)) - 1) < 1e-8


@pytest.mark.parametrize("t,tp", [(30.0, 10.0), (300.0, 100.0), (5.0, 0.0)])
def test_symmetric_coherence_correlation(dressed_gen, t, tp):
    gs, _ = symmetric_decay_rates(dressed_gen.dressed(), CS50)
    C = correlation_array(dressed_gen, 10, t, tp, symmetric_carrier(dressed_gen))
    assert abs(C[2, 2] / np.exp(-gs * (t + tp) / 2) - 1) < 1e-8


def test_correlation_array_sparsity():
    L = build_full_secular(P50, CS50)
    C = correlation_array(L, 10, 30.0, 10.0)
    nz = {tuple(ij) for ij in np.argwhere(np.abs(C) > 1e-12)}
    # diagonal entries only for x_m = |r><c| with c in {1, 3}; one population transfer
    expected = {(m, m) for m in range(16) if m % 4 in (0, 2)} | {(0, 10)}
    assert nz == expected
    # among the lowering pairs only theta_13 and theta_23 correlate
    lowering_idx = [4 * r + c for r in range(4) for c in range(4) if r < c]
    assert [m for m in lowering_idx if abs(C[m, m]) > 1e-12] == [2, 6]


def test_correlation_matches_generic_regression(dressed_gen):
    b = dressed_gen.dressed()
    O = b.to_dressed(SIGMA_MINUS)
    rho = initial_state("symmetric", dressed_gen)
    C = correlation_array(dressed_gen, 10, 40.0, 15.0)
    direct = two_time_correlation(dressed_gen, O.conj().T, O, rho, 40.0, 15.0)
    coef = O.reshape(16)
    assert np.einsum("n,nm,m->", coef.conj(), C, coef) == pytest.approx(direct, rel=1e-10)


def test_correlation_domain_errors(standard):
    rho = initial_state("symmetric", standard)
    with pytest.raises(DomainError):
        two_time_correlation(standard, SIGMA_MINUS.T, SIGMA_MINUS, rho, 1.0, 2.0)
    with pytest.raises(DomainError):
        correlation_array(standard, 1, 2.0, 1.0)


def test_transfer_matrix_identity(standard):
    F = TransferMatrix(standard)
    np.testing.assert_allclose(F(0.0), np.eye(16), atol=1e-13)


def test_dressed_ground_state_does_not_radiate(dressed_gen):
    rho = steady_state(dressed_gen)
    B = source_operator(dressed_gen)
    for t in (0.0, 10.0, 200.0):
        val = two_time_correlation(dressed_gen, B.conj().T, B, rho, t, 0.0)
        assert abs(val) == 0.0 or abs(val) < 1e-30 * np.max(np.abs(B)) ** 2


def test_bare_source_on_dressed_ground_state_radiates():
    # the bare lowering operator does not annihilate |eps1>: using it as the
    # source would predict emission from the stationary state
    L = build_partial_secular(P50, CS50)
    b = L.dressed()
    rho = steady_state(L)
    B = b.to_dressed(P50.omega0**2 * SIGMA_MINUS)
    naive = two_time_correlation(L, B.conj().T, B, rho, 0.0, 0.0)
    assert naive.real > 1e-3 * P50.omega0**4


def test_dressed_source_reduces_to_bare_at_zero_coupling():
    L = build_partial_secular(P50.with_separation(P50.Rvec * 1e4), couplings(
        P50.with_separation(P50.Rvec * 1e4)))
    b = L.dressed()
    np.testing.assert_allclose(b.to_bare(dressed_source(b)), P50.omega0**2 * SIGMA_MINUS,
                               rtol=0, atol=1e-5 * P50.omega0**2)


@pytest.mark.parametrize("ratio", [1e-6])
def test_spectra_agree_at_weak_coupling(ratio):
    base = to_natural(rydberg_defaults(50, 10.0))
    cs = couplings(base)
    scaled = base.with_separation(base.Rvec * (cs.C / (ratio * base.omega0)) ** (1 / 3))
    cs = couplings(scaled)
    assert cs.C / scaled.omega0 == pytest.approx(ratio, rel=1e-6)
    s, s0 = spectrum_new(scaled, cs), spectrum_standard(scaled, cs)
    assert s.peak_center == pytest.approx(s0.peak_center, rel=1e-4)
    assert s.fwhm == pytest.approx(s0.fwhm, rel=1e-4)
    assert s.peak_height == pytest.approx(s0.peak_height, rel=1e-4)
    np.testing.assert_allclose(s.normalized(), s0.normalized(), atol=1e-4)


@pytest.mark.parametrize("which", ["standard", "partial"])
def test_numeric_spectrum_matches_lorentzian(which):
    if which == "standard":
        L, ana = build_standard(P50, CS50), spectrum_standard(P50, CS50)
    else:
        L, ana = build_partial_secular(P50, CS50), spectrum_new(P50, CS50)
    det = np.linspace(-5 * ana.fwhm, 5 * ana.fwhm, 201)
    num = spectrum_numeric(L, initial_state("symmetric", L), 20 / ana.fwhm, det, ana.peak_center)
    assert abs(num.peak_center - ana.peak_center) <= det[1] - det[0]
    assert num.fwhm == pytest.approx(ana.fwhm, rel=1e-3)
    assert num.peak_height == pytest.approx(ana.peak_height, rel=1e-3)
    assert not num.metadata["window_warning"]
    assert num.metadata["points"] >= 40 * 20


def test_short_window_is_flagged():
    L = build_standard(P50, CS50)
    ana = spectrum_standard(P50, CS50)
    num = spectrum_numeric(L, initial_state("symmetric", L), 2 / ana.fwhm,
                           np.linspace(-ana.fwhm, ana.fwhm, 11), ana.peak_center)
    assert num.metadata["window_warning"]


def test_detector_factor():
    d = np.array([1.0, 0.0, 0.0])
    assert detector_factor(d, [0, 0, 2.0]) == pytest.approx(1 / (8 * np.pi) ** 2)
    assert detector_factor(d, [3.0, 0, 0]) == 0.0
    with pytest.raises(DomainError):
        detector_factor(d, [0, 0, 0])
