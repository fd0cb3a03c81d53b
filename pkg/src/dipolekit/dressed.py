"""Coulomb-dressed two-dipole Hamiltonian and its eigenoperator decomposition.

Bare basis ordering is {gg, eg, ge, ee}: index = n1 + 2 n2 with n = 1 for an
excited dipole, so ``lowering(1) = kron(I, s-)`` and ``lowering(2) = kron(s-, I)``.

The dressed Hamiltonian omega0 (n1 + n2) + C sx1 sx2 has eigenvalues
omega0 -+ eta and omega0 -+ C with eta = sqrt(omega0^2 + C^2).  Eigenvectors
are written through kappa = C / (omega0 + eta), which stays well conditioned
as C -> 0 and for either sign of C.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coupling import CouplingSet, gamma_cross, gamma_self, spontaneous_rate

_S_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # (g, e) ordering
_I2 = np.eye(2)

STATE_LABELS = ("gg", "eg", "ge", "ee")


def lowering(mu: int) -> np.ndarray:
    """sigma_mu^- on the bare basis, mu in {1, 2}."""
    if mu == 1:
        return np.kron(_I2, _S_MINUS)
    if mu == 2:
        return np.kron(_S_MINUS, _I2)
    raise ValueError("mu must be 1 or 2")


def sigma_x(mu: int) -> np.ndarray:
    s = lowering(mu)
    return s + s.T


def dressed_hamiltonian_bare(omega0: float, C: float) -> np.ndarray:
    """omega0 (n1 + n2) + C sx1 sx2 on the bare basis."""
    n = sum(lowering(mu).T @ lowering(mu) for mu in (1, 2))
    return omega0 * n + C * sigma_x(1) @ sigma_x(2)


@dataclass(frozen=True)
class DressedBasis:
    """Eigensystem of the dressed Hamiltonian.

    ``vecs[:, n]`` is the n-th eigenvector (0-based) over the bare basis.
    ``omega1`` and ``omega2`` are the Bohr frequencies eps2 - eps1 and
    eps3 - eps1, taken from ``eps`` so that they match the generator exactly.
    """

    omega0: float
    C: float
    eta: float
    eps: np.ndarray = field(repr=False)
    vecs: np.ndarray = field(repr=False)
    a: float
    b: float
    c: float
    d: float

    @property
    def omega1(self) -> float:
        return float(self.eps[1] - self.eps[0])

    @property
    def omega2(self) -> float:
        return float(self.eps[2] - self.eps[0])

    @property
    def mix(self) -> tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d

    def hamiltonian(self) -> np.ndarray:
        """H_d in the dressed basis (diagonal)."""
        return np.diag(self.eps)

    def to_dressed(self, op_bare: np.ndarray) -> np.ndarray:
        return self.vecs.conj().T @ op_bare @ self.vecs

    def to_bare(self, op_dressed: np.ndarray) -> np.ndarray:
        return self.vecs @ op_dressed @ self.vecs.conj().T


def dressed_basis(omega0: float, C: float) -> DressedBasis:
    omega0, C = float(omega0), float(C)
    eta = float(np.hypot(omega0, C))
    kappa = C / (omega0 + eta)
    sgn = 1.0 if C >= 0 else -1.0
    norm = np.sqrt(1.0 + kappa * kappa)
    # omega0 - eta = -C kappa without cancellation
    eps = np.array([-C * kappa, omega0 - C, omega0 + C, omega0 + eta])
    r2 = 1.0 / np.sqrt(2.0)
    vecs = np.zeros((4, 4))
    vecs[[0, 3], 0] = np.array([1.0, -kappa]) / norm
    vecs[[1, 2], 1] = r2, -r2
    vecs[[1, 2], 2] = r2, r2
    vecs[[0, 3], 3] = sgn * np.array([kappa, 1.0]) / norm
    a = (1 - kappa) / (np.sqrt(2.0) * norm)
    c = (1 + kappa) / (np.sqrt(2.0) * norm)
    return DressedBasis(omega0, C, eta, eps, vecs, a=a, b=sgn * a, c=c, d=sgn * c)


def _ket_bra(n: int, m: int) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[n, m] = 1.0
    return out


@dataclass(frozen=True)
class JumpOperatorSet:
    """A[mu][n] for mu in {1, 2} and n in {1, 2} (frequency omega_n), in the
    dressed basis.  Negative frequencies are the adjoints."""

    A: dict
    omegas: tuple[float, float]

    def op(self, mu: int, n: int) -> np.ndarray:
        return self.A[mu][n]

    def items(self):
        """Yield (mu, n, omega_n, A) for the positive-frequency operators."""
        for mu in (1, 2):
            for n in (1, 2):
                yield mu, n, self.omegas[n - 1], self.A[mu][n]


def jump_operators(basis: DressedBasis) -> JumpOperatorSet:
    """Eigenoperators of the dipole coupling: sigma_mu^y = i (A - A^dagger)
    with A = sum_n A[mu][n]."""
    a, b, c, d = basis.mix
    e12, e34 = _ket_bra(0, 1), _ket_bra(2, 3)
    e13, e24 = _ket_bra(0, 2), _ket_bra(1, 3)
    A = {
        1: {1: a * e12 + b * e34, 2: c * e13 - d * e24},
        2: {1: -a * e12 + b * e34, 2: c * e13 + d * e24},
    }
    return JumpOperatorSet(A, (basis.omega1, basis.omega2))


def collective_dipole_element(basis: DressedBasis, d, final: int = 3, initial: int = 1) -> np.ndarray:
    """<eps_final| d1 + d2 |eps_initial> by explicit contraction (1-based labels).

    The dipole operator of each two-level system is d sigma_x.
    """
    sx = basis.to_dressed(sigma_x(1) + sigma_x(2))
    return float(np.real(sx[final - 1, initial - 1])) * np.asarray(d, dtype=float)


def symmetric_decay_rates(basis: DressedBasis, couplings: CouplingSet) -> tuple[float, float]:
    """Vacuum decay rate of the symmetric dressed state and its bare-state counterpart.

    gamma_s = 2 c^2 [gamma_mumu(omega2) + gamma_12(omega2)] at N = 0 and
    gamma_s0 = gamma + gamma_12(omega0).
    """
    p = couplings.params
    w2 = basis.omega2
    gamma_s = 2 * basis.c**2 * (gamma_self(w2, p, N=0.0) + gamma_cross(w2, p, N=0.0))
    gamma_s0 = spontaneous_rate(p.omega0, p.d) + gamma_cross(p.omega0, p, N=0.0)
    return gamma_s, gamma_s0
