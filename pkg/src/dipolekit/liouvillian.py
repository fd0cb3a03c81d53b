"""16x16 generators for the two-dipole master equations and their propagation.

Density matrices are vectorised row-major over an operator basis
x_i = |s_r><s_c| with i = 4 r + c, so rho_i = tr(x_i^dagger rho) and the map
rho -> A rho B becomes ``kron(A, B.T)``.

Generators are stiff (Bohr frequencies ~ 1e10 against rates ~ 1e-3), so each
one is kept in split form: a frame of exact Hamiltonian eigenstates with
energies ``E`` plus a ``small`` part holding everything else, assembled
directly rather than by subtraction.  Propagation diagonalises
-i diag(E_r - E_c) + small in extended precision and evaluates the phases
exp(lambda t) there, so that omega0 t ~ 1e13 costs no accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import mpmath as mp
import numpy as np

from .coupling import CouplingSet
from .dressed import (DressedBasis, JumpOperatorSet, dressed_basis, jump_operators,
                      lowering)
from .errors import DegenerateSteadyStateError, NumericalError

Flavor = Literal["standard", "partial_secular", "full_secular"]

_DPS = 30
_COND_LIMIT = 1e12
_COND_FLOAT = 1e6  # above this the eigen-product is formed in extended precision
_I4 = np.eye(4)


# --------------------------------------------------------------------------
# operator bases and superoperator helpers


@dataclass(frozen=True)
class OperatorBasis:
    """Outer products of four orthonormal states ``states[:, n]`` (bare coordinates)."""

    kind: Literal["bare", "dressed"]
    states: np.ndarray = field(repr=False)

    def element(self, i: int) -> np.ndarray:
        r, c = divmod(i, 4)
        return np.outer(self.states[:, r], self.states[:, c].conj())

    @staticmethod
    def dagger_index(i: int) -> int:
        r, c = divmod(i, 4)
        return 4 * c + r

    def to_bare(self, op: np.ndarray) -> np.ndarray:
        return self.states @ op @ self.states.conj().T

    def from_bare(self, op: np.ndarray) -> np.ndarray:
        return self.states.conj().T @ op @ self.states

    def gram(self) -> np.ndarray:
        els = [self.element(i) for i in range(16)]
        return np.array([[np.trace(a.conj().T @ b) for b in els] for a in els])


def bare_basis() -> OperatorBasis:
    return OperatorBasis("bare", np.eye(4))


def dressed_operator_basis(basis: DressedBasis) -> OperatorBasis:
    return OperatorBasis("dressed", basis.vecs)


def sandwich(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> A rho B."""
    return np.kron(A, B.T)


def commutator(H: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i [H, rho]."""
    return -1j * (sandwich(H, _I4) - sandwich(_I4, H))


def lindblad_term(L: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> L rho K^dagger - (1/2){K^dagger L, rho}."""
    KL = K.conj().T @ L
    return sandwich(L, K.conj().T) - 0.5 * (sandwich(KL, _I4) + sandwich(_I4, KL))


def _dagger_permutation() -> np.ndarray:
    P = np.zeros((16, 16))
    for i in range(16):
        P[OperatorBasis.dagger_index(i), i] = 1.0
    return P


_DAGGER = _dagger_permutation()


def hermitian_completion(X: np.ndarray) -> np.ndarray:
    """X + H.c., where the H.c. of rho -> X(rho) is rho -> X(rho^dagger)^dagger."""
    return X + _DAGGER @ X.conj() @ _DAGGER


def frame_transform(W: np.ndarray) -> np.ndarray:
    """Component map rho -> W^dagger rho W for a unitary W."""
    return sandwich(W.conj().T, W)


# --------------------------------------------------------------------------
# generator


@dataclass
class Liouvillian:
    """Generator over ``basis`` in split form.

    ``frame`` holds (in the coordinates of ``basis``) the eigenstates of the
    coherent part, ``energies`` their exact energies, and ``small`` the
    remaining generator expressed over the frame's outer products.
    """

    basis: OperatorBasis
    flavor: Flavor
    frame: np.ndarray = field(repr=False)
    energies: np.ndarray
    small: np.ndarray = field(repr=False)
    coulomb: float = 0.0
    omega0: float = 0.0

    @property
    def bohr(self) -> np.ndarray:
        return (self.energies[:, None] - self.energies[None, :]).ravel()

    @cached_property
    def gen(self) -> np.ndarray:
        """Lambda_jl = tr(x_j^dagger Lambda x_l) over ``basis``."""
        T = frame_transform(self.frame)
        return T.conj().T @ (np.diag(-1j * self.bohr) + self.small) @ T

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.gen @ rho.reshape(16)).reshape(4, 4)

    @property
    def scale(self) -> float:
        """Magnitude of the generator (largest Bohr frequency or rate)."""
        return float(max(np.max(np.abs(self.bohr)), np.max(np.abs(self.small))))

    @cached_property
    def _spectral(self):
        return _Spectral(self)

    def expm(self, t: float, shift: float = 0.0) -> np.ndarray:
        """exp((Lambda - i shift) t) over ``basis``; ``shift`` demodulates a
        carrier frequency exactly and may be an ``mpmath.mpf`` when the
        carrier is not representable in double precision."""
        return self._spectral.expm(t, shift)

    def evolve(self, v: np.ndarray, t: float, shift: float = 0.0) -> np.ndarray:
        """``expm(t, shift) @ v`` without forming the matrix."""
        return self._spectral.act(v, t, shift)

    def evolve_left(self, r: np.ndarray, t: float, shift: float = 0.0) -> np.ndarray:
        """``r @ expm(t, shift)`` without forming the matrix."""
        return self._spectral.act_left(r, t, shift)

    def dressed(self) -> DressedBasis:
        return dressed_basis(self.omega0, self.coulomb)


def _mp_real(x) -> mp.mpf:
    """Extended-precision value of ``x``; mpf inputs are kept exact."""
    return x if isinstance(x, mp.mpf) else mp.mpf(float(x))


class _Spectral:
    """Extended-precision eigendecomposition of the frame generator."""

    def __init__(self, L: Liouvillian):
        self.T = frame_transform(L.frame)
        self.Tinv = self.T.conj().T
        with mp.workdps(_DPS):
            bohr = [mp.mpf(float(e_r)) - mp.mpf(float(e_c))
                    for e_r in L.energies for e_c in L.energies]
            M = mp.matrix(L.small.tolist())
            for i in range(16):
                M[i, i] += mp.mpc(0, -1) * bohr[i]
            self.M = M
            self.defective = False
            try:
                lam, V = mp.eig(M)
                Vinv = mp.inverse(V)
                cond = float(mp.mnorm(V, 1) * mp.mnorm(Vinv, 1))
            except ZeroDivisionError:
                cond = np.inf
            if not cond < _COND_LIMIT:
                self.defective = True
                self.cond = cond
                return
            self.lam = lam
            self.cond = cond
            self.Vmp, self.Vinvmp = V, Vinv
            self.V = np.array(V.tolist(), dtype=complex)
            self.Vinv = np.array(Vinv.tolist(), dtype=complex)
            self.rates = np.array([float(mp.re(x)) for x in lam])

    @property
    def exact_product(self) -> bool:
        return self.cond > _COND_FLOAT

    def _mp_phases(self, t, shift) -> list:
        if t < 0:
            raise ValueError("t must be non-negative")
        tt, sh = mp.mpf(float(t)), _mp_real(shift)
        return [mp.exp((x - mp.mpc(0, 1) * sh) * tt) for x in self.lam]

    def phases(self, t: float, shift: float = 0.0) -> np.ndarray:
        with mp.workdps(_DPS):
            return np.array([complex(x) for x in self._mp_phases(t, shift)])

    def _frame_expm(self, t: float, shift) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be non-negative")
        if self.defective:
            with mp.workdps(_DPS):
                tt, sh = mp.mpf(float(t)), _mp_real(shift)
                E = mp.expm((self.M - mp.mpc(0, 1) * sh * mp.eye(16)) * tt)
                Ef = np.array(E.tolist(), dtype=complex)
            if not np.all(np.isfinite(Ef)):
                raise NumericalError("matrix exponential failed")
            return Ef
        if self.exact_product:
            with mp.workdps(_DPS):
                ph = self._mp_phases(t, shift)
                Vp = self.Vmp.copy()
                for j in range(16):
                    for i in range(16):
                        Vp[i, j] *= ph[j]
                return np.array((Vp * self.Vinvmp).tolist(), dtype=complex)
        return (self.V * self.phases(t, shift)) @ self.Vinv

    def expm(self, t: float, shift: float = 0.0) -> np.ndarray:
        return self.Tinv @ self._frame_expm(t, shift) @ self.T

    def act(self, v: np.ndarray, t: float, shift: float = 0.0) -> np.ndarray:
        """exp((M - i shift) t) applied to a vector over the operator basis."""
        y = self.T @ np.asarray(v, dtype=complex)
        if self.defective or not self.exact_product:
            return self.Tinv @ (self._frame_expm(t, shift) @ y)
        with mp.workdps(_DPS):
            z = self.Vinvmp * mp.matrix([complex(x) for x in y])
            ph = self._mp_phases(t, shift)
            for i in range(16):
                z[i] *= ph[i]
            out = np.array([complex(x) for x in self.Vmp * z])
        return self.Tinv @ out

    def act_left(self, r: np.ndarray, t: float, shift: float = 0.0) -> np.ndarray:
        """Row vector ``r`` times exp((M - i shift) t)."""
        y = np.asarray(r, dtype=complex) @ self.Tinv
        if self.defective or not self.exact_product:
            return (y @ self._frame_expm(t, shift)) @ self.T
        with mp.workdps(_DPS):
            z = mp.matrix([[complex(x) for x in y]]) * self.Vmp
            ph = self._mp_phases(t, shift)
            for i in range(16):
                z[0, i] *= ph[i]
            out = np.array([complex(x) for x in z * self.Vinvmp])
        return out @ self.T

    def kernel_dimension(self, rtol: float) -> int:
        if self.defective:
            raise NumericalError("generator is defective; kernel not available")
        with mp.workdps(_DPS):
            scale = mp.mnorm(self.M, 1)
            return sum(1 for x in self.lam if abs(x) <= rtol * scale)

    def null_vector(self) -> np.ndarray:
        """Solve M x = 0 with the first population equation replaced by tr x = 1."""
        with mp.workdps(_DPS):
            A = self.M.copy()
            rhs = mp.matrix(16, 1)
            for j in range(16):
                A[0, j] = 1 if j in (0, 5, 10, 15) else 0
            rhs[0] = 1
            x = mp.lu_solve(A, rhs)
            return np.array([complex(v) for v in x])


# --------------------------------------------------------------------------
# builders


def _check_rates(mat: np.ndarray, what: str) -> None:
    s, c = mat[0, 0], mat[0, 1]
    if abs(c) > s * (1 + 1e-12) + 1e-300:
        raise NumericalError(f"rate matrix at {what} is not positive semidefinite")


def _standard_frame(omega_tilde: float, d12: float) -> tuple[np.ndarray, np.ndarray]:
    r2 = 1 / np.sqrt(2)
    W = np.zeros((4, 4))
    W[0, 0] = W[3, 3] = 1.0
    W[[1, 2], 1] = r2, -r2
    W[[1, 2], 2] = r2, r2
    return W, np.array([0.0, omega_tilde - d12, omega_tilde + d12, 2 * omega_tilde])


def standard_generator(omega_tilde: float, d12: float, rates: np.ndarray, N: float,
                       coulomb: float = 0.0, omega0: float | None = None) -> Liouvillian:
    """Standard Lindblad generator from explicit coefficients.

    ``rates`` is the 2x2 spontaneous rate matrix gamma_mu_nu.
    """
    _check_rates(rates, "omega0")
    sm = [lowering(1), lowering(2)]
    D = np.zeros((16, 16), dtype=complex)
    for mu in range(2):
        for nu in range(2):
            g = rates[mu, nu]
            if g == 0:
                continue
            D += g * (N + 1) * lindblad_term(sm[mu], sm[nu])
            if N:
                D += g * N * lindblad_term(sm[mu].T, sm[nu].T)
    W, E = _standard_frame(omega_tilde, d12)
    T = frame_transform(W)
    return Liouvillian(bare_basis(), "standard", W, E, T @ D @ T.conj().T,
                       coulomb=coulomb, omega0=omega_tilde if omega0 is None else omega0)


def build_standard(params, couplings: CouplingSet) -> Liouvillian:
    """Standard two-dipole master equation over the bare basis."""
    rates = couplings.spontaneous_matrix(params.omega0)
    return standard_generator(params.omega0 + couplings.delta, couplings.delta12, rates,
                              couplings.N, coulomb=couplings.C, omega0=params.omega0)


def _coefficient(couplings: CouplingSet, omega: float) -> np.ndarray:
    """Gamma_mu_nu(omega) = gamma_mu_nu(omega)/2 + i S_mu_nu(omega)."""
    return 0.5 * couplings.rate_matrix(omega) + 1j * couplings.shift_matrix(omega)


def _dressed_setup(params, couplings, basis, jumps):
    if basis is None:
        basis = dressed_basis(params.omega0, couplings.C)
    if jumps is None:
        jumps = jump_operators(basis)
    return basis, jumps


def build_partial_secular(params, couplings: CouplingSet, basis: DressedBasis | None = None,
                          jumps: JumpOperatorSet | None = None) -> Liouvillian:
    """Partially secular master equation over the dressed basis.

    Keeps every pair of positive Bohr frequencies (zeta, zeta') in both the
    emission and absorption blocks, with the shift parts of Gamma retained.
    """
    basis, jumps = _dressed_setup(params, couplings, basis, jumps)
    X = np.zeros((16, 16), dtype=complex)
    for zeta_i, zeta in enumerate(jumps.omegas, start=1):
        for s in (1, -1):
            _check_rates(couplings.rate_matrix(s * zeta), f"{s * zeta:g}")
        G_em = _coefficient(couplings, zeta)
        G_ab = _coefficient(couplings, -zeta)
        for zp_i in (1, 2):
            for mu in (1, 2):
                for nu in (1, 2):
                    A = jumps.op(nu, zeta_i)
                    Bp = jumps.op(mu, zp_i)
                    Bd = Bp.conj().T
                    Ad = A.conj().T
                    X += G_em[mu - 1, nu - 1] * (sandwich(A, Bd) - sandwich(Bd @ A, _I4))
                    X += G_ab[mu - 1, nu - 1] * (sandwich(Ad, Bp) - sandwich(Bp @ Ad, _I4))
    small = hermitian_completion(X)
    return Liouvillian(dressed_operator_basis(basis), "partial_secular", np.eye(4),
                       basis.eps.copy(), small, coulomb=couplings.C, omega0=params.omega0)


def secular_shift_hamiltonian(couplings: CouplingSet, jumps: JumpOperatorSet) -> np.ndarray:
    """sum over omega = +-omega_{1,2} of S_mu_nu(omega) A_mu_omega^dagger A_nu_omega."""
    H = np.zeros((4, 4), dtype=complex)
    for n, w in enumerate(jumps.omegas, start=1):
        for sign in (1, -1):
            S = couplings.shift_matrix(sign * w)
            for mu in (1, 2):
                for nu in (1, 2):
                    Am, An = jumps.op(mu, n), jumps.op(nu, n)
                    if sign < 0:
                        Am, An = Am.conj().T, An.conj().T
                    H += S[mu - 1, nu - 1] * Am.conj().T @ An
    return H


def build_full_secular(params, couplings: CouplingSet, basis: DressedBasis | None = None,
                       jumps: JumpOperatorSet | None = None) -> Liouvillian:
    """Fully secular (Lindblad) master equation over the dressed basis."""
    basis, jumps = _dressed_setup(params, couplings, basis, jumps)
    D = np.zeros((16, 16), dtype=complex)
    for n, w in enumerate(jumps.omegas, start=1):
        for sign in (1, -1):
            rates = couplings.rate_matrix(sign * w)
            _check_rates(rates, f"{sign * w:g}")
            for mu in (1, 2):
                for nu in (1, 2):
                    Am, An = jumps.op(mu, n), jumps.op(nu, n)
                    if sign < 0:
                        Am, An = Am.conj().T, An.conj().T
                    D += rates[mu - 1, nu - 1] * lindblad_term(An, Am)
    small = D + commutator(secular_shift_hamiltonian(couplings, jumps))
    return Liouvillian(dressed_operator_basis(basis), "full_secular", np.eye(4),
                       basis.eps.copy(), small, coulomb=couplings.C, omega0=params.omega0)


BUILDERS = {
    "standard": build_standard,
    "partial_secular": build_partial_secular,
    "full_secular": build_full_secular,
}


# --------------------------------------------------------------------------
# states and propagation


def validate_density(rho: np.ndarray, tol: float = 1e-12, positivity: float | None = -1e-10) -> None:
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("density matrix must be 4x4")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix does not have unit trace")
    if positivity is not None and np.min(np.linalg.eigvalsh(rho)) < positivity:
        raise ValueError("density matrix is not positive")


INITIAL_STATES = ("symmetric", "antisymmetric", "gg", "ee", "eps1")


def initial_state(name: str, L: Liouvillian) -> np.ndarray:
    """Named pure state as a density matrix over ``L.basis``."""
    r2 = 1 / np.sqrt(2)
    kets = {
        "symmetric": np.array([0, r2, r2, 0]),
        "antisymmetric": np.array([0, r2, -r2, 0]),
        "gg": np.array([1.0, 0, 0, 0]),
        "ee": np.array([0, 0, 0, 1.0]),
    }
    if name == "eps1":
        ket = L.dressed().vecs[:, 0]
    elif name in kets:
        ket = kets[name]
    else:
        raise ValueError(f"unknown initial state {name!r}")
    return L.basis.from_bare(np.outer(ket, ket).astype(complex))


@dataclass
class Trajectory:
    """States over ``basis`` at ``times`` with named populations.

    ``p_s`` is the symmetric state, ``p_g`` the flavour's stationary state
    (|gg> for the standard equation, |eps1> otherwise).
    """

    times: np.ndarray
    states: np.ndarray = field(repr=False)
    basis: OperatorBasis
    flavor: Flavor
    populations: dict = field(repr=False)
    min_eigenvalue: np.ndarray = field(repr=False)


def populations(states_bare: np.ndarray, dressed: DressedBasis, flavor: Flavor) -> dict:
    def pop(v):
        return np.real(np.einsum("i,tij,j->t", v.conj(), states_bare, v))

    out = {
        "p_gg": np.real(states_bare[:, 0, 0]),
        "p_eps1": pop(dressed.vecs[:, 0]),
        "p_eps2": pop(dressed.vecs[:, 1]),
        "p_s": pop(dressed.vecs[:, 2]),
        "p_eps4": pop(dressed.vecs[:, 3]),
    }
    out["p_g"] = out["p_gg"] if flavor == "standard" else out["p_eps1"]
    return out


def propagate(L: Liouvillian, rho0: np.ndarray, times) -> Trajectory:
    """rho(t) = exp(Lambda t) rho0 for each t; ``rho0`` is over ``L.basis``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a sorted non-negative 1-d grid")
    rho0 = np.asarray(rho0, dtype=complex)
    validate_density(rho0, tol=1e-10)
    v0 = rho0.reshape(16)
    states = np.array([L.evolve(v0, t).reshape(4, 4) if t > 0 else rho0 for t in times])
    bare = np.einsum("ij,tjk,lk->til", L.basis.states, states, L.basis.states.conj())
    herm = 0.5 * (states + np.conj(np.swapaxes(states, 1, 2)))
    min_eig = np.linalg.eigvalsh(herm)[:, 0]
    return Trajectory(times, states, L.basis, L.flavor,
                      populations(bare, L.dressed(), L.flavor), min_eig)


def steady_state(L: Liouvillian, rtol: float = 1e-28) -> np.ndarray:
    """Unique trace-one null vector of the generator, over ``L.basis``.

    Eigenvalues with modulus below ``rtol`` times the generator norm count as
    zero; the extended-precision eigenvalues resolve decay rates many orders
    below the physical ones, so nearly dark states do not count as stationary.
    """
    sp = L._spectral
    dim = sp.kernel_dimension(rtol)
    if dim != 1:
        raise DegenerateSteadyStateError(f"generator kernel has dimension {dim}")
    rho = (sp.Tinv @ sp.null_vector()).reshape(4, 4)
    return 0.5 * (rho + rho.conj().T)
