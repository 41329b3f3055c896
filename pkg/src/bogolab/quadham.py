"""Quadratic Hamiltonians: energies, ground states, and the spectral flag.

A quadratic Hamiltonian is encoded by the doubled matrix A = [[a, b],
[conj(b), conj(a)]] with a Hermitian and b symmetric; the operator is

    H_A = sum_ij (F_i, A F_j) A^*(F_i) A(F_j)

over the doubled basis, which is not normal-ordered and carries the vacuum
energy Tr(conj(a)).  For PSD A the ground energy over quasi-free states is
sum(d) with d the symplectic eigenvalues, attained at a pure quasi-free
state whose 1-pdm is assembled from the diagonalizing map.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import fock
from .onepdm import OnePdm, full_gamma, operator_norm, sign_matrix
from .symplectic import DiagonalizationResult, diagonalize_quadratic

BLOCK_TOL = 1e-12
FLAG_TOL = 1e-10


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Coefficient blocks (a, b): a Hermitian one-body part, b symmetric pairing part."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("a and b must be square matrices of equal shape")
        scale = max(1.0, operator_norm(a), operator_norm(b))
        if operator_norm(a - a.conj().T) > BLOCK_TOL * scale:
            raise ValueError("block a is not Hermitian")
        if operator_norm(b - b.T) > BLOCK_TOL * scale:
            raise ValueError("block b is not symmetric")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def modes(self) -> int:
        return self.a.shape[0]

    def doubled(self) -> np.ndarray:
        m = self.modes
        out = np.empty((2 * m, 2 * m), dtype=complex)
        out[:m, :m] = self.a
        out[:m, m:] = self.b
        out[m:, :m] = np.conj(self.b)
        out[m:, m:] = np.conj(self.a)
        return out


def energy_of_onepdm(ham: QuadraticHamiltonian, p: OnePdm) -> float:
    """State energy Tr(A Gamma); the imaginary residue is reported if visible."""
    val = complex(np.trace(ham.doubled() @ full_gamma(p)))
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-10 * scale:
        warnings.warn(f"energy has imaginary residue {val.imag:.3e}", RuntimeWarning)
    return float(val.real)


def diagonalize(ham: QuadraticHamiltonian, tol: float = 1e-10) -> DiagonalizationResult:
    return diagonalize_quadratic(ham.doubled(), tol=tol)


def ground_energy(ham: QuadraticHamiltonian) -> tuple[float, np.ndarray]:
    """Ground-state energy sum(d) and the symplectic eigenvalues d."""
    result = diagonalize(ham)
    return float(np.sum(result.values)), result.values


def ground_onepdm(ham: QuadraticHamiltonian) -> OnePdm:
    """1-pdm of the minimizing pure quasi-free state.

    With the diagonalizing map V the minimizer is Gamma = V [[0,0],[0,1]] V^*,
    in blocks gamma = V V^dagger and alpha = V U^T.
    """
    result = diagonalize(ham)
    u, v = result.map.U, result.map.V
    gamma = v @ v.conj().T
    alpha = v @ u.T
    return OnePdm(gamma=0.5 * (gamma + gamma.conj().T), alpha=0.5 * (alpha + alpha.T))


def spectral_flag(ham: QuadraticHamiltonian, tol: float = FLAG_TOL) -> np.ndarray:
    """Spectral projection-like flag 1_{(-inf,0)}[A S] via the diagonalizing map.

    A S is similar to diag(d, -d) through T = (V^*)^{-1}; the flag selects
    the -d branch, excluding symplectic eigenvalues below tol, which are
    treated as degenerate kernel directions and left out of the projection.
    The result is idempotent but not Hermitian in general.
    """
    result = diagonalize(ham)
    m = ham.modes
    s = sign_matrix(m)
    vd = result.map.doubled()
    t = s @ vd @ s  # (V^*)^{-1}
    scale = max(1.0, float(np.max(result.values)))
    sel = np.concatenate([np.zeros(m), (result.values > tol * scale).astype(float)])
    return t @ np.diag(sel) @ vd.conj().T


def assemble_fock(ham: QuadraticHamiltonian, space: fock.FockSpace) -> fock.ManyBodyOperator:
    """Exact truncated-space matrix of H_A.

    Assembled in the normal-ordered equivalent form
    2 sum a_ij a_i^* a_j + Tr(a) + sum b_ij a_i^* a_j^* + sum conj(b)_ij a_i a_j,
    identical to the defining ordered double sum on the untruncated space and
    with smaller truncation artifacts at finite cutoff.
    """
    import scipy.sparse as sp

    if space.modes != ham.modes:
        raise ValueError("mode count mismatch")
    low, high = fock.mode_operators(space)
    dim = space.dimension
    mat = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(ham.modes):
        for j in range(ham.modes):
            if ham.a[i, j] != 0:
                mat = mat + 2.0 * ham.a[i, j] * (high[i] @ low[j])
            if ham.b[i, j] != 0:
                mat = mat + ham.b[i, j] * (high[i] @ high[j])
                mat = mat + np.conj(ham.b[i, j]) * (low[i] @ low[j])
    mat = mat + float(np.trace(ham.a).real) * sp.identity(dim, dtype=complex, format="csr")
    return fock.ManyBodyOperator(space=space, matrix=mat.tocsr())


def fock_verify_ground(ham: QuadraticHamiltonian, cutoffs) -> list[dict]:
    """Compare sum(d) against exact truncated ground energies at several cutoffs."""
    analytic, dvals = ground_energy(ham)
    report = []
    for cutoff in cutoffs:
        space = fock.enumerate_basis(ham.modes, cutoff)
        op = assemble_fock(ham, space)
        energy, vec = fock.ground_state(op, sector="full")
        resid = float(np.linalg.norm(op.matrix @ vec - energy * vec))
        report.append({
            "cutoff": cutoff,
            "dimension": space.dimension,
            "oracle_energy": energy,
            "analytic_energy": analytic,
            "abs_error": abs(energy - analytic),
            "residual": resid,
        })
    return report
