"""One-particle density matrices on the doubled one-body space.

The doubled space stacks a mode vector on top of its conjugate copy.  A
generalized one-particle density matrix (1-pdm) is the 2M x 2M block matrix

    Gamma = [[gamma, alpha], [conj(alpha), 1 + conj(gamma)]]

with gamma Hermitian positive semidefinite and alpha symmetric.  This module
provides the sign matrix S = diag(1, -1), the antiunitary block-swap
conjugation J, admissibility and purity diagnostics, and JSON round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12


def sign_matrix(modes: int) -> np.ndarray:
    """S = diag(identity, -identity) on the doubled space."""
    s = np.ones(2 * modes)
    s[modes:] = -1.0
    return np.diag(s)


def j_vector(vec: np.ndarray) -> np.ndarray:
    """Apply the antiunitary J (conjugate and swap the two blocks) to a vector."""
    vec = np.asarray(vec)
    m = vec.shape[0] // 2
    return np.concatenate([np.conj(vec[m:]), np.conj(vec[:m])])


def j_conjugate(mat: np.ndarray) -> np.ndarray:
    """Return J @ mat @ J for a 2M x 2M matrix.

    J acts entrywise by complex conjugation composed with the block swap, so
    the blocks of the result are the conjugates of the swapped blocks.
    """
    mat = np.asarray(mat)
    m = mat.shape[0] // 2
    out = np.empty_like(mat)
    out[:m, :m] = np.conj(mat[m:, m:])
    out[:m, m:] = np.conj(mat[m:, :m])
    out[m:, :m] = np.conj(mat[:m, m:])
    out[m:, m:] = np.conj(mat[:m, :m])
    return out


def operator_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(mat), ord=2))


@dataclass(frozen=True)
class OnePdm:
    """Pair (gamma, alpha) of one-body blocks of a generalized 1-pdm.

    gamma must be Hermitian and alpha symmetric, both M x M; violations
    beyond HERMITICITY_TOL (relative to scale) are rejected at construction.
    """

    gamma: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=complex)
        alpha = np.asarray(self.alpha, dtype=complex)
        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
            raise ValueError("gamma must be a square matrix")
        if alpha.shape != gamma.shape:
            raise ValueError("alpha must have the same shape as gamma")
        scale = max(1.0, operator_norm(gamma), operator_norm(alpha))
        if operator_norm(gamma - gamma.conj().T) > HERMITICITY_TOL * scale:
            raise ValueError("gamma is not Hermitian")
        if operator_norm(alpha - alpha.T) > HERMITICITY_TOL * scale:
            raise ValueError("alpha is not symmetric")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "alpha", alpha)

    @property
    def modes(self) -> int:
        return self.gamma.shape[0]


def full_gamma(p: OnePdm) -> np.ndarray:
    """Assemble the 2M x 2M doubled matrix from the (gamma, alpha) blocks."""
    m = p.modes
    out = np.empty((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = p.gamma
    out[:m, m:] = p.alpha
    out[m:, :m] = np.conj(p.alpha)
    out[m:, m:] = np.eye(m) + np.conj(p.gamma)
    return out


def is_admissible(p: OnePdm, tol: float = 1e-10) -> tuple[bool, float]:
    """Check gamma >= 0 and the Schur-complement condition of admissibility.

    The quantitative condition is

        gamma - alpha (1 + conj(gamma))^{-1} alpha^* >= 0,

    equivalent to Gamma + S/2 >= S/2 ... >= 0 on the doubled space.  Returns
    (ok, defect) where defect is the most negative eigenvalue encountered
    (0.0 when both blocks are safely PSD).
    """
    m = p.modes
    gmin = float(np.linalg.eigvalsh(p.gamma)[0])
    defect = min(0.0, gmin)
    if gmin < -tol:
        return False, gmin
    try:
        inner = np.linalg.solve(np.eye(m) + np.conj(p.gamma), p.alpha.conj().T)
    except np.linalg.LinAlgError:
        return False, -np.inf
    schur = p.gamma - p.alpha @ inner
    schur = 0.5 * (schur + schur.conj().T)
    smin = float(np.linalg.eigvalsh(schur)[0])
    defect = min(defect, smin)
    return defect >= -tol, defect


def particle_number(p: OnePdm) -> float:
    """Expected particle number Tr(gamma)."""
    return float(np.trace(p.gamma).real)


def purity_defect(p: OnePdm) -> float:
    """Operator norm of Gamma S Gamma + Gamma; zero iff the state is quasi-free pure."""
    g = full_gamma(p)
    s = sign_matrix(p.modes)
    resid = g @ s @ g + g
    return operator_norm(0.5 * (resid + resid.conj().T))


def pairing_defects(p: OnePdm) -> tuple[float, float]:
    """Two candidate admissibility defects, for numerical comparison only.

    Returns (schur_defect, product_defect) where schur_defect is the minimal
    eigenvalue of gamma - alpha (1+conj(gamma))^{-1} alpha^* and
    product_defect is the minimal eigenvalue of the Hermitian part of
    gamma(1+gamma) - alpha alpha^*.  Whether the second being PSD is
    equivalent to admissibility is left open; nothing here asserts it.
    """
    m = p.modes
    inner = np.linalg.solve(np.eye(m) + np.conj(p.gamma), p.alpha.conj().T)
    schur = p.gamma - p.alpha @ inner
    schur = 0.5 * (schur + schur.conj().T)
    prod = p.gamma @ (np.eye(m) + p.gamma) - p.alpha @ p.alpha.conj().T
    prod = 0.5 * (prod + prod.conj().T)
    return (
        float(np.linalg.eigvalsh(schur)[0]),
        float(np.linalg.eigvalsh(prod)[0]),
    )


def _complex_to_json(mat: np.ndarray) -> dict:
    mat = np.asarray(mat, dtype=complex)
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def _complex_from_json(obj: dict) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def to_json(p: OnePdm) -> dict:
    return {
        "modes": p.modes,
        "gamma": _complex_to_json(p.gamma),
        "alpha": _complex_to_json(p.alpha),
    }


def from_json(obj: dict) -> OnePdm:
    p = OnePdm(_complex_from_json(obj["gamma"]), _complex_from_json(obj["alpha"]))
    if p.modes != obj.get("modes", p.modes):
        raise ValueError("mode count does not match block shapes")
    return p
