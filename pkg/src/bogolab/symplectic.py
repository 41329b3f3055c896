"""Bogoliubov maps and symplectic diagonalization on the doubled space.

A Bogoliubov map is a block matrix V = [[U, V], [conj(V), conj(U)]] that
commutes with the conjugation J and preserves the S-form, which in blocks
reads U U^* = 1 + V V^* and U^* U = 1 + V^T conj(V).  Such maps diagonalize
both admissible 1-pdms (to diag(lambda, 1 + lambda)) and PSD quadratic-form
matrices (to diag(d, d)); both constructions go through the Hermitian matrix
C = X^{1/2} S X^{1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .onepdm import OnePdm, full_gamma, is_admissible, j_conjugate, operator_norm, sign_matrix

SYMPLECTIC_TOL = 1e-10
COMPOSE_TOL = 1e-8
KERNEL_REG = 1e-10


@dataclass(frozen=True)
class BogoliubovMap:
    """Blocks (U, V) of a Bogoliubov transformation."""

    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.U, dtype=complex)
        v = np.asarray(self.V, dtype=complex)
        if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("U and V must be square matrices of equal shape")
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "V", v)

    @property
    def modes(self) -> int:
        return self.U.shape[0]

    def doubled(self) -> np.ndarray:
        m = self.modes
        out = np.empty((2 * m, 2 * m), dtype=complex)
        out[:m, :m] = self.U
        out[:m, m:] = self.V
        out[m:, :m] = np.conj(self.V)
        out[m:, m:] = np.conj(self.U)
        return out

    @classmethod
    def identity(cls, modes: int) -> "BogoliubovMap":
        return cls(np.eye(modes), np.zeros((modes, modes)))

    @classmethod
    def from_doubled(cls, mat: np.ndarray, tol: float = SYMPLECTIC_TOL) -> "BogoliubovMap":
        mat = np.asarray(mat, dtype=complex)
        m = mat.shape[0] // 2
        cand = cls(mat[:m, :m], mat[:m, m:])
        if operator_norm(mat - cand.doubled()) > tol * max(1.0, operator_norm(mat)):
            raise ValueError("matrix does not have the J-commuting block form")
        defect = symplectic_defect(cand)
        if defect > tol:
            raise ValueError(f"matrix is not symplectic (defect {defect:.3e})")
        return cand


def symplectic_defect(v: BogoliubovMap) -> float:
    """Norm of V^* S V - S; zero for an exact Bogoliubov map."""
    m = v.modes
    s = sign_matrix(m)
    d = v.doubled()
    return operator_norm(d.conj().T @ s @ d - s)


def compose(a: BogoliubovMap, b: BogoliubovMap, tol: float = COMPOSE_TOL) -> BogoliubovMap:
    """Product map a b; rejects numerically degraded compositions."""
    prod = a.doubled() @ b.doubled()
    m = a.modes
    out = BogoliubovMap(prod[:m, :m], prod[:m, m:])
    defect = symplectic_defect(out)
    if defect > tol:
        raise ValueError(f"composition lost the symplectic relations (defect {defect:.3e})")
    return out


def inverse(v: BogoliubovMap) -> BogoliubovMap:
    """Inverse S V^* S, in blocks (U^dagger, -V^T)."""
    return BogoliubovMap(v.U.conj().T, -v.V.T)


def shale_stinespring_norm(v: BogoliubovMap) -> float:
    """Tr(V V^*), the implementability quantity of the map."""
    return float(np.sum(np.abs(v.V) ** 2))


def random_bogoliubov(modes: int, rng: np.random.Generator, strength: float = 0.5) -> BogoliubovMap:
    """Random map from the exponential of a random Lie-algebra element.

    The generator [[A, B], [conj(B), conj(A)]] with A anti-Hermitian and B
    symmetric exponentiates into the group, so the result is exactly
    symplectic up to the accuracy of expm.
    """
    a = rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))
    a = 0.5 * (a - a.conj().T)
    b = rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))
    b = 0.5 * (b + b.T)
    gen = np.block([[a, b], [np.conj(b), np.conj(a)]]) * strength
    w = scipy.linalg.expm(gen)
    return BogoliubovMap(w[:modes, :modes], w[:modes, modes:])


def squeeze_map(r: float) -> BogoliubovMap:
    """Single-mode squeeze with U = cosh(r), V = sinh(r)."""
    return BogoliubovMap(np.array([[np.cosh(r)]]), np.array([[np.sinh(r)]]))


@dataclass(frozen=True)
class DiagonalizationResult:
    """Diagonalizing map, the M diagonal values sorted ascending, and the
    residual norm of the off-diagonal remainder after transformation."""

    map: BogoliubovMap
    values: np.ndarray
    residual: float
    kernel_dim: int = 0

    def to_json(self) -> dict:
        return {
            "U": {"re": self.map.U.real.tolist(), "im": self.map.U.imag.tolist()},
            "V": {"re": self.map.V.real.tolist(), "im": self.map.V.imag.tolist()},
            "values": np.asarray(self.values).tolist(),
            "residual": self.residual,
            "kernel_dim": self.kernel_dim,
        }


def _psd_sqrt(mat: np.ndarray, floor: float = 0.0) -> np.ndarray:
    w, q = np.linalg.eigh(mat)
    w = np.clip(w, floor, None)
    return (q * np.sqrt(w)) @ q.conj().T


def _fix_phases(cols: np.ndarray) -> np.ndarray:
    out = cols.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        piv = out[idx, k]
        if abs(piv) > 0:
            out[:, k] *= np.conj(piv) / abs(piv)
    return out


def _cluster_slices(values: np.ndarray, gap: float) -> list[slice]:
    slices = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > gap:
            slices.append(slice(start, k))
            start = k
    return slices


def _diagonalize_doubled(x: np.ndarray, modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Shared core: eigenvectors of S x with positive S-norm, for x > 0.

    Returns (values c sorted ascending, columns v with (v_i, S v_j) = delta_ij
    and S x v_i = ... i.e. x v_i = c_i S v_i).  Eigenvectors of the Hermitian
    C = x^{1/2} S x^{1/2} push forward through S x^{1/2}; their C-orthogonality
    is exactly S-orthogonality of the images, so degenerate clusters come out
    S-orthonormal up to roundoff, which a Loewdin pass in the S-inner product
    then cleans up.
    """
    s = sign_matrix(modes)
    root = _psd_sqrt(x)
    c = root @ s @ root
    c = 0.5 * (c + c.conj().T)
    w, q = np.linalg.eigh(c)
    pos = w > 0
    if int(np.sum(pos)) != modes:
        raise np.linalg.LinAlgError(
            "spectrum of the doubled matrix did not split into +/- pairs"
        )
    cvals = w[pos]
    cols = s @ root @ q[:, pos]
    cols = cols / np.sqrt(cvals)[None, :]
    order = np.argsort(cvals)
    cvals = cvals[order]
    cols = cols[:, order]
    gap = 1e-8 * max(1.0, cvals[-1])
    for sl in _cluster_slices(cvals, gap):
        block = cols[:, sl]
        gram = block.conj().T @ s @ block
        gram = 0.5 * (gram + gram.conj().T)
        gw, gq = np.linalg.eigh(gram)
        inv_root = (gq / np.sqrt(gw)) @ gq.conj().T
        cols[:, sl] = block @ inv_root
    return cvals, _fix_phases(cols)


def diagonalize_onepdm(p: OnePdm, tol: float = SYMPLECTIC_TOL) -> DiagonalizationResult:
    """Bogoliubov map bringing an admissible 1-pdm to diag(lambda, 1+lambda).

    Works on Gamma_1 = Gamma + S/2, which is positive definite exactly when
    Gamma is admissible; its S-eigenvalues come in pairs +-(lambda + 1/2).
    """
    ok, defect = is_admissible(p, tol=max(tol, 1e-10))
    if not ok:
        raise ValueError(f"1-pdm is not admissible (defect {defect:.3e})")
    m = p.modes
    gamma_full = full_gamma(p)
    s = sign_matrix(m)
    gamma1 = gamma_full + 0.5 * s
    cvals, cols = _diagonalize_doubled(gamma1, m)
    lam = cvals - 0.5
    lam = np.where(np.abs(lam) < max(tol, 1e-12) * max(1.0, cvals[-1]), 0.0, lam)
    if np.any(lam < 0):
        raise ValueError("negative occupation encountered; 1-pdm too close to inadmissible")
    vmap = BogoliubovMap(cols[:m, :], np.conj(cols[m:, :]))
    transformed = vmap.doubled().conj().T @ gamma_full @ vmap.doubled()
    target = np.diag(np.concatenate([lam, 1.0 + lam]))
    residual = operator_norm(transformed - target)
    return DiagonalizationResult(map=vmap, values=lam, residual=residual)


def diagonalize_quadratic(a_doubled: np.ndarray, tol: float = SYMPLECTIC_TOL) -> DiagonalizationResult:
    """Bogoliubov map bringing a PSD quadratic-form matrix to diag(d, d).

    A kernel is handled by the regularization A + delta with
    delta = KERNEL_REG * ||A||; indefinite input is rejected.
    """
    a = np.asarray(a_doubled, dtype=complex)
    a = 0.5 * (a + a.conj().T)
    m = a.shape[0] // 2
    if operator_norm(a - j_conjugate(a)) > 1e-10 * max(1.0, operator_norm(a)):
        raise ValueError("matrix does not commute with the conjugation J")
    scale = max(1.0, operator_norm(a))
    evals = np.linalg.eigvalsh(a)
    if evals[0] < -tol * scale:
        raise ValueError(f"quadratic form is indefinite (min eigenvalue {evals[0]:.3e})")
    delta = KERNEL_REG * scale
    kernel_dim = int(np.sum(evals < delta))
    work = a
    if kernel_dim > 0:
        work = a + delta * np.eye(2 * m)
    cvals, cols = _diagonalize_doubled(work, m)
    vmap = BogoliubovMap(cols[:m, :], np.conj(cols[m:, :]))
    transformed = vmap.doubled().conj().T @ a @ vmap.doubled()
    dvals = np.diag(transformed).real[:m]
    target = np.diag(np.concatenate([dvals, dvals]))
    residual = operator_norm(transformed - target)
    return DiagonalizationResult(map=vmap, values=dvals, residual=residual, kernel_dim=kernel_dim)
