"""Exact truncated Fock space for a finite number of bosonic modes.

The basis consists of occupation tuples with total number at most the
cutoff, ordered by total number and lexicographically within each total.
Mode operators are assembled as sparse matrices; everything downstream
(Hamiltonians, ground states, moments, 1-pdm extraction) is exact linear
algebra on this truncation and serves as the oracle for the analytic
modules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .onepdm import OnePdm

DEFAULT_DIMENSION_LIMIT = 2_000_000
DENSE_EIG_CUTOFF = 1200
SYMMETRY_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Eigensolver failed to converge; carries the residual norm."""

    def __init__(self, message: str, residual: float = np.nan):
        super().__init__(message)
        self.residual = residual


def _occupations(modes: int, total: int):
    """Occupation tuples of given total, lexicographically increasing."""
    if modes == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _occupations(modes - 1, total - head):
            yield (head,) + rest


@dataclass(frozen=True)
class FockSpace:
    """Truncated bosonic Fock space over `modes` modes with total number <= cutoff."""

    modes: int
    cutoff: int
    basis: tuple
    index: dict

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def sector_indices(self, total: int) -> np.ndarray:
        return np.array([k for k, occ in enumerate(self.basis) if sum(occ) == total], dtype=int)


def enumerate_basis(modes: int, cutoff: int, dimension_limit: int = DEFAULT_DIMENSION_LIMIT) -> FockSpace:
    if modes < 1:
        raise ValueError("need at least one mode")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    dim = math.comb(cutoff + modes, modes)
    if dim > dimension_limit:
        raise ValueError(f"basis dimension {dim} exceeds limit {dimension_limit}")
    basis = tuple(
        occ for total in range(cutoff + 1) for occ in _occupations(modes, total)
    )
    index = {occ: k for k, occ in enumerate(basis)}
    return FockSpace(modes=modes, cutoff=cutoff, basis=basis, index=index)


_OPERATOR_CACHE: dict = {}
_OCCUPATION_CACHE: dict = {}


def mode_operators(space: FockSpace) -> tuple[list, list]:
    """Sparse annihilation and creation matrices, one per mode.

    Creation out of the top total-number sector is truncated to zero, as it
    must be on a finite basis.  Results are cached per (modes, cutoff).
    """
    key = (space.modes, space.cutoff)
    if key in _OPERATOR_CACHE:
        return _OPERATOR_CACHE[key]
    dim = space.dimension
    lowering = []
    for i in range(space.modes):
        rows, cols, vals = [], [], []
        for k, occ in enumerate(space.basis):
            n = occ[i]
            if n == 0:
                continue
            target = occ[:i] + (n - 1,) + occ[i + 1:]
            rows.append(space.index[target])
            cols.append(k)
            vals.append(math.sqrt(n))
        lowering.append(sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim)))
    raising = [op.conj().T.tocsr() for op in lowering]
    _OPERATOR_CACHE[key] = (lowering, raising)
    return lowering, raising


def number_operator(space: FockSpace) -> sp.csr_matrix:
    totals = np.array([sum(occ) for occ in space.basis], dtype=float)
    return sp.diags(totals).tocsr()


@dataclass(frozen=True)
class ManyBodyOperator:
    """A sparse operator tied to its Fock space."""

    space: FockSpace
    matrix: sp.spmatrix


def check_twobody_symmetry(h: np.ndarray, w: np.ndarray | None, tol: float = SYMMETRY_TOL):
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - h.conj().T)) > tol * scale:
        raise ValueError("one-body coefficient matrix is not Hermitian")
    if w is None:
        return
    w = np.asarray(w, dtype=complex)
    wscale = max(1.0, float(np.max(np.abs(w))))
    if np.max(np.abs(w - w.transpose(1, 0, 3, 2))) > tol * wscale:
        raise ValueError("two-body coefficients violate exchange symmetry W[mnpq] = W[nmqp]")
    if np.max(np.abs(np.conj(w) - w.transpose(3, 2, 1, 0))) > tol * wscale:
        raise ValueError("two-body coefficients violate Hermiticity conj(W[mnpq]) = W[qpnm]")


def assemble_hamiltonian(space: FockSpace, h: np.ndarray, w: np.ndarray | None = None,
                         tol: float = SYMMETRY_TOL) -> ManyBodyOperator:
    """H = sum h_mn a_m^* a_n + (1/2) sum W_mnpq a_m^* a_n^* a_p a_q."""
    check_twobody_symmetry(h, w, tol=tol)
    h = np.asarray(h, dtype=complex)
    low, high = mode_operators(space)
    dim = space.dimension
    mat = sp.csr_matrix((dim, dim), dtype=complex)
    for m in range(space.modes):
        for n in range(space.modes):
            if h[m, n] != 0:
                mat = mat + h[m, n] * (high[m] @ low[n])
    if w is not None:
        w = np.asarray(w, dtype=complex)
        for m in range(space.modes):
            for n in range(space.modes):
                left = high[m] @ high[n]
                for p in range(space.modes):
                    for q in range(space.modes):
                        if w[m, n, p, q] != 0:
                            mat = mat + 0.5 * w[m, n, p, q] * (left @ (low[p] @ low[q]))
    return ManyBodyOperator(space=space, matrix=mat.tocsr())


def _lowest_eigpair(mat: sp.spmatrix) -> tuple[float, np.ndarray]:
    dim = mat.shape[0]
    if dim <= DENSE_EIG_CUTOFF:
        dense = np.asarray(mat.todense())
        vals, vecs = np.linalg.eigh(dense)
        return float(vals[0]), np.asarray(vecs[:, 0]).ravel()
    try:
        vals, vecs = spla.eigsh(mat.tocsc().astype(complex), k=1, which="SA")
    except spla.ArpackNoConvergence as exc:
        resid = np.nan
        if len(exc.eigenvalues):
            v = exc.eigenvectors[:, 0]
            resid = float(np.linalg.norm(mat @ v - exc.eigenvalues[0] * v))
        raise ConvergenceError("Lanczos iteration did not converge", residual=resid) from exc
    return float(vals[0]), vecs[:, 0]


def ground_state(op: ManyBodyOperator, sector="full") -> tuple[float, np.ndarray]:
    """Lowest eigenpair, either over the full truncated space or a fixed-N sector.

    The returned vector lives in the full space (zero outside the sector).
    """
    mat = op.matrix
    if sector == "full":
        energy, vec = _lowest_eigpair(mat)
        full = vec
    else:
        total = int(sector)
        idx = op.space.sector_indices(total)
        if idx.size == 0:
            raise ValueError(f"sector N={total} is empty at cutoff {op.space.cutoff}")
        sub = mat[np.ix_(idx, idx)] if sp.issparse(mat) else mat[np.ix_(idx, idx)]
        sub = sp.csr_matrix(sub)
        energy, vec = _lowest_eigpair(sub)
        full = np.zeros(op.space.dimension, dtype=complex)
        full[idx] = vec
    resid = float(np.linalg.norm(mat @ full - energy * full))
    if resid > 1e-8 * max(1.0, abs(energy)):
        raise ConvergenceError("eigenpair residual too large", residual=resid)
    # normalize global phase: largest component real positive
    piv = full[int(np.argmax(np.abs(full)))]
    if abs(piv) > 0:
        full = full * (np.conj(piv) / abs(piv))
    return energy, full


_LABEL_KINDS = ("a", "c")


def _label_matrix(space: FockSpace, label, low, high):
    kind, mode = label
    if kind not in _LABEL_KINDS:
        raise ValueError(f"unknown operator label kind {kind!r}")
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode index {mode} out of range")
    return low[mode] if kind == "a" else high[mode]


def expectation(space: FockSpace, state, labels) -> complex:
    """Expectation of an ordered product of mode operators.

    `labels` is a sequence of ("a", i) or ("c", i) pairs, leftmost applied
    last; `state` is either a normalized vector or a density operator
    (sparse or dense, trace one).
    """
    low, high = mode_operators(space)
    mats = [_label_matrix(space, lbl, low, high) for lbl in labels]
    state = state if sp.issparse(state) else np.asarray(state)
    if not sp.issparse(state) and state.ndim == 1:
        w = state.astype(complex)
        for mat in reversed(mats):
            w = mat @ w
        return complex(np.vdot(state, w))
    prod = sp.identity(space.dimension, dtype=complex, format="csr")
    for mat in mats:
        prod = prod @ mat
    rho = state if sp.issparse(state) else sp.csr_matrix(state)
    return complex((prod @ rho).diagonal().sum())


def diagonal_expectation(space: FockSpace, weights: np.ndarray, labels) -> complex:
    """Tr(c_1 ... c_k rho) for a density diagonal in the occupation basis.

    Every mode operator maps a basis state to at most one basis state, so the
    trace reduces to tracking occupations and amplitudes vectorized over the
    whole basis; creation beyond the cutoff is truncated to zero exactly as
    in the sparse matrices.
    """
    key = (space.modes, space.cutoff)
    occ0 = _OCCUPATION_CACHE.get(key)
    if occ0 is None:
        occ0 = np.array(space.basis, dtype=np.int64)
        _OCCUPATION_CACHE[key] = occ0
    cur = occ0.copy()
    amp = np.ones(space.dimension)
    for kind, mode in reversed(list(labels)):
        if kind == "a":
            amp *= np.sqrt(np.maximum(cur[:, mode], 0))
            cur[:, mode] -= 1
        elif kind == "c":
            cur[:, mode] += 1
            amp *= np.sqrt(np.maximum(cur[:, mode], 0))
            amp[cur.sum(axis=1) > space.cutoff] = 0.0
        else:
            raise ValueError(f"unknown operator label kind {kind!r}")
    diagonal = np.all(cur == occ0, axis=1)
    return complex(np.sum(np.asarray(weights)[diagonal] * amp[diagonal]))


def onepdm_of_state(space: FockSpace, state) -> OnePdm:
    """Extract (gamma, alpha) with gamma_mn = <a_n^* a_m>, alpha_mn = <a_n a_m>."""
    m = space.modes
    gamma = np.empty((m, m), dtype=complex)
    alpha = np.empty((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            gamma[a, b] = expectation(space, state, [("c", b), ("a", a)])
            alpha[a, b] = expectation(space, state, [("a", b), ("a", a)])
    gamma = 0.5 * (gamma + gamma.conj().T)
    alpha = 0.5 * (alpha + alpha.T)
    return OnePdm(gamma=gamma, alpha=alpha)


def spectrum_record(space: FockSpace, sector, energy: float, residual: float) -> dict:
    """JSON-ready summary of a ground-state computation."""
    return {
        "modes": space.modes,
        "cutoff": space.cutoff,
        "dimension": space.dimension,
        "sector": sector,
        "energy": energy,
        "residual": residual,
    }
