"""Coherent displacements and the Bogoliubov energy functional.

A Weyl displacement shifts each field operator by a scalar,
U_phi^* A(F) U_phi = A(F) + (F, phi (+) Jphi), so moments in a displaced
quasi-free state expand multilinearly into Wick moments times scalar
factors.  The Bogoliubov energy of a trial (gamma, alpha, phi) under a
discrete two-body Hamiltonian closes over the shifted blocks
gamma~ = gamma + |phi><phi| and alpha~ = alpha + phi phi^T.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import fock
from .onepdm import OnePdm
from .quasifree import label_vector, wick_expectation

TOY_SCAN_POINTS = 10_000
TOY_TOL = 1e-10


@dataclass(frozen=True)
class ManyBodyCoefficients:
    """Discrete one-body matrix h and two-body tensor W of a Hamiltonian."""

    h: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        w = np.asarray(self.w, dtype=complex)
        fock.check_twobody_symmetry(h, w)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", w)

    @property
    def modes(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class BogoliubovTrial:
    """Quasi-free data (1-pdm) plus a coherent displacement vector."""

    pdm: OnePdm
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=complex)
        if phi.shape != (self.pdm.modes,):
            raise ValueError("displacement vector length must match the mode count")
        object.__setattr__(self, "phi", phi)


def displacement_scalar(f: np.ndarray, phi: np.ndarray) -> complex:
    """(F, phi (+) J phi), the shift of A(F) under the displacement by phi."""
    doubled = np.concatenate([phi, np.conj(phi)])
    return complex(np.conj(f) @ doubled)


def displace_expectation(p: OnePdm, phi: np.ndarray, ops) -> complex:
    """Moment of an ordered operator product in the displaced quasi-free state.

    Expands each factor as A(F) + c(F) and sums Wick moments of the residual
    sub-products weighted by the displaced-out scalars.
    """
    phi = np.asarray(phi, dtype=complex)
    vecs = [label_vector(op, p.modes) for op in ops]
    scalars = [displacement_scalar(v, phi) for v in vecs]
    k = len(vecs)
    total = 0.0 + 0.0j
    for taken in itertools.product((False, True), repeat=k):
        coeff = 1.0 + 0.0j
        rest = []
        for flag, vec, scal in zip(taken, vecs, scalars):
            if flag:
                coeff *= scal
            else:
                rest.append(vec)
        if coeff != 0:
            total += coeff * wick_expectation(p, rest, max_degree=max(8, k))
    return total


def displacement_operator(space: fock.FockSpace, phi) -> np.ndarray:
    """Dense truncated Weyl operator exp[a^*(phi) - a(phi)] for oracle checks."""
    phi = np.asarray(phi, dtype=complex)
    low, high = fock.mode_operators(space)
    gen = sum(phi[i] * high[i] - np.conj(phi[i]) * low[i] for i in range(space.modes))
    return scipy.linalg.expm(np.asarray(gen.todense()))


def bogoliubov_energy(trial: BogoliubovTrial, coeffs: ManyBodyCoefficients) -> float:
    """Energy of H = sum h a^*a + (1/2) sum W a^*a^*aa in the displaced state.

    With gamma~ = gamma + |phi><phi| and alpha~ = alpha + phi phi^T the
    fourth moment contracts to the direct and exchange gamma~ terms plus the
    pairing term, minus the doubly counted pure-condensate piece.
    """
    if trial.pdm.modes != coeffs.modes:
        raise ValueError("mode count mismatch between trial and coefficients")
    gamma = trial.pdm.gamma
    alpha = trial.pdm.alpha
    phi = trial.phi
    gamma_t = gamma + np.outer(phi, np.conj(phi))
    alpha_t = alpha + np.outer(phi, phi)
    e1 = np.einsum("mn,nm->", coeffs.h, gamma_t)
    w = coeffs.w
    direct = np.einsum("mnpq,pm,qn->", w, gamma_t, gamma_t)
    exchange = np.einsum("mnpq,qm,pn->", w, gamma_t, gamma_t)
    pairing = np.einsum("mnpq,mn,pq->", w, np.conj(alpha_t), alpha_t)
    condensate = np.einsum("mnpq,m,n,p,q->", w, np.conj(phi), np.conj(phi), phi, phi)
    val = e1 + 0.5 * (direct + exchange + pairing - 2.0 * condensate)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        warnings.warn(f"energy has imaginary residue {val.imag:.3e}", RuntimeWarning)
    return float(val.real)


def toy_coefficients() -> ManyBodyCoefficients:
    """Single mode, h = 0, W_0000 = 2, i.e. the Hamiltonian a^*a^*aa."""
    return ManyBodyCoefficients(h=np.zeros((1, 1)), w=np.full((1, 1, 1, 1), 2.0))


def toy_trial_energy(n_total: float, lam: float) -> float:
    """Toy-model energy of the trial with occupation lam and condensate N - lam.

    Direct evaluation of x^2 + x(4 lam - 2 sqrt(lam(1+lam))) + 2 lam^2
    + lam(1+lam) at x = N - lam, the squeezing phase chosen to make the
    pairing cross term negative.
    """
    x = n_total - lam
    root = math.sqrt(lam * (1.0 + lam))
    return x * x + x * (4.0 * lam - 2.0 * root) + 2.0 * lam * lam + lam * (1.0 + lam)


def _toy_reduced(n_total: float, lam: np.ndarray) -> np.ndarray:
    root = np.sqrt(lam * (1.0 + lam))
    return n_total ** 2 + 2.0 * n_total * (lam - root) + lam + 2.0 * lam * root


def toy_bogoliubov_energy(n_total: float, scan_points: int = TOY_SCAN_POINTS,
                          tol: float = TOY_TOL) -> tuple[float, float]:
    """Minimal toy Bogoliubov energy over lam in [0, N] and its minimizer.

    Dense scan followed by golden-section refinement; the reduced objective
    is checked pointwise against the unreduced trial energy.
    """
    if n_total < 0:
        raise ValueError("particle budget must be nonnegative")
    if n_total == 0:
        return 0.0, 0.0
    grid = np.linspace(0.0, n_total, scan_points)
    vals = _toy_reduced(n_total, grid)
    for lam in (grid[0], grid[len(grid) // 2], grid[-1]):
        direct = toy_trial_energy(n_total, float(lam))
        reduced = float(_toy_reduced(n_total, np.array([lam]))[0])
        if abs(direct - reduced) > 1e-9 * max(1.0, abs(direct)):
            raise AssertionError("reduced toy objective disagrees with the trial energy")
    best = int(np.argmin(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, scan_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _toy_reduced(n_total, np.array([c]))[0]
    fd = _toy_reduced(n_total, np.array([d]))[0]
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _toy_reduced(n_total, np.array([c]))[0]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _toy_reduced(n_total, np.array([d]))[0]
    lam_star = 0.5 * (a + b)
    energy = float(_toy_reduced(n_total, np.array([lam_star]))[0])
    return energy, float(lam_star)
