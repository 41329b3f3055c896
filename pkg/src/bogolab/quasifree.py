"""Quasi-free Gibbs states and the Wick moment formula.

A quasi-free state with diagonal occupations lambda_i > 0 is the normalized
Gibbs operator exp[-sum e_i a_i^* a_i] with exponents e_i = ln((1+l_i)/l_i);
modes with lambda_i = 0 are projected onto their vacuum.  Moments of any
product of generalized field operators A(F) follow from the two-point
function and a sum over perfect pairings of the index set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fock
from .onepdm import OnePdm, full_gamma, j_vector

DEFAULT_TAIL_TOL = 1e-8
MAX_WICK_DEGREE = 8


@dataclass(frozen=True)
class QuasiFreeSpec:
    """Diagonal occupation numbers of a quasi-free Gibbs state."""

    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if np.any(lam < 0):
            raise ValueError("occupations must be nonnegative")
        object.__setattr__(self, "lambdas", lam)

    @property
    def modes(self) -> int:
        return self.lambdas.shape[0]

    def onepdm(self) -> OnePdm:
        m = self.modes
        return OnePdm(gamma=np.diag(self.lambdas).astype(complex),
                      alpha=np.zeros((m, m), dtype=complex))


def gibbs_exponents(lambdas) -> tuple[np.ndarray, np.ndarray]:
    """Exponents e_i = ln((1+l)/l) and a mask of vacuum-projected modes.

    Modes with lambda = 0 have no finite exponent; they are flagged in the
    boolean mask and carry a vacuum projector instead.
    """
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam < 0):
        raise ValueError("occupations must be nonnegative")
    zero = lam == 0.0
    exponents = np.full(lam.shape, np.inf)
    nz = ~zero
    exponents[nz] = np.log1p(1.0 / lam[nz])
    return exponents, zero


def required_cutoff(lambdas, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Rough cutoff estimate for a total-number truncation with given tail."""
    lam = np.asarray(lambdas, dtype=float)
    if np.all(lam == 0):
        return 0
    q = float(np.max(lam / (1.0 + lam)))
    n = math.log(tail_tol * (1.0 - q) ** len(lam)) / math.log(q)
    return int(math.ceil(n)) + 1


def build_density(spec: QuasiFreeSpec, space: fock.FockSpace,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[fock.ManyBodyOperator, float]:
    """Truncated normalized Gibbs density, diagonal in the occupation basis.

    Returns (density, tail) where tail is the untruncated probability mass
    lost to the cutoff; a tail above tail_tol is an error naming a cutoff
    that would suffice.
    """
    if spec.modes != space.modes:
        raise ValueError("mode count mismatch between spec and space")
    lam = spec.lambdas
    exponents, zero = gibbs_exponents(lam)
    weights = np.empty(space.dimension, dtype=float)
    for k, occ in enumerate(space.basis):
        if any(zero[i] and occ[i] > 0 for i in range(space.modes)):
            weights[k] = 0.0
            continue
        expo = sum(exponents[i] * occ[i] for i in range(space.modes) if occ[i] > 0)
        weights[k] = math.exp(-expo)
    truncated = float(np.sum(weights))
    full_trace = float(np.prod(1.0 + lam))
    tail = max(0.0, 1.0 - truncated / full_trace)
    if tail > tail_tol:
        raise ValueError(
            f"truncation tail {tail:.3e} exceeds {tail_tol:.1e}; "
            f"a cutoff of about {required_cutoff(lam, tail_tol)} is needed"
        )
    density = sp.diags(weights / truncated).tocsr()
    return fock.ManyBodyOperator(space=space, matrix=density), tail


def label_vector(label, modes: int) -> np.ndarray:
    """Doubled-space vector of a labelled operator: a_i -> e_i, a_i^* -> e_{M+i}."""
    if isinstance(label, np.ndarray):
        if label.shape != (2 * modes,):
            raise ValueError("doubled vector has wrong length")
        return label.astype(complex)
    kind, mode = label
    vec = np.zeros(2 * modes, dtype=complex)
    if kind == "a":
        vec[mode] = 1.0
    elif kind == "c":
        vec[modes + mode] = 1.0
    else:
        raise ValueError(f"unknown operator label kind {kind!r}")
    return vec


def two_point(p: OnePdm, f: np.ndarray, g: np.ndarray) -> complex:
    """State expectation of the ordered product A(F) A(G)."""
    gamma = full_gamma(p)
    return complex(np.conj(g) @ (gamma @ j_vector(f)))


def _pairing_sum(table: np.ndarray, active: list) -> complex:
    if not active:
        return 1.0
    first = active[0]
    rest = active[1:]
    total = 0.0 + 0.0j
    for pos, partner in enumerate(rest):
        weight = table[first, partner]
        if weight != 0:
            total += weight * _pairing_sum(table, rest[:pos] + rest[pos + 1:])
    return total


def wick_expectation(p: OnePdm, ops, max_degree: int = MAX_WICK_DEGREE) -> complex:
    """Moment of an ordered product of generalized operators A(F_1)...A(F_k).

    Odd products vanish; even products are the sum over perfect pairings
    (each pair ordered as in the product) of two-point functions.  `ops`
    entries are ("a", i) / ("c", i) labels or raw doubled vectors.
    """
    vecs = [label_vector(op, p.modes) for op in ops]
    k = len(vecs)
    if k > max_degree:
        raise ValueError(f"product degree {k} exceeds cap {max_degree}")
    if k % 2 == 1:
        return 0.0 + 0.0j
    if k == 0:
        return 1.0 + 0.0j
    gamma = full_gamma(p)
    jvecs = [j_vector(v) for v in vecs]
    table = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i + 1, k):
            table[i, j] = np.conj(vecs[j]) @ (gamma @ jvecs[i])
    return _pairing_sum(table, list(range(k)))


def squeezed_vacuum(space: fock.FockSpace, r: float) -> np.ndarray:
    """Single-mode squeezed vacuum via the new-vacuum exponential formula.

    The vector proportional to exp[-(nu/2mu) a^*a^*] |0> with mu = cosh r,
    nu = sinh r, expanded on the truncated basis and normalized there.  Its
    1-pdm is gamma = sinh^2 r, alpha = -cosh r sinh r.
    """
    if space.modes != 1:
        raise ValueError("squeezed_vacuum is a single-mode helper")
    c = -0.5 * math.tanh(r)
    vec = np.zeros(space.dimension, dtype=complex)
    for n in range(space.cutoff // 2 + 1):
        amp = c ** n * math.sqrt(math.factorial(2 * n)) / math.factorial(n)
        vec[space.index[(2 * n,)]] = amp
    return vec / np.linalg.norm(vec)


def verify_quasifree(spec: QuasiFreeSpec, space: fock.FockSpace,
                     max_degree: int = 6, tail_tol: float = DEFAULT_TAIL_TOL) -> dict:
    """Cross-check Wick moments against the exact truncated Gibbs density.

    Evaluates every ordered product of mode operators up to max_degree over
    at most two modes, both through the pairing formula and through the
    oracle density, and reports the worst absolute deviation.
    """
    import itertools

    density, tail = build_density(spec, space, tail_tol=tail_tol)
    diag_weights = density.matrix.diagonal().real
    p = spec.onepdm()
    labels = [(kind, i) for i in range(min(space.modes, 2)) for kind in ("a", "c")]
    entries = []
    worst = 0.0
    for degree in range(1, max_degree + 1):
        for prod in itertools.product(labels, repeat=degree):
            wick = wick_expectation(p, prod, max_degree=max(max_degree, MAX_WICK_DEGREE))
            oracle = fock.diagonal_expectation(space, diag_weights, prod)
            err = abs(wick - oracle)
            worst = max(worst, err)
            entries.append({
                "product": ["".join([k, str(i)]) for k, i in prod],
                "wick": [wick.real, wick.imag],
                "oracle": [oracle.real, oracle.imag],
                "abs_error": err,
            })
    return {"tail": tail, "worst_abs_error": worst, "count": len(entries), "entries": entries}
