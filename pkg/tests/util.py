"""Shared helpers for the test suite."""

import numpy as np

from bogolab import onepdm, quadham, symplectic

# One summary line per acceptance criterion, echoed at the end of the run.
ACCEPTANCE_LINES = []


def acceptance(criterion: str, ok: bool, detail: str):
    """Record a pass/fail line for an acceptance criterion and assert it."""
    line = f"{criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def random_admissible(rng, modes, lam_max=2.0, strength=0.4, pure=False):
    """Random admissible 1-pdm built from a random Bogoliubov conjugation.

    Returns (pdm, sorted occupations).  With pure=True the occupations are
    zero and the state is quasi-free pure.
    """
    w = symplectic.random_bogoliubov(modes, rng, strength)
    lam = np.zeros(modes) if pure else rng.uniform(0.0, lam_max, modes)
    diag = np.diag(np.concatenate([lam, 1.0 + lam]))
    g = w.doubled() @ diag @ w.doubled().conj().T
    g = 0.5 * (g + g.conj().T)
    alpha = 0.5 * (g[:modes, modes:] + g[:modes, modes:].T)
    return onepdm.OnePdm(g[:modes, :modes], alpha), np.sort(lam)


def random_psd_quadham(rng, modes, floor=1.0):
    """Random PSD quadratic Hamiltonian with controlled squeezing strength.

    The J-symmetrized Gram matrix plus floor * identity keeps the pairing
    block moderate relative to the one-body block, so truncated-oracle
    ground energies converge quickly in the cutoff.
    """
    r = rng.standard_normal((2 * modes, 2 * modes)) + 1j * rng.standard_normal((2 * modes, 2 * modes))
    x = r @ r.conj().T / (2 * modes)
    a_doubled = 0.5 * (x + onepdm.j_conjugate(x)) + floor * np.eye(2 * modes)
    a = a_doubled[:modes, :modes]
    b = 0.5 * (a_doubled[:modes, modes:] + a_doubled[:modes, modes:].T)
    return quadham.QuadraticHamiltonian(a=a, b=b)
