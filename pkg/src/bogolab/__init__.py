"""bogolab: a numerical laboratory for finite-mode bosonic Bogoliubov theory.

Subpackages cover the 1-pdm calculus on the doubled one-body space,
symplectic (Bogoliubov) diagonalization, quasi-free Gibbs states with the
Wick moment formula, quadratic-Hamiltonian ground states, coherent
displacements with the Bogoliubov energy functional, and the radial
Hartree/Bogoliubov theory of a bosonic atom.  Everything analytic is
cross-checked against an exact truncated Fock-space oracle.
"""

from . import atom, coherent, fock, onepdm, quadham, quasifree, symplectic

__version__ = "0.1.0"

__all__ = [
    "atom",
    "coherent",
    "fock",
    "onepdm",
    "quadham",
    "quasifree",
    "symplectic",
    "__version__",
]
