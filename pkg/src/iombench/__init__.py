"""Workbench for integrals of motion on Virasoro-Fock level spaces.

Builds the quadratic and cubic conserved operators on tensor products of a
Verma module with a bosonic Fock space, the elliptic conserved operator on
two-fold Fock products, solves the associated Bethe-ansatz systems, and
cross-validates operator spectra against root-sum eigenvalue formulas and
exact q-series identities.
"""

__version__ = "0.1.0"
