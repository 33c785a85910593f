"""Algebra for dmodule: polynomials, Weyl and Ore operators, series and solvers."""
