"""Perturbation theory near degenerate exceptional points.

Jordan structures, L=1 and L>=2 perturbation-series solvers, leading-order
secular spectra, admissible perturbation scalings and the EP partition
catalog, all checked against a brute-force characteristic-polynomial oracle.
"""

__version__ = "0.1.0"
