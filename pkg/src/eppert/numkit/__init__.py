"""Dense complex linear algebra, polynomials, root finding and the
brute-force eigenvalue oracle."""

from .matrix import (as_matrix, as_square, identity, load_matrix, mat_inv,
                     mat_mul, matrix_from_json, matrix_to_json,
                     quasi_hermiticity_residual, save_matrix)
from .oracle import SpectrumReport, char_poly, eig_oracle, match_distance
from .poly import ComplexPolynomial, PolyMatrix, block_diag_poly
from .roots import cluster_roots, poly_roots

__all__ = [
    "ComplexPolynomial", "PolyMatrix", "SpectrumReport", "as_matrix",
    "as_square", "block_diag_poly", "char_poly", "cluster_roots",
    "eig_oracle", "identity", "load_matrix", "mat_inv", "mat_mul",
    "match_distance", "matrix_from_json", "matrix_to_json", "poly_roots",
    "quasi_hermiticity_residual", "save_matrix",
]
