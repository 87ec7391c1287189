"""Partitions, e-polynomials and Schur-basis algebra."""
