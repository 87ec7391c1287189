"""Jacobi and Laguerre eigenvalue ensembles: exact averages and samplers."""
