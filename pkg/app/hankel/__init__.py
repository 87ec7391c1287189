"""Hankel-determinant representation of finite-N Laplace transforms."""
