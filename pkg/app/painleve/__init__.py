"""Painlevé and Toda residual checks, small-t series, structure fits."""
