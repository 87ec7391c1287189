"""Joint moments of characteristic-polynomial derivatives over USp(2N) and SO(2N)."""
