"""Hard-edge (Bessel) limit: kernel, Laplace transform of 𝔢_1, exact moments."""
