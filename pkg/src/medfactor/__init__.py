"""Middle prime factor statistics: sieve counts, local-law densities, Gaussian convergence."""

__version__ = "0.1.0"
