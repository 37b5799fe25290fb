"""Numerical laboratory for spectra of products of independent random
matrices: samplers, block linearizations, exact determinantal formulas,
linear-statistic analytics, and reproducible Monte Carlo experiments.
"""

from . import dpp_exact, ensembles, linearize, numlin, spectra_stats, testfuncs

__version__ = "0.1.0"

from . import config, harness  # noqa: E402  (need __version__ first)

__all__ = [
    "config",
    "dpp_exact",
    "ensembles",
    "harness",
    "linearize",
    "numlin",
    "spectra_stats",
    "testfuncs",
    "__version__",
]
