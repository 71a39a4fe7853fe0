"""Scattering spectra of one-dimensional delta lattices and their zeta-zero resonances."""

__version__ = "0.1.0"

from .errors import DomainError, EmptyRequestError, FitError, ParseError  # noqa: E402
from .lattice import (  # noqa: E402
    PointMeasure,
    WeightScheme,
    chi_lattice,
    integer_lattice,
    prime_lattice,
    shifted_prime_lattice,
)
from .spectrum import KGrid, Spectrum, detrend, dirichlet_power, lorentzian_model, nudft  # noqa: E402
from .zeros import ZeroTable, bundled_zeros, load_zero_table, psi_explicit, zero_to_k  # noqa: E402

__all__ = [
    "__version__",
    "DomainError",
    "EmptyRequestError",
    "FitError",
    "ParseError",
    "PointMeasure",
    "WeightScheme",
    "chi_lattice",
    "integer_lattice",
    "prime_lattice",
    "shifted_prime_lattice",
    "KGrid",
    "Spectrum",
    "detrend",
    "dirichlet_power",
    "lorentzian_model",
    "nudft",
    "ZeroTable",
    "bundled_zeros",
    "load_zero_table",
    "psi_explicit",
    "zero_to_k",
]
