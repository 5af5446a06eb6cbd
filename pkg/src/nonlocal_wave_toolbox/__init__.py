"""
Public exports for the nonlocal wave toolbox package.
"""

__version__ = "0.1.0"

from .diagnostics import (BlowupCertificate, CertificateStatus, EnergyBreakdown, build_certificate, energy,
                          phi_series, verify_concavity_along_trajectory, verify_concavity_inequality)
from .exceptions import (ConfigError, CorruptionError, GridError, GridMismatchError, NonIntegrableKernelError,
                         NonlinearityError, NonlocalWaveError, PicardDivergenceError, SymbolError, ZeroModeError)
from .grid import Grid, RealField, SpectralField
from .hypotheses import HypothesisReport, run_check
from .kernels import KernelSpec, make_kernel
from .nonlinearity import NonlinearitySpec, make_nonlinearity
from .picard import PicardResult, picard_iterate
from .solver import EvolutionConfig, InitialData, Outcome, SimulationResult, State, integrate, linear_exact

__all__ = [
    "BlowupCertificate",
    "CertificateStatus",
    "EnergyBreakdown",
    "build_certificate",
    "energy",
    "phi_series",
    "verify_concavity_along_trajectory",
    "verify_concavity_inequality",
    "ConfigError",
    "CorruptionError",
    "GridError",
    "GridMismatchError",
    "NonIntegrableKernelError",
    "NonlinearityError",
    "NonlocalWaveError",
    "PicardDivergenceError",
    "SymbolError",
    "ZeroModeError",
    "Grid",
    "RealField",
    "SpectralField",
    "HypothesisReport",
    "run_check",
    "KernelSpec",
    "make_kernel",
    "NonlinearitySpec",
    "make_nonlinearity",
    "PicardResult",
    "picard_iterate",
    "EvolutionConfig",
    "InitialData",
    "Outcome",
    "SimulationResult",
    "State",
    "integrate",
    "linear_exact",
]
