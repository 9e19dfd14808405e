"""
XY-Gamma Chain - exact free-fermion toolkit for the XY-Gamma spin chain
Spectra, Pfaffian correlators, steered coherence, critical scaling and
cavity-mediated couplings, checked against exact diagonalization
"""

__version__ = "1.0.0"
__author__ = "XY-Gamma Chain Developers"
__email__ = "gammachain@users.noreply.github.com"

from .coherence import XState, reduced_density_matrix, steered_quantum_coherence
from .config import Config
from .correlations import contractions, dimer_correlation, two_point
from .couplings import AtomLightParams, SpinCouplings, chain_params_from_couplings, spin_couplings
from .errors import GammaChainError, InvalidParameterError, NumericError
from .model import ModelParams, classify_phase, critical_set, dispersion, excitation_gap
from .pfaffian import pfaffian

__all__ = [
    'AtomLightParams',
    'Config',
    'GammaChainError',
    'InvalidParameterError',
    'ModelParams',
    'NumericError',
    'SpinCouplings',
    'XState',
    'chain_params_from_couplings',
    'classify_phase',
    'contractions',
    'critical_set',
    'dimer_correlation',
    'dispersion',
    'excitation_gap',
    'pfaffian',
    'reduced_density_matrix',
    'spin_couplings',
    'steered_quantum_coherence',
    'two_point',
]
