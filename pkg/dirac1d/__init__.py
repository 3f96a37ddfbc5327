"""
dirac1d

Bound states of the 1+1 dimensional Dirac equation with Lorentz scalar
potential g|x|, from the Hermite-function quantization condition, with a
shooting cross-check.
"""

from dirac1d.errors import Dirac1DError
from dirac1d.spectral import EigenvalueRecord, PhysicalParams, eigenvalues, spectral_fn
from dirac1d.wavefunction import WavefunctionProfile, assemble
from dirac1d.oracle import shoot_eigenvalues

__version__ = '1.0.0'

__all__ = [
    'Dirac1DError',
    'EigenvalueRecord',
    'PhysicalParams',
    'WavefunctionProfile',
    'assemble',
    'eigenvalues',
    'shoot_eigenvalues',
    'spectral_fn',
]
