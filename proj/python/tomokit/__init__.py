"""Optical quantum state tomography toolkit.

Truncated-Fock-space state generation, Husimi-Q / photon-number measurement
synthesis with realistic noise models, and density-matrix reconstruction via
maximum-likelihood gradient ascent or an adversarial generator/discriminator
solver.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
