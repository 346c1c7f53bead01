"""Kicked Harper and resonant double-kicked rotor quantum maps."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .core import LatticeState, Observables, basis_state, observables, to_momentum, to_position
from .errors import KickMapsError, NumericalError, ParameterError, ShapeError, WindowOverflowError
from .floquet import (
    KHM,
    DKRMGeneral,
    DKRMResonant,
    apply_kick,
    apply_kinetic_khm,
    apply_kinetic_quadratic,
    dense_operator,
    shifted_kick_element,
    step,
)
from .spectrum import (
    BandSpectrum,
    RationalPlanck,
    band_structure,
    bloch_operator,
    butterfly,
    compare_spectra,
    farey,
    max_bandwidth,
)
from .fractal import DqEstimate, convergents, dq_estimate, partition_sum
from .dynamics import TimeSeries, diffusion_exponent, evolve, staircase_widths
from .classical import (
    ClassicalState,
    HarperState,
    dkrm_classical_step,
    harper_classical_step,
    to_harper_frame,
    trajectory,
)
