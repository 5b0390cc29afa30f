"""Spectrally filtered photon correlations of single-atom resonance fluorescence."""

from .atom import (
    AtomParams,
    ExpSum,
    LaplacePropagator,
    build_generator,
    laplace_propagator,
    q_roots,
    steady_state,
    time_propagator,
)
from .delay import DelayRequest, delta_g2, g2_curve, g2_normalized, g22_tau, i1, i2, i3, i4
from .errors import (
    CapExceeded,
    ConfigError,
    DegenerateExponent,
    DegeneratePoles,
    FallbackFailed,
    GridTooSmall,
    ImaginaryResidual,
    PoleHit,
    RFSpecError,
    ToleranceNotMet,
    ZeroIntensity,
)
from .quadrature import TimeDiagram, brute_force_g22_tau, brute_force_gnm, multitime_correlation
from .secular import DressedParams, LineLabel, dressed_params, secular_g2
from .spectral import FilterSlot, SlotSequence, g22_perturbative, g22_zero, g_nm, physical_spectrum

__version__ = "0.1.0"
