"""Pseudospectral solver and verification lab for the nematic liquid-crystal
(Ericksen-Leslie) system on a periodic box."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .diagnostics import DecayExponents, WeightedNormReport, decay_exponents, energy_series, weighted_norm
from .estimates import (
    InequalityRecord,
    check_bilinear_L1L1,
    check_bilinear_product_Hs,
    check_smoothing,
    check_trilinear,
    constraint_residual,
    embedding_constant,
    run_suite,
)
from .initial_data import (
    SCENARIOS,
    DirectorData,
    EtaVector,
    FlowData,
    gaussian_bump,
    localized_bump_family,
    make_divergence_free,
    make_scenario,
    make_sphere_valued,
    small_data_family,
    sphere_defect,
)
from .io import read_snapshot, write_snapshot
from .mild import (
    ContractionReport,
    NonContraction,
    PicardConfig,
    duhamel_apply,
    picard_map,
    picard_solve,
    semigroup_flow,
    xst_norm,
    y_norm,
)
from .nonlinearity import (
    RhsPair,
    assemble_rhs,
    convective,
    director_reaction,
    ericksen_stress_div,
    pressure_recover,
)
from .semigroup import (
    DecayFit,
    DecaySeries,
    HalfSpaceField,
    TorusWindowWarning,
    commutation_check,
    decay_fit,
    gaussian_reference,
    halfspace_propagate,
    heat_decay_series,
    random_neumann_field,
    stokes_propagate,
    whole_space_series,
)
from .spectral import (
    Grid,
    OutsideTheoryWarning,
    SpectralField,
    dealias,
    derivative,
    divergence,
    forward_transform,
    gradient,
    heat_multiplier,
    inverse_transform,
    laplacian,
    leray_project,
    lp_norm,
    sobolev_norm,
)
from .state import FieldSeries, SimState, Trajectory
from .timestepper import Blowup, StepConfig, integrate, step

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
