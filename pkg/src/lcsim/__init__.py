"""
lcsim: pseudo-spectral simulator and diagnostics for the coupled
vorticity / unit-director system perturbed around a strong plane shear.
"""

from .spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    deriv_x,
    deriv_y_phys,
    inv_laplacian,
    laplacian,
    multiply_dealiased,
    remap_shear_frame,
    single_mode,
    to_physical,
    to_spectral,
)
from .flow import (
    FlowState,
    PhysParams,
    StepReport,
    blow_up_monitor,
    director_rhs,
    leslie_stress_curl,
    renormalize_director,
    step,
    velocity_from_vorticity,
    vorticity_rhs,
    zero_state,
)
from .norms import (
    NormParams,
    MultiplierGrid,
    XNormAccumulator,
    coercivity_check,
    energy_functional,
    m1_eval,
    m2_eval,
    m_eval,
    m_xi_derivative_weighted,
    region_classify,
    region_inequality_check,
    x_norm_update,
    y_norm,
)
from .kelvin import (
    KelvinMode,
    dissipation_integral,
    enhanced_dissipation_check,
    inviscid_damping_check,
    kelvin_exact,
)
from .data import (
    DataReport,
    InitialDataParams,
    amplitude_threshold,
    gap_check,
    make_director_data,
    norms_report,
    schwartz_band_profile,
)
from .experiment import (
    SimConfig,
    load_checkpoint,
    load_config,
    run_simulation,
    save_checkpoint,
    sweep_amplitude,
)

__version__ = "0.1.0"
