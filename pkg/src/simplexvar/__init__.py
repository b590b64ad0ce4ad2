"""Averages over dilated lattice simplices: enumeration, variation and
jump operators, band-limited smoothing multipliers, cube martingales,
and the experiment drivers that exercise their quantitative behavior on
periodic grids."""

from .averages import (
    EmptyCopySetError,
    LocalSupResult,
    SmoothedKernel,
    average_kernel,
    kernel_spectrum,
    local_sup_average,
    simplex_average,
    smoothed_kernel,
    spherical_average,
)
from .cache import CopySetCache, resolve_cache_dir, rows_checksum
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import (
    EXPERIMENTS,
    recompute_aggregates,
    run_decay,
    run_jump,
    run_local_sup,
    run_scaling,
    run_square_multiplier,
    run_variation,
)
from .grid import (
    LatticeFunction,
    Spectrum,
    convolve,
    delta,
    dense,
    dft_forward,
    dft_forward_naive,
    dft_inverse,
    lp_norm,
    random_test_function,
    sparse,
    trial_rng,
)
from .lattice import (
    CopySet,
    SimplexConfig,
    copyset_from_text,
    copyset_to_text,
    count_representations,
    count_simplex_copies,
    enumerate_simplex_copies,
    enumerate_sphere,
    scaling_rows,
    verify_isometry,
)
from .martingale import (
    conditional_expectation,
    cube_index,
    martingale_difference,
    martingale_jump_field,
)
from .multipliers import (
    BandDecomposition,
    FrequencyArcs,
    MultiplierSpec,
    arc_grid_mask,
    band_decompose,
    band_difference,
    band_difference_grid,
    bump_profile,
    lcm_step,
    multiplier_grid,
    multiplier_table,
    sampled_bump_multiplier,
    scale_difference,
    scale_difference_square_sums,
    smoothing_multiplier,
    torus_lattice_distance_sq,
)
from .report import (
    ExperimentReport,
    FigureSpec,
    report_from_json,
    report_to_json,
    validate_report,
    write_report_products,
)
from .variation import (
    jump_count,
    jump_count_field,
    jump_field,
    lacunary_maximal_field,
    variation_field,
    variation_seminorm,
)

__version__ = "0.1.0"
