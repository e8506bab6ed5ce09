//! Type 1,1 pseudo-differential operators on the discretized torus.
//!
//! The crate is organised bottom-up: [`grid`] (torus, FFT, supports),
//! [`lp`] (dyadic partition and function-space norms), [`symbol`],
//! [`operator`] (direct, split and kernel application), [`maximal`],
//! [`support_analysis`] and [`experiments`].

pub mod error;
pub mod experiments;
pub mod grid;
pub mod lp;
pub mod maximal;
pub mod operator;
pub mod random;
pub mod support_analysis;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::{
    forward_fourier, inverse_fourier, lp_norm, make_grid, minkowski_sum, spectral_support, Exponent, FourierPlan, Freq,
    GridFunction, SpectralFunction, SupportSet, TorusGrid, DEFAULT_SUPPORT_THRESHOLD,
};
pub use lp::{
    besov_norm, build_partition, homogeneous_besov_norm, triebel_lizorkin_norm, BoxFunction, HomogeneousBesov,
    HomogeneousNorm, LpPartition, Scale, SpaceParams,
};
pub use symbol::{
    ching_symbol, rescaled_slice_norm, seminorm_estimate, symbol_block, symbol_spectrum, twisted_diagonal_check,
    twisted_diagonal_fit, BlockSymbol, ChingParams, Symbol, SymbolSpectrum, SymbolType,
};
pub use operator::{apply_direct, apply_split, kernel_apply, operator_matrix, operator_norm_l2, SplitResult};
pub use experiments::{
    boundedness_experiment, l2_growth_experiment, negative_smoothness_experiment, run_experiment, sharpness_experiment,
    support_check_experiment, ExperimentConfig, ExperimentKind, ExperimentOutput, GrowthTable, NormSpec, RatioTable,
    SupportTable, SymbolSpec,
};
pub use maximal::{maximal_function, pointwise_estimate_ratio, vector_maximal_check, MaximalParams, PointwiseRatio};
pub use support_analysis::{
    localization_check, localization_sweep, localization_threshold, support_rule_check, LocalizationReport, Region,
    SupportReport,
};
