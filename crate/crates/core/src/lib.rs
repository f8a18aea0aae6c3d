//! Petz-Rényi α-relative entropies of (displaced) thermal Gaussian states.
//!
//! Mode indices are 0-based throughout the library.

pub mod displaced;
pub mod error;
pub mod logmath;
pub mod oracle;
pub mod states;
pub mod thermal;
pub mod weyl;

pub use displaced::{
    covariance_equivalence, d_alpha_displaced, diagonal_divergence_witness, predict_finiteness,
    relative_displacement, DisplacedEntropy, SeriesEstimate, SeriesOptions,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use states::{
    covariance, eigenvalue, eigenvalue_log, power_reparam, support_set, CovarianceDiagonal,
    DisplacedThermalSpec, InverseTemperature, ModeVector, OccupationIndex,
};
pub use thermal::{
    alpha_threshold, covariance_criterion, d_alpha_thermal, support_contained, thermal_log_trace,
    DivergenceWitness, ExtendedEntropy, RenyiOrder, ThresholdResult, WitnessKind,
};
pub use weyl::{
    fejer_default_constant, fejer_scan, laguerre, sine_interval_indices, weyl_diag, weyl_element,
    FejerScan, SineIntervalWitness,
};
