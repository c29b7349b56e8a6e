//! Even-parity detection and heralded cat-state preparation in a truncated
//! Fock space.
//!
//! Two modes meet on a balanced beam splitter and both outputs are counted;
//! the outcome `(n, n)` projects the input onto an even-parity vector. Used
//! on one arm of a two-mode squeezed vacuum it heralds two- and
//! four-component cat states.
//!
//! Modules, bottom-up:
//! - [`fock`]: state vectors, density matrices, coherent / squeezed states,
//!   displacement.
//! - [`beam_splitter`]: two-mode Fock matrix elements, one photon-number
//!   sector at a time.
//! - [`detector`]: ideal projector and its loss-degraded POVM element.
//! - [`engineering`]: heralding, cat preparation, the two-stage pipeline.
//! - [`metrics`]: fidelities, Wigner functions, negativity.
//! - [`optimize`]: parameter searches and the heralding-rate scaling fit.

// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam_splitter;
pub mod detector;
pub mod engineering;
pub mod error;
pub mod fock;
pub mod math;
pub mod metrics;
pub mod optimize;

pub use num_complex::Complex64 as C64;

pub use beam_splitter::{hb_coefficient, hb_coefficients, BeamSplitterConvention, SectorBlock};
pub use detector::{
    default_cutoff, detection_probability, povm_element, project_chi, projector_fidelity,
    DetectorEffect, EffectKind,
};
pub use engineering::{
    cat_herald, four_component_pipeline, four_component_stages, herald, herald_lossy, prepare,
    success_probability, HeraldedState, SchemeConfig, LAMBDA_UNIT_LIMIT,
};
pub use error::{Error, Result, TruncationWarning};
pub use fock::{
    coherent_state, displacement_matrix, lambda_to_squeezing_db, squeezing_db_to_lambda,
    two_mode_squeezed_vacuum, DensityMatrix, FockVector, State, TwoModeState, DEFAULT_TRUNCATION,
};
pub use metrics::{
    cat_fidelity_closed_form, fidelity, negativity_volume, normalized_negativity, wigner, GridSpec,
    IdealCat, WignerGrid,
};
pub use optimize::{
    optimal_lambda, optimize_cat_fidelity, optimize_four_component, scaling_fit,
    OptimizationResult, SearchOptions,
};
