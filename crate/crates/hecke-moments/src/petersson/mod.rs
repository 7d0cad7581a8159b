//! The trace-identity toolkit: Kloosterman sums, Bessel kernels with
//! certified error bounds, geometric-side evaluation of harmonic
//! eigenvalue averages, and the extraction of harmonic weights at small
//! dimension.

pub mod bessel;
pub mod geometric;
pub mod kloosterman;
pub mod weights;

pub use bessel::{bessel_j, bessel_j_ball, bessel_j_bound_ln, bessel_j_f64, BesselValue};
pub use geometric::{
    auto_c_max, certified_cmax_estimate, geometric_side, geometric_side_auto,
    geometric_side_batch, geometric_side_bound_only, geometric_side_fast, per_c_term_bound_ln,
    tail_bound_from, trace_error_bound, GeometricSideReport, GeometricSideValue, AUTO_C_MAX_CAP,
};
pub use kloosterman::{
    divisor_count, kloosterman, kloosterman_f64, mod_inverse, unit_inverses, weil_bound,
};
pub use weights::{extract_weights, scaled_lambda, HarmonicWeights, HarmonicWeightsReport};
