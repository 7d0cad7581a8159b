//! Second-moment experiments for squared eigenvalue sums over primes in
//! sliding windows.
//!
//! Two evaluation modes compute the same quantity from opposite ends:
//!
//! * **per-form** ([`per_form_second_moment`]): one eigenform at a time,
//!   in exact field arithmetic, cross-checked through three independent
//!   evaluation routes;
//! * **harmonic** ([`harmonic_second_moment`]): the weight-averaged sum
//!   over the whole eigenbasis, evaluated purely from Kloosterman/Bessel
//!   sums so the weight can be far beyond any constructible basis.
//!
//! [`second_moment_comparison`] compares the harmonic total against the
//! unconditional prime-count reference and the conjectural Poisson
//! moment; [`gallagher_report`] tabulates empirical window moments
//! against both predictions.

mod gallagher_table;
mod harmonic;
mod per_form;

pub use gallagher_table::{gallagher_report, GallagherReport, GallagherRow};
pub use harmonic::{harmonic_second_moment, second_moment_comparison, ComparisonReport};
pub use per_form::per_form_second_moment;

use serde::Serialize;

/// One labelled term of a report's error budget.
#[derive(Debug, Clone, Serialize)]
pub struct BudgetTerm {
    pub label: String,
    pub bound: f64,
}

/// Second moment of the windowed eigenvalue sums `A(n) = Σ_{p ∈ (n-y, n]}
/// λ(p)²`, accumulated over `n = 1..=N`, split into its diagonal
/// (`p₁ = p₂`) and off-diagonal parts, next to the exact prime-count
/// moments over the same windows.
#[derive(Debug, Clone, Serialize)]
pub struct SecondMomentReport {
    /// `"per-form"` or `"harmonic"`.
    pub mode: String,
    pub k: u32,
    /// Index of the eigenform within its weight (per-form mode only).
    pub form_index: Option<usize>,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub eta: f64,
    /// Window length `eta · ln N`, recorded at full precision.
    pub y: f64,
    pub window_convention: String,
    /// `Σ_n Σ_{p ∈ window} λ(p)⁴` (or its harmonic average).
    pub diagonal: f64,
    /// `Σ_n Σ_{p₁ ≠ p₂} λ(p₁)²λ(p₂)²` (or its harmonic average).
    pub off_diagonal: f64,
    /// `diagonal + off_diagonal`.
    pub total: f64,
    /// Exact `Σ_n W(n)²` where `W(n)` counts primes in the window.
    pub exact_prime_square_moment: u64,
    /// Exact `Σ_n W(n)`.
    pub exact_prime_first_moment: u64,
    /// `N·(η² + 2η)`: the Poisson second moment plus first moment.
    pub prediction_conjectural: f64,
    /// `total − (Σ W² + Σ W)`.
    pub discrepancy_unconditional: f64,
    /// `total − prediction_conjectural`.
    pub discrepancy_conjectural: f64,
    pub error_budget: Vec<BudgetTerm>,
    /// Decimal renderings of the three per-form evaluation routes.
    pub route_values: Option<Vec<String>>,
    /// Certified bound on the largest pairwise route difference.
    pub route_max_difference: Option<f64>,
}

impl SecondMomentReport {
    /// Sum of every term in the error budget.
    pub fn budget_total(&self) -> f64 {
        self.error_budget.iter().map(|t| t.bound).sum()
    }
}
