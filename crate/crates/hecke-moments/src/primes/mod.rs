//! Prime sieving, sliding-window prime counts, and constellation counts.
//!
//! Everything in this module is exact integer arithmetic: sieves are
//! bitsets, window moments are big integers, and the moment identity in
//! [`tuples`] cross-checks two independent computations bit for bit.
//!
//! Window convention: a window of length `y` ending at `n` is the
//! half-open interval `(n - y, n]`, so it contains `n` itself and the
//! candidate offsets are `0..=ceil(y)-1`.

mod sieve;
mod tuples;
mod windows;

pub use sieve::{base_primes, isqrt, sieve_range, PrimeTable};
pub use tuples::{
    identity_tuple_total, moment_identity_check, tuple_count, IdentityCheck, IdentityLayer,
};
pub use windows::{max_offset, window_counts, window_moment, window_moments, WindowSeries};

/// Human-readable statement of the window convention, included in report
/// headers so downstream numbers are unambiguous.
pub const WINDOW_CONVENTION: &str =
    "windows are half-open (n-y, n]; offsets run over 0..=ceil(y)-1";
