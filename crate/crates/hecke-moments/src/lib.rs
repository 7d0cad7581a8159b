//! Verification laboratory for moments of Hecke eigenvalue squares over
//! primes in short intervals.
//!
//! The crate is organised around five computational layers:
//!
//! * [`primes`] — segmented sieve, short-interval window statistics, and
//!   exact prime-tuple counts.
//! * [`gallagher`] — Stirling/surjection combinatorics, Poisson moments, and
//!   Hardy–Littlewood singular series.
//! * [`modforms`] — integral q-expansions, the Victor Miller basis, Hecke
//!   operators, and exact or certified-numeric eigenforms.
//! * [`petersson`] — Kloosterman sums, certified Bessel evaluation, and the
//!   geometric (Kloosterman/Bessel) side of the Petersson trace formula.
//! * [`experiments`] — end-to-end second-moment experiments combining all of
//!   the above, with certified error budgets.
//!
//! Floating arithmetic that feeds any certified claim goes through
//! [`ball`], a midpoint–radius big-float layer: every value carries a
//! rigorous error bound, so final inequalities are machine-checked rather
//! than hoped for.
//!
//! Most capabilities are demonstrated by a runnable example under
//! `examples/`; the `hecke-moments` binary exposes the same entry points as
//! subcommands (`sieve`, `gallagher`, `forms`, `petersson`, `second-moment`,
//! `verify`).

pub mod ball;
pub mod cli;
pub mod experiments;
pub mod gallagher;
pub mod modforms;
pub mod petersson;
pub mod primes;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
