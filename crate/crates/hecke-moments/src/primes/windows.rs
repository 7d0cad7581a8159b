//! Prime counts in sliding half-open windows `(n - y, n]`.
//!
//! For real `y > 0` the integers inside `(n - y, n]` are exactly
//! `n - d` for `0 <= d <= ceil(y) - 1`, so every window holds the same
//! pattern of `ceil(y)` candidate offsets; offset `0` is `n` itself.

use crate::primes::sieve::{sieve_range, PrimeTable};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::Zero;
use std::io::Write;

/// Largest offset `d` such that `n - d` lies in `(n - y, n]`.
pub fn max_offset(y: f64) -> Result<u64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window length must be positive and finite, got {y}"
        )));
    }
    Ok(y.ceil() as u64 - 1)
}

/// The count of primes in `(n - y, n]` for every `n` from 1 to `n_max`.
///
/// Materializes all counts (4 bytes per `n`); for moment computations at
/// large `n_max` prefer [`window_moments`], which streams.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSeries {
    n_max: u64,
    y: f64,
    counts: Vec<u32>,
}

impl WindowSeries {
    /// Largest window endpoint.
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Window length.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Count for the window ending at `n` (1-based, `n <= n_max`).
    pub fn count(&self, n: u64) -> u32 {
        assert!(n >= 1 && n <= self.n_max, "window endpoint {n} out of range");
        self.counts[(n - 1) as usize]
    }

    /// All counts, indexed by `n - 1`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Exact `j`-th moment `sum_n count(n)^j` (with `0^0 = 1`, so the
    /// zeroth moment is `n_max`).
    pub fn moment(&self, j: u32) -> BigUint {
        let mut acc = Accumulator::new();
        for &w in &self.counts {
            acc.add_pow(w as u64, j);
        }
        acc.finish()
    }

    /// Write the series as CSV with header `n,count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,count")?;
        for (i, &c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{}", i as u64 + 1, c)?;
        }
        Ok(())
    }
}

/// Compute all window counts for `1 <= n <= n_max`.
pub fn window_counts(n_max: u64, y: f64) -> Result<WindowSeries> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let d_max = max_offset(y)?;
    let table = sieve_range(0, n_max)?;
    let mut counts = Vec::with_capacity(n_max as usize);
    let mut w: u32 = 0;
    for n in 1..=n_max {
        if table.is_prime(n) {
            w += 1;
        }
        // The entry for n - 1 - d_max slides out of the window.
        if n > d_max + 1 && table.is_prime(n - 1 - d_max) {
            w -= 1;
        }
        counts.push(w);
    }
    Ok(WindowSeries {
        n_max,
        y,
        counts,
    })
}

/// Exact window moments `sum_{n <= n_max} count(n)^j` for `j = 0..=j_max`,
/// computed in one streaming pass (no per-`n` storage).
pub fn window_moments(n_max: u64, y: f64, j_max: u32) -> Result<Vec<BigUint>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let d_max = max_offset(y)?;
    let table = sieve_range(0, n_max)?;
    let mut accs: Vec<Accumulator> = (0..=j_max).map(|_| Accumulator::new()).collect();
    let mut w: u64 = 0;
    for n in 1..=n_max {
        if table.is_prime(n) {
            w += 1;
        }
        if n > d_max + 1 && table.is_prime(n - 1 - d_max) {
            w -= 1;
        }
        for (j, acc) in accs.iter_mut().enumerate() {
            acc.add_pow(w, j as u32);
        }
    }
    Ok(accs.into_iter().map(Accumulator::finish).collect())
}

/// Exact `j`-th window moment; see [`window_moments`].
pub fn window_moment(n_max: u64, y: f64, j: u32) -> Result<BigUint> {
    Ok(window_moments(n_max, y, j)?.pop().unwrap())
}

/// Shared prime table variant used when the caller already holds a sieve
/// of `[0, n_max]`.
pub(crate) fn window_moment_with(table: &PrimeTable, n_max: u64, y: f64, j: u32) -> Result<BigUint> {
    let d_max = max_offset(y)?;
    let mut acc = Accumulator::new();
    let mut w: u64 = 0;
    for n in 1..=n_max {
        if table.is_prime(n) {
            w += 1;
        }
        if n > d_max + 1 && table.is_prime(n - 1 - d_max) {
            w -= 1;
        }
        acc.add_pow(w, j);
    }
    Ok(acc.finish())
}

/// Exact integer accumulator: fast u128 partial sums, flushed into a
/// `BigUint` before they can overflow.
struct Accumulator {
    partial: u128,
    total: BigUint,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            partial: 0,
            total: BigUint::zero(),
        }
    }

    fn add_pow(&mut self, base: u64, exp: u32) {
        if exp == 0 {
            self.add_u128(1);
            return;
        }
        match (base as u128).checked_pow(exp) {
            Some(p) => self.add_u128(p),
            None => {
                self.flush();
                self.total += BigUint::from(base).pow(exp);
            }
        }
    }

    fn add_u128(&mut self, v: u128) {
        match self.partial.checked_add(v) {
            Some(s) => self.partial = s,
            None => {
                self.flush();
                self.partial = v;
            }
        }
    }

    fn flush(&mut self) {
        if self.partial != 0 {
            self.total += BigUint::from(self.partial);
            self.partial = 0;
        }
    }

    fn finish(mut self) -> BigUint {
        self.flush();
        self.total
    }
}
