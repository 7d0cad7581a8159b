//! Empirical window-moment tables against the Poisson model and the
//! first-order constellation predictions.

use crate::gallagher::{gallagher_moment, hl_prediction, TupleVector};
use crate::primes::{max_offset, moment_identity_check, window_moments, WINDOW_CONVENTION};
use crate::{Error, Result};
use num_traits::ToPrimitive;
use serde::Serialize;

/// One `(η, j)` row of the table.
#[derive(Debug, Clone, Serialize)]
pub struct GallagherRow {
    pub eta: f64,
    pub j: u32,
    /// Window length `η·ln N`.
    pub y: f64,
    /// Exact `Σ_n W(n)^j` as a decimal string.
    pub empirical_moment: String,
    /// `Σ_n W(n)^j / N`.
    pub empirical_normalized: f64,
    /// Poisson moment `m_j(η) = Σ_r S(j,r) η^r`.
    pub poisson_prediction: f64,
    /// Constellation-based prediction of the same normalized moment:
    /// `Σ_r σ(j,r) Σ_{d⃗} S(d⃗)/(ln N)^r`, summed over increasing
    /// `r`-tuples of window offsets.
    pub constellation_prediction: f64,
    /// Summed truncation tails of the singular-series factors.
    pub constellation_tail: f64,
    /// `"exact"` when the surjection identity between the direct moment
    /// and the constellation counts verified bit-for-bit.
    pub identity: String,
}

/// The full table plus the run configuration that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct GallagherReport {
    #[serde(rename = "N")]
    pub n_max: u64,
    pub j_max: u32,
    pub window_convention: String,
    pub rows: Vec<GallagherRow>,
}

/// Empirical normalized window moments for every `(η, j)` with
/// `j = 1..=j_max`, next to the Poisson moments they converge to and the
/// first-order constellation predictions. Each row also re-verifies the
/// exact surjection identity between the two independent moment
/// computations (direct window powers vs constellation counts).
pub fn gallagher_report(n_max: u64, eta_list: &[f64], j_max: u32) -> Result<GallagherReport> {
    if n_max < 3 || n_max > 100_000_000 {
        return Err(Error::InvalidArgument(format!(
            "range end must lie in [3, 10^8], got {n_max}"
        )));
    }
    if !(1..=3).contains(&j_max) {
        return Err(Error::InvalidArgument(format!(
            "moment order must lie in 1..=3, got {j_max}"
        )));
    }
    if eta_list.is_empty() {
        return Err(Error::InvalidArgument("eta list is empty".into()));
    }
    let mut rows = Vec::new();
    for &eta in eta_list {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "eta must be positive and finite, got {eta}"
            )));
        }
        let y = eta * (n_max as f64).ln();
        let d_max = max_offset(y)?;
        let moments = window_moments(n_max, y, j_max)?;
        for j in 1..=j_max {
            let empirical = &moments[j as usize];
            let empirical_normalized = empirical.to_f64().unwrap_or(f64::INFINITY) / n_max as f64;
            let poisson = gallagher_moment(j, eta)?.value;
            let (hl, hl_tail) = constellation_moment(n_max, d_max, j)?;
            let identity = if n_max <= 10_000_000 {
                if moment_identity_check(n_max, y, j)?.is_exact() {
                    "exact".into()
                } else {
                    "MISMATCH".into()
                }
            } else {
                "skipped (range beyond the exact-identity cap)".into()
            };
            rows.push(GallagherRow {
                eta,
                j,
                y,
                empirical_moment: empirical.to_string(),
                empirical_normalized,
                poisson_prediction: poisson,
                constellation_prediction: hl,
                constellation_tail: hl_tail,
                identity,
            });
        }
    }
    Ok(GallagherReport {
        n_max,
        j_max,
        window_convention: WINDOW_CONVENTION.into(),
        rows,
    })
}

/// `Σ_r σ(j,r) Σ_{d⃗ increasing r-tuple of offsets} S(d⃗)/(ln N)^r`
/// with each singular series certified; returns the value and the summed
/// truncation tails. Offsets are shifted by one before building the
/// tuple (predictions are translation invariant; the tuple type wants
/// strictly positive entries).
fn constellation_moment(n_max: u64, d_max: u64, j: u32) -> Result<(f64, f64)> {
    use crate::gallagher::surjections;
    let mut value = 0.0;
    let mut tail = 0.0;
    let n = n_max as f64;
    for r in 1..=j.min(3) {
        let sigma = surjections(j, r)?.to_f64().unwrap();
        let mut layer = 0.0;
        let mut layer_tail = 0.0;
        let mut each = |offsets: Vec<u64>| -> Result<()> {
            let d = TupleVector::new(offsets)?;
            let p = hl_prediction(&d, n_max)?;
            layer += p.prediction;
            layer_tail += p.tail_bound * n / (n.ln()).powi(r as i32);
            Ok(())
        };
        match r {
            1 => {
                for d1 in 0..=d_max {
                    each(vec![d1 + 1])?;
                }
            }
            2 => {
                for d1 in 0..=d_max {
                    for d2 in (d1 + 1)..=d_max {
                        each(vec![d1 + 1, d2 + 1])?;
                    }
                }
            }
            _ => {
                for d1 in 0..=d_max {
                    for d2 in (d1 + 1)..=d_max {
                        for d3 in (d2 + 1)..=d_max {
                            each(vec![d1 + 1, d2 + 1, d3 + 1])?;
                        }
                    }
                }
            }
        }
        value += sigma * layer / n;
        tail += sigma * layer_tail / n;
    }
    Ok((value, tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_moment_row_is_near_eta() {
        // Unconditional: Σ W(n)/N = (#offsets)·π(N)/N + edge effects.
        // At N = 10^5 that is 12·9592/10^5 ≈ 1.151: the offset count
        // rounds y = 11.51 up to 12 (+4%) and the prime density still
        // carries its lower-order excess π(N)·ln N/N ≈ 1.10 (+10%).
        let r = gallagher_report(100_000, &[1.0], 1).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.identity, "exact");
        assert!(
            (row.empirical_normalized - 1.0).abs() < 0.25,
            "normalized first moment {}",
            row.empirical_normalized
        );
        assert!((row.poisson_prediction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_constellations_reproduce_the_offset_count() {
        // For j = 1 every singular series is 1, so the constellation
        // prediction collapses to (d_max+1)/ln N exactly.
        let n_max = 50_000u64;
        let d_max = 10u64;
        let (v, tail) = constellation_moment(n_max, d_max, 1).unwrap();
        let expect = (d_max + 1) as f64 / (n_max as f64).ln();
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
        // Each singleton series carries the generic truncation tail
        // expm1(1/p_stop) ~ 1e-6 even though its value is exact.
        assert!(tail < 1e-5, "tail {tail}");
    }

    #[test]
    fn second_moment_tracks_the_poisson_value() {
        let r = gallagher_report(1_000_000, &[1.0], 2).unwrap();
        let row = r.rows.iter().find(|row| row.j == 2).unwrap();
        assert_eq!(row.identity, "exact");
        assert!((row.poisson_prediction - 2.0).abs() < 1e-12);
        assert!(
            (row.empirical_normalized - 2.0).abs() < 0.5,
            "second moment {}",
            row.empirical_normalized
        );
        // The constellation column should sit between the crude offset
        // count and the empirical value's ballpark.
        assert!(row.constellation_prediction > 1.0 && row.constellation_prediction < 4.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gallagher_report(2, &[1.0], 1).is_err());
        assert!(gallagher_report(1_000, &[], 1).is_err());
        assert!(gallagher_report(1_000, &[1.0], 4).is_err());
        assert!(gallagher_report(1_000, &[-1.0], 1).is_err());
    }
}
