//! Decomposition of powers of a normalized prime eigenvalue into the
//! eigenvalues at prime powers: since `lambda(p) lambda(p^r) =
//! lambda(p^{r+1}) + lambda(p^{r-1})`, every power `lambda(p)^m` is an
//! integer combination of `lambda(p^r)` with `r <= m` and `r = m mod 2`.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// `lambda(p)^m = sum_r c_r lambda(p^r)`, with integer `c_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerDecomposition {
    m: u32,
    coeffs: BTreeMap<u32, BigInt>,
}

impl PowerDecomposition {
    pub fn power(&self) -> u32 {
        self.m
    }

    /// Coefficient of `lambda(p^r)`.
    pub fn coeff(&self, r: u32) -> BigInt {
        self.coeffs.get(&r).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, BigInt> {
        &self.coeffs
    }

    /// The constant term (coefficient of `lambda(1) = 1`); zero for odd
    /// powers, the Catalan number `C_{m/2}` for even powers.
    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }
}

/// Expand `lambda(p)^m` in the basis `{lambda(p^r)}` by repeatedly
/// applying the three-term recurrence. Supports `1 <= m <= 24`.
pub fn power_decomposition(m: u32) -> Result<PowerDecomposition> {
    if m == 0 || m > 24 {
        return Err(Error::InvalidArgument(format!(
            "power must lie in 1..=24, got {m}"
        )));
    }
    let mut coeffs: BTreeMap<u32, BigInt> = BTreeMap::new();
    coeffs.insert(1, BigInt::one());
    for _ in 1..m {
        let mut next: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (r, c) in &coeffs {
            // lambda * lambda(p^r) = lambda(p^{r+1}) + lambda(p^{r-1});
            // for r = 0, lambda * 1 = lambda(p).
            *next.entry(r + 1).or_insert_with(BigInt::zero) += c;
            if *r >= 1 {
                *next.entry(r - 1).or_insert_with(BigInt::zero) += c;
            }
        }
        next.retain(|_, c| !c.is_zero());
        coeffs = next;
    }
    Ok(PowerDecomposition { m, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn map(pairs: &[(u32, i64)]) -> BTreeMap<u32, BigInt> {
        pairs.iter().map(|&(r, c)| (r, BigInt::from(c))).collect()
    }

    #[test]
    fn small_powers_match_hand_expansion() {
        assert_eq!(power_decomposition(1).unwrap().coeffs(), &map(&[(1, 1)]));
        assert_eq!(power_decomposition(2).unwrap().coeffs(), &map(&[(0, 1), (2, 1)]));
        assert_eq!(power_decomposition(3).unwrap().coeffs(), &map(&[(1, 2), (3, 1)]));
        assert_eq!(
            power_decomposition(4).unwrap().coeffs(),
            &map(&[(0, 2), (2, 3), (4, 1)])
        );
        assert_eq!(
            power_decomposition(6).unwrap().coeffs(),
            &map(&[(0, 5), (2, 9), (4, 5), (6, 1)])
        );
    }

    #[test]
    fn constant_terms_are_catalan_numbers() {
        let catalan: [i64; 8] = [1, 2, 5, 14, 42, 132, 429, 1430];
        for (j, c) in catalan.iter().enumerate() {
            let d = power_decomposition(2 * (j as u32 + 1)).unwrap();
            assert_eq!(d.constant_term(), BigInt::from(*c), "power {}", 2 * (j + 1));
        }
        for m in [1u32, 3, 5, 7, 9, 23] {
            assert!(power_decomposition(m).unwrap().constant_term().is_zero());
        }
    }

    #[test]
    fn parity_and_support() {
        for m in 1..=24u32 {
            let d = power_decomposition(m).unwrap();
            for (r, c) in d.coeffs() {
                assert_eq!(r % 2, m % 2, "m = {m}, r = {r}");
                assert!(*r <= m);
                assert!(c > &BigInt::zero());
            }
            // Top coefficient is always 1.
            assert_eq!(d.coeff(m), BigInt::one());
        }
        assert!(power_decomposition(0).is_err());
        assert!(power_decomposition(25).is_err());
    }

    #[test]
    fn total_mass_is_a_power_of_two() {
        // Setting every lambda(p^r) = 1 corresponds to theta = pi/3
        // where... simpler: evaluating the recurrence at lambda = 2
        // (theta = 0) gives lambda(p^r) = r + 1, so
        // sum c_r (r + 1) = 2^m.
        for m in 1..=24u32 {
            let d = power_decomposition(m).unwrap();
            let total: BigInt = d.coeffs().iter().map(|(r, c)| c * BigInt::from(r + 1)).sum();
            assert_eq!(total, BigInt::from(2).pow(m), "m = {m}");
        }
    }

    #[test]
    fn identity_holds_at_sampled_spectral_angles() {
        // With lambda(p) = 2 cos(theta), lambda(p^r) = sin((r+1)theta)/sin(theta).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..100 {
            let theta: f64 = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
            let lam = 2.0 * theta.cos();
            for m in 1..=12u32 {
                let d = power_decomposition(m).unwrap();
                let mut rhs = 0.0;
                for (r, c) in d.coeffs() {
                    let coeff: f64 = c.to_string().parse().unwrap();
                    let value = (((*r as f64) + 1.0) * theta).sin() / theta.sin();
                    rhs += coeff * value;
                }
                let lhs = lam.powi(m as i32);
                assert!(
                    (lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs() + rhs.abs()),
                    "m = {m}, theta = {theta}"
                );
            }
        }
    }
}
