//! Eisenstein series `E_4` and `E_6`, the multiplicative generators of
//! the level-one graded ring of modular forms.

use crate::modforms::qexp::QExpansion;
use crate::{Error, Result};
use num_bigint::BigInt;

/// Divisor power sums `sigma_e(n)` for `n = 0..=m` (with the convention
/// `sigma_e(0) = 0`), by a divisor-stamping sieve.
fn sigma_table(e: u32, m: usize) -> Vec<BigInt> {
    let mut table = vec![BigInt::from(0); m + 1];
    for d in 1..=m as u64 {
        let de = BigInt::from(d).pow(e);
        let mut n = d as usize;
        while n <= m {
            table[n] += &de;
            n += d as usize;
        }
    }
    table
}

/// The normalized Eisenstein series of weight 4 or 6 to precision `m`:
/// `E_4 = 1 + 240 sum sigma_3(n) q^n`, `E_6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein(weight: u32, m: usize) -> Result<QExpansion> {
    let (e, scale) = match weight {
        4 => (3, BigInt::from(240)),
        6 => (5, BigInt::from(-504)),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "only the generator weights 4 and 6 are provided, got {weight}"
            )))
        }
    };
    let mut coeffs = sigma_table(e, m);
    for c in coeffs.iter_mut() {
        *c *= &scale;
    }
    coeffs[0] = BigInt::from(1);
    QExpansion::new(weight, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct divisor enumeration, independent of the sieve.
    fn sigma_slow(e: u32, n: u64) -> BigInt {
        (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| BigInt::from(d).pow(e))
            .sum()
    }

    #[test]
    fn weight_four_series_starts_correctly() {
        let e4 = eisenstein(4, 5).unwrap();
        let want: Vec<i64> = vec![1, 240, 2160, 6720, 17520, 30240];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(e4.coeff(n), &BigInt::from(*w), "n = {n}");
        }
    }

    #[test]
    fn weight_six_series_starts_correctly() {
        let e6 = eisenstein(6, 3).unwrap();
        assert_eq!(e6.coeff(0), &BigInt::from(1));
        assert_eq!(e6.coeff(1), &BigInt::from(-504));
        assert_eq!(e6.coeff(2), &BigInt::from(-16632));
        assert_eq!(e6.coeff(3), &BigInt::from(-122976));
    }

    #[test]
    fn sigma_sieve_matches_direct_enumeration() {
        for e in [3u32, 5] {
            let table = sigma_table(e, 200);
            for n in 1..=200u64 {
                assert_eq!(table[n as usize], sigma_slow(e, n), "e = {e}, n = {n}");
            }
        }
    }

    #[test]
    fn rejects_unsupported_weights() {
        assert!(eisenstein(8, 10).is_err());
        assert!(eisenstein(5, 10).is_err());
    }
}
