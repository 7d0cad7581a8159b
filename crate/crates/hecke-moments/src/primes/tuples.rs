//! Counts of prime constellations and the exact identity linking window
//! moments to constellation counts.
//!
//! For an offset vector `d = (d_1 < ... < d_r)` (offsets may start at 0,
//! meaning `n` itself), `tuple_count(N, d)` is the number of `n <= N`
//! with `n - d_1, ..., n - d_r` all prime. Expanding the `j`-th power of
//! the window count `W(n) = #{0 <= d <= ceil(y)-1 : n - d prime}` and
//! grouping equal indices gives the exact identity
//!
//! ```text
//! sum_{n <= N} W(n)^j
//!   = sum_{r=1}^{j} surj(j, r) * sum_{0 <= d_1 < ... < d_r <= ceil(y)-1}
//!        tuple_count(N, (d_1, ..., d_r))
//! ```
//!
//! where `surj(j, r)` counts surjections from `j` slots onto `r` labels.
//! Both sides are exact integers and must agree bit for bit.

use crate::gallagher::surjections;
use crate::primes::sieve::{sieve_range, PrimeTable};
use crate::primes::windows::{max_offset, window_moment_with};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Number of `n <= n_max` such that `n - d` is prime for every offset
/// `d` in `offsets` (strictly increasing, first entry may be 0).
pub fn tuple_count(n_max: u64, offsets: &[u64]) -> Result<u64> {
    let table = sieve_range(0, n_max)?;
    tuple_count_with(&table, n_max, offsets)
}

/// [`tuple_count`] against a caller-provided sieve of `[0, n_max]`.
pub(crate) fn tuple_count_with(table: &PrimeTable, n_max: u64, offsets: &[u64]) -> Result<u64> {
    validate_offsets(offsets)?;
    assert!(table.lo() == 0 && table.hi() >= n_max, "table must cover [0, n_max]");
    if offsets[0] >= n_max {
        return Ok(0);
    }
    // Bit n of the intersection is set iff n - d is prime for all d:
    // AND together copies of the prime bitset shifted left by each d.
    let words = table.words();
    let n_words = (n_max as usize) / 64 + 1;
    let mut acc = vec![u64::MAX; n_words];
    let mut shifted = vec![0u64; n_words];
    for &d in offsets {
        shift_left(words, d, &mut shifted);
        for (a, s) in acc.iter_mut().zip(&shifted) {
            *a &= *s;
        }
    }
    // Keep only bit positions 1..=n_max.
    acc[0] &= !1;
    let top = (n_max % 64) as u32;
    if top != 63 {
        acc[n_words - 1] &= (1u64 << (top + 1)) - 1;
    }
    Ok(acc.iter().map(|w| w.count_ones() as u64).sum())
}

/// `out[bit n] = words[bit n - d]` (zero fill below).
fn shift_left(words: &[u64], d: u64, out: &mut [u64]) {
    let q = (d / 64) as usize;
    let r = (d % 64) as u32;
    for i in (0..out.len()).rev() {
        let lo = if i >= q && i - q < words.len() {
            words[i - q]
        } else {
            0
        };
        let mut w = lo << r;
        if r != 0 && i > q && i - q - 1 < words.len() {
            w |= words[i - q - 1] >> (64 - r);
        }
        out[i] = w;
    }
}

fn validate_offsets(offsets: &[u64]) -> Result<()> {
    if offsets.is_empty() {
        return Err(Error::InvalidArgument("offset vector must be nonempty".into()));
    }
    if !offsets.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!(
            "offsets must be strictly increasing, got {offsets:?}"
        )));
    }
    Ok(())
}

/// One `r`-layer of the moment identity's right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityLayer {
    /// Number of distinct offsets in this layer.
    pub r: u32,
    /// Multiplier `surj(j, r)`.
    pub surjections: BigUint,
    /// Sum of `tuple_count` over all increasing `r`-vectors of offsets.
    pub tuple_sum: BigUint,
}

/// Result of the exact moment identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub n_max: u64,
    pub y: f64,
    pub j: u32,
    /// Direct window moment `sum_n W(n)^j`.
    pub lhs: BigUint,
    /// Reconstructed moment from constellation counts.
    pub rhs: BigUint,
    pub layers: Vec<IdentityLayer>,
}

impl IdentityCheck {
    /// Did the two independent computations agree exactly?
    pub fn is_exact(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Verify the exact identity between the `j`-th window moment and the
/// surjection-weighted constellation counts, computing both sides
/// independently. Supports `j` in `1..=3` and `n_max` up to 10^7.
pub fn moment_identity_check(n_max: u64, y: f64, j: u32) -> Result<IdentityCheck> {
    if !(1..=3).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "identity check supports moments j = 1..=3, got {j}"
        )));
    }
    if n_max == 0 || n_max > 10_000_000 {
        return Err(Error::InvalidArgument(format!(
            "identity check supports n_max in [1, 10^7], got {n_max}"
        )));
    }
    let d_max = max_offset(y)?;
    let table = sieve_range(0, n_max)?;
    let lhs = window_moment_with(&table, n_max, y, j)?;

    let mut rhs = BigUint::zero();
    let mut layers = Vec::new();
    for r in 1..=j {
        let mult = surjections(j, r)?;
        let mut tuple_sum = BigUint::zero();
        let mut combo = Combinations::new(d_max + 1, r as usize);
        while let Some(offsets) = combo.next() {
            tuple_sum += BigUint::from(tuple_count_with(&table, n_max, offsets)?);
        }
        rhs += &mult * &tuple_sum;
        layers.push(IdentityLayer {
            r,
            surjections: mult,
            tuple_sum,
        });
    }
    Ok(IdentityCheck {
        n_max,
        y,
        j,
        lhs,
        rhs,
        layers,
    })
}

/// Total number of offset tuples the `j`-th identity sums over.
pub fn identity_tuple_total(y: f64, j: u32) -> Result<u64> {
    let d_max = max_offset(y)?;
    let mut total = 0u64;
    for r in 1..=j as u64 {
        total += binomial(d_max + 1, r)
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("tuple count overflows u64".into()))?;
    }
    Ok(total)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut num = BigUint::from(1u32);
    for i in 0..k {
        num = num * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    num
}

/// In-place lexicographic enumeration of increasing `k`-subsets of
/// `{0, ..., n-1}`.
struct Combinations {
    n: u64,
    idx: Vec<u64>,
    started: bool,
    done: bool,
}

impl Combinations {
    fn new(n: u64, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k as u64).collect(),
            started: false,
            done: k as u64 > n,
        }
    }

    fn next(&mut self) -> Option<&[u64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - (k as u64 - i as u64) {
                self.idx[i] += 1;
                for t in i + 1..k {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct oracle from the definition.
    fn tuple_count_slow(n_max: u64, offsets: &[u64], table: &PrimeTable) -> u64 {
        (1..=n_max)
            .filter(|&n| {
                offsets
                    .iter()
                    .all(|&d| d <= n && table.is_prime(n - d))
            })
            .count() as u64
    }

    #[test]
    fn single_offset_counts_shifted_primes() {
        // n - 1 prime for n <= 10: n = 3, 4, 6, 8.
        assert_eq!(tuple_count(10, &[1]).unwrap(), 4);
    }

    #[test]
    fn offset_zero_counts_primes_themselves() {
        assert_eq!(tuple_count(10, &[0]).unwrap(), 4);
        assert_eq!(tuple_count(100, &[0]).unwrap(), 25);
    }

    #[test]
    fn consecutive_offsets_need_a_prime_pair() {
        // n - 1 and n - 2 both prime forces the pair (2, 3): only n = 4.
        assert_eq!(tuple_count(100, &[1, 2]).unwrap(), 1);
    }

    #[test]
    fn twin_pattern_through_twenty() {
        // n - 1 and n - 3 both prime: n = 6, 8, 14, 20.
        assert_eq!(tuple_count(20, &[1, 3]).unwrap(), 4);
    }

    #[test]
    fn matches_direct_enumeration() {
        let table = sieve_range(0, 3_000).unwrap();
        let cases: &[&[u64]] = &[
            &[0],
            &[2],
            &[0, 2],
            &[1, 5, 11],
            &[0, 2, 6],
            &[63],
            &[64],
            &[65],
            &[0, 64, 130],
            &[7, 700],
        ];
        for &offsets in cases {
            assert_eq!(
                tuple_count_with(&table, 3_000, offsets).unwrap(),
                tuple_count_slow(3_000, offsets, &table),
                "offsets {offsets:?}"
            );
        }
    }

    #[test]
    fn rejects_bad_offset_vectors() {
        assert!(tuple_count(10, &[]).is_err());
        assert!(tuple_count(10, &[3, 3]).is_err());
        assert!(tuple_count(10, &[5, 2]).is_err());
    }

    #[test]
    fn offsets_past_the_range_count_nothing() {
        assert_eq!(tuple_count(10, &[10]).unwrap(), 0);
        assert_eq!(tuple_count(10, &[9]).unwrap(), 0); // n - 9 <= 1 for n <= 10
        assert_eq!(tuple_count(10, &[8]).unwrap(), 1); // n = 10 hits the prime 2
    }

    #[test]
    fn first_moment_identity_is_exact() {
        let c = moment_identity_check(10_000, 6.9, 1).unwrap();
        assert!(c.is_exact(), "lhs {} != rhs {}", c.lhs, c.rhs);
        assert_eq!(c.layers.len(), 1);
    }

    #[test]
    fn second_moment_identity_is_exact() {
        let c = moment_identity_check(10_000, 6.9, 2).unwrap();
        assert!(c.is_exact(), "lhs {} != rhs {}", c.lhs, c.rhs);
        // surj(2, 1) = 1, surj(2, 2) = 2.
        assert_eq!(c.layers[0].surjections, BigUint::from(1u32));
        assert_eq!(c.layers[1].surjections, BigUint::from(2u32));
    }

    #[test]
    fn third_moment_identity_is_exact_with_wide_window() {
        let c = moment_identity_check(1_000, 13.8, 3).unwrap();
        assert!(c.is_exact(), "lhs {} != rhs {}", c.lhs, c.rhs);
        assert_eq!(c.layers[2].surjections, BigUint::from(6u32));
    }

    #[test]
    fn identity_holds_across_window_lengths() {
        for &y in &[0.5, 1.0, 2.0, 3.5, 7.0, 10.0] {
            for j in 1..=3 {
                let c = moment_identity_check(500, y, j).unwrap();
                assert!(c.is_exact(), "y = {y}, j = {j}: {} != {}", c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn tuple_total_matches_enumeration() {
        // ceil(6.9) = 7 offsets; C(7,1) + C(7,2) = 7 + 21.
        assert_eq!(identity_tuple_total(6.9, 2).unwrap(), 28);
        let mut combos = 0;
        let mut c = Combinations::new(7, 2);
        while c.next().is_some() {
            combos += 1;
        }
        assert_eq!(combos, 21);
    }

    #[test]
    fn combinations_cover_all_subsets_in_order() {
        let mut c = Combinations::new(4, 2);
        let mut all = Vec::new();
        while let Some(s) = c.next() {
            all.push(s.to_vec());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn identity_rejects_out_of_range_requests() {
        assert!(moment_identity_check(1_000, 6.9, 0).is_err());
        assert!(moment_identity_check(1_000, 6.9, 4).is_err());
        assert!(moment_identity_check(20_000_000, 6.9, 1).is_err());
    }
}
