//! Combinatorial moment predictions for primes in short windows:
//! Stirling numbers, surjection counts, Poisson moments, singular
//! series, and Hardy–Littlewood-style predicted constellation counts.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// Stirling number of the second kind: partitions of a `j`-set into `r`
/// nonempty blocks. Exact, `0 <= r <= j <= 64`.
pub fn stirling2(j: u32, r: u32) -> Result<BigUint> {
    if r > j || j > 64 {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= r <= j <= 64, got j = {j}, r = {r}"
        )));
    }
    // Rolling row of the recurrence S(n, k) = k S(n-1, k) + S(n-1, k-1).
    let mut row = vec![BigUint::one()]; // S(0, 0) = 1
    for _ in 0..j {
        let mut next = vec![BigUint::zero(); row.len() + 1];
        for (k, v) in row.iter().enumerate() {
            next[k] += v * BigUint::from(k);
            next[k + 1] += v;
        }
        row = next;
    }
    Ok(row[r as usize].clone())
}

/// Number of surjections from a `j`-set onto an `r`-set: `r! S(j, r)`.
pub fn surjections(j: u32, r: u32) -> Result<BigUint> {
    if r == 0 || r > j {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r <= j, got j = {j}, r = {r}"
        )));
    }
    let mut fact = BigUint::one();
    for i in 1..=r {
        fact *= BigUint::from(i);
    }
    Ok(fact * stirling2(j, r)?)
}

/// The `j`-th moment `m_j(eta) = sum_r S(j, r) eta^r` of a Poisson
/// variable with mean `eta`, with its per-`r` breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct MomentPrediction {
    pub j: u32,
    pub eta: f64,
    /// `m_j(eta)`.
    pub value: f64,
    /// Term `S(j, r) * eta^r` for each `r = 1..=j`.
    pub terms: Vec<(u32, f64)>,
}

/// Exact-combinatorics moment prediction `m_j(eta)`, `1 <= j <= 20`.
pub fn gallagher_moment(j: u32, eta: f64) -> Result<MomentPrediction> {
    if !(1..=20).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "moment order must be in 1..=20, got {j}"
        )));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    let mut terms = Vec::with_capacity(j as usize);
    let mut value = 0.0;
    for r in 1..=j {
        let s = stirling2(j, r)?.to_f64().unwrap();
        let term = s * eta.powi(r as i32);
        terms.push((r, term));
        value += term;
    }
    Ok(MomentPrediction {
        j,
        eta,
        value,
        terms,
    })
}

/// Raw `j`-th moment of Poisson(`eta`) by direct series summation
/// `sum_t t^j e^{-eta} eta^t / t!`, truncated once a geometric tail
/// bound certifies the remainder. Returns `(value, tail_bound)`.
pub fn poisson_moment_with_tail(j: u32, eta: f64) -> Result<(f64, f64)> {
    if j > 20 {
        return Err(Error::InvalidArgument(format!(
            "moment order must be at most 20, got {j}"
        )));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    let mut weight = (-eta).exp(); // eta^t / t! * e^{-eta} at t = 0
    let mut sum = if j == 0 { weight } else { 0.0 };
    let mut t = 0u32;
    loop {
        t += 1;
        weight *= eta / t as f64;
        let term = (t as f64).powi(j as i32) * weight;
        sum += term;
        // Successive term ratios ((t+1)/t)^j * eta/(t+1) decrease in t;
        // once the next ratio q < 1/2 the tail is under term * q/(1-q).
        let q = ((t as f64 + 1.0) / t as f64).powi(j as i32) * eta / (t as f64 + 1.0);
        if q < 0.5 {
            let tail = term * q / (1.0 - q);
            if tail <= 1e-25 * sum.max(1e-300) || tail < f64::MIN_POSITIVE {
                // Allowance for f64 roundoff across the summation.
                let round = 1e-14 * (t as f64) * sum.abs().max(1.0);
                return Ok((sum, tail + round));
            }
        }
        if t > 100_000 {
            return Err(Error::Precision(
                "Poisson series failed to converge".into(),
            ));
        }
    }
}

/// Raw `j`-th moment of Poisson(`eta`); see [`poisson_moment_with_tail`].
pub fn poisson_moment(j: u32, eta: f64) -> Result<f64> {
    Ok(poisson_moment_with_tail(j, eta)?.0)
}

/// A strictly increasing vector of positive offsets `d_1 < ... < d_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleVector {
    offsets: Vec<u64>,
}

impl TupleVector {
    pub fn new(offsets: Vec<u64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidArgument("offset vector must be nonempty".into()));
        }
        if offsets[0] == 0 {
            return Err(Error::InvalidArgument(
                "offsets must be positive (translate a 0-based vector up by 1)".into(),
            ));
        }
        if !offsets.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "offsets must be strictly increasing, got {offsets:?}"
            )));
        }
        Ok(TupleVector { offsets })
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    /// Number of offsets `j`.
    pub fn len(&self) -> u32 {
        self.offsets.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest offset `d_j`.
    pub fn max_offset(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    /// The same vector shifted by a constant; all `v(p)` are unchanged.
    pub fn translated(&self, c: u64) -> TupleVector {
        TupleVector {
            offsets: self.offsets.iter().map(|d| d + c).collect(),
        }
    }

    /// `v(p)`: the number of distinct residue classes of the offsets
    /// mod `p`. Satisfies `1 <= v(p) <= min(j, p)` and `v(p) = j` for
    /// every `p` exceeding the largest offset gap.
    pub fn distinct_residues(&self, p: u64) -> u64 {
        assert!(p >= 2, "modulus must be at least 2");
        if p > self.max_offset() {
            return self.offsets.len() as u64;
        }
        let mut res: Vec<u64> = self.offsets.iter().map(|d| d % p).collect();
        res.sort_unstable();
        res.dedup();
        res.len() as u64
    }
}

/// Truncated singular series with a rigorous tail bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingularSeries {
    /// Euler product over `p <= p_max`.
    pub value: f64,
    /// Bound on `|value - full product|`, covering both the omitted
    /// primes and floating-point roundoff in the accumulation.
    pub tail_bound: f64,
    /// Largest prime actually included.
    pub p_max: u64,
}

/// Euler product `prod_p p^{j-1} (p - v(p)) / (p-1)^j` truncated at
/// `p_max`, with a certified tail bound. Returns exact zero when some
/// factor vanishes (`v(p) = p`).
pub fn singular_series(d: &TupleVector, p_max: u64) -> Result<SingularSeries> {
    let j = d.len() as u64;
    if p_max < d.max_offset() {
        return Err(Error::InvalidArgument(format!(
            "p_max {p_max} smaller than largest offset {}",
            d.max_offset()
        )));
    }
    // Ensure the tail regime |log factor| <= (j/p)^2 (needs p >= 2j) and
    // a sane minimum amount of product.
    let p_stop = p_max.max(2 * j * j).max(100);
    let table = crate::primes::sieve_range(0, p_stop)?;
    let mut log_sum = 0.0;
    let mut n_factors = 0u64;
    for p in table.primes() {
        let v = d.distinct_residues(p);
        if v == p {
            return Ok(SingularSeries {
                value: 0.0,
                tail_bound: 0.0,
                p_max: p_stop,
            });
        }
        // log factor = log(1 - v/p) - j log(1 - 1/p), both tiny and
        // cancellation-free via log1p.
        log_sum += (-(v as f64) / p as f64).ln_1p() - j as f64 * (-1.0 / p as f64).ln_1p();
        n_factors += 1;
    }
    let value = log_sum.exp();
    // Omitted primes p > p_stop all have v(p) = j and |log factor|
    // <= (j/p)^2, so the tail of the log-sum is under j^2 / p_stop.
    let log_tail = (j * j) as f64 / p_stop as f64;
    let round = 1e-15 * n_factors as f64;
    let tail_bound = value * ((log_tail + round).exp_m1());
    Ok(SingularSeries {
        value,
        tail_bound,
        p_max: p_stop,
    })
}

/// Default prime cutoff for predictions: tail bound well under 1e-5.
pub const DEFAULT_SERIES_CUTOFF: u64 = 1_000_000;

/// Predicted count of `n <= N` with all of `n - d_i` prime.
#[derive(Debug, Clone, Serialize)]
pub struct HlPrediction {
    /// Offset vector.
    pub d: Vec<u64>,
    /// Truncated singular series value.
    pub sigma_series: f64,
    /// Tail bound on the series truncation.
    pub tail_bound: f64,
    #[serde(rename = "N")]
    pub n: u64,
    /// `sigma_series * N / (log N)^j`.
    pub prediction: f64,
}

/// First-order predicted constellation count `S(d) N / (log N)^j`,
/// with the singular series truncated at `p_max`.
pub fn hl_prediction_with(d: &TupleVector, n: u64, p_max: u64) -> Result<HlPrediction> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "prediction needs N >= 3, got {n}"
        )));
    }
    let s = singular_series(d, p_max)?;
    let j = d.len() as i32;
    let scale = n as f64 / (n as f64).ln().powi(j);
    Ok(HlPrediction {
        d: d.offsets().to_vec(),
        sigma_series: s.value,
        tail_bound: s.tail_bound,
        n,
        prediction: s.value * scale,
    })
}

/// [`hl_prediction_with`] at the default series cutoff.
pub fn hl_prediction(d: &TupleVector, n: u64) -> Result<HlPrediction> {
    hl_prediction_with(d, n, DEFAULT_SERIES_CUTOFF)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Inclusion–exclusion oracle, independent of the recurrence:
    /// S(j, r) = (1/r!) sum_i (-1)^i C(r, i) (r - i)^j.
    fn stirling2_oracle(j: u32, r: u32) -> u64 {
        let binom = |n: u64, k: u64| -> i64 {
            let mut b = 1i64;
            for i in 0..k {
                b = b * (n - i) as i64 / (i + 1) as i64;
            }
            b
        };
        let mut s = 0i64;
        for i in 0..=r as u64 {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            s += sign * binom(r as u64, i) * ((r as u64 - i) as i64).pow(j);
        }
        let mut fact = 1i64;
        for i in 1..=r as i64 {
            fact *= i;
        }
        (s / fact) as u64
    }

    #[test]
    fn stirling_matches_known_values() {
        assert_eq!(stirling2(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(stirling2(3, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(stirling2(4, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(stirling2(0, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(stirling2(5, 0).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn stirling_matches_inclusion_exclusion() {
        for j in 1..=12u32 {
            for r in 1..=j {
                assert_eq!(
                    stirling2(j, r).unwrap(),
                    BigUint::from(stirling2_oracle(j, r)),
                    "j = {j}, r = {r}"
                );
            }
        }
    }

    #[test]
    fn stirling_rejects_bad_arguments() {
        assert!(stirling2(2, 3).is_err());
        assert!(stirling2(65, 1).is_err());
    }

    /// Brute-force surjection count by enumerating all r^j maps.
    fn surjections_oracle(j: u32, r: u32) -> u64 {
        let mut count = 0;
        let total = (r as u64).pow(j);
        for code in 0..total {
            let mut c = code;
            let mut hit = vec![false; r as usize];
            for _ in 0..j {
                hit[(c % r as u64) as usize] = true;
                c /= r as u64;
            }
            if hit.iter().all(|&h| h) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn surjections_match_known_values_and_enumeration() {
        assert_eq!(surjections(2, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(surjections(2, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(surjections(3, 2).unwrap(), BigUint::from(6u32));
        for j in 1..=6u32 {
            for r in 1..=j {
                assert_eq!(
                    surjections(j, r).unwrap(),
                    BigUint::from(surjections_oracle(j, r)),
                    "j = {j}, r = {r}"
                );
            }
        }
        assert!(surjections(3, 0).is_err());
        assert!(surjections(3, 4).is_err());
    }

    #[test]
    fn first_moment_is_the_mean() {
        for &eta in &[0.25, 1.0, 3.5] {
            let m = gallagher_moment(1, eta).unwrap();
            assert_eq!(m.value, eta);
        }
    }

    #[test]
    fn second_moment_closed_form() {
        for &eta in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            let m = gallagher_moment(2, eta).unwrap();
            assert!((m.value - (eta * eta + eta)).abs() < 1e-12 * (1.0 + m.value));
        }
    }

    #[test]
    fn third_moment_at_two_is_twenty_two() {
        let m = gallagher_moment(3, 2.0).unwrap();
        assert_eq!(m.value, 22.0);
        assert_eq!(m.terms, vec![(1, 2.0), (2, 12.0), (3, 8.0)]);
    }

    #[test]
    fn poisson_series_matches_closed_forms() {
        let (v, tail) = poisson_moment_with_tail(2, 1.0).unwrap();
        assert!((v - 2.0).abs() <= tail.max(1e-12), "got {v}, tail {tail}");
        let (v, tail) = poisson_moment_with_tail(3, 0.5).unwrap();
        assert!((v - 1.375).abs() <= tail.max(1e-12), "got {v}, tail {tail}");
        let (v, _) = poisson_moment_with_tail(1, 2.75).unwrap();
        assert!((v - 2.75).abs() < 1e-10);
    }

    #[test]
    fn poisson_moments_equal_combinatorial_moments() {
        for j in 1..=10u32 {
            for &eta in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                let (p, tail) = poisson_moment_with_tail(j, eta).unwrap();
                let g = gallagher_moment(j, eta).unwrap().value;
                let tol = tail + 1e-11 * g.abs().max(1.0);
                assert!(
                    (p - g).abs() <= tol,
                    "j = {j}, eta = {eta}: poisson {p} vs combinatorial {g}"
                );
            }
        }
    }

    #[test]
    fn tuple_vector_validation() {
        assert!(TupleVector::new(vec![]).is_err());
        assert!(TupleVector::new(vec![0, 2]).is_err());
        assert!(TupleVector::new(vec![2, 2]).is_err());
        assert!(TupleVector::new(vec![3, 1]).is_err());
        assert!(TupleVector::new(vec![1, 3]).is_ok());
    }

    #[test]
    fn residue_counts_obey_bounds() {
        let cases = [
            vec![1],
            vec![1, 3],
            vec![1, 2],
            vec![2, 4, 6, 8],
            vec![1, 7, 11, 13, 17],
            vec![5, 100, 1000],
        ];
        for offsets in cases {
            let d = TupleVector::new(offsets).unwrap();
            let j = d.len() as u64;
            for p in crate::primes::base_primes(50) {
                let v = d.distinct_residues(p);
                assert!(v >= 1 && v <= j.min(p), "v({p}) = {v} for {d:?}");
            }
            for p in [1009u64, 10007] {
                assert_eq!(d.distinct_residues(p), j);
            }
        }
    }

    #[test]
    fn singleton_series_is_exactly_one() {
        for offsets in [vec![1], vec![5], vec![17]] {
            let d = TupleVector::new(offsets).unwrap();
            let s = singular_series(&d, 10_000).unwrap();
            assert_eq!(s.value, 1.0);
        }
    }

    #[test]
    fn consecutive_offsets_kill_the_series() {
        let d = TupleVector::new(vec![1, 2]).unwrap();
        let s = singular_series(&d, 1_000).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn twin_series_approaches_the_twin_constant() {
        // 2 * prod_{p > 2} (1 - (p-1)^{-2}) = 1.3203236316...
        let d = TupleVector::new(vec![1, 3]).unwrap();
        let s = singular_series(&d, 1_000_000).unwrap();
        assert!(
            (s.value - 1.3203236316).abs() <= s.tail_bound + 1e-9,
            "value {} tail {}",
            s.value,
            s.tail_bound
        );
        assert!((s.value - 1.3203236).abs() < 1e-5);
        assert!(s.tail_bound < 1e-4);
    }

    #[test]
    fn series_is_translation_invariant() {
        let d = TupleVector::new(vec![1, 3]).unwrap();
        let e = d.translated(4);
        assert_eq!(e.offsets(), &[5, 7]);
        let s1 = singular_series(&d, 50_000).unwrap();
        let s2 = singular_series(&e, 50_000).unwrap();
        assert_eq!(s1.value, s2.value);
    }

    #[test]
    fn prediction_matches_prime_counting_shape() {
        let d = TupleVector::new(vec![1]).unwrap();
        let hl = hl_prediction(&d, 1_000_000).unwrap();
        assert!((hl.prediction - 72_382.4).abs() < 0.1, "got {}", hl.prediction);
    }

    #[test]
    fn twin_prediction_at_a_million() {
        let d = TupleVector::new(vec![1, 3]).unwrap();
        let hl = hl_prediction(&d, 1_000_000).unwrap();
        assert!((hl.prediction - 6_917.5).abs() < 0.5, "got {}", hl.prediction);
    }

    #[test]
    fn vanishing_series_predicts_zero() {
        let d = TupleVector::new(vec![1, 2]).unwrap();
        let hl = hl_prediction(&d, 12_345).unwrap();
        assert_eq!(hl.prediction, 0.0);
    }

    #[test]
    fn prediction_is_empirically_close_for_twins() {
        let d = TupleVector::new(vec![1, 3]).unwrap();
        let hl = hl_prediction(&d, 1_000_000).unwrap();
        let actual = crate::primes::tuple_count(1_000_000, d.offsets()).unwrap();
        let ratio = actual as f64 / hl.prediction;
        assert!(
            (0.9..=1.2).contains(&ratio),
            "actual {actual}, predicted {}, ratio {ratio}",
            hl.prediction
        );
    }

    #[test]
    fn prediction_report_serializes_with_expected_fields() {
        let d = TupleVector::new(vec![1, 3]).unwrap();
        let hl = hl_prediction(&d, 1_000).unwrap();
        let json = serde_json::to_value(&hl).unwrap();
        for key in ["d", "sigma_series", "tail_bound", "N", "prediction"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}
