//! Complete exponential sums over units: S(m,n;c) = Σ_{x (c)ˣ} e((mx + n·x̄)/c).
//!
//! The sum is real (the x ↔ −x pairing conjugates each term), so both
//! evaluation paths work with cosines only:
//!
//! * a certified path in ball arithmetic, built on a shared table of
//!   cos(2πr/c) for r = 0..c computed by complex rotation, entries held as
//!   integer mantissas on one fixed exponent so a Kloosterman sum reduces to
//!   big-integer additions;
//! * a fast `f64` path (one `libm` cosine per unit) whose absolute error is
//!   bounded explicitly and returned alongside the value.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ball::{cos_sin_2pi_frac, Ball, Mag};
use crate::{Error, Result};

/// Modular inverse of `x` mod `c`, if it exists. Extended Euclid in i128.
pub fn mod_inverse(x: u64, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (c as i128, (x % c) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    let mut inv = s0 % c as i128;
    if inv < 0 {
        inv += c as i128;
    }
    Some(inv as u64)
}

/// All units x mod c paired with their inverses. O(c log c).
pub fn unit_inverses(c: u64) -> Vec<(u64, u64)> {
    if c == 1 {
        // The single residue class contributes the empty-congruence term e(0).
        return vec![(0, 0)];
    }
    let mut out = Vec::new();
    for x in 1..c {
        if let Some(xb) = mod_inverse(x, c) {
            out.push((x, xb));
        }
    }
    out
}

/// Exponent index (m·x + n·x̄) mod c for one unit, with m, n already reduced.
#[inline]
pub(crate) fn phase_index(m: u64, n: u64, x: u64, xb: u64, c: u64) -> u64 {
    ((m as u128 * x as u128 + n as u128 * xb as u128) % c as u128) as u64
}

/// Units mod c with their inverses, built without a per-unit extended
/// Euclid: non-units are struck out by sieving the prime factors of c, and
/// the inverses come from a single batched inversion (prefix products and
/// one extended Euclid for the total). Ordering matches `unit_inverses`.
pub(crate) fn units_with_inverses(c: u64) -> Vec<(u64, u64)> {
    if c == 1 {
        return vec![(0, 0)];
    }
    let mut is_unit = vec![true; c as usize];
    is_unit[0] = false;
    let mut rem = c;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            while rem % p == 0 {
                rem /= p;
            }
            let mut q = 0u64;
            while q < c {
                is_unit[q as usize] = false;
                q += p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        let mut q = 0u64;
        while q < c {
            is_unit[q as usize] = false;
            q += rem;
        }
    }
    let units: Vec<u64> = (1..c).filter(|&x| is_unit[x as usize]).collect();
    // Batched inversion: prefix[i] = u_0·…·u_{i-1} mod c.
    let mut prefix = Vec::with_capacity(units.len() + 1);
    let mut acc = 1u64;
    prefix.push(acc);
    for &u in &units {
        acc = (acc as u128 * u as u128 % c as u128) as u64;
        prefix.push(acc);
    }
    let mut inv_acc = mod_inverse(acc, c).expect("product of units is a unit");
    let mut out = vec![(0u64, 0u64); units.len()];
    for i in (0..units.len()).rev() {
        let xb = (inv_acc as u128 * prefix[i] as u128 % c as u128) as u64;
        out[i] = (units[i], xb);
        inv_acc = (inv_acc as u128 * units[i] as u128 % c as u128) as u64;
    }
    out
}

/// Shared cosine table for modulus c: `mantissas[r]·2^exp` approximates
/// cos(2πr/c) with each entry within `rad` of the true value.
pub(crate) struct CosTable {
    pub mantissas: Vec<BigInt>,
    pub exp: i64,
    pub rad: Mag,
}

/// Build cos(2πr/c) for r = 0..c by repeated complex rotation by the exact
/// root of unity e(1/c). The midpoint drift is absorbed into per-entry radii;
/// with |z| = 1 the radius grows linearly in r, so no mid-course
/// re-anchoring is needed at desk-scale c.
pub(crate) fn cos_table(c: u64, prec: u32) -> Result<CosTable> {
    let exp = -(prec as i64);
    if c == 1 {
        return Ok(CosTable { mantissas: vec![BigInt::from(1) << prec], exp, rad: Mag::ZERO });
    }
    let (c1, s1) = cos_sin_2pi_frac(1, c, prec + 16)?;
    let mut mantissas = Vec::with_capacity(c as usize);
    let mut rad = Mag::ZERO;
    let mut re = Ball::one();
    let mut im = Ball::zero();
    for r in 0..c {
        if r > 0 {
            let new_re = re.mul(&c1, prec + 16).sub(&im.mul(&s1, prec + 16), prec + 16);
            let new_im = re.mul(&s1, prec + 16).add(&im.mul(&c1, prec + 16), prec + 16);
            re = new_re;
            im = new_im;
        }
        let (man, entry_rad) = re.fixed_mantissa(exp);
        rad = rad.max(&entry_rad);
        mantissas.push(man);
    }
    Ok(CosTable { mantissas, exp, rad })
}

/// S(m,n;c) assembled from a shared cosine table and unit/inverse list.
pub(crate) fn kloosterman_from_table(
    table: &CosTable,
    units: &[(u64, u64)],
    m: u64,
    n: u64,
    c: u64,
) -> Ball {
    let mr = m % c.max(1);
    let nr = n % c.max(1);
    let mut acc = BigInt::zero();
    for &(x, xb) in units {
        acc += &table.mantissas[phase_index(mr, nr, x, xb, c) as usize];
    }
    let mut rad = Mag::ZERO;
    for _ in 0..units.len() {
        rad = rad.add(&table.rad);
    }
    Ball::from_fixed(acc, table.exp, rad)
}

/// S(m,n;c) as a certified enclosure. Negative m, n are reduced mod c.
pub fn kloosterman(m: i64, n: i64, c: u64, prec: u32) -> Result<Ball> {
    if c == 0 {
        return Err(Error::InvalidArgument("kloosterman: modulus c must be ≥ 1".into()));
    }
    let mr = m.rem_euclid(c as i64) as u64;
    let nr = n.rem_euclid(c as i64) as u64;
    let table = cos_table(c, prec + 8)?;
    let units = unit_inverses(c);
    let mut s = kloosterman_from_table(&table, &units, mr, nr, c);
    s.round(prec);
    Ok(s)
}

/// Per-term absolute error of the f64 path: the phase 2πr/c is formed from
/// the exact rational r/c (≤ 3.5 units of 2π·ε/2 through the two roundings
/// and the representation of 2π), and libm's cosine is within one ulp.
/// 5·10⁻¹⁵ over-covers both contributions for every phase in [0, 2π).
const F64_COS_ERR: f64 = 5e-15;

/// S(m,n;c) in double precision: returns (value, certified absolute error
/// bound). Kahan summation keeps the accumulation error at 2ε per unit.
pub fn kloosterman_f64(m: i64, n: i64, c: u64) -> Result<(f64, f64)> {
    if c == 0 {
        return Err(Error::InvalidArgument("kloosterman: modulus c must be ≥ 1".into()));
    }
    let mr = m.rem_euclid(c as i64) as u64;
    let nr = n.rem_euclid(c as i64) as u64;
    let units = unit_inverses(c);
    let table = cos_table_f64(c);
    let (value, terms) = kloosterman_f64_from_table(&table, &units, mr, nr, c);
    Ok((value, terms as f64 * (F64_COS_ERR + 2.0 * f64::EPSILON)))
}

/// cos(2πr/c) for r = 0..c in f64, one libm call per entry.
pub(crate) fn cos_table_f64(c: u64) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    (0..c.max(1)).map(|r| (tau * (r as f64 / c as f64)).cos()).collect()
}

/// Table-driven f64 Kloosterman sum; returns (value, number of terms).
/// The caller bounds the error as terms · (F64_COS_ERR + 2ε).
pub(crate) fn kloosterman_f64_from_table(
    table: &[f64],
    units: &[(u64, u64)],
    m: u64,
    n: u64,
    c: u64,
) -> (f64, usize) {
    let mr = m % c.max(1);
    let nr = n % c.max(1);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &(x, xb) in units {
        let term = table[phase_index(mr, nr, x, xb, c) as usize];
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    (sum + comp, units.len())
}

/// Per-term error bound of the f64 table path, exposed for budget assembly.
pub(crate) fn f64_term_error() -> f64 {
    F64_COS_ERR + 2.0 * f64::EPSILON
}

/// Table-free f64 Kloosterman sum (one libm cosine per unit); cheaper than
/// building a length-c table when only one (m, n) pair needs this modulus.
pub(crate) fn kloosterman_f64_direct(
    units: &[(u64, u64)],
    m: u64,
    n: u64,
    c: u64,
) -> (f64, usize) {
    if c == 1 {
        return (1.0, 1);
    }
    let tau = std::f64::consts::TAU;
    let mr = m % c;
    let nr = n % c;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &(x, xb) in units {
        let r = phase_index(mr, nr, x, xb, c);
        let term = (tau * (r as f64 / c as f64)).cos();
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    (sum + comp, units.len())
}

/// Number of divisors of c by trial division.
pub fn divisor_count(c: u64) -> u64 {
    debug_assert!(c >= 1);
    let mut d = 1u64;
    let mut rem = c;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            let mut e = 0;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            d *= e + 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        d *= 2;
    }
    d
}

/// The classical square-root cancellation bound d(c)·√(gcd(m,n,c))·√c.
pub fn weil_bound(m: u64, n: u64, c: u64) -> f64 {
    let g = gcd3(m, n, c);
    divisor_count(c) as f64 * ((g as f64) * (c as f64)).sqrt()
}

pub(crate) fn gcd3(m: u64, n: u64, c: u64) -> u64 {
    gcd(gcd(m, n), c)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mid(b: &Ball) -> f64 {
        b.mid_f64()
    }

    #[test]
    fn modulus_one_is_the_empty_congruence_term() {
        let s = kloosterman(1, 1, 1, 64).unwrap();
        assert!(s.is_exact() || s.rad_f64() < 1e-15);
        assert_eq!(mid(&s), 1.0);
    }

    #[test]
    fn small_moduli_match_hand_summation() {
        // c=3: x ∈ {1,2}, x̄ = x, terms e(2/3) + e(4/3) = 2cos(4π/3) = −1.
        let s3 = kloosterman(1, 1, 3, 96).unwrap();
        assert!((mid(&s3) + 1.0).abs() < 1e-20);
        // c=4: x ∈ {1,3}, both self-inverse, terms e(1/2) + e(3/2) = −2.
        let s4 = kloosterman(1, 1, 4, 96).unwrap();
        assert!((mid(&s4) + 2.0).abs() < 1e-20);
        // c=2: the single unit contributes e(1) = 1.
        let s2 = kloosterman(1, 1, 2, 96).unwrap();
        assert!((mid(&s2) - 1.0).abs() < 1e-20);
    }

    #[test]
    fn negative_arguments_reduce_mod_c() {
        let a = kloosterman(-1, 4, 5, 96).unwrap();
        let b = kloosterman(4, 4, 5, 96).unwrap();
        assert!((mid(&a) - mid(&b)).abs() < 1e-20);
    }

    /// Independent brute force: inverses via Euler's theorem x^(φ(c)−1)
    /// rather than extended Euclid, cosines term by term.
    fn brute(m: u64, n: u64, c: u64) -> f64 {
        if c == 1 {
            return 1.0;
        }
        let phi = {
            let mut phi = c;
            let mut rem = c;
            let mut p = 2;
            while p * p <= rem {
                if rem % p == 0 {
                    phi -= phi / p;
                    while rem % p == 0 {
                        rem /= p;
                    }
                }
                p += 1;
            }
            if rem > 1 {
                phi -= phi / rem;
            }
            phi
        };
        let pow = |mut b: u64, mut e: u64| -> u64 {
            let mut acc = 1u128;
            let mut bb = b as u128 % c as u128;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * bb % c as u128;
                }
                bb = bb * bb % c as u128;
                e >>= 1;
            }
            b = acc as u64;
            b
        };
        let mut s = 0.0;
        for x in 1..c {
            if gcd(x, c) != 1 {
                continue;
            }
            let xb = pow(x, phi - 1);
            let r = phase_index(m % c, n % c, x, xb, c);
            s += (std::f64::consts::TAU * (r as f64) / c as f64).cos();
        }
        s
    }

    #[test]
    fn agrees_with_brute_force_summation() {
        // Full grid: every c ≤ 500 and every m, n ≤ 20. The brute path
        // derives inverses via Euler's theorem instead of extended Euclid.
        for c in 1..=500u64 {
            let units = unit_inverses(c);
            let table = cos_table_f64(c);
            let per_term = f64_term_error();
            for m in 1..=20u64 {
                for n in 1..=20u64 {
                    let (fast, terms) = kloosterman_f64_from_table(&table, &units, m, n, c);
                    let reference = brute(m, n, c);
                    assert!(
                        (fast - reference).abs() <= terms as f64 * per_term + 1e-9,
                        "S({m},{n};{c}): fast {fast} vs brute {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn ball_and_f64_paths_agree() {
        for c in [5u64, 12, 36, 97, 210, 500] {
            for (m, n) in [(1i64, 1i64), (2, 3), (4, 9), (12, 18), (25, 49)] {
                let ball = kloosterman(m, n, c, 128).unwrap();
                let (fast, err) = kloosterman_f64(m, n, c).unwrap();
                assert!(
                    (mid(&ball) - fast).abs() <= ball.rad_f64() + err + 1e-12,
                    "paths disagree at S({m},{n};{c})"
                );
            }
        }
    }

    #[test]
    fn symmetry_in_m_and_n() {
        // x ↔ x̄ re-indexes the same multiset of phases, so the two sums are
        // the same set of table entries; equality is exact.
        for c in [7u64, 15, 32, 143] {
            for (m, n) in [(1u64, 2u64), (3, 10), (4, 9)] {
                let a = kloosterman(m as i64, n as i64, c, 128).unwrap();
                let b = kloosterman(n as i64, m as i64, c, 128).unwrap();
                let d = a.sub(&b, 128);
                assert!(d.abs_upper().to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn weil_bound_holds_for_computed_values() {
        for c in 1..=300u64 {
            for (m, n) in [(1u64, 1u64), (2, 3), (4, 4), (6, 15), (9, 9)] {
                let (v, err) = kloosterman_f64(m as i64, n as i64, c).unwrap();
                assert!(
                    v.abs() <= weil_bound(m, n, c) + err + 1e-9,
                    "Weil bound violated at S({m},{n};{c}) = {v}"
                );
            }
        }
    }

    #[test]
    fn divisor_count_small_table() {
        let expected = [1u64, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6];
        for (i, &d) in expected.iter().enumerate() {
            assert_eq!(divisor_count(i as u64 + 1), d);
        }
        assert_eq!(divisor_count(720720), 240);
    }

    #[test]
    fn batched_inversion_matches_per_unit_euclid() {
        for c in [1u64, 2, 3, 4, 12, 97, 360, 1009, 5040] {
            assert_eq!(units_with_inverses(c), unit_inverses(c), "modulus {c}");
        }
    }

    #[test]
    fn direct_and_table_f64_paths_agree() {
        for (m, n, c) in [(1u64, 1u64, 1u64), (1, 1, 101), (7, 13, 360), (4, 9, 997)] {
            let units = units_with_inverses(c);
            let table = cos_table_f64(c);
            let (direct, t1) = kloosterman_f64_direct(&units, m, n, c);
            let (tabled, t2) = kloosterman_f64_from_table(&table, &units, m, n, c);
            assert_eq!(t1, t2);
            assert!((direct - tabled).abs() <= t1 as f64 * 2.0 * f64_term_error());
        }
    }

    #[test]
    fn selberg_identity_spot_check() {
        // S(1,1;12) = Σ_{d | gcd(1,1,12)} d·S(1, 1/d²·..) reduces to the
        // twisted multiplicativity S(1,1;12) = S(1,3;4)·S(1,16;3) via CRT
        // (4̄ ≡ 1 mod 3 twists one side, 3̄ ≡ 3 mod 4 the other).
        let lhs = kloosterman(1, 1, 12, 128).unwrap();
        let a = kloosterman(1, 3 * 3, 4, 128).unwrap(); // 3̄² = 9 mod 4
        let b = kloosterman(1, 4 * 4, 3, 128).unwrap(); // 4̄² = 16 mod 3
        let rhs = a.mul(&b, 128);
        let d = lhs.sub(&rhs, 128);
        assert!(d.abs_upper().to_f64() < 1e-25, "CRT factorization failed");
    }
}
