//! Exact arithmetic in real quadratic fields: values `x + y sqrt(d)`
//! with rational `x, y` and squarefree `d > 1`, plus certified embedding
//! into ball arithmetic.

use crate::ball::Ball;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// `x + y sqrt(d)` with `d` squarefree and greater than one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    pub x: BigRational,
    pub y: BigRational,
    pub d: BigInt,
}

impl QuadExt {
    pub fn new(x: BigRational, y: BigRational, d: BigInt) -> Result<Self> {
        if d <= BigInt::one() {
            return Err(Error::InvalidArgument(format!(
                "quadratic field discriminant part must exceed 1, got {d}"
            )));
        }
        Ok(QuadExt { x, y, d })
    }

    pub fn from_rational(x: BigRational, d: BigInt) -> Result<Self> {
        QuadExt::new(x, BigRational::zero(), d)
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::InvalidArgument(format!(
                "mixed quadratic fields: sqrt({}) vs sqrt({})",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        QuadExt::new(&self.x + &other.x, &self.y + &other.y, self.d.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        QuadExt::new(&self.x - &other.x, &self.y - &other.y, self.d.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let d = BigRational::from(self.d.clone());
        QuadExt::new(
            &self.x * &other.x + d * &self.y * &other.y,
            &self.x * &other.y + &self.y * &other.x,
            self.d.clone(),
        )
    }

    pub fn mul_rational(&self, c: &BigRational) -> Self {
        QuadExt {
            x: &self.x * c,
            y: &self.y * c,
            d: self.d.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        QuadExt {
            x: -self.x.clone(),
            y: -self.y.clone(),
            d: self.d.clone(),
        }
    }

    /// Galois conjugate `x - y sqrt(d)`.
    pub fn conj(&self) -> Self {
        QuadExt {
            x: self.x.clone(),
            y: -self.y.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm `x^2 - d y^2` (product with the conjugate).
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - BigRational::from(self.d.clone()) * &self.y * &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InvalidArgument(
                "division by zero in quadratic field".into(),
            ));
        }
        Ok(QuadExt {
            x: &self.x / &n,
            y: -&self.y / &n,
            d: self.d.clone(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn square(&self) -> Self {
        let d = BigRational::from(self.d.clone());
        QuadExt {
            x: &self.x * &self.x + d * &self.y * &self.y,
            y: BigRational::from(BigInt::from(2)) * &self.x * &self.y,
            d: self.d.clone(),
        }
    }

    /// Certified enclosure of the real embedding sending `sqrt(d)` to the
    /// positive square root.
    pub fn embed(&self, prec: u32) -> Result<Ball> {
        let guard = prec + 16;
        let root = Ball::from_bigint(&self.d).sqrt(guard)?;
        let rational = Ball::from_ratio(self.x.numer(), self.x.denom(), guard)?;
        let surd = Ball::from_ratio(self.y.numer(), self.y.denom(), guard)?.mul(&root, guard);
        let mut value = rational.add(&surd, guard);
        value.round(prec);
        Ok(value)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        write!(f, "{} + ({})*sqrt({})", self.x, self.y, self.d)
    }
}

/// Deterministic Miller-Rabin for inputs below 3.3 * 10^24.
fn is_prime_certain(n: &BigUint) -> Result<bool> {
    let limit: BigUint = "3317044064679887385961980".parse().unwrap();
    if *n >= limit {
        return Err(Error::Precision(format!(
            "cannot certify primality of {n}: outside the deterministic witness range"
        )));
    }
    let two = BigUint::from(2u32);
    if *n < two {
        return Ok(false);
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(small);
        if *n == p {
            return Ok(true);
        }
        if (n % &p).is_zero() {
            return Ok(false);
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Write `n = s^2 * d` with `d` squarefree, for positive `n`.
///
/// Small factors are removed by trial division; the remaining cofactor
/// must then be 1, a certified prime, or a perfect square, otherwise the
/// decomposition cannot be certified and an error is returned.
pub fn squarefree_decomposition(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "squarefree decomposition needs a positive input, got {n}"
        )));
    }
    let mut rest: BigUint = n.to_biguint().unwrap();
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    for p in crate::primes::base_primes(1_000_000) {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &pb;
        }
        if e % 2 == 1 {
            d *= &pb;
        }
    }
    if !rest.is_one() {
        if is_prime_certain(&rest)? {
            d *= &rest;
        } else {
            let root = rest.sqrt();
            if &root * &root == rest {
                s *= &root;
            } else {
                return Err(Error::Precision(format!(
                    "cannot certify the squarefree part: cofactor {rest} is neither prime nor square"
                )));
            }
        }
    }
    Ok((BigInt::from(s), BigInt::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qe(x: (i64, i64), y: (i64, i64), d: i64) -> QuadExt {
        QuadExt::new(rat(x.0, x.1), rat(y.0, y.1), BigInt::from(d)).unwrap()
    }

    #[test]
    fn golden_ratio_satisfies_its_equation() {
        // phi = 1/2 + (1/2) sqrt(5) has phi^2 = phi + 1.
        let phi = qe((1, 2), (1, 2), 5);
        let lhs = phi.square();
        let rhs = phi.add(&qe((1, 1), (0, 1), 5)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_and_norm() {
        let v = qe((3, 1), (-2, 1), 7);
        assert_eq!(v.norm(), rat(9 - 7 * 4, 1));
        let prod = v.mul(&v.inv().unwrap()).unwrap();
        assert_eq!(prod, qe((1, 1), (0, 1), 7));
        assert!(qe((0, 1), (0, 1), 7).inv().is_err());
    }

    #[test]
    fn conjugation_is_a_ring_map() {
        let a = qe((2, 3), (5, 7), 11);
        let b = qe((-1, 2), (4, 9), 11);
        assert_eq!(a.mul(&b).unwrap().conj(), a.conj().mul(&b.conj()).unwrap());
        assert_eq!(a.add(&b).unwrap().conj(), a.conj().add(&b.conj()).unwrap());
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = qe((1, 1), (1, 1), 5);
        let b = qe((1, 1), (1, 1), 7);
        assert!(a.add(&b).is_err());
        assert!(QuadExt::new(rat(1, 1), rat(1, 1), BigInt::from(1)).is_err());
    }

    #[test]
    fn embedding_encloses_the_real_value() {
        let v = qe((3, 1), (-2, 1), 2); // 3 - 2 sqrt(2) = 0.17157...
        let ball = v.embed(120).unwrap();
        let mid = ball.mid_f64();
        assert!((mid - (3.0 - 2.0 * 2.0f64.sqrt())).abs() < 1e-12);
        assert!(ball.rad_f64() < 1e-30);
        // (3 - 2 sqrt(2)) * (3 + 2 sqrt(2)) = 1 exactly; the enclosure of
        // the product must contain 1.
        let other = v.conj().embed(120).unwrap();
        let prod = ball.mul(&other, 120);
        let one = Ball::one();
        assert!(prod.sub(&one, 120).contains_zero());
    }

    #[test]
    fn squarefree_decomposition_known_values() {
        let cases: [(i64, i64, i64); 6] = [
            (1, 1, 1),
            (4, 2, 1),
            (12, 2, 3),
            (144169, 1, 144169),
            (576 * 144169, 24, 144169),
            (360, 6, 10),
        ];
        for (n, s, d) in cases {
            let (gs, gd) = squarefree_decomposition(&BigInt::from(n)).unwrap();
            assert_eq!((gs, gd), (BigInt::from(s), BigInt::from(d)), "n = {n}");
        }
        assert!(squarefree_decomposition(&BigInt::from(-4)).is_err());
    }

    #[test]
    fn squarefree_decomposition_with_large_prime_cofactor() {
        // 2^2 * 3 * p with p a prime near 10^15.
        let p: i64 = 999_999_999_999_989;
        let n = BigInt::from(12) * BigInt::from(p);
        let (s, d) = squarefree_decomposition(&n).unwrap();
        assert_eq!(s, BigInt::from(2));
        assert_eq!(d, BigInt::from(3) * BigInt::from(p));
    }

    #[test]
    fn primality_certificate_matches_trial_division() {
        for n in 2u32..2000 {
            let want = (2..n).all(|d| d * d > n || n % d != 0);
            assert_eq!(is_prime_certain(&BigUint::from(n)).unwrap(), want, "n = {n}");
        }
    }

}
