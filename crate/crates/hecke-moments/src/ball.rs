//! Midpoint–radius ("ball") big-float arithmetic.
//!
//! A [`Ball`] stores a dyadic midpoint `man * 2^exp` (arbitrary-precision
//! `BigInt` mantissa) together with a rigorous radius bound [`Mag`].  Every
//! operation propagates the radius conservatively, so a final ball certifies
//! `|true - mid| <= rad` no matter how long the computation chain was.
//!
//! Design notes:
//! * Operations take an explicit working precision in bits; mantissas are
//!   rounded back to that size and the rounding error is absorbed into the
//!   radius.
//! * [`Mag`] is a coarse upper-bound type (f64 mantissa, i64 exponent), always
//!   rounded upward with a small safety factor.  Exponents are tracked
//!   explicitly so bounds like 2^(-400000) survive where f64 would underflow.
//! * Only the functions needed by the trace-formula work are provided:
//!   field operations, square roots, powers, pi, and cosine/sine of exact
//!   rational multiples of pi (all Kloosterman/Bessel phases have that form).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::sync::Mutex;

use crate::{Error, Result};

/// Upward-rounded safety factor applied after every f64 radius operation.
const UP: f64 = 1.0 + 1e-9;

/// A nonnegative magnitude `man * 2^exp` with `man` in `[0.5, 1)` (or exactly
/// zero).  Used for radius bounds; all arithmetic rounds up.
#[derive(Clone, Copy, Debug)]
pub struct Mag {
    man: f64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0.0, exp: 0 };

    fn normalized(man: f64, exp: i64) -> Mag {
        if man == 0.0 {
            return Mag::ZERO;
        }
        debug_assert!(man > 0.0 && man.is_finite());
        // frexp: man = f * 2^k with f in [0.5, 1)
        let k = man.log2().floor() as i64 + 1;
        let f = man / (k as f64).exp2();
        // Guard against boundary rounding.
        if f >= 1.0 {
            Mag { man: 0.5, exp: exp + k + 1 }
        } else {
            Mag { man: f.max(0.5), exp: exp + k }
        }
    }

    pub fn from_f64(x: f64) -> Mag {
        assert!(x >= 0.0 && x.is_finite());
        Mag::normalized(x * UP, 0)
    }

    /// 2^e.
    pub fn two_exp(e: i64) -> Mag {
        Mag { man: 0.5, exp: e + 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0.0
    }

    pub fn add(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let diff = hi.exp - lo.exp;
        if diff > 80 {
            // lo is negligible; bump the mantissa to stay an upper bound.
            return Mag::normalized(hi.man * (1.0 + 1e-20) * UP, hi.exp);
        }
        Mag::normalized((hi.man + lo.man / (diff as f64).exp2()) * UP, hi.exp)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized(self.man * other.man * UP, self.exp + other.exp)
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        Mag { man: self.man, exp: self.exp + e }
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.ge(other) {
            *self
        } else {
            *other
        }
    }

    pub fn ge(&self, other: &Mag) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        (self.exp, self.man) >= (other.exp, other.man)
    }

    /// Upper bound divided by a *lower* bound (caller guarantees `den_lo` is a
    /// lower bound of the true denominator and positive).
    pub fn div_up(&self, den_lo: &Mag) -> Mag {
        assert!(!den_lo.is_zero(), "division by zero magnitude");
        if self.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized(self.man / den_lo.man * UP, self.exp - den_lo.exp)
    }

    /// log2 of the bound, for planning decisions (not certified).
    pub fn log2_approx(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exp as f64 + self.man.log2()
        }
    }

    /// Saturating conversion (overflows to `INFINITY`, underflows to a tiny
    /// positive value so the result stays an upper bound).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exp > 1020 {
            return f64::INFINITY;
        }
        if self.exp < -1020 {
            return 1e-307;
        }
        self.man * (self.exp as f64).exp2()
    }
}

/// Certified real number: `man * 2^exp` with error radius `rad`.
#[derive(Clone, Debug)]
pub struct Ball {
    man: BigInt,
    exp: i64,
    rad: Mag,
}

/// Upper bound (as `Mag`) of `|m| * 2^e` for a `BigInt` mantissa.
fn big_abs_mag_up(m: &BigInt, e: i64) -> Mag {
    if m.is_zero() {
        return Mag::ZERO;
    }
    let bits = m.bits() as i64;
    // take the top <= 53 bits, round up by one ulp
    let shift = (bits - 53).max(0);
    let top: BigInt = m.abs() >> shift;
    let t = top.to_f64().unwrap() + 1.0;
    Mag::normalized(t * UP, e + shift)
}

/// Lower bound (as `Mag`) of `|m| * 2^e`.
fn big_abs_mag_down(m: &BigInt, e: i64) -> Mag {
    if m.is_zero() {
        return Mag::ZERO;
    }
    let bits = m.bits() as i64;
    let shift = (bits - 53).max(0);
    let top: BigInt = m.abs() >> shift;
    // With shift == 0 the f64 conversion is exact; only a truncating shift
    // requires stepping down to the previous representable value.
    let t = if shift > 0 {
        (top.to_f64().unwrap() - 1.0).max(0.0)
    } else {
        top.to_f64().unwrap()
    };
    if t == 0.0 {
        return Mag::ZERO;
    }
    Mag::normalized(t * (1.0 - 1e-9), e + shift)
}

impl Ball {
    pub fn zero() -> Ball {
        Ball { man: BigInt::zero(), exp: 0, rad: Mag::ZERO }
    }

    pub fn one() -> Ball {
        Ball::from_i64(1)
    }

    /// Exact ball `0 ± bound`.
    pub fn zero_with_rad(bound: Mag) -> Ball {
        Ball { man: BigInt::zero(), exp: 0, rad: bound }
    }

    pub fn from_bigint(v: &BigInt) -> Ball {
        Ball { man: v.clone(), exp: 0, rad: Mag::ZERO }
    }

    pub fn from_i64(v: i64) -> Ball {
        Ball { man: BigInt::from(v), exp: 0, rad: Mag::ZERO }
    }

    /// Exact conversion: every finite f64 is dyadic.
    pub fn from_f64_exact(x: f64) -> Ball {
        assert!(x.is_finite());
        if x == 0.0 {
            return Ball::zero();
        }
        let (m, e) = {
            let bits = x.to_bits();
            let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
            let raw_exp = ((bits >> 52) & 0x7ff) as i64;
            let frac = bits & ((1u64 << 52) - 1);
            if raw_exp == 0 {
                (sign * frac as i64, -1074i64)
            } else {
                (sign * (frac | (1u64 << 52)) as i64, raw_exp - 1075)
            }
        };
        Ball { man: BigInt::from(m), exp: e, rad: Mag::ZERO }
    }

    /// `num/den` to `prec` bits (exact rational input).
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Ball> {
        if den.is_zero() {
            return Err(Error::Ball("from_ratio: zero denominator".into()));
        }
        let nb = num.bits() as i64;
        let db = den.bits() as i64;
        let shift = (prec as i64 + 16 + db - nb).max(0);
        let q = (num << shift) / den;
        let mut b = Ball { man: q, exp: -shift, rad: Mag::two_exp(-shift) };
        b.round(prec);
        Ok(b)
    }

    /// Mantissa of the midpoint quantized onto the grid `2^exp`, together
    /// with the total radius (original radius plus quantization error).
    /// `returned_mantissa * 2^exp` is within the returned radius of every
    /// point of the ball. Used to put many balls on a shared exponent so
    /// that their sum reduces to integer additions.
    pub fn fixed_mantissa(&self, exp: i64) -> (BigInt, Mag) {
        if self.exp >= exp {
            let m = &self.man << (self.exp - exp) as u64;
            (m, self.rad)
        } else {
            let shift = (exp - self.exp) as u64;
            let half = BigInt::from(1) << (shift - 1);
            // BigInt `>>` floors, so round the magnitude to keep the
            // quantization error within half a grid step for either sign.
            let rounded = (self.man.abs() + half) >> shift;
            let m = if self.man.sign() == num_bigint::Sign::Minus {
                -rounded
            } else {
                rounded
            };
            (m, self.rad.add(&Mag::two_exp(exp - 1)))
        }
    }

    /// Reassemble a ball from a fixed-exponent mantissa and radius.
    pub fn from_fixed(man: BigInt, exp: i64, rad: Mag) -> Ball {
        Ball { man, exp, rad }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// The midpoint alone as an exact ball. Callers that can bound a
    /// function's derivative use this to propagate the input radius
    /// first-order instead of through every intermediate operation.
    pub fn mid_exact(&self) -> Ball {
        Ball { man: self.man.clone(), exp: self.exp, rad: Mag::ZERO }
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn add_rad(&mut self, extra: &Mag) {
        self.rad = self.rad.add(extra);
    }

    /// Upper bound of |value|.
    pub fn abs_upper(&self) -> Mag {
        big_abs_mag_up(&self.man, self.exp).add(&self.rad)
    }

    /// Lower bound of |value| (0 if the ball may contain 0).
    pub fn abs_lower(&self) -> Mag {
        let mid = big_abs_mag_down(&self.man, self.exp);
        if !mid.ge(&self.rad) {
            return Mag::ZERO;
        }
        // mid - rad, rounded down: compute in f64 mantissa space
        if self.rad.is_zero() {
            return mid;
        }
        let diff_exp = mid.exp - self.rad.exp;
        if diff_exp > 80 {
            return Mag::normalized(mid.man * (1.0 - 1e-9), mid.exp);
        }
        let v = mid.man - self.rad.man / (diff_exp as f64).exp2();
        if v <= 0.0 {
            Mag::ZERO
        } else {
            Mag::normalized(v * (1.0 - 1e-9), mid.exp)
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    /// Certified: is |value| <= bound for every point of the ball?
    pub fn abs_le_mag(&self, bound: &Mag) -> bool {
        bound.ge(&self.abs_upper())
    }

    /// Certified: every point of this ball is strictly below every point of
    /// `other`.
    pub fn lt_certain(&self, other: &Ball, prec: u32) -> bool {
        let d = other.sub(self, prec);
        if d.man.sign() != num_bigint::Sign::Plus {
            return false;
        }
        big_abs_mag_down(&d.man, d.exp).ge(&d.rad) && !d.contains_zero()
    }

    /// Round the mantissa to at most `prec` bits, absorbing the truncation
    /// error into the radius.
    pub fn round(&mut self, prec: u32) {
        let bits = self.man.bits();
        if bits > prec as u64 {
            let drop = (bits - prec as u64) as i64;
            // BigInt >> rounds toward negative infinity; error < 1 new-ulp.
            self.man = &self.man >> drop;
            self.exp += drop;
            self.rad = self.rad.add(&Mag::two_exp(self.exp));
        }
        if self.man.is_zero() {
            self.exp = 0;
        }
    }

    pub fn neg(&self) -> Ball {
        Ball { man: -&self.man, exp: self.exp, rad: self.rad }
    }

    pub fn add(&self, other: &Ball, prec: u32) -> Ball {
        let rad = self.rad.add(&other.rad);
        // Degenerate/imbalanced cases: fold the negligible operand into rad.
        let top_a = self.exp + self.man.bits() as i64;
        let top_b = other.exp + other.man.bits() as i64;
        let (hi, lo, top_hi, top_lo) = if top_a >= top_b {
            (self, other, top_a, top_b)
        } else {
            (other, self, top_b, top_a)
        };
        if lo.man.is_zero() {
            let mut r = Ball { man: hi.man.clone(), exp: hi.exp, rad };
            r.round(prec);
            return r;
        }
        if top_lo < top_hi - (prec as i64 + 64) {
            let mut r = Ball { man: hi.man.clone(), exp: hi.exp, rad: rad.add(&big_abs_mag_up(&lo.man, lo.exp)) };
            r.round(prec);
            return r;
        }
        let e = self.exp.min(other.exp);
        let ma: BigInt = &self.man << (self.exp - e) as u64;
        let mb: BigInt = &other.man << (other.exp - e) as u64;
        let mut r = Ball { man: ma + mb, exp: e, rad };
        r.round(prec);
        r
    }

    pub fn sub(&self, other: &Ball, prec: u32) -> Ball {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Ball, prec: u32) -> Ball {
        let a_mag = big_abs_mag_up(&self.man, self.exp);
        let b_mag = big_abs_mag_up(&other.man, other.exp);
        let rad = self
            .rad
            .mul(&b_mag)
            .add(&other.rad.mul(&a_mag))
            .add(&self.rad.mul(&other.rad));
        let mut r = Ball { man: &self.man * &other.man, exp: self.exp + other.exp, rad };
        r.round(prec);
        r
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Ball {
        let kk = BigInt::from(k);
        let rad = self.rad.mul(&big_abs_mag_up(&kk, 0));
        let mut r = Ball { man: &self.man * kk, exp: self.exp, rad };
        r.round(prec);
        r
    }

    pub fn mul_2exp(&self, e: i64) -> Ball {
        Ball { man: self.man.clone(), exp: self.exp + e, rad: self.rad.mul_2exp(e) }
    }

    pub fn div(&self, other: &Ball, prec: u32) -> Result<Ball> {
        let den_lo = other.abs_lower();
        if den_lo.is_zero() {
            return Err(Error::Ball("division by a ball containing zero".into()));
        }
        if other.man.is_zero() {
            return Err(Error::Ball("division by zero midpoint".into()));
        }
        let nb = self.man.bits() as i64;
        let db = other.man.bits() as i64;
        let shift = (prec as i64 + 16 + db - nb).max(0);
        let q = (&self.man << shift) / &other.man;
        let exp = self.exp - other.exp - shift;
        // |a/b - A/B| <= (ra*|B| + |A|*rb) / (|b| * |B|), |b| >= den_lo
        let a_mag = big_abs_mag_up(&self.man, self.exp);
        let b_mid_lo = big_abs_mag_down(&other.man, other.exp);
        let b_mid_up = big_abs_mag_up(&other.man, other.exp);
        let num = self.rad.mul(&b_mid_up).add(&other.rad.mul(&a_mag));
        let rad = num.div_up(&den_lo.mul(&if b_mid_lo.is_zero() { den_lo } else { b_mid_lo }));
        let mut r = Ball { man: q, exp, rad: rad.add(&Mag::two_exp(exp)) };
        r.round(prec);
        Ok(r)
    }

    pub fn recip(&self, prec: u32) -> Result<Ball> {
        Ball::one().div(self, prec)
    }

    /// Certified square root.  Requires the ball to be strictly positive (or
    /// exactly zero).
    pub fn sqrt(&self, prec: u32) -> Result<Ball> {
        if self.man.is_zero() && self.rad.is_zero() {
            return Ok(Ball::zero());
        }
        if self.man.sign() == num_bigint::Sign::Minus || self.contains_zero() {
            return Err(Error::Ball("sqrt of a ball not certainly positive".into()));
        }
        let mut m = self.man.clone();
        let mut e = self.exp;
        if e.rem_euclid(2) == 1 {
            m <<= 1;
            e -= 1;
        }
        let want = 2 * (prec as i64 + 16);
        let extra = ((want - m.bits() as i64).max(0) + 1) / 2 * 2;
        m <<= extra;
        e -= extra;
        let root = m.sqrt(); // floor
        let rexp = e / 2;
        // sqrt lower bound for error propagation
        let root_lo = big_abs_mag_down(&root, rexp);
        // |sqrt(a) - sqrt(A)| <= ra / (2 sqrt_lo); floor error <= 1 ulp
        let rad = self.rad.div_up(&root_lo.mul_2exp(1)).add(&Mag::two_exp(rexp));
        let mut r = Ball { man: root, exp: rexp, rad };
        r.round(prec);
        Ok(r)
    }

    pub fn pow_u64(&self, mut n: u64, prec: u32) -> Ball {
        let mut base = self.clone();
        let mut acc = Ball::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, prec);
            }
        }
        acc
    }

    /// Midpoint as f64 (lossy; for display/planning only).
    pub fn mid_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let shift = (bits - 53).max(0);
        let top: BigInt = if shift > 0 {
            // Round to nearest rather than truncating. BigInt `>>` floors,
            // which over-rounds negatives, so round the magnitude instead.
            let half = BigInt::from(1) << (shift - 1) as u64;
            let rounded = (self.man.abs() + half) >> shift;
            if self.man.sign() == num_bigint::Sign::Minus {
                -rounded
            } else {
                rounded
            }
        } else {
            self.man.clone()
        };
        let t = top.to_f64().unwrap();
        let e = self.exp + shift;
        if e > 1020 {
            if t > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
        } else if e < -1074 {
            0.0
        } else {
            t * (e as f64).exp2()
        }
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn mid_decimal(&self, digits: usize) -> String {
        if self.man.is_zero() {
            return "0".into();
        }
        let neg = self.man.sign() == num_bigint::Sign::Minus;
        let m = self.man.abs();
        // value = m * 2^exp; find decimal exponent d10 ~ log10(value)
        let log10 = (m.bits() as f64 + self.exp as f64) * std::f64::consts::LN_2 / std::f64::consts::LN_10;
        let d10 = log10.floor() as i64;
        // scaled = value * 10^(digits - 1 - d10), rounded to integer
        let tpow = digits as i64 - 1 - d10;
        let ten = BigInt::from(10);
        let mut num = m;
        let mut den = BigInt::from(1);
        if tpow >= 0 {
            num *= ten.pow(tpow as u32);
        } else {
            den *= ten.pow((-tpow) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let mut scaled = (&num + (&den >> 1u32)) / &den;
        let mut d10 = d10;
        // normalize in case the log10 estimate was off by one
        let lo = ten.pow(digits as u32 - 1);
        let hi = ten.pow(digits as u32);
        while scaled >= hi {
            scaled = (&scaled + BigInt::from(5)) / &ten;
            d10 += 1;
        }
        while !scaled.is_zero() && scaled < lo {
            scaled *= &ten;
            d10 -= 1;
        }
        let s = scaled.to_string();
        let mantissa = if s.len() > 1 {
            format!("{}.{}", &s[..1], &s[1..])
        } else {
            s
        };
        let sign = if neg { "-" } else { "" };
        if d10 != 0 {
            format!("{sign}{mantissa}e{d10}")
        } else {
            format!("{sign}{mantissa}")
        }
    }
}

impl std::fmt::Display for Ball {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ± {:.3e}", self.mid_decimal(17), self.rad.to_f64())
    }
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

static PI_CACHE: Mutex<Option<(u32, Ball)>> = Mutex::new(None);

/// Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239), with integer
/// fixed-point series and an explicit remainder bound.
fn compute_pi(prec: u32) -> Ball {
    let p = prec as i64 + 32;
    let one = BigInt::from(1) << p as u64;

    // atan(1/x) * 2^p with error < (#terms + 1) in ulps of 2^-p
    let atan_inv = |x: i64| -> (BigInt, u64) {
        let xx = BigInt::from(x) * BigInt::from(x);
        let mut term = &one / BigInt::from(x);
        let mut sum = term.clone();
        let mut k = 1u64;
        loop {
            term = term / &xx;
            if term.is_zero() {
                break;
            }
            let contrib = &term / BigInt::from(2 * k + 1);
            if k % 2 == 1 {
                sum -= &contrib;
            } else {
                sum += &contrib;
            }
            k += 1;
            if contrib.is_zero() {
                break;
            }
        }
        (sum, k + 1)
    };

    let (a5, n5) = atan_inv(5);
    let (a239, n239) = atan_inv(239);
    let man = BigInt::from(16) * a5 - BigInt::from(4) * a239;
    // each series: truncation <= first omitted term <= 1 ulp at the stopping
    // point, plus <= 1 ulp truncation per computed term
    let err_ulps = 16 * (n5 + 2) + 4 * (n239 + 2);
    let rad = Mag::from_f64(err_ulps as f64).mul(&Mag::two_exp(-p));
    let mut b = Ball { man, exp: -p, rad };
    b.round(prec);
    b
}

/// pi to `prec` bits (cached).
pub fn pi(prec: u32) -> Ball {
    let mut guard = PI_CACHE.lock().unwrap();
    if let Some((cached_prec, ref ball)) = *guard {
        if cached_prec >= prec {
            let mut b = ball.clone();
            b.round(prec);
            return b;
        }
    }
    let b = compute_pi(prec);
    *guard = Some((prec, b.clone()));
    b
}

// ---------------------------------------------------------------------------
// Trigonometry of rational multiples of pi
// ---------------------------------------------------------------------------

/// cos and sin by Taylor series, certified for |phi| <= 0.8.
/// Remainder: the series alternate with strictly decreasing terms in this
/// range, so the truncation error is below the first omitted term.
fn cos_sin_taylor(phi: &Ball, prec: u32) -> (Ball, Ball) {
    debug_assert!(phi.abs_upper().to_f64() <= 0.801);
    let wp = prec + 16;
    let x2 = phi.mul(phi, wp);
    let mut cos = Ball::one();
    let mut sin = Ball::one();
    // cos = sum (-1)^k x^(2k) / (2k)!, sin = x * sum (-1)^k x^(2k) / (2k+1)!
    let mut term_c = Ball::one();
    let mut term_s = Ball::one();
    let mut k: i64 = 1;
    let thresh = Mag::two_exp(-(prec as i64) - 8);
    loop {
        term_c = term_c.mul(&x2, wp);
        term_c = term_c.div(&Ball::from_i64((2 * k - 1) * (2 * k)), wp).unwrap();
        term_s = term_s.mul(&x2, wp);
        term_s = term_s.div(&Ball::from_i64((2 * k) * (2 * k + 1)), wp).unwrap();
        if k % 2 == 1 {
            cos = cos.sub(&term_c, wp);
            sin = sin.sub(&term_s, wp);
        } else {
            cos = cos.add(&term_c, wp);
            sin = sin.add(&term_s, wp);
        }
        let done = thresh.ge(&term_c.abs_upper()) && thresh.ge(&term_s.abs_upper());
        k += 1;
        if done {
            // next terms bound the remainders
            let next_c = term_c.abs_upper().mul(&x2.abs_upper());
            let next_s = term_s.abs_upper().mul(&x2.abs_upper());
            cos.add_rad(&next_c);
            sin.add_rad(&next_s);
            break;
        }
        assert!(k < 10_000, "cos_sin_taylor failed to converge");
    }
    let sin = sin.mul(phi, wp);
    (cos, sin)
}

/// `(cos, sin)` of `pi * num / den`, certified.
///
/// The angle is reduced exactly in integer arithmetic (period 2, then octant
/// symmetries), so only a Taylor evaluation on `[0, pi/4]` remains.
pub fn cos_sin_pi_frac(num: &BigInt, den: &BigInt, prec: u32) -> Result<(Ball, Ball)> {
    if den.is_zero() {
        return Err(Error::InvalidArgument("cos_sin_pi_frac: zero denominator".into()));
    }
    let den = if den.sign() == num_bigint::Sign::Minus { -den } else { den.clone() };
    let num = if den.sign() != num_bigint::Sign::Minus { num.clone() } else { -num };
    // reduce num mod 2*den  ->  t = num/den in [0, 2)
    let two_den = &den << 1u32;
    let m = num.mod_floor(&two_den);
    // octant o = floor(t * 4) = floor(4m/den), remainder phi = pi*(m/den - o/4)
    let four_m = &m << 2u32;
    let (o, rem) = four_m.div_mod_floor(&den);
    let o = o.to_u32().expect("octant in 0..8");
    debug_assert!(o < 8);
    let wp = prec + 16;
    // base angle pi * rem / (4 den) in [0, pi/4]
    let frac = Ball::from_ratio(&rem, &(&den << 2u32), wp)?;
    let phi = pi(wp).mul(&frac, wp);
    let (c, s) = cos_sin_taylor(&phi, prec + 8);
    // cos(o*pi/4 + phi), sin(o*pi/4 + phi) via angle addition with
    // cos(o*pi/4), sin(o*pi/4) in {0, ±1, ±r} where r = sqrt(1/2).
    let r = Ball::from_ratio(&BigInt::from(1), &BigInt::from(2), wp)?.sqrt(wp)?;
    let (co, so): (Ball, Ball) = match o {
        0 => (Ball::one(), Ball::zero()),
        1 => (r.clone(), r.clone()),
        2 => (Ball::zero(), Ball::one()),
        3 => (r.neg(), r.clone()),
        4 => (Ball::one().neg(), Ball::zero()),
        5 => (r.neg(), r.neg()),
        6 => (Ball::zero(), Ball::one().neg()),
        7 => (r.clone(), r.neg()),
        _ => unreachable!(),
    };
    let cos = co.mul(&c, wp).sub(&so.mul(&s, wp), wp);
    let sin = so.mul(&c, wp).add(&co.mul(&s, wp), wp);
    Ok((cos, sin))
}

/// `(cos, sin)` of `2 pi r / c` — the Kloosterman phase — certified.
pub fn cos_sin_2pi_frac(r: u64, c: u64, prec: u32) -> Result<(Ball, Ball)> {
    cos_sin_pi_frac(&BigInt::from(2 * r as u128), &BigInt::from(c), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn assert_contains(b: &Ball, x: f64) {
        let d = b.sub(&Ball::from_f64_exact(x), 128);
        assert!(
            !d.abs_lower().ge(&Mag::two_exp(-200)) || d.contains_zero(),
            "ball {} does not contain {}",
            b,
            x
        );
        assert!(d.contains_zero(), "ball {b} does not contain {x}");
    }

    #[test]
    fn ratio_roundtrip() {
        let third = Ball::from_ratio(&BigInt::from(1), &BigInt::from(3), 128).unwrap();
        let one = third.mul_i64(3, 128);
        assert_contains(&one, 1.0);
        assert!(one.rad_f64() < 1e-30);
    }

    #[test]
    fn division_and_reciprocal() {
        let a = Ball::from_i64(355);
        let b = Ball::from_i64(113);
        let q = a.div(&b, 192).unwrap();
        let back = q.mul(&b, 192);
        assert_contains(&back, 355.0);
        let r = b.recip(192).unwrap();
        let prod = r.mul(&b, 192);
        assert_contains(&prod, 1.0);
    }

    #[test]
    fn sqrt_squares_back() {
        for v in [2i64, 3, 5, 144169, 1 << 40] {
            let s = Ball::from_i64(v).sqrt(256).unwrap();
            let sq = s.mul(&s, 256);
            assert_contains(&sq, v as f64);
            assert!(sq.rad_f64() < 1e-60, "rad too big for sqrt({v})");
        }
        assert!(Ball::from_i64(-2).sqrt(64).is_err());
    }

    #[test]
    fn pi_digits() {
        let p = pi(400);
        // 50 correct digits of pi
        let s = p.mid_decimal(50);
        assert!(s.starts_with("3.141592653589793238462643383279502884197169399375"));
        assert!(p.rad_f64() < 1e-110);
    }

    #[test]
    fn trig_known_values() {
        // cos(pi/3) = 1/2, sin(pi/6) = 1/2, cos(pi/4) = sqrt(2)/2
        let (c, _s) = cos_sin_pi_frac(&BigInt::from(1), &BigInt::from(3), 256).unwrap();
        assert_contains(&c, 0.5);
        assert!(c.rad_f64() < 1e-60);
        let (_c, s) = cos_sin_pi_frac(&BigInt::from(1), &BigInt::from(6), 256).unwrap();
        assert_contains(&s, 0.5);
        // periodicity and parity: cos(pi*(2 + 1/3)) = cos(pi/3)
        let (c2, _) = cos_sin_pi_frac(&BigInt::from(7), &BigInt::from(3), 256).unwrap();
        let d = c2.sub(&c, 256);
        assert!(d.contains_zero() && d.abs_upper().to_f64() < 1e-60);
    }

    #[test]
    fn trig_pythagorean_identity() {
        for (num, den) in [(1i64, 7i64), (3, 11), (5, 9), (123, 1024), (999, 1000), (13, 8)] {
            let (c, s) = cos_sin_pi_frac(&BigInt::from(num), &BigInt::from(den), 320).unwrap();
            let lhs = c.mul(&c, 320).add(&s.mul(&s, 320), 320);
            let d = lhs.sub(&Ball::one(), 320);
            assert!(d.contains_zero(), "cos^2+sin^2 != 1 for {num}/{den}");
            assert!(d.abs_upper().to_f64() < 1e-80);
        }
    }

    #[test]
    fn trig_matches_f64() {
        for r in 0..50u64 {
            let c = 50u64;
            let (cb, sb) = cos_sin_2pi_frac(r, c, 128).unwrap();
            let theta = 2.0 * std::f64::consts::PI * (r as f64) / (c as f64);
            assert!((cb.mid_f64() - theta.cos()).abs() < 1e-14);
            assert!((sb.mid_f64() - theta.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn rounding_keeps_enclosure() {
        let mut b = Ball::from_ratio(&BigInt::from(1), &BigInt::from(7), 512).unwrap();
        b.round(40);
        assert_contains(&b, 1.0 / 7.0);
        assert!(b.rad_f64() < 1e-10 && b.rad_f64() > 0.0);
    }

    #[test]
    fn mag_ordering_and_arith() {
        let a = Mag::from_f64(3.0);
        let b = Mag::from_f64(4.0);
        assert!(b.ge(&a));
        assert!(a.add(&b).ge(&Mag::from_f64(7.0 - 1e-9)));
        assert!(Mag::from_f64(12.5).ge(&a.mul(&b)));
        assert!(a.mul(&b).ge(&Mag::from_f64(11.9)));
        let tiny = Mag::two_exp(-100_000);
        assert!(!tiny.is_zero());
        assert!(Mag::two_exp(-99_999).ge(&tiny));
    }

    #[test]
    fn decimal_rendering() {
        let b = Ball::from_ratio(&BigInt::from(1), &BigInt::from(8), 128).unwrap();
        assert_eq!(b.mid_decimal(3), "1.25e-1");
        let c = Ball::from_i64(1000);
        assert_eq!(c.mid_decimal(4), "1.000e3");
    }

    #[test]
    fn pow_and_negligible_add() {
        let two = Ball::from_i64(2);
        let p = two.pow_u64(100, 256);
        let expect = BigInt::from(1) << 100u32;
        let d = p.sub(&Ball::from_bigint(&expect), 256);
        assert!(d.contains_zero());
        // adding something 2^-1000 below the ulp must still be sound
        let tiny = Ball::from_ratio(&BigInt::from(1), &(BigInt::from(1) << 1000u32), 64).unwrap();
        let s = Ball::one().add(&tiny, 64);
        assert!(s.sub(&Ball::one(), 128).abs_upper().to_f64() < 1e-15);
        // enclosure: 1 + 2^-1000 is inside
        let exact = Ball::one(); // 1 differs by 2^-1000 which must be within rad
        let d2 = s.sub(&exact, 128);
        assert!(d2.contains_zero() || d2.abs_upper().to_f64() < 1e-15);
    }
}
