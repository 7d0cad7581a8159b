//! Bessel functions of the first kind with certified error bounds.
//!
//! Three evaluation paths, chosen by argument size:
//!
//! * **Ascending series in ball arithmetic** — works for any argument the
//!   precision budget affords. The series for J_ν(x) alternates with terms
//!   as large as e^x before cancellation, so the working precision carries
//!   an excess of x·log₂e bits.
//! * **Ascending series in f64** — for small arguments and order ≥ 8,
//!   where the term sizes stay moderate and a full rounding analysis is
//!   cheap.
//! * **Periodized trapezoid rule in f64** — for large oscillatory
//!   arguments. J_ν(x) = (1/2π)∫₀^{2π} cos(νθ − x sin θ) dθ exactly for
//!   integer ν; the integrand extends to an entire 2π-periodic function, so
//!   the N-point trapezoid error is a tail of its Fourier series:
//!   |T_N − J| ≤ 2·M(a)·e^{−aN}/(1 − e^{−aN}) with M(a) = e^{νa + x·sinh a},
//!   from |ĉ(m)| ≤ M(a)e^{−a|m|} and the aliasing identity
//!   T_N − I = Σ_{l≠0} ĉ(lN). We fix a = 1.
//!
//! Everything downstream also needs pointwise *bounds* on |J_ν(x)| that are
//! valid for every argument; `bessel_j_bound_ln` returns the best of
//! Landau's two uniform bounds and the first-series-term bound
//! |J_ν(x)| ≤ (x/2)^ν/ν!, which holds for all real x by the Poisson
//! integral representation (the integral factor is at most Γ(ν+½)Γ(½)/Γ(ν+1)).

use num_bigint::BigInt;
use num_traits::One;

use crate::ball::{Ball, Mag};
use crate::{Error, Result};

/// A double-precision evaluation with a certified absolute error bound.
#[derive(Debug, Clone, Copy)]
pub struct BesselValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Largest precision excess (bits) the series path may request; arguments
/// needing more are outside the certified evaluation regime and must be
/// handled by bounds instead.
const MAX_EXCESS_BITS: f64 = 60_000.0;

/// Orders beyond this would make the series factorials and the cancellation
/// analysis pointless: at such orders the callers' arguments are always deep
/// in the super-exponentially small regime covered by `bessel_j_bound_ln`.
const MAX_SERIES_ORDER: u32 = 8_192;

/// J_ν(x) for integer ν ≥ 0 by the ascending series, as a certified ball.
///
/// The tail after the t-th term is geometric with ratio
/// q = (x/2)²/((t+1)(ν+t+1)); summation stops once the current term is
/// below 2^{8−working precision} and q ≤ ½, and the bound 2·|term| on the
/// remaining tail is absorbed into the radius.
pub fn bessel_j_ball(nu: u32, x: &Ball, prec: u32) -> Result<Ball> {
    if nu > MAX_SERIES_ORDER {
        return Err(Error::Regime(format!(
            "bessel_j_ball: order {nu} exceeds the series cap {MAX_SERIES_ORDER}; \
             use the certified magnitude bound instead"
        )));
    }
    // Run the series on the exact midpoint: radii never cancel the way the
    // alternating terms do, so feeding an inexact x through the recurrence
    // would amplify its radius by the peak term size (~e^x). The input
    // uncertainty is restored at the end through the derivative bound
    // |J_ν'| = |J_{ν−1} − J_{ν+1}|/2 ≤ 1, valid for every integer order
    // and real argument.
    let input_rad = x.rad();
    let x = x.mid_exact();
    let x_hi = x.abs_upper().to_f64();
    if x_hi == 0.0 {
        let mut b = if nu == 0 { Ball::one() } else { Ball::zero() };
        b.add_rad(&input_rad);
        return Ok(b);
    }
    let excess = 1.442695040888963 * x_hi;
    if !(excess < MAX_EXCESS_BITS) {
        return Err(Error::Regime(format!(
            "bessel_j_ball: argument {x_hi:.3e} needs ≈{excess:.0} excess bits, \
             beyond the {MAX_EXCESS_BITS:.0}-bit series budget"
        )));
    }
    let wp = prec + excess.ceil() as u32 + 48;
    let u = x.mul_2exp(-1);
    let ratio = u.mul(&u, wp).neg(); // −(x/2)², factor between successive terms
    let mut term = u.pow_u64(nu as u64, wp).div(&Ball::from_bigint(&factorial(nu)), wp)?;
    let mut sum = term.clone();
    let cutoff = Mag::two_exp(8 - wp as i64);
    let x_half_sq = (x_hi / 2.0) * (x_hi / 2.0);
    let mut t: u64 = 0;
    let budget = 8 * (x_hi as u64 + prec as u64 + nu as u64 + 64);
    loop {
        t += 1;
        if t > budget {
            return Err(Error::Regime(format!(
                "bessel_j_ball: series for order {nu} at x ≈ {x_hi:.3e} did not \
                 settle within {budget} terms"
            )));
        }
        let denom = t as i64 * (nu as i64 + t as i64);
        term = term.mul(&ratio, wp).div(&Ball::from_i64(denom), wp)?;
        sum = sum.add(&term, wp);
        let q = x_half_sq / ((t + 1) as f64 * (nu as u64 + t + 1) as f64);
        if q <= 0.5 && cutoff.ge(&term.abs_upper()) {
            // Remaining tail ≤ |term|·q/(1−q) ≤ |term| for q ≤ ½.
            sum.add_rad(&term.abs_upper());
            break;
        }
    }
    sum.add_rad(&input_rad);
    sum.round(prec);
    Ok(sum)
}

/// J_ν(x) at a requested decimal accuracy: certified enclosure whose radius
/// is below 10^(−digits). Errors if the series budget cannot reach it.
pub fn bessel_j(order: u32, x: f64, digits: u32) -> Result<Ball> {
    if order < 1 {
        return Err(Error::InvalidArgument("bessel_j: order must be ≥ 1".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument("bessel_j: argument must be ≥ 0".into()));
    }
    let prec = (digits as f64 * 3.3220) as u32 + 48;
    let v = bessel_j_ball(order, &Ball::from_f64_exact(x), prec)?;
    let target = Mag::from_f64(10f64.powi(-(digits as i32)));
    if !target.ge(&v.rad()) {
        return Err(Error::Tolerance(format!(
            "bessel_j: enclosure radius {:.3e} exceeds 10^-{digits}",
            v.rad_f64()
        )));
    }
    Ok(v)
}

/// ln of a bound on |J_ν(x)| valid for all real x ≥ 0 and integer ν ≥ 1:
/// the minimum of Landau's uniform bounds 0.6749/ν^{1/3} and 0.7858/x^{1/3}
/// and the all-x first-term bound (x/2)^ν/ν!.
pub fn bessel_j_bound_ln(nu: u64, x: f64) -> f64 {
    debug_assert!(nu >= 1);
    if x <= 0.0 {
        return f64::NEG_INFINITY; // J_ν(0) = 0 for ν ≥ 1
    }
    let landau_order = (0.6749f64).ln() - (nu as f64).ln() / 3.0;
    let landau_arg = (0.7858f64).ln() - x.ln() / 3.0;
    let first_term = nu as f64 * (x / 2.0).ln() - ln_factorial_lower(nu);
    landau_order.min(landau_arg).min(first_term) + 1e-9
}

/// Fast double-precision J_ν(x) with a certified error bound, dispatching on
/// argument size. Orders with super-exponentially small values short-circuit
/// to (0, bound).
pub fn bessel_j_f64(nu: u32, x: f64) -> Result<BesselValue> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument("bessel_j_f64: argument must be ≥ 0".into()));
    }
    if x == 0.0 {
        return Ok(BesselValue { value: if nu == 0 { 1.0 } else { 0.0 }, error_bound: 0.0 });
    }
    if nu >= 1 {
        let lb = bessel_j_bound_ln(nu as u64, x);
        if lb < -700.0 {
            return Ok(BesselValue { value: 0.0, error_bound: lb.exp().max(1e-300) });
        }
    }
    if x <= 8.0 && nu >= 8 {
        return Ok(series_f64(nu, x));
    }
    if x <= 48.0 {
        let b = bessel_j_ball(nu, &Ball::from_f64_exact(x), 96)?;
        let value = b.mid_f64();
        return Ok(BesselValue {
            value,
            error_bound: b.rad_f64() + value.abs() * f64::EPSILON,
        });
    }
    bessel_j_trapezoid(nu as u64, x, 1e-13)
}

/// Ascending series in f64 for ν ≥ 8, x ≤ 8. Terms stay below
/// Σ|t_j| ≤ I_8(8) < 12, so the rounding analysis is a straightforward
/// running bound; truncation stops at |t| < 10⁻²⁵ where the alternating
/// tail is below the stopping term.
fn series_f64(nu: u32, x: f64) -> BesselValue {
    let u = x / 2.0;
    let mut t = 1.0f64;
    for k in 1..=nu {
        t *= u / k as f64;
    }
    let mut sum = t;
    let mut abs_sum = t.abs();
    let mut j = 0u32;
    loop {
        j += 1;
        t *= -(u * u) / (j as f64 * (nu as f64 + j as f64));
        let q = (u * u) / ((j + 1) as f64 * (nu + j + 1) as f64);
        if t.abs() < 1e-25 && q < 1.0 {
            let rounding = (nu as f64 + 3.0 * j as f64 + 8.0) * f64::EPSILON * abs_sum;
            return BesselValue { value: sum, error_bound: t.abs() + rounding + 1e-24 };
        }
        sum += t;
        abs_sum += t.abs();
    }
}

/// Periodized-trapezoid evaluation for large arguments (see module docs).
/// The phase νθ_j is reduced exactly: with N a power of two and
/// θ_j = 2πj/N, νθ_j ≡ 2π·((νj mod N)/N) (mod 2π) in exact integer
/// arithmetic, so only x·sin θ_j contributes argument-scaled rounding.
pub(crate) fn bessel_j_trapezoid(nu: u64, x: f64, tol: f64) -> Result<BesselValue> {
    let target = nu as f64 + 1.5431 * x + (4.0 / tol).ln() + 8.0;
    if !(target < (1u64 << 26) as f64) {
        return Err(Error::Regime(format!(
            "bessel_j_trapezoid: order {nu}, argument {x:.3e} needs {target:.0} \
             nodes, beyond the 2^26 budget"
        )));
    }
    let n = (target.ceil() as u64).next_power_of_two();
    let tau = std::f64::consts::TAU;
    let nu_mod = nu % n;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..n {
        let theta = tau * (j as f64 / n as f64);
        let rn = (nu_mod as u128 * j as u128 % n as u128) as u64;
        let phase = tau * (rn as f64 / n as f64) - x * theta.sin();
        let term = phase.cos();
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    let value = (sum + comp) / n as f64;
    // Truncation: 2·e^{ν + 1.1752012·x − N}/(1 − e^{−aN}); the denominator
    // is within 1e-9 of 1 for every N we use.
    let ln_trunc = nu as f64 + 1.1752012 * x + std::f64::consts::LN_2 + 1e-6 - n as f64;
    let trunc = if ln_trunc < -700.0 { 1e-300 } else { ln_trunc.exp() };
    // Rounding: phase error ≤ x·2.1e-16·10 + 2e-15 per node (sin within
    // ~1.7e-15 absolute, scaled by x, plus exact-reduction residue), cosine
    // Lipschitz 1, plus compensated-summation slack.
    let round = x * 2.2e-15 + 3e-15;
    Ok(BesselValue { value, error_bound: trunc + round })
}

/// n! as a big integer.
pub(crate) fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= k;
    }
    acc
}

/// Lower bound on ln(n!), for use where an upper bound on 1/n! is needed.
/// Direct log-summation below 2048; Stirling with its enclosed remainder
/// above (the series truncated after −1/360z³ under-shoots ln Γ(z+1)).
pub(crate) fn ln_factorial_lower(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 2048 {
        let mut s = 0.0f64;
        for k in 2..=n {
            s += (k as f64).ln();
        }
        return s - s.abs() * 1e-13 - 1e-13;
    }
    let z = n as f64;
    let s = (z + 0.5) * z.ln() - z + 0.9189385332046727 + 1.0 / (12.0 * z)
        - 1.0 / (360.0 * z * z * z);
    s - s.abs() * 1e-13
}
