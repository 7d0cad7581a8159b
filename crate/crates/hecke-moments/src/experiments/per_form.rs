//! Per-form second moment in exact field arithmetic.
//!
//! For a single eigenform everything reduces to the rational numbers
//! `s_p = λ(p)² = a(p)²/p^{k-1}` (which live in the form's coefficient
//! field): the prime-power eigenvalues in the expanded route follow from
//! the Hecke recursion as `λ(p²) = s - 1` and `λ(p⁴) = s² - 3s + 1`, and
//! cross terms factor by multiplicativity. The three routes therefore
//! agree *exactly* — same field, different bracketing — and any
//! discrepancy is a real bug, not roundoff.

use crate::ball::Ball;
use crate::experiments::{BudgetTerm, SecondMomentReport};
use crate::modforms::{EigenCoefficients, Eigenform, QuadExt};
use crate::primes::{max_offset, sieve_range, WINDOW_CONVENTION};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Working precision for embedding exact results and for the numeric
/// coefficient fallback; far beyond the 10⁻²⁵ agreement checks.
const EMBED_PREC: u32 = 192;

/// An element of the form's coefficient field.
#[derive(Clone)]
enum Scalar {
    Rat(BigRational),
    Quad(QuadExt),
    Num(Ball),
}

impl Scalar {
    fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Quad(a), Scalar::Quad(b)) => Ok(Scalar::Quad(a.add(b)?)),
            (Scalar::Num(a), Scalar::Num(b)) => Ok(Scalar::Num(a.add(b, EMBED_PREC))),
            _ => Err(Error::Validation("mixed coefficient fields".into())),
        }
    }

    fn sub(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a - b)),
            (Scalar::Quad(a), Scalar::Quad(b)) => Ok(Scalar::Quad(a.sub(b)?)),
            (Scalar::Num(a), Scalar::Num(b)) => Ok(Scalar::Num(a.sub(b, EMBED_PREC))),
            _ => Err(Error::Validation("mixed coefficient fields".into())),
        }
    }

    fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Quad(a), Scalar::Quad(b)) => Ok(Scalar::Quad(a.mul(b)?)),
            (Scalar::Num(a), Scalar::Num(b)) => Ok(Scalar::Num(a.mul(b, EMBED_PREC))),
            _ => Err(Error::Validation("mixed coefficient fields".into())),
        }
    }

    /// An integer constant in the same field as `self`.
    fn constant(&self, v: i64) -> Result<Scalar> {
        Ok(match self {
            Scalar::Rat(_) => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            Scalar::Quad(a) => Scalar::Quad(QuadExt::from_rational(
                BigRational::from_integer(BigInt::from(v)),
                a.d.clone(),
            )?),
            Scalar::Num(_) => Scalar::Num(Ball::from_i64(v)),
        })
    }

    fn to_ball(&self, prec: u32) -> Result<Ball> {
        match self {
            Scalar::Rat(a) => Ball::from_ratio(a.numer(), a.denom(), prec),
            Scalar::Quad(a) => a.embed(prec),
            Scalar::Num(a) => {
                let mut b = a.clone();
                b.round(prec);
                Ok(b)
            }
        }
    }

    /// Is the scalar held exactly (so equality checks are exact)?
    fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Num(_))
    }

    /// Certified upper bound on `|self - other|`.
    fn abs_diff_upper(&self, other: &Scalar) -> Result<f64> {
        let d = self.sub(other)?;
        if d.is_exact() {
            // Exact fields compare exactly; report 0 only on true equality.
            let zero = match &d {
                Scalar::Rat(a) => a.numer().sign() == num_bigint::Sign::NoSign,
                Scalar::Quad(a) => a.is_zero(),
                Scalar::Num(_) => unreachable!(),
            };
            if zero {
                return Ok(0.0);
            }
        }
        Ok(d.to_ball(EMBED_PREC)?.abs_upper().to_f64())
    }
}

/// `λ(p)² = a(p)²/p^{k-1}` in the form's own coefficient field.
fn lambda_square_scalar(f: &Eigenform, p: u64) -> Result<Scalar> {
    let power = BigInt::from(p).pow(f.weight() - 1);
    match f.coefficients() {
        EigenCoefficients::Integer(_) => {
            let a = f.coeff_int(p as usize)?;
            Ok(Scalar::Rat(BigRational::new(a * a, power)))
        }
        EigenCoefficients::Quadratic(v) => {
            let sq = v[p as usize].square();
            let scale = BigRational::from(power).recip();
            Ok(Scalar::Quad(sq.mul_rational(&scale)))
        }
        EigenCoefficients::Numeric(_) => {
            Ok(Scalar::Num(f.lambda_squared(p, EMBED_PREC)?))
        }
    }
}

/// Second moment of the windowed squared-eigenvalue sums for one form,
/// computed three ways in the form's exact coefficient field:
///
/// 1. **direct**: `Σ_n (Σ_{p ∈ window} λ(p)²)²`;
/// 2. **split**: `Σ_n [Σ_p λ(p)⁴ + 2 Σ_{p₁<p₂} λ(p₁)²λ(p₂)²]`;
/// 3. **expanded**: every power rewritten in the `λ(p^r)` basis,
///    `λ(p)⁴ = λ(p⁴) + 3λ(p²) + 2` and
///    `λ(p₁)²λ(p₂)² = λ(p₁²)λ(p₂²) + λ(p₁²) + λ(p₂²) + 1`.
///
/// The routes must agree exactly (or within embedding radii for numeric
/// coefficient data); the report carries all three and the certified
/// bound on their largest pairwise difference.
pub fn per_form_second_moment(f: &Eigenform, n_max: u64, eta: f64) -> Result<SecondMomentReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "range end must be at least 2, got {n_max}"
        )));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    if (f.precision() as u64) < n_max {
        return Err(Error::Precision(format!(
            "insufficient eigenvalue range: the windows need a(p) for p <= {n_max}, \
             but the form carries coefficients only up to {}",
            f.precision()
        )));
    }
    let y = eta * (n_max as f64).ln();
    let d_max = max_offset(y)?;

    let table = sieve_range(0, n_max)?;
    let primes: Vec<u64> = table.primes().collect();
    let mut s_vals = Vec::with_capacity(primes.len());
    for &p in &primes {
        s_vals.push(lambda_square_scalar(f, p)?);
    }
    let zero = if let Some(s) = s_vals.first() {
        s.constant(0)?
    } else {
        Scalar::Rat(BigRational::from_integer(BigInt::from(0)))
    };

    let mut route_direct = zero.clone();
    let mut route_split = zero.clone();
    let mut route_expanded = zero.clone();
    let mut diagonal = zero.clone();
    let mut off_diagonal = zero.clone();
    let mut sum_w: u64 = 0;
    let mut sum_w2: u64 = 0;

    // Sliding half-open window (n - y, n]: primes q with n - d_max <= q <= n.
    let mut lo = 0usize;
    let mut hi = 0usize;
    for n in 1..=n_max {
        while hi < primes.len() && primes[hi] <= n {
            hi += 1;
        }
        let floor = n.saturating_sub(d_max);
        while lo < hi && primes[lo] < floor {
            lo += 1;
        }
        let ws = &s_vals[lo..hi];
        let w = ws.len() as u64;
        sum_w += w;
        sum_w2 += w * w;
        if ws.is_empty() {
            continue;
        }

        // Route 1: square of the window sum.
        let mut wsum = zero.clone();
        for s in ws {
            wsum = wsum.add(s)?;
        }
        route_direct = route_direct.add(&wsum.mul(&wsum)?)?;

        // Route 2: diagonal fourth powers plus twice the ordered upper
        // triangle.
        let mut diag_n = zero.clone();
        for s in ws {
            diag_n = diag_n.add(&s.mul(s)?)?;
        }
        let mut cross_n = zero.clone();
        for i in 0..ws.len() {
            for j in (i + 1)..ws.len() {
                cross_n = cross_n.add(&ws[i].mul(&ws[j])?)?;
            }
        }
        let two = zero.constant(2)?;
        let off_n = two.mul(&cross_n)?;
        route_split = route_split.add(&diag_n)?.add(&off_n)?;
        diagonal = diagonal.add(&diag_n)?;
        off_diagonal = off_diagonal.add(&off_n)?;

        // Route 3: the same sums through the λ(p^r) basis. With
        // s = λ(p)², the recursion gives λ(p²) = s − 1 and
        // λ(p⁴) = s² − 3s + 1; the expansions then read
        // λ(p)⁴ = λ(p⁴) + 3λ(p²) + 2 and, for distinct primes,
        // λ(p₁)²λ(p₂)² = λ(p₁²)λ(p₂²) + λ(p₁²) + λ(p₂²) + 1.
        let one = zero.constant(1)?;
        let three = zero.constant(3)?;
        let lam2: Vec<Scalar> = ws
            .iter()
            .map(|s| s.sub(&one))
            .collect::<Result<Vec<_>>>()?;
        for (s, l2) in ws.iter().zip(&lam2) {
            let lam4 = s.mul(s)?.sub(&three.mul(s)?)?.add(&one)?;
            let term = lam4.add(&three.mul(l2)?)?.add(&zero.constant(2)?)?;
            route_expanded = route_expanded.add(&term)?;
        }
        for i in 0..lam2.len() {
            for j in 0..lam2.len() {
                if i == j {
                    continue;
                }
                let cross = lam2[i]
                    .mul(&lam2[j])?
                    .add(&lam2[i])?
                    .add(&lam2[j])?
                    .add(&one)?;
                route_expanded = route_expanded.add(&cross)?;
            }
        }
    }

    let d12 = route_direct.abs_diff_upper(&route_split)?;
    let d13 = route_direct.abs_diff_upper(&route_expanded)?;
    let d23 = route_split.abs_diff_upper(&route_expanded)?;
    let route_max_difference = d12.max(d13).max(d23);
    if route_direct.is_exact() && route_max_difference != 0.0 {
        return Err(Error::Validation(format!(
            "evaluation routes disagree in exact arithmetic by up to \
             {route_max_difference:.3e}; the Hecke expansion bookkeeping is broken"
        )));
    }

    let total_ball = route_direct.to_ball(EMBED_PREC)?;
    let diag_ball = diagonal.to_ball(EMBED_PREC)?;
    let off_ball = off_diagonal.to_ball(EMBED_PREC)?;
    let total = total_ball.mid_f64();
    let mut error_budget = Vec::new();
    let embed_rad =
        total_ball.rad_f64() + diag_ball.rad_f64() + off_ball.rad_f64() + route_max_difference;
    if !route_direct.is_exact() || embed_rad > 0.0 {
        error_budget.push(BudgetTerm {
            label: "embedding enclosure radii".into(),
            bound: embed_rad,
        });
    }
    let route_values = vec![
        route_direct.to_ball(EMBED_PREC)?.mid_decimal(40),
        route_split.to_ball(EMBED_PREC)?.mid_decimal(40),
        route_expanded.to_ball(EMBED_PREC)?.mid_decimal(40),
    ];
    let prediction = n_max as f64 * (eta * eta + 2.0 * eta);
    Ok(SecondMomentReport {
        mode: "per-form".into(),
        k: f.weight(),
        form_index: Some(f.index()),
        n_max,
        eta,
        y,
        window_convention: WINDOW_CONVENTION.into(),
        diagonal: diag_ball.mid_f64(),
        off_diagonal: off_ball.mid_f64(),
        total,
        exact_prime_square_moment: sum_w2,
        exact_prime_first_moment: sum_w,
        prediction_conjectural: prediction,
        discrepancy_unconditional: total - (sum_w2 + sum_w) as f64,
        discrepancy_conjectural: total - prediction,
        error_budget,
        route_values: Some(route_values),
        route_max_difference: Some(route_max_difference),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{eigenforms, window_eigen_sum};

    fn delta_form(n: usize) -> Eigenform {
        eigenforms(12, n).unwrap().pop().unwrap()
    }

    #[test]
    fn tiny_window_reduces_to_the_diagonal() {
        // With eta small enough each window holds at most one prime, so
        // no cross terms exist.
        let f = delta_form(64);
        let r = per_form_second_moment(&f, 60, 0.05).unwrap();
        assert_eq!(r.off_diagonal, 0.0);
        assert_eq!(r.route_max_difference, Some(0.0));
        assert!((r.total - r.diagonal).abs() < 1e-12);
    }

    #[test]
    fn three_routes_agree_exactly_for_integer_coefficients() {
        let f = delta_form(64);
        let r = per_form_second_moment(&f, 50, 1.0).unwrap();
        assert_eq!(r.route_max_difference, Some(0.0));
        let v = r.route_values.unwrap();
        assert_eq!(v[0], v[1]);
        assert_eq!(v[1], v[2]);
    }

    #[test]
    fn three_routes_agree_exactly_in_a_quadratic_field() {
        let f = eigenforms(24, 64).unwrap().remove(0);
        let r = per_form_second_moment(&f, 50, 1.0).unwrap();
        assert_eq!(r.route_max_difference, Some(0.0));
    }

    #[test]
    fn direct_route_matches_the_windowed_eigenvalue_sums() {
        // Independent oracle: accumulate window_eigen_sum(n)² in ball
        // arithmetic and compare against the exact rational total.
        let f = delta_form(64);
        let n_max = 40u64;
        let eta = 1.0;
        let y = eta * (n_max as f64).ln();
        let mut acc = Ball::zero();
        for n in 1..=n_max {
            let w = window_eigen_sum(&f, n, y, 160).unwrap();
            acc = acc.add(&w.mul(&w, 160), 160);
        }
        let r = per_form_second_moment(&f, n_max, eta).unwrap();
        assert!(
            (acc.mid_f64() - r.total).abs() < 1e-10,
            "oracle {} vs report {}",
            acc.mid_f64(),
            r.total
        );
    }

    #[test]
    fn diagonal_part_is_the_expanded_square_identity() {
        // The diagonal must equal Σ_n Σ_p (λ(p²)² + 2λ(p²) + 1) with
        // λ(p²) read off the q-expansion, not the recursion.
        let f = delta_form(2600);
        let n_max = 50u64;
        let eta = 1.0;
        let r = per_form_second_moment(&f, n_max, eta).unwrap();
        let y = eta * (n_max as f64).ln();
        let d_max = max_offset(y).unwrap();
        let table = sieve_range(0, n_max).unwrap();
        let mut acc = Ball::zero();
        for n in 1..=n_max {
            for p in table.primes() {
                if p + d_max >= n && p <= n {
                    let l2 = f.lambda(p * p, 160).unwrap();
                    let term = l2
                        .mul(&l2, 160)
                        .add(&l2.mul_2exp(1), 160)
                        .add(&Ball::one(), 160);
                    acc = acc.add(&term, 160);
                }
            }
        }
        assert!(
            (acc.mid_f64() - r.diagonal).abs() < 1e-10,
            "expanded diagonal {} vs report {}",
            acc.mid_f64(),
            r.diagonal
        );
    }

    #[test]
    fn missing_coefficients_are_reported() {
        // Round-trip through CSV to get a form that genuinely stops at
        // n = 30 (the expansion cache may hold a longer one).
        let long = delta_form(64);
        let mut buf = Vec::new();
        crate::modforms::export_eigenvalues(&long, 30, &mut buf).unwrap();
        let f = crate::modforms::import_eigenvalues(&buf[..], 12).unwrap();
        assert_eq!(f.precision(), 30);
        let err = per_form_second_moment(&f, 50, 1.0).unwrap_err();
        assert!(err.to_string().contains("insufficient eigenvalue range"));
    }

    #[test]
    fn prime_count_moments_match_the_window_module() {
        let f = delta_form(128);
        let r = per_form_second_moment(&f, 100, 2.0).unwrap();
        let w2 = crate::primes::window_moment(100, r.y, 2).unwrap();
        let w1 = crate::primes::window_moment(100, r.y, 1).unwrap();
        assert_eq!(r.exact_prime_square_moment.to_string(), w2.to_string());
        assert_eq!(r.exact_prime_first_moment.to_string(), w1.to_string());
    }
}
