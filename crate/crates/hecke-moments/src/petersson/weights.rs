//! Harmonic weights: inverting the trace identity at small dimension.
//!
//! For each eigenform f of weight k the quantity
//! w_f = Γ(k−1)/((4π)^{k−1}·‖f‖²) appears as the harmonic weight in every
//! averaged eigenvalue sum. The geometric side gives us the averages
//! Σ_f w_f·λ_f(m)λ_f(n) = H[m,n] directly; when the space has dimension
//! d ≤ 6 and the eigenvalues are known exactly, d independent (m,n) pairs
//! suffice to solve for the weights themselves. Held-out pairs then verify
//! the solution end-to-end: the residual reported here is a certified bound
//! on the worst held-out inconsistency, including evaluation tails.

use num_bigint::BigInt;
use serde::Serialize;

use crate::ball::Ball;
use crate::modforms::Eigenform;
use crate::petersson::geometric::geometric_side_batch;
use crate::{Error, Result};

/// Solved harmonic weights for one space of eigenforms.
#[derive(Debug, Clone)]
pub struct HarmonicWeights {
    pub k: u32,
    /// One certified enclosure of w_f per eigenform, in eigenform order.
    pub weights: Vec<Ball>,
    /// Certified bound on max over held-out pairs of
    /// |Σ_f w_f·λ_f(m)λ_f(n) − H[m,n]|.
    pub residual: f64,
    pub digits: u32,
}

impl HarmonicWeights {
    pub fn report(&self) -> HarmonicWeightsReport {
        HarmonicWeightsReport {
            k: self.k,
            weights: self.weights.iter().map(Ball::mid_f64).collect(),
            weights_decimal: self
                .weights
                .iter()
                .map(|w| w.mid_decimal(self.digits.max(17) as usize))
                .collect(),
            residual: self.residual,
            digits: self.digits,
        }
    }
}

/// Serializable form of solved harmonic weights.
#[derive(Debug, Clone, Serialize)]
pub struct HarmonicWeightsReport {
    pub k: u32,
    pub weights: Vec<f64>,
    pub weights_decimal: Vec<String>,
    pub residual: f64,
    pub digits: u32,
}

/// Solve Σ_f w_f·λ_f(m)λ_f(n) = H[m,n] for the harmonic weights using the
/// first dim(pairs) equations, then validate on the remaining (≥ 3)
/// held-out pairs. All arithmetic is certified; an uncertainly invertible
/// system or a weight that cannot be certified positive is an error, not a
/// warning.
pub fn extract_weights(
    k: u32,
    forms: &[Eigenform],
    pairs: &[(u64, u64)],
    digits: u32,
    tolerance: f64,
) -> Result<HarmonicWeights> {
    let dim = forms.len();
    if dim == 0 || dim > 6 {
        return Err(Error::Validation(format!(
            "weight extraction handles 1–6 eigenforms, got {dim}"
        )));
    }
    if pairs.len() < dim + 3 {
        return Err(Error::Validation(format!(
            "need at least {} (m,n) pairs — {dim} to solve plus 3 held out — got {}",
            dim + 3,
            pairs.len()
        )));
    }
    for f in forms {
        if f.weight() != k {
            return Err(Error::InvalidArgument(format!(
                "eigenform of weight {} in a weight-{k} extraction",
                f.weight()
            )));
        }
    }
    let prec = (digits as f64 * 3.3220) as u32 + 64;
    let h = geometric_side_batch(pairs, k, digits, tolerance)?;

    // λ_f(m)·λ_f(n) for every pair and form.
    let mut lam = vec![vec![Ball::zero(); dim]; pairs.len()];
    for (i, &(m, n)) in pairs.iter().enumerate() {
        for (j, f) in forms.iter().enumerate() {
            lam[i][j] = f.lambda(m, prec)?.mul(&f.lambda(n, prec)?, prec);
        }
    }

    // Solve the leading dim×dim system by Gauss–Jordan with certified
    // pivoting: a pivot whose enclosure touches zero means the chosen pairs
    // do not certifiably determine the weights.
    let mut a: Vec<Vec<Ball>> = (0..dim).map(|i| lam[i].clone()).collect();
    let mut b: Vec<Ball> = (0..dim).map(|i| h[i].value.clone()).collect();
    for col in 0..dim {
        let mut best = col;
        for r in col + 1..dim {
            if a[r][col].abs_lower().ge(&a[best][col].abs_lower()) {
                best = r;
            }
        }
        a.swap(col, best);
        b.swap(col, best);
        if a[col][col].abs_lower().is_zero() {
            return Err(Error::Validation(format!(
                "ill-conditioned extraction at weight {k}: pivot {col} not certifiably \
                 nonzero; choose different (m,n) pairs"
            )));
        }
        let inv = a[col][col].recip(prec)?;
        for j in col..dim {
            a[col][j] = a[col][j].mul(&inv, prec);
        }
        b[col] = b[col].mul(&inv, prec);
        for r in 0..dim {
            if r == col || a[r][col].is_exact() && a[r][col].mid_f64() == 0.0 {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..dim {
                let delta = factor.mul(&a[col][j], prec);
                a[r][j] = a[r][j].sub(&delta, prec);
            }
            let delta = factor.mul(&b[col], prec);
            b[r] = b[r].sub(&delta, prec);
        }
    }
    let weights = b;

    for (j, w) in weights.iter().enumerate() {
        if w.contains_zero() || w.mid_f64() <= 0.0 {
            return Err(Error::Validation(format!(
                "extracted weight {j} at weight {k} is not certifiably positive \
                 (got {} ± {:.3e}); choose different pairs or raise precision",
                w.mid_f64(),
                w.rad_f64()
            )));
        }
    }

    // Held-out validation: certified residual including evaluation tails.
    let mut residual = 0.0f64;
    for i in dim..pairs.len() {
        let mut pred = Ball::zero();
        for j in 0..dim {
            pred = pred.add(&weights[j].mul(&lam[i][j], prec), prec);
        }
        let dev = pred.sub(&h[i].value, prec).abs_upper().to_f64() + h[i].tail_bound;
        residual = residual.max(dev);
    }

    Ok(HarmonicWeights { k, weights, residual, digits })
}

/// The weight-normalized eigenvalue Λ_f(p) = (k/12)^{1/4}·w_f^{1/2}·λ_f(p),
/// using the solved harmonic weight of f.
pub fn scaled_lambda(
    f: &Eigenform,
    weights: &HarmonicWeights,
    p: u64,
    prec: u32,
) -> Result<Ball> {
    if f.weight() != weights.k {
        return Err(Error::InvalidArgument(format!(
            "form of weight {} with weights for weight {}",
            f.weight(),
            weights.k
        )));
    }
    let w = weights.weights.get(f.index()).ok_or_else(|| {
        Error::Validation(format!("no harmonic weight available for form index {}", f.index()))
    })?;
    let ratio = Ball::from_ratio(&BigInt::from(weights.k), &BigInt::from(12u32), prec)?;
    let quartic = ratio.sqrt(prec)?.sqrt(prec)?;
    Ok(quartic.mul(&w.sqrt(prec)?, prec).mul(&f.lambda(p, prec)?, prec))
}
