//! Exact q-expansions of modular forms with big-integer coefficients.

use crate::modforms::ntt;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;

/// Truncated q-expansion `sum_{n=0}^{M} b_n q^n` of a weight-`k` form,
/// with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    /// Build from coefficients `b_0..b_M`; `weight` must be even and at
    /// least 4 (0 is allowed for the constant form 1 used internally).
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "modular forms here have even weight, got {weight}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "q-expansion needs at least the constant coefficient".into(),
            ));
        }
        Ok(QExpansion { weight, coeffs })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Precision `M`: coefficients are known for `q^0..q^M`.
    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^n`. Panics beyond the precision.
    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Is this a cusp form (vanishing constant term)?
    pub fn is_cuspidal(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// Drop coefficients beyond `q^m`.
    pub fn truncated(&self, m: usize) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs[..=m.min(self.precision())].to_vec(),
        }
    }

    /// Sum of two forms of equal weight; precision is the minimum.
    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.combine(other, |a, b| a + b)
    }

    /// Difference of two forms of equal weight.
    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(
        &self,
        other: &QExpansion,
        op: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<QExpansion> {
        if self.weight != other.weight {
            return Err(Error::InvalidArgument(format!(
                "weight mismatch: {} vs {}",
                self.weight, other.weight
            )));
        }
        let m = self.precision().min(other.precision());
        let coeffs = (0..=m)
            .map(|n| op(&self.coeffs[n], &other.coeffs[n]))
            .collect();
        Ok(QExpansion {
            weight: self.weight,
            coeffs,
        })
    }

    /// Multiply by an integer scalar.
    pub fn scaled(&self, c: &BigInt) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|b| b * c).collect(),
        }
    }

    /// Exact product; the weight adds and the precision is the minimum
    /// of the operands'. Long products go through the CRT/NTT engine.
    pub fn mul(&self, other: &QExpansion) -> Result<QExpansion> {
        let m = self.precision().min(other.precision());
        let out_len = m + 1;
        let coeffs = if self.coeffs.len().min(out_len) * other.coeffs.len().min(out_len) <= 1 << 14
        {
            ntt::convolve_schoolbook(&self.coeffs, &other.coeffs, out_len)
        } else {
            ntt::convolve_exact(&self.coeffs, &other.coeffs, out_len)?
        };
        Ok(QExpansion {
            weight: self.weight + other.weight,
            coeffs,
        })
    }

    /// Exact power by repeated squaring.
    pub fn pow(&self, e: u32) -> Result<QExpansion> {
        let mut acc = QExpansion {
            weight: 0,
            coeffs: {
                let mut c = vec![BigInt::zero(); self.precision() + 1];
                c[0] = BigInt::from(1);
                c
            },
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiply by `q` (shift coefficients up), used to build cusp forms.
    pub fn shifted_up(&self, weight_delta: u32) -> QExpansion {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend_from_slice(&self.coeffs);
        QExpansion {
            weight: self.weight + weight_delta,
            coeffs,
        }
    }
}
