//! Hecke operators on the cusp space, as exact integer matrices in the
//! row-reduced basis.

use crate::modforms::basis::{dim_cusp, victor_miller_basis};
use crate::modforms::qexp::QExpansion;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;

/// Coefficient of `q^n` in `T_m f` for a weight-`k` form `f`:
/// the divisor sum of `d^{k-1} a_f(m n / d^2)` over `d | gcd(m, n)`.
pub fn hecke_coefficient(f: &QExpansion, m: u64, n: u64) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::InvalidArgument("operator index must be positive".into()));
    }
    let k = f.weight();
    let needed = (m * n) as usize;
    if f.precision() < needed {
        return Err(Error::Precision(format!(
            "coefficient {n} of the image under T_{m} reads input coefficient {needed}, \
             but only {} are available",
            f.precision()
        )));
    }
    let g = gcd(m, n);
    let mut total = BigInt::zero();
    for d in 1..=g {
        if g % d == 0 {
            let term = BigInt::from(d).pow(k - 1) * f.coeff((m * n / (d * d)) as usize);
            total += term;
        }
    }
    Ok(total)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Matrix of `T_m` in an already-built row-reduced basis.
pub(crate) fn matrix_in_basis(basis: &[QExpansion], m: u64) -> Result<Vec<Vec<BigInt>>> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let precision = basis[0].precision();
    let needed = (m as usize) * (d + 1);
    if precision < needed {
        return Err(Error::Precision(format!(
            "T_{m} on a {d}-dimensional space needs precision at least {needed}, got {precision}"
        )));
    }
    // Coordinates of a cusp form h in this basis are its coefficients
    // h[1..=d], because g_i = q^i + O(q^{d+1}).
    let mut matrix = vec![vec![BigInt::zero(); d]; d];
    for (j, g) in basis.iter().enumerate() {
        for (i, row) in matrix.iter_mut().enumerate() {
            row[j] = hecke_coefficient(g, m, (i + 1) as u64)?;
        }
    }
    Ok(matrix)
}

/// Matrix of `T_m` on the weight-`k` cusp space in the row-reduced basis
/// (entry `[i][j]` is the `g_{i+1}`-coordinate of `T_m g_{j+1}`).
///
/// Requires basis precision of at least `m * (dim + 1)` so every divisor
/// sum is fully determined; anything less is a hard error rather than a
/// silently truncated matrix.
pub fn hecke_operator_matrix(k: u32, m: u64, precision: usize) -> Result<Vec<Vec<BigInt>>> {
    let d = dim_cusp(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let needed = (m as usize) * (d + 1);
    if precision < needed {
        return Err(Error::Precision(format!(
            "T_{m} on a {d}-dimensional space needs precision at least {needed}, got {precision}"
        )));
    }
    let basis = victor_miller_basis(k, precision)?;
    matrix_in_basis(&basis, m)
}

/// Trace of `T_m` on the weight-`k` cusp space.
pub fn hecke_trace(k: u32, m: u64) -> Result<BigInt> {
    let d = dim_cusp(k)?;
    let matrix = hecke_operator_matrix(k, m, (m as usize) * (d + 1))?;
    Ok(matrix.iter().enumerate().map(|(i, row)| row[i].clone()).sum())
}

#[cfg(test)]
pub(crate) fn matrix_product(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for (l, b_row) in b.iter().enumerate() {
                out[i][j] += &a[i][l] * &b_row[j];
            }
        }
    }
    out
}
