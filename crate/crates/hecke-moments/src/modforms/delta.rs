//! The discriminant cusp form of weight 12 and its coefficient function
//! (the tau function), computed to large precision via sparse
//! eta-product identities and repeated exact squaring.

use crate::modforms::ntt;
use crate::modforms::qexp::QExpansion;
use crate::Result;
use num_bigint::BigInt;
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficients of `prod_n (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}`
/// as sparse (exponent, value) pairs up to `q^m`.
fn cube_sparse(m: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    let mut k = 0u64;
    loop {
        let e = (k * (k + 1) / 2) as usize;
        if e > m {
            break;
        }
        let v = (2 * k + 1) as i64;
        terms.push((e, if k % 2 == 0 { v } else { -v }));
        k += 1;
    }
    terms
}

/// Dense coefficients of `prod (1 - q^n)^6` up to `q^m`, from squaring
/// the sparse cube. Entries stay far below i64 range.
fn sixth_power(m: usize) -> Vec<i64> {
    let cube = cube_sparse(m);
    let mut out = vec![0i64; m + 1];
    for (i, &(e1, v1)) in cube.iter().enumerate() {
        // Diagonal term once, off-diagonal pairs twice.
        if 2 * e1 <= m {
            out[2 * e1] += v1 * v1;
        }
        for &(e2, v2) in &cube[i + 1..] {
            if e1 + e2 > m {
                break;
            }
            out[e1 + e2] += 2 * v1 * v2;
        }
    }
    out
}

fn delta_uncached(m: usize) -> Result<QExpansion> {
    if m == 0 {
        return QExpansion::new(12, vec![BigInt::from(0)]);
    }
    // tau(n) is the q^{n-1} coefficient of prod (1-q^n)^24.
    let inner = m - 1;
    let six: Vec<BigInt> = sixth_power(inner).into_iter().map(BigInt::from).collect();
    let twelfth = ntt::convolve_exact(&six, &six, inner + 1)?;
    let full = ntt::convolve_exact(&twelfth, &twelfth, inner + 1)?;
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(BigInt::from(0));
    coeffs.extend(full);
    QExpansion::new(12, coeffs)
}

/// The discriminant form `q prod (1 - q^n)^24` to precision `m`, cached
/// in-process (the expansion to 10^6 takes seconds and is shared by
/// every caller through the `Arc`).
pub fn delta_expansion(m: usize) -> Result<Arc<QExpansion>> {
    static CACHE: OnceLock<Mutex<Option<Arc<QExpansion>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cache.lock().unwrap();
    if let Some(d) = guard.as_ref() {
        if d.precision() >= m {
            return Ok(d.clone());
        }
    }
    let fresh = Arc::new(delta_uncached(m)?);
    *guard = Some(fresh.clone());
    Ok(fresh)
}

/// The tau value at `n` (requires only `n` itself as precision).
pub fn tau(n: usize) -> Result<BigInt> {
    Ok(delta_expansion(n)?.coeff(n).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eisenstein::eisenstein;
    use num_traits::Zero;

    #[test]
    fn sparse_cube_matches_direct_product() {
        // Direct expansion of prod_{n<=m} (1-q^n)^3.
        let m = 120;
        let mut direct = vec![BigInt::zero(); m + 1];
        direct[0] = BigInt::from(1);
        for n in 1..=m {
            for _ in 0..3 {
                for i in (n..=m).rev() {
                    let lower = direct[i - n].clone();
                    direct[i] -= lower;
                }
            }
        }
        let mut sparse = vec![BigInt::zero(); m + 1];
        for (e, v) in cube_sparse(m) {
            sparse[e] = BigInt::from(v);
        }
        assert_eq!(sparse, direct);
    }

    #[test]
    fn leading_tau_values() {
        let d = delta_expansion(10).unwrap();
        let want: Vec<i64> = vec![0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(d.coeff(n), &BigInt::from(*w), "n = {n}");
        }
    }

    #[test]
    fn matches_eisenstein_construction() {
        // Independent route: 1728 * Delta = E_4^3 - E_6^2.
        let m = 300;
        let e4 = eisenstein(4, m).unwrap();
        let e6 = eisenstein(6, m).unwrap();
        let num = e4.pow(3).unwrap().sub(&e6.pow(2).unwrap()).unwrap();
        let d = delta_expansion(m).unwrap();
        for n in 0..=m {
            assert_eq!(&(d.coeff(n) * 1728), num.coeff(n), "n = {n}");
        }
    }

    #[test]
    fn tau_is_multiplicative_at_coprime_arguments() {
        let d = delta_expansion(120).unwrap();
        for (a, b) in [(2usize, 3usize), (3, 4), (4, 5), (5, 6), (8, 9), (7, 11)] {
            assert_eq!(
                d.coeff(a) * d.coeff(b),
                d.coeff(a * b).clone(),
                "a = {a}, b = {b}"
            );
        }
    }

    #[test]
    fn hecke_recursion_at_prime_powers() {
        // tau(p) tau(p^r) = tau(p^{r+1}) + p^11 tau(p^{r-1}).
        let d = delta_expansion(250).unwrap();
        for p in [2usize, 3, 5] {
            let p11 = BigInt::from(p as u64).pow(11);
            let mut r = 1;
            while p.pow(r as u32 + 1) <= 250 {
                let lhs = d.coeff(p) * d.coeff(p.pow(r as u32));
                let rhs = d.coeff(p.pow(r as u32 + 1)) + &p11 * d.coeff(p.pow(r as u32 - 1));
                assert_eq!(lhs, rhs, "p = {p}, r = {r}");
                r += 1;
            }
        }
    }

    #[test]
    fn cache_extends_monotonically() {
        let small = delta_expansion(20).unwrap();
        let large = delta_expansion(40).unwrap();
        assert!(large.precision() >= 40);
        for n in 0..=20 {
            assert_eq!(small.coeff(n), large.coeff(n));
        }
    }
}
