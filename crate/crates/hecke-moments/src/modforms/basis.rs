//! Dimension formulas and the integral row-reduced basis of the cusp
//! space, with an integrity-checked disk cache.

use crate::modforms::delta::delta_expansion;
use crate::modforms::eisenstein::eisenstein;
use crate::modforms::qexp::QExpansion;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Dimension of the full space of level-one modular forms of weight `k`.
pub fn dim_modular(k: u32) -> Result<usize> {
    if k % 2 != 0 || k < 4 {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and at least 4, got {k}"
        )));
    }
    let base = (k / 12) as usize;
    Ok(if k % 12 == 2 { base } else { base + 1 })
}

/// Dimension of the cusp subspace (forms with vanishing constant term).
pub fn dim_cusp(k: u32) -> Result<usize> {
    Ok(dim_modular(k)?.saturating_sub(1))
}

/// Exponents (a, b) with `4a + 6b = w` and `b` minimal in {0, 1}.
fn generator_exponents(w: u32) -> (u32, u32) {
    debug_assert!(w % 2 == 0 && w != 2);
    if w % 4 == 0 {
        (w / 4, 0)
    } else {
        ((w - 6) / 4, 1)
    }
}

/// Row-reduced integral basis `g_1..g_d` of the weight-`k` cusp space,
/// with `g_i = q^i + O(q^{d+1})`, to precision `m`.
pub fn victor_miller_basis(k: u32, m: usize) -> Result<Vec<QExpansion>> {
    let d = dim_cusp(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if m < d {
        return Err(Error::Precision(format!(
            "basis of dimension {d} needs precision at least {d}, got {m}"
        )));
    }
    let delta = delta_expansion(m)?;
    let mut forms = Vec::with_capacity(d);
    for j in 1..=d as u32 {
        // Delta^j * E4^a * E6^b has leading coefficient 1 at q^j.
        let (a, b) = generator_exponents(k - 12 * j);
        let mut f = delta.pow(j)?;
        if a > 0 {
            f = f.mul(&eisenstein(4, m)?.pow(a)?)?;
        }
        if b > 0 {
            f = f.mul(&eisenstein(6, m)?.pow(b)?)?;
        }
        forms.push(f);
    }
    // Clear entries above the diagonal: subtract multiples of later
    // basis vectors (integer row operations only).
    for i in 0..d {
        for j in i + 1..d {
            let c = forms[i].coeff(j + 1).clone();
            if !c.is_zero() {
                let scaled = forms[j].scaled(&c);
                forms[i] = forms[i].sub(&scaled)?;
            }
        }
    }
    Ok(forms)
}

const CACHE_MAGIC: &[u8; 4] = b"VMB1";

fn cache_path(dir: &Path, k: u32, m: usize) -> PathBuf {
    dir.join(format!("vmb_k{k}_m{m}.bin"))
}

fn serialize_basis(k: u32, m: usize, basis: &[QExpansion]) -> Vec<u8> {
    let mut payload = Vec::new();
    payload.extend_from_slice(&k.to_le_bytes());
    payload.extend_from_slice(&(m as u64).to_le_bytes());
    payload.extend_from_slice(&(basis.len() as u32).to_le_bytes());
    for f in basis {
        payload.extend_from_slice(&(f.coeffs().len() as u64).to_le_bytes());
        for c in f.coeffs() {
            let bytes = c.to_signed_bytes_le();
            payload.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            payload.extend_from_slice(&bytes);
        }
    }
    let digest = Sha256::digest(&payload);
    let mut out = Vec::with_capacity(4 + payload.len() + 32);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&payload);
    out.extend_from_slice(&digest);
    out
}

fn deserialize_basis(bytes: &[u8], k: u32, m: usize) -> Result<Vec<QExpansion>> {
    let fail = |why: &str| Error::Format(format!("basis cache rejected: {why}"));
    if bytes.len() < 4 + 32 || &bytes[..4] != CACHE_MAGIC {
        return Err(fail("bad magic"));
    }
    let (payload, digest) = bytes[4..].split_at(bytes.len() - 4 - 32);
    if Sha256::digest(payload).as_slice() != digest {
        return Err(fail("integrity hash mismatch"));
    }
    let mut cur = payload;
    let mut take = |n: usize| -> Result<&[u8]> {
        if cur.len() < n {
            return Err(fail("truncated"));
        }
        let (head, rest) = cur.split_at(n);
        cur = rest;
        Ok(head)
    };
    let fk = u32::from_le_bytes(take(4)?.try_into().unwrap());
    let fm = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    if fk != k || fm != m {
        return Err(fail("keyed for different parameters"));
    }
    let dim = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let mut basis = Vec::with_capacity(dim);
    for _ in 0..dim {
        let n_coeffs = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let mut coeffs = Vec::with_capacity(n_coeffs);
        for _ in 0..n_coeffs {
            let len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
            coeffs.push(BigInt::from_signed_bytes_le(take(len)?));
        }
        basis.push(QExpansion::new(k, coeffs)?);
    }
    Ok(basis)
}

/// [`victor_miller_basis`] backed by a disk cache in `dir`, keyed by
/// `(k, m)` and protected by a SHA-256 integrity hash. Unreadable or
/// corrupt cache entries are recomputed and rewritten, never trusted.
pub fn victor_miller_basis_cached(k: u32, m: usize, dir: &Path) -> Result<Vec<QExpansion>> {
    let path = cache_path(dir, k, m);
    if let Ok(mut f) = std::fs::File::open(&path) {
        let mut bytes = Vec::new();
        if f.read_to_end(&mut bytes).is_ok() {
            if let Ok(basis) = deserialize_basis(&bytes, k, m) {
                return Ok(basis);
            }
        }
    }
    let basis = victor_miller_basis(k, m)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&serialize_basis(k, m, &basis))?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn dimension_formula_known_values() {
        let cases = [
            (4, 0),
            (6, 0),
            (8, 0),
            (10, 0),
            (12, 1),
            (14, 0),
            (16, 1),
            (18, 1),
            (20, 1),
            (22, 1),
            (24, 2),
            (26, 1),
            (28, 2),
            (36, 3),
            (48, 4),
        ];
        for (k, d) in cases {
            assert_eq!(dim_cusp(k).unwrap(), d, "k = {k}");
        }
        assert!(dim_cusp(13).is_err());
        assert!(dim_cusp(2).is_err());
    }

    #[test]
    fn weight_twelve_basis_is_the_discriminant() {
        let basis = victor_miller_basis(12, 6).unwrap();
        assert_eq!(basis.len(), 1);
        let want: Vec<i64> = vec![0, 1, -24, 252, -1472, 4830, -6048];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(basis[0].coeff(n), &BigInt::from(*w), "n = {n}");
        }
    }

    #[test]
    fn weight_sixteen_basis_is_discriminant_times_weight_four_generator() {
        let basis = victor_miller_basis(16, 20).unwrap();
        assert_eq!(basis.len(), 1);
        let product = delta_expansion(20)
            .unwrap()
            .mul(&eisenstein(4, 20).unwrap())
            .unwrap();
        assert_eq!(basis[0], product);
    }

    #[test]
    fn basis_is_row_reduced() {
        for k in [24u32, 28, 36, 48] {
            let d = dim_cusp(k).unwrap();
            let basis = victor_miller_basis(k, 2 * d + 4).unwrap();
            for (i, f) in basis.iter().enumerate() {
                assert!(f.is_cuspidal());
                assert_eq!(f.weight(), k);
                for j in 0..d {
                    let want = if i == j { BigInt::one() } else { BigInt::zero() };
                    assert_eq!(f.coeff(j + 1), &want, "k = {k}, i = {i}, j = {j}");
                }
            }
        }
    }

    #[test]
    fn cache_roundtrip_and_corruption_recovery() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = victor_miller_basis_cached(24, 12, dir.path()).unwrap();
        assert_eq!(fresh, victor_miller_basis(24, 12).unwrap());
        // Second call is served from disk.
        let cached = victor_miller_basis_cached(24, 12, dir.path()).unwrap();
        assert_eq!(cached, fresh);
        // Corrupt one byte: the entry must be recomputed, not trusted.
        let path = cache_path(dir.path(), 24, 12);
        let mut bytes = std::fs::read(&path).unwrap();
        let at = bytes.len() / 2;
        bytes[at] ^= 0xff;
        std::fs::write(&path, &bytes).unwrap();
        let recovered = victor_miller_basis_cached(24, 12, dir.path()).unwrap();
        assert_eq!(recovered, fresh);
    }

    #[test]
    fn cache_of_one_key_does_not_serve_another() {
        let dir = tempfile::tempdir().unwrap();
        victor_miller_basis_cached(24, 12, dir.path()).unwrap();
        let raw = std::fs::read(cache_path(dir.path(), 24, 12)).unwrap();
        assert!(deserialize_basis(&raw, 24, 13).is_err());
        assert!(deserialize_basis(&raw, 26, 12).is_err());
    }
}
