//! Number-theoretic transforms and CRT reconstruction for exact integer
//! convolution of q-expansion coefficient arrays.
//!
//! Products of big-integer polynomials are computed by reducing modulo
//! several 31/32-bit primes `p` with high 2-adic order of `p - 1`,
//! convolving with an in-place iterative NTT, and recombining by the
//! Chinese remainder theorem. The number of primes is chosen from a
//! rigorous coefficient bound, never guessed.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Primes `p` with `2^21 | p - 1`, supporting transforms up to length
/// 2^21 (and beyond for most). Products of any subset are coprime.
pub const NTT_PRIMES: [u64; 9] = [
    998_244_353,   // 119 * 2^23 + 1
    754_974_721,   // 45 * 2^24 + 1
    167_772_161,   // 5 * 2^25 + 1
    469_762_049,   // 7 * 2^26 + 1
    1_224_736_769, // 73 * 2^24 + 1
    2_013_265_921, // 15 * 2^27 + 1
    2_281_701_377, // 17 * 2^27 + 1
    3_221_225_473, // 3 * 2^30 + 1
    3_489_660_929, // 13 * 2^28 + 1
];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Distinct prime factors by trial division (the cofactors `(p-1)/2^s`
/// of the transform primes are tiny, so this is instant).
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut fs = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            fs.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        fs.push(n);
    }
    fs
}

/// Smallest primitive root mod `p`, found by checking the order
/// criterion against every prime factor of `p - 1`.
fn generator(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    'outer: for g in 2.. {
        for &q in &factors {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!()
}

/// In-place radix-2 NTT of power-of-two length over GF(p).
fn ntt(a: &mut [u64], p: u64, invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!((p - 1) % n as u64, 0, "length does not divide p - 1");
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let g = generator(p);
    let mut len = 2;
    while len <= n {
        let mut w_len = pow_mod(g, (p - 1) / len as u64, p);
        if invert {
            w_len = inv_mod(w_len, p);
        }
        for start in (0..n).step_by(len) {
            let mut w = 1u64;
            for i in start..start + len / 2 {
                let u = a[i];
                let v = mul_mod(a[i + len / 2], w, p);
                a[i] = if u + v >= p { u + v - p } else { u + v };
                a[i + len / 2] = if u >= v { u - v } else { u + p - v };
                w = mul_mod(w, w_len, p);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = inv_mod(n as u64, p);
        for x in a.iter_mut() {
            *x = mul_mod(*x, n_inv, p);
        }
    }
}

/// Linear convolution mod `p`, truncated to `out_len` coefficients.
fn convolve_mod(a: &[u64], b: &[u64], p: u64, out_len: usize) -> Vec<u64> {
    let full = a.len() + b.len() - 1;
    let n = full.next_power_of_two();
    let mut fa = vec![0u64; n];
    let mut fb = vec![0u64; n];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    ntt(&mut fa, p, false);
    ntt(&mut fb, p, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mul_mod(*x, *y, p);
    }
    ntt(&mut fa, p, true);
    fa.truncate(out_len.min(full));
    fa
}

fn residue(v: &BigInt, p: u64) -> u64 {
    let m = v % BigInt::from(p);
    let m = if m.is_negative() { m + BigInt::from(p) } else { m };
    m.to_u64().unwrap()
}

/// Exact truncated product of two integer coefficient arrays:
/// `out[i] = sum_{a+b=i} lhs[a] rhs[b]` for `i < out_len`.
///
/// The modulus set is chosen so that the CRT modulus exceeds twice a
/// rigorous bound on the largest output coefficient; running out of
/// precomputed primes is a hard error rather than silent wraparound.
pub fn convolve_exact(lhs: &[BigInt], rhs: &[BigInt], out_len: usize) -> Result<Vec<BigInt>> {
    if lhs.is_empty() || rhs.is_empty() || out_len == 0 {
        return Ok(vec![BigInt::zero(); out_len]);
    }
    let lhs = &lhs[..lhs.len().min(out_len)];
    let rhs = &rhs[..rhs.len().min(out_len)];
    // |out[i]| <= min(sum|lhs| * max|rhs|, max|lhs| * sum|rhs|).
    let sum_abs = |v: &[BigInt]| -> BigInt { v.iter().map(|x| x.abs()).sum() };
    let max_abs = |v: &[BigInt]| -> BigInt {
        v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    };
    let bound = (sum_abs(lhs) * max_abs(rhs)).min(max_abs(lhs) * sum_abs(rhs));
    let needed = &bound * 2 + 1;

    let mut modulus = BigInt::from(1);
    let mut primes = Vec::new();
    for &p in NTT_PRIMES.iter() {
        if modulus >= needed {
            break;
        }
        primes.push(p);
        modulus *= BigInt::from(p);
    }
    if modulus < needed {
        return Err(Error::Precision(format!(
            "coefficient bound {bound} exceeds CRT capacity of {} primes",
            NTT_PRIMES.len()
        )));
    }

    let full = lhs.len() + rhs.len() - 1;
    let out_len = out_len.min(full);
    let mut residues = Vec::with_capacity(primes.len());
    for &p in &primes {
        let la: Vec<u64> = lhs.iter().map(|v| residue(v, p)).collect();
        let lb: Vec<u64> = rhs.iter().map(|v| residue(v, p)).collect();
        residues.push(convolve_mod(&la, &lb, p, out_len));
    }

    // Garner mixed-radix reconstruction, centered to signed values.
    let half = (&modulus - 1) / 2;
    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let mut x = BigInt::zero();
        let mut base = BigInt::from(1);
        for (idx, &p) in primes.iter().enumerate() {
            // t = (r_idx - x) / base mod p
            let r = residues[idx][i];
            let x_mod = residue(&x, p);
            let base_mod = residue(&base, p);
            let diff = (r + p - x_mod) % p;
            let t = mul_mod(diff, inv_mod(base_mod, p), p);
            x += &base * BigInt::from(t);
            base *= BigInt::from(p);
        }
        if x > half {
            x -= &modulus;
        }
        out.push(x);
    }
    Ok(out)
}

/// Schoolbook truncated product, used for short operands and as an
/// independent oracle in tests.
pub fn convolve_schoolbook(lhs: &[BigInt], rhs: &[BigInt], out_len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); out_len];
    for (i, a) in lhs.iter().enumerate() {
        if i >= out_len || a.is_zero() {
            continue;
        }
        for (j, b) in rhs.iter().enumerate() {
            if i + j >= out_len {
                break;
            }
            if !b.is_zero() {
                out[i + j] += a * b;
            }
        }
    }
    out
}
