//! Segmented sieve of Eratosthenes with a mod-30 wheel.
//!
//! The sieve works on fixed-size segments so that arbitrary ranges
//! `[lo, hi]` can be processed with memory proportional to the segment
//! size plus the output bitset, never to `hi` itself.

use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

/// Integers per sieve segment.
const SEGMENT_SPAN: u64 = 1 << 20;

/// Residues mod 30 coprime to 30; candidate positions for primes > 5.
const WHEEL: [u8; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

/// Magic bytes identifying the on-disk bitset cache format.
const CACHE_MAGIC: &[u8; 4] = b"HWL1";

/// Primality indicator for every integer in an inclusive range `[lo, hi]`.
///
/// Bit `m - lo` of `bits` is set iff `m` is prime. The table supports
/// membership queries, iteration, and a compact binary cache format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    bits: Vec<u64>,
}

impl PrimeTable {
    /// Lower endpoint (inclusive).
    pub fn lo(&self) -> u64 {
        self.lo
    }

    /// Upper endpoint (inclusive).
    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Is `m` prime? Panics if `m` is outside `[lo, hi]`.
    pub fn is_prime(&self, m: u64) -> bool {
        assert!(
            m >= self.lo && m <= self.hi,
            "query {m} outside table range [{}, {}]",
            self.lo,
            self.hi
        );
        let idx = (m - self.lo) as usize;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Iterator over the primes in the table, in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let base = self.lo + 64 * w as u64;
            BitIter(word).map(move |b| base + b as u64)
        })
    }

    /// Number of primes in the table.
    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Raw bitset words (bit `m - lo` set iff `m` prime).
    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Glue two adjacent tables (`other.lo == self.hi + 1`) into one.
    pub fn concat(&self, other: &PrimeTable) -> Result<PrimeTable> {
        if other.lo != self.hi + 1 {
            return Err(Error::InvalidArgument(format!(
                "tables not adjacent: [{}, {}] then [{}, {}]",
                self.lo, self.hi, other.lo, other.hi
            )));
        }
        let mut out = PrimeTable {
            lo: self.lo,
            hi: other.hi,
            bits: vec![0; (other.hi - self.lo) as usize / 64 + 1],
        };
        for (i, &w) in self.bits.iter().enumerate() {
            out.bits[i] = w;
        }
        let shift = (self.hi + 1 - self.lo) as usize;
        for (i, &w) in other.bits.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let (q, r) = (shift / 64 + i, shift % 64);
            out.bits[q] |= w << r;
            if r != 0 && q + 1 < out.bits.len() {
                out.bits[q + 1] |= w >> (64 - r);
            }
        }
        Ok(out)
    }

    /// Serialize to the binary cache format: magic `HWL1`, then `lo` and
    /// `hi` as 8-byte little-endian words, then the raw bitset.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        for word in &self.bits {
            w.write_all(&word.to_le_bytes())?;
        }
        Ok(())
    }

    /// Deserialize from the binary cache format.
    pub fn read_cache<R: Read>(mut r: R) -> Result<PrimeTable> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format(format!(
                "bad cache magic {magic:?}, expected {CACHE_MAGIC:?}"
            )));
        }
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        let lo = u64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        let hi = u64::from_le_bytes(buf);
        if hi < lo {
            return Err(Error::Format(format!("cache has hi {hi} < lo {lo}")));
        }
        let words = (hi - lo) as usize / 64 + 1;
        let mut bits = vec![0u64; words];
        for word in bits.iter_mut() {
            r.read_exact(&mut buf)?;
            *word = u64::from_le_bytes(buf);
        }
        Ok(PrimeTable { lo, hi, bits })
    }

    /// Convenience wrapper writing the cache to a file path.
    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_cache(std::io::BufWriter::new(f))
    }

    /// Convenience wrapper reading the cache from a file path.
    pub fn load(path: &Path) -> Result<PrimeTable> {
        let f = std::fs::File::open(path)?;
        Self::read_cache(std::io::BufReader::new(f))
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros();
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

/// Sieve the inclusive range `[lo, hi]`.
///
/// Memory use is one bit per integer in the range plus one segment of
/// scratch; `hi` up to about 10^10 is practical.
pub fn sieve_range(lo: u64, hi: u64) -> Result<PrimeTable> {
    if lo > hi {
        return Err(Error::InvalidArgument(format!(
            "empty range: lo {lo} > hi {hi}"
        )));
    }
    let mut table = PrimeTable {
        lo,
        hi,
        bits: vec![0; (hi - lo) as usize / 64 + 1],
    };
    let base = base_primes(isqrt(hi));
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = seg_lo.saturating_add(SEGMENT_SPAN - 1).min(hi);
        sieve_segment(seg_lo, seg_hi, &base, &mut table);
        if seg_hi == u64::MAX {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    Ok(table)
}

/// Mark the primes of `[seg_lo, seg_hi]` in `table`.
fn sieve_segment(seg_lo: u64, seg_hi: u64, base: &[u64], table: &mut PrimeTable) {
    let span = (seg_hi - seg_lo) as usize + 1;
    // Candidate mask from the wheel: positions coprime to 30, plus the
    // wheel primes themselves when they fall inside the segment.
    let mut cand = vec![false; span];
    let start_res = (seg_lo % 30) as u8;
    for &r in &WHEEL {
        let mut m = if r >= start_res {
            seg_lo - start_res as u64 + r as u64
        } else {
            seg_lo - start_res as u64 + r as u64 + 30
        };
        while m <= seg_hi {
            cand[(m - seg_lo) as usize] = true;
            if m > seg_hi - 30.min(seg_hi) {
                break;
            }
            m += 30;
        }
    }
    for p in [2u64, 3, 5] {
        if p >= seg_lo && p <= seg_hi {
            cand[(p - seg_lo) as usize] = true;
        }
    }
    if seg_lo <= 1 {
        for m in seg_lo..=1.min(seg_hi) {
            cand[(m - seg_lo) as usize] = false;
        }
    }
    // Cross off multiples of the base primes (wheel already removed
    // multiples of 2, 3, 5).
    for &p in base {
        if p < 7 {
            continue;
        }
        if p.saturating_mul(p) > seg_hi {
            break;
        }
        let mut m = (p * p).max(seg_lo.div_ceil(p) * p);
        // Step over even multiples: advance to an odd multiple first.
        if (m / p) % 2 == 0 {
            m += p;
        }
        while m <= seg_hi {
            cand[(m - seg_lo) as usize] = false;
            m += 2 * p;
        }
    }
    for (i, &c) in cand.iter().enumerate() {
        if c {
            let idx = (seg_lo - table.lo) as usize + i;
            table.bits[idx / 64] |= 1 << (idx % 64);
        }
    }
}

/// Simple sieve of all primes up to `n` inclusive (used for base primes).
pub fn base_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial-division oracle, independent of the sieve.
    fn is_prime_slow(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn singleton_range_containing_two() {
        let t = sieve_range(2, 2).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn twenty_five_primes_below_hundred() {
        let t = sieve_range(1, 100).unwrap();
        assert_eq!(t.count(), 25);
        assert!(t.is_prime(97));
        assert!(!t.is_prime(1));
        assert!(!t.is_prime(91));
    }

    #[test]
    fn primes_just_past_a_million() {
        let t = sieve_range(1_000_000, 1_000_100).unwrap();
        assert_eq!(
            t.primes().collect::<Vec<_>>(),
            vec![1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099]
        );
    }

    #[test]
    fn matches_trial_division_on_scattered_ranges() {
        for (lo, hi) in [(0, 2_000), (999_000, 1_001_000), (123_456, 125_000)] {
            let t = sieve_range(lo, hi).unwrap();
            for m in lo..=hi {
                assert_eq!(t.is_prime(m), is_prime_slow(m), "mismatch at {m}");
            }
        }
    }

    #[test]
    fn agrees_with_simple_sieve_to_a_million() {
        let t = sieve_range(0, 1_000_000).unwrap();
        let simple = base_primes(1_000_000);
        assert_eq!(t.count(), simple.len() as u64);
        assert_eq!(t.count(), 78_498);
        assert!(t.primes().eq(simple.iter().copied()));
    }

    #[test]
    fn concatenation_matches_single_sieve() {
        let a = sieve_range(100, 4_095).unwrap();
        let b = sieve_range(4_096, 9_999).unwrap();
        let glued = a.concat(&b).unwrap();
        let whole = sieve_range(100, 9_999).unwrap();
        assert_eq!(glued, whole);
        assert!(a.concat(&a).is_err());
    }

    #[test]
    fn cache_roundtrip_preserves_table() {
        let t = sieve_range(500, 50_000).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HWL1");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 500);
        let back = PrimeTable::read_cache(&buf[..]).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn cache_rejects_wrong_magic() {
        let t = sieve_range(1, 64).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        buf[0] = b'X';
        assert!(PrimeTable::read_cache(&buf[..]).is_err());
    }

    #[test]
    fn isqrt_exact_on_edges() {
        for n in 0..2_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), (1 << 32) - 1);
    }
}
