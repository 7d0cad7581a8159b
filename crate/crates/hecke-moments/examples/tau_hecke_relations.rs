//! Compute the Ramanujan tau function by exact integer convolution and
//! check the Hecke recursion tau(p^2) = tau(p)^2 - p^11 together with
//! multiplicativity on a sample of indices.
//!
//! Usage: cargo run --release --example tau_hecke_relations [M]
//! where M is the number of coefficients (default 100000).

use hecke_moments::modforms::{delta_expansion, tau};
use num_bigint::BigInt;
use std::time::Instant;

fn main() -> hecke_moments::Result<()> {
    let m: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("M must be a positive integer"))
        .unwrap_or(100_000);

    let start = Instant::now();
    let delta = delta_expansion(m)?;
    println!(
        "computed {} tau values in {:.2}s",
        m,
        start.elapsed().as_secs_f64()
    );

    for n in [1usize, 2, 3, 10, 100, 1000.min(m)] {
        println!("tau({n}) = {}", delta.coeff(n));
    }

    let start = Instant::now();
    let mut checked = 0usize;
    // Hecke recursion at primes p with p^2 <= M.
    let mut p = 2usize;
    while p * p <= m {
        if is_prime(p) {
            let tp = delta.coeff(p);
            let want = tp * tp - BigInt::from(p).pow(11);
            assert_eq!(delta.coeff(p * p), &want, "recursion fails at p = {p}");
            checked += 1;
        }
        p += 1;
    }
    // Multiplicativity on coprime pairs.
    for a in 2..200usize.min(m) {
        for b in (a + 1)..=(m / a) {
            if gcd(a, b) == 1 && b < 200 {
                assert_eq!(
                    delta.coeff(a) * delta.coeff(b),
                    delta.coeff(a * b).clone(),
                    "multiplicativity fails at ({a}, {b})"
                );
                checked += 1;
            }
        }
    }
    println!(
        "verified {} Hecke relations in {:.2}s: all exact",
        checked,
        start.elapsed().as_secs_f64()
    );

    // Spot value available through the convenience accessor too.
    assert_eq!(tau(6)?, BigInt::from(-6048));
    Ok(())
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}
