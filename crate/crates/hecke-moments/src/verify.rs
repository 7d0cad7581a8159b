//! The acceptance suite: ten end-to-end checks, each with a stated
//! wall-clock budget, shared by the `verify` subcommand and the
//! integration tests.
//!
//! Every check either validates an exact identity bit for bit or compares
//! two independently computed quantities inside a certified error bound;
//! none of them tunes a tolerance to the implementation. A check fails
//! when its inequality breaks *or* when it overruns its time budget.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;

use crate::experiments::{
    gallagher_report, harmonic_second_moment, per_form_second_moment, second_moment_comparison,
};
use crate::gallagher::{gallagher_moment, poisson_moment_with_tail, singular_series, TupleVector};
use crate::modforms::{delta_expansion, eigenforms, power_decomposition};
use crate::petersson::{extract_weights, geometric_side_batch};
use crate::primes::{base_primes, moment_identity_check};
use crate::{Error, Result};

/// One acceptance check's result.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    /// Stated wall-clock budget, part of the acceptance contract.
    pub limit_seconds: f64,
    pub passed: bool,
    /// One-line measurement summary, or the failure reason.
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    /// The pass/fail table line for this check.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {:<28} {:>7.1}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

struct Check {
    id: u32,
    name: &'static str,
    limit_seconds: f64,
    run: fn() -> Result<String>,
}

const CHECKS: [Check; 10] = [
    Check {
        id: 1,
        name: "eigenvalue-recursion",
        limit_seconds: 30.0,
        run: eigenvalue_recursion,
    },
    Check {
        id: 2,
        name: "trace-identity-dim1",
        limit_seconds: 300.0,
        run: trace_identity_dim1,
    },
    Check {
        id: 3,
        name: "trace-identity-dim2",
        limit_seconds: 120.0,
        run: trace_identity_dim2,
    },
    Check {
        id: 4,
        name: "window-moment-identity",
        limit_seconds: 300.0,
        run: window_moment_identity,
    },
    Check {
        id: 5,
        name: "catalan-constant-terms",
        limit_seconds: 1.0,
        run: catalan_constant_terms,
    },
    Check {
        id: 6,
        name: "twin-singular-series",
        limit_seconds: 120.0,
        run: twin_singular_series,
    },
    Check {
        id: 7,
        name: "per-form-route-agreement",
        limit_seconds: 60.0,
        run: per_form_route_agreement,
    },
    Check {
        id: 8,
        name: "harmonic-per-form-coherence",
        limit_seconds: 600.0,
        run: harmonic_per_form_coherence,
    },
    Check {
        id: 9,
        name: "second-moment-references",
        limit_seconds: 1200.0,
        run: second_moment_references,
    },
    Check {
        id: 10,
        name: "poisson-moment-cross-check",
        limit_seconds: 1.0,
        run: poisson_moment_cross_check,
    },
];

/// Identifiers of the full suite, in order.
pub fn check_ids() -> Vec<u32> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// The quick subset: checks resting on exact integer/rational identities
/// alone (no certified numerics, no long sweeps).
pub fn quick_ids() -> Vec<u32> {
    vec![1, 4, 5, 7, 10]
}

/// Run one check by id, timing it against its budget.
pub fn run_check(id: u32) -> Result<CheckOutcome> {
    let check = CHECKS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("no acceptance check with id {id}")))?;
    let start = Instant::now();
    let result = (check.run)();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(detail) => (true, detail),
        Err(e) => (false, e.to_string()),
    };
    if passed && seconds > check.limit_seconds {
        passed = false;
        let _ = write!(
            detail,
            " — but runtime {seconds:.1}s exceeded the {:.0}s budget",
            check.limit_seconds
        );
    }
    Ok(CheckOutcome {
        id: check.id,
        name: check.name,
        limit_seconds: check.limit_seconds,
        passed,
        detail,
        seconds,
    })
}

/// Run the listed checks, printing one pass/fail line each; returns
/// whether every check passed.
pub fn run_and_print(ids: &[u32]) -> Result<bool> {
    let mut all = true;
    for &id in ids {
        let outcome = run_check(id)?;
        println!("{}", outcome.line());
        all &= outcome.passed;
    }
    Ok(all)
}

// ---------------------------------------------------------------------
// Check 1: a(p)² − a(p²) = p¹¹ for the weight-12 form, every p ≤ 10³,
// straight from the q-expansion in integer arithmetic.
// ---------------------------------------------------------------------

fn eigenvalue_recursion() -> Result<String> {
    let limit = 1_000u64;
    let primes = base_primes(limit);
    let span = (*primes.last().expect("primes below 1000") as usize).pow(2);
    let d = delta_expansion(span)?;
    for &p in &primes {
        let p = p as usize;
        let a_p = d.coeff(p);
        let a_p2 = d.coeff(p * p);
        let rhs = BigInt::from(p as u64).pow(11);
        if a_p * a_p - a_p2 != rhs {
            return Err(Error::Validation(format!(
                "a({p})² − a({p}²) ≠ {p}^11 in the weight-12 expansion"
            )));
        }
    }
    Ok(format!(
        "{} primes p ≤ {limit}: a(p)² − a(p²) = p¹¹ exactly in integer arithmetic",
        primes.len()
    ))
}

// ---------------------------------------------------------------------
// Check 2: one-dimensional trace identity end to end. The weight w is
// read off H[1,1] (λ(1) = 1), then w·λ(m)λ(n) must reproduce H[m,n]
// across 50 pairs with certified error below 10⁻¹⁵.
// ---------------------------------------------------------------------

/// 50 deterministic pairs with m, n ≤ 50: the leading diagonal, a strip
/// against the edge, a gcd-rich 2:1 ray, and the far column.
fn dim1_pairs() -> Vec<(u64, u64)> {
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(50);
    for i in 1..=10 {
        pairs.push((i, i));
    }
    for i in 11..=30 {
        pairs.push((i, 1));
    }
    for i in 6..=15 {
        pairs.push((2 * i, i));
    }
    for j in 1..=5 {
        pairs.push((50, j));
    }
    pairs.extend([(49, 2), (48, 3), (47, 4), (46, 5), (45, 6)]);
    pairs
}

fn trace_identity_dim1() -> Result<String> {
    let pairs = dim1_pairs();
    debug_assert_eq!(pairs.len(), 50);
    debug_assert_eq!(pairs[0], (1, 1));
    let digits = 60u32;
    // Per-pair certified budget well under the 10⁻¹⁵ target: the weight's
    // own error enters again multiplied by |λ(m)λ(n)| ≤ 4.
    let tol = 5e-17;
    let prec = (digits as f64 * 3.3220) as u32 + 64;
    let mut worst = 0.0f64;
    let mut worst_at = (0u32, (0u64, 0u64));
    for k in [12u32, 16, 18, 20, 22, 26] {
        let forms = eigenforms(k, 51)?;
        if forms.len() != 1 {
            return Err(Error::Validation(format!(
                "expected a one-dimensional space at weight {k}, got {}",
                forms.len()
            )));
        }
        let f = &forms[0];
        let h = geometric_side_batch(&pairs, k, digits, tol)?;
        let w = &h[0]; // H[1,1] doubles as the harmonic weight
        for (i, &(m, n)) in pairs.iter().enumerate() {
            let lam = f.lambda(m, prec)?.mul(&f.lambda(n, prec)?, prec);
            let diff = w.value.mul(&lam, prec).sub(&h[i].value, prec);
            let dev = diff.abs_upper().to_f64()
                + w.tail_bound * lam.abs_upper().to_f64()
                + h[i].tail_bound;
            if dev > worst {
                worst = dev;
                worst_at = (k, (m, n));
            }
        }
    }
    if worst >= 1e-15 {
        return Err(Error::Tolerance(format!(
            "max certified |w·λ(m)λ(n) − H[m,n]| = {worst:.3e} at weight {} pair {:?}; \
             the target is 10⁻¹⁵",
            worst_at.0, worst_at.1
        )));
    }
    Ok(format!(
        "6 weights × 50 pairs at 60 digits: max certified |w·λ(m)λ(n) − H[m,n]| = {worst:.2e} < 1e-15"
    ))
}

// ---------------------------------------------------------------------
// Check 3: two-dimensional weight extraction, solved from 2 pairs and
// validated on 6 held-out pairs with certified residual below 10⁻¹².
// ---------------------------------------------------------------------

fn trace_identity_dim2() -> Result<String> {
    let forms = eigenforms(24, 16)?;
    if forms.len() != 2 {
        return Err(Error::Validation(format!(
            "expected a two-dimensional space at weight 24, got {}",
            forms.len()
        )));
    }
    let pairs = [
        (1u64, 1u64),
        (2, 1),
        (3, 1),
        (4, 1),
        (2, 2),
        (5, 1),
        (6, 1),
        (3, 2),
    ];
    let w = extract_weights(24, &forms, &pairs, 40, 1e-15)?;
    if !(w.residual < 1e-12) {
        return Err(Error::Tolerance(format!(
            "held-out residual {:.3e} is not below 10⁻¹²",
            w.residual
        )));
    }
    Ok(format!(
        "weights solved from 2 pairs, validated on {} held-out pairs: residual {:.2e} < 1e-12",
        pairs.len() - forms.len(),
        w.residual
    ))
}

// ---------------------------------------------------------------------
// Check 4: the window-moment identity — Σ W(n)^j equals the
// surjection-weighted constellation counts, both sides exact integers.
// ---------------------------------------------------------------------

fn window_moment_identity() -> Result<String> {
    let n_max = 1_000_000u64;
    let ln_n = (n_max as f64).ln();
    for &eta in &[0.5f64, 1.0, 2.0] {
        for j in 1..=3u32 {
            let c = moment_identity_check(n_max, eta * ln_n, j)?;
            if !c.is_exact() {
                return Err(Error::Validation(format!(
                    "window-moment identity broke at η = {eta}, j = {j}: {} ≠ {}",
                    c.lhs, c.rhs
                )));
            }
        }
    }
    Ok(
        "9 (η, j) combinations at N = 10⁶: window moments equal the constellation \
         reconstruction bit for bit"
            .into(),
    )
}

// ---------------------------------------------------------------------
// Check 5: constant terms of even-power expansions are Catalan numbers.
// ---------------------------------------------------------------------

fn catalan_constant_terms() -> Result<String> {
    let want: [u64; 8] = [1, 2, 5, 14, 42, 132, 429, 1430];
    for (i, &c) in want.iter().enumerate() {
        let m = 2 * (i as u32 + 1);
        let d = power_decomposition(m)?;
        if d.constant_term() != BigInt::from(c) {
            return Err(Error::Validation(format!(
                "constant term of the power-{m} expansion is {}, expected {c}",
                d.constant_term()
            )));
        }
    }
    Ok("constant terms for even powers 2..=16 are the first eight Catalan numbers, exactly".into())
}

// ---------------------------------------------------------------------
// Check 6: the twin-offset singular series with a certified truncation
// tail small enough to pin the value to ±10⁻⁶.
// ---------------------------------------------------------------------

fn twin_singular_series() -> Result<String> {
    let d = TupleVector::new(vec![1, 3])?;
    // The default cutoff's tail (~10⁻⁶) is too coarse for a ±10⁻⁶ claim;
    // push the Euler product to 2·10⁷ so the tail drops to ~3·10⁻⁷.
    let s = singular_series(&d, 20_000_000)?;
    let reference = 1.320_323_6f64;
    let dev = (s.value - reference).abs() + s.tail_bound;
    if dev > 1e-6 {
        return Err(Error::Tolerance(format!(
            "twin singular series {:.9} (certified tail {:.2e}) misses {reference} by more \
             than 10⁻⁶",
            s.value, s.tail_bound
        )));
    }
    Ok(format!(
        "value {:.9}, certified tail {:.2e}: within 10⁻⁶ of {reference}",
        s.value, s.tail_bound
    ))
}

// ---------------------------------------------------------------------
// Check 7: the three per-form evaluation routes agree (exactly, in the
// coefficient field) for the weight-12 form at N = 200.
// ---------------------------------------------------------------------

fn per_form_route_agreement() -> Result<String> {
    let forms = eigenforms(12, 200)?;
    let f = &forms[0];
    let mut worst = 0.0f64;
    for &eta in &[0.5f64, 1.0, 2.0] {
        let r = per_form_second_moment(f, 200, eta)?;
        let d = r.route_max_difference.unwrap_or(f64::INFINITY);
        worst = worst.max(d);
    }
    if worst > 1e-25 {
        return Err(Error::Tolerance(format!(
            "evaluation routes differ by up to {worst:.3e}, above the 10⁻²⁵ agreement target"
        )));
    }
    Ok(format!(
        "N = 200, η ∈ {{0.5, 1, 2}}: three evaluation routes agree \
         (max certified difference {worst:.1e} ≤ 1e-25)"
    ))
}

// ---------------------------------------------------------------------
// Check 8: coherence of the two evaluation modes. At weight 12 the
// harmonic total must match the weight-combined per-form value inside
// 10⁻¹⁰ plus the certified tail budget; at weight 10⁶ the diagonal-to-
// first-moment ratio must land in [1.9, 2.1], with the budget printed.
// ---------------------------------------------------------------------

fn harmonic_per_form_coherence() -> Result<String> {
    let n_max = 200u64;
    let h = harmonic_second_moment(12, n_max, 1.0, 1e-10)?;
    let forms = eigenforms(12, n_max as usize)?;
    let pairs = [(1u64, 1u64), (2, 1), (3, 1), (4, 1), (5, 1)];
    let w = extract_weights(12, &forms, &pairs, 30, 1e-16)?;
    let pf = per_form_second_moment(&forms[0], n_max, 1.0)?;
    let weighted = w.weights[0].mid_f64() * pf.total;
    let diff = (h.total - weighted).abs();
    // Slack beyond the harmonic budget: the weight's enclosure radius and
    // held-out residual scaled by the per-form total, plus a generous
    // allowance for rounding both exact values into f64.
    let budget = h.budget_total()
        + (w.weights[0].rad_f64() + w.residual) * pf.total.abs()
        + 1e-9;
    if diff > 1e-10 + budget {
        return Err(Error::Tolerance(format!(
            "harmonic total {:.9} vs weighted per-form {weighted:.9}: |Δ| = {diff:.3e} \
             exceeds 1e-10 + budget {budget:.3e}",
            h.total
        )));
    }

    let h_big = harmonic_second_moment(1_000_000, n_max, 1.0, 1e-8)?;
    let ratio = h_big.diagonal / h_big.exact_prime_first_moment as f64;
    if !(1.9..=2.1).contains(&ratio) {
        return Err(Error::Tolerance(format!(
            "weight-10⁶ diagonal/first-moment ratio {ratio:.4} is outside [1.9, 2.1]"
        )));
    }
    let mut detail = format!(
        "k=12: harmonic {:.6} vs weighted per-form {weighted:.6}, |Δ| = {diff:.3e} ≤ 1e-10 + \
         budget {budget:.3e}; k=10⁶: diagonal/first-moment = {ratio:.6} ∈ [1.9, 2.1], budget:",
        h.total
    );
    for t in &h_big.error_budget {
        let _ = write!(detail, " {} {:.1e};", t.label, t.bound);
    }
    Ok(detail)
}

// ---------------------------------------------------------------------
// Check 9: the normalized harmonic total against its two references —
// within the computed budget of the exact prime-count target, reported
// (no gate) against the Poisson value 3 — plus the N = 10⁷ empirical
// second-moment column, which must land within 15% of 2.
// ---------------------------------------------------------------------

fn second_moment_references() -> Result<String> {
    let c = second_moment_comparison(1_000_000, 1_000, 1.0, 1e-8)?;
    let allowed = c.certified_budget + c.heuristic_budget;
    if c.unconditional_discrepancy > allowed {
        return Err(Error::Tolerance(format!(
            "normalized harmonic total {:.9} misses the prime-count reference {:.9} by \
             {:.3e}, beyond the computed budget {allowed:.3e}",
            c.normalized_total, c.unconditional_reference, c.unconditional_discrepancy
        )));
    }
    let g = gallagher_report(10_000_000, &[1.0], 2)?;
    let row = g
        .rows
        .iter()
        .find(|r| r.j == 2)
        .ok_or_else(|| Error::Validation("missing j = 2 row in the window-moment table".into()))?;
    if row.identity != "exact" {
        return Err(Error::Validation(format!(
            "N = 10⁷ moment identity column reads {:?}, expected \"exact\"",
            row.identity
        )));
    }
    let dev = (row.empirical_normalized - 2.0).abs();
    if dev > 0.15 * 2.0 {
        return Err(Error::Tolerance(format!(
            "N = 10⁷ empirical second moment {:.4} is more than 15% away from 2",
            row.empirical_normalized
        )));
    }
    Ok(format!(
        "k=10⁶, N=10³: harmonic/N = {:.9} vs prime-count reference {:.9} (|Δ| = {:.2e} ≤ \
         budget {allowed:.2e}); Poisson reference 3 differs by {:+.5} (reported, no gate); \
         N=10⁷ empirical second moment {:.4} within 15% of 2, identity exact",
        c.normalized_total,
        c.unconditional_reference,
        c.unconditional_discrepancy,
        c.conjectural_gap,
        row.empirical_normalized
    ))
}

// ---------------------------------------------------------------------
// Check 10: the combinatorial moment formula against direct Poisson
// series summation, inside the series' own certified tails.
// ---------------------------------------------------------------------

fn poisson_moment_cross_check() -> Result<String> {
    let mut worst_rel = 0.0f64;
    for j in 1..=10u32 {
        for &eta in &[0.25f64, 0.5, 1.0, 2.0, 4.0] {
            let (direct, tail) = poisson_moment_with_tail(j, eta)?;
            let combinatorial = gallagher_moment(j, eta)?.value;
            let diff = (combinatorial - direct).abs();
            // The combinatorial side sums ≤ j correctly rounded positive
            // terms; allow its own roundoff on top of the series tail.
            let slack = tail + 1e-14 * j as f64 * combinatorial.abs();
            if diff > slack {
                return Err(Error::Validation(format!(
                    "moment formulas disagree at j = {j}, η = {eta}: {combinatorial} vs \
                     {direct} (gap {diff:.3e}, allowed {slack:.3e})"
                )));
            }
            worst_rel = worst_rel.max(diff / combinatorial.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(format!(
        "50 (j, η) combinations: combinatorial and direct-series moments agree within \
         series tails (worst relative gap {worst_rel:.1e})"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_table_is_complete_and_ordered() {
        assert_eq!(check_ids(), (1..=10).collect::<Vec<_>>());
        for ids in [check_ids(), quick_ids()] {
            for id in ids {
                assert!(CHECKS.iter().any(|c| c.id == id));
            }
        }
        assert!(run_check(0).is_err());
        assert!(run_check(11).is_err());
    }

    #[test]
    fn fast_checks_pass_and_report_lines() {
        for id in [5u32, 10] {
            let o = run_check(id).unwrap();
            assert!(o.passed, "check {id}: {}", o.detail);
            assert!(o.seconds < o.limit_seconds);
            let line = o.line();
            assert!(line.contains("PASS"), "{line}");
        }
    }
}
