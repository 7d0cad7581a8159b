//! Hecke eigenforms on the full modular group: exact integer
//! coefficients in dimension one, exact quadratic-field coefficients in
//! dimension two, and certified numeric enclosures for dimensions three
//! to six. Also: normalized eigenvalue accessors, sums of squared
//! eigenvalues over primes in a short window, and a validating CSV
//! import/export of eigenvalue tables.

use crate::ball::{Ball, Mag};
use crate::modforms::basis::{dim_cusp, victor_miller_basis};
use crate::modforms::delta::delta_expansion;
use crate::modforms::field::{squarefree_decomposition, QuadExt};
use crate::modforms::hecke::matrix_in_basis;
use crate::modforms::qexp::QExpansion;
use crate::primes::{base_primes, sieve_range};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

/// Coefficients of a normalized eigenform, in whichever exact or
/// certified representation the dimension of its space allows.
#[derive(Debug)]
pub enum EigenCoefficients {
    /// Rational-integer coefficients (one-dimensional spaces).
    Integer(Arc<QExpansion>),
    /// Coefficients `x + y sqrt(d)` in a real quadratic field
    /// (two-dimensional spaces), indexed by `n` starting at 0.
    Quadratic(Vec<QuadExt>),
    /// Certified enclosures of one real embedding (higher dimensions).
    Numeric(Vec<Ball>),
}

/// A normalized Hecke eigenform `f = q + a(2) q^2 + ...` of level one.
#[derive(Debug)]
pub struct Eigenform {
    weight: u32,
    index: usize,
    coeffs: EigenCoefficients,
    residual_bound: Option<f64>,
}

impl Eigenform {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Position among the eigenforms of this weight, ordered by the
    /// embedded value of `a(2)` (ascending).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Largest `n` for which `a(n)` is available.
    pub fn precision(&self) -> usize {
        match &self.coeffs {
            EigenCoefficients::Integer(f) => f.precision(),
            EigenCoefficients::Quadratic(v) => v.len() - 1,
            EigenCoefficients::Numeric(v) => v.len() - 1,
        }
    }

    /// True when coefficients are exact (integer or quadratic-field).
    pub fn is_exact(&self) -> bool {
        !matches!(self.coeffs, EigenCoefficients::Numeric(_))
    }

    /// Upper bound on the a-posteriori Hecke-relation residual, for
    /// numeric coefficient data only.
    pub fn residual_bound(&self) -> Option<f64> {
        self.residual_bound
    }

    pub fn coefficients(&self) -> &EigenCoefficients {
        &self.coeffs
    }

    pub fn describe(&self) -> String {
        match &self.coeffs {
            EigenCoefficients::Integer(_) => "integer coefficients".into(),
            EigenCoefficients::Quadratic(v) => {
                format!("coefficients in Q(sqrt({}))", v[1].d)
            }
            EigenCoefficients::Numeric(_) => format!(
                "numeric enclosures (relation residual <= {:.1e})",
                self.residual_bound.unwrap_or(f64::NAN)
            ),
        }
    }

    fn check_precision(&self, n: usize) -> Result<()> {
        if n > self.precision() {
            return Err(Error::Precision(format!(
                "coefficient {n} requested but only {} are available",
                self.precision()
            )));
        }
        Ok(())
    }

    /// Exact integer coefficient `a(n)`; an error for non-integer forms.
    pub fn coeff_int(&self, n: usize) -> Result<&BigInt> {
        self.check_precision(n)?;
        match &self.coeffs {
            EigenCoefficients::Integer(f) => Ok(f.coeff(n)),
            _ => Err(Error::InvalidArgument(
                "eigenform does not have integer coefficients".into(),
            )),
        }
    }

    /// Certified enclosure of `a(n)` under this form's real embedding.
    pub fn coeff_ball(&self, n: usize, prec: u32) -> Result<Ball> {
        self.check_precision(n)?;
        match &self.coeffs {
            EigenCoefficients::Integer(f) => Ok(Ball::from_bigint(f.coeff(n))),
            EigenCoefficients::Quadratic(v) => v[n].embed(prec),
            EigenCoefficients::Numeric(v) => {
                let mut b = v[n].clone();
                b.round(prec);
                Ok(b)
            }
        }
    }

    /// Normalized eigenvalue `lambda(n) = a(n) / n^{(k-1)/2}`.
    pub fn lambda(&self, n: u64, prec: u32) -> Result<Ball> {
        let guard = prec + 16;
        let den = half_power(n, self.weight, guard)?;
        let mut out = self.coeff_ball(n as usize, guard)?.div(&den, guard)?;
        out.round(prec);
        Ok(out)
    }

    /// `lambda(n)^2 = a(n)^2 / n^{k-1}`, computed with an exact rational
    /// numerator whenever the coefficients are exact.
    pub fn lambda_squared(&self, n: u64, prec: u32) -> Result<Ball> {
        self.check_precision(n as usize)?;
        let power = BigInt::from(n).pow(self.weight - 1);
        match &self.coeffs {
            EigenCoefficients::Integer(f) => {
                let a = f.coeff(n as usize);
                Ball::from_ratio(&(a * a), &power, prec)
            }
            EigenCoefficients::Quadratic(v) => {
                let sq = v[n as usize].square();
                let scale = BigRational::from(power).recip();
                sq.mul_rational(&scale).embed(prec)
            }
            EigenCoefficients::Numeric(v) => {
                let guard = prec + 16;
                let b = v[n as usize].mul(&v[n as usize], guard);
                let mut out = b.div(&Ball::from_bigint(&power), guard)?;
                out.round(prec);
                Ok(out)
            }
        }
    }
}

/// Enclosure of `n^{(k-1)/2}`, exact when the power is a perfect square.
fn half_power(n: u64, k: u32, prec: u32) -> Result<Ball> {
    if n == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    let power = BigInt::from(n).pow(k - 1);
    let root = power.sqrt();
    if &root * &root == power {
        return Ok(Ball::from_bigint(&root));
    }
    Ball::from_bigint(&power).sqrt(prec)
}

/// All normalized eigenforms of even weight `k >= 4`, with coefficients
/// through `q^m` at least, ordered by the value of `a(2)`.
pub fn eigenforms(k: u32, m: usize) -> Result<Vec<Eigenform>> {
    let d = dim_cusp(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return one_dimensional(k, m);
    }
    let m_eff = m.max(5 * (d + 1)).max(10);
    let basis = victor_miller_basis(k, m_eff)?;
    if d == 2 {
        match two_dimensional(k, &basis) {
            Ok(forms) => return Ok(forms),
            // A rational splitting cannot be represented in a quadratic
            // field; fall back to the generic certified-numeric path.
            Err(Error::Precision(_)) => {}
            Err(e) => return Err(e),
        }
    }
    numeric_eigenforms(k, &basis)
}

fn one_dimensional(k: u32, m: usize) -> Result<Vec<Eigenform>> {
    let m_eff = m.max(6);
    let form = if k == 12 {
        delta_expansion(m_eff)?
    } else {
        let mut basis = victor_miller_basis(k, m_eff)?;
        Arc::new(basis.remove(0))
    };
    // Sanity: the Hecke multiplicativity a(2) a(3) = a(6) must hold.
    if form.coeff(2) * form.coeff(3) != *form.coeff(6) {
        return Err(Error::Validation(format!(
            "basis vector of weight {k} fails the multiplicativity check"
        )));
    }
    Ok(vec![Eigenform {
        weight: k,
        index: 0,
        coeffs: EigenCoefficients::Integer(form),
        residual_bound: None,
    }])
}

fn two_dimensional(k: u32, basis: &[QExpansion]) -> Result<Vec<Eigenform>> {
    let t2 = matrix_in_basis(basis, 2)?;
    let tr = &t2[0][0] + &t2[1][1];
    let det = &t2[0][0] * &t2[1][1] - &t2[0][1] * &t2[1][0];
    let disc = &tr * &tr - BigInt::from(4) * &det;
    if !disc.is_positive() {
        return Err(Error::Validation(format!(
            "operator on the weight-{k} cusp space has non-real or repeated eigenvalues"
        )));
    }
    let (s, d_free) = squarefree_decomposition(&disc)?;
    if d_free.is_one() {
        return Err(Error::Precision(
            "discriminant is a perfect square; using the numeric path".into(),
        ));
    }
    if t2[0][1].is_zero() {
        return Err(Error::Precision(
            "triangular operator matrix; using the numeric path".into(),
        ));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut forms = Vec::new();
    for (index, sign) in [(0usize, -1i64), (1usize, 1i64)] {
        let a2 = QuadExt::new(
            BigRational::from(tr.clone()) * &half,
            BigRational::from(&s * BigInt::from(sign)) * &half,
            d_free.clone(),
        )?;
        // Eigenvector (1, c) of the 2x2 matrix: c = (a2 - t11) / t12.
        let c = a2
            .sub(&QuadExt::from_rational(BigRational::from(t2[0][0].clone()), d_free.clone())?)?
            .mul_rational(&BigRational::from(t2[0][1].clone()).recip());
        // Second matrix row must agree, and c must equal a(2) itself
        // (the q^2-coefficient of g_1 + c g_2 is c).
        let row2 = QuadExt::from_rational(BigRational::from(t2[1][0].clone()), d_free.clone())?
            .add(&c.mul_rational(&BigRational::from(t2[1][1].clone())))?;
        if row2 != a2.mul(&c)? || c != a2 {
            return Err(Error::Validation(
                "eigenvector consistency check failed on a two-dimensional space".into(),
            ));
        }
        let m_eff = basis[0].precision();
        let mut coeffs = Vec::with_capacity(m_eff + 1);
        for n in 0..=m_eff {
            let g1 = BigRational::from(basis[0].coeff(n).clone());
            let g2 = BigRational::from(basis[1].coeff(n).clone());
            let mut a = c.mul_rational(&g2);
            a.x += g1;
            coeffs.push(a);
        }
        verify_exact_eigenvector(basis, &[3, 5], &c, &coeffs)?;
        forms.push(Eigenform {
            weight: k,
            index,
            coeffs: EigenCoefficients::Quadratic(coeffs),
            residual_bound: None,
        });
    }
    Ok(forms)
}

/// Exact check that `(1, c)` is an eigenvector of `T_m` for each listed
/// `m`, with eigenvalue equal to the already-computed coefficient `a(m)`.
fn verify_exact_eigenvector(
    basis: &[QExpansion],
    indices: &[u64],
    c: &QuadExt,
    coeffs: &[QuadExt],
) -> Result<()> {
    for &m in indices {
        let t = matrix_in_basis(basis, m)?;
        let am = &coeffs[m as usize];
        let lhs0 = QuadExt::from_rational(BigRational::from(t[0][0].clone()), c.d.clone())?
            .add(&c.mul_rational(&BigRational::from(t[0][1].clone())))?;
        let lhs1 = QuadExt::from_rational(BigRational::from(t[1][0].clone()), c.d.clone())?
            .add(&c.mul_rational(&BigRational::from(t[1][1].clone())))?;
        if lhs0 != *am || lhs1 != am.mul(c)? {
            return Err(Error::Validation(format!(
                "held-out operator T_{m} does not act by the computed coefficient"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Certified numeric diagonalization (dimensions >= 3).
// ---------------------------------------------------------------------

/// Monic characteristic polynomial of an integer matrix, ascending
/// coefficients, computed exactly (the trace divisions are exact) and
/// verified by the closing identity of the recurrence.
fn char_poly(a: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
    let d = a.len();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::one();
    // m holds the current auxiliary matrix of the recurrence.
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for i in 1..=d {
        // m <- a * m + c_{d-i+1} * I
        let mut next = vec![vec![BigInt::zero(); d]; d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = BigInt::zero();
                for (l, m_row) in m.iter().enumerate() {
                    acc += &a[r][l] * &m_row[c];
                }
                next[r][c] = acc;
            }
            next[r][r] += &coeffs[d - i + 1];
        }
        m = next;
        let mut trace = BigInt::zero();
        for r in 0..d {
            for l in 0..d {
                trace += &a[r][l] * &m[l][r];
            }
        }
        let (q, rem) = num_integer::Integer::div_rem(&-trace, &BigInt::from(i as i64));
        if !rem.is_zero() {
            return Err(Error::Validation(
                "characteristic polynomial recurrence produced a non-integer".into(),
            ));
        }
        coeffs[d - i] = q;
    }
    // Closing identity: a * m + c_0 * I = 0.
    for r in 0..d {
        for c in 0..d {
            let mut acc = BigInt::zero();
            for l in 0..d {
                acc += &a[r][l] * &m[l][c];
            }
            if r == c {
                acc += &coeffs[0];
            }
            if !acc.is_zero() {
                return Err(Error::Validation(
                    "characteristic polynomial failed its closing identity".into(),
                ));
            }
        }
    }
    Ok(coeffs)
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_deriv(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| BigRational::from(BigInt::from(i as i64)) * c)
        .collect()
}

/// Remainder of polynomial division.
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    while r.len() - 1 >= db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let factor = r.last().unwrap() / lead;
        for i in 0..=db {
            let delta = &factor * &b[i];
            r[dr - db + i] -= delta;
        }
        r.pop();
        poly_trim(&mut r);
        if dr == db {
            break;
        }
    }
    if r.is_empty() {
        r.push(BigRational::zero());
    }
    r
}

/// Sturm chain of a squarefree polynomial; errors on repeated roots.
fn sturm_chain(p: &[BigInt]) -> Result<Vec<Vec<BigRational>>> {
    let p0: Vec<BigRational> = p.iter().map(|c| BigRational::from(c.clone())).collect();
    let mut chain = vec![p0.clone(), poly_deriv(&p0)];
    loop {
        let n = chain.len();
        let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
        if rem.len() == 1 && rem[0].is_zero() {
            break;
        }
        chain.push(rem.iter().map(|c| -c).collect());
        if chain.last().unwrap().len() == 1 {
            break;
        }
    }
    if chain.last().unwrap().len() != 1 || chain.last().unwrap()[0].is_zero() {
        return Err(Error::Validation(
            "polynomial has repeated roots; eigenvalues are not simple".into(),
        ));
    }
    Ok(chain)
}

/// Number of sign variations of the chain at `x`.
fn variations(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for p in chain {
        let v = poly_eval(p, x);
        let s: i8 = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Exact sign of `p(num / 2^t)` via a scaled integer evaluation.
fn dyadic_sign(p: &[BigInt], num: &BigInt, t: u64) -> i8 {
    let d = p.len() - 1;
    let mut acc = p[d].clone();
    for i in (0..d).rev() {
        acc = acc * num + (&p[i] << (t * (d - i) as u64));
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Dyadic rational `num / 2^t`.
#[derive(Clone, Debug)]
struct Dyadic {
    num: BigInt,
    t: u64,
}

impl Dyadic {
    fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.t)
    }
    fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let t = a.t.max(b.t);
        let an = &a.num << (t - a.t);
        let bn = &b.num << (t - b.t);
        Dyadic { num: an + bn, t: t + 1 }
    }
}

/// Isolate all real roots of a squarefree integer polynomial whose
/// leading coefficient is positive; all `deg p` roots must be real.
/// Returns disjoint intervals `(lo, hi]`, each holding exactly one root,
/// sorted in increasing order.
fn isolate_real_roots(p: &[BigInt]) -> Result<Vec<(Dyadic, Dyadic)>> {
    let d = p.len() - 1;
    let chain = sturm_chain(p)?;
    let max_bits = p
        .iter()
        .map(|c| c.magnitude().bits())
        .max()
        .unwrap_or(1);
    let b_exp = max_bits + 2;
    let lo = Dyadic { num: -(BigInt::one() << b_exp), t: 0 };
    let hi = Dyadic { num: BigInt::one() << b_exp, t: 0 };
    let total =
        variations(&chain, &lo.to_rational()) - variations(&chain, &hi.to_rational());
    if total != d {
        return Err(Error::Validation(format!(
            "expected {d} real eigenvalues in range, found {total}"
        )));
    }
    let mut stack = vec![(lo, hi, d)];
    let mut isolated = Vec::new();
    let mut work = 0usize;
    while let Some((lo, hi, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            isolated.push((lo, hi));
            continue;
        }
        work += 1;
        if work > 10_000 {
            return Err(Error::Precision("root isolation did not converge".into()));
        }
        let mid = Dyadic::midpoint(&lo, &hi);
        let left =
            variations(&chain, &lo.to_rational()) - variations(&chain, &mid.to_rational());
        stack.push((lo, mid.clone(), left));
        stack.push((mid, hi, count - left));
    }
    isolated.sort_by(|a, b| a.0.to_rational().cmp(&b.0.to_rational()));
    Ok(isolated)
}

/// Shrink an isolating interval to width `2^-target_bits` by exact sign
/// bisection, returning a certified enclosure of the root.
fn refine_root(p: &[BigInt], lo: &Dyadic, hi: &Dyadic, target_bits: u64, prec: u32) -> Result<Ball> {
    let exact_ball = |x: &Dyadic| -> Result<Ball> {
        Ball::from_ratio(&x.num, &(BigInt::one() << x.t), prec)
    };
    let mut hi = hi.clone();
    let mut lo = lo.clone();
    let sign_hi = dyadic_sign(p, &hi.num, hi.t);
    if sign_hi == 0 {
        return exact_ball(&hi);
    }
    let mut sign_lo = dyadic_sign(p, &lo.num, lo.t);
    // The root lies strictly inside; if the left endpoint is itself a
    // root (of a neighboring interval), step slightly right of it.
    let mut guard = 0;
    while sign_lo == 0 || sign_lo == sign_hi {
        guard += 1;
        if guard > 256 {
            return Err(Error::Precision("could not anchor the bisection".into()));
        }
        let probe = Dyadic::midpoint(&lo, &Dyadic::midpoint(&lo, &hi));
        let s = dyadic_sign(p, &probe.num, probe.t);
        if s == 0 {
            return exact_ball(&probe);
        }
        if s == sign_hi {
            // Stepped past the root: the probe can serve as new right end.
            hi = probe;
        } else {
            lo = probe;
            sign_lo = s;
        }
    }
    while {
        let width_log2 = width_log2_upper(&lo, &hi);
        width_log2 > -(target_bits as i64)
    } {
        let mid = Dyadic::midpoint(&lo, &hi);
        let s = dyadic_sign(p, &mid.num, mid.t);
        if s == 0 {
            return exact_ball(&mid);
        }
        if s == sign_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = Dyadic::midpoint(&lo, &hi);
    let mut ball = exact_ball(&mid)?;
    ball.add_rad(&Mag::two_exp(width_log2_upper(&lo, &hi) - 1));
    Ok(ball)
}

/// Upper bound for `log2(hi - lo)`.
fn width_log2_upper(lo: &Dyadic, hi: &Dyadic) -> i64 {
    let t = lo.t.max(hi.t);
    let diff = (&hi.num << (t - hi.t)) - (&lo.num << (t - lo.t));
    debug_assert!(diff.is_positive());
    diff.magnitude().bits() as i64 - t as i64
}

fn numeric_eigenforms(k: u32, basis: &[QExpansion]) -> Result<Vec<Eigenform>> {
    let mut last_err = None;
    for prec in [240u32, 480] {
        match numeric_eigenforms_at(k, basis, prec) {
            Ok(forms) => return Ok(forms),
            Err(e @ Error::Precision(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Precision("diagonalization failed".into())))
}

fn numeric_eigenforms_at(k: u32, basis: &[QExpansion], prec: u32) -> Result<Vec<Eigenform>> {
    let m_eff = basis[0].precision();
    let t2 = matrix_in_basis(basis, 2)?;
    let poly = char_poly(&t2)?;
    let intervals = isolate_real_roots(&poly)?;
    let mut forms = Vec::new();
    for (index, (lo, hi)) in intervals.iter().enumerate() {
        let root = refine_root(&poly, lo, hi, prec as u64 + 8, prec)?;
        let coords = eigenvector(&t2, &root, prec)?;
        // a(n) = sum_j coords_j * g_j[n]; coords_0 = 1 by normalization.
        let mut coeffs = Vec::with_capacity(m_eff + 1);
        for n in 0..=m_eff {
            let mut acc = Ball::zero();
            for (j, c) in coords.iter().enumerate() {
                let term = c.mul(&Ball::from_bigint(basis[j].coeff(n)), prec);
                acc = acc.add(&term, prec);
            }
            coeffs.push(acc);
        }
        let form = Eigenform {
            weight: k,
            index,
            coeffs: EigenCoefficients::Numeric(coeffs),
            residual_bound: None,
        };
        let residual = relation_residual(&form, prec)?;
        if !(residual < 1e-40) {
            return Err(Error::Precision(format!(
                "eigenform relation residual {residual:.2e} exceeds 1e-40 at {prec} bits"
            )));
        }
        forms.push(Eigenform { residual_bound: Some(residual), ..form });
    }
    Ok(forms)
}

/// Nullspace vector of `t - root*I`, normalized so the first coordinate
/// (the leading coefficient a(1)) is exactly one.
fn eigenvector(t: &[Vec<BigInt>], root: &Ball, prec: u32) -> Result<Vec<Ball>> {
    let d = t.len();
    let mut a: Vec<Vec<Ball>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut e = Ball::from_bigint(&t[i][j]);
                    if i == j {
                        e = e.sub(root, prec);
                    }
                    e
                })
                .collect()
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; d];
    let mut used_rows = vec![false; d];
    let mut free_col = None;
    for col in 0..d {
        // Partial pivoting by midpoint magnitude among unused rows.
        let mut best: Option<(usize, f64)> = None;
        for (row, used) in used_rows.iter().enumerate() {
            if *used || a[row][col].contains_zero() {
                continue;
            }
            let size = a[row][col].abs_lower().to_f64();
            if best.map(|(_, s)| size > s).unwrap_or(true) {
                best = Some((row, size));
            }
        }
        let Some((prow, _)) = best else {
            if free_col.is_some() {
                return Err(Error::Precision(
                    "eigenvector is not determined to working precision".into(),
                ));
            }
            free_col = Some(col);
            continue;
        };
        used_rows[prow] = true;
        pivot_of_col[col] = Some(prow);
        for row in 0..d {
            if row == prow || a[row][col].contains_zero() && a[row][col].is_exact() {
                continue;
            }
            let factor = a[row][col].div(&a[prow][col], prec)?;
            for j in col..d {
                let delta = factor.mul(&a[prow][j], prec);
                a[row][j] = a[row][j].sub(&delta, prec);
            }
        }
    }
    let Some(free) = free_col else {
        return Err(Error::Precision(
            "matrix is numerically nonsingular at the computed eigenvalue".into(),
        ));
    };
    let mut x = vec![Ball::zero(); d];
    x[free] = Ball::one();
    for col in (0..d).rev() {
        let Some(prow) = pivot_of_col[col] else { continue };
        let mut acc = Ball::zero();
        for j in 0..d {
            if j != col {
                acc = acc.add(&a[prow][j].mul(&x[j], prec), prec);
            }
        }
        x[col] = acc.neg().div(&a[prow][col], prec)?;
    }
    // Normalize so a(1) = coordinate of g_1 equals one.
    if x[0].contains_zero() {
        return Err(Error::Precision(
            "leading coefficient enclosure contains zero; cannot normalize".into(),
        ));
    }
    let lead = x[0].clone();
    for xi in &mut x {
        *xi = xi.div(&lead, prec)?;
    }
    Ok(x)
}

/// Upper bound on the residuals of the defining Hecke relations in the
/// normalized (lambda) scale.
fn relation_residual(form: &Eigenform, prec: u32) -> Result<f64> {
    let l = |n: u64| form.lambda(n, prec);
    let mut worst = Mag::ZERO;
    let checks = [
        l(2)?.mul(&l(3)?, prec).sub(&l(6)?, prec),
        l(2)?.mul(&l(5)?, prec).sub(&l(10)?, prec),
        l(2)?.mul(&l(2)?, prec).sub(&l(4)?, prec).sub(&Ball::one(), prec),
        l(3)?.mul(&l(3)?, prec).sub(&l(9)?, prec).sub(&Ball::one(), prec),
    ];
    for b in checks {
        worst = worst.max(&b.abs_upper());
    }
    Ok(worst.to_f64())
}

// ---------------------------------------------------------------------
// Windowed sums of squared eigenvalues.
// ---------------------------------------------------------------------

/// Sum of `lambda(p)^2` over primes `p` in the half-open window
/// `(n - y, n]`.
pub fn window_eigen_sum(form: &Eigenform, n: u64, y: f64, prec: u32) -> Result<Ball> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window length must be positive and finite, got {y}"
        )));
    }
    if n as usize > form.precision() {
        return Err(Error::Precision(format!(
            "window end {n} exceeds the available coefficients {}",
            form.precision()
        )));
    }
    let lower = (n as f64) - y;
    let start = if lower < 1.0 { 2 } else { (lower.floor() as u64) + 1 };
    let mut total = Ball::zero();
    if start > n {
        return Ok(total);
    }
    let guard = prec + 16;
    let table = sieve_range(start, n)?;
    for p in table.primes() {
        total = total.add(&form.lambda_squared(p, guard)?, guard);
    }
    total.round(prec);
    Ok(total)
}

// ---------------------------------------------------------------------
// CSV export / import with fault detection.
// ---------------------------------------------------------------------

/// Write eigenvalue coefficients `a(1)..a(n_max)` as CSV. Integer forms
/// use the header `n,a`; quadratic forms use `n,x,y,D` with rational
/// `x, y` (so `a(n) = x + y sqrt(D)`). Numeric forms are not exportable.
pub fn export_eigenvalues<W: Write>(form: &Eigenform, n_max: usize, mut out: W) -> Result<()> {
    if n_max < 1 || n_max > form.precision() {
        return Err(Error::InvalidArgument(format!(
            "export range 1..={n_max} is outside the available coefficients"
        )));
    }
    match &form.coeffs {
        EigenCoefficients::Integer(f) => {
            writeln!(out, "n,a")?;
            for n in 1..=n_max {
                writeln!(out, "{},{}", n, f.coeff(n))?;
            }
        }
        EigenCoefficients::Quadratic(v) => {
            writeln!(out, "n,x,y,D")?;
            for (n, a) in v.iter().enumerate().take(n_max + 1).skip(1) {
                writeln!(out, "{},{},{},{}", n, a.x, a.y, a.d)?;
            }
        }
        EigenCoefficients::Numeric(_) => {
            return Err(Error::InvalidArgument(
                "only exact eigenforms can be exported losslessly".into(),
            ));
        }
    }
    Ok(())
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse()
            .map_err(|_| Error::Format(format!("invalid integer {t:?}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Format("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

/// Read a CSV eigenvalue table of weight `k`, verify the Hecke relations
/// and the match against an internally recomputed eigenform, and return
/// the validated form. Any violation is reported with the indices where
/// it occurs.
pub fn import_eigenvalues<R: Read>(reader: R, k: u32) -> Result<Eigenform> {
    let mut lines = BufReader::new(reader).lines();
    let header = loop {
        match lines.next() {
            None => return Err(Error::Format("empty eigenvalue file".into())),
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line.trim().to_string();
                }
            }
        }
    };
    enum Mode {
        Int(Vec<BigInt>),
        Quad(Vec<(BigRational, BigRational, BigInt)>),
    }
    let mut mode = match header.as_str() {
        "n,a" => Mode::Int(Vec::new()),
        "n,x,y,D" => Mode::Quad(Vec::new()),
        other => {
            return Err(Error::Format(format!(
                "unrecognized header {other:?}: expected \"n,a\" or \"n,x,y,D\""
            )))
        }
    };
    let mut expect_n = 1usize;
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let want_fields = match &mode {
            Mode::Int(_) => 2,
            Mode::Quad(_) => 4,
        };
        if fields.len() != want_fields {
            return Err(Error::Format(format!(
                "row {expect_n}: expected {want_fields} fields, got {}",
                fields.len()
            )));
        }
        let n: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("row {expect_n}: bad index {:?}", fields[0])))?;
        if n != expect_n {
            return Err(Error::Format(format!(
                "rows must cover n = 1, 2, ... consecutively; expected {expect_n}, got {n}"
            )));
        }
        match &mut mode {
            Mode::Int(v) => {
                v.push(
                    fields[1]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("row {n}: bad integer {:?}", fields[1])))?,
                );
            }
            Mode::Quad(v) => {
                let x = parse_rational(fields[1])?;
                let y = parse_rational(fields[2])?;
                let d: BigInt = fields[3]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("row {n}: bad integer {:?}", fields[3])))?;
                v.push((x, y, d));
            }
        }
        expect_n += 1;
    }
    let n_max = expect_n - 1;
    if n_max == 0 {
        return Err(Error::Format("no data rows in eigenvalue file".into()));
    }
    let internal = eigenforms(k, n_max)?;
    if internal.is_empty() {
        return Err(Error::Validation(format!(
            "there are no cusp eigenforms of weight {k}"
        )));
    }
    if !internal[0].is_exact() {
        return Err(Error::Validation(format!(
            "weight-{k} eigenforms do not have exact import support (dimension > 2)"
        )));
    }
    match mode {
        Mode::Int(values) => {
            let violations = integer_relation_violations(&values, k);
            if !violations.is_empty() {
                return Err(Error::Validation(format!(
                    "imported coefficients violate the Hecke relations: {}",
                    violations.join("; ")
                )));
            }
            for f in &internal {
                if let EigenCoefficients::Integer(q) = &f.coeffs {
                    if (1..=n_max).all(|n| q.coeff(n) == &values[n - 1]) {
                        let mut coeffs = vec![BigInt::zero()];
                        coeffs.extend(values);
                        return Ok(Eigenform {
                            weight: k,
                            index: f.index,
                            coeffs: EigenCoefficients::Integer(Arc::new(QExpansion::new(
                                k, coeffs,
                            )?)),
                            residual_bound: None,
                        });
                    }
                }
            }
            Err(Error::Validation(format!(
                "coefficients satisfy the multiplicative relations but match no \
                 weight-{k} eigenform"
            )))
        }
        Mode::Quad(rows) => {
            let d0 = rows[0].2.clone();
            if rows.iter().any(|(_, _, d)| *d != d0) {
                return Err(Error::Format(
                    "all rows must lie in the same quadratic field".into(),
                ));
            }
            let (s, _) = squarefree_decomposition(&d0)?;
            if !s.is_one() {
                return Err(Error::Validation(format!(
                    "field discriminant part {d0} is not squarefree"
                )));
            }
            let values: Vec<QuadExt> = rows
                .into_iter()
                .map(|(x, y, d)| QuadExt::new(x, y, d))
                .collect::<Result<_>>()?;
            let violations = quadratic_relation_violations(&values, k)?;
            if !violations.is_empty() {
                return Err(Error::Validation(format!(
                    "imported coefficients violate the Hecke relations: {}",
                    violations.join("; ")
                )));
            }
            for f in &internal {
                if let EigenCoefficients::Quadratic(q) = &f.coeffs {
                    if (1..=n_max).all(|n| q[n] == values[n - 1]) {
                        let mut coeffs =
                            vec![QuadExt::from_rational(BigRational::zero(), values[0].d.clone())?];
                        coeffs.extend(values);
                        return Ok(Eigenform {
                            weight: k,
                            index: f.index,
                            coeffs: EigenCoefficients::Quadratic(coeffs),
                            residual_bound: None,
                        });
                    }
                }
            }
            Err(Error::Validation(format!(
                "coefficients satisfy the multiplicative relations but match no \
                 weight-{k} eigenform"
            )))
        }
    }
}

/// Check a(1) = 1, coprime multiplicativity at prime pairs, and the
/// prime-power recursion; `values[i]` is a(i + 1).
fn integer_relation_violations(values: &[BigInt], k: u32) -> Vec<String> {
    let n_max = values.len();
    let a = |n: usize| &values[n - 1];
    let mut out = Vec::new();
    if !a(1).is_one() {
        out.push(format!("a(1) = {} but must be 1", a(1)));
    }
    let primes = base_primes(n_max as u64);
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            let (p, q) = (p as usize, q as usize);
            if p * q > n_max {
                break;
            }
            if a(p) * a(q) != *a(p * q) {
                out.push(format!("a({p})*a({q}) != a({})", p * q));
            }
        }
        let p = p as usize;
        let scale = BigInt::from(p).pow(k - 1);
        let mut e = 1;
        while p.pow(e + 1) <= n_max {
            let lhs = a(p) * a(p.pow(e));
            let rhs = a(p.pow(e + 1)) + &scale * a(p.pow(e - 1)).clone();
            if lhs != rhs {
                out.push(format!("recursion fails at p = {p}, n = {}", p.pow(e + 1)));
            }
            e += 1;
        }
    }
    out
}

fn quadratic_relation_violations(values: &[QuadExt], k: u32) -> Result<Vec<String>> {
    let n_max = values.len();
    let a = |n: usize| &values[n - 1];
    let mut out = Vec::new();
    let one = QuadExt::from_rational(BigRational::one(), values[0].d.clone())?;
    if *a(1) != one {
        out.push(format!("a(1) = {} but must be 1", a(1)));
    }
    let primes = base_primes(n_max as u64);
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            let (p, q) = (p as usize, q as usize);
            if p * q > n_max {
                break;
            }
            if a(p).mul(a(q))? != *a(p * q) {
                out.push(format!("a({p})*a({q}) != a({})", p * q));
            }
        }
        let p = p as usize;
        let scale = BigRational::from(BigInt::from(p).pow(k - 1));
        let mut e = 1;
        while p.pow(e + 1) <= n_max {
            let lhs = a(p).mul(a(p.pow(e)))?;
            let rhs = a(p.pow(e + 1)).add(&a(p.pow(e - 1)).mul_rational(&scale))?;
            if lhs != rhs {
                out.push(format!("recursion fails at p = {p}, n = {}", p.pow(e + 1)));
            }
            e += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::delta::tau;

    #[test]
    fn no_forms_below_weight_twelve() {
        for k in [4u32, 6, 8, 10, 14] {
            assert!(eigenforms(k, 10).unwrap().is_empty(), "k = {k}");
        }
    }

    #[test]
    fn weight_twelve_eigenform_is_the_discriminant() {
        let forms = eigenforms(12, 30).unwrap();
        assert_eq!(forms.len(), 1);
        let f = &forms[0];
        assert!(f.is_exact());
        for n in 1..=30usize {
            assert_eq!(f.coeff_int(n).unwrap(), &tau(n).unwrap());
        }
        // lambda(2) = -24 / 2^{11/2} = -0.53033008588991...
        let l2 = f.lambda(2, 120).unwrap();
        assert!((l2.mid_f64() - (-0.5303300858899106)).abs() < 1e-12);
        assert!(l2.rad_f64() < 1e-30);
    }

    #[test]
    fn one_dimensional_weights_are_integral_and_multiplicative() {
        for k in [16u32, 18, 20, 22, 26] {
            let forms = eigenforms(k, 40).unwrap();
            assert_eq!(forms.len(), 1, "k = {k}");
            let f = &forms[0];
            let a = |n: usize| f.coeff_int(n).unwrap().clone();
            assert!(a(1).is_one());
            assert_eq!(a(2) * a(3), a(6), "k = {k}");
            assert_eq!(a(2) * a(7), a(14), "k = {k}");
            assert_eq!(
                a(2) * a(2) - BigInt::from(2).pow(k - 1),
                a(4),
                "k = {k}"
            );
        }
    }

    #[test]
    fn weight_sixteen_leading_coefficients() {
        // q-expansion of the normalized weight-16 eigenform begins
        // q + 216 q^2 - 3348 q^3 + 13888 q^4 + 52110 q^5 + ...
        let f = &eigenforms(16, 10).unwrap()[0];
        let want: [i64; 5] = [1, 216, -3348, 13888, 52110];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(f.coeff_int(n + 1).unwrap(), &BigInt::from(*w));
        }
    }

    #[test]
    fn weight_twentyfour_splits_over_the_expected_field() {
        let forms = eigenforms(24, 60).unwrap();
        assert_eq!(forms.len(), 2);
        for (i, f) in forms.iter().enumerate() {
            assert_eq!(f.index(), i);
            let EigenCoefficients::Quadratic(v) = f.coefficients() else {
                panic!("expected quadratic coefficients");
            };
            let a2 = &v[2];
            assert_eq!(a2.x, BigRational::from(BigInt::from(540)));
            assert_eq!(a2.d, BigInt::from(144169));
            let want_y = BigRational::from(BigInt::from(if i == 0 { -12 } else { 12 }));
            assert_eq!(a2.y, want_y);
        }
        // The two embeddings of a(2) are ordered increasingly.
        let l0 = forms[0].coeff_ball(2, 100).unwrap().mid_f64();
        let l1 = forms[1].coeff_ball(2, 100).unwrap().mid_f64();
        assert!(l0 < l1);
    }

    #[test]
    fn weight_twentyfour_multiplicativity_is_exact() {
        let forms = eigenforms(24, 60).unwrap();
        for f in &forms {
            let EigenCoefficients::Quadratic(v) = f.coefficients() else {
                panic!("expected quadratic coefficients");
            };
            assert_eq!(v[2].mul(&v[3]).unwrap(), v[6]);
            assert_eq!(v[2].mul(&v[5]).unwrap(), v[10]);
            assert_eq!(v[7].mul(&v[2]).unwrap(), v[14]);
            // a(2)^2 - a(4) = 2^23 exactly.
            let diff = v[2].square().sub(&v[4]).unwrap();
            assert!(diff.is_rational());
            assert_eq!(diff.x, BigRational::from(BigInt::from(2).pow(23)));
        }
    }

    #[test]
    fn eigenvalue_bound_over_small_primes() {
        // |lambda(p)| <= 2 for every Hecke eigenform here.
        let bound = Mag::from_f64(2.0 + 1e-20);
        for k in [12u32, 16, 24] {
            for f in eigenforms(k, 110).unwrap() {
                for p in base_primes(100) {
                    let l = f.lambda(p, 150).unwrap();
                    assert!(l.abs_le_mag(&bound), "k = {k}, p = {p}");
                }
            }
        }
    }

    #[test]
    fn squared_eigenvalue_identity_at_prime_squares() {
        // lambda(p)^2 - lambda(p^2) = 1 exactly.
        for k in [12u32, 24] {
            for f in eigenforms(k, 2600).unwrap() {
                for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
                    let guard = 160;
                    let sq = f.lambda_squared(p, guard).unwrap();
                    let at_sq = f.lambda(p * p, guard).unwrap();
                    let resid = sq.sub(&at_sq, guard).sub(&Ball::one(), guard);
                    assert!(resid.contains_zero(), "k = {k}, p = {p}");
                    assert!(resid.rad_f64() < 1e-30);
                }
            }
        }
    }

    #[test]
    fn numeric_mode_certifies_dimension_three() {
        let forms = eigenforms(36, 40).unwrap();
        assert_eq!(forms.len(), 3);
        let t2 = crate::modforms::hecke::hecke_operator_matrix(36, 2, 8).unwrap();
        let trace: BigInt = (0..3).map(|i| t2[i][i].clone()).sum();
        // Roots of the characteristic polynomial sum to the trace.
        let mut total = Ball::zero();
        for f in &forms {
            assert!(!f.is_exact());
            assert!(f.residual_bound().unwrap() < 1e-40);
            total = total.add(&f.coeff_ball(2, 260).unwrap(), 260);
        }
        let resid = total.sub(&Ball::from_bigint(&trace), 260);
        assert!(resid.contains_zero());
        assert!(resid.rad_f64() < 1e-40);
        // Embeddings are ordered and distinct.
        let mids: Vec<f64> = forms
            .iter()
            .map(|f| f.coeff_ball(2, 100).unwrap().mid_f64())
            .collect();
        assert!(mids[0] < mids[1] && mids[1] < mids[2]);
    }

    #[test]
    fn numeric_mode_dimension_four_residuals() {
        let forms = eigenforms(48, 20).unwrap();
        assert_eq!(forms.len(), 4);
        for f in &forms {
            assert!(f.residual_bound().unwrap() < 1e-40);
            let l2 = f.lambda(2, 200).unwrap();
            assert!(l2.abs_upper().to_f64() <= 2.0 + 1e-15);
        }
    }

    #[test]
    fn window_sum_matches_direct_expression() {
        let forms = eigenforms(12, 12).unwrap();
        let f = &forms[0];
        // Window (6, 10]: the only prime is 7.
        let got = window_eigen_sum(f, 10, 4.0, 150).unwrap();
        let want = f.lambda_squared(7, 150).unwrap();
        let diff = got.sub(&want, 150);
        assert!(diff.contains_zero());
        assert!(diff.rad_f64() < 1e-40);
        // Window (2, 5]: primes 3 and 5.
        let got = window_eigen_sum(f, 5, 3.0, 150).unwrap();
        let num = BigInt::from(252i64 * 252) * BigInt::from(5u64).pow(11)
            + BigInt::from(4830i64 * 4830) * BigInt::from(3u64).pow(11);
        let den = BigInt::from(15u64).pow(11);
        let want = Ball::from_ratio(&num, &den, 150).unwrap();
        let diff = got.sub(&want, 150);
        assert!(diff.contains_zero());
        assert!(diff.rad_f64() < 1e-40);
        // Empty window.
        let empty = window_eigen_sum(f, 8, 0.5, 100).unwrap();
        assert!(empty.is_exact() && empty.contains_zero());
        assert!(window_eigen_sum(f, 10, -1.0, 100).is_err());
    }

    #[test]
    fn csv_roundtrip_integer() {
        let f = &eigenforms(12, 50).unwrap()[0];
        let mut buf = Vec::new();
        export_eigenvalues(f, 50, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,a\n1,1\n2,-24\n"));
        let back = import_eigenvalues(&buf[..], 12).unwrap();
        for n in 1..=50usize {
            assert_eq!(back.coeff_int(n).unwrap(), f.coeff_int(n).unwrap());
        }
    }

    #[test]
    fn csv_roundtrip_quadratic() {
        let forms = eigenforms(24, 25).unwrap();
        for f in &forms {
            let mut buf = Vec::new();
            export_eigenvalues(f, 25, &mut buf).unwrap();
            let back = import_eigenvalues(&buf[..], 24).unwrap();
            assert_eq!(back.index(), f.index());
            let (EigenCoefficients::Quadratic(a), EigenCoefficients::Quadratic(b)) =
                (back.coefficients(), f.coefficients())
            else {
                panic!("expected quadratic data");
            };
            assert_eq!(&a[1..=25], &b[1..=25]);
        }
    }

    #[test]
    fn import_detects_a_corrupted_coefficient() {
        let f = &eigenforms(12, 12).unwrap()[0];
        let mut buf = Vec::new();
        export_eigenvalues(f, 12, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let corrupted = text.replace("2,-24", "2,-25");
        let err = import_eigenvalues(corrupted.as_bytes(), 12).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Validation(_)), "{msg}");
        assert!(msg.contains("a(2)") || msg.contains("p = 2"), "{msg}");
    }

    #[test]
    fn import_rejects_structural_faults() {
        assert!(matches!(
            import_eigenvalues("".as_bytes(), 12).unwrap_err(),
            Error::Format(_)
        ));
        assert!(matches!(
            import_eigenvalues("n,a\n".as_bytes(), 12).unwrap_err(),
            Error::Format(_)
        ));
        assert!(matches!(
            import_eigenvalues("n,a\n1,1\n3,252\n".as_bytes(), 12).unwrap_err(),
            Error::Format(_)
        ));
        assert!(matches!(
            import_eigenvalues("what,ever\n1,1\n".as_bytes(), 12).unwrap_err(),
            Error::Format(_)
        ));
        // A scaled (non-normalized) multiple is multiplicatively broken.
        let doubled = "n,a\n1,2\n2,-48\n";
        assert!(matches!(
            import_eigenvalues(doubled.as_bytes(), 12).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn characteristic_polynomial_matches_direct_expansion() {
        // 2x2 integer matrix: p(x) = x^2 - tr x + det.
        let m = vec![
            vec![BigInt::from(3), BigInt::from(-7)],
            vec![BigInt::from(2), BigInt::from(5)],
        ];
        let p = char_poly(&m).unwrap();
        assert_eq!(p, vec![BigInt::from(29), BigInt::from(-8), BigInt::from(1)]);
        // Known 3x3: diag(1, 2, 3) has p(x) = (x-1)(x-2)(x-3).
        let d3 = vec![
            vec![BigInt::from(1), BigInt::zero(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::from(2), BigInt::zero()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::from(3)],
        ];
        let p3 = char_poly(&d3).unwrap();
        assert_eq!(
            p3,
            vec![BigInt::from(-6), BigInt::from(11), BigInt::from(-6), BigInt::from(1)]
        );
    }

    #[test]
    fn root_isolation_on_a_known_polynomial() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6.
        let p = vec![BigInt::from(-6), BigInt::from(11), BigInt::from(-6), BigInt::from(1)];
        let intervals = isolate_real_roots(&p).unwrap();
        assert_eq!(intervals.len(), 3);
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            let ball = refine_root(&p, lo, hi, 80, 120).unwrap();
            let want = (i + 1) as f64;
            assert!(
                (ball.mid_f64() - want).abs() < 1e-20,
                "root {want}: interval ({}, {}], got {} rad {}",
                lo.to_rational(),
                hi.to_rational(),
                ball.mid_f64(),
                ball.rad_f64()
            );
        }
        // Repeated roots are rejected: (x-1)^2.
        let sq = vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)];
        assert!(isolate_real_roots(&sq).is_err());
    }
}
