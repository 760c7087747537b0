//! Exact counts of polynomial families, asymptotic main terms, and the Euler
//! products `K` and `L_{r-1}`.
//!
//! Counts are exact big integers. Main terms are exact rationals, except that a
//! factor `K` or `L_{r-1}` is carried as an [`EulerProduct`]: its per-degree
//! factors and multiplicities are exact, but the multiplicities grow like `q^n/n`,
//! so the numeric value is produced in floating point together with a rigorous
//! bound on the omitted tail.

use crate::enumerate::{count_irreducibles, irreducible_polys, Family, TableCache, TupleRef, TupleVisitor};
use crate::error::{precondition, Error, Result};
use crate::gf::{FieldElement, FieldSpec, MultCharacter};
use crate::poly::DensePoly;
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `q^e` for any integer `e`.
pub(crate) fn q_pow(q: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        Pow::pow(base, e as u32)
    } else {
        Pow::pow(base.recip(), (-e) as u32)
    }
}

pub(crate) fn binomial(n: &BigUint, k: u32) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// `ζ_q(s) = (1 - q^{1-s})^{-1}` for `s ≥ 2`.
pub fn zeta_q_at(q: u64, s: u32) -> Result<BigRational> {
    if s == 1 {
        return Err(Error::Pole);
    }
    precondition(s >= 2, || format!("zeta_q(s) needs s >= 2, got {s}"))?;
    Ok((BigRational::one() - q_pow(q, 1 - s as i64)).recip())
}

/// Number of monic square-free polynomials of degree `d`.
pub fn exact_count_squarefree(q: u64, d: u32) -> BigUint {
    let qd = BigUint::from(q).pow(d);
    if d <= 1 {
        qd
    } else {
        &qd - &qd / BigUint::from(q)
    }
}

/// Number of square-free polynomials of degree exactly `d`, any nonzero leading coefficient.
pub fn exact_count_squarefree_nonmonic(q: u64, d: u32) -> BigUint {
    BigUint::from(q - 1) * exact_count_squarefree(q, d)
}

/// Number of monic polynomials of degree `d` taking prescribed values at `ℓ` distinct points.
pub fn exact_count_monic_prescribed(q: u64, d: u32, ell: u32) -> Result<BigUint> {
    precondition(ell <= d && ell as u64 <= q, || format!("need ℓ ≤ min(d, q); got ℓ = {ell}, d = {d}, q = {q}"))?;
    Ok(BigUint::from(q).pow(d - ell))
}

/// Distinct monic irreducible divisors of a nonzero polynomial, by trial division.
pub fn irreducible_divisors(field: &FieldSpec, u: &DensePoly) -> Result<Vec<DensePoly>> {
    let deg = u.degree().ok_or(Error::ZeroPolynomial)?;
    let mut rest = u.monic(field);
    let mut out = Vec::new();
    for p in irreducible_polys(field, deg) {
        if rest.degree() == Some(0) {
            break;
        }
        if p.degree() > rest.degree() {
            break;
        }
        let mut hit = false;
        loop {
            let (quot, rem) = rest.div_rem(field, &p)?;
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            hit = true;
        }
        if hit {
            out.push(p);
        }
    }
    Ok(out)
}

fn check_prescriptions(field: &FieldSpec, u: &DensePoly, points: &[(FieldElement, FieldElement)]) -> Result<()> {
    precondition(points.len() <= field.order() as usize, || "more prescribed points than field elements".into())?;
    for (i, &(x, a)) in points.iter().enumerate() {
        precondition(!a.is_zero(), || format!("prescribed value at point {} must be nonzero", x.0))?;
        precondition(points[..i].iter().all(|&(y, _)| y != x), || "prescribed points must be distinct".into())?;
        precondition(!u.eval(field, x).is_zero(), || format!("prescribed point {} is a root of U", x.0))?;
    }
    Ok(())
}

/// Number of monic `F` of degree `d` coprime to `U` with `F(x_i) = a_i` for the
/// given points (values nonzero, points not roots of `U`).
///
/// Requires `d ≥ ℓ + deg rad(U)`; below that the closed form is not an integer in general.
pub fn exact_count_coprime_prescribed(
    field: &FieldSpec,
    d: u32,
    u: &DensePoly,
    points: &[(FieldElement, FieldElement)],
) -> Result<BigUint> {
    check_prescriptions(field, u, points)?;
    let divisors = irreducible_divisors(field, u)?;
    let rad: usize = divisors.iter().map(|p| p.degree().unwrap()).sum();
    let ell = points.len() as u32;
    precondition(d as usize >= ell as usize + rad, || {
        format!("need d ≥ ℓ + deg rad(U) = {}, got d = {d}", ell as usize + rad)
    })?;
    let q = field.order() as u64;
    let mut acc = BigRational::from_integer(BigUint::from(q).pow(d - ell).into());
    for p in &divisors {
        acc *= BigRational::one() - q_pow(q, -(p.degree().unwrap() as i64));
    }
    rational_to_count(&acc)
}

fn rational_to_count(r: &BigRational) -> Result<BigUint> {
    if !r.is_integer() {
        return Err(Error::Internal(format!("count {r} is not an integer")));
    }
    r.to_integer().to_biguint().ok_or_else(|| Error::Internal("negative count".into()))
}

/// Coefficients of a product of power series in `r` variables, truncated at `dims[i]`
/// in variable `i`.
#[derive(Clone, Debug)]
struct TruncatedSeries {
    dims: Vec<usize>,
    coeffs: Vec<BigUint>,
}

impl TruncatedSeries {
    fn one(dims: &[usize]) -> Self {
        let size = dims.iter().map(|d| d + 1).product();
        let mut coeffs = vec![BigUint::zero(); size];
        coeffs[0] = BigUint::one();
        TruncatedSeries { dims: dims.to_vec(), coeffs }
    }

    fn zero(dims: &[usize]) -> Self {
        let size = dims.iter().map(|d| d + 1).product();
        TruncatedSeries { dims: dims.to_vec(), coeffs: vec![BigUint::zero(); size] }
    }

    fn unflatten(&self, mut i: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let e = i % (d + 1);
                i /= d + 1;
                e
            })
            .collect()
    }

    fn flatten(&self, e: &[usize]) -> Option<usize> {
        let mut idx = 0;
        let mut stride = 1;
        for (&x, &d) in e.iter().zip(&self.dims) {
            if x > d {
                return None;
            }
            idx += x * stride;
            stride *= d + 1;
        }
        Some(idx)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.dims);
        let nz: Vec<(Vec<usize>, &BigUint)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (other.unflatten(j), c))
            .collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = self.unflatten(i);
            for (ej, b) in &nz {
                let sum: Vec<usize> = ei.iter().zip(ej).map(|(x, y)| x + y).collect();
                if let Some(k) = out.flatten(&sum) {
                    out.coeffs[k] += a * *b;
                }
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn get(&self, e: &[usize]) -> BigUint {
        self.flatten(e).map(|i| self.coeffs[i].clone()).unwrap_or_default()
    }
}

/// `∏_{n ≥ n_min} (1 + Σ_i u_i^n)^{I_n}`, truncated at `dims`.
fn squarefree_tuple_series(q: u64, dims: &[usize], n_min: usize) -> TruncatedSeries {
    let max_d = dims.iter().copied().max().unwrap_or(0);
    let mut acc = TruncatedSeries::one(dims);
    for n in n_min.max(1)..=max_d {
        let inn = count_irreducibles(q, n as u32);
        let mut y = TruncatedSeries::zero(dims);
        for i in 0..dims.len() {
            let mut e = vec![0; dims.len()];
            e[i] = n;
            if let Some(k) = y.flatten(&e) {
                y.coeffs[k] = BigUint::one();
            }
        }
        let mut factor = TruncatedSeries::one(dims);
        let mut ypow = TruncatedSeries::one(dims);
        for k in 1u32.. {
            ypow = ypow.mul(&y);
            if ypow.is_zero() {
                break;
            }
            let c = binomial(&inn, k);
            if c.is_zero() {
                break;
            }
            for (f, t) in factor.coeffs.iter_mut().zip(&ypow.coeffs) {
                *f += &c * t;
            }
        }
        acc = acc.mul(&factor);
    }
    acc
}

/// `|F_{(d_1,…,d_r)}|`: tuples of monic, square-free, pairwise coprime polynomials
/// of the given degrees, counted from the generating function over irreducibles.
pub fn exact_count_factor_tuples(q: u64, degrees: &[usize]) -> BigUint {
    squarefree_tuple_series(q, degrees, 1).get(degrees)
}

/// Number of monic square-free polynomials of degree `d` with exactly `k` roots in `F_q`.
pub fn exact_count_squarefree_k_roots(q: u64, d: usize, k: usize) -> BigUint {
    if k > d || k as u64 > q {
        return BigUint::zero();
    }
    let rest = squarefree_tuple_series(q, &[d - k], 2).get(&[d - k]);
    binomial(&BigUint::from(q), k as u32) * rest
}

/// Which counting statement a [`MainTermPrediction`] instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statement {
    /// Square-free `F` of degree `d` with `ℓ` nonzero and `m` zero prescribed values.
    SquarefreePrescribed,
    /// Square-free `F` of degree `d` with exactly `k` roots.
    SquarefreeKRoots,
    /// Square-free `F` coprime to `U` with prescribed nonzero values.
    SquarefreeCoprimePrescribed,
    /// Tuple family with `ℓ` nonzero and `m` zero prescribed values.
    ComponentPrescribed,
    /// Probability of a prescribed character-value pattern at all of `F_q`.
    CharacterPattern,
}

/// A term `O(q^{exponent + eps·ε})` of the relative error `count/main - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerm {
    pub exponent: Rational64,
    pub eps: Rational64,
}

impl ErrorTerm {
    fn new(exponent: Rational64) -> Self {
        ErrorTerm { exponent, eps: Rational64::zero() }
    }

    fn with_eps(exponent: Rational64, eps: Rational64) -> Self {
        ErrorTerm { exponent, eps }
    }
}

/// A truncated Euler product `∏_{j} ∏_{deg P ≤ N} (1 - j/((|P|+1)(|P|+j)))`
/// over `j = 1..=r-1`; `r = 2` gives `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub q: u64,
    pub r: u32,
    pub trunc_degree: u32,
    /// Number of monic irreducibles of each degree `1..=trunc_degree`.
    pub multiplicities: Vec<BigUint>,
    /// Natural log of the partial product.
    pub log_partial: f64,
    /// Upper bound on `-log(full/partial)`; the full product lies in
    /// `[partial·exp(-tail_log_bound), partial]`.
    pub tail_log_bound: f64,
}

impl EulerProduct {
    /// Exact factor contributed by one irreducible of degree `n` for index `j`.
    pub fn factor(q: u64, n: u32, j: u32) -> BigRational {
        let big_q = BigInt::from(q).pow(n);
        let one = BigInt::one();
        let den = (&big_q + &one) * (&big_q + BigInt::from(j));
        BigRational::one() - BigRational::new(BigInt::from(j), den)
    }

    fn build(q: u64, r: u32, trunc: u32) -> Result<EulerProduct> {
        precondition(trunc >= 1, || "truncation degree must be at least 1".into())?;
        precondition(r >= 2, || "Euler product index r must be at least 2".into())?;
        precondition(q >= 2, || "q must be at least 2".into())?;
        let multiplicities: Vec<BigUint> = (1..=trunc).map(|n| count_irreducibles(q, n)).collect();
        let mut log_partial = 0.0;
        for (n, mult) in (1..=trunc).zip(&multiplicities) {
            let big_q = (q as f64).powi(n as i32);
            let m = mult.to_f64().unwrap_or(f64::INFINITY);
            for j in 1..r {
                let x = j as f64 / ((big_q + 1.0) * (big_q + j as f64));
                log_partial += m * (-x).ln_1p();
            }
        }
        // Each omitted factor is 1 - x with 0 < x < j q^{-2n}; -ln(1-x) ≤ x/(1-x),
        // and there are at most q^n/n irreducibles of degree n.
        let qf = q as f64;
        let jsum = (r * (r - 1) / 2) as f64;
        let n1 = (trunc + 1) as f64;
        let worst_x = (r - 1) as f64 * qf.powf(-2.0 * n1);
        let tail_log_bound = jsum * qf.powf(-(trunc as f64)) / (n1 * (qf - 1.0)) / (1.0 - worst_x);
        Ok(EulerProduct { q, r, trunc_degree: trunc, multiplicities, log_partial, tail_log_bound })
    }

    /// The partial product over irreducibles of degree at most `trunc_degree`.
    pub fn partial(&self) -> f64 {
        self.log_partial.exp()
    }

    /// Rigorous lower bound on the full infinite product.
    pub fn lower_bound(&self) -> f64 {
        (self.log_partial - self.tail_log_bound).exp()
    }

    /// Per-degree exact factors `(∏_j factor(q, n, j))` for `n = 1..=trunc_degree`.
    pub fn degree_factors(&self) -> Vec<BigRational> {
        (1..=self.trunc_degree)
            .map(|n| (1..self.r).fold(BigRational::one(), |acc, j| acc * Self::factor(self.q, n, j)))
            .collect()
    }

    /// The partial product as an exact rational, when the total number of
    /// irreducibles involved is at most `max_multiplicity`.
    pub fn exact_partial(&self, max_multiplicity: u64) -> Option<BigRational> {
        let total: BigUint = self.multiplicities.iter().sum();
        if total > BigUint::from(max_multiplicity) {
            return None;
        }
        let mut acc = BigRational::one();
        for (f, m) in self.degree_factors().into_iter().zip(&self.multiplicities) {
            acc *= Pow::pow(f, m.to_u32()?);
        }
        Some(acc)
    }
}

/// `K = ∏_P (1 - 1/(|P|+1)^2)` truncated at degree `trunc_degree`.
pub fn euler_constant_k(q: u64, trunc_degree: u32) -> Result<EulerProduct> {
    EulerProduct::build(q, 2, trunc_degree)
}

/// `L_{r-1} = ∏_{j=1}^{r-1} ∏_P (1 - j/((|P|+1)(|P|+j)))` truncated at degree `trunc_degree`.
pub fn euler_constant_l(q: u64, r: u32, trunc_degree: u32) -> Result<EulerProduct> {
    EulerProduct::build(q, r, trunc_degree)
}

/// An asymptotic main term: `rational × euler` (when an Euler constant is present)
/// with the exponents of the relative error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainTermPrediction {
    pub statement: Statement,
    pub rational: BigRational,
    pub euler: Option<EulerProduct>,
    pub error_terms: Vec<ErrorTerm>,
}

impl MainTermPrediction {
    /// The main term as a float, using the truncated Euler product.
    pub fn value(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        match &self.euler {
            Some(e) => r * e.partial(),
            None => r,
        }
    }

    /// The exact main term when no Euler constant is involved.
    pub fn exact(&self) -> Option<&BigRational> {
        self.euler.is_none().then_some(&self.rational)
    }

    /// `observed / main - 1`.
    pub fn relative_error(&self, observed: &BigUint) -> f64 {
        match &self.euler {
            None => {
                let obs = BigRational::from_integer(BigInt::from(observed.clone()));
                (obs / &self.rational - BigRational::one()).to_f64().unwrap_or(f64::NAN)
            }
            Some(_) => observed.to_f64().unwrap_or(f64::NAN) / self.value() - 1.0,
        }
    }

    /// Largest error exponent with `ε = 0`.
    pub fn leading_error_exponent(&self) -> Option<Rational64> {
        self.error_terms.iter().map(|t| t.exponent).max()
    }
}

fn r64(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Main term for square-free `F` of degree `d` with `ℓ` nonzero and `m` zero prescribed values.
pub fn main_term_squarefree_prescribed(q: u64, d: u32, ell: u32, m: u32) -> Result<MainTermPrediction> {
    precondition((ell + m) as u64 <= q, || format!("ℓ + m = {} exceeds q = {q}", ell + m))?;
    let one = BigRational::one();
    let qinv = q_pow(q, -1);
    let qinv2 = q_pow(q, -2);
    let num = Pow::pow(&one - &qinv, m) * q_pow(q, d as i64 - (m + ell) as i64);
    let den = zeta_q_at(q, 2)? * Pow::pow(&one - &qinv2, m + ell);
    Ok(MainTermPrediction {
        statement: Statement::SquarefreePrescribed,
        rational: num / den,
        euler: None,
        error_terms: vec![ErrorTerm::new(Rational64::new(3 * m as i64 + 2 * ell as i64 - d as i64, 2))],
    })
}

/// Main term for square-free `F` of degree `d` with exactly `k` roots in `F_q`.
pub fn main_term_squarefree_k_roots(q: u64, d: u32, k: u32) -> Result<MainTermPrediction> {
    precondition(k as u64 <= q, || format!("k = {k} exceeds q = {q}"))?;
    let binom = BigRational::from_integer(binomial(&BigUint::from(q), k).into());
    let den = zeta_q_at(q, 2)? * Pow::pow(BigRational::one() + q_pow(q, -1), q as u32);
    Ok(MainTermPrediction {
        statement: Statement::SquarefreeKRoots,
        rational: binom * q_pow(q, d as i64 - k as i64) / den,
        euler: None,
        error_terms: vec![ErrorTerm::new(Rational64::new(k as i64 + 2 * q as i64 - d as i64, 2))],
    })
}

/// Main term for square-free `F` of degree `d`, coprime to `U`, with prescribed nonzero values.
pub fn main_term_squarefree_coprime_prescribed(
    field: &FieldSpec,
    d: u32,
    u: &DensePoly,
    points: &[(FieldElement, FieldElement)],
) -> Result<MainTermPrediction> {
    check_prescriptions(field, u, points)?;
    let q = field.order() as u64;
    let ell = points.len() as u32;
    let mut main = q_pow(q, d as i64 - ell as i64)
        / (zeta_q_at(q, 2)? * Pow::pow(BigRational::one() - q_pow(q, -2), ell));
    for p in irreducible_divisors(field, u)? {
        main /= BigRational::one() + q_pow(q, -(p.degree().unwrap() as i64));
    }
    // The absolute error O(q^{d/2}) relative to a main term of size q^{d-ℓ}.
    Ok(MainTermPrediction {
        statement: Statement::SquarefreeCoprimePrescribed,
        rational: main,
        euler: None,
        error_terms: vec![ErrorTerm::new(Rational64::new(2 * ell as i64 - d as i64, 2))],
    })
}

/// Main term for tuples in `F_{(d_1,…,d_r)}` with `ℓ` nonzero and `m` zero
/// prescribed values (summed over how the zeros are distributed among the factors).
pub fn main_term_component_prescribed(
    q: u64,
    degrees: &[u32],
    ell: u32,
    m: u32,
    trunc_degree: u32,
) -> Result<MainTermPrediction> {
    let r = degrees.len() as u32;
    precondition(r >= 2, || "need at least two factor degrees".into())?;
    precondition((ell + m) as u64 <= q, || format!("ℓ + m = {} exceeds q = {q}", ell + m))?;
    let total: u32 = degrees.iter().sum();
    let zeta2 = zeta_q_at(q, 2)?;
    let (qi, ri) = (q as i64, r as i64);
    let rational = q_pow(q, total as i64) / Pow::pow(zeta2, r)
        * Pow::pow(rat(ri, qi + ri), m)
        * Pow::pow(rat(qi, (qi + ri) * (qi - 1)), ell);
    let (mi, li) = (m as i64, ell as i64);
    let mut error_terms: Vec<ErrorTerm> = degrees[1..]
        .iter()
        .map(|&dj| {
            let dj = dj as i64;
            ErrorTerm::with_eps(r64(mi - dj), r64(dj - mi + li + mi))
        })
        .collect();
    error_terms.push(ErrorTerm::new(Rational64::new(mi - degrees[0] as i64, 2) + r64(li + mi)));
    Ok(MainTermPrediction {
        statement: Statement::ComponentPrescribed,
        rational,
        euler: Some(euler_constant_l(q, r, trunc_degree)?),
        error_terms,
    })
}

/// Probability that `χ(F(x))` matches a prescribed pattern at every `x ∈ F_q`,
/// with `m` of the prescribed values zero and the rest `p`-th roots of unity.
pub fn main_term_char_prescribed(q: u64, p: u32, degrees: &[u32], m: u32) -> Result<MainTermPrediction> {
    if (q - 1) % p as u64 != 0 {
        return Err(Error::CharacterOrder { q: q as u32, order: p });
    }
    precondition(m as u64 <= q, || format!("m = {m} exceeds q = {q}"))?;
    precondition(degrees.len() == p as usize - 1, || "need p - 1 factor degrees".into())?;
    let (qi, pi) = (q as i64, p as i64);
    let rational = Pow::pow(rat(pi - 1, qi + pi - 1), m) * Pow::pow(rat(qi, pi * (qi + pi - 1)), q as u32 - m);
    let mi = m as i64;
    let mut error_terms: Vec<ErrorTerm> = degrees[1..]
        .iter()
        .map(|&dj| ErrorTerm::with_eps(r64(mi - dj as i64), r64(qi - mi + dj as i64)))
        .collect();
    error_terms.push(ErrorTerm::new(Rational64::new(mi - degrees[0] as i64, 2) + r64(qi)));
    Ok(MainTermPrediction { statement: Statement::CharacterPattern, rational, euler: None, error_terms })
}

/// Number of `(p-1)`-tuples of nonzero residues mod `(X-t)^2` with no two
/// divisible by `X - t`.
pub fn residue_tuple_count(q: u64, p: u32) -> BigUint {
    let qb = BigUint::from(q);
    qb.pow(p - 2) * BigUint::from(q - 1).pow(p - 1) * BigUint::from(q + p as u64 - 1)
}

/// Result of the exhaustive residue-tuple census at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCensus {
    /// Number of admissible tuples.
    pub total: u64,
    /// `value_counts[a]`: admissible tuples with `∏ F_i(t)^i = a`, indexed by element.
    pub value_counts: Vec<u64>,
}

/// Exhaustive census of residue tuples mod `(X - t)^2`, each residue written
/// `c_0 + c_1 X` and evaluated at `t` with field arithmetic.
pub fn brute_residue_tuple_count(field: &FieldSpec, p: u32, t: FieldElement) -> Result<ResidueCensus> {
    precondition(p >= 2, || "p must be at least 2".into())?;
    let q = field.order() as usize;
    // Value at t of every nonzero residue.
    let mut vals = Vec::with_capacity(q * q - 1);
    for c0 in field.elements() {
        for c1 in field.elements() {
            if c0.is_zero() && c1.is_zero() {
                continue;
            }
            vals.push(field.add(c0, field.mul(c1, t)));
        }
    }
    let r = p as usize - 1;
    // pows[i][k] = vals[k]^(i+1)
    let pows: Vec<Vec<FieldElement>> =
        (0..r).map(|i| vals.iter().map(|&v| field.pow(v, i as u64 + 1)).collect()).collect();
    let mut census = ResidueCensus { total: 0, value_counts: vec![0u64; q] };
    residue_walk(field, &pows, 0, FieldElement::ONE, 0, &mut census);
    Ok(census)
}

/// Every residue tuple from `level` on, with at most one residue divisible by `X - t`.
fn residue_walk(
    field: &FieldSpec,
    pows: &[Vec<FieldElement>],
    level: usize,
    prod: FieldElement,
    zeros: usize,
    census: &mut ResidueCensus,
) {
    if level == pows.len() {
        census.total += 1;
        census.value_counts[prod.0 as usize] += 1;
        return;
    }
    for &v in &pows[level] {
        let z = zeros + v.is_zero() as usize;
        if z <= 1 {
            residue_walk(field, pows, level + 1, field.mul(prod, v), z, census);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCensus {
    pub total: u64,
    /// `counts[x][a]`: tuples with `F(x) = a`, both indexed by element.
    pub counts: Vec<Vec<u64>>,
}

struct ValueVisitor<'a> {
    field: &'a FieldSpec,
    census: ValueCensus,
}

impl TupleVisitor for ValueVisitor<'_> {
    fn visit(&mut self, t: &TupleRef<'_>) {
        self.census.total += 1;
        for (x, row) in self.census.counts.iter_mut().enumerate() {
            row[product_value(self.field, t, x).0 as usize] += 1;
        }
    }

    fn merge(&mut self, other: Self) {
        self.census.total += other.census.total;
        for (a, b) in self.census.counts.iter_mut().zip(other.census.counts) {
            a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
        }
    }
}

fn product_value(field: &FieldSpec, t: &TupleRef<'_>, x: usize) -> FieldElement {
    (0..t.len()).fold(FieldElement::ONE, |acc, i| {
        field.mul(acc, field.pow(FieldElement(t.factor_values(i)[x] as u32), i as u64 + 1))
    })
}

/// Enumerates `F_{(d_1,…,d_r)}` and tallies every value at every point.
pub fn brute_value_census(
    field: &FieldSpec,
    p: u32,
    degrees: &[usize],
    cache: &TableCache,
    workers: usize,
) -> Result<ValueCensus> {
    let q = field.order() as usize;
    let fam = Family::new(field, p, degrees, cache)?;
    let v = fam.run(workers, || ValueVisitor {
        field,
        census: ValueCensus { total: 0, counts: vec![vec![0; q]; q] },
    })?;
    Ok(v.census)
}

/// Largest `|count(x, a) / main - 1|` over points `x` and nonzero values `a`.
pub fn value_census_max_error(census: &ValueCensus, main: &MainTermPrediction) -> f64 {
    let m = main.value();
    census
        .counts
        .iter()
        .flat_map(|row| row.iter().skip(1))
        .map(|&c| (c as f64 / m - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Largest pattern table [`brute_pattern_census`] will allocate.
pub const MAX_PATTERNS: u64 = 1 << 24;

struct PatternVisitor<'a> {
    log: &'a [u32],
    p: u32,
    counts: Vec<u64>,
}

impl TupleVisitor for PatternVisitor<'_> {
    fn visit(&mut self, t: &TupleRef<'_>) {
        let q = t.factor_values(0).len();
        let base = self.p as usize + 1;
        let mut code = 0usize;
        for x in (0..q).rev() {
            let mut e = 0u32;
            let mut digit = 0;
            for i in 0..t.len() {
                let v = t.factor_values(i)[x];
                if v == 0 {
                    digit = 0;
                    break;
                }
                e += (i as u32 + 1) * self.log[v as usize];
                digit = 1 + (e % self.p) as usize;
            }
            code = code * base + digit;
        }
        self.counts[code] += 1;
    }

    fn merge(&mut self, other: Self) {
        self.counts.iter_mut().zip(other.counts).for_each(|(a, b)| *a += b);
    }
}

/// Counts of `χ`-value patterns `(χ(F(x)))_{x ∈ F_q}` over a tuple family. Patterns
/// are coded in base `p+1` with digit `0` for `F(x) = 0` and `1+e` for `ζ^e`,
/// element `0` in the lowest digit.
pub fn brute_pattern_census(
    field: &FieldSpec,
    chi: &MultCharacter,
    degrees: &[usize],
    cache: &TableCache,
    workers: usize,
) -> Result<Vec<u64>> {
    let p = chi.order();
    let size = (p as u64 + 1).checked_pow(field.order()).filter(|&n| n <= MAX_PATTERNS);
    let size = size.ok_or_else(|| Error::Precondition(format!("(p+1)^q patterns exceed {MAX_PATTERNS}")))?;
    let log: Vec<u32> = field.elements().map(|x| chi.eval(x).unwrap_or(0)).collect();
    let fam = Family::new(field, p, degrees, cache)?;
    let v = fam.run(workers, || PatternVisitor { log: &log, p, counts: vec![0; size as usize] })?;
    Ok(v.counts)
}

/// Total variation distance between the pattern census and the main-term pattern
/// probabilities of [`main_term_char_prescribed`].
pub fn pattern_census_tv(census: &[u64], q: u64, p: u32, degrees: &[u32]) -> Result<BigRational> {
    let total: u64 = census.iter().sum();
    precondition(total > 0, || "empty pattern census".into())?;
    let probs = (0..=q as u32)
        .map(|m| main_term_char_prescribed(q, p, degrees, m).map(|mt| mt.rational))
        .collect::<Result<Vec<_>>>()?;
    let base = p as usize + 1;
    let total = BigRational::from_integer(BigInt::from(total));
    let mut acc = BigRational::zero();
    for (code, &c) in census.iter().enumerate() {
        let mut zeros = 0;
        let mut r = code;
        for _ in 0..q {
            zeros += (r % base == 0) as usize;
            r /= base;
        }
        let emp = BigRational::from_integer(BigInt::from(c)) / &total;
        let d = emp - &probs[zeros];
        acc += if d < BigRational::zero() { -d } else { d };
    }
    Ok(acc / BigRational::from_integer(BigInt::from(2)))
}
