//! Frobenius traces of `Y^p = F(X)` via character sums, point counts over
//! extension fields, and recovery of the zeta numerator from point counts.

use crate::cyclo::CyclotomicInt;
use crate::enumerate::FactorTuple;
use crate::error::{precondition, Error, Result};
use crate::gf::{ExtensionField, FieldElement, FieldSpec, MultCharacter};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

fn check_character(tuple: &FactorTuple, chi: &MultCharacter) -> Result<()> {
    precondition(chi.order() == tuple.p(), || {
        format!("character of order {} used on a family with p = {}", chi.order(), tuple.p())
    })
}

/// `S(F) = Σ_{x ∈ F_q} χ(F(x))`, evaluated factor by factor.
pub fn affine_char_sum(field: &FieldSpec, tuple: &FactorTuple, chi: &MultCharacter) -> Result<CyclotomicInt> {
    check_character(tuple, chi)?;
    let p = chi.order();
    let mut counts = vec![0i64; p as usize];
    'x: for x in field.elements() {
        let mut e = 0u32;
        for (i, f) in tuple.factors().iter().enumerate() {
            match chi.eval(f.eval(field, x)) {
                None => continue 'x,
                Some(c) => e = (e + (i as u32 + 1) * c) % p,
            }
        }
        counts[e as usize] += 1;
    }
    Ok(CyclotomicInt::from_exponent_counts(p, &counts))
}

/// Whether `degrees` is `target` or `target` with one entry lowered by one;
/// returns `true` for the full target.
fn classify(degrees: &[usize], target: &[usize]) -> Result<bool> {
    if degrees == target {
        return Ok(true);
    }
    let dropped = degrees.len() == target.len()
        && degrees.iter().zip(target).filter(|(d, t)| d != t).count() == 1
        && degrees.iter().zip(target).all(|(&d, &t)| d == t || d + 1 == t);
    if dropped {
        Ok(false)
    } else {
        Err(Error::NotInFamily(format!("degrees {degrees:?} do not belong to component {target:?}")))
    }
}

/// Value of `αF` at infinity: the leading coefficient `α` when the degrees are
/// the full component type, and `0` for the degree-dropped variants.
pub fn infinity_value(tuple: &FactorTuple, alpha: FieldElement, target: &[usize]) -> Result<FieldElement> {
    Ok(if classify(&tuple.degrees(), target)? { alpha } else { FieldElement::ZERO })
}

/// `Ŝ(αF) = Σ_{x ∈ P^1(F_q)} χ(αF(x)) = χ(α)S(F) + χ(value at infinity)`.
pub fn projective_char_sum(
    field: &FieldSpec,
    tuple: &FactorTuple,
    alpha: FieldElement,
    chi: &MultCharacter,
    target: &[usize],
) -> Result<CyclotomicInt> {
    let a = chi.eval(alpha).ok_or_else(|| Error::Precondition("scale α must be nonzero".into()))?;
    let affine = affine_char_sum(field, tuple, chi)?.mul_zeta_pow(a);
    let inf = infinity_value(tuple, alpha, target)?;
    Ok(match chi.eval(inf) {
        Some(e) => &affine + &CyclotomicInt::scalar(chi.order(), 1).mul_zeta_pow(e),
        None => affine,
    })
}

/// Trace of Frobenius on the `χ`-part of `H^1`: `-Ŝ(αF)`.
pub fn frobenius_trace(
    field: &FieldSpec,
    tuple: &FactorTuple,
    alpha: FieldElement,
    chi: &MultCharacter,
    target: &[usize],
) -> Result<CyclotomicInt> {
    Ok(-projective_char_sum(field, tuple, alpha, chi, target)?)
}

/// Number of points of the smooth projective model of `Y^p = αF(X)` over the
/// extension field, counting `y^p = v` solutions in each fiber.
pub fn point_count_extension(
    field: &FieldSpec,
    ext: &ExtensionField,
    tuple: &FactorTuple,
    alpha: FieldElement,
) -> Result<u64> {
    precondition(!alpha.is_zero(), || "scale α must be nonzero".into())?;
    let p = tuple.p();
    let g = tuple.expand(field).scale(field, alpha);
    let big = ext.field();
    let coeffs: Vec<FieldElement> = g.coeffs().iter().map(|&c| ext.embed(c)).collect();
    let mut total = 0u64;
    for x in big.elements() {
        let v = coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| big.add(big.mul(acc, x), c));
        total += big.count_nth_roots(v, p) as u64;
    }
    let deg = g.degree().unwrap_or(0);
    total += if deg % p as usize == 0 { big.count_nth_roots(ext.embed(alpha), p) as u64 } else { 1 };
    Ok(total)
}

/// Point counts over `F_{q^n}` for `n = 1..=max_n`.
pub fn point_counts(field: &FieldSpec, tuple: &FactorTuple, alpha: FieldElement, max_n: u32) -> Result<Vec<u64>> {
    (1..=max_n).map(|n| point_count_extension(field, &field.extension(n)?, tuple, alpha)).collect()
}

/// The numerator `P_C(T)` of the zeta function and its reciprocal roots.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaData {
    pub q: u64,
    pub genus: u32,
    pub point_counts: Vec<u64>,
    /// `a_0, …, a_{2g}` with `P_C(T) = Σ a_i T^i`.
    pub p_coeffs: Vec<i128>,
    /// Reciprocal roots `α_j`, with multiplicity.
    pub roots: Vec<(f64, f64)>,
}

impl ZetaData {
    /// `max_j | |α_j| - √q |`.
    pub fn max_root_deviation(&self) -> f64 {
        let sq = (self.q as f64).sqrt();
        self.roots.iter().map(|&(re, im)| (re.hypot(im) - sq).abs()).fold(0.0, f64::max)
    }

    /// Trace of Frobenius on `H^1`, `q + 1 - N_1`.
    pub fn trace(&self) -> i128 {
        -self.p_coeffs.get(1).copied().unwrap_or(0)
    }
}

/// Recovers `P_C` from `N_1, …, N_{2g}` via Newton's identities and checks the
/// functional equation. Roots are located numerically.
pub fn zeta_from_counts(counts: &[u64], q: u64, g: u32) -> Result<ZetaData> {
    let two_g = 2 * g as usize;
    precondition(counts.len() == two_g, || format!("need {two_g} point counts, got {}", counts.len()))?;
    let qi = q as i128;
    let s: Vec<i128> = counts.iter().enumerate().map(|(i, &n)| qi.pow(i as u32 + 1) + 1 - n as i128).collect();
    let mut a = vec![0i128; two_g + 1];
    a[0] = 1;
    for i in 1..=two_g {
        let acc: i128 = (1..=i).map(|m| s[m - 1] * a[i - m]).sum();
        if acc % i as i128 != 0 {
            return Err(Error::Integrity(format!("Newton identity gives non-integral a_{i}")));
        }
        a[i] = -acc / i as i128;
    }
    for i in 0..=g as usize {
        if a[two_g - i] != qi.pow(g - i as u32) * a[i] {
            return Err(Error::Integrity(format!("functional equation fails at a_{}", two_g - i)));
        }
    }
    let roots = if g == 0 { Vec::new() } else { reciprocal_roots(&a)? };
    Ok(ZetaData {
        q,
        genus: g,
        point_counts: counts.to_vec(),
        p_coeffs: a,
        roots: roots.into_iter().map(|z| (z.re, z.im)).collect(),
    })
}

// Polynomials over Q, lowest degree first, trailing zeros stripped.
type QPoly = Vec<BigRational>;

fn qtrim(mut v: QPoly) -> QPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn qderiv(f: &QPoly) -> QPoly {
    qtrim(f.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

fn qdivrem(f: &QPoly, g: &QPoly) -> (QPoly, QPoly) {
    let mut r = f.clone();
    let dg = g.len() - 1;
    if r.len() <= dg {
        return (Vec::new(), r);
    }
    let lead = g[dg].clone();
    let mut quot = vec![BigRational::zero(); r.len() - dg];
    for k in (dg..r.len()).rev() {
        let c = &r[k] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, gj) in g.iter().enumerate() {
            let t = &c * gj;
            r[k - dg + j] -= t;
        }
        quot[k - dg] = c;
    }
    r.truncate(dg);
    (qtrim(quot), qtrim(r))
}

fn qmonic(f: QPoly) -> QPoly {
    let lead = f.last().cloned().unwrap_or_else(BigRational::one);
    f.into_iter().map(|c| c / &lead).collect()
}

fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = qdivrem(&a, &b);
        a = b;
        b = r;
    }
    qmonic(a)
}

/// Yun's square-free decomposition: `f = ∏ s_k^k` (monic, over Q).
fn squarefree_decomposition(f: &QPoly) -> Vec<(QPoly, usize)> {
    let f = qmonic(f.clone());
    let df = qderiv(&f);
    let mut a = qgcd(&f, &df);
    let mut b = qdivrem(&f, &a).0;
    let mut c = qdivrem(&df, &a).0;
    let mut d = qtrim(c.iter().zip(qderiv(&b).iter().chain(std::iter::repeat(&BigRational::zero()))).map(|(x, y)| x - y).collect());
    let mut out = Vec::new();
    let mut k = 1;
    while b.len() > 1 {
        a = qgcd(&b, &d);
        let bk = qdivrem(&b, &a).0;
        if a.len() > 1 {
            out.push((a.clone(), k));
        }
        b = bk;
        c = qdivrem(&d, &a).0;
        let db = qderiv(&b);
        let n = c.len().max(db.len());
        d = qtrim((0..n).map(|i| c.get(i).cloned().unwrap_or_default() - db.get(i).cloned().unwrap_or_default()).collect());
        k += 1;
    }
    out
}

fn eval_c(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
}

/// Roots of a monic square-free polynomial with float coefficients (lowest first).
fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let radius = 1.0 + coeffs[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = eval_c(&c, z[i]);
            let den = (0..n).filter(|&j| j != i).fold(Complex64::one(), |acc, j| acc * (z[i] - z[j]));
            let step = num / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    // Newton polish.
    let dc: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(i, &x)| x * i as f64).collect();
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = eval_c(&dc, *zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= eval_c(&c, *zi) / d;
        }
    }
    z
}

/// Reciprocal roots of `P(T) = Σ a_i T^i`, i.e. roots of `Σ a_i z^{2g-i}`.
fn reciprocal_roots(a: &[i128]) -> Result<Vec<Complex64>> {
    let rev: QPoly = a.iter().rev().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    let mut roots = Vec::new();
    for (factor, mult) in squarefree_decomposition(&rev) {
        let fl: Vec<f64> = factor.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        let rs = if fl.len() == 2 { vec![Complex64::new(-fl[0], 0.0)] } else { durand_kerner(&fl) };
        for r in rs {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    if roots.len() != a.len() - 1 {
        return Err(Error::Internal("root count mismatch in zeta numerator".into()));
    }
    Ok(roots)
}
