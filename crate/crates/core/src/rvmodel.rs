//! The i.i.d. model for traces: each point of `P^1(F_q)` contributes `0` with
//! probability `(p-1)/(q+p-1)` and each `p`-th root of unity with probability
//! `q/(p(q+p-1))`. Distributions and moments are exact.

use crate::cyclo::{CyclotomicInt, CyclotomicRational};
use crate::error::{precondition, Result};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Exact masses on points of `Z[ζ_p]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    p: u32,
    entries: BTreeMap<CyclotomicInt, BigRational>,
    /// Number of summed variables, for model distributions.
    pub n_vars: Option<u32>,
}

impl Histogram {
    pub fn new(p: u32) -> Self {
        Histogram { p, entries: BTreeMap::new(), n_vars: None }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Adds `mass` at `key`; zero masses are not stored.
    pub fn add(&mut self, key: CyclotomicInt, mass: BigRational) {
        assert_eq!(key.p(), self.p, "histogram key has the wrong cyclotomic order");
        let e = self.entries.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += mass;
        if e.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, key: &CyclotomicInt) -> BigRational {
        self.entries.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<CyclotomicInt, BigRational> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |a, b| a + b)
    }

    /// Masses divided by the total.
    pub fn normalized(&self) -> Histogram {
        let t = self.total();
        Histogram {
            p: self.p,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v / &t)).collect(),
            n_vars: self.n_vars,
        }
    }

    /// Image under `s -> ζ^k s`.
    pub fn rotated(&self, k: u32) -> Histogram {
        Histogram {
            p: self.p,
            entries: self.entries.iter().map(|(s, v)| (s.mul_zeta_pow(k), v.clone())).collect(),
            n_vars: self.n_vars,
        }
    }

    /// Image under complex conjugation of the support.
    pub fn conjugated(&self) -> Histogram {
        Histogram {
            p: self.p,
            entries: self.entries.iter().map(|(s, v)| (s.conj(), v.clone())).collect(),
            n_vars: self.n_vars,
        }
    }

    /// Image under `s -> -s`.
    pub fn negated(&self) -> Histogram {
        Histogram {
            p: self.p,
            entries: self.entries.iter().map(|(s, v)| (-s, v.clone())).collect(),
            n_vars: self.n_vars,
        }
    }

    /// `Σ_s mass(s) s^j conj(s)^k`, unnormalized by the total.
    pub fn raw_moment(&self, j: u32, k: u32) -> CyclotomicRational {
        let mut acc = CyclotomicRational::zero(self.p);
        for (s, m) in &self.entries {
            let sb = s.to_big();
            let term = &sb.pow(j) * &sb.conj().pow(k);
            acc = &acc + &term.to_rational().scale(m);
        }
        acc
    }

    /// Largest `|s|` in the support.
    pub fn max_abs(&self) -> f64 {
        self.entries.keys().map(|s| s.to_complex().norm()).fold(0.0, f64::max)
    }
}

/// The single-point law and its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RVModel {
    pub q: u64,
    pub p: u32,
    pub prob_zero: BigRational,
    pub prob_root: BigRational,
}

impl RVModel {
    pub fn new(q: u64, p: u32) -> Result<RVModel> {
        precondition(crate::gf::is_prime(p as u64), || format!("p = {p} is not prime"))?;
        precondition(q >= 2, || "q must be at least 2".into())?;
        let den = BigInt::from(p as u64 * (q + p as u64 - 1));
        Ok(RVModel {
            q,
            p,
            prob_zero: BigRational::new(BigInt::from(p as u64 * (p as u64 - 1)), den.clone()),
            prob_root: BigRational::new(BigInt::from(q), den),
        })
    }

    /// `E[X^u conj(X)^v]` for a single variable.
    pub fn single_moment(&self, u: u32, v: u32) -> BigRational {
        if u == 0 && v == 0 {
            BigRational::one()
        } else if (u % self.p) == (v % self.p) {
            &self.prob_root * BigRational::from_integer(BigInt::from(self.p))
        } else {
            BigRational::zero()
        }
    }
}

/// Exact law of `X_1 + … + X_n`, by repeated convolution with integer weights.
pub fn sum_distribution(model: &RVModel, n: u32) -> Histogram {
    let p = model.p;
    let q = model.q;
    let w_zero = BigUint::from(p as u64 * (p as u64 - 1));
    let w_root = BigUint::from(q);
    let steps: Vec<CyclotomicInt> = (0..p).map(|e| CyclotomicInt::scalar(p, 1).mul_zeta_pow(e)).collect();
    let mut dist: BTreeMap<CyclotomicInt, BigUint> = BTreeMap::new();
    dist.insert(CyclotomicInt::zero(p), BigUint::one());
    for _ in 0..n {
        let mut next: BTreeMap<CyclotomicInt, BigUint> = BTreeMap::new();
        for (s, w) in &dist {
            *next.entry(s.clone()).or_default() += w * &w_zero;
            for st in &steps {
                *next.entry(s + st).or_default() += w * &w_root;
            }
        }
        dist = next;
    }
    let den = BigInt::from(BigUint::from(p as u64 * (q + p as u64 - 1)).pow(n));
    let mut h = Histogram::new(p);
    h.entries = dist.into_iter().map(|(k, w)| (k, BigRational::new(BigInt::from(w), den.clone()))).collect();
    h.n_vars = Some(n);
    h
}

/// A moment `E[S^j conj(S)^k] / scale^{(j+k)/2}`, with the square root kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedMoment {
    pub j: u32,
    pub k: u32,
    /// The unnormalized expectation.
    pub raw: CyclotomicRational,
    pub scale: u64,
}

impl NormalizedMoment {
    /// Exact value when it is rational: the expectation is a rational number and `j + k` is even.
    pub fn rational_value(&self) -> Option<BigRational> {
        if !self.raw.is_scalar() || (self.j + self.k) % 2 == 1 {
            return None;
        }
        let s = BigRational::from_integer(BigInt::from(self.scale));
        Some(&self.raw.coeffs()[0] / Pow::pow(s, (self.j + self.k) / 2))
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.raw.to_complex() / (self.scale as f64).powf((self.j + self.k) as f64 / 2.0)
    }
}

/// `E[(S/√n)^j (conj S/√n)^k]` for `S = X_1 + … + X_n`, by expanding one variable at a time.
pub fn model_mixed_moment(model: &RVModel, n: u32, j: u32, k: u32) -> NormalizedMoment {
    let (jj, kk) = (j as usize, k as usize);
    let binom = |a: usize, b: usize| -> BigRational {
        let mut c = BigInt::one();
        for i in 0..b {
            c = c * BigInt::from(a - i) / BigInt::from(i + 1);
        }
        BigRational::from_integer(c)
    };
    let single: Vec<Vec<BigRational>> =
        (0..=jj).map(|u| (0..=kk).map(|v| model.single_moment(u as u32, v as u32)).collect()).collect();
    // m[a][b] = E[S_t^a conj(S_t)^b]; the law is invariant under every ζ -> ζ^c
    // and under conjugation, so these stay rational.
    let mut m = vec![vec![BigRational::zero(); kk + 1]; jj + 1];
    m[0][0] = BigRational::one();
    for _ in 0..n {
        let mut next = vec![vec![BigRational::zero(); kk + 1]; jj + 1];
        for a in 0..=jj {
            for b in 0..=kk {
                let mut acc = BigRational::zero();
                for a2 in 0..=a {
                    for b2 in 0..=b {
                        let e = &single[a - a2][b - b2];
                        if e.is_zero() || m[a2][b2].is_zero() {
                            continue;
                        }
                        acc += binom(a, a2) * binom(b, b2) * &m[a2][b2] * e;
                    }
                }
                next[a][b] = acc;
            }
        }
        m = next;
    }
    NormalizedMoment { j, k, raw: CyclotomicRational::scalar(model.p, m[jj][kk].clone()), scale: n as u64 }
}

/// The same moment computed from the exact law of the sum.
pub fn histogram_mixed_moment(hist: &Histogram, scale: u64, j: u32, k: u32) -> NormalizedMoment {
    let total = hist.total();
    let raw = hist.raw_moment(j, k).map(|c| c / &total);
    NormalizedMoment { j, k, raw, scale }
}

/// `E[Z^j conj(Z)^k]` for a standard complex Gaussian: `k!` when `j = k`, else `0`.
pub fn gaussian_mixed_moment(j: u32, k: u32) -> BigUint {
    if j != k {
        return BigUint::zero();
    }
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

impl Histogram {
    /// Masses as floats, for rendering.
    pub fn to_f64_entries(&self) -> Vec<(CyclotomicInt, f64)> {
        self.entries.iter().map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(f64::NAN))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::rat;

    #[test]
    fn model_parameters() {
        let m = RVModel::new(7, 3).unwrap();
        assert_eq!(m.prob_zero, rat(2, 9));
        assert_eq!(m.prob_root, rat(7, 27));
        assert_eq!(&m.prob_zero + &m.prob_root * rat(3, 1), BigRational::one());
        let m = RVModel::new(7, 2).unwrap();
        assert_eq!(m.prob_zero, rat(1, 8));
        assert_eq!(m.prob_root, rat(7, 16));
    }

    #[test]
    fn small_sums() {
        let m = RVModel::new(7, 3).unwrap();
        let h0 = sum_distribution(&m, 0);
        assert_eq!(h0.len(), 1);
        assert_eq!(h0.get(&CyclotomicInt::zero(3)), BigRational::one());
        let h1 = sum_distribution(&m, 1);
        assert_eq!(h1.get(&CyclotomicInt::zero(3)), rat(2, 9));
        for e in 0..3 {
            assert_eq!(h1.get(&CyclotomicInt::scalar(3, 1).mul_zeta_pow(e)), rat(7, 27));
        }
    }

    /// Exhaustive sum over all outcome tuples.
    fn brute(m: &RVModel, n: u32) -> Histogram {
        let p = m.p;
        let outcomes: Vec<(CyclotomicInt, BigRational)> = std::iter::once((CyclotomicInt::zero(p), m.prob_zero.clone()))
            .chain((0..p).map(|e| (CyclotomicInt::scalar(p, 1).mul_zeta_pow(e), m.prob_root.clone())))
            .collect();
        let mut h = Histogram::new(p);
        let total = (p as usize + 1).pow(n);
        for mut code in 0..total {
            let mut s = CyclotomicInt::zero(p);
            let mut w = BigRational::one();
            for _ in 0..n {
                let (v, pr) = &outcomes[code % (p as usize + 1)];
                code /= p as usize + 1;
                s = &s + v;
                w *= pr;
            }
            h.add(s, w);
        }
        h
    }

    #[test]
    fn convolution_matches_enumeration() {
        for &(q, p, n) in &[(7u64, 3u32, 4u32), (5, 2, 6), (11, 5, 3)] {
            let m = RVModel::new(q, p).unwrap();
            let mut conv = sum_distribution(&m, n);
            conv.n_vars = None;
            assert_eq!(conv, brute(&m, n));
        }
    }

    #[test]
    fn moments_agree_across_methods() {
        let m = RVModel::new(7, 3).unwrap();
        let h = sum_distribution(&m, 3);
        for j in 0..=4 {
            for k in 0..=4 {
                let dp = model_mixed_moment(&m, 3, j, k);
                let hist = histogram_mixed_moment(&h, 3, j, k);
                assert_eq!(dp, hist, "j={j} k={k}");
                if (j as i64 - k as i64) % 3 != 0 {
                    assert!(dp.is_zero());
                }
            }
        }
        // Variance: E|S|^2 / n = q/(q+p-1).
        for n in 1..6 {
            assert_eq!(model_mixed_moment(&m, n, 1, 1).rational_value().unwrap(), rat(7, 9));
        }
    }

    #[test]
    fn gaussian_reference() {
        assert_eq!(gaussian_mixed_moment(1, 1), BigUint::from(1u32));
        assert_eq!(gaussian_mixed_moment(2, 1), BigUint::zero());
        assert_eq!(gaussian_mixed_moment(2, 2), BigUint::from(2u32));
        assert_eq!(gaussian_mixed_moment(3, 3), BigUint::from(6u32));
    }

    #[test]
    fn symmetries() {
        let m = RVModel::new(7, 3).unwrap();
        let a = sum_distribution(&m, 3);
        assert_eq!(a.total(), BigRational::one());
        assert_eq!(a.rotated(1), a);
        assert_eq!(a.conjugated(), a);
    }
}
