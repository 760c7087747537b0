//! Elements of the cyclotomic ring `Z[ζ_p]` (and its extension to rational
//! coefficients), in the power basis `1, ζ, …, ζ^{p-2}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Element of `R[ζ_p]` for a coefficient ring `R`, with `p` prime.
///
/// For `p = 2` the basis is just `{1}`; for `p = 3`, `a + bω`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cyclotomic<T> {
    p: u32,
    coeffs: Vec<T>,
}

pub type CyclotomicInt = Cyclotomic<i64>;
pub type CyclotomicBig = Cyclotomic<BigInt>;
pub type CyclotomicRational = Cyclotomic<BigRational>;

/// Ring operations needed for coefficients.
pub trait Coeff:
    Clone + Zero + One + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}
impl<T> Coeff for T where
    T: Clone + Zero + One + PartialEq + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

fn width(p: u32) -> usize {
    (p as usize - 1).max(1)
}

impl<T: Coeff> Cyclotomic<T> {
    pub fn zero(p: u32) -> Self {
        assert!(p >= 2, "cyclotomic order must be at least 2");
        Cyclotomic { p, coeffs: vec![T::zero(); width(p)] }
    }

    /// Builds an element from power-basis coordinates; shorter vectors are zero-padded.
    pub fn from_coeffs(p: u32, mut coeffs: Vec<T>) -> Self {
        assert!(coeffs.len() <= width(p), "too many coordinates for Z[ζ_{p}]");
        coeffs.resize(width(p), T::zero());
        Cyclotomic { p, coeffs }
    }

    /// `Σ_e n_e ζ^e` for exponents `e` in `0..p`, reducing `ζ^{p-1} = -Σ_{i<p-1} ζ^i`.
    pub fn from_exponent_counts(p: u32, counts: &[T]) -> Self {
        assert_eq!(counts.len(), p as usize);
        if p == 2 {
            return Cyclotomic { p, coeffs: vec![counts[0].clone() - counts[1].clone()] };
        }
        let top = counts[p as usize - 1].clone();
        let coeffs = counts[..p as usize - 1].iter().map(|c| c.clone() - top.clone()).collect();
        Cyclotomic { p, coeffs }
    }

    /// The rational integer (or scalar) `c`.
    pub fn scalar(p: u32, c: T) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = c;
        z
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when the element lies in the coefficient ring itself.
    pub fn is_scalar(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    // Fold a vector of coefficients indexed by exponent mod p into the power basis.
    fn reduce(p: u32, mut full: Vec<T>) -> Self {
        debug_assert_eq!(full.len(), p as usize);
        if p == 2 {
            let c = full[0].clone() - full[1].clone();
            return Cyclotomic { p, coeffs: vec![c] };
        }
        let top = full.pop().unwrap();
        let coeffs = full.into_iter().map(|c| c - top.clone()).collect();
        Cyclotomic { p, coeffs }
    }

    fn expand(&self) -> Vec<T> {
        let mut full = vec![T::zero(); self.p as usize];
        if self.p == 2 {
            full[0] = self.coeffs[0].clone();
        } else {
            full[..self.coeffs.len()].clone_from_slice(&self.coeffs);
        }
        full
    }

    /// Multiplication by `ζ^k`.
    pub fn mul_zeta_pow(&self, k: u32) -> Self {
        let p = self.p as usize;
        let src = self.expand();
        let mut full = vec![T::zero(); p];
        for (i, c) in src.into_iter().enumerate() {
            full[(i + k as usize) % p] = c;
        }
        Self::reduce(self.p, full)
    }

    /// Complex conjugation `ζ -> ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let src = self.expand();
        let mut full = vec![T::zero(); p];
        for (i, c) in src.into_iter().enumerate() {
            full[(p - i) % p] = c;
        }
        Self::reduce(self.p, full)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::scalar(self.p, T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        Cyclotomic { p: self.p, coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U> {
        Cyclotomic { p: self.p, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<T: Coeff> Add for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        assert_eq!(self.p, rhs.p);
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Coeff> Sub for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        assert_eq!(self.p, rhs.p);
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Coeff> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic { p: self.p, coeffs: self.coeffs.iter().map(|a| -a.clone()).collect() }
    }
}

impl<T: Coeff> Mul for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        assert_eq!(self.p, rhs.p);
        let p = self.p as usize;
        let (a, b) = (self.expand(), rhs.expand());
        let mut full = vec![T::zero(); p];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                full[k] = full[k].clone() + x.clone() * y.clone();
            }
        }
        Cyclotomic::reduce(self.p, full)
    }
}

impl<T: Coeff> Add for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self + &rhs
    }
}

impl<T: Coeff> Sub for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self - &rhs
    }
}

impl<T: Coeff> Mul for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self * &rhs
    }
}

impl<T: Coeff> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        -&self
    }
}

impl<T: Coeff + ToPrimitive> Cyclotomic<T> {
    /// Image under the embedding `ζ -> e^{2πi/p}`.
    pub fn to_complex(&self) -> Complex64 {
        let p = self.p as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / p;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }
}

impl CyclotomicInt {
    pub fn to_big(&self) -> CyclotomicBig {
        self.map(|&c| BigInt::from(c))
    }
}

impl CyclotomicBig {
    pub fn to_rational(&self) -> CyclotomicRational {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_relations() {
        let w = CyclotomicInt::from_coeffs(3, vec![0, 1]);
        let one = CyclotomicInt::scalar(3, 1);
        // 1 + ω + ω² = 0
        let w2 = &w * &w;
        assert!((&(&one + &w) + &w2).is_zero());
        assert_eq!(w.pow(3), one);
        assert_eq!(w.conj(), w2);
        assert_eq!(w.mul_zeta_pow(2), one);
    }

    #[test]
    fn exponent_counts() {
        // 2 + 3ω + 1ω² = 1 + 2ω
        let z = CyclotomicInt::from_exponent_counts(3, &[2, 3, 1]);
        assert_eq!(z.coeffs(), &[1, 2]);
        let s = CyclotomicInt::from_exponent_counts(2, &[5, 2]);
        assert_eq!(s.coeffs(), &[3]);
        let c = z.to_complex();
        let expect = Complex64::new(1.0, 0.0) + Complex64::from_polar(2.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((c - expect).norm() < 1e-12);
    }

    #[test]
    fn norm_is_real_for_p3() {
        let z = CyclotomicInt::from_coeffs(3, vec![4, -7]);
        let n = &z * &z.conj();
        assert!(n.is_scalar());
        assert_eq!(n.coeffs()[0], 16 + 49 + 28);
    }
}
