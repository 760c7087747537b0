//! Dense univariate polynomials over a [`FieldSpec`].

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

/// Polynomial with coefficients lowest degree first. The zero polynomial has no
/// coefficients; otherwise the last coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DensePoly {
    coeffs: Vec<FieldElement>,
}

impl DensePoly {
    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DensePoly { coeffs: vec![FieldElement::ONE] }
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        DensePoly { coeffs: vec![FieldElement::ZERO, FieldElement::ONE] }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Trailing zero coefficients are stripped.
    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    /// Convenience constructor from raw element indices.
    pub fn from_u32s(coeffs: &[u32]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| FieldElement(c)).collect())
    }

    /// `X - a`.
    pub fn linear(field: &FieldSpec, a: FieldElement) -> Self {
        DensePoly { coeffs: vec![field.neg(a), FieldElement::ONE] }
    }

    /// The monic polynomial of degree `d` with the given index in the
    /// lexicographic order on `(c_0, …, c_{d-1})`, `c_0` most significant.
    pub fn monic_from_index(field: &FieldSpec, d: usize, mut index: u64) -> Self {
        let q = field.order() as u64;
        let mut coeffs = vec![FieldElement::ZERO; d + 1];
        for i in (0..d).rev() {
            coeffs[i] = FieldElement((index % q) as u32);
            index /= q;
        }
        coeffs[d] = FieldElement::ONE;
        DensePoly { coeffs }
    }

    /// Inverse of [`DensePoly::monic_from_index`] (leading coefficient ignored).
    pub fn monic_index(&self, field: &FieldSpec) -> u64 {
        let q = field.order() as u64;
        let d = self.coeffs.len().saturating_sub(1);
        self.coeffs[..d].iter().fold(0, |acc, c| acc * q + c.0 as u64)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &FieldSpec, x: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, field: &FieldSpec, other: &DensePoly) -> DensePoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[FieldElement], i: usize| v.get(i).copied().unwrap_or(FieldElement::ZERO);
        Self::from_coeffs((0..n).map(|i| field.add(get(&self.coeffs, i), get(&other.coeffs, i))).collect())
    }

    pub fn sub(&self, field: &FieldSpec, other: &DensePoly) -> DensePoly {
        self.add(field, &other.scale(field, field.neg(FieldElement::ONE)))
    }

    pub fn scale(&self, field: &FieldSpec, c: FieldElement) -> DensePoly {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &FieldSpec, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, field: &FieldSpec, k: u32) -> DensePoly {
        (0..k).fold(Self::one(), |acc, _| acc.mul(field, self))
    }

    /// Quotient and remainder; errors on division by zero.
    pub fn div_rem(&self, field: &FieldSpec, divisor: &DensePoly) -> Result<(DensePoly, DensePoly)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let inv_lead = field.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = field.mul(rem[k], inv_lead);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (j, &m) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] = field.sub(rem[k - dd + j], field.mul(c, m));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, field: &FieldSpec, divisor: &DensePoly) -> Result<DensePoly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned unchanged.
    pub fn monic(&self, field: &FieldSpec) -> DensePoly {
        match field.inv(self.leading()) {
            Some(inv) => self.scale(field, inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor; errors when both inputs are zero.
    pub fn gcd(field: &FieldSpec, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b)?;
            a = b;
            b = r;
        }
        Ok(a.monic(field))
    }

    pub fn derivative(&self, field: &FieldSpec) -> DensePoly {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.mul(field.from_int(i as i64), c))
                .collect(),
        )
    }

    /// True iff the polynomial has no repeated factor over the algebraic closure.
    pub fn is_squarefree(&self, field: &FieldSpec) -> Result<bool> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        if d == 0 {
            return Ok(true);
        }
        let der = self.derivative(field);
        if der.is_zero() {
            // A p-th power of a nonconstant polynomial.
            return Ok(false);
        }
        Ok(Self::gcd(field, self, &der)?.degree() == Some(0))
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, field: &FieldSpec, mut e: u64, m: &DensePoly) -> Result<DensePoly> {
        let mut base = self.rem(field, m)?;
        let mut acc = Self::one().rem(field, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, m)?;
            }
            base = base.mul(field, &base).rem(field, m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Irreducibility over the field (Ben-Or: no factor of degree `i ≤ n/2`
    /// shares a root with `X^{q^i} - X`).
    pub fn is_irreducible(&self, field: &FieldSpec) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let f = self.monic(field);
        let q = field.order() as u64;
        let x = Self::x();
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = h.pow_mod(field, q, &f).expect("nonzero modulus");
            let g = Self::gcd(field, &f, &h.sub(field, &x)).expect("nonzero");
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Roots in the field, in index order.
    pub fn roots(&self, field: &FieldSpec) -> Vec<FieldElement> {
        field.elements().filter(|&x| self.eval(field, x).is_zero()).collect()
    }
}

/// Allocation-free gcd tests on coefficient slices, for enumeration hot loops.
pub(crate) struct CoprimeScratch {
    a: Vec<FieldElement>,
    b: Vec<FieldElement>,
}

impl CoprimeScratch {
    pub fn new() -> Self {
        CoprimeScratch { a: Vec::with_capacity(64), b: Vec::with_capacity(64) }
    }

    /// Whether the monic polynomials `X^{len} + Σ a_i X^i` and `X^{len} + Σ b_i X^i` are coprime.
    pub fn coprime_monic(&mut self, field: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> bool {
        if a.is_empty() || b.is_empty() {
            return true;
        }
        let mut x = std::mem::take(&mut self.a);
        let mut y = std::mem::take(&mut self.b);
        x.clear();
        x.extend_from_slice(a);
        x.push(FieldElement::ONE);
        y.clear();
        y.extend_from_slice(b);
        y.push(FieldElement::ONE);
        self.euclid(field, x, y)
    }

    /// Whether the monic polynomial `X^{len} + Σ a_i X^i` is square-free.
    pub fn squarefree_monic(&mut self, field: &FieldSpec, a: &[FieldElement]) -> bool {
        if a.is_empty() {
            return true;
        }
        let mut x = std::mem::take(&mut self.a);
        let mut y = std::mem::take(&mut self.b);
        x.clear();
        x.extend_from_slice(a);
        x.push(FieldElement::ONE);
        y.clear();
        for (i, &c) in x.iter().enumerate().skip(1) {
            y.push(field.mul(field.from_int(i as i64), c));
        }
        trim(&mut y);
        if y.is_empty() {
            self.a = x;
            self.b = y;
            return false;
        }
        self.euclid(field, x, y)
    }

    // gcd(x, y) == 1 for nonzero x, y given with explicit (nonzero) leading terms.
    fn euclid(&mut self, field: &FieldSpec, mut x: Vec<FieldElement>, mut y: Vec<FieldElement>) -> bool {
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        let result = loop {
            if y.is_empty() {
                break x.len() == 1;
            }
            if y.len() == 1 {
                break true;
            }
            let inv = field.inv(*y.last().unwrap()).unwrap();
            let dy = y.len() - 1;
            for k in (dy..x.len()).rev() {
                let c = field.mul(x[k], inv);
                if c.is_zero() {
                    continue;
                }
                for (j, &m) in y.iter().enumerate() {
                    let idx = k - dy + j;
                    x[idx] = field.sub(x[idx], field.mul(c, m));
                }
            }
            x.truncate(dy);
            trim(&mut x);
            std::mem::swap(&mut x, &mut y);
        };
        self.a = x;
        self.b = y;
        result
    }
}

fn trim(v: &mut Vec<FieldElement>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldSpec {
        FieldSpec::new(7, 1).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let f = f7();
        assert_eq!(DensePoly::x().eval(&f, FieldElement(3)), FieldElement(3));
        assert_eq!(DensePoly::from_u32s(&[1, 0, 1]).eval(&f, FieldElement(3)), FieldElement(3));
        assert_eq!(DensePoly::zero().eval(&f, FieldElement(5)), FieldElement::ZERO);
    }

    #[test]
    fn gcd_examples() {
        let f = f7();
        let x2m1 = DensePoly::from_u32s(&[6, 0, 1]);
        let xm1 = DensePoly::from_u32s(&[6, 1]);
        assert_eq!(DensePoly::gcd(&f, &x2m1, &xm1).unwrap(), xm1);
        let xp1 = DensePoly::from_u32s(&[1, 1]);
        assert_eq!(DensePoly::gcd(&f, &DensePoly::x(), &xp1).unwrap(), DensePoly::one());
        let g = DensePoly::from_u32s(&[3, 0, 2]);
        assert_eq!(DensePoly::gcd(&f, &g, &g).unwrap(), g.monic(&f));
        assert!(DensePoly::gcd(&f, &DensePoly::zero(), &DensePoly::zero()).is_err());
    }

    #[test]
    fn squarefree_examples() {
        let f = f7();
        assert!(DensePoly::from_u32s(&[0, 1, 1]).is_squarefree(&f).unwrap());
        let xm1 = DensePoly::from_u32s(&[6, 1]);
        assert!(!xm1.mul(&f, &xm1).is_squarefree(&f).unwrap());
        let mut c = vec![0u32; 8];
        c[1] = 6;
        c[7] = 1;
        assert!(DensePoly::from_u32s(&c).is_squarefree(&f).unwrap());
        assert!(DensePoly::zero().is_squarefree(&f).is_err());
        // X^2 + 1 = (X + 1)^2 over F_2 has vanishing derivative.
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert!(!DensePoly::from_u32s(&[1, 0, 1]).is_squarefree(&f2).unwrap());
        // Over F_4, X^2 + w is a square of X + w^2 and derivative vanishes.
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert!(!DensePoly::from_u32s(&[2, 0, 1]).is_squarefree(&f4).unwrap());
    }

    #[test]
    fn irreducibility_matches_root_search_for_small_degrees() {
        let f = f7();
        for idx in 0..343u64 {
            let p = DensePoly::monic_from_index(&f, 3, idx);
            assert_eq!(p.is_irreducible(&f), p.roots(&f).is_empty());
        }
    }

    #[test]
    fn index_roundtrip() {
        let f = FieldSpec::new(2, 2).unwrap();
        for idx in 0..64 {
            let p = DensePoly::monic_from_index(&f, 3, idx);
            assert_eq!(p.monic_index(&f), idx);
        }
    }

    #[test]
    fn fast_coprime_matches_gcd() {
        for &(l, e) in &[(7, 1), (2, 2), (5, 1)] {
            let f = FieldSpec::new(l, e).unwrap();
            let q = f.order() as u64;
            let mut s = CoprimeScratch::new();
            for da in 0..4usize {
                for db in 0..3usize {
                    for ia in (0..q.pow(da as u32)).step_by(3) {
                        for ib in 0..q.pow(db as u32) {
                            let a = DensePoly::monic_from_index(&f, da, ia);
                            let b = DensePoly::monic_from_index(&f, db, ib);
                            let want = DensePoly::gcd(&f, &a, &b).unwrap().degree() == Some(0);
                            let got = s.coprime_monic(&f, &a.coeffs()[..da], &b.coeffs()[..db]);
                            assert_eq!(got, want, "{a:?} {b:?}");
                            if ib == 0 {
                                let sf = a.is_squarefree(&f).unwrap();
                                assert_eq!(s.squarefree_monic(&f, &a.coeffs()[..da]), sf);
                            }
                        }
                    }
                }
            }
        }
    }
}
