//! Finite fields of small prime-power order and their multiplicative characters.
//!
//! Elements are integers in `[0, q)`: the base-`ℓ` digits of the index are the
//! coefficients of the element written as a polynomial in the defining root.
//! Multiplication goes through discrete log tables built at construction.

use crate::error::{Error, Result};
use crate::poly::DensePoly;

/// Largest field order accepted by [`FieldSpec::new`].
pub const MAX_ORDER: u64 = 1 << 22;

/// Fields up to this order also get full addition and multiplication tables.
const TABLE_ORDER: u32 = 64;

/// Sentinel stored in log and character tables for the zero element.
pub const ZERO_SENTINEL: u32 = u32::MAX;

/// An element of a [`FieldSpec`], identified by its index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug)]
struct SmallTables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// The finite field with `q = characteristic^ext_degree` elements.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    characteristic: u32,
    ext_degree: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    log: Vec<u32>,
    // exp[k] = g^k for 0 <= k < 2(q-1), so sums of two logs need no reduction.
    exp: Vec<u32>,
    tables: Option<SmallTables>,
}

pub(crate) fn is_prime(n: u64) -> bool {
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

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits(mut x: u32, l: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = x % l;
            x /= l;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], l: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * l + d)
}

/// Schoolbook product in `F_l[t]/(modulus)` on digit vectors; used only while
/// the log tables are being built.
fn slow_mul(a: u32, b: u32, l: u32, modulus: &[u32]) -> u32 {
    let e = modulus.len() - 1;
    let (da, db) = (digits(a, l, e as u32), digits(b, l, e as u32));
    let mut prod = vec![0u64; 2 * e];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % l as u64;
        }
    }
    for k in (e..2 * e).rev() {
        let c = prod[k];
        if c != 0 {
            for (j, &m) in modulus.iter().enumerate().take(e) {
                let idx = k - e + j;
                prod[idx] = (prod[idx] + (l as u64 - c) * m as u64) % l as u64;
            }
            prod[k] = 0;
        }
    }
    let out: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
    undigits(&out, l)
}

fn slow_pow(mut base: u32, mut exp: u64, l: u32, modulus: &[u32]) -> u32 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = slow_mul(acc, base, l, modulus);
        }
        base = slow_mul(base, base, l, modulus);
        exp >>= 1;
    }
    acc
}

impl FieldSpec {
    /// Builds `F_{ℓ^e}` with its canonical modulus and generator.
    pub fn new(characteristic: u32, ext_degree: u32) -> Result<FieldSpec> {
        if !is_prime(characteristic as u64) {
            return Err(Error::NotPrime(characteristic as u64));
        }
        if ext_degree == 0 {
            return Err(Error::Precondition("extension degree must be at least 1".into()));
        }
        let order = (characteristic as u64)
            .checked_pow(ext_degree)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge { characteristic, ext_degree })? as u32;
        let l = characteristic;
        let modulus = if ext_degree == 1 {
            Vec::new()
        } else {
            let prime = FieldSpec::new(l, 1)?;
            let e = ext_degree as usize;
            // Lexicographic order on the lowest-degree-first coefficient vector.
            (0..order)
                .map(|idx| {
                    let mut c = digits(idx, l, ext_degree);
                    c.reverse();
                    c.push(1);
                    c
                })
                .find(|c| {
                    let p = DensePoly::from_coeffs(c.iter().map(|&v| FieldElement(v)).collect());
                    p.degree() == Some(e) && p.is_irreducible(&prime)
                })
                .ok_or_else(|| Error::Internal(format!("no irreducible of degree {e} over F_{l}")))?
        };
        let mul_raw = |a: u32, b: u32| -> u32 {
            if ext_degree == 1 {
                ((a as u64 * b as u64) % l as u64) as u32
            } else {
                slow_mul(a, b, l, &modulus)
            }
        };
        let group = order as u64 - 1;
        let primes = prime_factors(group);
        let pow_raw = |x: u32, k: u64| -> u32 {
            if ext_degree == 1 {
                let mut acc = 1u64;
                let (mut b, mut k) = (x as u64, k);
                while k > 0 {
                    if k & 1 == 1 {
                        acc = acc * b % l as u64;
                    }
                    b = b * b % l as u64;
                    k >>= 1;
                }
                acc as u32
            } else {
                slow_pow(x, k, l, &modulus)
            }
        };
        let generator = (1..order)
            .find(|&g| primes.iter().all(|&r| pow_raw(g, group / r) != 1))
            .ok_or_else(|| Error::Internal("unit group has no generator".into()))?;
        let n = group as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![ZERO_SENTINEL; order as usize];
        let mut cur = 1u32;
        for k in 0..n {
            exp[k] = cur;
            log[cur as usize] = k as u32;
            cur = mul_raw(cur, generator);
        }
        if cur != 1 {
            return Err(Error::Internal("generator order mismatch".into()));
        }
        for k in n..2 * n {
            exp[k] = exp[k - n];
        }
        let mut field = FieldSpec {
            characteristic,
            ext_degree,
            order,
            modulus,
            generator: FieldElement(generator),
            log,
            exp,
            tables: None,
        };
        if order <= TABLE_ORDER {
            let q = order as usize;
            let mut add = vec![0u32; q * q];
            let mut mul = vec![0u32; q * q];
            for a in 0..order {
                for b in 0..order {
                    let i = a as usize * q + b as usize;
                    add[i] = field.add_digits(a, b);
                    mul[i] = field.mul_log(FieldElement(a), FieldElement(b)).0;
                }
            }
            field.tables = Some(SmallTables { add, mul });
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn ext_degree(&self) -> u32 {
        self.ext_degree
    }

    /// The cardinality `q`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of the defining polynomial, lowest degree first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(FieldElement)
    }

    /// Image of an integer under `Z -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.characteristic as i64) as u32)
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let l = self.characteristic;
        if self.ext_degree == 1 {
            let s = a + b;
            return if s >= l { s - l } else { s };
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
        for _ in 0..self.ext_degree {
            let s = a % l + b % l;
            out += if s >= l { s - l } else { s } * place;
            a /= l;
            b /= l;
            place *= l;
        }
        out
    }

    #[inline]
    fn mul_log(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if let Some(t) = &self.tables {
            return FieldElement(t.add[(a.0 * self.order + b.0) as usize]);
        }
        FieldElement(self.add_digits(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let l = self.characteristic;
        if self.ext_degree == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { l - a.0 });
        }
        let (mut a, mut out, mut place) = (a.0, 0u32, 1u32);
        for _ in 0..self.ext_degree {
            let d = a % l;
            out += if d == 0 { 0 } else { l - d } * place;
            a /= l;
            place *= l;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if let Some(t) = &self.tables {
            return FieldElement(t.mul[(a.0 * self.order + b.0) as usize]);
        }
        self.mul_log(a, b)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        let n = self.order - 1;
        let la = self.log[a.0 as usize];
        Some(FieldElement(self.exp[((n - la) % n.max(1)) as usize]))
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        if k == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let n = (self.order - 1) as u64;
        let e = (self.log[a.0 as usize] as u64 * (k % n)) % n;
        FieldElement(self.exp[e as usize])
    }

    /// Discrete logarithm to base the generator; `None` for zero.
    #[inline]
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        let v = self.log[a.0 as usize];
        (v != ZERO_SENTINEL).then_some(v)
    }

    /// `generator^k`.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.order as u64 - 1).max(1)) as usize])
    }

    /// Number of `y` in the field with `y^n = a`.
    pub fn count_nth_roots(&self, a: FieldElement, n: u32) -> u32 {
        match self.log(a) {
            None => 1,
            Some(la) => {
                let g = num_integer::gcd(n, self.order - 1);
                if la % g == 0 {
                    g
                } else {
                    0
                }
            }
        }
    }

    /// `F_{q^n}` together with the embedding of this field into it.
    pub fn extension(&self, n: u32) -> Result<ExtensionField> {
        if n == 0 {
            return Err(Error::Precondition("extension degree must be at least 1".into()));
        }
        let big = FieldSpec::new(self.characteristic, self.ext_degree * n)?;
        let embed = if self.ext_degree == 1 {
            (0..self.order).map(FieldElement).collect()
        } else {
            let m: Vec<FieldElement> = self.modulus.iter().map(|&c| FieldElement(c)).collect();
            let mp = DensePoly::from_coeffs(m);
            let root = big
                .elements()
                .find(|&x| mp.eval(&big, x).is_zero())
                .ok_or_else(|| Error::Internal("defining polynomial has no root in extension".into()))?;
            let l = self.characteristic;
            (0..self.order)
                .map(|idx| {
                    let mut acc = FieldElement::ZERO;
                    for &d in digits(idx, l, self.ext_degree).iter().rev() {
                        acc = big.add(big.mul(acc, root), FieldElement(d));
                    }
                    acc
                })
                .collect()
        };
        Ok(ExtensionField { degree: n, field: big, embed })
    }
}

/// `F_{q^n}` built as an extension of the prime field, with an embedding of `F_q`.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    degree: u32,
    field: FieldSpec,
    embed: Vec<FieldElement>,
}

impl ExtensionField {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Image of an element of the base field.
    pub fn embed(&self, x: FieldElement) -> FieldElement {
        self.embed[x.0 as usize]
    }
}

/// A multiplicative character of order `n`, stored as exponents of `ζ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultCharacter {
    order: u32,
    field_order: u32,
    table: Vec<u32>,
}

impl MultCharacter {
    /// The character sending the field generator to `ζ_n`.
    pub fn new(field: &FieldSpec, n: u32) -> Result<MultCharacter> {
        let q = field.order();
        if n == 0 || (q - 1) % n != 0 {
            return Err(Error::CharacterOrder { q, order: n });
        }
        let table = field
            .elements()
            .map(|x| field.log(x).map_or(ZERO_SENTINEL, |l| l % n))
            .collect();
        Ok(MultCharacter { order: n, field_order: q, table })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Exponent of `χ(x)`, or `None` when `x = 0`.
    #[inline]
    pub fn eval(&self, x: FieldElement) -> Option<u32> {
        let v = self.table[x.0 as usize];
        (v != ZERO_SENTINEL).then_some(v)
    }

    /// Raw exponent with [`ZERO_SENTINEL`] for zero; for hot loops.
    #[inline]
    pub fn eval_raw(&self, x: FieldElement) -> u32 {
        self.table[x.0 as usize]
    }

    pub fn conjugate(&self) -> MultCharacter {
        self.power(self.order - 1)
    }

    /// `χ^j`; for `j ≡ 0` this is the principal character (still 0 at zero).
    pub fn power(&self, j: u32) -> MultCharacter {
        let n = self.order;
        let table = self
            .table
            .iter()
            .map(|&v| if v == ZERO_SENTINEL { v } else { (v as u64 * j as u64 % n as u64) as u32 })
            .collect();
        MultCharacter { order: n, field_order: self.field_order, table }
    }

    pub fn field_order(&self) -> u32 {
        self.field_order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_generator_is_smallest_primitive_root() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.generator(), FieldElement(3));
        // Independent check: 3 has order 6 mod 7 and 2 does not.
        let ord = |g: u64| (1..=6).find(|&k| (0..k).fold(1, |a, _| a * g % 7) == 1).unwrap();
        assert_eq!(ord(3), 6);
        assert_eq!(ord(2), 3);
    }

    #[test]
    fn f4_modulus() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.order(), 4);
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn f5_unit_group() {
        let f = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f.order() - 1, 4);
        assert_eq!(f.generator(), FieldElement(2));
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(matches!(FieldSpec::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(FieldSpec::new(1, 1), Err(Error::NotPrime(1))));
    }

    #[test]
    fn field_axioms_small_fields() {
        for &(l, e) in &[(2, 1), (2, 2), (2, 3), (3, 2), (5, 1), (7, 1), (13, 1), (5, 2), (3, 4)] {
            let f = FieldSpec::new(l, e).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for &c in els.iter().step_by(3) {
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
            // Generator has full order.
            let g = f.generator();
            let mut x = g;
            for _ in 1..f.order() - 1 {
                assert_ne!(x, FieldElement::ONE);
                x = f.mul(x, g);
            }
            assert_eq!(x, FieldElement::ONE);
        }
    }

    #[test]
    fn characters() {
        let f = FieldSpec::new(7, 1).unwrap();
        let chi = MultCharacter::new(&f, 3).unwrap();
        let mut counts = [0; 3];
        for x in f.elements().skip(1) {
            counts[chi.eval(x).unwrap() as usize] += 1;
        }
        assert_eq!(counts, [2, 2, 2]);
        assert_eq!(chi.eval(FieldElement::ONE), Some(0));
        assert_eq!(chi.eval(FieldElement::ZERO), None);
        let g = f.generator();
        assert_eq!(chi.eval(g), Some(1));
        assert_eq!(chi.eval(f.mul(g, g)), Some(2));

        let quad = MultCharacter::new(&f, 2).unwrap();
        let squares: Vec<u32> = f.elements().filter(|&x| quad.eval(x) == Some(0)).map(|x| x.0).collect();
        assert_eq!(squares, vec![1, 2, 4]);

        assert!(matches!(
            MultCharacter::new(&FieldSpec::new(5, 1).unwrap(), 3),
            Err(Error::CharacterOrder { q: 5, order: 3 })
        ));
        assert_eq!(chi.conjugate().eval(g), Some(2));
    }

    #[test]
    fn extension_embedding_is_a_homomorphism() {
        for &(l, e, n) in &[(2, 2, 3), (7, 1, 2), (3, 2, 2)] {
            let f = FieldSpec::new(l, e).unwrap();
            let ext = f.extension(n).unwrap();
            let big = ext.field();
            assert_eq!(big.order(), f.order().pow(n));
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(ext.embed(f.add(a, b)), big.add(ext.embed(a), ext.embed(b)));
                    assert_eq!(ext.embed(f.mul(a, b)), big.mul(ext.embed(a), ext.embed(b)));
                }
            }
        }
    }

    #[test]
    fn nth_roots() {
        let f = FieldSpec::new(7, 1).unwrap();
        for a in f.elements() {
            let brute = f.elements().filter(|&y| f.pow(y, 3) == a).count() as u32;
            assert_eq!(f.count_nth_roots(a, 3), brute);
        }
    }
}
