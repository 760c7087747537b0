//! Enumeration of monic, square-free and irreducible polynomials, and of
//! factor tuples `(F_1, …, F_r)` with `F = ∏ F_i^i`.
//!
//! The heavy lifting goes through [`Family`], which precomputes the square-free
//! polynomials of each needed degree together with their value vectors, and walks
//! coprime tuples in lexicographic order. Work is split into contiguous blocks of
//! `F_1` indices sharing a coefficient prefix, so results do not depend on the
//! number of worker threads.

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{CoprimeScratch, DensePoly};
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, Mutex};

/// All monic polynomials of degree `d`, in lexicographic order.
pub fn monic_polys(field: &FieldSpec, d: usize) -> impl Iterator<Item = DensePoly> + '_ {
    let total = (field.order() as u64).pow(d as u32);
    (0..total).map(move |i| DensePoly::monic_from_index(field, d, i))
}

/// Monic square-free polynomials of degree `d`, in lexicographic order.
pub fn squarefree_polys(field: &FieldSpec, d: usize) -> impl Iterator<Item = DensePoly> + '_ {
    let mut scratch = CoprimeScratch::new();
    monic_polys(field, d).filter(move |p| scratch.squarefree_monic(field, &p.coeffs()[..d]))
}

/// Monic irreducibles of degree `1..=max_degree`, ordered by degree then lexicographically.
pub fn irreducible_polys(field: &FieldSpec, max_degree: usize) -> impl Iterator<Item = DensePoly> + '_ {
    (1..=max_degree).flat_map(move |d| monic_polys(field, d).filter(move |p| p.is_irreducible(field)))
}

fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `n ≥ 1` over `F_q`.
pub fn count_irreducibles(q: u64, n: u32) -> BigUint {
    assert!(n >= 1, "degree must be positive");
    let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
    for d in 1..=n {
        if n % d == 0 {
            let term = BigUint::from(q).pow(n / d);
            match mobius(d as u64) {
                1 => pos += term,
                -1 => neg += term,
                _ => {}
            }
        }
    }
    (pos - neg) / BigUint::from(n)
}

/// Square-free monic polynomials of one degree with their values at every field element.
#[derive(Debug)]
pub struct SquarefreeTable {
    degree: usize,
    q: usize,
    // `degree` non-leading coefficients per entry.
    coeffs: Vec<u16>,
    // `q` values per entry.
    values: Vec<u16>,
    // Monic index of each entry, increasing.
    index: Vec<u64>,
}

impl SquarefreeTable {
    pub fn build(field: &FieldSpec, degree: usize) -> Result<SquarefreeTable> {
        let q = field.order() as usize;
        if q > u16::MAX as usize {
            return Err(Error::Precondition(format!("enumeration needs q < 65536, got {q}")));
        }
        let total = (q as u64)
            .checked_pow(degree as u32)
            .filter(|&t| t <= 1 << 32)
            .ok_or_else(|| Error::Precondition(format!("degree {degree} too large to tabulate over F_{q}")))?;
        let mut scratch = CoprimeScratch::new();
        let mut t = SquarefreeTable { degree, q, coeffs: Vec::new(), values: Vec::new(), index: Vec::new() };
        let mut c = vec![FieldElement::ZERO; degree];
        for idx in 0..total {
            let mut r = idx;
            for i in (0..degree).rev() {
                c[i] = FieldElement((r % q as u64) as u32);
                r /= q as u64;
            }
            if !scratch.squarefree_monic(field, &c) {
                continue;
            }
            t.index.push(idx);
            t.coeffs.extend(c.iter().map(|e| e.0 as u16));
            for x in field.elements() {
                let v = c.iter().rev().fold(FieldElement::ONE, |acc, &ci| field.add(field.mul(acc, x), ci));
                t.values.push(v.0 as u16);
            }
        }
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    #[inline]
    pub fn values(&self, i: usize) -> &[u16] {
        &self.values[i * self.q..(i + 1) * self.q]
    }

    #[inline]
    pub fn coeffs_raw(&self, i: usize) -> &[u16] {
        &self.coeffs[i * self.degree..(i + 1) * self.degree]
    }

    pub fn monic_index(&self, i: usize) -> u64 {
        self.index[i]
    }

    pub fn poly(&self, i: usize) -> DensePoly {
        let mut c: Vec<FieldElement> = self.coeffs_raw(i).iter().map(|&v| FieldElement(v as u32)).collect();
        c.push(FieldElement::ONE);
        DensePoly::from_coeffs(c)
    }

    /// Entry range whose monic index lies in `lo..hi`.
    fn range_of(&self, lo: u64, hi: u64) -> Range<usize> {
        self.index.partition_point(|&x| x < lo)..self.index.partition_point(|&x| x < hi)
    }
}

/// Shares square-free tables between families over the same field.
#[derive(Default)]
pub struct TableCache {
    tables: Mutex<HashMap<(u32, u32, usize), Arc<SquarefreeTable>>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, field: &FieldSpec, degree: usize) -> Result<Arc<SquarefreeTable>> {
        let key = (field.characteristic(), field.ext_degree(), degree);
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(SquarefreeTable::build(field, degree)?);
        self.tables.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }
}

/// A member `(F_1, …, F_r)` of a family: monic, square-free, pairwise coprime
/// factors representing `F = ∏ F_i^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorTuple {
    p: u32,
    factors: Vec<DensePoly>,
}

impl FactorTuple {
    /// Validates the tuple invariants.
    pub fn new(field: &FieldSpec, p: u32, factors: Vec<DensePoly>) -> Result<FactorTuple> {
        if factors.is_empty() || factors.len() >= p.max(2) as usize {
            return Err(Error::NotInFamily(format!("{} factors for p = {p}", factors.len())));
        }
        for (i, f) in factors.iter().enumerate() {
            if !f.is_monic() {
                return Err(Error::NotInFamily(format!("factor {} is not monic", i + 1)));
            }
            if !f.is_squarefree(field)? {
                return Err(Error::NotInFamily(format!("factor {} is not square-free", i + 1)));
            }
            for g in &factors[..i] {
                if DensePoly::gcd(field, f, g)?.degree() != Some(0) {
                    return Err(Error::NotInFamily("factors are not coprime".into()));
                }
            }
        }
        Ok(FactorTuple { p, factors })
    }

    pub(crate) fn new_unchecked(p: u32, factors: Vec<DensePoly>) -> FactorTuple {
        FactorTuple { p, factors }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn factors(&self) -> &[DensePoly] {
        &self.factors
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.degree().unwrap_or(0)).collect()
    }

    /// `deg F = Σ i·d_i`.
    pub fn total_degree(&self) -> usize {
        self.degrees().iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
    }

    /// `F(x) = ∏ F_i(x)^i`.
    pub fn eval(&self, field: &FieldSpec, x: FieldElement) -> FieldElement {
        self.factors
            .iter()
            .enumerate()
            .fold(FieldElement::ONE, |acc, (i, f)| field.mul(acc, field.pow(f.eval(field, x), i as u64 + 1)))
    }

    /// The expanded monic product `∏ F_i^i`.
    pub fn expand(&self, field: &FieldSpec) -> DensePoly {
        self.factors
            .iter()
            .enumerate()
            .fold(DensePoly::one(), |acc, (i, f)| acc.mul(field, &f.pow(field, i as u32 + 1)))
    }
}

/// Accumulator fed one tuple at a time by [`Family::run`].
pub trait TupleVisitor: Send {
    fn visit(&mut self, tuple: &TupleRef<'_>);
    /// Folds in the result of another block; must be exact and order-independent.
    fn merge(&mut self, other: Self);
}

/// A tuple during enumeration, as indices into the family's tables.
pub struct TupleRef<'a> {
    family: &'a Family<'a>,
    idx: &'a [usize],
}

impl TupleRef<'_> {
    /// Number of factors `r`.
    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    /// Values of `F_{i+1}` at every field element (by element index).
    #[inline]
    pub fn factor_values(&self, i: usize) -> &[u16] {
        self.family.tables[i].values(self.idx[i])
    }

    pub fn to_tuple(&self) -> FactorTuple {
        self.family.tuple_at(self.idx)
    }
}

/// The family `F_{(d_1, …, d_r)}` of factor tuples with prescribed degrees.
pub struct Family<'a> {
    field: &'a FieldSpec,
    p: u32,
    degrees: Vec<usize>,
    tables: Vec<Arc<SquarefreeTable>>,
}

impl<'a> Family<'a> {
    pub fn new(field: &'a FieldSpec, p: u32, degrees: &[usize], cache: &TableCache) -> Result<Family<'a>> {
        if degrees.is_empty() || degrees.len() >= p.max(2) as usize {
            return Err(Error::Precondition(format!("{} factor degrees for p = {p}", degrees.len())));
        }
        let tables = degrees.iter().map(|&d| cache.get(field, d)).collect::<Result<Vec<_>>>()?;
        Ok(Family { field, p, degrees: degrees.to_vec(), tables })
    }

    pub fn field(&self) -> &FieldSpec {
        self.field
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Upper bound on the number of candidate tuples examined.
    pub fn work_estimate(&self) -> u128 {
        self.tables.iter().map(|t| t.len() as u128).product()
    }

    fn tuple_at(&self, idx: &[usize]) -> FactorTuple {
        FactorTuple::new_unchecked(self.p, idx.iter().zip(&self.tables).map(|(&i, t)| t.poly(i)).collect())
    }

    /// Contiguous `F_1` entry ranges, one per coefficient prefix of length `k`,
    /// where `k` is the smallest prefix length giving at least 64 prefixes.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let t = &self.tables[0];
        let q = self.field.order() as u64;
        let d = self.degrees[0];
        let mut k = 0;
        while k < d && q.pow(k as u32) < 64 {
            k += 1;
        }
        let width = q.pow((d - k) as u32);
        (0..q.pow(k as u32))
            .map(|pre| t.range_of(pre * width, (pre + 1) * width))
            .filter(|r| !r.is_empty())
            .collect()
    }

    fn walk<F: FnMut(&TupleRef<'_>)>(&self, first: Range<usize>, f: &mut F) {
        let r = self.tables.len();
        let mut idx = vec![0usize; r];
        let mut scratch = CoprimeScratch::new();
        let mut bufs: Vec<Vec<FieldElement>> = vec![Vec::new(); r];
        for i0 in first {
            idx[0] = i0;
            load(&self.tables[0], i0, &mut bufs[0]);
            self.descend(1, &mut idx, &mut bufs, &mut scratch, f);
        }
    }

    fn descend<F: FnMut(&TupleRef<'_>)>(
        &self,
        level: usize,
        idx: &mut Vec<usize>,
        bufs: &mut Vec<Vec<FieldElement>>,
        scratch: &mut CoprimeScratch,
        f: &mut F,
    ) {
        if level == self.tables.len() {
            f(&TupleRef { family: self, idx });
            return;
        }
        let t = &self.tables[level];
        'cand: for i in 0..t.len() {
            let vals = t.values(i);
            for j in 0..level {
                // A shared root in F_q rules out coprimality immediately.
                let other = self.tables[j].values(idx[j]);
                if vals.iter().zip(other).any(|(&a, &b)| a == 0 && b == 0) {
                    continue 'cand;
                }
            }
            load(t, i, &mut bufs[level]);
            for j in 0..level {
                if !scratch.coprime_monic(self.field, &bufs[level], &bufs[j]) {
                    continue 'cand;
                }
            }
            idx[level] = i;
            self.descend(level + 1, idx, bufs, scratch, f);
        }
    }

    /// Feeds every tuple to a fresh visitor per block and merges the results in block order.
    pub fn run<V, M>(&self, workers: usize, make: M) -> Result<V>
    where
        V: TupleVisitor,
        M: Fn() -> V + Sync,
    {
        let blocks = self.blocks();
        let run_block = |b: &Range<usize>| {
            let mut v = make();
            self.walk(b.clone(), &mut |t| v.visit(t));
            v
        };
        let parts: Vec<V> = if workers <= 1 {
            blocks.iter().map(run_block).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| blocks.par_iter().map(run_block).collect())
        };
        let mut acc = make();
        for part in parts {
            acc.merge(part);
        }
        Ok(acc)
    }

    /// Number of tuples in the family, by enumeration.
    pub fn count(&self, workers: usize) -> Result<u64> {
        Ok(self.run(workers, || Counter(0))?.0)
    }

    /// All tuples in lexicographic order.
    pub fn stream(&'a self) -> FactorTupleStream<'a> {
        FactorTupleStream { family: self, blocks: vec![0..self.tables[0].len()], next_first: 0, block: 0, buf: Vec::new().into_iter() }
    }

    /// One stream per `F_1` prefix block; their concatenation equals [`Family::stream`].
    pub fn partitioned_streams(&'a self) -> Vec<FactorTupleStream<'a>> {
        self.blocks()
            .into_iter()
            .map(|b| FactorTupleStream {
                family: self,
                next_first: b.start,
                blocks: vec![b],
                block: 0,
                buf: Vec::new().into_iter(),
            })
            .collect()
    }
}

fn load(t: &SquarefreeTable, i: usize, buf: &mut Vec<FieldElement>) {
    buf.clear();
    buf.extend(t.coeffs_raw(i).iter().map(|&c| FieldElement(c as u32)));
}

struct Counter(u64);

impl TupleVisitor for Counter {
    fn visit(&mut self, _: &TupleRef<'_>) {
        self.0 += 1;
    }
    fn merge(&mut self, other: Self) {
        self.0 += other.0;
    }
}

/// Iterator over factor tuples; materializes all completions of one `F_1` at a time.
pub struct FactorTupleStream<'a> {
    family: &'a Family<'a>,
    blocks: Vec<Range<usize>>,
    block: usize,
    next_first: usize,
    buf: std::vec::IntoIter<FactorTuple>,
}

impl Iterator for FactorTupleStream<'_> {
    type Item = FactorTuple;

    fn next(&mut self) -> Option<FactorTuple> {
        loop {
            if let Some(t) = self.buf.next() {
                return Some(t);
            }
            let range = self.blocks.get(self.block)?;
            if self.next_first >= range.end {
                self.block += 1;
                if let Some(r) = self.blocks.get(self.block) {
                    self.next_first = r.start;
                }
                continue;
            }
            let i = self.next_first;
            self.next_first += 1;
            let mut out = Vec::new();
            self.family.walk(i..i + 1, &mut |t| out.push(t.to_tuple()));
            self.buf = out.into_iter();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monic_counts() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(monic_polys(&f7, 0).collect::<Vec<_>>(), vec![DensePoly::one()]);
        assert_eq!(monic_polys(&f7, 2).count(), 49);
        assert_eq!(monic_polys(&f4, 3).count(), 64);
    }

    #[test]
    fn squarefree_counts() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(squarefree_polys(&f7, 3).count(), 294);
        assert_eq!(squarefree_polys(&f7, 1).count(), 7);
        // Independent filter with the allocating gcd.
        let brute = monic_polys(&f4, 2).filter(|p| p.is_squarefree(&f4).unwrap()).count();
        assert_eq!(brute, 12);
        assert_eq!(squarefree_polys(&f4, 2).count(), 12);
    }

    #[test]
    fn irreducible_counts() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(count_irreducibles(7, 1), BigUint::from(7u32));
        assert_eq!(count_irreducibles(7, 2), BigUint::from(21u32));
        assert_eq!(count_irreducibles(4, 3), BigUint::from(20u32));
        assert_eq!(irreducible_polys(&f7, 2).count(), 28);
        assert_eq!(irreducible_polys(&f4, 2).count(), 10);
        assert_eq!(irreducible_polys(&f4, 3).filter(|p| p.degree() == Some(3)).count(), 20);
    }

    fn brute_pairs(field: &FieldSpec, d1: usize, d2: usize) -> Vec<FactorTuple> {
        let mut out = Vec::new();
        for a in monic_polys(field, d1) {
            for b in monic_polys(field, d2) {
                if let Ok(t) = FactorTuple::new(field, 3, vec![a.clone(), b]) {
                    out.push(t);
                }
            }
        }
        out
    }

    #[test]
    fn factor_tuple_counts() {
        let cache = TableCache::new();
        let f7 = FieldSpec::new(7, 1).unwrap();
        let fam = Family::new(&f7, 3, &[1, 0], &cache).unwrap();
        assert_eq!(fam.count(1).unwrap(), 7);
        let fam = Family::new(&f7, 3, &[1, 1], &cache).unwrap();
        assert_eq!(fam.count(1).unwrap(), 42);
        let f4 = FieldSpec::new(2, 2).unwrap();
        let fam = Family::new(&f4, 3, &[2, 1], &cache).unwrap();
        let streamed: Vec<_> = fam.stream().collect();
        assert_eq!(streamed, brute_pairs(&f4, 2, 1));
    }

    #[test]
    fn partitioned_streams_cover_the_family() {
        let cache = TableCache::new();
        let f5 = FieldSpec::new(5, 1).unwrap();
        let fam = Family::new(&f5, 3, &[3, 2], &cache).unwrap();
        let whole: Vec<_> = fam.stream().collect();
        let parts: Vec<_> = fam.partitioned_streams().into_iter().flatten().collect();
        assert_eq!(whole, parts);
        assert_eq!(whole, brute_pairs(&f5, 3, 2));
        for t in &whole {
            assert_eq!(t.expand(&f5).degree(), Some(t.total_degree()));
        }
        assert_eq!(fam.count(4).unwrap(), whole.len() as u64);
    }
}
