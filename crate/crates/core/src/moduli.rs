//! Components of the moduli of cyclic `p`-fold covers, weighted family sizes,
//! and exact empirical trace distributions over whole families.

use crate::cyclo::CyclotomicInt;
use crate::enumerate::{Family, FactorTuple, TableCache, TupleRef, TupleVisitor};
use crate::error::{precondition, Error, Result};
use crate::gf::{FieldElement, FieldSpec, MultCharacter, ZERO_SENTINEL};
use crate::poly::DensePoly;
use crate::rvmodel::{histogram_mixed_moment, sum_distribution, Histogram, NormalizedMoment, RVModel};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Default cap on candidate tuples examined by one experiment.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// A component, indexed by the degrees `(d_1, …, d_{p-1})` of the factors of `F = Π F_i^i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentIndex {
    pub p: u32,
    pub degrees: Vec<usize>,
}

impl ComponentIndex {
    /// Validates `Σ i·d_i ≡ 0 (mod p)`; for `p = 3` the pair is put in the form `d_1 ≥ d_2`.
    pub fn new(p: u32, degrees: Vec<usize>) -> Result<ComponentIndex> {
        precondition(crate::gf::is_prime(p as u64), || format!("p = {p} is not prime"))?;
        precondition(degrees.len() == (p as usize - 1).max(1), || {
            format!("expected {} degrees for p = {p}, got {}", (p - 1).max(1), degrees.len())
        })?;
        precondition(weighted_degree(&degrees) % p as usize == 0, || {
            format!("degrees {degrees:?} have Σ i·d_i not divisible by {p}")
        })?;
        precondition(degrees.iter().sum::<usize>() >= 2, || "a component needs at least two branch points".into())?;
        let mut degrees = degrees;
        if p == 3 && degrees[0] < degrees[1] {
            degrees.swap(0, 1);
        }
        Ok(ComponentIndex { p, degrees })
    }

    /// The hyperelliptic locus of genus `g`: squarefree `F` of degree `2g+1` or `2g+2`.
    pub fn hyperelliptic(g: u32) -> ComponentIndex {
        ComponentIndex { p: 2, degrees: vec![2 * g as usize + 2] }
    }

    pub fn genus(&self) -> u32 {
        genus_of(&self.degrees, self.p).1
    }

    /// Degree vectors of the monic tuples whose twists make up the closed family:
    /// the component itself, then each `d_i` lowered by one (a branch point at infinity).
    pub fn variants(&self) -> Vec<Vec<usize>> {
        let mut out = vec![self.degrees.clone()];
        for i in 0..self.degrees.len() {
            if self.degrees[i] > 0 {
                let mut d = self.degrees.clone();
                d[i] -= 1;
                out.push(d);
            }
        }
        out
    }

    /// `(r, s)` for trigonal components.
    pub fn signature(&self) -> Result<(usize, usize)> {
        signature_of(self)
    }

    /// Inverse of [`ComponentIndex::signature`]: `d_1 = 2r - s + 1`, `d_2 = 2s - r + 1`.
    pub fn from_signature(r: usize, s: usize) -> Result<ComponentIndex> {
        let (r, s) = (r as i64, s as i64);
        let (d1, d2) = (2 * r - s + 1, 2 * s - r + 1);
        precondition(d1 >= 0 && d2 >= 0, || format!("signature ({r}, {s}) gives negative degrees"))?;
        ComponentIndex::new(3, vec![d1 as usize, d2 as usize])
    }

    /// Notes on formulas used outside their proven range.
    pub fn advisories(&self) -> Vec<String> {
        let g = self.genus();
        let mut out = Vec::new();
        if self.p == 3 && g < 5 {
            out.push(format!("genus {g} < 5: the q(q^2-1) automorphism weighting is only proven for g >= 5"));
        }
        if self.p > 3 && (g as u64) <= (self.p as u64 - 1).pow(2) {
            out.push(format!("genus {g} <= (p-1)^2: component counts are only proven above this genus"));
        }
        out
    }
}

fn weighted_degree(degrees: &[usize]) -> usize {
    degrees.iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
}

/// `(R, g)`: `R` counts branch points (including infinity when `Σ i·d_i ≢ 0 mod p`)
/// and `g = (p-1)(R-2)/2`.
pub fn genus_of(degrees: &[usize], p: u32) -> (usize, u32) {
    let sum: usize = degrees.iter().sum();
    let r = if weighted_degree(degrees) % p as usize == 0 { sum } else { sum + 1 };
    let g = ((p as usize - 1) * r.saturating_sub(2) / 2) as u32;
    (r, g)
}

/// All components of genus `g`, one per equivalence class.
pub fn components_for_genus(g: u32, p: u32) -> Result<Vec<ComponentIndex>> {
    precondition(crate::gf::is_prime(p as u64), || format!("p = {p} is not prime"))?;
    if p == 2 {
        return Ok(vec![ComponentIndex::hyperelliptic(g)]);
    }
    if (2 * g) % (p - 1) != 0 {
        return Ok(Vec::new());
    }
    let r = (2 * g / (p - 1)) as usize + 2;
    let mut out = Vec::new();
    let mut d = vec![0usize; p as usize - 1];
    compositions(r, 0, &mut d, &mut |d| {
        if weighted_degree(d) % p as usize == 0 {
            if let Ok(c) = ComponentIndex::new(p, d.to_vec()) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    });
    out.sort_by(|a, b| b.degrees.cmp(&a.degrees));
    Ok(out)
}

fn compositions(rest: usize, i: usize, d: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if i + 1 == d.len() {
        d[i] = rest;
        f(d);
        return;
    }
    for v in 0..=rest {
        d[i] = v;
        compositions(rest - v, i + 1, d, f);
    }
}

/// `(r, s) = ((2d_1 + d_2 - 3)/3, (d_1 + 2d_2 - 3)/3)`.
pub fn signature_of(c: &ComponentIndex) -> Result<(usize, usize)> {
    precondition(c.p == 3, || format!("signatures are defined for trigonal components, got p = {}", c.p))?;
    let (d1, d2) = (c.degrees[0], c.degrees[1]);
    Ok(((2 * d1 + d2 - 3) / 3, (d1 + 2 * d2 - 3) / 3))
}

/// Worker count and tuple budget for an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub workers: usize,
    pub budget: u128,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { workers: 1, budget: DEFAULT_BUDGET }
    }
}

/// Candidate tuples examined when enumerating all of `variants` over `F_q`:
/// the product of squarefree table sizes, summed over variants.
pub fn work_estimate(q: u64, variants: &[Vec<usize>]) -> u128 {
    let q = q as u128;
    let mut total = 0u128;
    for v in variants {
        let mut w = 1u128;
        for &d in v {
            let sf = if d < 2 { q.saturating_pow(d as u32) } else { q.saturating_pow(d as u32) - q.saturating_pow(d as u32 - 1) };
            w = w.saturating_mul(sf);
        }
        total = total.saturating_add(w);
    }
    total
}

/// Counts of affine exponent vectors `(n_0, …, n_{p-1})`, `n_e = #{x : χ(F(x)) = ζ^e}`.
struct SumCensus<'a> {
    log: &'a [u32],
    p: u32,
    buf: Vec<u16>,
    counts: HashMap<Vec<u16>, u64>,
}

impl TupleVisitor for SumCensus<'_> {
    fn visit(&mut self, t: &TupleRef<'_>) {
        let p = self.p;
        self.buf.iter_mut().for_each(|c| *c = 0);
        let q = t.factor_values(0).len();
        'x: for x in 0..q {
            let mut e = 0u32;
            for i in 0..t.len() {
                let l = self.log[t.factor_values(i)[x] as usize];
                if l == ZERO_SENTINEL {
                    continue 'x;
                }
                e += (i as u32 + 1) * l;
            }
            self.buf[(e % p) as usize] += 1;
        }
        match self.counts.get_mut(&self.buf[..]) {
            Some(c) => *c += 1,
            None => {
                self.counts.insert(self.buf.clone(), 1);
            }
        }
    }

    fn merge(&mut self, other: Self) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
    }
}

/// Monic affine-sum census of one degree vector: `S(G) -> #G`.
fn monic_census(
    field: &FieldSpec,
    chi: &MultCharacter,
    degrees: &[usize],
    cache: &TableCache,
    workers: usize,
) -> Result<BTreeMap<CyclotomicInt, u64>> {
    let p = chi.order();
    let log: Vec<u32> = field.elements().map(|x| chi.eval_raw(x)).collect();
    let fam = Family::new(field, p, degrees, cache)?;
    let census = fam.run(workers, || SumCensus {
        log: &log,
        p,
        buf: vec![0; p as usize],
        counts: HashMap::new(),
    })?;
    let mut out = BTreeMap::new();
    for (k, v) in census.counts {
        let counts: Vec<i64> = k.iter().map(|&c| c as i64).collect();
        *out.entry(CyclotomicInt::from_exponent_counts(p, &counts)).or_insert(0) += v;
    }
    Ok(out)
}

/// Which character sum a report tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionKind {
    /// `Ŝ` over the twisted closed family of a component.
    Projective,
    /// `S` over monic tuples of fixed degrees.
    Affine,
    /// `Ŝ_2` over squarefree `F` of degree `2g+1` or `2g+2`.
    Hyperelliptic,
}

/// Number of monic tuples of one degree vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSize {
    pub degrees: Vec<usize>,
    pub monic: BigUint,
}

/// An exact empirical distribution with its comparison against the i.i.d. model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub kind: DistributionKind,
    pub q: u64,
    pub p: u32,
    pub degrees: Vec<usize>,
    pub genus: Option<u32>,
    /// Exact counts of family members per character-sum value.
    pub histogram: Histogram,
    pub variant_sizes: Vec<VariantSize>,
    /// Histogram total: `|F_d|` (affine) or `|F̂_[d]|` (projective).
    pub total: BigUint,
    /// `|F̂_[d]| / (q(q^2-1))` for projective families.
    pub weighted_size: Option<BigRational>,
    /// Number of i.i.d. variables in the model prediction.
    pub model_n: u32,
    pub prediction: Histogram,
    pub tv: BigRational,
    /// Largest `|empirical/predicted - 1|` over bins with predicted mass at least `threshold`.
    pub max_rel_error: BigRational,
    pub threshold: BigRational,
    pub advisories: Vec<String>,
}

impl EmpiricalReport {
    /// `M_{j,k} = mean of Ŝ^j conj(Ŝ)^k / (q+1)^{(j+k)/2}` (affine sums use `q`).
    pub fn moment(&self, j: u32, k: u32) -> NormalizedMoment {
        histogram_mixed_moment(&self.histogram, self.model_n as u64, j, k)
    }
}

fn check_character(field: &FieldSpec, chi: &MultCharacter, p: u32) -> Result<()> {
    precondition(chi.field_order() == field.order(), || "character belongs to a different field".into())?;
    precondition(chi.order() == p, || format!("character of order {} for p = {p}", chi.order()))
}

fn check_budget(field: &FieldSpec, variants: &[Vec<usize>], opts: EnumOptions) -> Result<()> {
    let needed = work_estimate(field.order() as u64, variants);
    if needed > opts.budget {
        return Err(Error::Budget { needed, budget: opts.budget });
    }
    Ok(())
}

fn to_histogram(p: u32, counts: &BTreeMap<CyclotomicInt, BigUint>) -> Histogram {
    let mut h = Histogram::new(p);
    for (k, v) in counts {
        h.add(k.clone(), BigRational::from_integer(BigInt::from(v.clone())));
    }
    h
}

/// Largest relative deviation over bins with predicted mass at least `threshold`.
fn max_relative_error(emp: &Histogram, pred: &Histogram, threshold: &BigRational) -> BigRational {
    let emp = emp.normalized();
    let pred = pred.normalized();
    pred.entries()
        .iter()
        .filter(|(_, m)| *m >= threshold)
        .map(|(s, m)| (emp.get(s) / m - BigRational::one()).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

fn finish(
    kind: DistributionKind,
    field: &FieldSpec,
    p: u32,
    degrees: Vec<usize>,
    genus: Option<u32>,
    counts: BTreeMap<CyclotomicInt, BigUint>,
    variant_sizes: Vec<VariantSize>,
    model_n: u32,
    advisories: Vec<String>,
) -> Result<EmpiricalReport> {
    let q = field.order() as u64;
    let histogram = to_histogram(p, &counts);
    let total: BigUint = counts.values().sum();
    let prediction = sum_distribution(&RVModel::new(q, p)?, model_n);
    let tv = tv_distance(&histogram.normalized(), &prediction)?;
    let threshold = BigRational::new(BigInt::one(), BigInt::from(2u32) * BigInt::from(p as u64 + 1).pow(q as u32));
    let max_rel_error = max_relative_error(&histogram, &prediction, &threshold);
    let weighted_size = (kind != DistributionKind::Affine)
        .then(|| BigRational::new(BigInt::from(total.clone()), BigInt::from(q * (q * q - 1))));
    Ok(EmpiricalReport {
        kind,
        q,
        p,
        degrees,
        genus,
        histogram,
        variant_sizes,
        total,
        weighted_size,
        model_n,
        prediction,
        tv,
        max_rel_error,
        threshold,
        advisories,
    })
}

/// Distribution of `Ŝ(F)` over the closed twisted family `F̂_[d]` of a component.
/// Each monic tuple is enumerated once; the `q-1` scalings are added through
/// `Ŝ(αG) = χ(α)Ŝ(G)`, so every monic value contributes `(q-1)/p` copies of each rotation.
pub fn empirical_trace_distribution(
    field: &FieldSpec,
    component: &ComponentIndex,
    chi: &MultCharacter,
    cache: &TableCache,
    opts: EnumOptions,
) -> Result<EmpiricalReport> {
    let p = component.p;
    check_character(field, chi, p)?;
    let variants = component.variants();
    check_budget(field, &variants, opts)?;
    let q = field.order() as u64;
    let mut monic: BTreeMap<CyclotomicInt, u64> = BTreeMap::new();
    let mut sizes = Vec::new();
    for (vi, v) in variants.iter().enumerate() {
        let census = monic_census(field, chi, v, cache, opts.workers)?;
        let one = CyclotomicInt::scalar(p, 1);
        let mut size = 0u64;
        for (s, n) in census {
            size += n;
            // Only the full degree vector has a nonzero value (1) at infinity.
            let s_hat = if vi == 0 { &s + &one } else { s };
            *monic.entry(s_hat).or_insert(0) += n;
        }
        sizes.push(VariantSize { degrees: v.clone(), monic: BigUint::from(size) });
    }
    let copies = BigUint::from((q - 1) / p as u64);
    let mut twisted: BTreeMap<CyclotomicInt, BigUint> = BTreeMap::new();
    for (s, n) in &monic {
        for c in 0..p {
            *twisted.entry(s.mul_zeta_pow(c)).or_default() += &copies * BigUint::from(*n);
        }
    }
    let kind = if p == 2 { DistributionKind::Hyperelliptic } else { DistributionKind::Projective };
    finish(
        kind,
        field,
        p,
        component.degrees.clone(),
        Some(component.genus()),
        twisted,
        sizes,
        q as u32 + 1,
        component.advisories(),
    )
}

/// Distribution of the affine sum `S(F)` over monic tuples of the given degrees,
/// compared with the sum of `q` model variables.
pub fn affine_trace_distribution(
    field: &FieldSpec,
    p: u32,
    degrees: &[usize],
    chi: &MultCharacter,
    cache: &TableCache,
    opts: EnumOptions,
) -> Result<EmpiricalReport> {
    check_character(field, chi, p)?;
    check_budget(field, &[degrees.to_vec()], opts)?;
    let census = monic_census(field, chi, degrees, cache, opts.workers)?;
    let size: u64 = census.values().sum();
    let counts = census.into_iter().map(|(k, v)| (k, BigUint::from(v))).collect();
    let sizes = vec![VariantSize { degrees: degrees.to_vec(), monic: BigUint::from(size) }];
    finish(DistributionKind::Affine, field, p, degrees.to_vec(), None, counts, sizes, field.order(), Vec::new())
}

/// Distribution of `Ŝ_2(F)` over squarefree `F` of degree `2g+1` or `2g+2`.
pub fn hyperelliptic_trace_distribution(
    field: &FieldSpec,
    g: u32,
    cache: &TableCache,
    opts: EnumOptions,
) -> Result<EmpiricalReport> {
    let chi = MultCharacter::new(field, 2)?;
    empirical_trace_distribution(field, &ComponentIndex::hyperelliptic(g), &chi, cache, opts)
}

/// `M_{j,k}` over the twisted family of a component, with `(q+1)^{(j+k)/2}` kept symbolic.
pub fn empirical_mixed_moment(
    field: &FieldSpec,
    component: &ComponentIndex,
    chi: &MultCharacter,
    j: u32,
    k: u32,
    cache: &TableCache,
    opts: EnumOptions,
) -> Result<NormalizedMoment> {
    Ok(empirical_trace_distribution(field, component, chi, cache, opts)?.moment(j, k))
}

/// `|F̂_[d]| / (q(q^2-1))`, from enumerated monic counts of every degree variant.
pub fn weighted_component_size(
    field: &FieldSpec,
    component: &ComponentIndex,
    cache: &TableCache,
    opts: EnumOptions,
) -> Result<BigRational> {
    let variants = component.variants();
    check_budget(field, &variants, opts)?;
    let q = field.order() as u64;
    let mut monic = 0u64;
    for v in &variants {
        monic += Family::new(field, component.p, v, cache)?.count(opts.workers)?;
    }
    Ok(BigRational::new(BigInt::from((q - 1) * monic), BigInt::from(q * (q * q - 1))))
}

/// `½ Σ |h_1(s) - h_2(s)|` for two normalized histograms.
pub fn tv_distance(h1: &Histogram, h2: &Histogram) -> Result<BigRational> {
    for h in [h1, h2] {
        precondition(h.total() == BigRational::one(), || "tv_distance needs normalized histograms".into())?;
    }
    let mut acc = BigRational::zero();
    for (s, m) in h1.entries() {
        acc += (m - h2.get(s)).abs();
    }
    for (s, m) in h2.entries() {
        if !h1.entries().contains_key(s) {
            acc += m;
        }
    }
    Ok(acc / BigRational::from_integer(BigInt::from(2)))
}

/// The rational trace `Σ_{c=1}^{p-1} σ_c(x)` of a cyclotomic integer.
pub fn galois_trace(x: &CyclotomicInt) -> i64 {
    let p = x.p() as i64;
    if p == 2 {
        return x.coeffs()[0];
    }
    x.coeffs().iter().enumerate().map(|(i, &c)| if i == 0 { c * (p - 1) } else { -c }).sum()
}

/// The full Frobenius trace `Σ_χ -Ŝ_χ`, summed over all nontrivial characters of order `p`.
pub fn total_trace(s_hat: &CyclotomicInt) -> i64 {
    -galois_trace(s_hat)
}

/// A random member `αF` of the closed family: the degree variant and `α` are chosen
/// uniformly, then monic tuples of that variant are drawn until one is admissible.
pub fn sample_member<R: Rng>(
    field: &FieldSpec,
    component: &ComponentIndex,
    rng: &mut R,
) -> Result<(FactorTuple, FieldElement, Vec<usize>)> {
    let variants = component.variants();
    let q = field.order() as u64;
    let v = variants[rng.gen_range(0..variants.len())].clone();
    let alpha = FieldElement(rng.gen_range(1..q) as u32);
    for _ in 0..100_000 {
        let factors: Vec<DensePoly> = v
            .iter()
            .map(|&d| DensePoly::monic_from_index(field, d, rng.gen_range(0..q.pow(d as u32))))
            .collect();
        if let Ok(t) = FactorTuple::new(field, component.p, factors) {
            return Ok((t, alpha, v));
        }
    }
    Err(Error::Internal(format!("no admissible tuple of degrees {v:?} found by sampling")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{exact_count_factor_tuples, rat};

    fn f7() -> FieldSpec {
        FieldSpec::new(7, 1).unwrap()
    }

    #[test]
    fn components() {
        let c = components_for_genus(4, 3).unwrap();
        let degs: Vec<_> = c.iter().map(|c| c.degrees.clone()).collect();
        assert_eq!(degs, vec![vec![6, 0], vec![3, 3]]);
        let c = components_for_genus(3, 3).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].degrees, vec![4, 1]);
        let h = components_for_genus(2, 2).unwrap();
        assert_eq!(h[0].variants(), vec![vec![6], vec![5]]);
        for g in 0..8 {
            for c in components_for_genus(g, 3).unwrap() {
                assert_eq!(c.genus(), g);
            }
        }
    }

    #[test]
    fn genus_and_signature() {
        assert_eq!(genus_of(&[4, 1], 3), (5, 3));
        assert_eq!(genus_of(&[3, 1], 3), (5, 3));
        assert_eq!(genus_of(&[2, 1, 0, 1], 5), (5, 6));
        let c = ComponentIndex::new(3, vec![4, 1]).unwrap();
        assert_eq!(c.signature().unwrap(), (2, 1));
        assert_eq!(ComponentIndex::new(3, vec![3, 3]).unwrap().signature().unwrap(), (2, 2));
        assert_eq!(ComponentIndex::from_signature(2, 1).unwrap(), c);
        assert!(ComponentIndex::hyperelliptic(2).signature().is_err());
        assert!(ComponentIndex::new(3, vec![3, 1]).is_err());
        assert_eq!(ComponentIndex::new(3, vec![1, 4]).unwrap().degrees, vec![4, 1]);
    }

    #[test]
    fn projective_histogram_totals_and_symmetry() {
        let f = f7();
        let chi = MultCharacter::new(&f, 3).unwrap();
        let cache = TableCache::new();
        let c = ComponentIndex::new(3, vec![2, 2]).unwrap();
        let r = empirical_trace_distribution(&f, &c, &chi, &cache, EnumOptions::default()).unwrap();
        let expected: BigUint =
            c.variants().iter().map(|v| exact_count_factor_tuples(7, v)).sum::<BigUint>() * BigUint::from(6u32);
        assert_eq!(r.total, expected);
        assert_eq!(r.histogram.total(), BigRational::from_integer(BigInt::from(expected)));
        assert_eq!(r.histogram.rotated(1), r.histogram);
        assert!(r.histogram.max_abs() <= 8.0 + 1e-9);
        assert!(r.moment(1, 0).is_zero());
        assert!(r.moment(2, 1).is_zero());
        // Swapping χ for its conjugate conjugates the support.
        let rc = empirical_trace_distribution(&f, &c, &chi.conjugate(), &cache, EnumOptions::default()).unwrap();
        assert_eq!(rc.histogram, r.histogram.conjugated());
        let w = weighted_component_size(&f, &c, &cache, EnumOptions::default()).unwrap();
        assert_eq!(Some(w), r.weighted_size);
    }

    #[test]
    fn histogram_matches_direct_sums() {
        let f = f7();
        let chi = MultCharacter::new(&f, 3).unwrap();
        let cache = TableCache::new();
        let c = ComponentIndex::new(3, vec![2, 2]).unwrap();
        let r = empirical_trace_distribution(&f, &c, &chi, &cache, EnumOptions::default()).unwrap();
        let mut direct = Histogram::new(3);
        for v in c.variants() {
            let fam = Family::new(&f, 3, &v, &cache).unwrap();
            for t in fam.stream() {
                for a in 1..7 {
                    let s = crate::trace::projective_char_sum(&f, &t, FieldElement(a), &chi, &c.degrees).unwrap();
                    direct.add(s, BigRational::one());
                }
            }
        }
        assert_eq!(direct, r.histogram);
    }

    #[test]
    fn affine_totals() {
        let f = f7();
        let chi = MultCharacter::new(&f, 3).unwrap();
        let cache = TableCache::new();
        let r = affine_trace_distribution(&f, 3, &[2, 1], &chi, &cache, EnumOptions::default()).unwrap();
        assert_eq!(r.total, exact_count_factor_tuples(7, &[2, 1]));
        assert!(r.histogram.max_abs() <= 7.0 + 1e-9);
    }

    #[test]
    fn hyperelliptic_symmetry() {
        let f = FieldSpec::new(5, 1).unwrap();
        let cache = TableCache::new();
        let r = hyperelliptic_trace_distribution(&f, 1, &cache, EnumOptions::default()).unwrap();
        assert_eq!(r.histogram.negated(), r.histogram);
        for k in [1, 3, 5] {
            assert!(r.moment(k, 0).is_zero());
        }
        assert!(r.histogram.max_abs() <= 6.0);
        // |F̂_3| + |F̂_4| = q^4(1-1/q)^2 + q^5(1-1/q)^2
        assert_eq!(r.total, BigUint::from(16u32 * 25 + 16 * 125));
    }

    #[test]
    fn budget_is_enforced() {
        let f = f7();
        let chi = MultCharacter::new(&f, 3).unwrap();
        let cache = TableCache::new();
        let c = ComponentIndex::new(3, vec![4, 1]).unwrap();
        let opts = EnumOptions { workers: 1, budget: 10 };
        assert!(matches!(
            empirical_trace_distribution(&f, &c, &chi, &cache, opts),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn tv_examples() {
        let mut a = Histogram::new(3);
        a.add(CyclotomicInt::zero(3), BigRational::one());
        let mut b = Histogram::new(3);
        b.add(CyclotomicInt::scalar(3, 1), BigRational::one());
        assert_eq!(tv_distance(&a, &a).unwrap(), BigRational::zero());
        assert_eq!(tv_distance(&a, &b).unwrap(), BigRational::one());
        let mut c = Histogram::new(3);
        c.add(CyclotomicInt::zero(3), rat(1, 2));
        c.add(CyclotomicInt::scalar(3, 1), rat(1, 2));
        assert_eq!(tv_distance(&a, &c).unwrap(), tv_distance(&c, &a).unwrap());
        let mut d = c.clone();
        d.add(CyclotomicInt::zero(3), rat(1, 1));
        assert!(tv_distance(&a, &d).is_err());
    }

    #[test]
    fn galois_trace_of_units() {
        let z = CyclotomicInt::scalar(3, 1);
        assert_eq!(galois_trace(&z), 2);
        assert_eq!(galois_trace(&z.mul_zeta_pow(1)), -1);
        assert_eq!(galois_trace(&CyclotomicInt::scalar(2, 3)), 3);
    }

    #[test]
    fn sampled_members_are_admissible() {
        use rand::SeedableRng;
        let f = f7();
        let c = ComponentIndex::new(3, vec![4, 1]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (t, a, v) = sample_member(&f, &c, &mut rng).unwrap();
            assert!(!a.is_zero());
            assert_eq!(t.degrees(), v);
        }
    }
}
