//! Experiment configuration, orchestration, and report emission.
//!
//! A [`Report`] holds exact values only: rationals are decimal numerator and
//! denominator strings, and floating-point quantities appear as preformatted
//! strings in `approx` fields. Reports never contain timings or the worker
//! count, so they are byte-identical across runs.

use crate::counting::{
    brute_pattern_census, brute_residue_tuple_count, brute_value_census, euler_constant_k, euler_constant_l,
    exact_count_coprime_prescribed, exact_count_factor_tuples, exact_count_squarefree,
    exact_count_squarefree_k_roots, exact_count_squarefree_nonmonic, main_term_component_prescribed,
    main_term_squarefree_prescribed, pattern_census_tv, residue_tuple_count, value_census_max_error,
    MainTermPrediction, MAX_PATTERNS,
};
use crate::enumerate::{irreducible_polys, monic_polys, squarefree_polys, Family, TableCache};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec, MultCharacter};
use crate::moduli::{
    components_for_genus, empirical_trace_distribution, genus_of, hyperelliptic_trace_distribution,
    affine_trace_distribution, sample_member, total_trace, weighted_component_size, ComponentIndex,
    EmpiricalReport, EnumOptions,
};
use crate::poly::DensePoly;
use crate::rvmodel::{gaussian_mixed_moment, histogram_mixed_moment, model_mixed_moment, sum_distribution, Histogram, RVModel};
use crate::trace::{point_counts, projective_char_sum, zeta_from_counts};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What an experiment computes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact identities, each checked against exhaustive enumeration.
    #[default]
    VerifyExact,
    /// Enumerated counts against asymptotic main terms, as trend series.
    VerifyAsymptotic,
    /// Exact trace distributions against the i.i.d. model.
    Distribution,
    /// Mixed moments of traces against the model and the complex Gaussian.
    Moments,
    /// Truncations of the Euler constants `K` and `L_{r-1}`.
    Constants,
    /// Zeta functions of sampled curves: functional equation, Weil bound, trace consistency.
    ZetaCheck,
    /// Exact law and moments of the model sum.
    RvModel,
    /// The residue-tuple census behind the model probabilities.
    Heuristic,
}

impl Mode {
    fn needs_character(self) -> bool {
        matches!(self, Mode::VerifyExact | Mode::Distribution | Mode::Moments | Mode::ZetaCheck)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Full description of one run. Missing keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Field characteristic `ℓ`.
    pub characteristic: u32,
    /// Field degree `e`, so `q = ℓ^e`.
    pub ext_degree: u32,
    /// Cover degree.
    pub p: u32,
    /// Degree vectors: a ladder of components, or the bound for `verify-exact`.
    pub components: Vec<Vec<usize>>,
    /// Genera, for hyperelliptic distributions and zeta checks.
    pub genus: Vec<u32>,
    /// Moment orders `(j, k)`.
    pub moments: Vec<(u32, u32)>,
    /// Largest degree kept in Euler products.
    pub trunc: u32,
    /// Number of model variables in `rv-model` (default `q + 1`).
    pub n: Option<u32>,
    /// Also tabulate affine sums in `distribution`.
    pub affine: bool,
    /// Curves sampled per family in `zeta-check`.
    pub samples: u32,
    pub seed: u64,
    pub workers: usize,
    /// Cap on candidate tuples per enumeration.
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::VerifyExact,
            characteristic: 7,
            ext_degree: 1,
            p: 3,
            components: Vec::new(),
            genus: Vec::new(),
            moments: Vec::new(),
            trunc: 10,
            n: None,
            affine: false,
            samples: 20,
            seed: 0,
            workers: 1,
            budget: crate::moduli::DEFAULT_BUDGET as u64,
            out: None,
            format: Format::Json,
        }
    }
}

/// The parts of the configuration that determine the results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub characteristic: u32,
    pub ext_degree: u32,
    pub q: u64,
    pub p: u32,
    pub components: Vec<Vec<usize>>,
    pub genus: Vec<u32>,
    pub moments: Vec<(u32, u32)>,
    pub trunc: u32,
    pub n: Option<u32>,
    pub affine: bool,
    pub samples: u32,
    pub seed: u64,
    pub budget: u64,
}

impl ExperimentConfig {
    /// Checks the configuration and fills mode-specific defaults.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let field = FieldSpec::new(self.characteristic, self.ext_degree)?;
        let q = field.order() as u64;
        if !crate::gf::is_prime(self.p as u64) {
            return Err(Error::Config(format!("p = {} is not prime", self.p)));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if self.mode.needs_character() && (q - 1) % self.p as u64 != 0 {
            return Err(Error::Config(format!("mode {:?} needs q ≡ 1 mod p, got q = {q}, p = {}", self.mode, self.p)));
        }
        let mut c = self.clone();
        c.workers = c.workers.max(1);
        let r = (c.p as usize - 1).max(1);
        for d in &c.components {
            if d.len() != r {
                return Err(Error::Config(format!("degree vector {d:?} should have {r} entries for p = {}", c.p)));
            }
        }
        if c.components.is_empty() {
            c.components = default_components(c.mode, c.p);
        }
        if c.genus.is_empty() && (c.p == 2 || c.mode == Mode::ZetaCheck) {
            c.genus = vec![1, 2, 3];
        }
        if c.moments.is_empty() {
            c.moments = (0..=3).flat_map(|j| (0..=3).map(move |k| (j, k))).filter(|&(j, k)| j + k > 0).collect();
        }
        Ok(c)
    }

    pub fn echo(&self) -> Result<ConfigEcho> {
        let q = FieldSpec::new(self.characteristic, self.ext_degree)?.order() as u64;
        Ok(ConfigEcho {
            mode: self.mode,
            characteristic: self.characteristic,
            ext_degree: self.ext_degree,
            q,
            p: self.p,
            components: self.components.clone(),
            genus: self.genus.clone(),
            moments: self.moments.clone(),
            trunc: self.trunc,
            n: self.n,
            affine: self.affine,
            samples: self.samples,
            seed: self.seed,
            budget: self.budget,
        })
    }

    fn enum_options(&self) -> EnumOptions {
        EnumOptions { workers: self.workers, budget: self.budget as u128 }
    }
}

fn default_components(mode: Mode, p: u32) -> Vec<Vec<usize>> {
    match (mode, p) {
        (_, 2) => vec![vec![5]],
        (Mode::VerifyExact, 3) => vec![vec![4, 2]],
        (Mode::VerifyAsymptotic, 3) => vec![vec![2, 1], vec![4, 1], vec![6, 2]],
        (Mode::Distribution, 3) => vec![vec![2, 2], vec![4, 1], vec![3, 3]],
        (Mode::Moments, 3) => vec![vec![2, 2], vec![4, 1], vec![5, 2]],
        (Mode::VerifyExact, _) => vec![vec![1; p as usize - 1]],
        _ => Vec::new(),
    }
}

/// An exact rational as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Q {
    pub num: String,
    pub den: String,
}

impl Q {
    pub fn to_rational(&self) -> Result<BigRational> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|e| Error::Config(format!("bad integer {s:?}: {e}")));
        Ok(BigRational::new(parse(&self.num)?, parse(&self.den)?))
    }
}

impl From<&BigRational> for Q {
    fn from(r: &BigRational) -> Q {
        Q { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl From<&BigUint> for Q {
    fn from(n: &BigUint) -> Q {
        Q { num: n.to_string(), den: "1".into() }
    }
}

/// One exact assertion: a closed form against an independent computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub formula: String,
    pub brute: String,
    pub pass: bool,
}

impl Check {
    pub fn exact<T: PartialEq + Display>(name: impl Into<String>, formula: &T, brute: &T) -> Check {
        Check { name: name.into(), formula: formula.to_string(), brute: brute.to_string(), pass: formula == brute }
    }

    pub fn holds(name: impl Into<String>, claim: impl Into<String>, observed: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), formula: claim.into(), brute: observed.into(), pass }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    StrictlyDecreasing,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub label: String,
    pub exact: Option<Q>,
    pub approx: String,
}

/// A trend across a ladder of parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub claim: Claim,
    pub points: Vec<SeriesPoint>,
    pub holds: bool,
}

impl Series {
    /// Builds a series; the trend is judged exactly when every point is exact.
    pub fn new(name: impl Into<String>, claim: Claim, points: Vec<(String, Option<BigRational>, f64)>) -> Series {
        let holds = match claim {
            Claim::Informational => true,
            Claim::StrictlyDecreasing => {
                if points.iter().all(|p| p.1.is_some()) {
                    points.windows(2).all(|w| w[1].1 < w[0].1)
                } else {
                    points.windows(2).all(|w| w[1].2 < w[0].2)
                }
            }
        };
        let points = points
            .into_iter()
            .map(|(label, exact, approx)| SeriesPoint { label, exact: exact.as_ref().map(Q::from), approx: format!("{approx:.6e}") })
            .collect();
        Series { name: name.into(), claim, points, holds }
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.approx.parse().unwrap_or(f64::NAN)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRow {
    /// Coordinates in the basis `1, ζ, …, ζ^{p-2}`.
    pub coords: Vec<i64>,
    pub mass: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramTable {
    pub label: String,
    pub p: u32,
    pub rows: Vec<HistogramRow>,
    pub total: Q,
}

impl HistogramTable {
    pub fn new(label: impl Into<String>, h: &Histogram) -> HistogramTable {
        HistogramTable {
            label: label.into(),
            p: h.p(),
            rows: h
                .entries()
                .iter()
                .map(|(s, m)| HistogramRow { coords: s.coeffs().to_vec(), mass: Q::from(m) })
                .collect(),
            total: Q::from(&h.total()),
        }
    }
}

/// One mixed moment. Values are `raw · scale^{-⌊(j+k)/2⌋}`, with a further
/// `scale^{-1/2}` left symbolic when `odd_sqrt` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentRow {
    pub label: String,
    pub j: u32,
    pub k: u32,
    pub scale: u64,
    pub odd_sqrt: bool,
    /// Coordinates of the empirical value in the basis `1, ζ, …`.
    pub empirical: Vec<Q>,
    pub predicted: Q,
    pub gaussian_ref: String,
    /// `|empirical/predicted - 1|` when the prediction is nonzero.
    pub approx_rel_error: Option<String>,
}

/// Results of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigEcho,
    /// False when some items were skipped for exceeding the budget.
    pub complete: bool,
    pub skipped: Vec<String>,
    pub advisories: Vec<String>,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
    pub histograms: Vec<HistogramTable>,
    pub moments: Vec<MomentRow>,
}

impl Report {
    fn new(config: &ExperimentConfig) -> Result<Report> {
        Ok(Report {
            version: VERSION.into(),
            config: config.echo()?,
            complete: true,
            skipped: Vec::new(),
            advisories: Vec::new(),
            checks: Vec::new(),
            series: Vec::new(),
            histograms: Vec::new(),
            moments: Vec::new(),
        })
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Records a budget overrun instead of failing the run.
    fn absorb<T>(&mut self, item: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::Budget { needed, budget }) => {
                self.complete = false;
                self.skipped.push(format!("{item}: needs {needed} tuple evaluations, budget {budget}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn advise(&mut self, notes: Vec<String>) {
        for n in notes {
            if !self.advisories.contains(&n) {
                self.advisories.push(n);
            }
        }
    }
}

pub fn label(degrees: &[usize]) -> String {
    let parts: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
    format!("d{}", parts.join("_"))
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

// Exact check groups, shared by `verify-exact` and the acceptance tests.

/// `|F_d|` and `|F̂_d|` by enumeration against their closed forms.
pub fn squarefree_count_checks(field: &FieldSpec, max_d: u32) -> Vec<Check> {
    let q = field.order() as u64;
    let mut out = Vec::new();
    for d in 0..=max_d {
        let n = squarefree_polys(field, d as usize).count() as u64;
        out.push(Check::exact(format!("q={q} |F_{d}|"), &exact_count_squarefree(q, d), &big(n)));
        out.push(Check::exact(
            format!("q={q} |F^_{d}|"),
            &exact_count_squarefree_nonmonic(q, d),
            &(big(n) * big(q - 1)),
        ));
    }
    out
}

/// Monic polynomials of degree `d` with `ℓ ≤ 2` prescribed values, for every choice of
/// points and values: each count should be `q^{d-ℓ}`.
pub fn prescribed_value_checks(field: &FieldSpec, max_d: u32) -> Vec<Check> {
    let q = field.order() as usize;
    let mut out = Vec::new();
    for d in 0..=max_d as usize {
        let mut single = vec![0u64; q * q];
        let mut pairs = vec![0u64; q * q * q * q];
        let mut total = 0u64;
        for f in monic_polys(field, d) {
            total += 1;
            let vals: Vec<usize> = field.elements().map(|x| f.eval(field, x).0 as usize).collect();
            for x in 0..q {
                single[x * q + vals[x]] += 1;
                for y in x + 1..q {
                    pairs[((x * q + y) * q + vals[x]) * q + vals[y]] += 1;
                }
            }
        }
        let expect = |ell: usize| big((q as u64).pow((d - ell) as u32));
        out.push(Check::exact(format!("q={q} monic d={d} l=0"), &expect(0), &big(total)));
        let mut observed = |name: String, counts: Vec<u64>, ell: usize| {
            let mut distinct: Vec<u64> = counts;
            distinct.sort_unstable();
            distinct.dedup();
            let shown: Vec<String> = distinct.iter().map(|c| c.to_string()).collect();
            let pass = distinct.len() == 1 && big(distinct[0]) == expect(ell);
            out.push(Check::holds(name, expect(ell).to_string(), shown.join("|"), pass));
        };
        if d >= 1 {
            observed(format!("q={q} monic d={d} l=1 (all x, a)"), single, 1);
        }
        if d >= 2 {
            let mut used = Vec::new();
            for x in 0..q {
                for y in x + 1..q {
                    used.extend_from_slice(&pairs[(x * q + y) * q * q..(x * q + y + 1) * q * q]);
                }
            }
            observed(format!("q={q} monic d={d} l=2 (all x<y, a, b)"), used, 2);
        }
    }
    out
}

/// The three test moduli `X`, `X(X-1)` and the first irreducible quadratic.
pub fn test_moduli(field: &FieldSpec) -> Vec<(String, DensePoly)> {
    let x = DensePoly::x();
    let x1 = DensePoly::linear(field, FieldElement::ONE);
    let quad = irreducible_polys(field, 2).find(|p| p.degree() == Some(2)).expect("an irreducible quadratic exists");
    vec![("X".into(), x.clone()), ("X(X-1)".into(), x.mul(field, &x1)), ("quadratic".into(), quad)]
}

/// Monic `F` of degree `d` coprime to `U` with nonzero prescribed values, by enumeration,
/// for `U` in [`test_moduli`], `ℓ ∈ {0,1,2}` and every choice of nonzero values.
pub fn coprime_prescribed_checks(field: &FieldSpec, max_d: u32) -> Result<Vec<Check>> {
    let q = field.order() as usize;
    let mut out = Vec::new();
    for (uname, u) in test_moduli(field) {
        let rad: usize = crate::counting::irreducible_divisors(field, &u)?.iter().map(|p| p.degree().unwrap()).sum();
        let points: Vec<FieldElement> = field.elements().filter(|&x| !u.eval(field, x).is_zero()).take(2).collect();
        for d in rad as u32..=max_d {
            // Tally values at the two chosen points over monic F coprime to U.
            let mut counts = vec![0u64; q * q];
            for f in monic_polys(field, d as usize) {
                if DensePoly::gcd(field, &f, &u)?.degree() != Some(0) {
                    continue;
                }
                let a = f.eval(field, points[0]).0 as usize;
                let b = f.eval(field, points[1]).0 as usize;
                counts[a * q + b] += 1;
            }
            for ell in 0..=2usize {
                if (d as usize) < ell + rad {
                    continue;
                }
                let mut ok = true;
                let mut shown = Vec::new();
                let mut formula = BigUint::zero();
                for a in 1..q {
                    for b in 1..q {
                        let pts: Vec<(FieldElement, FieldElement)> =
                            [(points[0], a), (points[1], b)].iter().take(ell).map(|&(x, v)| (x, FieldElement(v as u32))).collect();
                        let brute: u64 = match ell {
                            0 => counts.iter().sum(),
                            1 => (0..q).map(|v| counts[a * q + v]).sum(),
                            _ => counts[a * q + b],
                        };
                        formula = exact_count_coprime_prescribed(field, d, &u, &pts)?;
                        ok &= formula == big(brute);
                        shown.push(brute);
                        if ell == 0 {
                            break;
                        }
                    }
                    if ell == 0 {
                        break;
                    }
                }
                shown.sort_unstable();
                shown.dedup();
                let shown: Vec<String> = shown.iter().map(|c| c.to_string()).collect();
                out.push(Check::holds(format!("q={q} U={uname} d={d} l={ell}"), formula.to_string(), shown.join("|"), ok));
            }
        }
    }
    Ok(out)
}

/// Tuple-family sizes from the generating function against enumeration, for all
/// degree vectors bounded componentwise by `bound`.
pub fn factor_tuple_checks(field: &FieldSpec, p: u32, bound: &[usize], cache: &TableCache, opts: EnumOptions) -> Result<Vec<Check>> {
    let q = field.order() as u64;
    let mut out = Vec::new();
    let mut d = vec![0usize; bound.len()];
    loop {
        if crate::moduli::work_estimate(q, &[d.clone()]) <= opts.budget {
            let n = Family::new(field, p, &d, cache)?.count(opts.workers)?;
            out.push(Check::exact(format!("q={q} |F_{d:?}|"), &exact_count_factor_tuples(q, &d), &big(n)));
        }
        let mut i = 0;
        loop {
            if i == d.len() {
                return Ok(out);
            }
            d[i] += 1;
            if d[i] <= bound[i] {
                break;
            }
            d[i] = 0;
            i += 1;
        }
    }
}

/// Square-free polynomials of degree `d` with exactly `k` roots.
pub fn k_roots_checks(field: &FieldSpec, max_d: u32) -> Vec<Check> {
    let q = field.order() as u64;
    let mut out = Vec::new();
    for d in 0..=max_d as usize {
        let mut by_k = vec![0u64; d + 1];
        for f in squarefree_polys(field, d) {
            by_k[f.roots(field).len()] += 1;
        }
        for (k, &n) in by_k.iter().enumerate() {
            out.push(Check::exact(format!("q={q} d={d} k={k} roots"), &exact_count_squarefree_k_roots(q, d, k), &big(n)));
        }
    }
    out
}

/// Residue tuples mod `(X-t)^2` and the value law they induce at `t`.
pub fn heuristic_checks(field: &FieldSpec, p: u32, t: FieldElement) -> Result<Vec<Check>> {
    let q = field.order() as u64;
    let census = brute_residue_tuple_count(field, p, t)?;
    let total = big(census.total);
    let mut out = vec![Check::exact(format!("q={q} p={p} residue tuples"), &residue_tuple_count(q, p), &total)];
    let p64 = p as u64;
    out.push(Check::exact(
        format!("q={q} p={p} P(value 0)"),
        &ratio(p64 - 1, q + p64 - 1),
        &ratio(census.value_counts[0], census.total),
    ));
    let nonzero = ratio(q, (q - 1) * (q + p64 - 1));
    let distinct: Vec<BigRational> = {
        let mut v: Vec<BigRational> = census.value_counts[1..].iter().map(|&c| ratio(c, census.total)).collect();
        v.sort();
        v.dedup();
        v
    };
    let shown: Vec<String> = distinct.iter().map(|r| r.to_string()).collect();
    out.push(Check::holds(
        format!("q={q} p={p} P(each nonzero value)"),
        nonzero.to_string(),
        shown.join("|"),
        distinct == vec![nonzero.clone()],
    ));
    Ok(out)
}

/// Exact laws and moments of the model sum.
pub fn rvmodel_checks(q: u64, p: u32, n: u32, max_order: u32) -> Result<Vec<Check>> {
    let model = RVModel::new(q, p)?;
    let h = sum_distribution(&model, n);
    let mut out = vec![
        Check::exact(format!("q={q} p={p} n={n} mass"), &BigRational::one(), &h.total()),
        Check::holds(format!("q={q} p={p} n={n} rotation invariance"), "equal", verdict(h.rotated(1) == h), h.rotated(1) == h),
        Check::exact(
            format!("q={q} p={p} single-variable total"),
            &BigRational::one(),
            &(&model.prob_zero + &model.prob_root * BigRational::from_integer(BigInt::from(p))),
        ),
    ];
    for j in 0..=max_order {
        for k in 0..=max_order {
            let dp = model_mixed_moment(&model, n, j, k);
            let hist = histogram_mixed_moment(&h, n as u64, j, k);
            out.push(Check::holds(
                format!("q={q} p={p} n={n} E[S^{j} S'^{k}] two routes"),
                dp.raw.coeffs()[0].to_string(),
                format!("{:?}", hist.raw.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                dp == hist,
            ));
        }
    }
    Ok(out)
}

fn verdict(b: bool) -> &'static str {
    if b {
        "equal"
    } else {
        "different"
    }
}

/// Outcome of the zeta checks on sampled members of one family.
pub struct ZetaSummary {
    pub curves: u32,
    pub equation_ok: u32,
    pub max_deviation: f64,
    pub trace_ok: u32,
}

/// Samples `samples` members of the closed family of `component`, recovers each
/// zeta numerator from point counts, and compares `q + 1 - N_1` with the total
/// character-sum trace `Σ_χ -Ŝ_χ`.
pub fn zeta_sample(
    field: &FieldSpec,
    component: &ComponentIndex,
    samples: u32,
    seed: u64,
) -> Result<ZetaSummary> {
    let q = field.order() as u64;
    let chi = MultCharacter::new(field, component.p)?;
    let g = component.genus();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = ZetaSummary { curves: 0, equation_ok: 0, max_deviation: 0.0, trace_ok: 0 };
    for _ in 0..samples {
        let (tuple, alpha, _) = sample_member(field, component, &mut rng)?;
        let counts = point_counts(field, &tuple, alpha, (2 * g).max(1))?;
        s.curves += 1;
        match zeta_from_counts(&counts[..2 * g as usize], q, g) {
            Ok(z) => {
                s.equation_ok += 1;
                s.max_deviation = s.max_deviation.max(z.max_root_deviation());
            }
            Err(Error::Integrity(_)) => s.max_deviation = f64::INFINITY,
            Err(e) => return Err(e),
        }
        let s_hat = projective_char_sum(field, &tuple, alpha, &chi, &component.degrees)?;
        if (q as i64 + 1 - counts[0] as i64) == total_trace(&s_hat) {
            s.trace_ok += 1;
        }
    }
    Ok(s)
}

/// Exact properties of one enumerated family distribution.
pub fn distribution_checks(field: &FieldSpec, component: &ComponentIndex, r: &EmpiricalReport) -> Vec<Check> {
    let q = field.order() as u64;
    let name = label(&component.degrees);
    let formula: BigUint =
        component.variants().iter().map(|v| exact_count_factor_tuples(q, v)).sum::<BigUint>() * big(q - 1);
    let mut out = vec![
        Check::exact(format!("{name} histogram total = |F^_[d]|"), &formula, &r.total),
        Check::holds(
            format!("{name} zeta_p rotation invariance"),
            "equal",
            verdict(r.histogram.rotated(1) == r.histogram),
            r.histogram.rotated(1) == r.histogram,
        ),
        Check::holds(
            format!("{name} support within |s| <= q+1"),
            format!("<= {}", q + 1),
            format!("{:.6}", r.histogram.max_abs()),
            r.histogram.max_abs() <= (q + 1) as f64 + 1e-9,
        ),
    ];
    if component.p == 2 {
        out.push(Check::holds(
            format!("{name} symmetric about 0"),
            "equal",
            verdict(r.histogram.negated() == r.histogram),
            r.histogram.negated() == r.histogram,
        ));
    }
    for j in 0..=6u32 {
        for k in 0..=6 - j {
            let vanishes = if component.p == 2 { (j + k) % 2 == 1 } else { (j + 3 * component.p - k) % component.p != 0 };
            if vanishes {
                let m = r.moment(j, k);
                out.push(Check::holds(format!("{name} M_{j},{k} = 0"), "0", if m.is_zero() { "0" } else { "nonzero" }, m.is_zero()));
            }
        }
    }
    out
}

/// Runs one experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let cfg = config.resolved()?;
    let field = FieldSpec::new(cfg.characteristic, cfg.ext_degree)?;
    let mut report = Report::new(&cfg)?;
    let cache = TableCache::new();
    match cfg.mode {
        Mode::VerifyExact => verify_exact(&cfg, &field, &cache, &mut report)?,
        Mode::VerifyAsymptotic => verify_asymptotic(&cfg, &field, &cache, &mut report)?,
        Mode::Distribution => distribution(&cfg, &field, &cache, &mut report)?,
        Mode::Moments => moments(&cfg, &field, &cache, &mut report)?,
        Mode::Constants => constants(&cfg, &field, &mut report)?,
        Mode::ZetaCheck => zeta_check(&cfg, &field, &mut report)?,
        Mode::RvModel => rv_model(&cfg, &field, &mut report)?,
        Mode::Heuristic => {
            report.checks.extend(heuristic_checks(&field, cfg.p, FieldElement::ZERO)?);
            report.checks.extend(heuristic_checks(&field, cfg.p, FieldElement::ONE)?);
        }
    }
    Ok(report)
}

fn verify_exact(cfg: &ExperimentConfig, field: &FieldSpec, cache: &TableCache, report: &mut Report) -> Result<()> {
    let q = field.order() as u64;
    let bound = cfg.components[0].clone();
    // Keep single-polynomial enumerations to about 10^6 candidates.
    let mut max_d = bound.iter().sum::<usize>().max(2) as u32;
    while max_d > 2 && q.saturating_pow(max_d) > 1_000_000 {
        max_d -= 1;
    }
    report.checks.extend(squarefree_count_checks(field, max_d));
    report.checks.extend(prescribed_value_checks(field, max_d.min(4)));
    report.checks.extend(coprime_prescribed_checks(field, max_d.min(4))?);
    report.checks.extend(k_roots_checks(field, max_d.min(5)));
    let opts = cfg.enum_options();
    if cfg.p >= 3 {
        let r = factor_tuple_checks(field, cfg.p, &bound, cache, opts);
        if let Some(c) = report.absorb("factor tuples", r)? {
            report.checks.extend(c);
        }
    }
    report.checks.extend(heuristic_checks(field, cfg.p, FieldElement::ZERO)?);
    report.checks.extend(rvmodel_checks(q, cfg.p, 4, 3)?);
    let mass = sum_distribution(&RVModel::new(q, cfg.p)?, q as u32 + 1).total();
    report.checks.push(Check::exact(format!("q={q} n={} model mass", q + 1), &BigRational::one(), &mass));

    // The largest component inside the bound, for trace and moduli checks.
    let component = (0..=20u32)
        .rev()
        .flat_map(|g| components_for_genus(g, cfg.p).unwrap_or_default())
        .find(|c| {
            if cfg.p == 2 {
                c.degrees[0] <= bound[0].max(2)
            } else {
                c.degrees.iter().zip(&bound).all(|(d, b)| d <= b)
            }
        });
    let Some(component) = component else {
        report.advisories.push(format!("no component fits inside {bound:?}; trace and moduli checks skipped"));
        return Ok(());
    };
    let name = label(&component.degrees);
    let (rr, g) = genus_of(&component.degrees, cfg.p);
    report.checks.push(Check::exact(format!("{name} genus (p-1)(R-2)/2"), &g, &(((cfg.p - 1) as usize * (rr - 2) / 2) as u32)));
    if cfg.p == 3 {
        let (r, s) = component.signature()?;
        let back = ComponentIndex::from_signature(r, s)?;
        report.checks.push(Check::holds(format!("{name} signature ({r},{s}) round trip"), name.clone(), label(&back.degrees), back == component));
    }
    let z = zeta_sample(field, &component, 5, cfg.seed)?;
    report.checks.push(Check::exact(format!("{name} zeta functional equation"), &z.curves, &z.equation_ok));
    report.checks.push(Check::exact(format!("{name} q+1-N_1 = sum of -S^ over characters"), &z.curves, &z.trace_ok));

    let chi = MultCharacter::new(field, cfg.p)?;
    let dist = empirical_trace_distribution(field, &component, &chi, cache, opts);
    if let Some(r) = report.absorb(&format!("distribution {name}"), dist)? {
        report.checks.extend(distribution_checks(field, &component, &r));
        let rc = empirical_trace_distribution(field, &component, &chi.conjugate(), cache, opts)?;
        report.checks.push(Check::holds(
            format!("{name} conjugate character conjugates the histogram"),
            "equal",
            verdict(rc.histogram == r.histogram.conjugated()),
            rc.histogram == r.histogram.conjugated(),
        ));
        let w = weighted_component_size(field, &component, cache, opts)?;
        let from_hist = BigRational::new(BigInt::from(r.total.clone()), BigInt::from(q * (q * q - 1)));
        report.checks.push(Check::exact(format!("{name} weighted size"), &w, &from_hist));
        report.advise(r.advisories.clone());
    }
    Ok(())
}

fn comparison_main_term(q: u64, p: u32, degrees: &[usize], ell: u32, trunc: u32) -> Result<MainTermPrediction> {
    if p == 2 {
        main_term_squarefree_prescribed(q, degrees[0] as u32, ell, 0)
    } else {
        let d: Vec<u32> = degrees.iter().map(|&d| d as u32).collect();
        main_term_component_prescribed(q, &d, ell, 0, trunc)
    }
}

fn verify_asymptotic(cfg: &ExperimentConfig, field: &FieldSpec, cache: &TableCache, report: &mut Report) -> Result<()> {
    let q = field.order() as u64;
    let opts = cfg.enum_options();
    let mut counts = Vec::new();
    let mut values = Vec::new();
    let mut patterns = Vec::new();
    let chi = MultCharacter::new(field, cfg.p).ok();
    for d in &cfg.components {
        let name = label(d);
        if crate::moduli::work_estimate(q, &[d.clone()]) > opts.budget {
            let _ = report.absorb::<()>(&name, Err(Error::Budget { needed: crate::moduli::work_estimate(q, &[d.clone()]), budget: opts.budget }))?;
            continue;
        }
        let census = brute_value_census(field, cfg.p, d, cache, opts.workers)?;
        let main = comparison_main_term(q, cfg.p, d, 0, cfg.trunc)?;
        let rel = main.relative_error(&big(census.total));
        counts.push((name.clone(), None, rel.abs()));
        let main1 = comparison_main_term(q, cfg.p, d, 1, cfg.trunc)?;
        values.push((name.clone(), None, value_census_max_error(&census, &main1)));
        let pattern_size = (cfg.p as u64 + 1).checked_pow(q as u32).unwrap_or(u64::MAX);
        if let (Some(chi), true) = (&chi, cfg.p >= 3 && pattern_size <= MAX_PATTERNS) {
            let pat = brute_pattern_census(field, chi, d, cache, opts.workers)?;
            let dd: Vec<u32> = d.iter().map(|&x| x as u32).collect();
            let tv = pattern_census_tv(&pat, q, cfg.p, &dd)?;
            let approx = tv.to_f64().unwrap_or(f64::NAN);
            patterns.push((name, Some(tv), approx));
        }
    }
    report.series.push(Series::new("|family size / main term - 1|", Claim::StrictlyDecreasing, counts));
    report.series.push(Series::new("max |count(F(x)=a) / main term - 1|", Claim::StrictlyDecreasing, values));
    if !patterns.is_empty() {
        report.series.push(Series::new("TV(character patterns, main term)", Claim::StrictlyDecreasing, patterns));
    }
    Ok(())
}

fn family_reports(
    cfg: &ExperimentConfig,
    field: &FieldSpec,
    cache: &TableCache,
    report: &mut Report,
) -> Result<Vec<(ComponentIndex, EmpiricalReport)>> {
    let opts = cfg.enum_options();
    let mut out = Vec::new();
    if cfg.p == 2 {
        for &g in &cfg.genus {
            let c = ComponentIndex::hyperelliptic(g);
            let r = hyperelliptic_trace_distribution(field, g, cache, opts);
            if let Some(r) = report.absorb(&format!("genus {g}"), r)? {
                out.push((c, r));
            }
        }
    } else {
        let chi = MultCharacter::new(field, cfg.p)?;
        for d in &cfg.components {
            let c = ComponentIndex::new(cfg.p, d.clone())?;
            let r = empirical_trace_distribution(field, &c, &chi, cache, opts);
            if let Some(r) = report.absorb(&label(d), r)? {
                out.push((c, r));
            }
        }
    }
    Ok(out)
}

fn family_label(c: &ComponentIndex) -> String {
    if c.p == 2 {
        format!("g{}", c.genus())
    } else {
        label(&c.degrees)
    }
}

fn distribution(cfg: &ExperimentConfig, field: &FieldSpec, cache: &TableCache, report: &mut Report) -> Result<()> {
    let reports = family_reports(cfg, field, cache, report)?;
    let mut tv = Vec::new();
    let mut rel = Vec::new();
    for (c, r) in &reports {
        let name = family_label(c);
        report.checks.extend(distribution_checks(field, c, r));
        report.histograms.push(HistogramTable::new(format!("{name}_empirical"), &r.histogram));
        if report.histograms.iter().all(|h| h.label != format!("model_n{}", r.model_n)) {
            report.histograms.push(HistogramTable::new(format!("model_n{}", r.model_n), &r.prediction));
        }
        tv.push((name.clone(), Some(r.tv.clone()), r.tv.to_f64().unwrap_or(f64::NAN)));
        rel.push((name, Some(r.max_rel_error.clone()), r.max_rel_error.to_f64().unwrap_or(f64::NAN)));
        report.advise(r.advisories.clone());
    }
    report.series.push(Series::new("TV(empirical, model)", Claim::StrictlyDecreasing, tv));
    report.series.push(Series::new("max per-bin relative error", Claim::Informational, rel));
    if cfg.affine && cfg.p >= 3 {
        let chi = MultCharacter::new(field, cfg.p)?;
        let mut atv = Vec::new();
        for d in &cfg.components {
            let r = affine_trace_distribution(field, cfg.p, d, &chi, cache, cfg.enum_options());
            if let Some(r) = report.absorb(&format!("affine {}", label(d)), r)? {
                let name = format!("affine_{}", label(d));
                let exact = exact_count_factor_tuples(field.order() as u64, d);
                report.checks.push(Check::exact(format!("{name} histogram total = |F_d|"), &exact, &r.total));
                report.histograms.push(HistogramTable::new(format!("{name}_empirical"), &r.histogram));
                atv.push((name, Some(r.tv.clone()), r.tv.to_f64().unwrap_or(f64::NAN)));
            }
        }
        report.series.push(Series::new("affine TV(empirical, model)", Claim::StrictlyDecreasing, atv));
    }
    Ok(())
}

fn moment_row(name: &str, j: u32, k: u32, emp: &crate::rvmodel::NormalizedMoment, pred: &crate::rvmodel::NormalizedMoment) -> MomentRow {
    let n = BigRational::from_integer(BigInt::from(emp.scale));
    let half = num_traits::Pow::pow(n, (j + k) / 2);
    let empirical: Vec<Q> = emp.raw.coeffs().iter().map(|c| Q::from(&(c / &half))).collect();
    let predicted = &pred.raw.coeffs()[0] / &half;
    let rel = (!predicted.is_zero()).then(|| {
        let e = emp.to_complex();
        let p = pred.to_complex();
        format!("{:.6e}", (e / p - 1.0).norm())
    });
    MomentRow {
        label: name.into(),
        j,
        k,
        scale: emp.scale,
        odd_sqrt: (j + k) % 2 == 1,
        empirical,
        predicted: Q::from(&predicted),
        gaussian_ref: gaussian_mixed_moment(j, k).to_string(),
        approx_rel_error: rel,
    }
}

fn moments(cfg: &ExperimentConfig, field: &FieldSpec, cache: &TableCache, report: &mut Report) -> Result<()> {
    let q = field.order() as u64;
    let model = RVModel::new(q, cfg.p)?;
    let reports = family_reports(cfg, field, cache, report)?;
    let mut trends: Vec<((u32, u32), Vec<(String, Option<BigRational>, f64)>)> = Vec::new();
    for (c, r) in &reports {
        let name = family_label(c);
        report.checks.extend(distribution_checks(field, c, r).into_iter().filter(|ch| ch.name.contains("M_")));
        for &(j, k) in &cfg.moments {
            let emp = r.moment(j, k);
            let pred = model_mixed_moment(&model, q as u32 + 1, j, k);
            let row = moment_row(&name, j, k, &emp, &pred);
            if j == k && j > 0 {
                let e = emp.rational_value().unwrap_or_else(BigRational::zero);
                let p = pred.rational_value().unwrap_or_else(BigRational::one);
                let dev = (e / p - BigRational::one()).abs();
                let approx = dev.to_f64().unwrap_or(f64::NAN);
                match trends.iter_mut().find(|t| t.0 == (j, k)) {
                    Some(t) => t.1.push((name.clone(), Some(dev), approx)),
                    None => trends.push(((j, k), vec![(name.clone(), Some(dev), approx)])),
                }
            }
            report.moments.push(row);
        }
        report.advise(r.advisories.clone());
    }
    for ((j, k), pts) in trends {
        report.series.push(Series::new(format!("|M_{j},{k} / model - 1|"), Claim::StrictlyDecreasing, pts));
    }
    Ok(())
}

fn constants(cfg: &ExperimentConfig, field: &FieldSpec, report: &mut Report) -> Result<()> {
    let q = field.order() as u64;
    let mut k_pts = Vec::new();
    let mut tails = Vec::new();
    for t in 1..=cfg.trunc {
        let k = euler_constant_k(q, t)?;
        k_pts.push((format!("N={t}"), None, k.partial()));
        tails.push((format!("N={t}"), None, k.partial() - k.lower_bound()));
    }
    report.series.push(Series::new("K truncated at degree N", Claim::StrictlyDecreasing, k_pts));
    report.series.push(Series::new("K truncation minus rigorous lower bound", Claim::Informational, tails));
    let k = euler_constant_k(q, cfg.trunc)?;
    let l1 = euler_constant_l(q, 2, cfg.trunc)?;
    report.checks.push(Check::holds(
        "L_1 = K factor by factor",
        "equal",
        verdict(k.degree_factors() == l1.degree_factors() && k.multiplicities == l1.multiplicities),
        k.degree_factors() == l1.degree_factors() && k.multiplicities == l1.multiplicities,
    ));
    if cfg.p > 3 {
        let mut l_pts = Vec::new();
        for t in 1..=cfg.trunc {
            l_pts.push((format!("N={t}"), None, euler_constant_l(q, cfg.p - 1, t)?.partial()));
        }
        report.series.push(Series::new(format!("L_{} truncated at degree N", cfg.p - 2), Claim::StrictlyDecreasing, l_pts));
    }
    Ok(())
}

fn zeta_check(cfg: &ExperimentConfig, field: &FieldSpec, report: &mut Report) -> Result<()> {
    let mut seed = cfg.seed;
    for &g in &cfg.genus {
        for c in components_for_genus(g, cfg.p)? {
            // Skip components whose sampled members would be too degenerate to sample.
            if c.degrees.iter().sum::<usize>() < 2 {
                continue;
            }
            let name = family_label(&c);
            let name = if cfg.p == 2 { name } else { format!("{name} (g={g})") };
            let s = zeta_sample(field, &c, cfg.samples, seed)?;
            seed = seed.wrapping_add(1);
            report.checks.push(Check::exact(format!("{name} functional equation"), &s.curves, &s.equation_ok));
            report.checks.push(Check::holds(
                format!("{name} max ||alpha| - sqrt q|"),
                "< 1e-9",
                format!("{:.3e}", s.max_deviation),
                s.max_deviation < 1e-9,
            ));
            report.checks.push(Check::exact(format!("{name} q+1-N_1 = sum of -S^"), &s.curves, &s.trace_ok));
        }
    }
    Ok(())
}

fn rv_model(cfg: &ExperimentConfig, field: &FieldSpec, report: &mut Report) -> Result<()> {
    let q = field.order() as u64;
    let n = cfg.n.unwrap_or(q as u32 + 1);
    let model = RVModel::new(q, cfg.p)?;
    let h = sum_distribution(&model, n);
    report.checks.push(Check::exact(format!("n={n} total mass"), &BigRational::one(), &h.total()));
    report.checks.push(Check::holds(format!("n={n} rotation invariance"), "equal", verdict(h.rotated(1) == h), h.rotated(1) == h));
    report.histograms.push(HistogramTable::new(format!("model_n{n}"), &h));
    for &(j, k) in &cfg.moments {
        let dp = model_mixed_moment(&model, n, j, k);
        let hist = histogram_mixed_moment(&h, n as u64, j, k);
        report.checks.push(Check::holds(format!("E[S^{j} S'^{k}] two routes"), "equal", verdict(dp == hist), dp == hist));
        report.moments.push(moment_row(&format!("model_n{n}"), j, k, &hist, &dp));
    }
    Ok(())
}

// Emission.

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

pub fn to_json(report: &Report) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Internal(format!("json: {e}")))
}

pub fn from_json(s: &str) -> Result<Report> {
    serde_json::from_str(s).map_err(|e| Error::Config(format!("json: {e}")))
}

/// Histogram CSV: coordinates `c0, c1, …` then the exact mass.
pub fn histogram_csv(h: &HistogramTable) -> String {
    let width = (h.p as usize - 1).max(1);
    let mut s: String = (0..width).map(|i| format!("c{i},")).collect();
    s += "mass_numerator,mass_denominator\n";
    for r in &h.rows {
        for c in &r.coords {
            s += &format!("{c},");
        }
        s += &format!("{},{}\n", r.mass.num, r.mass.den);
    }
    s
}

/// Moments CSV. Each row is one coordinate of the empirical value; the prediction and
/// Gaussian reference are rational and sit on coordinate 0.
pub fn moments_csv(rows: &[MomentRow]) -> String {
    let mut s = String::from(
        "j,k,empirical_num,empirical_den,predicted_num,predicted_den,gaussian_ref,label,coord,odd_sqrt,scale,approx_rel_error\n",
    );
    for r in rows {
        for (i, e) in r.empirical.iter().enumerate() {
            let (pn, pd, g) = if i == 0 { (r.predicted.num.as_str(), r.predicted.den.as_str(), r.gaussian_ref.as_str()) } else { ("0", "1", "0") };
            s += &format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.j,
                r.k,
                e.num,
                e.den,
                pn,
                pd,
                g,
                r.label,
                i,
                r.odd_sqrt,
                r.scale,
                r.approx_rel_error.as_deref().unwrap_or("")
            );
        }
    }
    s
}

fn checks_csv(checks: &[Check]) -> String {
    let mut s = String::from("name,formula,brute,pass\n");
    for c in checks {
        s += &format!("{},{},{},{}\n", csv_field(&c.name), csv_field(&c.formula), csv_field(&c.brute), c.pass);
    }
    s
}

fn series_csv(series: &[Series]) -> String {
    let mut s = String::from("series,label,exact_num,exact_den,approx,claim,holds\n");
    for se in series {
        for p in &se.points {
            let (n, d) = p.exact.as_ref().map_or(("", ""), |q| (q.num.as_str(), q.den.as_str()));
            s += &format!("{},{},{},{},{},{:?},{}\n", csv_field(&se.name), p.label, n, d, p.approx, se.claim, se.holds);
        }
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the report into `dir`: `report.json`, or one CSV per table.
pub fn emit(report: &Report, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    match format {
        Format::Json => files.push((dir.join("report.json"), to_json(report)? + "\n")),
        Format::Csv => {
            files.push((dir.join("checks.csv"), checks_csv(&report.checks)));
            files.push((dir.join("series.csv"), series_csv(&report.series)));
            files.push((dir.join("moments.csv"), moments_csv(&report.moments)));
            for h in &report.histograms {
                files.push((dir.join(format!("histogram_{}.csv", h.label)), histogram_csv(h)));
            }
        }
    }
    for (path, body) in &files {
        fs::write(path, body).map_err(io_err(path))?;
    }
    Ok(files.into_iter().map(|f| f.0).collect())
}

/// Plain-text summary for the terminal; the only place floats are shown bare.
pub fn summary(report: &Report) -> String {
    let c = &report.config;
    let mut s = format!("pfold {} | mode {:?} | q = {} | p = {}\n", report.version, c.mode, c.q, c.p);
    let failed = report.failures();
    s += &format!("checks: {} passed, {} failed\n", report.checks.len() - failed, failed);
    for ch in report.checks.iter().filter(|c| !c.pass) {
        s += &format!("  FAIL {}: expected {}, got {}\n", ch.name, ch.formula, ch.brute);
    }
    for se in &report.series {
        let vals: Vec<String> = se.points.iter().map(|p| format!("{}={}", p.label, p.approx)).collect();
        let tag = match se.claim {
            Claim::StrictlyDecreasing if se.holds => "decreasing",
            Claim::StrictlyDecreasing => "NOT decreasing",
            Claim::Informational => "info",
        };
        s += &format!("series {} [{tag}]: {}\n", se.name, vals.join(" "));
    }
    for r in &report.moments {
        if let Some(e) = &r.approx_rel_error {
            s += &format!("moment {} ({},{}): rel. error {e}\n", r.label, r.j, r.k);
        }
    }
    if !report.complete {
        s += "INCOMPLETE:\n";
        for k in &report.skipped {
            s += &format!("  skipped {k}\n");
        }
    }
    for a in &report.advisories {
        s += &format!("note: {a}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> ExperimentConfig {
        ExperimentConfig { mode, ..Default::default() }
    }

    #[test]
    fn rv_model_mode_sums_to_one() {
        let mut c = cfg(Mode::RvModel);
        c.n = Some(8);
        let r = run(&c).unwrap();
        assert_eq!(r.failures(), 0);
        assert_eq!(r.histograms[0].total, Q { num: "1".into(), den: "1".into() });
    }

    #[test]
    fn json_round_trip() {
        let mut c = cfg(Mode::Distribution);
        c.components = vec![vec![2, 2]];
        let r = run(&c).unwrap();
        assert_eq!(from_json(&to_json(&r).unwrap()).unwrap(), r);
        assert_eq!(r.failures(), 0);
    }

    #[test]
    fn empty_histogram_is_header_only() {
        let h = HistogramTable::new("empty", &Histogram::new(3));
        assert_eq!(histogram_csv(&h), "c0,c1,mass_numerator,mass_denominator\n");
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = cfg(Mode::Distribution);
        c.characteristic = 5;
        assert!(matches!(run(&c), Err(Error::Config(_))));
        let mut c = cfg(Mode::RvModel);
        c.budget = 0;
        assert!(run(&c).is_err());
        let mut c = cfg(Mode::Distribution);
        c.components = vec![vec![3]];
        assert!(run(&c).is_err());
    }

    #[test]
    fn budget_marks_report_incomplete() {
        let mut c = cfg(Mode::Distribution);
        c.components = vec![vec![2, 2], vec![9, 9]];
        let r = run(&c).unwrap();
        assert!(!r.complete);
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.histograms.len(), 2);
    }
}
