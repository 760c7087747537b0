//! Acceptance criteria. Runs without the libtest harness so every criterion prints its
//! sub-checks and a `criterion N: PASS|FAIL` line; the process fails if any criterion does.
//! Arguments that do not start with `-` select criteria by substring of the function name.

use num_bigint::BigUint;
use std::process::ExitCode;
use std::time::Instant;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use pfold::counting::{
    brute_pattern_census, brute_value_census, euler_constant_k, euler_constant_l, main_term_component_prescribed,
    pattern_census_tv, value_census_max_error,
};
use pfold::cyclo::CyclotomicInt;
use pfold::enumerate::TableCache;
use pfold::experiment::{
    coprime_prescribed_checks, heuristic_checks, prescribed_value_checks, run, squarefree_count_checks, to_json,
    zeta_sample, Check, ExperimentConfig, Mode,
};
use pfold::gf::{FieldElement, FieldSpec, MultCharacter};
use pfold::moduli::{
    affine_trace_distribution, components_for_genus, empirical_trace_distribution, hyperelliptic_trace_distribution,
    work_estimate, ComponentIndex, EmpiricalReport, EnumOptions, DEFAULT_BUDGET,
};
use pfold::rvmodel::{
    gaussian_mixed_moment, histogram_mixed_moment, model_mixed_moment, sum_distribution, Histogram, RVModel,
};

struct Criterion {
    id: u32,
    title: &'static str,
    lines: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, lines: Vec::new() }
    }

    fn check(&mut self, pass: bool, msg: impl Into<String>) {
        self.lines.push((pass, msg.into()));
    }

    fn checks(&mut self, group: &str, checks: &[Check]) {
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        self.check(failed.is_empty(), format!("{group}: {}/{} exact checks", checks.len() - failed.len(), checks.len()));
        for c in failed {
            self.check(false, format!("  {}: expected {}, got {}", c.name, c.formula, c.brute));
        }
    }

    fn finish(self) -> bool {
        for (pass, msg) in &self.lines {
            println!("  [{}] {msg}", if *pass { "ok" } else { "FAIL" });
        }
        let pass = self.lines.iter().all(|l| l.0);
        println!("criterion {}: {} ({})", self.id, if pass { "PASS" } else { "FAIL" }, self.title);
        pass
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" > ")
}

fn f(l: u32, e: u32) -> FieldSpec {
    FieldSpec::new(l, e).unwrap()
}

fn opts() -> EnumOptions {
    EnumOptions::default()
}

fn criterion_01_exact_counting() -> bool {
    let mut c = Criterion::new(1, "exact counting suite, zero tolerance");
    for (l, e) in [(2, 2), (5, 1), (7, 1)] {
        let field = f(l, e);
        let q = field.order();
        c.checks(&format!("q={q} |F_d|, |F^_d|, d<=6"), &squarefree_count_checks(&field, 6));
        c.checks(&format!("q={q} prescribed values, l<=2, d<=6"), &prescribed_value_checks(&field, 6));
        c.checks(&format!("q={q} coprime to U, l in 0..2, d<=6"), &coprime_prescribed_checks(&field, 6).unwrap());
    }
    c.finish()
}

fn criterion_02_residue_tuples() -> bool {
    let mut c = Criterion::new(2, "residue tuples and induced value law, zero tolerance");
    for (l, e, p) in [(7, 1, 3), (2, 2, 3), (7, 1, 2), (11, 1, 5)] {
        let field = f(l, e);
        for t in [FieldElement::ZERO, FieldElement::ONE] {
            c.checks(&format!("q={} p={p} t={}", field.order(), t.0), &heuristic_checks(&field, p, t).unwrap());
        }
    }
    c.finish()
}

/// Law of the model sum by summing over all `(p+1)^n` outcome tuples.
fn outcome_enumeration(m: &RVModel, n: u32) -> Histogram {
    let p = m.p;
    let mut outcomes = vec![(CyclotomicInt::zero(p), m.prob_zero.clone())];
    for e in 0..p {
        outcomes.push((CyclotomicInt::scalar(p, 1).mul_zeta_pow(e), m.prob_root.clone()));
    }
    let b = outcomes.len();
    let mut h = Histogram::new(p);
    for mut code in 0..b.pow(n) {
        let mut s = CyclotomicInt::zero(p);
        let mut w = BigRational::one();
        for _ in 0..n {
            s = &s + &outcomes[code % b].0;
            w *= &outcomes[code % b].1;
            code /= b;
        }
        h.add(s, w);
    }
    h
}

fn criterion_03_rv_model() -> bool {
    let mut c = Criterion::new(3, "model sums and moments");
    for (q, p) in [(7u64, 3u32), (7, 2), (11, 5)] {
        let m = RVModel::new(q, p).unwrap();
        // The p = 5 support grows like n^4, so its mass check stops earlier.
        let max_mass = if p == 5 { 16 } else { 50 };
        let bad: Vec<u32> = (0..=max_mass).filter(|&n| sum_distribution(&m, n).total() != BigRational::one()).collect();
        c.check(bad.is_empty(), format!("q={q} p={p}: total mass exactly 1 for n = 0..={max_mass} (failures {bad:?})"));
        let max_n = if p == 5 { 4 } else { 6 };
        let bad: Vec<u32> = (0..=max_n)
            .filter(|&n| {
                let mut conv = sum_distribution(&m, n);
                conv.n_vars = None;
                conv != outcome_enumeration(&m, n)
            })
            .collect();
        c.check(bad.is_empty(), format!("q={q} p={p}: convolution = outcome enumeration for n <= {max_n} (failures {bad:?})"));
    }
    let m = RVModel::new(7, 3).unwrap();
    for n in [3u32, 8] {
        let h = sum_distribution(&m, n);
        let mut ok = true;
        for j in 0..=4 {
            for k in 0..=4 {
                ok &= model_mixed_moment(&m, n, j, k) == histogram_mixed_moment(&h, n as u64, j, k);
            }
        }
        c.check(ok, format!("q=7 n={n}: expansion and convolution moments agree exactly for j,k <= 4"));
    }
    for k in 1..=3u32 {
        let gauss = BigRational::from_integer(gaussian_mixed_moment(k, k).into());
        let devs: Vec<f64> = [7u64, 13, 31, 61]
            .iter()
            .map(|&q| {
                let m = RVModel::new(q, 3).unwrap();
                let v = model_mixed_moment(&m, q as u32 + 1, k, k).rational_value().unwrap();
                (v - &gauss).to_f64().unwrap().abs()
            })
            .collect();
        c.check(strictly_decreasing(&devs), format!("|E|S/sqrt n|^{} - {k}!| over q = 7,13,31,61: {}", 2 * k, fmt(&devs)));
    }
    c.finish()
}

fn criterion_04_main_terms() -> bool {
    let mut c = Criterion::new(4, "asymptotic main terms at q = 7");
    let field = f(7, 1);
    let chi = MultCharacter::new(&field, 3).unwrap();
    let cache = TableCache::new();
    let trunc = 12;
    let mut size_err = Vec::new();
    for d in [[2usize, 1], [4, 1], [6, 2]] {
        let n = pfold::enumerate::Family::new(&field, 3, &d, &cache).unwrap().count(1).unwrap();
        let mt = main_term_component_prescribed(7, &[d[0] as u32, d[1] as u32], 0, 0, trunc).unwrap();
        size_err.push(mt.relative_error(&BigUint::from(n)).abs());
    }
    c.check(size_err[2] < 0.05, format!("|F_(6,2)| / (K q^8 / zeta(2)^2) within 5%: |ratio - 1| = {:.6}", size_err[2]));
    c.check(
        strictly_decreasing(&size_err),
        format!("|ratio - 1| strictly improving along (2,1), (4,1), (6,2): {}", fmt(&size_err)),
    );
    let mut value_err = Vec::new();
    let mut pattern_tv = Vec::new();
    for d1 in [3usize, 5, 7] {
        let d = [d1, 2];
        let census = brute_value_census(&field, 3, &d, &cache, 1).unwrap();
        let mt = main_term_component_prescribed(7, &[d1 as u32, 2], 1, 0, trunc).unwrap();
        value_err.push(value_census_max_error(&census, &mt));
        let pat = brute_pattern_census(&field, &chi, &d, &cache, 1).unwrap();
        pattern_tv.push(pattern_census_tv(&pat, 7, 3, &[d1 as u32, 2]).unwrap().to_f64().unwrap());
    }
    c.check(
        strictly_decreasing(&value_err),
        format!("prescribed value l=1, max over (x, a) of |count/main - 1|, d1 = 3,5,7: {}", fmt(&value_err)),
    );
    c.check(
        strictly_decreasing(&pattern_tv),
        format!("character patterns, TV to main-term probabilities, d1 = 3,5,7: {}", fmt(&pattern_tv)),
    );
    c.finish()
}

fn tv(r: &EmpiricalReport) -> f64 {
    r.tv.to_f64().unwrap()
}

fn criterion_05_trace_distribution() -> bool {
    let mut c = Criterion::new(5, "trigonal trace distributions at q = 7");
    let field = f(7, 1);
    let chi = MultCharacter::new(&field, 3).unwrap();
    let cache = TableCache::new();
    let ladder = [[2usize, 2], [4, 1], [3, 3]];
    // Further components, in increasing degree sum, used when the ladder end is not yet below 0.05.
    let extension = [[5usize, 2], [4, 4], [6, 3]];
    let mut tvs = Vec::new();
    let mut last = None;
    for d in ladder.iter().chain(extension.iter()) {
        let comp = ComponentIndex::new(3, d.to_vec()).unwrap();
        if work_estimate(7, &comp.variants()) > DEFAULT_BUDGET {
            continue;
        }
        let r = empirical_trace_distribution(&field, &comp, &chi, &cache, opts()).unwrap();
        let expect: BigUint =
            comp.variants().iter().map(|v| pfold::counting::exact_count_factor_tuples(7, v)).sum::<BigUint>()
                * BigUint::from(6u32);
        c.check(r.total == expect, format!("{d:?}: histogram mass = |F^_[d]| = {expect}"));
        c.check(r.histogram.rotated(1) == r.histogram, format!("{d:?}: zeta_3 rotation invariance"));
        if ladder.contains(d) {
            tvs.push(tv(&r));
        }
        last = Some((*d, tv(&r)));
    }
    c.check(strictly_decreasing(&tvs), format!("TV strictly decreasing along (2,2), (4,1), (3,3): {}", fmt(&tvs)));
    let (d, t) = last.unwrap();
    c.check(t < 0.05, format!("TV at the largest component within budget {d:?}: {t:.6} < 0.05"));
    let mut atvs = Vec::new();
    let mut alast = None;
    for d in ladder.iter().chain(extension.iter()) {
        if work_estimate(7, &[d.to_vec()]) > DEFAULT_BUDGET {
            continue;
        }
        let r = affine_trace_distribution(&field, 3, d, &chi, &cache, opts()).unwrap();
        c.check(
            r.total == pfold::counting::exact_count_factor_tuples(7, d),
            format!("affine {d:?}: histogram mass = |F_d|"),
        );
        if ladder.contains(d) {
            atvs.push(tv(&r));
        }
        alast = Some((*d, tv(&r)));
    }
    c.check(strictly_decreasing(&atvs), format!("affine TV (n = q) strictly decreasing along the ladder: {}", fmt(&atvs)));
    let (d, t) = alast.unwrap();
    c.check(t < 0.05, format!("affine TV at the largest within budget {d:?}: {t:.6} < 0.05"));
    c.finish()
}

fn criterion_06_hyperelliptic() -> bool {
    let mut c = Criterion::new(6, "hyperelliptic distributions at q = 5");
    let field = f(5, 1);
    let cache = TableCache::new();
    let mut tvs = Vec::new();
    for g in 1..=3 {
        let r = hyperelliptic_trace_distribution(&field, g, &cache, opts()).unwrap();
        tvs.push(tv(&r));
        c.check(r.histogram.negated() == r.histogram, format!("g={g}: histogram symmetric about 0"));
        let odd: Vec<u32> = (1..=7).step_by(2).filter(|&k| !r.moment(k, 0).is_zero()).collect();
        c.check(odd.is_empty(), format!("g={g}: odd moments M_1, M_3, M_5, M_7 exactly 0 (nonzero: {odd:?})"));
    }
    c.check(strictly_decreasing(&tvs), format!("TV to the model strictly decreasing over g = 1,2,3: {}", fmt(&tvs)));
    c.finish()
}

fn criterion_07_moments() -> bool {
    let mut c = Criterion::new(7, "trigonal moments at q = 7");
    let field = f(7, 1);
    let chi = MultCharacter::new(&field, 3).unwrap();
    let cache = TableCache::new();
    let model = RVModel::new(7, 3).unwrap();
    let reports: Vec<EmpiricalReport> = [[2usize, 2], [4, 1], [5, 2]]
        .iter()
        .map(|d| empirical_trace_distribution(&field, &ComponentIndex::new(3, d.to_vec()).unwrap(), &chi, &cache, opts()).unwrap())
        .collect();
    let mut nonzero = Vec::new();
    for j in 0..=6u32 {
        for k in 0..=6 - j {
            if (j + 3 - k % 3) % 3 != 0 && !reports[1].moment(j, k).is_zero() {
                nonzero.push((j, k));
            }
        }
    }
    c.check(nonzero.is_empty(), format!("(4,1): M_jk = 0 exactly for all j != k mod 3, j+k <= 6 (nonzero: {nonzero:?})"));
    for k in 1..=3u32 {
        let pred = model_mixed_moment(&model, 8, k, k).rational_value().unwrap();
        let errs: Vec<f64> = reports
            .iter()
            .map(|r| (r.moment(k, k).rational_value().unwrap() / &pred - BigRational::one()).to_f64().unwrap().abs())
            .collect();
        c.check(
            strictly_decreasing(&errs),
            format!("({k},{k}): |empirical/predicted - 1| along (2,2), (4,1), (5,2): {}", fmt(&errs)),
        );
    }
    c.finish()
}

fn criterion_08_zeta() -> bool {
    let mut c = Criterion::new(8, "zeta functions of sampled curves");
    let mut seed = 0;
    for (q, p) in [(5u32, 2u32), (7, 2), (7, 3)] {
        let field = f(q, 1);
        for g in 1..=3 {
            for comp in components_for_genus(g, p).unwrap() {
                let s = zeta_sample(&field, &comp, 20, seed).unwrap();
                seed += 1;
                let name = format!("q={q} p={p} g={g} {:?}", comp.degrees);
                c.check(s.equation_ok == 20, format!("{name}: functional equation exact for {}/20", s.equation_ok));
                c.check(s.max_deviation < 1e-9, format!("{name}: max ||alpha| - sqrt q| = {:.2e} < 1e-9", s.max_deviation));
                c.check(s.trace_ok == 20, format!("{name}: s_1 = -(S^ + conj S^) for {}/20", s.trace_ok));
            }
        }
    }
    c.finish()
}

fn criterion_09_euler_constants() -> bool {
    let mut c = Criterion::new(9, "Euler constants at q = 7");
    let ks: Vec<f64> = (1..=12).map(|n| euler_constant_k(7, n).unwrap().partial()).collect();
    c.check(strictly_decreasing(&ks), format!("K truncations decreasing in N = 1..=12: {:.12} ... {:.12}", ks[0], ks[11]));
    let diff = (ks[9] - ks[11]).abs();
    c.check(diff < 1e-6, format!("|K_10 - K_12| = {diff:.3e} < 1e-6"));
    let k = euler_constant_k(7, 12).unwrap();
    let l = euler_constant_l(7, 2, 12).unwrap();
    c.check(
        k.degree_factors() == l.degree_factors() && k.multiplicities == l.multiplicities,
        "L_1 truncation equals K truncation factor by factor",
    );
    c.finish()
}

fn criterion_10_determinism() -> bool {
    let mut c = Criterion::new(10, "reports independent of worker count");
    for (p, l, comps, genus) in [(3u32, 7u32, vec![vec![2usize, 2], vec![4, 1], vec![5, 2]], vec![]), (2, 5, vec![], vec![1, 2, 3])] {
        let mut outputs = Vec::new();
        for workers in [1usize, 4, 16] {
            let cfg = ExperimentConfig {
                mode: Mode::Distribution,
                characteristic: l,
                p,
                components: comps.clone(),
                genus: genus.clone(),
                affine: p == 3,
                workers,
                ..Default::default()
            };
            let r = run(&cfg).unwrap();
            let mut csv = String::new();
            for h in &r.histograms {
                csv += &pfold::experiment::histogram_csv(h);
            }
            outputs.push((to_json(&r).unwrap(), csv));
        }
        let same = outputs.iter().all(|o| *o == outputs[0]);
        c.check(same, format!("p={p}: JSON and histogram CSV byte-identical for workers 1, 4, 16 ({} bytes)", outputs[0].0.len()));
    }
    c.finish()
}

/// Not a numbered criterion: over-budget components must be listed, not silently dropped.
fn budget_overrun_is_reported_not_hidden() -> bool {
    let cfg = ExperimentConfig {
        mode: Mode::Distribution,
        components: vec![vec![2, 2], vec![6, 6]],
        ..Default::default()
    };
    let r = run(&cfg).unwrap();
    let pass = !r.complete
        && r.skipped.len() == 1
        && r.skipped[0].starts_with("d6_6")
        && !r.histograms.is_empty()
        && BigRational::zero() < r.histograms[0].total.to_rational().unwrap();
    println!("budget overrun reporting: {}", if pass { "PASS" } else { "FAIL" });
    pass
}

type Entry = (&'static str, fn() -> bool);

const ALL: [Entry; 11] = [
    ("criterion_01_exact_counting", criterion_01_exact_counting),
    ("criterion_02_residue_tuples", criterion_02_residue_tuples),
    ("criterion_03_rv_model", criterion_03_rv_model),
    ("criterion_04_main_terms", criterion_04_main_terms),
    ("criterion_05_trace_distribution", criterion_05_trace_distribution),
    ("criterion_06_hyperelliptic", criterion_06_hyperelliptic),
    ("criterion_07_moments", criterion_07_moments),
    ("criterion_08_zeta", criterion_08_zeta),
    ("criterion_09_euler_constants", criterion_09_euler_constants),
    ("criterion_10_determinism", criterion_10_determinism),
    ("budget_overrun_is_reported_not_hidden", budget_overrun_is_reported_not_hidden),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, f) in ALL {
        if !filters.is_empty() && !filters.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let pass = std::panic::catch_unwind(f).unwrap_or_else(|_| {
            println!("{name}: FAIL (panicked)");
            false
        });
        println!("  {name} took {:.1?}", start.elapsed());
        if !pass {
            failed.push(name);
        }
    }
    println!("\nacceptance: {} of {ran} passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
