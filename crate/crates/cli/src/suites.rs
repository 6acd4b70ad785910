//! Seeded property suites over random instances. Each returns a CSV report
//! and the number of failed checks; rows are ordered by sample index so the
//! output does not depend on `jobs`.

use pcw::{IteratedFunctionSystem, PiecewiseContraction, Rational, Scalar};
use rayon::prelude::*;

use crate::emit::{join, Report};
use crate::sampling::{draw_affine, draw_breakpoints, draw_point, sample_rng};

pub const MARGIN: f64 = 1.0 / 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    /// Nestedness, component count and measure decay of `A_k`.
    Attractor,
    /// Capped and original systems induce the same map near the breakpoints.
    Capping,
    /// The power map agrees with iteration.
    Power,
}

impl std::str::FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "attractor" => Ok(SuiteName::Attractor),
            "capping" => Ok(SuiteName::Capping),
            "power" => Ok(SuiteName::Power),
            other => Err(format!("unknown suite {other:?} (expected attractor, capping or power)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub samples: usize,
    /// `k_max` for the attractor suite, powers are always 2 and 3.
    pub depth: usize,
    pub perturbations: usize,
    pub points: usize,
}

impl SuiteParams {
    pub fn defaults(name: SuiteName) -> Self {
        match name {
            SuiteName::Attractor => SuiteParams { samples: 100, depth: 10, perturbations: 0, points: 0 },
            SuiteName::Capping => SuiteParams { samples: 50, depth: 0, perturbations: 20, points: 1000 },
            SuiteName::Power => SuiteParams { samples: 25, depth: 0, perturbations: 0, points: 10_000 },
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub csv: String,
    pub failures: usize,
}

struct Row {
    fields: Vec<String>,
    failures: usize,
}

fn run_rows(samples: usize, jobs: usize, f: impl Fn(usize) -> Vec<Row> + Sync) -> Vec<Row> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| (0..samples).into_par_iter().flat_map_iter(&f).collect())
}

fn finish(header: &[&str], rows: Vec<Row>) -> SuiteReport {
    let mut out = Report::new();
    out.section("checks", header);
    let mut failures = 0;
    for r in rows {
        failures += r.failures;
        out.row(r.fields);
    }
    out.section("summary", &["failures"]);
    out.row([failures.to_string()]);
    SuiteReport { csv: out.finish(), failures }
}

pub fn run(name: SuiteName, params: &SuiteParams, seed: u64, jobs: usize) -> SuiteReport {
    match name {
        SuiteName::Attractor => attractor(params, seed, jobs),
        SuiteName::Capping => capping(params, seed, jobs),
        SuiteName::Power => power(params, seed, jobs),
    }
}

/// IFS with `n = 2 + index mod 3` maps, slopes up to 0.9, 16-bit dyadic coefficients.
pub fn attractor_instance(seed: u64, index: usize) -> IteratedFunctionSystem<Rational> {
    let mut rng = sample_rng(seed, index);
    let n = 2 + index % 3;
    IteratedFunctionSystem::new((0..n).map(|_| draw_affine(&mut rng, 0.9, MARGIN, 16)).collect()).expect("n ≥ 2")
}

fn attractor(params: &SuiteParams, seed: u64, jobs: usize) -> SuiteReport {
    let rows = run_rows(params.samples, jobs, |i| {
        let ifs = attractor_instance(seed, i);
        let n = ifs.len() as u64;
        let aks = ifs.ak_sequence(params.depth);
        let rho = ifs.highly_contractive_bound();
        let nested = aks.windows(2).all(|w| w[1].is_subset_of(&w[0]));
        let counts = aks.iter().enumerate().all(|(k, a)| (a.len() as u64) <= n.saturating_pow(k as u32));
        let decay = rho
            .as_ref()
            .map(|r| aks.windows(2).all(|w| w[1].measure() <= r.clone() * w[0].measure()));
        let last = aks.last().expect("k_max + 1 sets");
        let failures = usize::from(!nested) + usize::from(!counts) + usize::from(decay == Some(false));
        vec![Row {
            fields: vec![
                i.to_string(),
                n.to_string(),
                rho.map(|r| r.to_string()).unwrap_or_default(),
                last.len().to_string(),
                last.measure().to_string(),
                nested.to_string(),
                counts.to_string(),
                decay.map(|d| d.to_string()).unwrap_or_default(),
            ],
            failures,
        }]
    });
    finish(&["index", "n", "rho", "components", "measure", "nested", "count_bound", "decay"], rows)
}

/// `(system, breakpoints)` with slopes up to 0.45 and `n = 2 + index mod 3`.
pub fn capping_instance(seed: u64, index: usize) -> (IteratedFunctionSystem<Rational>, pcw::Breakpoints<Rational>) {
    let mut rng = sample_rng(seed, index);
    let n = 2 + index % 3;
    let bp = draw_breakpoints(&mut rng, n, MARGIN, 32);
    let ifs = IteratedFunctionSystem::new((0..n).map(|_| draw_affine(&mut rng, 0.45, MARGIN, 32)).collect()).expect("n ≥ 2");
    (ifs, bp)
}

fn capping(params: &SuiteParams, seed: u64, jobs: usize) -> SuiteReport {
    let rows = run_rows(params.samples, jobs, |i| {
        let (ifs, bp) = capping_instance(seed, i);
        let plan = match ifs.cap(&bp) {
            Ok(p) => p,
            Err(e) => {
                return vec![Row {
                    fields: vec![i.to_string(), String::new(), String::new(), String::new(), String::new(), e.to_string()],
                    failures: 1,
                }]
            }
        };
        let rho_ok = plan.capped.highly_contractive_bound().is_some_and(|r| r < Rational::one());
        // The perturbations use their own stream past the instance draws.
        let mut rng = sample_rng(seed ^ 0x9E37_79B9_7F4A_7C15, i);
        let mut mismatches = 0usize;
        let mut outside = 0usize;
        for _ in 0..params.perturbations {
            let y: Vec<Rational> = bp
                .points()
                .iter()
                .map(|x| {
                    // u ∈ (−1, 1)
                    let u = (draw_point(&mut rng, 20) + Rational::from_ratio(1, 1 << 21)) * Rational::from_ratio(2, 1)
                        - Rational::one();
                    x.clone() + plan.delta.clone() * u
                })
                .collect();
            let Ok(y) = pcw::Breakpoints::new(y) else {
                outside += 1;
                continue;
            };
            if !plan.neighbourhood_contains(&y) {
                outside += 1;
                continue;
            }
            let original = PiecewiseContraction::new(ifs.clone(), y.clone()).expect("sizes");
            let capped = PiecewiseContraction::new(plan.capped.clone(), y).expect("sizes");
            for _ in 0..params.points {
                let x = draw_point(&mut rng, 32);
                if original.eval(&x).expect("x ∈ [0,1)") != capped.eval(&x).expect("x ∈ [0,1)") {
                    mismatches += 1;
                }
            }
        }
        vec![Row {
            fields: vec![
                i.to_string(),
                ifs.len().to_string(),
                plan.delta.to_string(),
                plan.rho.to_string(),
                rho_ok.to_string(),
                format!("{mismatches}/{outside}"),
            ],
            failures: mismatches + outside + usize::from(!rho_ok),
        }]
    });
    finish(&["index", "n", "delta", "rho", "rho_below_one", "mismatches/outside_v"], rows)
}

/// A generic piecewise contraction with `n = 2 + index mod 2`; redrawn from
/// the same stream until it passes `check_generic` at depth 8.
pub fn power_instance(seed: u64, index: usize) -> PiecewiseContraction<Rational> {
    let mut rng = sample_rng(seed, index);
    let n = 2 + index % 2;
    loop {
        let bp = draw_breakpoints(&mut rng, n, MARGIN, 32);
        let maps = (0..n).map(|_| draw_affine(&mut rng, 0.9, MARGIN, 32)).collect();
        let f = PiecewiseContraction::new(IteratedFunctionSystem::new(maps).expect("n ≥ 2"), bp).expect("sizes");
        if f.check_generic(8, 100_000).unwrap_or(false) {
            return f;
        }
    }
}

fn power(params: &SuiteParams, seed: u64, jobs: usize) -> SuiteReport {
    let rows = run_rows(params.samples, jobs, |i| {
        let f = power_instance(seed, i);
        let mut rng = sample_rng(seed ^ 0xD1B5_4A32_D192_ED03, i);
        let mut rows = Vec::new();
        for k in [2usize, 3] {
            let (pieces, refined, mismatches) = match f.power(k, 100_000) {
                Ok(p) => {
                    let refined = p.pc.breakpoints().points().to_vec();
                    let mut mismatches = 0;
                    let mut tested = 0;
                    while tested < params.points {
                        let x = draw_point(&mut rng, 32);
                        if refined.contains(&x) {
                            continue;
                        }
                        tested += 1;
                        if p.pc.eval(&x).expect("x ∈ [0,1)") != f.iterate(&x, k).expect("x ∈ [0,1)") {
                            mismatches += 1;
                        }
                    }
                    (p.pc.n().to_string(), join(&refined), mismatches)
                }
                Err(e) => (String::new(), e.to_string(), 1),
            };
            rows.push(Row {
                fields: vec![i.to_string(), f.n().to_string(), k.to_string(), pieces, refined, mismatches.to_string()],
                failures: mismatches,
            });
        }
        rows
    });
    finish(&["index", "n", "k", "pieces", "refined_breakpoints", "mismatches"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_are_job_independent() {
        for name in [SuiteName::Attractor, SuiteName::Capping, SuiteName::Power] {
            let params = SuiteParams { samples: 4, depth: 5, perturbations: 2, points: 50 };
            let a = run(name, &params, 3, 1);
            let b = run(name, &params, 3, 3);
            assert_eq!(a.failures, 0, "{name:?}\n{}", a.csv);
            assert_eq!(a.csv, b.csv);
        }
    }
}
