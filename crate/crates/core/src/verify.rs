//! Self-check suites comparing closed forms against brute-force simulation.
//!
//! Each suite reports its largest deviation and the tolerance it must stay
//! under. [`VerifyOptions::perturbation`] scales every closed-form value by
//! `1 + perturbation` before comparison; a nonzero value must make the run
//! fail, which checks the harness itself.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_8, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distill2::{fout_closed, fout_dd, fout_inverse, fout_opt, simulate_two_pair, success_closed};
use crate::distill3::{pareto_family_closed, simulate_three_pair, ParetoFamilyParam, ThreePairEvaluator, ThreePairProtocol};
use crate::error::Result;
use crate::gates::{algebra_basis, party_generator, party_unitary, PartyUnitary3};
use crate::linalg::{expm_hermitian_generator, ORACLE_TOL, STRUCTURE_TOL};
use crate::par;
use crate::pareto::sample_protocol;
use crate::states::Fidelity;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    pub perturbation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>7} {:>12} {:>9}  result", "suite", "checks", "max dev", "tol")?;
        for s in &self.suites {
            write!(
                f,
                "{:<28} {:>7} {:>12.3e} {:>9.1e}  {}",
                s.name,
                s.checks,
                s.max_deviation,
                s.tolerance,
                if s.passed { "PASS" } else { "FAIL" }
            )?;
            if let Some(e) = &s.error {
                write!(f, " ({e})")?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Running maximum of absolute deviations.
#[derive(Default)]
struct Tally {
    checks: usize,
    max: f64,
}

impl Tally {
    fn add(&mut self, dev: f64) {
        self.checks += 1;
        // NaN counts as an infinite deviation.
        self.max = if dev.is_nan() { f64::INFINITY } else { self.max.max(dev.abs()) };
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.max = self.max.max(other.max);
    }
}

fn finish(name: &'static str, tolerance: f64, run: Result<Tally>) -> SuiteResult {
    match run {
        Ok(t) => SuiteResult {
            name,
            checks: t.checks,
            max_deviation: t.max,
            tolerance,
            passed: t.max < tolerance,
            error: None,
        },
        Err(e) => SuiteResult {
            name,
            checks: 0,
            max_deviation: f64::INFINITY,
            tolerance,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

fn steps(lo: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + step * i as f64).collect()
}

fn two_pair_oracle(k: f64) -> Result<Tally> {
    let angles = steps(-PI, PI / 4.0, 9);
    let mut jobs = Vec::new();
    for f in steps(0.30, 0.05, 14) {
        for &a in &angles {
            for &b in &angles {
                for xi in [-2.0, 0.0, 1.0] {
                    jobs.push((f, a, b, xi));
                }
            }
        }
    }
    let parts = par::map_slice(&jobs, |&(f, a, b, xi)| -> Result<Tally> {
        let sim = simulate_two_pair(Fidelity::new(f)?, a, b, xi)?;
        let mut t = Tally::default();
        t.add(k * fout_closed(f, a, b, xi)? - sim.f_out.value());
        t.add(k * success_closed(f, a, b) - sim.p_succ);
        Ok(t)
    });
    let mut total = Tally::default();
    for p in parts {
        total.merge(p?);
    }
    Ok(total)
}

fn anisotropy_independence(k: f64) -> Result<Tally> {
    let mut t = Tally::default();
    for f in steps(0.30, 0.05, 14) {
        for a in steps(-PI, PI / 8.0, 17) {
            let reference = fout_inverse(f, a);
            for xi in [-2.0, 0.0, 0.5, 1.0, 3.0] {
                t.add(k * fout_closed(f, a, -a, xi)? - reference);
            }
        }
    }
    Ok(t)
}

fn optimal_and_fixed_points(k: f64) -> Result<Tally> {
    let mut t = Tally::default();
    t.add(k * fout_opt(0.75) - 10.75 / 14.0);
    for f in steps(0.30, 0.05, 14) {
        let sim = simulate_two_pair(Fidelity::new(f)?, FRAC_PI_2, -FRAC_PI_2, 1.0)?;
        t.add(k * fout_opt(f) - sim.f_out.value());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a = rng.random_range(-PI..PI);
        t.add(k * fout_inverse(0.5, a) - 0.5);
        t.add(k * fout_inverse(1.0, a) - 1.0);
    }
    Ok(t)
}

fn dipole_rescaling(k: f64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut t = Tally::default();
    for _ in 0..1000 {
        let f = rng.random_range(0.3..1.0);
        let a = rng.random_range(-PI..PI);
        t.add(k * fout_dd(f, a / 4.0, -a / 4.0)? - fout_inverse(f, a));
    }
    // One period of the dipole map; the argmax must sit within half a grid
    // step of π/8.
    let best = (0..=785)
        .map(|i| i as f64 * 1e-3)
        .max_by(|x, y| fout_dd(0.75, *x, -*x).unwrap_or(0.0).total_cmp(&fout_dd(0.75, *y, -*y).unwrap_or(0.0)))
        .unwrap_or(0.0);
    t.add(((best - FRAC_PI_8).abs() - 5e-4).max(0.0));
    Ok(t)
}

fn algebra(k: f64) -> Result<Tally> {
    let mut t = Tally::default();
    for n in [3, 6] {
        let triple = if n == 3 { [0, 1, 2] } else { [0, 2, 4] };
        t.add(k * algebra_basis(triple, n)?.deviations().max() + (k - 1.0));
    }
    Ok(t)
}

fn canonical_exponential(k: f64) -> Result<Tally> {
    let basis = algebra_basis([0, 1, 2], 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut t = Tally::default();
    for _ in 0..200 {
        let p = PartyUnitary3::new(rng.random_range(0.0..2.0 * PI), [0.0; 3].map(|_: f64| rng.random_range(-4.0..4.0)));
        let oracle = expm_hermitian_generator(&party_generator(&p, &basis))?;
        t.add(party_unitary(&p, &basis).scale_real(k).max_abs_diff(&oracle));
    }
    Ok(t)
}

fn three_pair_oracle(k: f64) -> Result<Tally> {
    let mut jobs = Vec::new();
    for f in [0.55, 0.75, 0.95, 1.0] {
        for r in ParetoFamilyParam::grid(7) {
            jobs.push((f, r));
        }
    }
    let parts = par::map_slice(&jobs, |&(f, r)| -> Result<Tally> {
        let (cf, cp) = pareto_family_closed(f, r)?;
        let sim = simulate_three_pair(Fidelity::new(f)?, &ThreePairProtocol::pareto_family(r))?;
        let mut t = Tally::default();
        t.add(k * cf - sim.f_out.value());
        t.add(k * cp - sim.p_succ);
        if r.value() == FRAC_PI_3 {
            t.add(k * cf - f);
            t.add(k * cp - (2.0 * f + 1.0).powi(2) / 9.0);
        }
        Ok(t)
    });
    let mut total = Tally::default();
    for p in parts {
        total.merge(p?);
    }
    Ok(total)
}

fn fast_evaluator(k: f64) -> Result<Tally> {
    let mut t = Tally::default();
    for f in [0.6, 0.9] {
        let fid = Fidelity::new(f)?;
        let eval = ThreePairEvaluator::new(fid);
        for i in 0..8 {
            let proto = sample_protocol(17, i);
            let (ef, ep) = eval.evaluate(&proto);
            let sim = simulate_three_pair(fid, &proto)?;
            t.add(k * ef - sim.f_out.value());
            t.add(k * ep - sim.p_succ);
        }
    }
    Ok(t)
}

/// Runs every suite and collects the report.
pub fn run(opts: VerifyOptions) -> VerifyReport {
    let k = 1.0 + opts.perturbation;
    let suites = vec![
        finish("two-pair oracle", ORACLE_TOL, two_pair_oracle(k)),
        finish("anisotropy independence", ORACLE_TOL, anisotropy_independence(k)),
        finish("optimum and fixed points", ORACLE_TOL, optimal_and_fixed_points(k)),
        finish("dipole rescaling", ORACLE_TOL, dipole_rescaling(k)),
        finish("permutation algebra", STRUCTURE_TOL, algebra(k)),
        finish("canonical exponential", ORACLE_TOL, canonical_exponential(k)),
        finish("three-pair family oracle", ORACLE_TOL, three_pair_oracle(k)),
        finish("fast three-pair evaluator", ORACLE_TOL, fast_evaluator(k)),
    ];
    let passed = suites.iter().all(|s| s.passed);
    VerifyReport { suites, passed }
}
