//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria whose stated target contradicts the underlying formulas are
//! listed in `UNATTAINABLE` and reported as FAIL with the reason. The process
//! exits nonzero only when the set of failures differs from that list.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_8, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use distillery::distill2::{fout_closed, fout_dd, fout_inverse, fout_opt, iterate_map, simulate_two_pair};
use distillery::distill3::{f_max, iterated_two_pair_on_three, pareto_family_closed, simulate_three_pair, ParetoFamilyParam, ThreePairProtocol};
use distillery::experiments::{cmd_three_pair_sample, ThreePairSampleConfig};
use distillery::gates::{algebra_basis, algebra_project, flip, flip_exponential, party_generator, party_unitary, PartyUnitary3};
use distillery::linalg::expm_hermitian_generator;
use distillery::pareto::{compare_with_family, extract_front, family_points, sample_protocols, FAMILY_TOL};
use distillery::{ComplexMatrix, Fidelity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNATTAINABLE: [(u32, &str); 2] = [
    (4, "the map at alpha = π/2 reaches 0.91358 after 10 rounds from 0.75; 0.999 is first exceeded at round 36"),
    (9, "f_max(0.75) evaluates to 135.875/170.5; the stated 135.9375/170.5 is off by 3.7e-4"),
];

type Check = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn fid(f: f64) -> Fidelity {
    Fidelity::new(f).unwrap()
}

fn grid(lo: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + step * i as f64).collect()
}

fn angles_eighths() -> Vec<f64> {
    grid(-PI, PI / 8.0, 17)
}

fn two_pair_fs() -> Vec<f64> {
    grid(0.30, 0.05, 14)
}

fn c1_two_pair_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for f in two_pair_fs() {
        for a in angles_eighths() {
            for b in angles_eighths() {
                for xi in [-2.0, 0.0, 1.0] {
                    let sim = simulate_two_pair(fid(f), a, b, xi).unwrap();
                    worst = worst.max((fout_closed(f, a, b, xi).unwrap() - sim.f_out.value()).abs());
                    count += 1;
                }
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("{count} points, max |Δ| = {worst:.2e}"),
    }
}

fn c2_anisotropy_independence() -> Outcome {
    let mut worst: f64 = 0.0;
    for f in two_pair_fs() {
        for a in angles_eighths() {
            let base = simulate_two_pair(fid(f), a, -a, 1.0).unwrap().f_out.value();
            for xi in [-2.0, 0.0, 0.5, 1.0, 3.0] {
                let sim = simulate_two_pair(fid(f), a, -a, xi).unwrap().f_out.value();
                let closed = fout_closed(f, a, -a, xi).unwrap();
                worst = worst.max((sim - base).abs()).max((closed - base).abs());
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max spread over anisotropy = {worst:.2e}"),
    }
}

fn c3_optimal_formula() -> Outcome {
    let value = (fout_opt(0.75) - 10.75 / 14.0).abs();
    let mut worst: f64 = 0.0;
    for f in two_pair_fs() {
        let sim = simulate_two_pair(fid(f), FRAC_PI_2, -FRAC_PI_2, 1.0).unwrap();
        worst = worst.max((fout_opt(f) - sim.f_out.value()).abs());
    }
    Outcome {
        pass: value < 1e-12 && worst < 1e-10,
        detail: format!("|fout_opt(0.75) - 10.75/14| = {value:.2e}, simulation max |Δ| = {worst:.2e}"),
    }
}

fn c4_fixed_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.random_range(-PI..PI);
        worst = worst.max((fout_inverse(0.5, a) - 0.5).abs()).max((fout_inverse(1.0, a) - 1.0).abs());
    }
    let it = iterate_map(fid(0.75), FRAC_PI_2, 10).unwrap();
    let last = it.values[10];
    let first_above = iterate_map(fid(0.75), FRAC_PI_2, 1000)
        .unwrap()
        .values
        .iter()
        .position(|&f| f > 0.999);
    Outcome {
        pass: worst < 1e-12 && last > 0.999,
        detail: format!(
            "fixed points max |Δ| = {worst:.2e}; F after 10 rounds = {last:.6}; first round above 0.999 = {first_above:?}"
        ),
    }
}

fn c5_dipole() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = rng.random_range(0.0..=1.0);
        let a = rng.random_range(-PI..PI);
        worst = worst.max((fout_dd(f, a / 4.0, -a / 4.0).unwrap() - fout_inverse(f, a)).abs());
    }
    let mut argmax_err: f64 = 0.0;
    for f in [0.6, 0.75, 0.9] {
        let best = (0..=785)
            .map(|i| i as f64 * 1e-3)
            .max_by(|x, y| fout_dd(f, *x, -*x).unwrap().total_cmp(&fout_dd(f, *y, -*y).unwrap()))
            .unwrap();
        argmax_err = argmax_err.max((best - FRAC_PI_8).abs());
    }
    Outcome {
        pass: worst < 1e-10 && argmax_err <= 1e-3,
        detail: format!("rescaling max |Δ| = {worst:.2e}; scan argmax off π/8 by {argmax_err:.1e}"),
    }
}

fn c6_algebra() -> Outcome {
    let dev = algebra_basis([0, 1, 2], 3).unwrap().deviations();
    let basis = algebra_basis([0, 1, 2], 3).unwrap();
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_residual: f64 = 0.0;
    for _ in 0..10 {
        let mut u = ComplexMatrix::identity(8);
        for _ in 0..10 {
            let (i, j) = pairs[rng.random_range(0..3)];
            u = flip_exponential(rng.random_range(-PI..PI), i, j, 3).unwrap().matmul(&u);
        }
        worst_residual = worst_residual.max(algebra_project(&u, &basis).unwrap().residual);
    }
    let foreign_basis = algebra_basis([0, 1, 2], 4).unwrap();
    let foreign = algebra_project(&flip(2, 3, 4).unwrap(), &foreign_basis).unwrap().residual;
    Outcome {
        pass: dev.max() < 1e-12 && worst_residual < 1e-10 && foreign > 0.1,
        detail: format!(
            "identities max dev = {:.2e}; product residual = {worst_residual:.2e}; foreign flip residual = {foreign:.3}",
            dev.max()
        ),
    }
}

fn c7_canonical_exponential() -> Outcome {
    let basis = algebra_basis([0, 1, 2], 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = [(); 3].map(|_| rng.random_range(-2.0 * TAU..2.0 * TAU));
        let p = PartyUnitary3::new(rng.random_range(0.0..TAU), a);
        let oracle = expm_hermitian_generator(&party_generator(&p, &basis)).unwrap();
        worst = worst.max(party_unitary(&p, &basis).max_abs_diff(&oracle));
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max entry |Δ| = {worst:.2e}"),
    }
}

fn c8_three_pair_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for f in grid(0.55, 0.02, 21) {
        for r in ParetoFamilyParam::grid(21) {
            let (cf, cp) = pareto_family_closed(f, r).unwrap();
            let sim = simulate_three_pair(fid(f), &ThreePairProtocol::pareto_family(r)).unwrap();
            worst = worst.max((cf - sim.f_out.value()).abs()).max((cp - sim.p_succ).abs());
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("441 points, max |Δ| = {worst:.2e}"),
    }
}

fn c9_boundaries() -> Outcome {
    let top = ParetoFamilyParam::new(FRAC_PI_3).unwrap();
    let mut worst: f64 = 0.0;
    for f in grid(0.55, 0.05, 9) {
        let sim = simulate_three_pair(fid(f), &ThreePairProtocol::pareto_family(top)).unwrap();
        worst = worst
            .max((sim.f_out.value() - f).abs())
            .max((sim.p_succ - (2.0 * f + 1.0).powi(2) / 9.0).abs());
    }
    for r in ParetoFamilyParam::grid(21) {
        let sim = simulate_three_pair(Fidelity::ONE, &ThreePairProtocol::pareto_family(r)).unwrap();
        let (cf, cp) = pareto_family_closed(1.0, r).unwrap();
        worst = worst
            .max((sim.f_out.value() - 1.0).abs())
            .max((sim.p_succ - 1.0).abs())
            .max((cf - 1.0).abs())
            .max((cp - 1.0).abs());
    }
    let fm = f_max(0.75);
    let stated = 135.9375 / 170.5;
    Outcome {
        pass: worst < 1e-10 && (fm - stated).abs() < 1e-12,
        detail: format!(
            "identities max |Δ| = {worst:.2e}; f_max(0.75) = {fm:.12} vs stated {stated:.12} (|Δ| = {:.2e})",
            (fm - stated).abs()
        ),
    }
}

fn c10_sampled_fronts() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for f in [0.6, 0.75, 0.9] {
        let points = sample_protocols(fid(f), 200_000, 0).unwrap();
        let family = family_points(fid(f), 61).unwrap();
        let report = compare_with_family(fid(f), &points, &family);
        let front = extract_front(&points).unwrap();
        let front_clean = front
            .points()
            .iter()
            .all(|q| points.iter().all(|p| !distillery::pareto::dominates(p, q)));
        let in_range = points
            .iter()
            .all(|p| (0.0..=1.0 + 1e-12).contains(&p.f_out.value()) && (0.0..=1.0 + 1e-12).contains(&p.p_succ));
        pass &= report.passed() && front_clean && in_range && report.worst_margin <= FAMILY_TOL;
        parts.push(format!(
            "F={f}: front {} pts, dominating pairs {}, worst margin {:.2e}",
            front.len(),
            report.dominating_pairs,
            report.worst_margin
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn c11_iterated_comparison() -> Outcome {
    let rs = ParetoFamilyParam::grid(601);
    let mut pass = true;
    let mut min_gap = f64::INFINITY;
    for f in grid(0.55, 0.05, 9) {
        let it = iterated_two_pair_on_three(fid(f)).unwrap();
        let best_gap = rs
            .iter()
            .filter_map(|&r| {
                let (cf, cp) = pareto_family_closed(f, r).unwrap();
                (cf >= it.f_out).then_some(cp - it.p_succ)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= best_gap > 0.0;
        min_gap = min_gap.min(best_gap);
    }
    Outcome {
        pass,
        detail: format!("smallest success-probability advantage at equal or higher fidelity = {min_gap:.3e}"),
    }
}

fn c12_determinism() -> Outcome {
    let cfg = ThreePairSampleConfig {
        samples: 20_000,
        ..Default::default()
    };
    let run = |threads: usize| {
        let dir = tempfile::tempdir().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let paths = pool
            .install(|| cmd_three_pair_sample(&cfg, distillery::experiments::Format::Csv, dir.path()))
            .unwrap();
        paths.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>()
    };
    let a = run(1);
    let b = run(1);
    let c = run(8);
    Outcome {
        pass: a == b && a == c && a.len() == 6,
        detail: format!("{} files, 3 fidelities x {} samples, threads 1/1/8", a.len(), cfg.samples),
    }
}

fn main() -> ExitCode {
    let criteria: [Check; 12] = [
        (1, "two-pair closed form vs simulation", c1_two_pair_oracle),
        (2, "anisotropy independence at beta = -alpha", c2_anisotropy_independence),
        (3, "optimal two-pair formula", c3_optimal_formula),
        (4, "fixed points and iteration", c4_fixed_points),
        (5, "dipole rescaling and optimal area", c5_dipole),
        (6, "permutation algebra", c6_algebra),
        (7, "canonical-form exponential", c7_canonical_exponential),
        (8, "three-pair closed form vs simulation", c8_three_pair_oracle),
        (9, "boundary identities", c9_boundaries),
        (10, "sampled fronts vs protocol family", c10_sampled_fronts),
        (11, "family vs iterated two-pair protocol", c11_iterated_comparison),
        (12, "sampling determinism", c12_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let known = UNATTAINABLE.iter().find(|(k, _)| *k == id);
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status}  {name} [{secs:.1}s]: {}", outcome.detail);
        match (outcome.pass, known) {
            (false, Some((_, reason))) => println!("              unattainable: {reason}"),
            (false, None) => unexpected.push(format!("criterion {id} failed")),
            (true, Some(_)) => unexpected.push(format!("criterion {id} listed as unattainable but passed")),
            (true, None) => {}
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("{u}");
        }
        ExitCode::FAILURE
    }
}
