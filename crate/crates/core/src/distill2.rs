//! Two-pair asymmetric distillation.
//!
//! Alice holds qubits 1 and 3, Bob holds 2 and 4; pairs (1,2) and (3,4) each
//! start in the Bell-diagonal state `rho_F`. Alice pulses her qubits with
//! area `alpha`, Bob with area `beta`. Both measure their target qubits (3
//! and 4) and keep the control pair (1,2) when the outcomes agree. A final π
//! y-rotation on qubit 2 maps the `|Phi+>` weight onto `|Psi->`, which is the
//! target state for every fidelity reported here.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::gates::{bilateral_exchange, ExchangePulse};
use crate::linalg::{embed_operator, hermitize, kron, partial_trace_matrix, ComplexMatrix, DensityMatrix, ONE, ZERO};
use crate::states::{bell_state, fidelity_wrt, rho_f, unilateral_y_pi, BellKind, Fidelity};

/// Success probability per unit of the closed-form denominator:
/// `p_succ = delta / 72`.
pub const SUCCESS_PER_DELTA: f64 = 1.0 / 72.0;

/// Below this the postselected branch is treated as impossible.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-14;

/// Below this a closed-form denominator is treated as vanishing.
pub const MIN_DENOMINATOR: f64 = 1e-12;

/// Qubit index (physical qubit 2, Bob's control) receiving the final rotation.
pub const ROTATED_QUBIT: usize = 1;

/// Result of one postselected protocol run.
#[derive(Clone, Debug)]
pub struct DistillationOutcome {
    pub f_out: Fidelity,
    pub p_succ: f64,
    pub rho_out: DensityMatrix,
    /// State against which `f_out` is measured.
    pub target: BellKind,
}

/// Projector onto equal computational-basis outcomes of two qubits.
pub fn equal_outcome_projector() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[ONE, ZERO, ZERO, ONE])
}

/// Full density-matrix run with equal input fidelities.
pub fn simulate_two_pair(f: Fidelity, alpha: f64, beta: f64, xi: f64) -> Result<DistillationOutcome> {
    simulate_two_pair_inputs(
        f,
        f,
        ExchangePulse::new(alpha, xi)?,
        ExchangePulse::new(beta, xi)?,
    )
}

/// Full density-matrix run with the control pair (1,2) at fidelity
/// `control` and the target pair (3,4) at fidelity `target`.
pub fn simulate_two_pair_inputs(
    control: Fidelity,
    target: Fidelity,
    alice: ExchangePulse,
    bob: ExchangePulse,
) -> Result<DistillationOutcome> {
    let rho = kron(rho_f(control).matrix(), rho_f(target).matrix());
    let u = bilateral_exchange(alice, bob);
    let projector = embed_operator(&equal_outcome_projector(), &[2, 3], 4)?;
    let kept = projector.matmul(&rho.conjugate_by(&u)).matmul(&projector);
    let p_succ = kept.trace().re;
    if p_succ < MIN_SUCCESS_PROBABILITY {
        return Err(Error::ImpossibleBranch(p_succ));
    }
    let mut reduced = partial_trace_matrix(&kept, &[0, 1])?.scale_real(1.0 / p_succ);
    hermitize(&mut reduced);
    let rho_out = unilateral_y_pi(&DensityMatrix::new(reduced)?, ROTATED_QUBIT)?;
    let f_out = fidelity_wrt(&rho_out, &bell_state(BellKind::PsiMinus))?;
    Ok(DistillationOutcome {
        f_out,
        p_succ,
        rho_out,
        target: BellKind::PsiMinus,
    })
}

/// Success probability of the postselection, read from the simulation.
pub fn success_probability_two_pair(f: Fidelity, alpha: f64, beta: f64, xi: f64) -> Result<f64> {
    Ok(simulate_two_pair(f, alpha, beta, xi)?.p_succ)
}

/// Closed-form numerator `nu(F, alpha, beta)` for anisotropy `xi`.
pub fn nu(f: f64, alpha: f64, beta: f64, xi: f64) -> f64 {
    let half_sum = (alpha + beta) / 2.0;
    let g = 4.0 * f - 1.0;
    3.0 * g * alpha.cos() * beta.cos()
        + 4.0 * (8.0 * f * f + 2.0 * f - 1.0) * (half_sum * xi).cos() * half_sum.cos()
        - g * g * alpha.sin() * beta.sin()
        + 4.0 * f * (4.0 * f + 1.0)
        + 7.0
}

/// Closed-form denominator `delta(F, alpha, beta)`; equals `72 p_succ`.
pub fn delta(f: f64, alpha: f64, beta: f64) -> f64 {
    let g = 4.0 * f - 1.0;
    6.0 * g * alpha.cos() * beta.cos() - 2.0 * g * g * alpha.sin() * beta.sin() + 6.0 * (4.0 * f + 5.0)
}

/// Closed-form success probability `delta / 72`.
pub fn success_closed(f: f64, alpha: f64, beta: f64) -> f64 {
    delta(f, alpha, beta) * SUCCESS_PER_DELTA
}

/// Output fidelity `nu / delta`.
pub fn fout_closed(f: f64, alpha: f64, beta: f64, xi: f64) -> Result<f64> {
    let d = delta(f, alpha, beta);
    if d.abs() < MIN_DENOMINATOR {
        return Err(Error::VanishingDenominator(d));
    }
    Ok(nu(f, alpha, beta, xi) / d)
}

/// Output fidelity for mutually inverse pulses `beta = -alpha`, which does
/// not depend on the anisotropy.
pub fn fout_inverse(f: f64, alpha: f64) -> f64 {
    0.5 + (3.0 - 12.0 * f * f)
        / ((f - 1.0) * (4.0 * f - 1.0) * (2.0 * alpha).cos() - f * (4.0 * f + 7.0) - 7.0)
}

/// Optimal Heisenberg protocol, `alpha = π/2 = -beta`.
pub fn fout_opt(f: f64) -> f64 {
    (16.0 * f * f + f + 1.0) / (8.0 * f * f + 2.0 * f + 8.0)
}

/// Pulse area maximizing [`fout_inverse`] for `1/2 < F < 1`.
pub const OPTIMAL_INVERSE_AREA: f64 = FRAC_PI_2;

/// Dipole-dipole numerator `nu_dd(F, alpha, beta)`, with dipole pulse areas.
pub fn nu_dd(f: f64, alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    let d = alpha - beta;
    (2.0 * f * (4.0 * f + 1.0) - 1.0) * (2.0 * (2.0 * s).cos() + (4.0 * s).cos() + 2.0 * (6.0 * s).cos())
        - 2.0 * (f - 1.0) * (4.0 * f - 1.0) * (4.0 * d).cos()
        + 4.0 * f * (4.0 * f + 1.0)
        + 7.0
}

/// Dipole-dipole output fidelity for dipole pulse areas `alpha`, `beta`.
///
/// The denominator is `delta` at the equivalent exchange areas `4 alpha`,
/// `4 beta`; only with that argument does the ratio match the simulated
/// dipole protocol.
pub fn fout_dd(f: f64, alpha: f64, beta: f64) -> Result<f64> {
    let d = delta(f, 4.0 * alpha, 4.0 * beta);
    if d.abs() < MIN_DENOMINATOR {
        return Err(Error::VanishingDenominator(d));
    }
    Ok(nu_dd(f, alpha, beta) / d)
}

/// Recurrence sequence `F_0 = f0`, `F_{k+1} = fout_inverse(F_k, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Iteration {
    /// `F_0, ..., F_n`.
    pub values: Vec<f64>,
    /// Set when `f0 <= 1/2`: the sequence cannot increase from there.
    pub below_repulsive_fixed_point: bool,
}

pub fn iterate_map(f0: Fidelity, alpha: f64, n_rounds: usize) -> Result<Iteration> {
    if n_rounds == 0 {
        return Err(Error::InvalidParameter("at least one round is required".into()));
    }
    let mut values = Vec::with_capacity(n_rounds + 1);
    values.push(f0.value());
    for _ in 0..n_rounds {
        let last = *values.last().expect("nonempty");
        values.push(fout_inverse(last, alpha));
    }
    Ok(Iteration {
        values,
        below_repulsive_fixed_point: f0.value() <= 0.5,
    })
}

/// Fit of `p_succ = c * delta` over a parameter grid.
#[derive(Clone, Copy, Debug)]
pub struct SuccessFit {
    pub constant: f64,
    /// Largest `|p_succ - constant * delta|` on the grid.
    pub max_deviation: f64,
    pub points: usize,
}

/// Fits a single proportionality constant between simulated success
/// probabilities and `delta` over all grid combinations.
pub fn fit_success_constant(fs: &[f64], alphas: &[f64], betas: &[f64], xis: &[f64]) -> Result<SuccessFit> {
    let mut samples = Vec::new();
    for &f in fs {
        let fid = Fidelity::new(f)?;
        for &a in alphas {
            for &b in betas {
                for &xi in xis {
                    let p = success_probability_two_pair(fid, a, b, xi)?;
                    samples.push((p, delta(f, a, b)));
                }
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::Empty("success-probability grid"));
    }
    // Least squares through the origin.
    let num: f64 = samples.iter().map(|(p, d)| p * d).sum();
    let den: f64 = samples.iter().map(|(_, d)| d * d).sum();
    let constant = num / den;
    let max_deviation = samples
        .iter()
        .map(|(p, d)| (p - constant * d).abs())
        .fold(0.0, f64::max);
    Ok(SuccessFit {
        constant,
        max_deviation,
        points: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fid(x: f64) -> Fidelity {
        Fidelity::new(x).unwrap()
    }

    #[test]
    fn no_pulse_is_identity_channel() {
        for f in [0.3, 0.5, 0.8, 1.0] {
            for xi in [-2.0, 0.0, 1.0] {
                let out = simulate_two_pair(fid(f), 0.0, 0.0, xi).unwrap();
                assert!((out.f_out.value() - f).abs() < 1e-12);
                // Postselection on the untouched target pair keeps |Phi+-> only.
                assert!((out.p_succ - (2.0 * f + 1.0) / 3.0).abs() < 1e-12);
                let rotated_back = unilateral_y_pi(&out.rho_out, ROTATED_QUBIT).unwrap();
                assert!(rotated_back.matrix().approx_eq(rho_f(fid(f)).matrix(), 1e-12));
                assert!((fout_closed(f, 0.0, 0.0, xi).unwrap() - f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimal_protocol_value() {
        let out = simulate_two_pair(fid(0.75), PI / 2.0, -PI / 2.0, 1.0).unwrap();
        assert!((out.f_out.value() - 10.75 / 14.0).abs() < 1e-12);
        assert_eq!(out.target, BellKind::PsiMinus);
        let perfect = simulate_two_pair(fid(1.0), PI / 2.0, -PI / 2.0, 1.0).unwrap();
        assert!((perfect.f_out.value() - 1.0).abs() < 1e-12);
        assert!((perfect.p_succ - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_fixed_points() {
        assert!((fout_opt(1.0) - 1.0).abs() < 1e-15);
        assert!((fout_opt(0.5) - 0.5).abs() < 1e-15);
        assert!((fout_opt(0.75) - 10.75 / 14.0).abs() < 1e-15);
        assert!((fout_inverse(0.75, PI / 2.0) - 10.75 / 14.0).abs() < 1e-15);
        for alpha in [0.0, 0.4, 1.0, 2.5, -3.0] {
            assert!((fout_inverse(0.5, alpha) - 0.5).abs() < 1e-15);
            assert!((fout_inverse(1.0, alpha) - 1.0).abs() < 1e-15);
            assert!((fout_closed(0.5, alpha, -alpha, 0.3).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_pulses_are_optimal_at_quarter_turn() {
        let n = 3142;
        let best = (0..=n)
            .map(|i| PI * i as f64 / n as f64)
            .max_by(|a, b| fout_inverse(0.6, *a).total_cmp(&fout_inverse(0.6, *b)))
            .unwrap();
        assert!((best - PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn closed_form_is_symmetric_and_matches_simulation() {
        let angles: Vec<f64> = (-4..=4).map(|k| k as f64 * PI / 4.0).collect();
        for f in [0.35, 0.6, 0.9] {
            for &a in &angles {
                for &b in &angles {
                    for xi in [-2.0, 0.0, 1.0] {
                        let closed = fout_closed(f, a, b, xi).unwrap();
                        let sim = simulate_two_pair(fid(f), a, b, xi).unwrap();
                        assert!((closed - sim.f_out.value()).abs() < 1e-10);
                        assert!((sim.p_succ - success_closed(f, a, b)).abs() < 1e-12);
                        assert!((closed - fout_closed(f, b, a, xi).unwrap()).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_side_does_not_matter() {
        let out = simulate_two_pair(fid(0.7), 0.9, -1.4, 0.5).unwrap();
        let undone = unilateral_y_pi(&out.rho_out, ROTATED_QUBIT).unwrap();
        let other_side = unilateral_y_pi(&undone, 0).unwrap();
        let f_other = fidelity_wrt(&other_side, &bell_state(BellKind::PsiMinus)).unwrap();
        assert!((f_other.value() - out.f_out.value()).abs() < 1e-12);
    }

    #[test]
    fn dipole_identities() {
        assert!((fout_dd(1.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for (f, a) in [(0.6, 0.3), (0.8, 2.0), (0.95, -1.1)] {
            let lhs = fout_dd(f, a / 4.0, -a / 4.0).unwrap();
            assert!((lhs - fout_inverse(f, a)).abs() < 1e-12);
        }
        let sim = simulate_two_pair_inputs(
            fid(0.7),
            fid(0.7),
            crate::gates::dipole_pulse_to_exchange(0.21),
            crate::gates::dipole_pulse_to_exchange(-0.5),
        )
        .unwrap();
        assert!((sim.f_out.value() - fout_dd(0.7, 0.21, -0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn iteration_behaviour() {
        let it = iterate_map(fid(0.75), PI / 2.0, 10).unwrap();
        assert_eq!(it.values.len(), 11);
        assert!(it.values.windows(2).all(|w| w[1] > w[0]));
        assert!((it.values[10] - 0.913_582_444_456_78).abs() < 1e-12);
        let long = iterate_map(fid(0.75), PI / 2.0, 200).unwrap();
        assert!(long.values[200] > 0.999);
        assert!(!it.below_repulsive_fixed_point);
        let half = iterate_map(fid(0.5), PI / 2.0, 5).unwrap();
        assert!(half.values.iter().all(|v| (v - 0.5).abs() < 1e-15));
        assert!(half.below_repulsive_fixed_point);
        let one = iterate_map(fid(1.0), PI / 2.0, 5).unwrap();
        assert!(one.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(iterate_map(fid(0.7), 1.0, 0).is_err());
    }

    #[test]
    fn success_constant_is_one_over_seventy_two() {
        let fs = [0.3, 0.7, 1.0];
        let angles = [-PI, -1.0, 0.0, 0.5, PI / 2.0];
        let fit = fit_success_constant(&fs, &angles, &angles, &[-2.0, 1.0]).unwrap();
        assert!((fit.constant - SUCCESS_PER_DELTA).abs() < 1e-14);
        assert!(fit.max_deviation < 1e-10);
        let p = success_probability_two_pair(fid(1.0), PI / 2.0, -PI / 2.0, 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig2_curves_lie_above_diagonal() {
        for i in 1..100 {
            let f = 0.5 + 0.005 * i as f64;
            let quarter = fout_inverse(f, PI / 4.0);
            let half = fout_inverse(f, PI / 2.0);
            assert!(quarter > f && half > quarter, "f = {f}");
        }
    }
}
