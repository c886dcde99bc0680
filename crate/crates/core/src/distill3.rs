//! Three-pair distillation with a double-coincidence filter.
//!
//! Qubits are numbered `1..=6` physically and `0..6` here. Pairs (1,2),
//! (3,4), (5,6) start in `rho_F`; Alice holds the odd qubits `{0, 2, 4}`,
//! Bob the even ones `{1, 3, 5}`. Each applies a unitary from the algebra of
//! permutations of their three qubits, both measure qubits 3-6, and pair
//! (1,2) is kept when the outcomes on (3,4) and on (5,6) agree. The output
//! fidelity is measured against `|Phi+>` with no final rotation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::distill2::{equal_outcome_projector, fout_opt, simulate_two_pair_inputs, DistillationOutcome, MIN_DENOMINATOR, MIN_SUCCESS_PROBABILITY};
use crate::error::{Error, Result};
use crate::gates::{algebra_basis, party_unitary, AlgebraBasis, ExchangePulse, PartyUnitary3};
use crate::linalg::{hermitize, kron, partial_trace_matrix, ComplexMatrix, DensityMatrix, C64, ZERO};
use crate::states::{bell_state, fidelity_wrt, rho_f, BellKind, Fidelity};

pub const ALICE_QUBITS: [usize; 3] = [0, 2, 4];
pub const BOB_QUBITS: [usize; 3] = [1, 3, 5];

fn alice_basis() -> &'static AlgebraBasis {
    static BASIS: OnceLock<AlgebraBasis> = OnceLock::new();
    BASIS.get_or_init(|| algebra_basis(ALICE_QUBITS, 6).expect("valid triple"))
}

fn bob_basis() -> &'static AlgebraBasis {
    static BASIS: OnceLock<AlgebraBasis> = OnceLock::new();
    BASIS.get_or_init(|| algebra_basis(BOB_QUBITS, 6).expect("valid triple"))
}

fn local_basis() -> &'static AlgebraBasis {
    static BASIS: OnceLock<AlgebraBasis> = OnceLock::new();
    BASIS.get_or_init(|| algebra_basis([0, 1, 2], 3).expect("valid triple"))
}

/// Canonical parameters of both parties' operations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreePairProtocol {
    pub alice: PartyUnitary3,
    pub bob: PartyUnitary3,
}

impl ThreePairProtocol {
    pub fn identity() -> Self {
        Self {
            alice: PartyUnitary3::identity(),
            bob: PartyUnitary3::identity(),
        }
    }

    /// `alpha = beta = π`, `a = b = (0, 0, r)`.
    pub fn pareto_family(r: ParetoFamilyParam) -> Self {
        let p = PartyUnitary3::new(PI, [0.0, 0.0, r.value()]);
        Self { alice: p, bob: p }
    }

    pub fn swapped(&self) -> Self {
        Self {
            alice: self.bob,
            bob: self.alice,
        }
    }

    /// `(U_A, U_B)` as 64x64 operators, each the identity on the other
    /// party's qubits.
    pub fn operators(&self) -> (ComplexMatrix, ComplexMatrix) {
        (
            party_unitary(&self.alice, alice_basis()),
            party_unitary(&self.bob, bob_basis()),
        )
    }

    /// `U_A U_B`.
    pub fn unitary(&self) -> ComplexMatrix {
        let (a, b) = self.operators();
        a.matmul(&b)
    }
}

/// Filter on physical qubits 3-6: outcomes on (3,4) agree and outcomes on
/// (5,6) agree.
pub fn coincidence_projector() -> ComplexMatrix {
    kron(&equal_outcome_projector(), &equal_outcome_projector())
}

/// Brute-force density-matrix run of a three-pair protocol.
pub fn simulate_three_pair(f: Fidelity, proto: &ThreePairProtocol) -> Result<DistillationOutcome> {
    let pair = rho_f(f);
    let rho = kron(pair.matrix(), &kron(pair.matrix(), pair.matrix()));
    let evolved = rho.conjugate_by(&proto.unitary());
    let filter = kron(&ComplexMatrix::identity(4), &coincidence_projector());
    let kept = filter.matmul(&evolved).matmul(&filter);
    let p_succ = kept.trace().re;
    if p_succ < MIN_SUCCESS_PROBABILITY {
        return Err(Error::ImpossibleBranch(p_succ));
    }
    let mut reduced = partial_trace_matrix(&kept, &[0, 1])?.scale_real(1.0 / p_succ);
    hermitize(&mut reduced);
    let rho_out = DensityMatrix::new(reduced)?;
    let f_out = fidelity_wrt(&rho_out, &bell_state(BellKind::PhiPlus))?;
    Ok(DistillationOutcome {
        f_out,
        p_succ,
        rho_out,
        target: BellKind::PhiPlus,
    })
}

/// One row-monomial term of the Bell-product mixture: row `k` of the 8x8
/// amplitude block has its single nonzero entry `phase[k]` at column
/// `col[k]`.
#[derive(Clone, Debug)]
struct MonomialTerm {
    weight: f64,
    col: [usize; 8],
    phase: [C64; 8],
}

/// Fast evaluator of `(F_out, P_succ)` for a fixed input fidelity.
///
/// The input `rho_F^{⊗3}` is a mixture of 64 products of Bell states. Each
/// product is an 8x8 amplitude block `M` indexed by (Alice's three bits,
/// Bob's three bits), on which the protocol acts as `U_A M U_B^T`. Bell
/// blocks have one nonzero per row, and only the 16 entries that survive
/// the filter are formed. Agrees with [`simulate_three_pair`] to rounding.
#[derive(Clone, Debug)]
pub struct ThreePairEvaluator {
    fidelity: Fidelity,
    terms: Vec<MonomialTerm>,
}

impl ThreePairEvaluator {
    pub fn new(f: Fidelity) -> Self {
        let weight = |k: BellKind| {
            if k == BellKind::PhiPlus {
                f.value()
            } else {
                (1.0 - f.value()) / 3.0
            }
        };
        let mut terms = Vec::with_capacity(64);
        for k0 in BellKind::ALL {
            for k1 in BellKind::ALL {
                for k2 in BellKind::ALL {
                    let w = weight(k0) * weight(k1) * weight(k2);
                    if w == 0.0 {
                        continue;
                    }
                    let amps = [k0.amplitudes(), k1.amplitudes(), k2.amplitudes()];
                    let entry = |a: usize, b: usize| -> C64 {
                        (0..3)
                            .map(|i| {
                                let ab = (((a >> (2 - i)) & 1) << 1) | ((b >> (2 - i)) & 1);
                                amps[i][ab]
                            })
                            .product()
                    };
                    let mut col = [0; 8];
                    let mut phase = [ZERO; 8];
                    for a in 0..8 {
                        let b = (0..8).find(|&b| entry(a, b) != ZERO).expect("Bell rows are nonzero");
                        col[a] = b;
                        phase[a] = entry(a, b);
                    }
                    terms.push(MonomialTerm { weight: w, col, phase });
                }
            }
        }
        Self { fidelity: f, terms }
    }

    pub fn fidelity(&self) -> Fidelity {
        self.fidelity
    }

    /// `(F_out, P_succ)`; `F_out` is NaN when the filter never passes.
    pub fn evaluate(&self, proto: &ThreePairProtocol) -> (f64, f64) {
        let ua = party_unitary(&proto.alice, local_basis());
        let ub = party_unitary(&proto.bob, local_basis());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (mut p_succ, mut overlap) = (0.0, 0.0);
        for term in &self.terms {
            // T[a][b] = sum_k UA[a][k] phase[k] UB[b][col[k]]
            let mut scaled = [[ZERO; 8]; 8];
            for (b, row) in scaled.iter_mut().enumerate() {
                for k in 0..8 {
                    row[k] = term.phase[k] * ub[(b, term.col[k])];
                }
            }
            let entry = |a: usize, b: usize| -> C64 {
                let ua_row = ua.row(a);
                (0..8).map(|k| ua_row[k] * scaled[b][k]).sum()
            };
            let (mut kept, mut phi) = (0.0, 0.0);
            // Low two bits of each index are the measured qubits.
            for rest in 0..4 {
                let (lo, hi) = (rest, 4 | rest);
                let (ll, hh) = (entry(lo, lo), entry(hi, hi));
                kept += ll.norm_sqr() + hh.norm_sqr() + entry(lo, hi).norm_sqr() + entry(hi, lo).norm_sqr();
                phi += ((ll + hh) * s).norm_sqr();
            }
            p_succ += term.weight * kept;
            overlap += term.weight * phi;
        }
        (overlap / p_succ, p_succ)
    }
}

/// Parameter `r ∈ [0, π/3]` of the Pareto-efficient protocol family.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParetoFamilyParam(f64);

impl ParetoFamilyParam {
    pub const MAX: f64 = FRAC_PI_3;

    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=Self::MAX).contains(&r) {
            Ok(Self(r))
        } else {
            Err(Error::InvalidParameter(format!("family parameter r = {r} outside [0, π/3]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `n` evenly spaced parameters from 0 to π/3 inclusive.
    pub fn grid(n: usize) -> Vec<Self> {
        match n {
            0 => Vec::new(),
            1 => vec![Self(0.0)],
            _ => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        Self(Self::MAX)
                    } else {
                        Self(Self::MAX * i as f64 / (n - 1) as f64)
                    }
                })
                .collect(),
        }
    }
}

/// Closed-form `(F_out, P_succ)` of the Pareto-efficient family.
pub fn pareto_family_closed(f: f64, r: ParetoFamilyParam) -> Result<(f64, f64)> {
    let c = (3.0 * r.value()).cos();
    let k = 4.0 * f * f - 5.0 * f + 1.0;
    let denominator = 32.0 * k * c + 128.0 * f * f + 2.0 * f + 113.0;
    if denominator.abs() < MIN_DENOMINATOR {
        return Err(Error::VanishingDenominator(denominator));
    }
    let numerator = 16.0 * k * c + 226.0 * f * f + f + 16.0;
    Ok((numerator / denominator, (2.0 * f + 1.0) / 729.0 * denominator))
}

/// Highest output fidelity of the family, reached at `r = 0`.
pub fn f_max(f: f64) -> f64 {
    (290.0 * f * f - 79.0 * f + 32.0) / (256.0 * f * f - 158.0 * f + 145.0)
}

/// The optimal two-pair protocol run twice to consume three pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IteratedTwoPair {
    pub f_first: f64,
    pub p_first: f64,
    pub f_out: f64,
    pub p_second: f64,
    /// `p_first * p_second`.
    pub p_succ: f64,
}

/// Runs the optimal Heisenberg two-pair protocol on two fresh pairs, brings
/// the output back to Bell-diagonal form and distills it once more against
/// the third pair.
pub fn iterated_two_pair_on_three(f: Fidelity) -> Result<IteratedTwoPair> {
    if f.value() <= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "iterated comparison needs F > 1/2, got {f}"
        )));
    }
    let alice = ExchangePulse::heisenberg(FRAC_PI_2);
    let bob = ExchangePulse::heisenberg(-FRAC_PI_2);
    let first = simulate_two_pair_inputs(f, f, alice, bob)?;
    debug_assert!((first.f_out.value() - fout_opt(f.value())).abs() < 1e-10);
    // Re-twirl: only the target-state weight survives into the next round.
    let second = simulate_two_pair_inputs(first.f_out, f, alice, bob)?;
    Ok(IteratedTwoPair {
        f_first: first.f_out.value(),
        p_first: first.p_succ,
        f_out: second.f_out.value(),
        p_second: second.p_succ,
        p_succ: first.p_succ * second.p_succ,
    })
}
