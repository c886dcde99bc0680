//! Two-qubit states used as distillation inputs and targets.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed_operator, hermitize, kron, ComplexMatrix, DensityMatrix, StateVector, C64, STRUCTURE_TOL, ZERO};
use crate::par;

/// Overlap of a state with a maximally entangled target, in `[0, 1]`.
///
/// Values built from user input must lie in `[0, 1]` exactly. Values read off
/// a computed state may differ from the interval by rounding error of at most
/// [`STRUCTURE_TOL`] and are stored unclamped.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fidelity(f64);

impl Fidelity {
    pub const ONE: Fidelity = Fidelity(1.0);
    pub const HALF: Fidelity = Fidelity(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::FidelityRange(value))
        }
    }

    pub(crate) fn from_computed(value: f64) -> Result<Self> {
        if value.is_finite() && (-STRUCTURE_TOL..=1.0 + STRUCTURE_TOL).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::FidelityRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fidelity {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Fidelity> for f64 {
    fn from(f: Fidelity) -> f64 {
        f.0
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiMinus,
    ];

    /// Amplitudes in the basis `|00>, |01>, |10>, |11>` with `|0> = up`.
    pub fn amplitudes(self) -> [C64; 4] {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellKind::PhiPlus => [s, ZERO, ZERO, s],
            BellKind::PhiMinus => [s, ZERO, ZERO, -s],
            BellKind::PsiPlus => [ZERO, s, s, ZERO],
            BellKind::PsiMinus => [ZERO, s, -s, ZERO],
        }
    }
}

pub fn bell_state(kind: BellKind) -> StateVector {
    StateVector::new(kind.amplitudes().to_vec()).expect("Bell states are normalized")
}

/// Mixture `sum_k w_k |B_k><B_k|` of Bell projectors.
pub fn bell_diagonal(weights: [(BellKind, f64); 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for (kind, w) in weights {
        m.add_scaled(&bell_state(kind).projector(), C64::new(w, 0.0));
    }
    m
}

/// Weight `f` on `dominant` and `(1 - f)/3` on each other Bell state.
fn bell_dominated(f: f64, dominant: BellKind) -> DensityMatrix {
    let rest = (1.0 - f) / 3.0;
    let weights = BellKind::ALL.map(|k| (k, if k == dominant { f } else { rest }));
    DensityMatrix::new(bell_diagonal(weights)).expect("Bell-diagonal mixtures are states")
}

/// Bell-diagonal input state with weight `f` on `|Phi+>`.
pub fn rho_f(f: Fidelity) -> DensityMatrix {
    bell_dominated(f.value(), BellKind::PhiPlus)
}

/// Werner state with weight `f` on the singlet `|Psi->`.
pub fn werner(f: Fidelity) -> DensityMatrix {
    bell_dominated(f.value(), BellKind::PsiMinus)
}

/// `<psi| rho |psi>` as a fidelity.
pub fn fidelity_wrt(rho: &DensityMatrix, psi: &StateVector) -> Result<Fidelity> {
    if rho.dim() != psi.dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} against target of dimension {}",
            rho.dim(),
            psi.dim()
        )));
    }
    let e = psi.expectation(rho.matrix());
    if e.im.abs() > STRUCTURE_TOL {
        return Err(Error::ComplexExpectation(e.im));
    }
    Fidelity::from_computed(e.re)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 2 {
        return Err(Error::Dimension(format!(
            "expected a two-qubit state, got {} qubits",
            rho.n_qubits()
        )));
    }
    Ok(())
}

/// Exact twirl channel: the Werner state with the same singlet weight.
pub fn twirl_exact(rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    let f = fidelity_wrt(rho, &bell_state(BellKind::PsiMinus))?;
    Ok(bell_dominated(f.value(), BellKind::PsiMinus))
}

/// Haar-random element of SU(2) from a normalized Gaussian quaternion.
pub fn haar_su2<R: rand::Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let mut q = [0.0f64; 4];
    loop {
        for x in q.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            q.iter_mut().for_each(|x| *x /= norm);
            break;
        }
    }
    let [a, b, c, d] = q;
    ComplexMatrix::from_row_major(vec![
        C64::new(a, b),
        C64::new(c, d),
        C64::new(-c, d),
        C64::new(a, -b),
    ])
    .expect("2x2")
}

/// Average of `(u ⊗ u) rho (u ⊗ u)^dagger` over the given single-qubit unitaries.
pub fn bilateral_average(rho: &DensityMatrix, unitaries: &[ComplexMatrix]) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    if unitaries.is_empty() {
        return Err(Error::Empty("bilateral rotations"));
    }
    let mut acc = ComplexMatrix::zeros(4);
    for u in unitaries {
        acc.add_scaled(&rho.matrix().conjugate_by(&kron(u, u)), C64::new(1.0, 0.0));
    }
    let mut m = acc.scale_real(1.0 / unitaries.len() as f64);
    hermitize(&mut m);
    DensityMatrix::new(m)
}

const TWIRL_BATCH: usize = 1024;

/// Monte Carlo estimate of the twirl using `n_samples` Haar-random bilateral
/// rotations.
///
/// Sample `i` draws from a ChaCha8 stream seeded with `seed` and set to
/// stream `i`, and partial sums are combined in index order, so the result is
/// bit-identical regardless of thread count.
pub fn monte_carlo_twirl(rho: &DensityMatrix, n_samples: usize, seed: u64) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let n_batches = n_samples.div_ceil(TWIRL_BATCH);
    let partial = par::map_indexed(n_batches, |b| {
        let mut acc = ComplexMatrix::zeros(4);
        for i in b * TWIRL_BATCH..((b + 1) * TWIRL_BATCH).min(n_samples) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u = haar_su2(&mut rng);
            acc.add_scaled(&rho.matrix().conjugate_by(&kron(&u, &u)), C64::new(1.0, 0.0));
        }
        acc
    });
    let mut total = ComplexMatrix::zeros(4);
    for p in &partial {
        total.add_scaled(p, C64::new(1.0, 0.0));
    }
    let mut m = total.scale_real(1.0 / n_samples as f64);
    hermitize(&mut m);
    DensityMatrix::new(m)
}

/// `e^{-i pi sigma_y / 2} = [[0, -1], [1, 0]]`.
pub fn y_pi_rotation() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[0.0, -1.0], [1.0, 0.0]])
}

/// Conjugates `rho` by a π rotation about y on one qubit, swapping the
/// `|Psi->` and `|Phi+>` weights of a Bell-diagonal state.
pub fn unilateral_y_pi(rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if qubit >= n {
        return Err(Error::QubitIndex { index: qubit, n_qubits: n });
    }
    let r = embed_operator(&y_pi_rotation(), &[qubit], n)?;
    rho.evolve(&r)
}
