//! Unitaries generated by exchange interactions.
//!
//! Two-qubit propagators are written in the basis `|↑↑>, |↑↓>, |↓↑>, |↓↓>`
//! with `|↑> = |0>`. Three-qubit party operations live in the algebra spanned
//! by the permutations of the party's three qubits.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed_operator, kron, paulis, ComplexMatrix, C64, I, ONE, ZERO};

/// Ratio between the generic exchange pulse area and the dipole-dipole pulse
/// area: the dipole Hamiltonian `c (XX + YY - 2 ZZ)` has four times the
/// `J/4` normalization of the generic exchange Hamiltonian.
pub const DIPOLE_AREA_FACTOR: f64 = 4.0;

/// Anisotropy of the dipole-dipole coupling along the connecting axis.
pub const DIPOLE_ANISOTROPY: f64 = -2.0;

/// Flip-exponential angle per unit of isotropic pulse area:
/// `exchange_unitary(alpha, 1) = e^{i alpha/4} e^{i (-alpha/2) F}`.
pub const FLIP_ANGLE_PER_PULSE_AREA: f64 = -0.5;

/// One exchange pulse: pulse area `alpha` and anisotropy `xi_anisotropy`
/// (1 Heisenberg, 0 XY, -2 dipole-dipole).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangePulse {
    pub alpha: f64,
    pub xi_anisotropy: f64,
}

impl ExchangePulse {
    pub fn new(alpha: f64, xi_anisotropy: f64) -> Result<Self> {
        if !alpha.is_finite() || !xi_anisotropy.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse parameters must be finite (alpha = {alpha}, xi = {xi_anisotropy})"
            )));
        }
        Ok(Self {
            alpha,
            xi_anisotropy,
        })
    }

    pub fn heisenberg(alpha: f64) -> Self {
        Self {
            alpha,
            xi_anisotropy: 1.0,
        }
    }
}

/// Closed-form propagator `e^{-i ∫ H dt}` of
/// `H = J(t)/4 (XX + YY + xi ZZ)` for pulse area `alpha`.
pub fn exchange_unitary(p: ExchangePulse) -> ComplexMatrix {
    let corner = C64::from_polar(1.0, -p.alpha * p.xi_anisotropy / 4.0);
    let inner = C64::from_polar(1.0, p.alpha * p.xi_anisotropy / 4.0);
    let (s, c) = (p.alpha / 2.0).sin_cos();
    let mut u = ComplexMatrix::zeros(4);
    u[(0, 0)] = corner;
    u[(3, 3)] = corner;
    u[(1, 1)] = inner * c;
    u[(2, 2)] = inner * c;
    u[(1, 2)] = -I * inner * s;
    u[(2, 1)] = -I * inner * s;
    u
}

/// Hermitian `G` with `exchange_unitary(p) = e^{iG}`.
pub fn exchange_generator(p: ExchangePulse) -> ComplexMatrix {
    let [_, x, y, z] = paulis();
    let mut h = kron(&x, &x);
    h.add_scaled(&kron(&y, &y), ONE);
    h.add_scaled(&kron(&z, &z), C64::new(p.xi_anisotropy, 0.0));
    h.scale_real(-p.alpha / 4.0)
}

pub fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn sqrt_swap() -> ComplexMatrix {
    let a = C64::new(0.5, -0.5);
    let b = C64::new(0.5, 0.5);
    let mut u = ComplexMatrix::identity(4);
    u[(1, 1)] = a;
    u[(2, 2)] = a;
    u[(1, 2)] = b;
    u[(2, 1)] = b;
    u
}

pub fn iswap() -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    u[(1, 1)] = ZERO;
    u[(2, 2)] = ZERO;
    u[(1, 2)] = I;
    u[(2, 1)] = I;
    u
}

/// Exchange pulse reproducing a dipole-dipole pulse of area `alpha_dd`
/// (area measured in units of `mu0 gamma^2 / (16 pi r^3)`).
pub fn dipole_pulse_to_exchange(alpha_dd: f64) -> ExchangePulse {
    ExchangePulse {
        alpha: DIPOLE_AREA_FACTOR * alpha_dd,
        xi_anisotropy: DIPOLE_ANISOTROPY,
    }
}

/// Operator sending tensor factor `q` to position `dest[q]`.
fn permutation_operator(dest: &[usize], n: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim);
    for x in 0..dim {
        let mut y = 0;
        for (q, &d) in dest.iter().enumerate() {
            let bit = (x >> (n - 1 - q)) & 1;
            y |= bit << (n - 1 - d);
        }
        m[(y, x)] = ONE;
    }
    m
}

fn check_distinct(indices: &[usize], n: usize) -> Result<()> {
    if n > crate::linalg::MAX_QUBITS {
        return Err(Error::Dimension(format!("{n} qubits is too many")));
    }
    for (i, &q) in indices.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitIndex { index: q, n_qubits: n });
        }
        if indices[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// The flip `F_ij`, exchanging tensor factors `i` and `j` of `n` qubits.
pub fn flip(i: usize, j: usize, n: usize) -> Result<ComplexMatrix> {
    check_distinct(&[i, j], n)?;
    let mut dest: Vec<usize> = (0..n).collect();
    dest.swap(i, j);
    Ok(permutation_operator(&dest, n))
}

/// The cyclic permutation `Z_ijk = F_ij F_jk`, moving factor `i` to `j`,
/// `j` to `k` and `k` to `i`.
pub fn cycle(i: usize, j: usize, k: usize, n: usize) -> Result<ComplexMatrix> {
    check_distinct(&[i, j, k], n)?;
    let mut dest: Vec<usize> = (0..n).collect();
    dest[i] = j;
    dest[j] = k;
    dest[k] = i;
    Ok(permutation_operator(&dest, n))
}

/// `e^{i angle F_ij} = cos(angle) I + i sin(angle) F_ij`.
pub fn flip_exponential(flip_angle: f64, i: usize, j: usize, n: usize) -> Result<ComplexMatrix> {
    let f = flip(i, j, n)?;
    let mut u = ComplexMatrix::identity(1 << n).scale_real(flip_angle.cos());
    u.add_scaled(&f, I * flip_angle.sin());
    Ok(u)
}

/// Basis `A_+, A_-, A_0, A_1, A_2, A_3` of the algebra generated by the
/// permutations of one party's three qubits.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    pub triple: [usize; 3],
    pub n_qubits: usize,
    /// Projector onto the symmetric subspace.
    pub plus: ComplexMatrix,
    /// Projector onto the antisymmetric subspace (zero for qubits).
    pub minus: ComplexMatrix,
    /// Projector onto the two-dimensional irrep.
    pub zero: ComplexMatrix,
    /// `A_1, A_2, A_3`, acting as Pauli matrices on the range of `A_0`.
    pub paulis: [ComplexMatrix; 3],
}

/// Largest violations of the basis identities.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct BasisDeviations {
    pub resolution_of_identity: f64,
    pub antisymmetric_part: f64,
    pub projectors: f64,
    pub commutators: f64,
    pub squares: f64,
}

impl BasisDeviations {
    pub fn max(&self) -> f64 {
        [
            self.resolution_of_identity,
            self.antisymmetric_part,
            self.projectors,
            self.commutators,
            self.squares,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn algebra_basis(triple: [usize; 3], n: usize) -> Result<AlgebraBasis> {
    let [i, j, k] = triple;
    check_distinct(&triple, n)?;
    let id = ComplexMatrix::identity(1 << n);
    let f_ij = flip(i, j, n)?;
    let f_jk = flip(j, k, n)?;
    let f_ik = flip(i, k, n)?;
    let z_ijk = cycle(i, j, k, n)?;
    let z_ikj = cycle(i, k, j, n)?;

    let combo = |terms: &[(&ComplexMatrix, f64)], scale: C64| {
        let mut m = ComplexMatrix::zeros(1 << n);
        for (op, w) in terms {
            m.add_scaled(op, scale * *w);
        }
        m
    };
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let third = C64::new(1.0 / 3.0, 0.0);
    let inv_sqrt3 = C64::new(1.0 / 3f64.sqrt(), 0.0);

    let plus = combo(
        &[(&id, 1.0), (&f_ij, 1.0), (&f_jk, 1.0), (&f_ik, 1.0), (&z_ijk, 1.0), (&z_ikj, 1.0)],
        sixth,
    );
    let minus = combo(
        &[(&id, 1.0), (&f_ij, -1.0), (&f_jk, -1.0), (&f_ik, -1.0), (&z_ijk, 1.0), (&z_ikj, 1.0)],
        sixth,
    );
    let zero = combo(&[(&id, 2.0), (&z_ijk, -1.0), (&z_ikj, -1.0)], third);
    let a1 = combo(&[(&f_jk, 2.0), (&f_ij, -1.0), (&f_ik, -1.0)], third);
    let a2 = combo(&[(&f_ij, 1.0), (&f_ik, -1.0)], inv_sqrt3);
    let a3 = combo(&[(&z_ijk, 1.0), (&z_ikj, -1.0)], I * inv_sqrt3);

    Ok(AlgebraBasis {
        triple,
        n_qubits: n,
        plus,
        minus,
        zero,
        paulis: [a1, a2, a3],
    })
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    /// `[A_+, A_-, A_0, A_1, A_2, A_3]`.
    pub fn elements(&self) -> [&ComplexMatrix; 6] {
        [
            &self.plus,
            &self.minus,
            &self.zero,
            &self.paulis[0],
            &self.paulis[1],
            &self.paulis[2],
        ]
    }

    pub fn deviations(&self) -> BasisDeviations {
        let id = ComplexMatrix::identity(self.dim());
        let sum = &(&self.plus + &self.minus) + &self.zero;
        let mut projectors: f64 = 0.0;
        for (a, b) in [(&self.plus, &self.minus), (&self.plus, &self.zero), (&self.minus, &self.zero)] {
            projectors = projectors.max(a.matmul(b).max_abs());
        }
        for p in [&self.plus, &self.minus, &self.zero] {
            projectors = projectors.max(p.matmul(p).max_abs_diff(p));
            projectors = projectors.max(p.max_abs_diff(&p.adjoint()));
        }
        let mut commutators: f64 = 0.0;
        for (l, m, nn) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lhs = self.paulis[l].commutator(&self.paulis[m]);
            let rhs = self.paulis[nn].scale(I * 2.0);
            commutators = commutators.max(lhs.max_abs_diff(&rhs));
        }
        let squares = self
            .paulis
            .iter()
            .map(|a| a.matmul(a).max_abs_diff(&self.zero))
            .fold(0.0, f64::max);
        BasisDeviations {
            resolution_of_identity: sum.max_abs_diff(&id),
            antisymmetric_part: self.minus.max_abs(),
            projectors,
            commutators,
            squares,
        }
    }
}

/// Canonical parameters of a party's three-qubit unitary
/// `e^{i(alpha A_+ + a·A)}`, with `alpha` reduced to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyUnitary3 {
    pub alpha: f64,
    pub a: [f64; 3],
}

impl PartyUnitary3 {
    pub fn new(alpha: f64, a: [f64; 3]) -> Self {
        let mut alpha = alpha.rem_euclid(TAU);
        if alpha >= TAU {
            alpha = 0.0;
        }
        Self { alpha, a }
    }

    pub fn identity() -> Self {
        Self::new(0.0, [0.0; 3])
    }

    pub fn magnitude(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Parameters of the complex-conjugate matrix. `A_+`, `A_0`, `A_1`, `A_2`
    /// are real and `A_3` is imaginary.
    pub fn conjugate(&self) -> Self {
        Self::new(-self.alpha, [-self.a[0], -self.a[1], self.a[2]])
    }
}

/// Closed form `e^{i alpha} A_+ + cos|a| A_0 + i sin|a| (â·A)`.
pub fn party_unitary(p: &PartyUnitary3, basis: &AlgebraBasis) -> ComplexMatrix {
    let mut u = basis.plus.scale(C64::from_polar(1.0, p.alpha));
    let r = p.magnitude();
    u.add_scaled(&basis.zero, C64::new(r.cos(), 0.0));
    if r > 0.0 {
        let s = r.sin() / r;
        for (a, op) in p.a.iter().zip(&basis.paulis) {
            u.add_scaled(op, I * (s * a));
        }
    }
    u
}

/// Hermitian generator `alpha A_+ + a·A`.
pub fn party_generator(p: &PartyUnitary3, basis: &AlgebraBasis) -> ComplexMatrix {
    let mut g = basis.plus.scale_real(p.alpha);
    for (a, op) in p.a.iter().zip(&basis.paulis) {
        g.add_scaled(op, C64::new(*a, 0.0));
    }
    g
}

/// Least-squares expansion of an operator in an [`AlgebraBasis`].
#[derive(Clone, Debug)]
pub struct AlgebraProjection {
    /// Coefficients of `A_+, A_-, A_0, A_1, A_2, A_3`.
    pub coefficients: [C64; 6],
    /// Frobenius norm of the part of `u` outside the span.
    pub residual: f64,
}

impl AlgebraProjection {
    pub fn reconstruct(&self, basis: &AlgebraBasis) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(basis.dim());
        for (c, op) in self.coefficients.iter().zip(basis.elements()) {
            m.add_scaled(op, *c);
        }
        m
    }
}

pub fn algebra_project(u: &ComplexMatrix, basis: &AlgebraBasis) -> Result<AlgebraProjection> {
    if u.dim() != basis.dim() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} against basis of dimension {}",
            u.dim(),
            basis.dim()
        )));
    }
    let elements = basis.elements();
    // A_- vanishes on qubits; leave it out of the normal equations.
    let active: Vec<usize> = (0..6)
        .filter(|&k| elements[k].frobenius_norm() > 1e-12)
        .collect();
    let m = active.len();
    let gram = DMatrix::from_fn(m, m, |r, c| elements[active[r]].hs_inner(elements[active[c]]));
    let rhs = DVector::from_fn(m, |r, _| elements[active[r]].hs_inner(u));
    let solution = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Dimension("singular Gram matrix".into()))?;
    let mut coefficients = [ZERO; 6];
    for (r, &k) in active.iter().enumerate() {
        coefficients[k] = solution[r];
    }
    let projection = AlgebraProjection {
        coefficients,
        residual: 0.0,
    };
    let residual = (u - &projection.reconstruct(basis)).frobenius_norm();
    Ok(AlgebraProjection {
        residual,
        ..projection
    })
}

/// The two-pair bilateral operation `U_13(alpha) ⊗ U_24(beta)` on four qubits
/// ordered `1, 2, 3, 4`.
pub fn bilateral_exchange(alpha: ExchangePulse, beta: ExchangePulse) -> ComplexMatrix {
    let ua = embed_operator(&exchange_unitary(alpha), &[0, 2], 4).expect("valid targets");
    let ub = embed_operator(&exchange_unitary(beta), &[1, 3], 4).expect("valid targets");
    ua.matmul(&ub)
}

/// Global phase and flip angle with `exchange_unitary(heisenberg(alpha)) =
/// e^{i phase} e^{i angle F}`.
pub fn heisenberg_as_flip_exponential(alpha: f64) -> (f64, f64) {
    (alpha / 4.0, FLIP_ANGLE_PER_PULSE_AREA * alpha)
}

/// Pulse area of the optimal dipole-dipole pulse.
pub const OPTIMAL_DIPOLE_AREA: f64 = PI / 8.0;
