//! Dense complex linear algebra for operators on up to six qubits.
//!
//! Matrices are stored row-major. Qubit 0 is the most significant bit of a
//! computational-basis index, so on `n` qubits basis state `|b_0 b_1 ... b_{n-1}>`
//! has index `sum_q b_q * 2^(n-1-q)`. Physical qubit labels `1..=n` map to
//! indices `0..n`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest supported register.
pub const MAX_QUBITS: usize = 6;

/// Tolerance for structural invariants (Hermiticity, trace, normalization).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for comparing an analytic construction against a numeric oracle.
pub const ORACLE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a positive semidefinite state.
pub const PSD_TOL: f64 = 1e-10;

/// Square dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::Dimension(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `u * self * u^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in apply");
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= eps
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= eps))
    }

    pub fn is_unitary(&self, eps: f64) -> bool {
        self.matmul(&self.adjoint())
            .approx_eq(&Self::identity(self.dim), eps)
    }

    /// `min_phi max_ij |self - e^{i phi} other|`, with `phi` fixed by the
    /// Hilbert-Schmidt overlap. Zero iff the two agree up to a global phase.
    pub fn phase_aligned_distance(&self, other: &Self) -> f64 {
        let overlap = other.hs_inner(self);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.max_abs_diff(&other.scale(phase))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, " ")?;
            for z in self.row(r) {
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    ComplexMatrix::from_fn(da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_qubits(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("{dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::QubitIndex { index: t, n_qubits: n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Splits a basis index into the bits on `targets` (in target order) and the
/// remaining bits (in ascending qubit order).
struct BitSplit {
    n: usize,
    targets: Vec<usize>,
    rest: Vec<usize>,
}

impl BitSplit {
    fn new(targets: &[usize], n: usize) -> Self {
        let rest = (0..n).filter(|q| !targets.contains(q)).collect();
        Self {
            n,
            targets: targets.to_vec(),
            rest,
        }
    }

    fn gather(&self, index: usize, qubits: &[usize]) -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((index >> (self.n - 1 - q)) & 1))
    }

    fn target_part(&self, index: usize) -> usize {
        self.gather(index, &self.targets)
    }

    fn rest_part(&self, index: usize) -> usize {
        self.gather(index, &self.rest)
    }

    fn compose(&self, target_bits: usize, rest_bits: usize) -> usize {
        let mut index = 0;
        let k = self.targets.len();
        for (pos, &q) in self.targets.iter().enumerate() {
            index |= ((target_bits >> (k - 1 - pos)) & 1) << (self.n - 1 - q);
        }
        let m = self.rest.len();
        for (pos, &q) in self.rest.iter().enumerate() {
            index |= ((rest_bits >> (m - 1 - pos)) & 1) << (self.n - 1 - q);
        }
        index
    }
}

/// Lifts `u`, acting on the ordered qubit list `targets`, to an `n`-qubit
/// operator that is the identity on every other qubit.
pub fn embed_operator(u: &ComplexMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    if n > MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    check_targets(targets, n)?;
    if u.dim() != 1 << targets.len() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} cannot act on {} qubits",
            u.dim(),
            targets.len()
        )));
    }
    let split = BitSplit::new(targets, n);
    let dim = 1 << n;
    let mut out = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        let (rt, rr) = (split.target_part(r), split.rest_part(r));
        for ct in 0..u.dim() {
            let v = u[(rt, ct)];
            if v != ZERO {
                out[(r, split.compose(ct, rr))] = v;
            }
        }
    }
    Ok(out)
}

/// Reduced operator on the qubits in `keep` (output ordered by ascending
/// qubit index).
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = check_qubits(m.dim())?;
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    check_targets(keep, n)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let split = BitSplit::new(&keep, n);
    let kd = 1 << keep.len();
    let ed = 1 << (n - keep.len());
    Ok(ComplexMatrix::from_fn(kd, |i, j| {
        (0..ed)
            .map(|e| m[(split.compose(i, e), split.compose(j, e))])
            .sum()
    }))
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_hermitian(ORACLE_TOL) {
        return Err(Error::NotHermitian);
    }
    let eig = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `e^{iH}` for Hermitian `H`, via `V diag(e^{i lambda}) V^dagger`.
pub fn expm_hermitian_generator(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, v) = hermitian_eigen(h)?;
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    let vd = ComplexMatrix::from_fn(v.dim(), |r, c| v[(r, c)] * phases[c]);
    Ok(vd.matmul(&v.adjoint()))
}

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_qubits(amps.len())?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_qubits];
        *amps.get_mut(index).ok_or(Error::QubitIndex {
            index,
            n_qubits,
        })? = ONE;
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |r, c| self.amps[r] * self.amps[c].conj())
    }

    /// `<psi| m |psi>`.
    pub fn expectation(&self, m: &ComplexMatrix) -> C64 {
        let mv = m.apply(&self.amps);
        self.amps.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n_qubits = check_qubits(matrix.dim())?;
        if !matrix.is_hermitian(STRUCTURE_TOL) {
            return Err(Error::NotHermitian);
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STRUCTURE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let (values, _) = hermitian_eigen(&matrix)?;
        if let Some(&min) = values.first() {
            if min < -PSD_TOL {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(Self { matrix, n_qubits })
    }

    /// Renormalizes a nonzero positive operator to unit trace.
    pub fn normalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::TraceNotOne(tr));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self {
            matrix: psi.projector(),
            n_qubits: psi.dim().trailing_zeros() as usize,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1 << n_qubits;
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix)
            .map(|(v, _)| v)
            .unwrap_or_default()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(kron(&self.matrix, &other.matrix))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Self::new(partial_trace_matrix(&self.matrix, keep)?)
    }

    /// `u rho u^dagger` for a unitary `u`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "unitary of dimension {} on state of dimension {}",
                u.dim(),
                self.dim()
            )));
        }
        let mut m = self.matrix.conjugate_by(u);
        hermitize(&mut m);
        Self::new(m)
    }
}

/// Replaces `m` with `(m + m^dagger) / 2` to scrub rounding asymmetry.
pub fn hermitize(m: &mut ComplexMatrix) {
    let d = m.dim();
    for r in 0..d {
        for c in r..d {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
}

/// Pauli matrices, `[I, X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]),
        ComplexMatrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        }),
        ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]),
    ]
}
