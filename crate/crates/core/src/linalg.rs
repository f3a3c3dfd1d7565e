//! Dense complex linear algebra for small quantum registers.
//!
//! Basis-index convention used throughout the crate: for an `n`-qubit register
//! the computational basis index is `i = Σ_k 2^k q_k`, so qubit 0 is the least
//! significant bit. [`tensor_product`] places its first argument in the
//! most-significant block, hence an operator acting on qubit `q` is embedded as
//! `I^{⊗(n-1-q)} ⊗ op ⊗ I^{⊗q}`.
//!
//! States are rays: two state vectors describe the same physical state iff
//! `|⟨a|b⟩|² = 1`. Nothing in this crate compares amplitudes directly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const STATE_NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
/// Off-diagonal Frobenius norm (relative to the matrix norm) at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn unitary_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    max_abs(&(prod - CMatrix::identity(n, n)))
}

fn require_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidArgument("matrix must be at least 1x1".into()));
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::DimensionMismatch { expected, actual })
    } else {
        Ok(())
    }
}

/// A normalised pure state `|ψ⟩ ∈ C^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("state must have dimension >= 1".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "norm {norm} differs from 1 by more than {STATE_NORM_TOL:e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if v.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    /// Computational basis state `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Self { amplitudes: v })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() <= 1e-8);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`, the state fidelity between two pure states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Entrywise complex conjugate `|ψ*⟩`.
    pub fn conj(&self) -> StateVector {
        Self {
            amplitudes: self.amplitudes.map(|z| z.conj()),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// `ρ = |ψ⟩⟨ψ|` or any Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. The positivity check
    /// runs a full eigendecomposition.
    pub fn new(entries: CMatrix) -> Result<Self> {
        require_square(&entries)?;
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let (values, _) = jacobi_eigh(&entries)?;
        if values[0] < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {} below -{PSD_TOL:e}",
                values[0]
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.as_vector();
        Self {
            entries: v * v.adjoint(),
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `tr{ρ²}`.
    pub fn purity(&self) -> f64 {
        hs_inner_product(self, self).expect("same dimension")
    }

    /// `ρ' = U ρ U†`.
    pub fn evolve(&self, u: &Unitary) -> Result<DensityMatrix> {
        check_dims(self.dim(), u.dim())?;
        Ok(Self {
            entries: &u.entries * &self.entries * u.entries.adjoint(),
        })
    }
}

/// A Hermitian operator (observable or generator).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        require_square(&entries)?;
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { entries })
    }

    pub fn from_real_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|v| C64::new(v, 0.0)))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty diagonal".into()));
        }
        let d = CVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Ok(Self {
            entries: CMatrix::from_diagonal(&d),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * factor),
        }
    }

    /// Embeds a single-qubit operator on `qubit` of an `n_qubits` register.
    pub fn on_qubit(&self, qubit: usize, n_qubits: usize) -> Result<Self> {
        Ok(Self {
            entries: embed_single_qubit(&self.entries, qubit, n_qubits)?,
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// A unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    entries: CMatrix,
}

impl Unitary {
    pub fn new(entries: CMatrix) -> Result<Self> {
        require_square(&entries)?;
        let deviation = unitary_deviation(&entries);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_matrix_unchecked(entries: CMatrix) -> Self {
        debug_assert!(unitary_deviation(&entries) <= 1e-8);
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    /// `e^{-i t G}` computed as `V e^{-i t Λ} V†` from the eigendecomposition of `G`.
    pub fn evolution(generator: &HermitianOperator, t: f64) -> Result<Self> {
        let eig = hermitian_eigendecomposition(generator)?;
        Ok(eig.exp_i(-t))
    }

    /// `R_X(θ) = e^{-i θ σ_x / 2}`.
    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            entries: CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)],
            ),
        }
    }

    /// `R_Y(θ) = e^{-i θ σ_y / 2}`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            entries: CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
            ),
        }
    }

    /// `R_Z(θ) = e^{-i θ σ_z / 2}`.
    pub fn rz(theta: f64) -> Self {
        let half = theta / 2.0;
        Self {
            entries: CMatrix::from_row_slice(
                2,
                2,
                &[C64::from_polar(1.0, -half), ZERO, ZERO, C64::from_polar(1.0, half)],
            ),
        }
    }

    /// General single-qubit rotation
    ///
    /// ```text
    /// R(θ1,θ2,θ3) = [ e^{i(-θ1-θ3)/2} cos(θ2/2)   -e^{i(-θ1+θ3)/2} sin(θ2/2) ]
    ///               [ e^{i( θ1-θ3)/2} sin(θ2/2)    e^{i( θ1+θ3)/2} cos(θ2/2) ]
    /// ```
    ///
    /// which equals `R_Z(θ1) R_Y(θ2) R_Z(θ3)`.
    pub fn euler(theta1: f64, theta2: f64, theta3: f64) -> Self {
        let (s, c) = (theta2 / 2.0).sin_cos();
        let e = |phase: f64| C64::from_polar(1.0, phase / 2.0);
        Self {
            entries: CMatrix::from_row_slice(
                2,
                2,
                &[
                    e(-theta1 - theta3) * c,
                    -e(-theta1 + theta3) * s,
                    e(theta1 - theta3) * s,
                    e(theta1 + theta3) * c,
                ],
            ),
        }
    }

    /// Embeds a single-qubit unitary on `qubit` of an `n_qubits` register.
    pub fn on_qubit(&self, qubit: usize, n_qubits: usize) -> Result<Self> {
        Ok(Self {
            entries: embed_single_qubit(&self.entries, qubit, n_qubits)?,
        })
    }

    /// CNOT with the given control and target qubits.
    pub fn cnot(control: usize, target: usize, n_qubits: usize) -> Result<Self> {
        if control >= n_qubits || target >= n_qubits || control == target {
            return Err(Error::InvalidArgument(format!(
                "invalid CNOT control {control} / target {target} on {n_qubits} qubits"
            )));
        }
        let dim = 1usize << n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let row = if col >> control & 1 == 1 {
                col ^ (1 << target)
            } else {
                col
            };
            m[(row, col)] = ONE;
        }
        Ok(Self { entries: m })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// Entrywise conjugate `U*` (not transposed).
    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.map(|z| z.conj()),
        }
    }

    /// Matrix product `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }
}

fn embed_single_qubit(op: &CMatrix, qubit: usize, n_qubits: usize) -> Result<CMatrix> {
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: op.nrows(),
        });
    }
    if qubit >= n_qubits {
        return Err(Error::InvalidArgument(format!(
            "qubit {qubit} out of range for {n_qubits} qubits"
        )));
    }
    let high = CMatrix::identity(1 << (n_qubits - 1 - qubit), 1 << (n_qubits - 1 - qubit));
    let low = CMatrix::identity(1 << qubit, 1 << qubit);
    Ok(high.kronecker(op).kronecker(&low))
}

/// Kronecker product with the first factor as the most-significant index block.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl TensorProduct for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

impl TensorProduct for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }
}

impl TensorProduct for HermitianOperator {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }
}

impl TensorProduct for Unitary {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// as columns of a unitary, so that `H = V diag(λ) V†`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: Unitary,
}

impl Eigendecomposition {
    /// `V diag(e^{i t λ}) V†`.
    pub fn exp_i(&self, t: f64) -> Unitary {
        let v = self.vectors.entries();
        let mut scaled = v.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, t * lambda);
            for i in 0..v.nrows() {
                scaled[(i, j)] = v[(i, j)] * phase;
            }
        }
        Unitary::from_matrix_unchecked(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> CMatrix {
        let v = self.vectors.entries();
        let d = CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&l| C64::new(l, 0.0)),
        );
        v * CMatrix::from_diagonal(&d) * v.adjoint()
    }
}

pub fn hermitian_eigendecomposition(h: &HermitianOperator) -> Result<Eigendecomposition> {
    let (values, vectors) = jacobi_eigh(h.entries())?;
    Ok(Eigendecomposition {
        values,
        vectors: Unitary::from_matrix_unchecked(vectors),
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of `a_pq`
/// and then applies the real symmetric Jacobi rotation, so the combined
/// transform on the `(p, q)` plane is
/// `U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]` with `a_pq = |a_pq| e^{iφ}`.
fn jacobi_eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = require_square(h)?;
    let mut a = h.clone();
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm();
    let threshold = JACOBI_TOL * scale;
    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNotConverged { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e_minus = phase.conj();
                // columns: A ← A U, V ← V U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * e_minus * s;
                    a[(k, q)] = akp * s + akq * e_minus * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * e_minus * s;
                    v[(k, q)] = vkp * s + vkq * e_minus * c;
                }
                // rows: A ← U† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// `tr{ρ M}`; the imaginary part must vanish to within `1e-10`.
pub fn expectation(rho: &DensityMatrix, m: &HermitianOperator) -> Result<f64> {
    check_dims(rho.dim(), m.dim())?;
    let n = rho.dim();
    let mut tr = ZERO;
    for i in 0..n {
        for j in 0..n {
            tr += rho.entries[(i, j)] * m.entries[(j, i)];
        }
    }
    real_part_checked(tr, 1e-10 * max_abs(m.entries()).max(1.0))
}

/// `⟨ψ|M|ψ⟩`, equal to [`expectation`] of `|ψ⟩⟨ψ|` without forming the density matrix.
pub fn state_expectation(psi: &StateVector, m: &HermitianOperator) -> Result<f64> {
    check_dims(psi.dim(), m.dim())?;
    let mv = &m.entries * psi.as_vector();
    let value = psi.as_vector().dotc(&mv);
    real_part_checked(value, 1e-10 * max_abs(m.entries()).max(1.0))
}

/// Hilbert-Schmidt inner product `⟨ρ,σ⟩ = tr{ρ†σ}`.
pub fn hs_inner_product(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let tr: C64 = rho
        .entries
        .iter()
        .zip(sigma.entries.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    real_part_checked(tr, 1e-10)
}

fn real_part_checked(z: C64, tol: f64) -> Result<f64> {
    if z.im.abs() > tol {
        Err(Error::ImaginaryResidue { residue: z.im.abs() })
    } else {
        Ok(z.re)
    }
}

/// `|ψ'⟩ = U|ψ⟩`.
pub fn apply_unitary(u: &Unitary, psi: &StateVector) -> Result<StateVector> {
    check_dims(u.dim(), psi.dim())?;
    Ok(StateVector::from_vector_unchecked(&u.entries * psi.as_vector()))
}

#[cfg(test)]
pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}


/// `[re, im]`
pub type ComplexPair = [f64; 2];

/// Row-major flattening of a square complex matrix into `[re, im]` pairs.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<ComplexPair> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

/// Inverse of [`matrix_to_pairs`]; the side length is `sqrt(len)`.
pub fn matrix_from_pairs(pairs: &[ComplexPair]) -> Result<CMatrix> {
    let n = (pairs.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != pairs.len() {
        return Err(Error::MalformedInput(format!(
            "{} entries do not form a square matrix",
            pairs.len()
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = pairs[i * n + j];
        C64::new(re, im)
    }))
}

macro_rules! serde_as_pairs {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serde::Serialize::serialize(&matrix_to_pairs(&self.entries), s)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let pairs = <Vec<ComplexPair> as serde::Deserialize>::deserialize(d)?;
                matrix_from_pairs(&pairs)
                    .and_then(<$ty>::new)
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_pairs!(HermitianOperator);
serde_as_pairs!(Unitary);
