//! Data-encoding feature maps `x ↦ |φ(x)⟩`, `x ↦ ρ(x)` and the vectorised
//! map `x ↦ |φ(x)⟩ ⊗ |φ*(x)⟩`.
//!
//! Rotations use the gate convention `R_σ(x) = e^{-i (x/2) σ}`. Multi-feature
//! encodings place feature `k` on qubit (or mode) `k`, least significant first.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    apply_unitary, hermitian_eigendecomposition, matrix_from_pairs, matrix_to_pairs,
    ComplexPair, CVector, DensityMatrix,
    Eigendecomposition, HermitianOperator, StateVector, TensorProduct, Unitary, C64,
};

/// Largest Hilbert-space dimension an encoding may produce.
pub const MAX_STATE_DIM: usize = 1 << 20;
/// Largest tolerated norm lost by truncating a coherent state to the Fock cutoff.
pub const COHERENT_DEFICIT_TOL: f64 = 1e-12;
const AMPLITUDE_NORM_TOL: f64 = 1e-10;

/// One input `x`. Real for every strategy except amplitude encoding, which
/// accepts complex entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataPoint {
    values: Vec<C64>,
}

impl DataPoint {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values: values.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        }
    }

    pub fn complex(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(Error::MalformedInput(
                "complex input given to an encoding that takes real features".into(),
            ));
        }
        Ok(self.values.iter().map(|z| z.re).collect())
    }

    /// Adds a real offset to every feature.
    pub fn shifted(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: offset.len(),
            });
        }
        Ok(Self {
            values: self.values.iter().zip(offset).map(|(z, o)| z + o).collect(),
        })
    }
}

impl From<Vec<f64>> for DataPoint {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

impl From<&[f64]> for DataPoint {
    fn from(values: &[f64]) -> Self {
        Self::new(values.to_vec())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Serialize for DataPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let out: Vec<Scalar> = self
            .values
            .iter()
            .map(|z| {
                if z.im == 0.0 {
                    Scalar::Real(z.re)
                } else {
                    Scalar::Complex([z.re, z.im])
                }
            })
            .collect();
        out.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DataPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Scalar>::deserialize(d)?;
        Ok(Self {
            values: raw
                .into_iter()
                .map(|s| match s {
                    Scalar::Real(v) => C64::new(v, 0.0),
                    Scalar::Complex([re, im]) => C64::new(re, im),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn rotation(self, angle: f64) -> Unitary {
        match self {
            Axis::X => Unitary::rx(angle),
            Axis::Y => Unitary::ry(angle),
            Axis::Z => Unitary::rz(angle),
        }
    }

    pub fn pauli(self) -> HermitianOperator {
        match self {
            Axis::X => HermitianOperator::pauli_x(),
            Axis::Y => HermitianOperator::pauli_y(),
            Axis::Z => HermitianOperator::pauli_z(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Time-evolution encoding
/// `S(x) = W^(N+1) e^{-i x_N G} W^(N) ⋯ W^(2) e^{-i x_1 G} W^(1)` on `n_qubits`.
#[derive(Debug, Clone)]
pub struct GeneralEvolution {
    n_qubits: usize,
    generator: HermitianOperator,
    interleavers: Vec<Unitary>,
    eigen: Eigendecomposition,
}

impl PartialEq for GeneralEvolution {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits
            && self.generator == other.generator
            && self.interleavers == other.interleavers
    }
}

impl GeneralEvolution {
    /// `interleavers` holds `W^(1) .. W^(N+1)`, so `N = interleavers.len() - 1`.
    pub fn new(
        n_qubits: usize,
        generator: HermitianOperator,
        interleavers: Vec<Unitary>,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 20 {
            return Err(Error::InvalidSpec(format!("n_qubits = {n_qubits} out of range")));
        }
        let dim = 1usize << n_qubits;
        if generator.dim() != dim {
            return Err(Error::InvalidSpec(format!(
                "generator is {0}x{0}, expected {dim}x{dim}",
                generator.dim()
            )));
        }
        if interleavers.len() < 2 {
            return Err(Error::InvalidSpec(
                "need N + 1 >= 2 interleaving unitaries".into(),
            ));
        }
        if let Some((i, w)) = interleavers.iter().enumerate().find(|(_, w)| w.dim() != dim) {
            return Err(Error::InvalidSpec(format!(
                "interleaver W^({}) is {}x{}, expected {dim}x{dim}",
                i + 1,
                w.dim(),
                w.dim()
            )));
        }
        let eigen = hermitian_eigendecomposition(&generator)?;
        Ok(Self {
            n_qubits,
            generator,
            interleavers,
            eigen,
        })
    }

    /// All interleavers set to the identity.
    pub fn with_identity_interleavers(
        n_qubits: usize,
        generator: HermitianOperator,
        input_dim: usize,
    ) -> Result<Self> {
        let dim = generator.dim();
        Self::new(n_qubits, generator, vec![Unitary::identity(dim); input_dim + 1])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn input_dim(&self) -> usize {
        self.interleavers.len() - 1
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.generator
    }

    pub fn interleavers(&self) -> &[Unitary] {
        &self.interleavers
    }

    /// Eigendecomposition `G = V Λ V†` computed at construction.
    pub fn eigen(&self) -> &Eigendecomposition {
        &self.eigen
    }

    /// Interleavers rewritten for the diagonal generator `Λ`:
    /// `V†W^(1)`, `V†W^(i)V` for `1 < i <= N`, and `W^(N+1)V`.
    pub fn absorbed_interleavers(&self) -> Vec<Unitary> {
        let v = self.eigen.vectors.entries();
        let vd = v.adjoint();
        let last = self.interleavers.len() - 1;
        self.interleavers
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let w = w.entries();
                let m = if i == 0 {
                    &vd * w
                } else if i == last {
                    w * v
                } else {
                    &vd * w * v
                };
                Unitary::from_matrix_unchecked(m)
            })
            .collect()
    }

    /// The same circuit written with the diagonal generator `diag(λ)` and the
    /// absorbed interleavers.
    pub fn diagonalized(&self) -> Result<Self> {
        Self::new(
            self.n_qubits,
            HermitianOperator::from_diagonal(&self.eigen.values)?,
            self.absorbed_interleavers(),
        )
    }

    fn apply_encoding_gate(&self, psi: &CVector, x: f64) -> CVector {
        let v = self.eigen.vectors.entries();
        let mut coeffs = v.adjoint() * psi;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigen.values) {
            *c *= C64::from_polar(1.0, -x * lambda);
        }
        v * coeffs
    }
}

/// Declarative description of a data-encoding circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum EncodingSpec {
    /// Bit `k` of the input selects qubit `k`; `|x⟩ = |Σ_k 2^k x_k⟩`.
    Basis,
    /// The (complex, unit-norm) input is the state vector.
    Amplitude,
    /// `r` copies of the amplitude-encoded state.
    RepeatedAmplitude { r: usize },
    /// `R_axis(x_k)` on qubit `k`.
    Rotation { axis: Axis },
    /// One truncated coherent state `|α = x_k⟩` per feature, Fock cutoff `cutoff`.
    Coherent { cutoff: usize },
    GeneralEvolution(GeneralEvolution),
}

impl EncodingSpec {
    pub fn repeated_amplitude(r: usize) -> Result<Self> {
        let spec = EncodingSpec::RepeatedAmplitude { r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn coherent(cutoff: usize) -> Result<Self> {
        let spec = EncodingSpec::Coherent { cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rotation(axis: Axis) -> Self {
        EncodingSpec::Rotation { axis }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EncodingSpec::RepeatedAmplitude { r } if *r == 0 => {
                Err(Error::InvalidSpec("repeated amplitude encoding needs r >= 1".into()))
            }
            EncodingSpec::Coherent { cutoff } if *cutoff < 2 => {
                Err(Error::InvalidSpec("coherent encoding needs cutoff >= 2".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EncodingSpec::Basis => "basis",
            EncodingSpec::Amplitude => "amplitude",
            EncodingSpec::RepeatedAmplitude { .. } => "repeated_amplitude",
            EncodingSpec::Rotation { .. } => "rotation",
            EncodingSpec::Coherent { .. } => "coherent",
            EncodingSpec::GeneralEvolution(_) => "general_evolution",
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_STATE_DIM {
        Err(Error::MalformedInput(format!(
            "encoded state would have dimension {dim} > {MAX_STATE_DIM}"
        )))
    } else {
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .filter(|&d| d <= MAX_STATE_DIM)
        .ok_or_else(|| {
            Error::MalformedInput(format!(
                "encoded state would have dimension {base}^{exp} > {MAX_STATE_DIM}"
            ))
        })
}

/// Kronecker product of per-subsystem vectors, the LAST element of `factors`
/// being the most significant block (so factor `k` sits on digit `k`).
fn product_state(factors: &[CVector]) -> CVector {
    let mut iter = factors.iter().rev();
    let first = iter.next().expect("at least one factor").clone();
    iter.fold(first, |acc, f| acc.kronecker(f))
}

/// `1 - Σ_{k<cutoff} e^{-x²} x^{2k}/k!`, evaluated as the Poisson tail so that
/// small deficits are not lost to cancellation.
pub fn coherent_norm_deficit(x: f64, cutoff: usize) -> f64 {
    let mean = x * x;
    if mean == 0.0 {
        return if cutoff == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=cutoff).map(|k| (k as f64).ln()).sum();
    let mut term = (-mean + cutoff as f64 * mean.ln() - ln_fact).exp();
    let mut tail = 0.0;
    let mut k = cutoff;
    loop {
        tail += term;
        k += 1;
        term *= mean / k as f64;
        if term <= tail * 1e-17 || term == 0.0 {
            break;
        }
        if k > cutoff + 10_000 {
            break;
        }
    }
    tail.min(1.0)
}

/// Smallest Fock cutoff whose truncation deficit for `x` is within [`COHERENT_DEFICIT_TOL`].
pub fn min_coherent_cutoff(x: f64) -> usize {
    let mut cutoff = 2;
    while coherent_norm_deficit(x, cutoff) > COHERENT_DEFICIT_TOL {
        cutoff += 1;
    }
    cutoff
}

fn coherent_mode(x: f64, cutoff: usize) -> Result<CVector> {
    let deficit = coherent_norm_deficit(x, cutoff);
    if deficit > COHERENT_DEFICIT_TOL {
        return Err(Error::TruncationError {
            cutoff,
            value: x,
            deficit,
            tolerance: COHERENT_DEFICIT_TOL,
        });
    }
    let mut amps = Vec::with_capacity(cutoff);
    let mut a = (-x * x / 2.0).exp();
    amps.push(C64::new(a, 0.0));
    for k in 1..cutoff {
        a *= x / (k as f64).sqrt();
        amps.push(C64::new(a, 0.0));
    }
    Ok(CVector::from_vec(amps))
}

fn amplitude_vector(x: &DataPoint) -> Result<CVector> {
    let v = CVector::from_column_slice(x.values());
    let norm = v.norm();
    if (norm - 1.0).abs() > AMPLITUDE_NORM_TOL {
        return Err(Error::MalformedInput(format!(
            "amplitude-encoded input must have unit norm, got {norm}"
        )));
    }
    check_dim(v.len())?;
    Ok(v)
}

/// `|φ(x)⟩ = S(x)|0⟩` for a time-evolution encoding.
pub fn general_evolution_state(spec: &GeneralEvolution, x: &DataPoint) -> Result<StateVector> {
    if x.len() != spec.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.input_dim(),
            actual: x.len(),
        });
    }
    let xs = x.real_values()?;
    let ws = spec.interleavers();
    let mut psi = ws[0].entries().column(0).into_owned();
    for (xi, w) in xs.iter().zip(&ws[1..]) {
        psi = spec.apply_encoding_gate(&psi, *xi);
        psi = w.entries() * psi;
    }
    Ok(StateVector::from_vector_unchecked(psi))
}

/// Encodes `x` into a pure state.
pub fn encode(spec: &EncodingSpec, x: &DataPoint) -> Result<StateVector> {
    spec.validate()?;
    if x.is_empty() {
        return Err(Error::MalformedInput("empty input".into()));
    }
    match spec {
        EncodingSpec::Basis => {
            let bits = x.real_values()?;
            let dim = checked_pow(2, bits.len())?;
            let mut index = 0usize;
            for (k, &b) in bits.iter().enumerate() {
                if b == 1.0 {
                    index |= 1 << k;
                } else if b != 0.0 {
                    return Err(Error::MalformedInput(format!(
                        "basis encoding expects bits, feature {k} is {b}"
                    )));
                }
            }
            StateVector::basis(dim, index)
        }
        EncodingSpec::Amplitude => Ok(StateVector::from_vector_unchecked(amplitude_vector(x)?)),
        EncodingSpec::RepeatedAmplitude { r } => {
            let v = amplitude_vector(x)?;
            checked_pow(v.len(), *r)?;
            let copies = vec![v; *r];
            Ok(StateVector::from_vector_unchecked(product_state(&copies)))
        }
        EncodingSpec::Rotation { axis } => {
            let xs = x.real_values()?;
            checked_pow(2, xs.len())?;
            let ket0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
            let qubits: Vec<CVector> = xs
                .iter()
                .map(|&xk| axis.rotation(xk).entries() * &ket0)
                .collect();
            Ok(StateVector::from_vector_unchecked(product_state(&qubits)))
        }
        EncodingSpec::Coherent { cutoff } => {
            let xs = x.real_values()?;
            checked_pow(*cutoff, xs.len())?;
            let modes = xs
                .iter()
                .map(|&xk| coherent_mode(xk, *cutoff))
                .collect::<Result<Vec<_>>>()?;
            Ok(StateVector::from_vector_unchecked(product_state(&modes)))
        }
        EncodingSpec::GeneralEvolution(g) => general_evolution_state(g, x),
    }
}

/// `ρ(x) = |φ(x)⟩⟨φ(x)|`.
pub fn encode_density(spec: &EncodingSpec, x: &DataPoint) -> Result<DensityMatrix> {
    Ok(encode(spec, x)?.density())
}

/// `|φ(x)⟩ ⊗ |φ*(x)⟩`, a reordering of the entries of `ρ(x)` of dimension `D²`.
pub fn vectorize(spec: &EncodingSpec, x: &DataPoint) -> Result<StateVector> {
    let psi = encode(spec, x)?;
    check_dim(psi.dim() * psi.dim())?;
    Ok(psi.tensor(&psi.conj()))
}

/// Applies a unitary after the encoding, `W|φ(x)⟩`.
pub fn encode_then(spec: &EncodingSpec, x: &DataPoint, w: &Unitary) -> Result<StateVector> {
    apply_unitary(w, &encode(spec, x)?)
}

// ---- JSON form ---------------------------------------------------------------

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_dim: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    strategy: String,
    #[serde(default)]
    params: RawParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interleavers: Option<Vec<Vec<ComplexPair>>>,
}

fn missing(param: &str, strategy: &str) -> Error {
    Error::InvalidSpec(format!("strategy {strategy} requires params.{param}"))
}

impl TryFrom<RawSpec> for EncodingSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let p = raw.params;
        let s = raw.strategy.as_str();
        let spec = match s {
            "basis" => EncodingSpec::Basis,
            "amplitude" => EncodingSpec::Amplitude,
            "repeated_amplitude" => EncodingSpec::RepeatedAmplitude {
                r: p.r.ok_or_else(|| missing("r", s))?,
            },
            "rotation" => EncodingSpec::Rotation {
                axis: p.axis.ok_or_else(|| missing("axis", s))?,
            },
            "coherent" => EncodingSpec::Coherent {
                cutoff: p.cutoff.ok_or_else(|| missing("cutoff", s))?,
            },
            "general_evolution" => {
                let n_qubits = p.n_qubits.ok_or_else(|| missing("n_qubits", s))?;
                let generator = HermitianOperator::new(matrix_from_pairs(
                    raw.generator.as_deref().ok_or_else(|| missing("generator", s))?,
                )?)?;
                let interleavers = raw
                    .interleavers
                    .ok_or_else(|| missing("interleavers", s))?
                    .iter()
                    .map(|w| Unitary::new(matrix_from_pairs(w)?))
                    .collect::<Result<Vec<_>>>()?;
                let g = GeneralEvolution::new(n_qubits, generator, interleavers)?;
                if let Some(n) = p.input_dim {
                    if n != g.input_dim() {
                        return Err(Error::InvalidSpec(format!(
                            "input_dim {n} but {} interleavers given (expected N + 1)",
                            g.interleavers().len()
                        )));
                    }
                }
                EncodingSpec::GeneralEvolution(g)
            }
            other => {
                return Err(Error::InvalidSpec(format!("unknown strategy '{other}'")));
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&EncodingSpec> for RawSpec {
    fn from(spec: &EncodingSpec) -> Self {
        let mut raw = RawSpec {
            strategy: spec.name().to_string(),
            params: RawParams::default(),
            generator: None,
            interleavers: None,
        };
        match spec {
            EncodingSpec::Basis | EncodingSpec::Amplitude => {}
            EncodingSpec::RepeatedAmplitude { r } => raw.params.r = Some(*r),
            EncodingSpec::Rotation { axis } => raw.params.axis = Some(*axis),
            EncodingSpec::Coherent { cutoff } => raw.params.cutoff = Some(*cutoff),
            EncodingSpec::GeneralEvolution(g) => {
                raw.params.n_qubits = Some(g.n_qubits());
                raw.params.input_dim = Some(g.input_dim());
                raw.generator = Some(matrix_to_pairs(g.generator().entries()));
                raw.interleavers = Some(
                    g.interleavers()
                        .iter()
                        .map(|w| matrix_to_pairs(w.entries()))
                        .collect(),
                );
            }
        }
        raw
    }
}

impl Serialize for EncodingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EncodingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        EncodingSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner_product, max_abs_diff, CMatrix};
    use crate::test_support::{random_hermitian, random_unitary};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rx() -> EncodingSpec {
        EncodingSpec::rotation(Axis::X)
    }


    #[test]
    fn rotation_at_zero_is_ground_state() {
        let psi = encode(&rx(), &DataPoint::new(vec![0.0])).unwrap();
        assert_eq!(psi, StateVector::basis(2, 0).unwrap());
        let rho = encode_density(&rx(), &DataPoint::new(vec![0.0])).unwrap();
        assert_eq!(rho, StateVector::basis(2, 0).unwrap().density());
    }

    #[test]
    fn basis_encoding_is_least_significant_first() {
        let psi = encode(&EncodingSpec::Basis, &DataPoint::new(vec![1.0, 0.0])).unwrap();
        assert_eq!(psi, StateVector::basis(4, 1).unwrap());
        let psi = encode(&EncodingSpec::Basis, &DataPoint::new(vec![0.0, 1.0, 1.0])).unwrap();
        assert_eq!(psi, StateVector::basis(8, 6).unwrap());
        assert!(matches!(
            encode(&EncodingSpec::Basis, &DataPoint::new(vec![0.5])),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn coherent_amplitudes() {
        let psi = encode(&EncodingSpec::coherent(30).unwrap(), &DataPoint::new(vec![0.5])).unwrap();
        assert_eq!(psi.dim(), 30);
        let mut fact = 1.0;
        for (k, a) in psi.amplitudes().iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            let expected = (-0.125_f64).exp() * 0.5_f64.powi(k as i32) / fact.sqrt();
            assert_abs_diff_eq!(a.re, expected, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn coherent_truncation_error() {
        let spec = EncodingSpec::coherent(5).unwrap();
        assert!(matches!(
            encode(&spec, &DataPoint::new(vec![2.0])),
            Err(Error::TruncationError { .. })
        ));
        assert!(EncodingSpec::coherent(1).is_err());
    }

    #[test]
    fn coherent_deficit_matches_direct_sum() {
        for &x in &[0.3_f64, 1.0, 1.7, 2.5] {
            for cutoff in [2usize, 5, 10] {
                let mut partial = 0.0;
                let mut term = (-x * x).exp();
                for k in 0..cutoff {
                    if k > 0 {
                        term *= x * x / k as f64;
                    }
                    partial += term;
                }
                assert_abs_diff_eq!(coherent_norm_deficit(x, cutoff), 1.0 - partial, epsilon = 1e-14);
            }
            let c = min_coherent_cutoff(x);
            assert!(coherent_norm_deficit(x, c) <= COHERENT_DEFICIT_TOL);
            assert!(coherent_norm_deficit(x, c - 1) > COHERENT_DEFICIT_TOL || c == 2);
        }
    }

    #[test]
    fn rotation_density_matches_closed_form() {
        let x = 0.83_f64;
        let rho = encode_density(&rx(), &DataPoint::new(vec![x])).unwrap();
        let (s, c) = (x / 2.0).sin_cos();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c * c, 0.0),
                C64::new(0.0, c * s),
                C64::new(0.0, -c * s),
                C64::new(s * s, 0.0),
            ],
        );
        assert!(max_abs_diff(rho.entries(), &expected) < 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn amplitude_identity_map() {
        let x = DataPoint::new(vec![1.0, 0.0, 0.0, 0.0]);
        let rho = encode_density(&EncodingSpec::Amplitude, &x).unwrap();
        assert_eq!(rho, StateVector::basis(4, 0).unwrap().density());
        assert!(encode(&EncodingSpec::Amplitude, &DataPoint::new(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn vectorize_examples() {
        let x = 1.1_f64;
        let v = vectorize(&rx(), &DataPoint::new(vec![x])).unwrap();
        let (s, c) = (x / 2.0).sin_cos();
        let expected = [
            C64::new(c * c, 0.0),
            C64::new(0.0, c * s),
            C64::new(0.0, -c * s),
            C64::new(s * s, 0.0),
        ];
        for (a, e) in v.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!((a - e).norm(), 0.0, epsilon = 1e-15);
        }
        let v0 = vectorize(&rx(), &DataPoint::new(vec![0.0])).unwrap();
        assert_eq!(v0, StateVector::basis(4, 0).unwrap());
    }

    #[test]
    fn vectorize_reorders_density_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = EncodingSpec::rotation(Axis::Y);
        let x = DataPoint::new(vec![rng.random_range(0.0..6.0), rng.random_range(0.0..6.0)]);
        let key = |z: &C64| ((z.re * 1e12).round() as i64, (z.im * 1e12).round() as i64);
        let mut a: Vec<_> = vectorize(&spec, &x).unwrap().amplitudes().iter().map(key).collect();
        let mut b: Vec<_> = encode_density(&spec, &x).unwrap().entries().iter().map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn rotation_is_4pi_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let spec = EncodingSpec::rotation(axis);
            for _ in 0..20 {
                let xs: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
                let shifted: Vec<f64> = xs.iter().map(|x| x + 4.0 * PI).collect();
                let a = encode(&spec, &DataPoint::new(xs)).unwrap();
                let b = encode(&spec, &DataPoint::new(shifted)).unwrap();
                assert_abs_diff_eq!(a.fidelity(&b).unwrap(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn repeated_amplitude_is_tensor_power() {
        let x = DataPoint::complex(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let single = encode_density(&EncodingSpec::Amplitude, &x).unwrap();
        let triple = encode_density(&EncodingSpec::repeated_amplitude(3).unwrap(), &x).unwrap();
        let power = single.tensor(&single).tensor(&single);
        assert!(max_abs_diff(triple.entries(), power.entries()) <= 1e-12);
        assert!(EncodingSpec::repeated_amplitude(0).is_err());
    }

    #[test]
    fn general_evolution_matches_rx() {
        let g = GeneralEvolution::with_identity_interleavers(
            1,
            HermitianOperator::pauli_x().scaled(0.5),
            1,
        )
        .unwrap();
        for x in [-1.3, 0.0, 0.4, 2.9] {
            let a = general_evolution_state(&g, &DataPoint::new(vec![x])).unwrap();
            let b = encode(&rx(), &DataPoint::new(vec![x])).unwrap();
            assert!(max_abs_diff(
                &CMatrix::from_column_slice(2, 1, a.amplitudes()),
                &CMatrix::from_column_slice(2, 1, b.amplitudes())
            ) <= 1e-12);
        }
    }

    #[test]
    fn general_evolution_zero_input_collapses_to_interleavers() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ws: Vec<Unitary> = (0..3).map(|_| random_unitary(&mut rng, 4)).collect();
        let gen = HermitianOperator::pauli_z().scaled(0.5).on_qubit(0, 2).unwrap();
        let g = GeneralEvolution::new(2, gen, ws.clone()).unwrap();
        let psi = general_evolution_state(&g, &DataPoint::new(vec![0.0, 0.0])).unwrap();
        let mut expected = StateVector::basis(4, 0).unwrap();
        for w in &ws {
            expected = apply_unitary(w, &expected).unwrap();
        }
        assert_abs_diff_eq!(psi.fidelity(&expected).unwrap(), 1.0, epsilon = 1e-12);
        let psi = general_evolution_state(&g, &DataPoint::new(vec![0.7, -2.2])).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        assert!(general_evolution_state(&g, &DataPoint::new(vec![0.7])).is_err());
    }

    #[test]
    fn diagonalized_spec_encodes_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ws: Vec<Unitary> = (0..3).map(|_| random_unitary(&mut rng, 4)).collect();
        let gen = random_hermitian(&mut rng, 4);
        let g = GeneralEvolution::new(2, gen, ws).unwrap();
        let d = g.diagonalized().unwrap();
        let x = DataPoint::new(vec![0.3, 1.9]);
        let a = general_evolution_state(&g, &x).unwrap();
        let b = general_evolution_state(&d, &x).unwrap();
        assert_abs_diff_eq!(a.fidelity(&b).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation_errors() {
        let bad_gen = GeneralEvolution::new(1, HermitianOperator::identity(4), vec![Unitary::identity(2); 2]);
        assert!(bad_gen.is_err());
        let too_few = GeneralEvolution::new(1, HermitianOperator::identity(2), vec![Unitary::identity(2)]);
        assert!(too_few.is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ws: Vec<Unitary> = (0..2).map(|_| random_unitary(&mut rng, 2)).collect();
        let g = GeneralEvolution::new(1, HermitianOperator::pauli_y().scaled(0.5), ws).unwrap();
        let specs = vec![
            EncodingSpec::Basis,
            EncodingSpec::Amplitude,
            EncodingSpec::repeated_amplitude(2).unwrap(),
            EncodingSpec::rotation(Axis::Y),
            EncodingSpec::coherent(12).unwrap(),
            EncodingSpec::GeneralEvolution(g),
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: EncodingSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back, "{json}");
        }
        let parsed: EncodingSpec =
            serde_json::from_str(r#"{"strategy": "rotation", "params": {"axis": "X"}}"#).unwrap();
        assert_eq!(parsed, rx());
        assert!(serde_json::from_str::<EncodingSpec>(r#"{"strategy": "coherent", "params": {"cutoff": 1}}"#).is_err());
        assert!(serde_json::from_str::<EncodingSpec>(r#"{"strategy": "nope"}"#).is_err());
        let complex: DataPoint = serde_json::from_str("[0.5, [0.1, -0.2]]").unwrap();
        assert_eq!(complex.values()[1], C64::new(0.1, -0.2));
        assert_eq!(serde_json::to_string(&complex).unwrap(), "[0.5,[0.1,-0.2]]");
    }

    #[test]
    fn vectorized_inner_product_equals_hs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let spec = EncodingSpec::rotation(Axis::X);
        for _ in 0..20 {
            let x = DataPoint::new(vec![rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)]);
            let y = DataPoint::new(vec![rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)]);
            let vi = vectorize(&spec, &x).unwrap().overlap(&vectorize(&spec, &y).unwrap()).unwrap();
            let hs = hs_inner_product(
                &encode_density(&spec, &x).unwrap(),
                &encode_density(&spec, &y).unwrap(),
            )
            .unwrap();
            assert_abs_diff_eq!(vi.re, hs, epsilon = 1e-12);
            assert_abs_diff_eq!(vi.im, 0.0, epsilon = 1e-12);
        }
    }
}
