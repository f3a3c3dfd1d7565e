//! Quantum kernels `κ(x, x') = |⟨φ(x')|φ(x)⟩|²`, their closed forms,
//! Gram matrices and shot-sampled estimates.

use nalgebra::DMatrix;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::format_shortest;
use crate::encoding::{encode, Axis, DataPoint, EncodingSpec};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, HermitianOperator, StateVector};

/// Smallest eigenvalue a Gram matrix may have and still count as PSD.
pub const PSD_TOLERANCE: f64 = -1e-9;

fn overlap_sq(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(b.overlap(a)?.norm_sqr())
}

/// `κ(x, x2)` by simulation.
pub fn kernel(spec: &EncodingSpec, x: &DataPoint, x2: &DataPoint) -> Result<f64> {
    overlap_sq(&encode(spec, x)?, &encode(spec, x2)?)
}

/// `κ(x^m, x)` for every support input `x^m`, encoding `x` once.
pub fn kernel_vector(spec: &EncodingSpec, supports: &[DataPoint], x: &DataPoint) -> Result<Vec<f64>> {
    let phi = encode(spec, x)?;
    supports
        .iter()
        .map(|s| overlap_sq(&encode(spec, s)?, &phi))
        .collect()
}

fn same_len(x: &DataPoint, x2: &DataPoint) -> Result<()> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: x2.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::MalformedInput("empty input".into()));
    }
    Ok(())
}

fn check_unit(x: &DataPoint) -> Result<()> {
    let norm = x.values().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::MalformedInput(format!(
            "amplitude-encoded input must have unit norm, got {norm}"
        )));
    }
    Ok(())
}

fn check_bits(x: &[f64]) -> Result<()> {
    match x.iter().position(|&b| b != 0.0 && b != 1.0) {
        None => Ok(()),
        Some(k) => Err(Error::MalformedInput(format!(
            "basis encoding expects bits, feature {k} is {}",
            x[k]
        ))),
    }
}

/// `∏_k cos²((x_k − x'_k)/2)`, the rotation kernel for the gate `e^{-i(x/2)σ}`.
pub fn rotation_kernel(x: &[f64], x2: &[f64]) -> f64 {
    x.iter()
        .zip(x2)
        .map(|(a, b)| ((a - b) / 2.0).cos().powi(2))
        .product()
}

/// `∏_k cos²(x_k − x'_k)`, the rotation kernel for the gate `e^{-ixσ}`.
pub fn rotation_kernel_full_angle(x: &[f64], x2: &[f64]) -> f64 {
    x.iter().zip(x2).map(|(a, b)| (a - b).cos().powi(2)).product()
}

/// Analytic kernel for every strategy except `GeneralEvolution`.
///
/// The rotation entry follows the `e^{-i(x/2)σ}` convention used by [`encode`].
/// `R_Z` only adds a phase to `|0⟩`, so its kernel is identically 1.
pub fn closed_form_kernel(spec: &EncodingSpec, x: &DataPoint, x2: &DataPoint) -> Result<f64> {
    spec.validate()?;
    same_len(x, x2)?;
    match spec {
        EncodingSpec::Basis => {
            let (a, b) = (x.real_values()?, x2.real_values()?);
            check_bits(&a)?;
            check_bits(&b)?;
            Ok(if a == b { 1.0 } else { 0.0 })
        }
        EncodingSpec::Amplitude | EncodingSpec::RepeatedAmplitude { .. } => {
            check_unit(x)?;
            check_unit(x2)?;
            let inner: num_complex::Complex64 = x
                .values()
                .iter()
                .zip(x2.values())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let k = inner.norm_sqr();
            Ok(match spec {
                EncodingSpec::RepeatedAmplitude { r } => k.powi(*r as i32),
                _ => k,
            })
        }
        EncodingSpec::Rotation { axis } => {
            let (a, b) = (x.real_values()?, x2.real_values()?);
            Ok(match axis {
                Axis::Z => 1.0,
                Axis::X | Axis::Y => rotation_kernel(&a, &b),
            })
        }
        EncodingSpec::Coherent { .. } => {
            let (a, b) = (x.real_values()?, x2.real_values()?);
            let d2: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum();
            Ok((-d2).exp())
        }
        EncodingSpec::GeneralEvolution(_) => Err(Error::UnsupportedStrategy {
            strategy: "general_evolution",
        }),
    }
}

/// `M × M` matrix of pairwise kernel values together with the inputs it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGram", into = "RawGram")]
pub struct GramMatrix {
    values: DMatrix<f64>,
    inputs: Vec<DataPoint>,
}

#[derive(Serialize, Deserialize)]
struct RawGram {
    inputs: Vec<DataPoint>,
    values: Vec<Vec<f64>>,
}

impl From<GramMatrix> for RawGram {
    fn from(g: GramMatrix) -> Self {
        let m = g.len();
        RawGram {
            values: (0..m).map(|i| (0..m).map(|j| g.values[(i, j)]).collect()).collect(),
            inputs: g.inputs,
        }
    }
}

impl TryFrom<RawGram> for GramMatrix {
    type Error = Error;

    fn try_from(raw: RawGram) -> Result<Self> {
        let m = raw.values.len();
        if raw.values.iter().any(|row| row.len() != m) {
            return Err(Error::MalformedInput("Gram matrix is not square".into()));
        }
        let values = DMatrix::from_fn(m, m, |i, j| raw.values[i][j]);
        GramMatrix::new(values, raw.inputs)
    }
}

impl GramMatrix {
    /// Checks shape and symmetry (1e-12).
    pub fn new(values: DMatrix<f64>, inputs: Vec<DataPoint>) -> Result<Self> {
        let m = values.nrows();
        if values.ncols() != m || inputs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: inputs.len(),
            });
        }
        let asym = (0..m)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| (values[(i, j)] - values[(j, i)]).abs())
            .fold(0.0, f64::max);
        if asym > 1e-12 {
            return Err(Error::MalformedInput(format!(
                "Gram matrix is not symmetric (max deviation {asym:.3e})"
            )));
        }
        Ok(Self { values, inputs })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn inputs(&self) -> &[DataPoint] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self)
    }

    /// Row-major CSV with a header of input identifiers `id,x^1,…,x^M`.
    pub fn to_csv(&self) -> String {
        let m = self.len();
        let mut out = String::from("id");
        for i in 1..=m {
            out.push_str(&format!(",x^{i}"));
        }
        out.push('\n');
        for i in 0..m {
            out.push_str(&format!("x^{}", i + 1));
            for j in 0..m {
                out.push(',');
                out.push_str(&format_shortest(self.values[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

/// `K[m][m'] = κ(x^m, x^{m'})`. Each point is encoded once, upper-triangle
/// entries are evaluated independently in parallel and mirrored.
pub fn gram(spec: &EncodingSpec, data: &[DataPoint]) -> Result<GramMatrix> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot build a Gram matrix of an empty dataset".into()));
    }
    let states = data
        .par_iter()
        .map(|x| encode(spec, x))
        .collect::<Result<Vec<_>>>()?;
    let m = data.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| overlap_sq(&states[i], &states[j]))
        .collect::<Result<Vec<_>>>()?;
    let mut values = DMatrix::zeros(m, m);
    for (&(i, j), k) in pairs.iter().zip(entries) {
        values[(i, j)] = k;
        values[(j, i)] = k;
    }
    Ok(GramMatrix {
        values,
        inputs: data.to_vec(),
    })
}

/// `K[i][j] = κ(rows_i, cols_j)`, encoding every input once.
pub fn cross_gram(spec: &EncodingSpec, rows: &[DataPoint], cols: &[DataPoint]) -> Result<DMatrix<f64>> {
    let encode_all = |xs: &[DataPoint]| -> Result<Vec<StateVector>> {
        xs.par_iter().map(|x| encode(spec, x)).collect()
    };
    let (a, b) = (encode_all(rows)?, encode_all(cols)?);
    let entries = (0..a.len() * b.len())
        .into_par_iter()
        .map(|k| overlap_sq(&a[k / b.len()], &b[k % b.len()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_row_slice(a.len(), b.len(), &entries))
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue_of(m: &DMatrix<f64>) -> Result<f64> {
    let h = HermitianOperator::from_real_symmetric(m)?;
    Ok(hermitian_eigendecomposition(&h)?.values[0])
}

pub fn min_eigenvalue(k: &GramMatrix) -> Result<f64> {
    min_eigenvalue_of(&k.values)
}

/// Success frequency of `shots` overlap-test repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub estimate: f64,
    pub successes: u64,
    pub shots: u64,
    pub seed: u64,
}

/// Bernoulli(p) sampling with a seeded ChaCha8 stream; `p` is clamped to `[0, 1]`.
pub fn sample_probability(p: f64, shots: u64, seed: u64) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("probability {p} is not finite")));
    }
    let dist = Bernoulli::new(p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..shots).filter(|_| dist.sample(&mut rng)).count() as u64;
    Ok(ShotEstimate {
        estimate: successes as f64 / shots as f64,
        successes,
        shots,
        seed,
    })
}

/// Shot-based estimate of `κ(x, x2)`, modelled as Bernoulli draws at the exact
/// overlap probability.
pub fn sample_kernel(
    spec: &EncodingSpec,
    x: &DataPoint,
    x2: &DataPoint,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    sample_probability(kernel(spec, x, x2)?, shots, seed)
}
