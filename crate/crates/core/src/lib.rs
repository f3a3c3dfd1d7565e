//! Supervised quantum models analysed as kernel methods, on a dense
//! statevector simulator.
//!
//! * [`linalg`]: states, operators, Hermitian eigendecomposition.
//! * [`encoding`]: data-encoding feature maps `x ↦ ρ(x)`.
//! * [`kernel`]: quantum kernels, Gram matrices and shot-sampled estimates.
//! * [`fourier`]: Fourier representation of time-evolution encoded kernels.
//! * [`training`]: kernel ridge regression and the bias-free SVM dual.
//! * [`variational`]: parameterised measurements trained by parameter-shift descent.

pub mod dataset;
pub mod encoding;
pub mod error;
pub mod fourier;
pub mod kernel;
pub mod linalg;
pub mod training;
pub mod variational;
#[cfg(test)]
mod test_support;

pub use encoding::{
    encode, encode_density, vectorize, Axis, DataPoint, EncodingSpec, GeneralEvolution,
};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use fourier::{
    coefficients, evaluate_series, frequency_set, integer_spectrum_check, is_translation_invariant,
    FrequencySpectrum,
};
pub use kernel::{
    closed_form_kernel, gram, kernel, min_eigenvalue, sample_kernel, GramMatrix, ShotEstimate,
};
pub use training::{
    fit_krr, fit_svm, predict, regularized_risk, regularizer_norm, KernelModel, LossSpec,
    SvmSolution,
};
pub use variational::{
    analytic_reference, compare, evaluate, parameter_shift_gradient, train, Ansatz,
    ComparisonReport, Gate, TrainingParams, VariationalModel,
};
pub use linalg::{
    apply_unitary, expectation, hermitian_eigendecomposition, hs_inner_product, tensor_product,
    DensityMatrix, Eigendecomposition, HermitianOperator, StateVector, TensorProduct, Unitary, C64,
};
