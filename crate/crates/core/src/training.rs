//! Kernel-based training: regularised empirical risk minimisation over models
//! `f(x) = Σ_m α_m κ(x^m, x)`, by kernel ridge regression or the bias-free SVM dual.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::encoding::{DataPoint, EncodingSpec};
use crate::error::{Error, Result};
use crate::kernel::{cross_gram, gram};
use crate::linalg::{hermitian_eigendecomposition, HermitianOperator};

/// Relative eigenvalue cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;
pub const SVM_GAP_TOL: f64 = 1e-8;
pub const SVM_MAX_PASSES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossSpec {
    /// `(f − y)²`
    SquaredError,
    /// `max(0, 1 − f·y)`
    Hinge,
}

impl LossSpec {
    pub fn loss(self, f: f64, y: f64) -> f64 {
        match self {
            LossSpec::SquaredError => (f - y).powi(2),
            LossSpec::Hinge => (1.0 - f * y).max(0.0),
        }
    }

    /// `(1/M) Σ_m L(f_m, y_m)`.
    pub fn empirical_risk(self, predictions: &[f64], labels: &[f64]) -> f64 {
        let total: f64 = predictions
            .iter()
            .zip(labels)
            .map(|(&f, &y)| self.loss(f, y))
            .sum();
        total / labels.len() as f64
    }
}

/// `f(x) = Σ_m α_m κ(x^m, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    spec: EncodingSpec,
    support_inputs: Vec<DataPoint>,
    alphas: Vec<f64>,
    lambda: f64,
}

impl KernelModel {
    pub fn new(spec: EncodingSpec, support_inputs: Vec<DataPoint>, alphas: Vec<f64>, lambda: f64) -> Result<Self> {
        if support_inputs.len() != alphas.len() {
            return Err(Error::DimensionMismatch {
                expected: support_inputs.len(),
                actual: alphas.len(),
            });
        }
        check_lambda(lambda)?;
        Ok(Self {
            spec,
            support_inputs,
            alphas,
            lambda,
        })
    }

    pub fn spec(&self) -> &EncodingSpec {
        &self.spec
    }

    pub fn support_inputs(&self) -> &[DataPoint] {
        &self.support_inputs
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Regularisation strength used at fit time.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same supports and spec, different coefficients.
    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        Self::new(self.spec.clone(), self.support_inputs.clone(), alphas, self.lambda)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

pub fn predict(model: &KernelModel, x: &DataPoint) -> Result<f64> {
    Ok(predict_many(model, std::slice::from_ref(x))?[0])
}

/// Predictions for several inputs, encoding every support once.
pub fn predict_many(model: &KernelModel, xs: &[DataPoint]) -> Result<Vec<f64>> {
    let k = cross_gram(&model.spec, xs, &model.support_inputs)?;
    let a = DVector::from_column_slice(&model.alphas);
    Ok((k * a).iter().copied().collect())
}

/// `K⁺ y` from the eigendecomposition of the symmetric `K`, dropping
/// eigenvalues below `PINV_CUTOFF · λ_max`.
pub fn pinv_solve(k: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if k.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: k.nrows(),
            actual: y.len(),
        });
    }
    let eig = hermitian_eigendecomposition(&HermitianOperator::from_real_symmetric(k)?)?;
    let max = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let v = eig.vectors.entries();
    let yc = y.map(|r| crate::linalg::C64::new(r, 0.0));
    let mut out = DVector::zeros(y.len());
    if max == 0.0 {
        return Ok(out);
    }
    for (j, &mu) in eig.values.iter().enumerate() {
        if mu.abs() <= PINV_CUTOFF * max {
            continue;
        }
        let h = v.column(j);
        let coeff = h.dotc(&yc) / mu;
        for i in 0..y.len() {
            out[i] += (h[i] * coeff).re;
        }
    }
    Ok(out)
}

/// Solves `(K + λ M I) α = y`; at `λ = 0` uses `α = K⁺ y`.
pub fn krr_alphas(k: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<DVector<f64>> {
    check_lambda(lambda)?;
    let m = y.len();
    let yv = DVector::from_column_slice(y);
    if lambda == 0.0 {
        return pinv_solve(k, &yv);
    }
    let a = k + DMatrix::identity(m, m) * (lambda * m as f64);
    match a.clone().cholesky() {
        Some(ch) => Ok(ch.solve(&yv)),
        None => a
            .lu()
            .solve(&yv)
            .ok_or_else(|| Error::InvalidArgument("regularised Gram matrix is singular".into())),
    }
}

pub fn fit_krr(spec: &EncodingSpec, data: &Dataset, lambda: f64) -> Result<KernelModel> {
    check_lambda(lambda)?;
    let k = gram(spec, data.inputs())?;
    let alphas = krr_alphas(k.values(), data.labels(), lambda)?;
    KernelModel::new(spec.clone(), data.inputs().to_vec(), alphas.iter().copied().collect(), lambda)
}

/// Result of the box-constrained dual
/// `max_β Σβ_m − ½ βᵀQβ`, `0 ≤ β ≤ C`, `Q = (y yᵀ) ∘ K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmSolution {
    pub beta: Vec<f64>,
    pub c_box: f64,
    /// Primal-dual gap at termination.
    pub gap: f64,
    pub passes: usize,
    /// Dual objective after each coordinate pass.
    pub dual_objectives: Vec<f64>,
    /// `y_m f(x^m)` at the solution.
    pub margins: Vec<f64>,
}

impl SvmSolution {
    /// Largest violation of the KKT conditions:
    /// `β = 0 ⇒ y f ≥ 1`, `0 < β < C ⇒ y f = 1`, `β = C ⇒ y f ≤ 1`.
    pub fn kkt_violation(&self) -> f64 {
        self.beta
            .iter()
            .zip(&self.margins)
            .map(|(&b, &mg)| {
                if b <= 0.0 {
                    (1.0 - mg).max(0.0)
                } else if b >= self.c_box {
                    (mg - 1.0).max(0.0)
                } else {
                    (mg - 1.0).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

fn dual_objective(beta: &[f64], g: &[f64]) -> f64 {
    // Σβ − ½βᵀQβ with Qβ = 1 − g
    beta.iter().zip(g).map(|(b, gm)| b - 0.5 * b * (1.0 - gm)).sum()
}

fn duality_gap(beta: &[f64], g: &[f64], c_box: f64) -> f64 {
    beta.iter()
        .zip(g)
        .map(|(b, gm)| c_box * gm.max(0.0) - b * gm)
        .sum()
}

fn gradient(q: &DMatrix<f64>, beta: &[f64]) -> Vec<f64> {
    let qb = q * DVector::from_column_slice(beta);
    qb.iter().map(|v| 1.0 - v).collect()
}

/// Cyclic coordinate ascent with exact clipped 1-D maximisation, stopped once
/// the duality gap is at most `gap_tol`.
pub fn solve_svm_dual(
    k: &DMatrix<f64>,
    y: &[f64],
    c_box: f64,
    gap_tol: f64,
    max_passes: usize,
) -> Result<SvmSolution> {
    let m = y.len();
    if k.nrows() != m || k.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: k.nrows(),
        });
    }
    if !(c_box > 0.0 && c_box.is_finite()) {
        return Err(Error::InvalidArgument(format!("c_box must be positive, got {c_box}")));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument(format!("SVM labels must be -1 or +1, got {bad}")));
    }
    let q = DMatrix::from_fn(m, m, |i, j| y[i] * y[j] * k[(i, j)]);
    let mut beta = vec![0.0; m];
    let mut g = vec![1.0; m];
    let mut dual_objectives = Vec::new();
    let mut gap = duality_gap(&beta, &g, c_box);
    let mut passes = 0;
    while gap > gap_tol {
        if passes == max_passes {
            return Err(Error::NotConverged { passes, gap });
        }
        for j in 0..m {
            let qjj = q[(j, j)];
            let target = if qjj > 0.0 {
                beta[j] + g[j] / qjj
            } else if g[j] > 0.0 {
                c_box
            } else {
                0.0
            };
            let new = target.clamp(0.0, c_box);
            let delta = new - beta[j];
            if delta != 0.0 {
                beta[j] = new;
                for (i, gi) in g.iter_mut().enumerate() {
                    *gi -= delta * q[(i, j)];
                }
            }
        }
        passes += 1;
        g = gradient(&q, &beta);
        dual_objectives.push(dual_objective(&beta, &g));
        gap = duality_gap(&beta, &g, c_box);
    }
    let margins = g.iter().map(|gm| 1.0 - gm).collect();
    Ok(SvmSolution {
        beta,
        c_box,
        gap,
        passes,
        dual_objectives,
        margins,
    })
}

/// Fits the bias-free SVM; the returned model's `lambda` is the equivalent
/// regularisation strength `1/(2 C M)`.
pub fn fit_svm(spec: &EncodingSpec, data: &Dataset, c_box: f64) -> Result<(KernelModel, SvmSolution)> {
    data.check_binary_labels()?;
    let k = gram(spec, data.inputs())?;
    let sol = solve_svm_dual(k.values(), data.labels(), c_box, SVM_GAP_TOL, SVM_MAX_PASSES)?;
    let alphas = sol.beta.iter().zip(data.labels()).map(|(b, y)| b * y).collect();
    let lambda = 1.0 / (2.0 * c_box * data.len() as f64);
    Ok((KernelModel::new(spec.clone(), data.inputs().to_vec(), alphas, lambda)?, sol))
}

/// `αᵀKα` over the support inputs.
pub fn regularizer_norm(model: &KernelModel) -> Result<f64> {
    if model.alphas.is_empty() {
        return Ok(0.0);
    }
    let k = gram(&model.spec, &model.support_inputs)?;
    let a = DVector::from_column_slice(&model.alphas);
    Ok(a.dot(&(k.values() * &a)))
}

/// `λ·αᵀKα + (1/M) Σ_m L(f(x^m), y^m)`.
pub fn regularized_risk(model: &KernelModel, data: &Dataset, loss: LossSpec, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let preds = predict_many(model, data.inputs())?;
    let norm = if lambda == 0.0 { 0.0 } else { regularizer_norm(model)? };
    Ok(lambda * norm + loss.empirical_risk(&preds, data.labels()))
}

/// The objective `J(α) = (1/M) Σ L((Kα)_m, y_m) + λ αᵀKα` for models supported
/// on the training inputs, given their Gram matrix.
pub fn span_objective(k: &DMatrix<f64>, y: &[f64], alpha: &[f64], loss: LossSpec, lambda: f64) -> f64 {
    let a = DVector::from_column_slice(alpha);
    let f = k * &a;
    lambda * a.dot(&f) + loss.empirical_risk(f.as_slice(), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Axis;
    use crate::kernel::kernel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rx() -> EncodingSpec {
        EncodingSpec::rotation(Axis::X)
    }

    fn p(v: f64) -> DataPoint {
        DataPoint::new(vec![v])
    }

    fn two_point() -> Dataset {
        Dataset::from_rows(vec![vec![0.0], vec![PI]], vec![1.0, -1.0]).unwrap()
    }

    fn random_dataset(rng: &mut ChaCha8Rng, m: usize, n: usize, binary: bool) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-PI..PI)).collect()).collect();
        let labels = rows
            .iter()
            .map(|r| {
                if binary {
                    if r[0].sin() >= 0.0 { 1.0 } else { -1.0 }
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect();
        Dataset::from_rows(rows, labels).unwrap()
    }

    #[test]
    fn predict_examples() {
        let zero = KernelModel::new(rx(), vec![p(0.0), p(1.0)], vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(predict(&zero, &p(0.4)).unwrap(), 0.0);
        let single = KernelModel::new(rx(), vec![p(0.7)], vec![1.0], 0.0).unwrap();
        assert_abs_diff_eq!(predict(&single, &p(0.7)).unwrap(), 1.0, epsilon = 1e-12);
        let cos = KernelModel::new(rx(), vec![p(0.0), p(PI)], vec![1.0, -1.0], 0.0).unwrap();
        for x in [-2.0, 0.3, 1.9] {
            assert_abs_diff_eq!(predict(&cos, &p(x)).unwrap(), f64::cos(x), epsilon = 1e-12);
        }
        assert!(KernelModel::new(rx(), vec![p(0.0)], vec![], 0.0).is_err());
        assert!(KernelModel::new(rx(), vec![], vec![], -1.0).is_err());
    }

    #[test]
    fn krr_two_point() {
        let model = fit_krr(&rx(), &two_point(), 0.0).unwrap();
        assert_abs_diff_eq!(model.alphas()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.alphas()[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(predict(&model, &p(1.0)).unwrap(), 1f64.cos(), epsilon = 1e-12);
        let zero_y = Dataset::from_rows(vec![vec![0.0], vec![1.0]], vec![0.0, 0.0]).unwrap();
        assert!(fit_krr(&rx(), &zero_y, 0.0).unwrap().alphas().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn krr_scaling_of_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_dataset(&mut rng, 6, 2, false);
        let lambda = 0.05;
        let model = fit_krr(&rx(), &d, lambda).unwrap();
        let k = gram(&rx(), d.inputs()).unwrap();
        let a = DVector::from_column_slice(model.alphas());
        let lhs = (k.values() + DMatrix::identity(6, 6) * (lambda * 6.0)) * a;
        for (l, y) in lhs.iter().zip(d.labels()) {
            assert_abs_diff_eq!(*l, *y, epsilon = 1e-10);
        }
    }

    #[test]
    fn krr_duplicate_inputs_use_pseudo_inverse() {
        let d = Dataset::from_rows(vec![vec![0.0], vec![0.0], vec![1.5], vec![-2.0]], vec![0.4, 0.4, -0.3, 0.9])
            .unwrap();
        let model = fit_krr(&rx(), &d, 0.0).unwrap();
        assert!(model.alphas().iter().all(|a| a.is_finite()));
        for (x, y) in d.inputs().iter().zip(d.labels()) {
            assert_abs_diff_eq!(predict(&model, x).unwrap(), *y, epsilon = 1e-8);
        }
    }

    #[test]
    fn krr_interpolates_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = random_dataset(&mut rng, 8, 3, false);
        let model = fit_krr(&rx(), &d, 0.0).unwrap();
        let preds = predict_many(&model, d.inputs()).unwrap();
        for (f, y) in preds.iter().zip(d.labels()) {
            assert!((f - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn krr_beats_zero_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_dataset(&mut rng, 10, 2, false);
        let model = fit_krr(&rx(), &d, 0.1).unwrap();
        let zero = model.with_alphas(vec![0.0; 10]).unwrap();
        let r = regularized_risk(&model, &d, LossSpec::SquaredError, 0.1).unwrap();
        let r0 = regularized_risk(&zero, &d, LossSpec::SquaredError, 0.1).unwrap();
        assert!(r <= r0);
    }

    #[test]
    fn representer_optimality_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let d = random_dataset(&mut rng, 12, 2, false);
        let lambda = 0.02;
        let model = fit_krr(&rx(), &d, lambda).unwrap();
        let k = gram(&rx(), d.inputs()).unwrap();
        let j0 = span_objective(k.values(), d.labels(), model.alphas(), LossSpec::SquaredError, lambda);
        for _ in 0..200 {
            let eps = 10f64.powf(rng.random_range(-6.0..0.0));
            let a: Vec<f64> = model.alphas().iter().map(|a| a + eps * rng.random_range(-1.0..1.0)).collect();
            let j = span_objective(k.values(), d.labels(), &a, LossSpec::SquaredError, lambda);
            assert!(j0 <= j + 1e-10);
        }
    }

    #[test]
    fn svm_two_point() {
        let (model, sol) = fit_svm(&rx(), &two_point(), 10.0).unwrap();
        assert_abs_diff_eq!(sol.beta[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.beta[1], 1.0, epsilon = 1e-6);
        for x in [-2.5, 0.0, 1.0, PI] {
            assert_abs_diff_eq!(predict(&model, &p(x)).unwrap(), f64::cos(x), epsilon = 1e-6);
        }
        assert_abs_diff_eq!(model.lambda(), 1.0 / 40.0, epsilon = 1e-15);
    }

    #[test]
    fn svm_single_point() {
        let d = Dataset::from_rows(vec![vec![0.3]], vec![1.0]).unwrap();
        let (model, sol) = fit_svm(&rx(), &d, 10.0).unwrap();
        assert_abs_diff_eq!(sol.beta[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(predict(&model, &p(0.3)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn svm_kkt_and_monotone_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let d = random_dataset(&mut rng, 20, 2, true);
        let (_, sol) = fit_svm(&rx(), &d, 10.0).unwrap();
        assert!(sol.gap <= SVM_GAP_TOL);
        assert!(sol.kkt_violation() <= 1e-6, "{}", sol.kkt_violation());
        for w in sol.dual_objectives.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn svm_rejects_bad_labels_and_reports_non_convergence() {
        let d = Dataset::from_rows(vec![vec![0.0]], vec![0.5]).unwrap();
        assert!(fit_svm(&rx(), &d, 1.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = random_dataset(&mut rng, 30, 2, true);
        let k = gram(&rx(), d.inputs()).unwrap();
        let err = solve_svm_dual(k.values(), d.labels(), 10.0, 0.0, 1).unwrap_err();
        assert!(matches!(err, Error::NotConverged { passes: 1, .. }));
    }

    #[test]
    fn regularizer_examples() {
        let zero = KernelModel::new(rx(), vec![p(0.0)], vec![0.0], 0.0).unwrap();
        assert_eq!(regularizer_norm(&zero).unwrap(), 0.0);
        let single = KernelModel::new(rx(), vec![p(0.4)], vec![-3.0], 0.0).unwrap();
        assert_abs_diff_eq!(regularizer_norm(&single).unwrap(), 9.0, epsilon = 1e-12);
        let cos = KernelModel::new(rx(), vec![p(0.0), p(PI)], vec![1.0, -1.0], 0.0).unwrap();
        assert_abs_diff_eq!(regularizer_norm(&cos).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn risk_examples() {
        let d = two_point();
        let cos = KernelModel::new(rx(), vec![p(0.0), p(PI)], vec![1.0, -1.0], 0.0).unwrap();
        assert_abs_diff_eq!(regularized_risk(&cos, &d, LossSpec::SquaredError, 0.0).unwrap(), 0.0, epsilon = 1e-20);
        let zero = cos.with_alphas(vec![0.0, 0.0]).unwrap();
        assert_eq!(regularized_risk(&zero, &d, LossSpec::Hinge, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn predict_matches_kernel_sum() {
        let model = KernelModel::new(rx(), vec![p(0.1), p(2.0), p(-1.0)], vec![0.5, -0.2, 1.3], 0.0).unwrap();
        let x = p(0.77);
        let direct: f64 = model
            .support_inputs()
            .iter()
            .zip(model.alphas())
            .map(|(s, a)| a * kernel(&rx(), s, &x).unwrap())
            .sum();
        assert_abs_diff_eq!(predict(&model, &x).unwrap(), direct, epsilon = 1e-14);
    }

    #[test]
    fn model_json_round_trip() {
        let model = fit_krr(&rx(), &two_point(), 0.1).unwrap();
        let back: KernelModel = serde_json::from_str(&serde_json::to_string(&model).unwrap()).unwrap();
        assert_eq!(model, back);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn objective_is_convex(seed in 0u64..1000, theta in 0.01..0.99f64, lambda in 0.0..0.5f64, hinge in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dataset(&mut rng, 6, 2, true);
            let k = gram(&rx(), d.inputs()).unwrap();
            let loss = if hinge { LossSpec::Hinge } else { LossSpec::SquaredError };
            let a1: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a2: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mix: Vec<f64> = a1.iter().zip(&a2).map(|(u, v)| theta * u + (1.0 - theta) * v).collect();
            let j = |a: &[f64]| span_objective(k.values(), d.labels(), a, loss, lambda);
            prop_assert!(j(&mix) <= theta * j(&a1) + (1.0 - theta) * j(&a2) + 1e-10);
        }

        #[test]
        fn regularizer_is_nonnegative(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dataset(&mut rng, 8, 2, false);
            let a: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let model = KernelModel::new(rx(), d.inputs().to_vec(), a, 0.0).unwrap();
            prop_assert!(regularizer_norm(&model).unwrap() >= -1e-9);
        }
    }
}
