//! Variational quantum models `f(x) = tr{ρ(x) W†(θ) O W(θ)}`, parameter-shift
//! gradients, gradient-descent training and the comparison with kernel training.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::encoding::{encode, Axis, DataPoint, EncodingSpec};
use crate::error::{Error, Result};
use crate::kernel::gram;
use crate::linalg::{
    hermitian_eigendecomposition, state_expectation, CVector, HermitianOperator, StateVector, Unitary,
};
use crate::training::{fit_krr, fit_svm, pinv_solve, regularized_risk, LossSpec};

const SHIFT_EIGENVALUE_TOL: f64 = 1e-10;

/// One step of a circuit `W(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    /// `R_axis(θ_param)` on `qubit`.
    Rotation { axis: Axis, qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
    /// Parameter-free unitary on the whole register.
    Fixed { unitary: Unitary },
    /// `e^{-i θ_param G}` on the whole register.
    Evolution { generator: HermitianOperator, param: usize },
}

impl Gate {
    pub fn param(&self) -> Option<usize> {
        match self {
            Gate::Rotation { param, .. } | Gate::Evolution { param, .. } => Some(*param),
            Gate::Cnot { .. } | Gate::Fixed { .. } => None,
        }
    }

    fn unitary(&self, angle: f64, n_qubits: usize) -> Result<Unitary> {
        match self {
            Gate::Rotation { axis, qubit, .. } => axis.rotation(angle).on_qubit(*qubit, n_qubits),
            Gate::Cnot { control, target } => Unitary::cnot(*control, *target, n_qubits),
            Gate::Fixed { unitary } => Ok(unitary.clone()),
            Gate::Evolution { generator, .. } => Unitary::evolution(generator, angle),
        }
    }
}

/// Ordered gate list; the first gate acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnsatz")]
pub struct Ansatz {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct RawAnsatz {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawAnsatz> for Ansatz {
    type Error = Error;

    fn try_from(raw: RawAnsatz) -> Result<Self> {
        Ansatz::new(raw.n_qubits, raw.n_params, raw.gates)
    }
}

impl Ansatz {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 12 {
            return Err(Error::InvalidArgument(format!("ansatz on {n_qubits} qubits")));
        }
        let dim = 1usize << n_qubits;
        for (i, g) in gates.iter().enumerate() {
            let bad = |m: String| Error::InvalidArgument(format!("gate {i}: {m}"));
            match g {
                Gate::Rotation { qubit, .. } if *qubit >= n_qubits => {
                    return Err(bad(format!("qubit {qubit} out of range")))
                }
                Gate::Cnot { control, target }
                    if *control >= n_qubits || *target >= n_qubits || control == target =>
                {
                    return Err(bad(format!("invalid CNOT {control} -> {target}")))
                }
                Gate::Fixed { unitary } if unitary.dim() != dim => {
                    return Err(bad(format!("unitary is {0}x{0}, register is {dim}", unitary.dim())))
                }
                Gate::Evolution { generator, .. } if generator.dim() != dim => {
                    return Err(bad(format!("generator is {0}x{0}, register is {dim}", generator.dim())))
                }
                _ => {}
            }
            if let Some(p) = g.param() {
                if p >= n_params {
                    return Err(bad(format!("parameter index {p} >= {n_params}")));
                }
            }
        }
        Ok(Self {
            n_qubits,
            n_params,
            gates,
        })
    }

    /// `W(θ) = R_Z(θ3) R_Y(θ2) R_Z(θ1)` on one qubit, i.e. `R_Z(θ1)` acts first.
    pub fn reference() -> Self {
        let rot = |axis, param| Gate::Rotation { axis, qubit: 0, param };
        Self {
            n_qubits: 1,
            n_params: 3,
            gates: vec![rot(Axis::Z, 0), rot(Axis::Y, 1), rot(Axis::Z, 2)],
        }
    }

    /// `layers` × (`R_Y`, `R_Z` on every qubit, then a CNOT chain).
    pub fn layered(n_qubits: usize, layers: usize) -> Result<Self> {
        let mut gates = Vec::new();
        let mut param = 0;
        for _ in 0..layers {
            for q in 0..n_qubits {
                for axis in [Axis::Y, Axis::Z] {
                    gates.push(Gate::Rotation { axis, qubit: q, param });
                    param += 1;
                }
            }
            for q in 0..n_qubits.saturating_sub(1) {
                gates.push(Gate::Cnot { control: q, target: q + 1 });
            }
        }
        Self::new(n_qubits, param, gates)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Applies `W(θ)`; gate `shift.0` gets its angle offset by `shift.1`.
    fn apply(&self, theta: &[f64], psi: &CVector, shift: Option<(usize, f64)>) -> Result<CVector> {
        let mut v = psi.clone();
        for (i, g) in self.gates.iter().enumerate() {
            let mut angle = g.param().map_or(0.0, |p| theta[p]);
            if let Some((j, delta)) = shift {
                if i == j {
                    angle += delta;
                }
            }
            v = g.unitary(angle, self.n_qubits)?.entries() * v;
        }
        Ok(v)
    }

    /// `W(θ)` as a matrix.
    pub fn unitary(&self, theta: &[f64]) -> Result<Unitary> {
        let mut w = Unitary::identity(self.dim());
        for g in &self.gates {
            let angle = g.param().map_or(0.0, |p| theta[p]);
            w = g.unitary(angle, self.n_qubits)?.compose(&w)?;
        }
        Ok(w)
    }

    /// Rejects parameterised gates whose generator spectrum is not `{±1/2}`.
    pub fn check_shift_rule(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            if let Gate::Evolution { generator, .. } = g {
                let eig = hermitian_eigendecomposition(generator)?;
                if eig.values.iter().any(|v| (v.abs() - 0.5).abs() > SHIFT_EIGENVALUE_TOL) {
                    return Err(Error::UnsupportedGate(format!(
                        "gate {i}: parameter shift needs generator eigenvalues ±1/2, got {:?}",
                        eig.values
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalModel {
    spec: EncodingSpec,
    ansatz: Ansatz,
    theta: Vec<f64>,
    observable: HermitianOperator,
}

impl VariationalModel {
    pub fn new(spec: EncodingSpec, ansatz: Ansatz, theta: Vec<f64>, observable: HermitianOperator) -> Result<Self> {
        if theta.len() != ansatz.n_params() {
            return Err(Error::DimensionMismatch {
                expected: ansatz.n_params(),
                actual: theta.len(),
            });
        }
        if observable.dim() != ansatz.dim() {
            return Err(Error::DimensionMismatch {
                expected: ansatz.dim(),
                actual: observable.dim(),
            });
        }
        Ok(Self {
            spec,
            ansatz,
            theta,
            observable,
        })
    }

    /// `σ_z` on `qubit`.
    pub fn with_pauli_z(spec: EncodingSpec, ansatz: Ansatz, theta: Vec<f64>, qubit: usize) -> Result<Self> {
        let obs = HermitianOperator::pauli_z().on_qubit(qubit, ansatz.n_qubits())?;
        Self::new(spec, ansatz, theta, obs)
    }

    /// The reference ansatz measuring `σ_z`.
    pub fn reference(spec: EncodingSpec, theta: [f64; 3]) -> Self {
        Self::with_pauli_z(spec, Ansatz::reference(), theta.to_vec(), 0).expect("reference model")
    }

    pub fn spec(&self) -> &EncodingSpec {
        &self.spec
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn observable(&self) -> &HermitianOperator {
        &self.observable
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(self.spec.clone(), self.ansatz.clone(), theta, self.observable.clone())
    }

    /// `M(θ) = W†(θ) O W(θ)`.
    pub fn measurement(&self) -> Result<HermitianOperator> {
        let w = self.ansatz.unitary(&self.theta)?;
        let w = w.entries();
        HermitianOperator::new(w.adjoint() * self.observable.entries() * w)
    }

    fn encoded(&self, x: &DataPoint) -> Result<StateVector> {
        let psi = encode(&self.spec, x)?;
        if psi.dim() != self.ansatz.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ansatz.dim(),
                actual: psi.dim(),
            });
        }
        Ok(psi)
    }

    fn value(&self, psi: &StateVector, shift: Option<(usize, f64)>) -> Result<f64> {
        let out = self.ansatz.apply(&self.theta, psi.as_vector(), shift)?;
        state_expectation(&StateVector::from_vector(out)?, &self.observable)
    }
}

/// `f(x) = tr{ρ(x) W†(θ) O W(θ)}`.
pub fn evaluate(model: &VariationalModel, x: &DataPoint) -> Result<f64> {
    model.value(&model.encoded(x)?, None)
}

/// `cos θ2 cos x − sin θ1 sin θ2 sin x`, the reference model under `R_X` encoding.
pub fn analytic_reference(theta: [f64; 3], x: f64) -> f64 {
    theta[1].cos() * x.cos() - theta[0].sin() * theta[1].sin() * x.sin()
}

fn shift_gradient(model: &VariationalModel, psi: &StateVector) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; model.ansatz.n_params()];
    for (i, g) in model.ansatz.gates().iter().enumerate() {
        if let Some(p) = g.param() {
            let plus = model.value(psi, Some((i, FRAC_PI_2)))?;
            let minus = model.value(psi, Some((i, -FRAC_PI_2)))?;
            grad[p] += (plus - minus) / 2.0;
        }
    }
    Ok(grad)
}

/// `∂f/∂θ_k` by the two-term shift rule, summed over every gate using `θ_k`.
pub fn parameter_shift_gradient(model: &VariationalModel, x: &DataPoint) -> Result<Vec<f64>> {
    model.ansatz.check_shift_rule()?;
    shift_gradient(model, &model.encoded(x)?)
}

/// Optimisation settings for variational training and the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingParams {
    pub lr: f64,
    pub epochs: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    /// Box constraint of the SVM dual when hinge loss is used with `λ = 0`.
    #[serde(default = "default_c_box")]
    pub c_box: f64,
}

fn default_restarts() -> usize {
    10
}

fn default_c_box() -> f64 {
    10.0
}

impl Default for TrainingParams {
    fn default() -> Self {
        Self {
            lr: 0.1,
            epochs: 200,
            restarts: default_restarts(),
            seed: 0,
            c_box: default_c_box(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub model: VariationalModel,
    /// Empirical risk at initialisation and after every epoch.
    pub trajectory: Vec<f64>,
    pub circuit_evals: u64,
    pub seed: u64,
}

fn loss_derivative(loss: LossSpec, f: f64, y: f64) -> f64 {
    match loss {
        LossSpec::SquaredError => 2.0 * (f - y),
        LossSpec::Hinge => {
            if 1.0 - f * y > 0.0 {
                -y
            } else {
                0.0
            }
        }
    }
}

/// Circuit evaluations of one training run: forward pass plus two shifted
/// evaluations per parameter, for every point and epoch.
pub fn variational_circuit_evals(epochs: usize, m: usize, n_params: usize) -> u64 {
    (epochs * m * (1 + 2 * n_params)) as u64
}

/// Full-batch gradient descent on the empirical risk from `θ ~ U[0, 2π)`
/// drawn with `seed`.
///
/// `lambda` is accepted for symmetry with kernel training; for `W†OW` models
/// `tr{M(θ)²} = tr{O²}` does not depend on `θ`, so the penalty has no effect
/// on the optimisation and is left out.
pub fn train(
    model: &VariationalModel,
    data: &Dataset,
    loss: LossSpec,
    lambda: f64,
    lr: f64,
    epochs: usize,
    seed: u64,
) -> Result<TrainOutcome> {
    if epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidArgument(format!("learning rate must be positive, got {lr}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    model.ansatz.check_shift_rule()?;
    let states = data
        .inputs()
        .iter()
        .map(|x| model.encoded(x))
        .collect::<Result<Vec<_>>>()?;
    let labels = data.labels();
    let m = labels.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..model.ansatz.n_params()).map(|_| rng.random_range(0.0..TAU)).collect();
    let mut current = model.with_theta(theta)?;
    let risk_of = |model: &VariationalModel| -> Result<f64> {
        let preds = states.iter().map(|s| model.value(s, None)).collect::<Result<Vec<_>>>()?;
        Ok(loss.empirical_risk(&preds, labels))
    };

    let mut trajectory = Vec::with_capacity(epochs + 1);
    for epoch in 1..=epochs {
        let mut grad = vec![0.0; current.ansatz.n_params()];
        let mut risk = 0.0;
        for (psi, &y) in states.iter().zip(labels) {
            let f = current.value(psi, None)?;
            risk += loss.loss(f, y) / m;
            let dl = loss_derivative(loss, f, y) / m;
            if dl != 0.0 {
                for (g, d) in grad.iter_mut().zip(shift_gradient(&current, psi)?) {
                    *g += dl * d;
                }
            }
        }
        if epoch == 1 {
            trajectory.push(risk);
        }
        let theta: Vec<f64> = current.theta.iter().zip(&grad).map(|(t, g)| t - lr * g).collect();
        current = current.with_theta(theta)?;
        let after = risk_of(&current)?;
        if !after.is_finite() || current.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Diverged { epoch, loss: after });
        }
        trajectory.push(after);
    }
    Ok(TrainOutcome {
        circuit_evals: variational_circuit_evals(epochs, data.len(), current.ansatz.n_params()),
        model: current,
        trajectory,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub risk: f64,
    pub seconds: f64,
    pub circuit_evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub risk: f64,
    pub seconds: f64,
    /// Per training run.
    pub circuit_evals: u64,
    pub best_seed: u64,
    pub trajectory: Vec<f64>,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub loss: LossSpec,
    pub lambda: f64,
    /// Regularisation strength both risks are evaluated with.
    pub effective_lambda: f64,
    pub kernel: KernelReport,
    pub variational: VariationalReport,
}

/// Trains the kernel model (KRR or SVM, per `loss`) and the variational model
/// (best of `params.restarts` runs with seeds `params.seed + r`) and evaluates
/// both with the same regularised objective.
///
/// The variational model is charged the smallest RKHS norm of any function
/// with its training predictions `f_v`, namely `f_vᵀ K⁺ f_v`. For hinge loss
/// at `λ = 0` the SVM with box `params.c_box` is fitted and both sides are
/// scored with the equivalent strength `1/(2 C M)`.
pub fn compare(
    spec: &EncodingSpec,
    ansatz: &VariationalModel,
    data: &Dataset,
    loss: LossSpec,
    lambda: f64,
    params: &TrainingParams,
) -> Result<ComparisonReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if params.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let m = data.len();
    let variational_model = VariationalModel {
        spec: spec.clone(),
        ..ansatz.clone()
    };

    let start = Instant::now();
    let (kernel_model, effective_lambda) = match loss {
        LossSpec::SquaredError => (fit_krr(spec, data, lambda)?, lambda),
        LossSpec::Hinge => {
            let c_box = if lambda > 0.0 { 1.0 / (2.0 * lambda * m as f64) } else { params.c_box };
            let (model, _) = fit_svm(spec, data, c_box)?;
            let eff = model.lambda();
            (model, eff)
        }
    };
    let kernel_risk = regularized_risk(&kernel_model, data, loss, effective_lambda)?;
    let kernel_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let k = gram(spec, data.inputs())?;
    let runs = (0..params.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let out = train(&variational_model, data, loss, lambda, params.lr, params.epochs, params.seed + r)?;
            let preds = data
                .inputs()
                .iter()
                .map(|x| evaluate(&out.model, x))
                .collect::<Result<Vec<_>>>()?;
            let risk = loss.empirical_risk(&preds, data.labels())
                + effective_lambda * min_norm(k.values(), &preds)?;
            Ok((risk, out))
        })
        .collect::<Result<Vec<_>>>()?;
    let (risk, best) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    let variational_seconds = start.elapsed().as_secs_f64();

    Ok(ComparisonReport {
        loss,
        lambda,
        effective_lambda,
        kernel: KernelReport {
            risk: kernel_risk,
            seconds: kernel_seconds,
            circuit_evals: (m * (m + 1) / 2) as u64,
        },
        variational: VariationalReport {
            risk,
            seconds: variational_seconds,
            circuit_evals: best.circuit_evals,
            best_seed: best.seed,
            trajectory: best.trajectory,
            theta: best.model.theta,
        },
    })
}

/// `fᵀ K⁺ f`.
fn min_norm(k: &DMatrix<f64>, f: &[f64]) -> Result<f64> {
    let fv = DVector::from_column_slice(f);
    Ok(fv.dot(&pinv_solve(k, &fv)?))
}
