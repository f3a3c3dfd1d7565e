use std::path::{Path, PathBuf};

use qkern_core::dataset::format_shortest;
use qkern_core::encoding::{DataPoint, EncodingSpec};
use qkern_core::fourier::{self, FrequencySpectrum};
use qkern_core::kernel::{self, PSD_TOLERANCE};
use qkern_core::training::{self, KernelModel, LossSpec};
use qkern_core::variational::{self, TrainOutcome, VariationalModel};
use qkern_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, GridConfig, Task};
use crate::error::CliError;
use crate::output::{write_json, write_text};

pub const DEFAULT_SAMPLES: usize = 100;

/// Everything a task needs besides its config.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    /// Directory the config file lives in; `dataset_path` is resolved against it.
    pub base_dir: &'a Path,
    pub output_dir: &'a Path,
    pub verbose: bool,
}

impl Context<'_> {
    fn dataset(&self) -> Result<Dataset, CliError> {
        let data = self.config.dataset(self.base_dir)?;
        if self.verbose {
            eprintln!("dataset: M={} N={}", data.len(), data.input_dim());
        }
        Ok(data)
    }
}

/// Runs the configured task and returns the files written.
pub fn run(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(ctx.output_dir).map_err(|source| CliError::Io {
        path: ctx.output_dir.to_path_buf(),
        source,
    })?;
    ctx.config.encoding.validate()?;
    match ctx.config.task {
        Task::KernelMatrix => kernel_matrix(ctx),
        Task::Fourier => fourier_task(ctx),
        Task::TrainKernel => train_kernel(ctx),
        Task::TrainVariational => train_variational(ctx),
        Task::Compare => compare(ctx),
        Task::Landscape => landscape(ctx),
    }
}

#[derive(Serialize)]
struct ShotSummary {
    shots: u64,
    seed: u64,
    max_abs_error: f64,
}

#[derive(Serialize)]
struct KernelMatrixReport<'a> {
    task: &'static str,
    encoding: &'a EncodingSpec,
    m: usize,
    min_eigenvalue: f64,
    psd_tolerance: f64,
    psd: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<ShotSummary>,
}

fn kernel_matrix(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let data = ctx.dataset()?;
    let g = kernel::gram(&config.encoding, data.inputs())?;
    let min_eigenvalue = g.min_eigenvalue()?;
    let mut written = vec![write_text(ctx.output_dir, "gram.csv", &g.to_csv())?];

    let shots = match config.shots {
        None => None,
        Some(shots) => {
            // Each entry gets its own stream: seed + (i·M + j).
            let m = g.len();
            let mut sampled = g.values().clone();
            let mut max_abs_error: f64 = 0.0;
            for i in 0..m {
                for j in i..m {
                    let seed = config.seed().wrapping_add((i * m + j) as u64);
                    let est = kernel::sample_probability(g.get(i, j), shots, seed)?.estimate;
                    max_abs_error = max_abs_error.max((est - g.get(i, j)).abs());
                    sampled[(i, j)] = est;
                    sampled[(j, i)] = est;
                }
            }
            let sampled = kernel::GramMatrix::new(sampled, data.inputs().to_vec())?;
            written.push(write_text(ctx.output_dir, "gram_shots.csv", &sampled.to_csv())?);
            Some(ShotSummary {
                shots,
                seed: config.seed(),
                max_abs_error,
            })
        }
    };

    let report = KernelMatrixReport {
        task: Task::KernelMatrix.name(),
        encoding: &config.encoding,
        m: g.len(),
        min_eigenvalue,
        psd_tolerance: PSD_TOLERANCE,
        psd: min_eigenvalue >= PSD_TOLERANCE,
        shots,
    };
    written.push(write_json(ctx.output_dir, "kernel_matrix.json", &report)?);
    Ok(written)
}

#[derive(Serialize)]
struct FourierReport<'a> {
    task: &'static str,
    spectrum: &'a FrequencySpectrum,
    n_frequencies: usize,
    n_coefficients: usize,
    translation_invariant: bool,
    integer_spectrum: bool,
    conjugate_symmetry_residual: f64,
    samples: usize,
    seed: u64,
    series_max_error: f64,
}

fn fourier_task(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let EncodingSpec::GeneralEvolution(g) = &config.encoding else {
        return Err(CliError::Usage("task fourier needs a general_evolution encoding".into()));
    };
    let cap = config.enumeration_cap.unwrap_or(fourier::DEFAULT_ENUMERATION_CAP);
    let spectrum = fourier::coefficients_with_cap(g, cap)?;
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let n = g.input_dim();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let mut draw = || DataPoint::new((0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect());
    let mut series_max_error: f64 = 0.0;
    for _ in 0..samples {
        let (x, x2) = (draw(), draw());
        let series = fourier::evaluate_series(&spectrum, &x, &x2)?;
        let simulated = kernel::kernel(&config.encoding, &x, &x2)?;
        series_max_error = series_max_error.max((series - simulated).abs());
    }
    if ctx.verbose {
        eprintln!(
            "fourier: |Omega|={} coefficients={} max error={series_max_error:e}",
            spectrum.frequencies().len(),
            spectrum.coefficients().len()
        );
    }

    let report = FourierReport {
        task: Task::Fourier.name(),
        n_frequencies: spectrum.frequencies().len(),
        n_coefficients: spectrum.coefficients().len(),
        translation_invariant: fourier::is_translation_invariant(&spectrum, 1e-10),
        integer_spectrum: fourier::integer_spectrum_check(&spectrum),
        conjugate_symmetry_residual: spectrum.conjugate_symmetry_residual(),
        spectrum: &spectrum,
        samples,
        seed: config.seed(),
        series_max_error,
    };
    Ok(vec![write_json(ctx.output_dir, "fourier.json", &report)?])
}

#[derive(Serialize)]
struct SvmDiagnostics {
    c_box: f64,
    gap: f64,
    passes: usize,
    kkt_violation: f64,
}

#[derive(Serialize)]
struct KernelTrainingReport {
    task: &'static str,
    loss: LossSpec,
    lambda: f64,
    effective_lambda: f64,
    m: usize,
    empirical_risk: f64,
    regularizer_norm: f64,
    regularized_risk: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    svm: Option<SvmDiagnostics>,
}

/// KRR for squared loss; the SVM for hinge loss with `C = 1/(2λM)`, or
/// `c_box` when `λ = 0`.
fn fit_kernel(config: &ExperimentConfig, data: &Dataset) -> Result<(KernelModel, Option<SvmDiagnostics>), CliError> {
    let lambda = config.lambda();
    match config.loss() {
        LossSpec::SquaredError => Ok((training::fit_krr(&config.encoding, data, lambda)?, None)),
        LossSpec::Hinge => {
            let c_box = if lambda > 0.0 {
                1.0 / (2.0 * lambda * data.len() as f64)
            } else {
                config.c_box()
            };
            let (model, sol) = training::fit_svm(&config.encoding, data, c_box)?;
            let diag = SvmDiagnostics {
                c_box,
                gap: sol.gap,
                passes: sol.passes,
                kkt_violation: sol.kkt_violation(),
            };
            Ok((model, Some(diag)))
        }
    }
}

fn train_kernel(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let data = ctx.dataset()?;
    let (model, svm) = fit_kernel(config, &data)?;
    let loss = config.loss();
    let effective_lambda = model.lambda();
    let preds = training::predict_many(&model, data.inputs())?;
    let norm = training::regularizer_norm(&model)?;
    let report = KernelTrainingReport {
        task: Task::TrainKernel.name(),
        loss,
        lambda: config.lambda(),
        effective_lambda,
        m: data.len(),
        empirical_risk: loss.empirical_risk(&preds, data.labels()),
        regularizer_norm: norm,
        regularized_risk: training::regularized_risk(&model, &data, loss, effective_lambda)?,
        svm,
    };
    Ok(vec![
        write_json(ctx.output_dir, "model.json", &model)?,
        write_json(ctx.output_dir, "report.json", &report)?,
    ])
}

fn variational_model(config: &ExperimentConfig) -> Result<VariationalModel, CliError> {
    let ansatz = match &config.ansatz {
        Some(a) => a.build()?,
        None => variational::Ansatz::reference(),
    };
    let theta = vec![0.0; ansatz.n_params()];
    Ok(VariationalModel::with_pauli_z(
        config.encoding.clone(),
        ansatz,
        theta,
        config.observable_qubit.unwrap_or(0),
    )?)
}

#[derive(Serialize)]
struct VariationalTrainingReport {
    task: &'static str,
    loss: LossSpec,
    lr: f64,
    epochs: usize,
    restarts: usize,
    m: usize,
    seeds: Vec<u64>,
    final_risks: Vec<f64>,
    best_seed: u64,
    empirical_risk: f64,
    circuit_evals: u64,
    trajectory: Vec<f64>,
}

fn train_variational(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let data = ctx.dataset()?;
    let model = variational_model(config)?;
    let params = config.training_params();
    let restarts = config.restarts.unwrap_or(1);
    let loss = config.loss();

    let mut runs: Vec<TrainOutcome> = Vec::with_capacity(restarts);
    for r in 0..restarts as u64 {
        let seed = params.seed.wrapping_add(r);
        let out = variational::train(&model, &data, loss, config.lambda(), params.lr, params.epochs, seed)?;
        if ctx.verbose {
            eprintln!("restart {r}: seed={seed} risk={:e}", out.trajectory.last().copied().unwrap_or(f64::NAN));
        }
        runs.push(out);
    }
    let final_risks: Vec<f64> = runs.iter().map(|r| *r.trajectory.last().expect("epochs >= 1")).collect();
    let best = final_risks
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < final_risks[b] { i } else { b });
    let best_run = runs.swap_remove(best);

    let report = VariationalTrainingReport {
        task: Task::TrainVariational.name(),
        loss,
        lr: params.lr,
        epochs: params.epochs,
        restarts,
        m: data.len(),
        seeds: (0..restarts as u64).map(|r| params.seed.wrapping_add(r)).collect(),
        best_seed: best_run.seed,
        empirical_risk: final_risks[best],
        final_risks,
        circuit_evals: best_run.circuit_evals * restarts as u64,
        trajectory: best_run.trajectory,
    };
    Ok(vec![
        write_json(ctx.output_dir, "model.json", &best_run.model)?,
        write_json(ctx.output_dir, "report.json", &report)?,
    ])
}

fn compare(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let data = ctx.dataset()?;
    let model = variational_model(config)?;
    let report = variational::compare(
        &config.encoding,
        &model,
        &data,
        config.loss(),
        config.lambda(),
        &config.training_params(),
    )?;
    if ctx.verbose {
        eprintln!(
            "kernel risk={:e} variational risk={:e}",
            report.kernel.risk, report.variational.risk
        );
    }
    Ok(vec![write_json(ctx.output_dir, "comparison.json", &report)?])
}

#[derive(Serialize)]
struct LandscapeReport<'a> {
    task: &'static str,
    encoding: &'a EncodingSpec,
    grid: &'a GridConfig,
    points: usize,
    min: f64,
    max: f64,
    value_at_reference: Option<f64>,
}

/// `κ(x̃, x)` over the mesh, last coordinate varying fastest.
pub fn landscape_values(spec: &EncodingSpec, grid: &GridConfig) -> qkern_core::Result<Vec<(Vec<f64>, f64)>> {
    let axes: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.points()).collect();
    let reference = DataPoint::new(grid.reference.clone());
    let total: usize = axes.iter().map(Vec::len).product();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut x = vec![0.0; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            x[k] = axis[rem % axis.len()];
            rem /= axis.len();
        }
        points.push(x);
    }
    let cols: Vec<DataPoint> = points.iter().map(|p| DataPoint::new(p.clone())).collect();
    let values = kernel::cross_gram(spec, std::slice::from_ref(&reference), &cols)?;
    Ok(points.into_iter().zip(values.row(0).iter().copied()).collect())
}

fn landscape(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config;
    let grid = config
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Usage("task landscape needs grid".into()))?;
    let values = landscape_values(&config.encoding, grid)?;

    let n = grid.axes.len();
    let mut csv = (1..=n).map(|k| format!("x_{k},")).collect::<String>();
    csv.push_str("kernel\n");
    for (x, v) in &values {
        for c in x {
            csv.push_str(&format_shortest(*c));
            csv.push(',');
        }
        csv.push_str(&format_shortest(*v));
        csv.push('\n');
    }

    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(*v), hi.max(*v)));
    let value_at_reference = values.iter().find(|(x, _)| *x == grid.reference).map(|(_, v)| *v);
    let report = LandscapeReport {
        task: Task::Landscape.name(),
        encoding: &config.encoding,
        grid,
        points: values.len(),
        min,
        max,
        value_at_reference,
    };
    Ok(vec![
        write_text(ctx.output_dir, "landscape.csv", &csv)?,
        write_json(ctx.output_dir, "landscape.json", &report)?,
    ])
}

/// Error body written next to the outputs when a task fails.
pub fn write_error(output_dir: &Path, err: &CliError) {
    if std::fs::create_dir_all(output_dir).is_ok() {
        let _ = std::fs::write(output_dir.join("error.json"), err.to_json());
    }
}
