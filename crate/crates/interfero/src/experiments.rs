//! Scenario harness: wires basis → delay → interferometer → sensing →
//! solver pipelines from a JSON config, runs seeded Monte Carlo sweeps,
//! post-processes OCT coefficients into reflectivity/depth profiles, and
//! emits CSV tables and SVG plots.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::basis::{
    analyze_field, flipped_gaussian_mode, synthesize_field, BasisSpec, CoefficientVector,
};
use crate::delay::{apply_frft_fast, OpticalParams};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::interferometer::{
    analytic_interferogram, analytic_interferogram_2d, localization_measurements,
    noise_sigma_unnormalized, normalize_measurements, oct_sample_coefficients, SampleArm,
};
use crate::sensing::{
    build_2d_cosine_matrix, build_block_matrix, build_cosine_matrix, build_oct_dictionary,
    empirical_concentration, incoherence_parameter, isotropy_estimate, nyquist_schedule,
    rip_constant_exhaustive, sample_delays_uniform, DelaySchedule,
};
use crate::solvers::{
    basis_pursuit, dantzig_selector, debias_on_support, extract_support, ft_baseline,
    lasso_with_lambda, least_squares, recovery_error, RecoveryProblem, RecoveryResult,
    SolverStatus, SUPPORT_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ModalIdeal,
    ModalSlm,
    ModalExperimentalApprox,
    OctDense,
    OctSparse,
    TwoD,
    Localization,
    Diagnostics,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::ModalIdeal => "modal-ideal",
            Scenario::ModalSlm => "modal-slm",
            Scenario::ModalExperimentalApprox => "modal-experimental-approx",
            Scenario::OctDense => "oct-dense",
            Scenario::OctSparse => "oct-sparse",
            Scenario::TwoD => "two-d",
            Scenario::Localization => "localization",
            Scenario::Diagnostics => "diagnostics",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Bp,
    Lasso,
    Dantzig,
    Ft,
    Ls,
}

fn default_n() -> usize {
    64
}
fn default_s() -> usize {
    4
}
fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}

/// One JSON document per scenario; unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub solver: SolverChoice,
    /// Number of modes (first axis for `two-d`).
    #[serde(default = "default_n")]
    pub n: usize,
    /// Second mode axis for `two-d` (defaults to `n`).
    #[serde(default)]
    pub n2: Option<usize>,
    /// Sparsity of the ground truth.
    #[serde(default = "default_s")]
    pub s: usize,
    /// Measurement count for a single run.
    #[serde(default)]
    pub m: Option<usize>,
    /// Measurement grid for `sweep`.
    #[serde(default)]
    pub m_sweep: Option<Vec<usize>>,
    /// SNR list in dB; `null` entries mean noise-free. Empty = noise-free.
    #[serde(default)]
    pub snr_db: Vec<Option<f64>>,
    /// Monte Carlo runs per (M, SNR) cell.
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Penalty weight override for LASSO/Dantzig (λ, applied as λ·σ).
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Least-squares refit on the recovered support after an ℓ1 solve.
    #[serde(default)]
    pub debias: bool,
    /// Constrain iterates to the nonnegative orthant.
    #[serde(default)]
    pub nonneg: bool,
    /// Depth-grid size L for the OCT scenarios.
    #[serde(default)]
    pub layers: Option<usize>,
    #[serde(default = "unit")]
    pub wavelength: f64,
    #[serde(default = "unit")]
    pub focal_length: f64,
    /// Spatial grid size for field-level scenarios (default 1024).
    #[serde(default)]
    pub grid_points: Option<usize>,
    /// Spatial grid half-extent in units of σ = √(λf) (default 12).
    #[serde(default)]
    pub grid_extent_sigmas: Option<f64>,
    /// Default output directory (CLI `--out` overrides).
    #[serde(default)]
    pub out_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.unknown_count();
        if self.s > k {
            return Err(Error::Config(format!(
                "s = {} exceeds {} unknowns",
                self.s, k
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be ≥ 1".into()));
        }
        if let Some(m) = self.m {
            if m == 0 {
                return Err(Error::Config("M must be ≥ 1".into()));
            }
        }
        if let Some(ms) = &self.m_sweep {
            if ms.is_empty() || ms.contains(&0) {
                return Err(Error::Config("m_sweep must list M values ≥ 1".into()));
            }
        }
        if self.m.is_none() && self.m_sweep.is_none() && self.scenario != Scenario::Diagnostics {
            return Err(Error::Config("one of m or m_sweep is required".into()));
        }
        if self.solver == SolverChoice::Ft {
            if let Some(m) = self.m {
                if m != 2 * self.n {
                    return Err(Error::Config(format!(
                        "the FT baseline needs the full Nyquist grid: M = 2N = {}",
                        2 * self.n
                    )));
                }
            }
        }
        Ok(())
    }

    fn unknown_count(&self) -> usize {
        match self.scenario {
            Scenario::TwoD => self.n * self.n2.unwrap_or(self.n),
            Scenario::OctDense | Scenario::OctSparse => self.layers.unwrap_or(self.depth_default()),
            Scenario::Localization => 2,
            _ => self.n,
        }
    }

    fn depth_default(&self) -> usize {
        match self.scenario {
            Scenario::OctDense => 10,
            _ => 100,
        }
    }

    fn m_list(&self) -> Vec<usize> {
        match (&self.m_sweep, self.m) {
            (Some(ms), _) => ms.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => vec![],
        }
    }

    fn snr_list(&self) -> Vec<Option<f64>> {
        if self.snr_db.is_empty() {
            vec![None]
        } else {
            self.snr_db.clone()
        }
    }
}

/// One row of the result table.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub scenario: String,
    pub m: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub scaled_error: f64,
    pub residual: f64,
    pub runtime_ms: f64,
    pub status: SolverStatus,
}

#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Fixed-header CSV; rows sorted by (M, SNR, seed) so output order is
    /// independent of scheduling.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("scenario,M,snr_db,seed,scaled_error,residual,runtime_ms,status\n");
        for r in &self.rows {
            let snr = match r.snr_db {
                None => "inf".to_string(),
                Some(v) => format!("{v}"),
            };
            out.push_str(&format!(
                "{},{},{},{},{:.12e},{:.12e},{:.3},{}\n",
                r.scenario, r.m, snr, r.seed, r.scaled_error, r.residual, r.runtime_ms, r.status
            ));
        }
        out
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            let ka = (a.m, a.snr_db.unwrap_or(f64::INFINITY), a.seed);
            let kb = (b.m, b.snr_db.unwrap_or(f64::INFINITY), b.seed);
            ka.partial_cmp(&kb).expect("finite sort keys")
        });
    }

    /// Median scaled error of the (M, SNR) cell.
    pub fn median_error(&self, m: usize, snr_db: Option<f64>) -> Option<f64> {
        let mut vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.m == m && r.snr_db == snr_db)
            .map(|r| r.scaled_error)
            .collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = vals.len();
        Some(if n % 2 == 1 {
            vals[n / 2]
        } else {
            0.5 * (vals[n / 2 - 1] + vals[n / 2])
        })
    }
}

/// Nonnegative s-sparse ground truth: support uniform at random, values
/// uniform in [0.2, 1], then energy-normalized.
pub fn sparse_ground_truth(k: usize, s: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DVector::zeros(k);
    let mut chosen: Vec<usize> = Vec::with_capacity(s);
    while chosen.len() < s {
        let i = rng.gen_range(0..k);
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    for &i in &chosen {
        x[i] = rng.gen_range(0.2..1.0);
    }
    let norm = x.norm();
    x / norm
}

fn mix(seed: u64, salt: u64) -> u64 {
    (seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Scenario-specific post-processing of the solver output.
enum Post {
    /// Compare x̂ against x_true directly.
    Direct,
    /// OCT chain: x̂ (2N block vector) → d coefficients → layer profile.
    OctChain {
        c: CoefficientVector,
        omegas: Vec<f64>,
        depths: Vec<f64>,
    },
}

/// Everything a solver needs for one run at one M: the (unnormalized)
/// model matrix, clean measurements, and the error reference.
struct MeasurementSet {
    a: DMatrix<f64>,
    y: Vec<f64>,
    x_true: DVector<f64>,
    schedule: Vec<f64>,
    post: Post,
}

fn hg_basis(cfg: &ScenarioConfig, params: &OpticalParams) -> BasisSpec {
    BasisSpec::HermiteGaussian {
        sigma: params.sigma(),
        n: cfg.n,
    }
}

fn field_grid(cfg: &ScenarioConfig, params: &OpticalParams) -> Result<Grid> {
    let sigma = params.sigma();
    let half = cfg.grid_extent_sigmas.unwrap_or(12.0) * sigma;
    Grid::new(-half, half, cfg.grid_points.unwrap_or(1024))
}

/// Salt for per-run schedule draws. Deliberately independent of M: with a
/// fixed stream the schedule at a smaller M is a prefix of the one at a
/// larger M, so sweep cells along the M axis share their randomness
/// (common random numbers) and the error curves are far less noisy than
/// with independent redraws per cell.
const SCHEDULE_SALT: u64 = 0x5eed;
/// Salt for per-run noise draws, likewise independent of M and SNR: the
/// same standard-normal stream is scaled to each SNR's noise level.
const NOISE_SALT: u64 = 0xa0153;

fn modal_schedule(cfg: &ScenarioConfig, m: usize, run: usize, kernel_arm: bool) -> DelaySchedule {
    if cfg.solver == SolverChoice::Ft {
        nyquist_schedule(cfg.n)
    } else {
        sample_delays_uniform(
            m,
            mix(cfg.seed.wrapping_add(run as u64), SCHEDULE_SALT),
            kernel_arm,
        )
    }
}

/// Field-level interferogram through the chosen reference arm, normalized.
fn field_measurements(
    field: &Field,
    delays: &[f64],
    params: &OpticalParams,
    cascade: bool,
) -> Result<Vec<f64>> {
    let i1 = field.energy();
    let dx = field.grid.dx();
    let mut y = Vec::with_capacity(delays.len());
    for &alpha in delays {
        let delayed = apply_frft_fast(field, alpha, params, cascade)?;
        let e: f64 = dx
            * field
                .values
                .iter()
                .zip(&delayed.values)
                .map(|(a, b)| (a + b).norm_sqr())
                .sum::<f64>();
        y.push(0.5 * (e - 2.0 * i1));
    }
    Ok(y)
}

fn measurements_for(cfg: &ScenarioConfig, m: usize, run: usize) -> Result<MeasurementSet> {
    match cfg.scenario {
        Scenario::ModalIdeal => {
            let x = sparse_ground_truth(cfg.n, cfg.s, cfg.seed);
            let schedule = modal_schedule(cfg, m, run, false);
            let a = build_cosine_matrix(&schedule, cfg.n, false);
            let y: Vec<f64> = (&a.entries * &x).iter().copied().collect();
            Ok(MeasurementSet {
                a: a.entries,
                y,
                x_true: x,
                schedule: schedule.values,
                post: Post::Direct,
            })
        }
        Scenario::ModalSlm | Scenario::ModalExperimentalApprox => {
            let x = sparse_ground_truth(cfg.n, cfg.s, cfg.seed);
            let params = OpticalParams::new(cfg.wavelength, cfg.focal_length)?;
            let grid = field_grid(cfg, &params)?;
            let basis = hg_basis(cfg, &params);
            let cascade = cfg.scenario == Scenario::ModalSlm;
            let field = if cascade {
                let c = CoefficientVector::new(
                    basis.clone(),
                    x.iter().map(|&v| Complex64::new(v.sqrt(), 0.0)).collect(),
                )?;
                synthesize_field(&c, &grid)?
            } else {
                // surrogate for the lab source: flipped-Gaussian modes at the
                // same energies; the model still assumes the HG basis
                let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
                for (i, &v) in x.iter().enumerate() {
                    if v > 0.0 {
                        let mode = flipped_gaussian_mode(i + 1, params.sigma(), &grid)?;
                        for (o, fv) in values.iter_mut().zip(&mode.values) {
                            *o += v.sqrt() * fv;
                        }
                    }
                }
                Field::new(grid.clone(), values)?
            };
            // error reference: the HG-basis energies actually present in the
            // synthesized source (identical to x for the HG input)
            let c_hg = analyze_field(&field, &basis)?;
            let x_true = DVector::from_iterator(cfg.n, c_hg.values.iter().map(|v| v.norm_sqr()));
            let schedule = modal_schedule(cfg, m, run, true);
            let y = field_measurements(&field, &schedule.values, &params, cascade)?;
            let a = build_cosine_matrix(&schedule, cfg.n, false);
            Ok(MeasurementSet {
                a: a.entries,
                y,
                x_true,
                schedule: schedule.values,
                post: Post::Direct,
            })
        }
        Scenario::OctDense | Scenario::OctSparse => {
            let n = cfg.n;
            let l = cfg.layers.unwrap_or(cfg.depth_default());
            let s = if cfg.scenario == Scenario::OctDense {
                l
            } else {
                cfg.s
            };
            let r = sparse_ground_truth(l, s, cfg.seed);
            let omegas: Vec<f64> = (1..=n).map(|k| k as f64).collect();
            // depth grid at half the interferogram's finest period: T_ℓ = ℓ·π/N
            let depths: Vec<f64> = (0..l)
                .map(|k| k as f64 * std::f64::consts::PI / n as f64)
                .collect();
            let basis = BasisSpec::FourierHarmonics {
                omegas: omegas.clone(),
                period: 2.0 * std::f64::consts::PI,
            };
            let amp = (1.0 / n as f64).sqrt();
            let c = CoefficientVector::new(basis, vec![Complex64::new(amp, 0.0); n])?;
            let layers: Vec<(f64, f64)> = r
                .iter()
                .zip(&depths)
                .filter(|(&rv, _)| rv > 0.0)
                .map(|(&rv, &t)| (rv, t))
                .collect();
            let sample = SampleArm::layered(
                layers.iter().map(|&(rv, _)| rv).collect(),
                layers.iter().map(|&(_, t)| t).collect(),
            )?;
            let d = oct_sample_coefficients(&c, &sample, &omegas)?;
            let schedule = sample_delays_uniform(
                m,
                mix(cfg.seed.wrapping_add(run as u64), SCHEDULE_SALT),
                false,
            );
            let ig = analytic_interferogram(&c, &d, &schedule.values)?;
            let y = normalize_measurements(&ig);
            if cfg.scenario == Scenario::OctDense {
                // block-matrix solve for x = [Re(c d*); Im(c d*)], then the
                // extraction chain recovers (r_ℓ, T_ℓ)
                let a = build_block_matrix(&schedule, n, false);
                Ok(MeasurementSet {
                    a: a.entries,
                    y,
                    x_true: r,
                    schedule: schedule.values,
                    post: Post::OctChain { c, omegas, depths },
                })
            } else {
                let spectrum = vec![amp * amp; n];
                let a = build_oct_dictionary(&spectrum, &omegas, &schedule, &depths)?;
                Ok(MeasurementSet {
                    a: a.entries,
                    y,
                    x_true: r,
                    schedule: schedule.values,
                    post: Post::Direct,
                })
            }
        }
        Scenario::TwoD => {
            let n1 = cfg.n;
            let n2 = cfg.n2.unwrap_or(cfg.n);
            let k = n1 * n2;
            let x = sparse_ground_truth(k, cfg.s, cfg.seed);
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix(cfg.seed.wrapping_add(run as u64), SCHEDULE_SALT));
            let tau = 2.0 * std::f64::consts::PI;
            let pairs: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.gen_range(0.0..tau), rng.gen_range(0.0..tau)))
                .collect();
            let basis = BasisSpec::HermiteGaussian2D {
                sigma_x: 1.0,
                sigma_y: 1.0,
                n_x: n1,
                n_y: n2,
            };
            let c = CoefficientVector::new(
                basis,
                x.iter().map(|&v| Complex64::new(v.sqrt(), 0.0)).collect(),
            )?;
            let ig = analytic_interferogram_2d(&c, &pairs)?;
            let y = normalize_measurements(&ig);
            let a = build_2d_cosine_matrix(&pairs, n1, n2);
            Ok(MeasurementSet {
                a: a.entries,
                y,
                x_true: x,
                schedule: pairs.iter().map(|&(a1, _)| a1).collect(),
                post: Post::Direct,
            })
        }
        Scenario::Localization => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix(cfg.seed.wrapping_add(run as u64), SCHEDULE_SALT));
            let samples: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
            let a1 = Complex64::new(0.9, 0.0);
            let a2 = Complex64::from_polar(0.7, 0.4);
            let (y, rows, x) = localization_measurements(a1, a2, 5.0, 3.0, 1.3, 2.7, 1.0, &samples);
            let a = DMatrix::from_fn(m, 2, |i, j| rows[i][j]);
            Ok(MeasurementSet {
                a,
                y,
                x_true: DVector::from_row_slice(&x),
                schedule: samples,
                post: Post::Direct,
            })
        }
        Scenario::Diagnostics => Err(Error::Config(
            "the diagnostics scenario runs through `interfero diagnostics`".into(),
        )),
    }
}

fn solve_cell(
    cfg: &ScenarioConfig,
    ms: &MeasurementSet,
    snr_db: Option<f64>,
    noise_seed: u64,
) -> Result<(RecoveryResult, f64)> {
    let m = ms.y.len();
    let x_norm_sq = ms.x_true.norm_squared();
    let y_noisy: Vec<f64> = match snr_db {
        None => ms.y.clone(),
        Some(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
            crate::interferometer::add_noise(&ms.y, x_norm_sq, snr_db, &mut rng)
        }
    };
    let k = ms.a.ncols();
    let scale = (2.0 / m as f64).sqrt();
    let sigma_hat = snr_db.map(|snr| scale * noise_sigma_unnormalized(m, x_norm_sq, snr));
    let lambda = cfg
        .lambda
        .unwrap_or_else(|| 10.0 * (2.0 * k as f64).ln().sqrt());
    let solved = match cfg.solver {
        SolverChoice::Bp => {
            let mut p = RecoveryProblem::new(ms.a.clone(), DVector::from_vec(y_noisy.clone()))?;
            p.nonneg = cfg.nonneg;
            basis_pursuit(&p, 1e-10)
        }
        SolverChoice::Lasso | SolverChoice::Dantzig => {
            let a_hat = &ms.a * scale;
            let y_hat = DVector::from_vec(y_noisy.iter().map(|&v| v * scale).collect::<Vec<_>>());
            let mut p = RecoveryProblem::new(a_hat, y_hat)?;
            p.noise_sigma = Some(sigma_hat.unwrap_or(0.0));
            p.nonneg = cfg.nonneg;
            if cfg.solver == SolverChoice::Lasso {
                lasso_with_lambda(&p, lambda)
            } else if snr_db.is_none() {
                // at σ = 0 on consistent data the Dantzig constraint
                // collapses to the normal equations and the program equals
                // basis pursuit, which the splitting solver handles far
                // better than the (fully degenerate) LP
                basis_pursuit(&p, 1e-10)
            } else {
                dantzig_selector(&p, lambda)
            }
        }
        SolverChoice::Ft => ft_baseline(&y_noisy, &ms.schedule, cfg.n),
        SolverChoice::Ls => {
            let p = RecoveryProblem::new(ms.a.clone(), DVector::from_vec(y_noisy.clone()))?;
            least_squares(&p)
        }
    };
    // an infeasible / non-convergent cell is a data point, not a harness
    // failure: record it as x̂ = 0 with the failing status
    let mut result = match solved {
        Ok(r) => r,
        Err(Error::Infeasible(_)) | Err(Error::RankDeficient { .. }) => RecoveryResult {
            x_hat: DVector::zeros(k),
            residual: DVector::from_vec(y_noisy.clone()).norm(),
            iterations: 0,
            status: SolverStatus::Infeasible,
            support: Vec::new(),
        },
        Err(Error::MaxIter { iterations }) => RecoveryResult {
            x_hat: DVector::zeros(k),
            residual: DVector::from_vec(y_noisy.clone()).norm(),
            iterations,
            status: SolverStatus::MaxIter,
            support: Vec::new(),
        },
        Err(e) => return Err(e),
    };
    if cfg.debias
        && matches!(
            cfg.solver,
            SolverChoice::Bp | SolverChoice::Lasso | SolverChoice::Dantzig
        )
    {
        let y_vec = DVector::from_vec(y_noisy);
        let refit = debias_on_support(&ms.a, &y_vec, &result.support, cfg.nonneg)?;
        result.residual = (&ms.a * &refit - &y_vec).norm();
        result.support = extract_support(&refit);
        result.x_hat = refit;
        // an iteration-capped ℓ1 solve whose debiased refit reproduces the
        // data is a converged pipeline, not a failed one: the refit, not the
        // raw iterate, is the reported solution
        if result.status == SolverStatus::MaxIter
            && snr_db.is_none()
            && result.residual <= 1e-8 * y_vec.norm().max(1.0)
        {
            result.status = SolverStatus::Converged;
        }
    }
    let error = match &ms.post {
        Post::Direct => recovery_error(&ms.x_true, &result.x_hat)?,
        Post::OctChain { c, omegas, depths } => {
            let d = extract_d_coefficients(&result.x_hat, c)?;
            let profile = layer_profile(&d, c, omegas, depths)?;
            recovery_error(&ms.x_true, &profile)?
        }
    };
    Ok((result, error))
}

/// Reassemble the sample-arm coefficients from a recovered block vector:
/// g_n = x̂_n + j·x̂_{N+n} = c_n·d_n*, so d_n = conj(g_n / c_n).
pub fn extract_d_coefficients(
    x_hat: &DVector<f64>,
    c: &CoefficientVector,
) -> Result<CoefficientVector> {
    let n = c.values.len();
    if x_hat.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "block vector has {} entries, expected 2N = {}",
            x_hat.len(),
            2 * n
        )));
    }
    let mut d = Vec::with_capacity(n);
    for (i, cn) in c.values.iter().enumerate() {
        let g = Complex64::new(x_hat[i], x_hat[n + i]);
        if cn.norm() < 1e-12 {
            if g.norm() > 1e-9 {
                return Err(Error::InconsistentCoefficient { n: i + 1 });
            }
            d.push(Complex64::new(0.0, 0.0));
        } else {
            d.push((g / cn).conj());
        }
    }
    CoefficientVector::new(c.basis.clone(), d)
}

/// Full reflectivity profile over the depth grid: solves
/// Σ_ℓ r_ℓ·e^{−jω_n T_ℓ} = d_n/c_n — least squares when the grid fits in
/// the equation count, basis pursuit when overcomplete.
fn layer_profile(
    d: &CoefficientVector,
    c: &CoefficientVector,
    omegas: &[f64],
    depths: &[f64],
) -> Result<DVector<f64>> {
    let n = omegas.len();
    let l = depths.len();
    let mut e = DMatrix::zeros(2 * n, l);
    let mut q = DVector::zeros(2 * n);
    for i in 0..n {
        let cn = c.values[i];
        if cn.norm() < 1e-12 {
            return Err(Error::InconsistentCoefficient { n: i + 1 });
        }
        let ratio = d.values[i] / cn;
        q[i] = ratio.re;
        q[n + i] = ratio.im;
        for (j, &t) in depths.iter().enumerate() {
            e[(i, j)] = (omegas[i] * t).cos();
            e[(n + i, j)] = -(omegas[i] * t).sin();
        }
    }
    let p = RecoveryProblem::new(e, q)?;
    let result = if l <= n {
        least_squares(&p)?
    } else {
        basis_pursuit(&p, 1e-8)?
    };
    Ok(result.x_hat)
}

/// Thresholded layer list (reflectivity, depth) from recovered coefficients.
pub fn extract_layers(
    d: &CoefficientVector,
    c: &CoefficientVector,
    omegas: &[f64],
    depths: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let profile = layer_profile(d, c, omegas, depths)?;
    let peak = profile.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(profile
        .iter()
        .zip(depths)
        .filter(|(&r, _)| r.abs() > SUPPORT_THRESHOLD * peak)
        .map(|(&r, &t)| (r, t))
        .collect())
}

/// Artifacts beyond the result table: the first cell's coefficient pair
/// (ground truth, recovered) for the bar plot / coefficient CSV.
pub struct SweepArtifacts {
    pub coefficients: Option<(DVector<f64>, DVector<f64>)>,
}

/// Run the full (M, SNR, run) grid. The sparse ground truth is fixed by the
/// base seed; every run draws a fresh schedule; within a run the schedules
/// along the M axis are nested prefixes of one stream, the clean
/// measurements are shared across SNR levels, and the noise realization is
/// one standard-normal stream scaled per SNR.
pub fn monte_carlo_sweep(cfg: &ScenarioConfig) -> Result<(ResultTable, SweepArtifacts)> {
    cfg.validate()?;
    let m_list = cfg.m_list();
    let snrs = cfg.snr_list();
    let cells: Vec<(usize, usize)> = m_list
        .iter()
        .flat_map(|&m| (0..cfg.runs).map(move |i| (m, i)))
        .collect();
    let outcomes: Vec<Result<Vec<(ResultRow, Option<(DVector<f64>, DVector<f64>)>)>>> = cells
        .par_iter()
        .map(|&(m, run)| {
            let ms = measurements_for(cfg, m, run)?;
            let mut rows = Vec::with_capacity(snrs.len());
            for &snr in &snrs {
                let noise_seed = mix(cfg.seed.wrapping_add(run as u64), NOISE_SALT);
                let t0 = std::time::Instant::now();
                let (result, error) = solve_cell(cfg, &ms, snr, noise_seed)?;
                let runtime_ms = t0.elapsed().as_secs_f64() * 1e3;
                let keep = (run == 0).then(|| (ms.x_true.clone(), result.x_hat.clone()));
                rows.push((
                    ResultRow {
                        scenario: cfg.scenario.to_string(),
                        m,
                        snr_db: snr,
                        seed: cfg.seed.wrapping_add(run as u64),
                        scaled_error: error,
                        residual: result.residual,
                        runtime_ms,
                        status: result.status,
                    },
                    keep,
                ));
            }
            Ok(rows)
        })
        .collect();
    let mut table = ResultTable::default();
    let mut coefficients = None;
    for cell in outcomes {
        for (row, keep) in cell? {
            if coefficients.is_none() {
                coefficients = keep.clone();
            }
            table.rows.push(row);
        }
    }
    table.sort();
    Ok((table, SweepArtifacts { coefficients }))
}

/// Single-configuration run (`runs` Monte Carlo repetitions at one M).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(ResultTable, SweepArtifacts)> {
    if cfg.scenario == Scenario::Diagnostics {
        return Err(Error::Config(
            "the diagnostics scenario runs through `interfero diagnostics`".into(),
        ));
    }
    if cfg.m.is_none() && cfg.solver != SolverChoice::Ft {
        return Err(Error::Config(
            "`run` needs a single m (use `sweep` for m_sweep)".into(),
        ));
    }
    let mut single = cfg.clone();
    single.m = Some(cfg.m.unwrap_or(2 * cfg.n));
    single.m_sweep = None;
    monte_carlo_sweep(&single)
}

/// Diagnostics summaries (text report lines).
pub fn diagnostics_report(what: &str, seed: u64) -> Result<String> {
    match what {
        "isotropy" => {
            let n = 8;
            let trials = 100_000;
            let est = isotropy_estimate(n, trials, seed);
            let mut worst = 0.0_f64;
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((est[(i, j)] - target).abs());
                }
            }
            Ok(format!(
                "metric,value\nisotropy_max_abs_deviation,{worst:.6e}\ntrials,{trials}\nn,{n}\n"
            ))
        }
        "incoherence" => {
            let n = 64;
            let mut mu_max = 0.0_f64;
            for t in 0..1000 {
                let schedule = sample_delays_uniform(32, seed.wrapping_add(t), false);
                let a = build_block_matrix(&schedule, n, true);
                mu_max = mu_max.max(incoherence_parameter(&a));
            }
            let mut with_zero = sample_delays_uniform(31, seed, false);
            with_zero.values.push(0.0);
            let a0 = build_block_matrix(&DelaySchedule::explicit(with_zero.values), n, true);
            Ok(format!(
                "metric,value\nincoherence_max_over_1000_schedules,{mu_max:.12}\nincoherence_with_alpha_zero,{:.12}\n",
                incoherence_parameter(&a0)
            ))
        }
        "concentration" => {
            let n = 64;
            let x_half = sparse_ground_truth(n, 4, seed);
            let mut x = vec![0.0; 2 * n];
            for i in 0..n {
                x[i] = x_half[i];
            }
            let mut out = String::from("metric,m,value\n");
            for &m in &[16, 32, 64, 128, 256] {
                let est = empirical_concentration(&x, m, 2000, 0.5, seed);
                out.push_str(&format!(
                    "concentration_exceed_probability,{m},{:.4}\n",
                    est.exceed_probability
                ));
            }
            Ok(out)
        }
        "rip" => {
            let schedule = sample_delays_uniform(12, seed, false);
            let a = build_cosine_matrix(&schedule, 8, true);
            let delta = rip_constant_exhaustive(&a.entries, 2)?;
            Ok(format!("metric,value\nrip_delta_s2_n8_m12,{delta:.6}\n"))
        }
        other => Err(Error::Config(format!(
            "unknown diagnostic `{other}` (expected isotropy|incoherence|concentration|rip)"
        ))),
    }
}

/// Write the result table, coefficient table, and optional plots.
pub fn emit_outputs(
    table: &ResultTable,
    artifacts: &SweepArtifacts,
    cfg: &ScenarioConfig,
    out_dir: &Path,
    plots: bool,
) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let write = |name: &str, contents: &str, written: &mut Vec<String>| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path.display().to_string());
        Ok(())
    };
    let scenario = cfg.scenario.to_string();
    write(
        &format!("{scenario}_results.csv"),
        &table.to_csv(),
        &mut written,
    )?;
    if let Some((x_true, x_hat)) = &artifacts.coefficients {
        let mut csv = String::from("index,true,recovered\n");
        for i in 0..x_true.len().max(x_hat.len()) {
            let t = x_true.get(i).copied().unwrap_or(0.0);
            let h = x_hat.get(i).copied().unwrap_or(0.0);
            csv.push_str(&format!("{},{:.12e},{:.12e}\n", i + 1, t, h));
        }
        write(&format!("{scenario}_coefficients.csv"), &csv, &mut written)?;
    }
    if plots {
        let svg = error_plot_svg(table, &scenario);
        write(&format!("{scenario}_scaled_error.svg"), &svg, &mut written)?;
        if let Some((x_true, x_hat)) = &artifacts.coefficients {
            let svg = coefficient_plot_svg(x_true, x_hat, &scenario);
            write(&format!("{scenario}_coefficients.svg"), &svg, &mut written)?;
        }
    }
    Ok(written)
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Median scaled error vs M, one series per SNR, log-scale error axis.
fn error_plot_svg(table: &ResultTable, scenario: &str) -> String {
    let mut ms: Vec<usize> = table.rows.iter().map(|r| r.m).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut snrs: Vec<Option<f64>> = table.rows.iter().map(|r| r.snr_db).collect();
    snrs.sort_by(|a, b| {
        a.unwrap_or(f64::INFINITY)
            .partial_cmp(&b.unwrap_or(f64::INFINITY))
            .unwrap()
    });
    snrs.dedup();
    let mut series = Vec::new();
    for &snr in &snrs {
        let pts: Vec<(f64, f64)> = ms
            .iter()
            .filter_map(|&m| table.median_error(m, snr).map(|e| (m as f64, e.max(1e-16))))
            .collect();
        let label = match snr {
            None => "noise-free".to_string(),
            Some(v) => format!("{v} dB"),
        };
        series.push((label, pts));
    }
    let (x_min, x_max) = (
        ms.first().copied().unwrap_or(0) as f64,
        ms.last().copied().unwrap_or(1) as f64,
    );
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, pts) in &series {
        for &(_, e) in pts {
            lo = lo.min(e.log10());
            hi = hi.max(e.log10());
        }
    }
    if !lo.is_finite() {
        lo = -16.0;
        hi = 0.0;
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
    let sx = |m: f64| MARGIN + (m - x_min) / (x_max - x_min).max(1.0) * (PLOT_W - 2.0 * MARGIN);
    let sy = |e: f64| PLOT_H - MARGIN - (e.log10() - lo) / (hi - lo) * (PLOT_H - 2.0 * MARGIN);
    let mut svg = svg_header(scenario, "median scaled error vs M");
    // axes and log grid
    for d in (lo as i64)..=(hi as i64) {
        let y = sy(10f64.powi(d as i32));
        svg.push_str(&format!(
            "<line x1='{MARGIN}' y1='{y:.1}' x2='{:.1}' y2='{y:.1}' stroke='#ddd'/>\
             <text x='8' y='{:.1}' font-size='11'>1e{d}</text>\n",
            PLOT_W - MARGIN,
            y + 4.0
        ));
    }
    for &m in &ms {
        let x = sx(m as f64);
        svg.push_str(&format!(
            "<text x='{:.1}' y='{:.1}' font-size='11' text-anchor='middle'>{m}</text>\n",
            x,
            PLOT_H - MARGIN + 16.0
        ));
    }
    for (k, (label, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[k % SERIES_COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(m, e))| {
                format!(
                    "{}{:.1},{:.1}",
                    if i == 0 { "M" } else { "L" },
                    sx(m),
                    sy(e)
                )
            })
            .collect();
        svg.push_str(&format!(
            "<path d='{}' fill='none' stroke='{color}' stroke-width='1.5'/>\n",
            path.join("")
        ));
        svg.push_str(&format!(
            "<text x='{:.1}' y='{:.1}' font-size='12' fill='{color}'>{label}</text>\n",
            PLOT_W - MARGIN + 6.0,
            MARGIN + 16.0 * k as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Side-by-side bars: ground truth vs recovered coefficients.
fn coefficient_plot_svg(x_true: &DVector<f64>, x_hat: &DVector<f64>, scenario: &str) -> String {
    let k = x_true.len().max(x_hat.len());
    let peak = x_true
        .iter()
        .chain(x_hat.iter())
        .fold(1e-12_f64, |m, &v| m.max(v.abs()));
    let span = PLOT_W - 2.0 * MARGIN;
    let w = (span / k as f64 * 0.4).max(0.5);
    let sy = |v: f64| PLOT_H - MARGIN - v.abs() / peak * (PLOT_H - 2.0 * MARGIN);
    let mut svg = svg_header(scenario, "recovered vs true coefficients");
    for i in 0..k {
        let x0 = MARGIN + span * i as f64 / k as f64;
        let t = x_true.get(i).copied().unwrap_or(0.0);
        let h = x_hat.get(i).copied().unwrap_or(0.0);
        svg.push_str(&format!(
            "<rect x='{:.1}' y='{:.1}' width='{w:.1}' height='{:.1}' fill='#1f77b4'/>\
             <rect x='{:.1}' y='{:.1}' width='{w:.1}' height='{:.1}' fill='#d62728'/>\n",
            x0,
            sy(t),
            (PLOT_H - MARGIN - sy(t)).max(0.0),
            x0 + w,
            sy(h),
            (PLOT_H - MARGIN - sy(h)).max(0.0)
        ));
    }
    svg.push_str(&format!(
        "<text x='{MARGIN}' y='20' font-size='12' fill='#1f77b4'>true</text>\
         <text x='{:.1}' y='20' font-size='12' fill='#d62728'>recovered</text>\n</svg>\n",
        MARGIN + 50.0
    ));
    svg
}

fn svg_header(scenario: &str, subtitle: &str) -> String {
    format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{PLOT_W}' height='{PLOT_H}' \
         viewBox='0 0 {PLOT_W} {PLOT_H}' font-family='sans-serif'>\n\
         <rect width='100%' height='100%' fill='white'/>\n\
         <text x='{MARGIN}' y='30' font-size='14'>{scenario}: {subtitle}</text>\n\
         <line x1='{MARGIN}' y1='{:.1}' x2='{:.1}' y2='{:.1}' stroke='black'/>\n\
         <line x1='{MARGIN}' y1='{MARGIN}' x2='{MARGIN}' y2='{:.1}' stroke='black'/>\n",
        PLOT_H - MARGIN,
        PLOT_W - MARGIN,
        PLOT_H - MARGIN,
        PLOT_H - MARGIN
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(scenario: Scenario, solver: SolverChoice) -> ScenarioConfig {
        ScenarioConfig {
            scenario,
            solver,
            n: 64,
            n2: None,
            s: 4,
            m: Some(25),
            m_sweep: None,
            snr_db: vec![],
            runs: 1,
            seed: 7,
            lambda: None,
            debias: false,
            nonneg: false,
            layers: None,
            wavelength: 1.0,
            focal_length: 1.0,
            grid_points: None,
            grid_extent_sigmas: None,
            out_dir: None,
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let json = r#"{"scenario":"modal-ideal","solver":"bp","m":25,"bogus":1}"#;
        let parsed: std::result::Result<ScenarioConfig, _> = serde_json::from_str(json);
        assert!(parsed.is_err());
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        cfg.s = 100;
        assert!(cfg.validate().is_err());
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Ft);
        cfg.m = Some(25);
        assert!(cfg.validate().is_err());
        cfg.m = Some(128);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn ground_truth_normalized_and_sparse() {
        let x = sparse_ground_truth(64, 4, 3);
        assert!((x.norm() - 1.0).abs() < 1e-12);
        assert_eq!(x.iter().filter(|&&v| v > 0.0).count(), 4);
        assert!(x.iter().all(|&v| v >= 0.0));
        // deterministic
        let y = sparse_ground_truth(64, 4, 3);
        assert_eq!(x, y);
    }

    #[test]
    fn pipeline_consistency_analytic_scenarios() {
        // the measurements handed to the solver must equal A·x_true for
        // every analytic (non-field) scenario
        for (scenario, solver) in [
            (Scenario::ModalIdeal, SolverChoice::Bp),
            (Scenario::TwoD, SolverChoice::Bp),
            (Scenario::OctSparse, SolverChoice::Bp),
            (Scenario::Localization, SolverChoice::Ls),
        ] {
            let mut cfg = base_config(scenario, solver);
            if scenario == Scenario::TwoD {
                cfg.n = 10;
                cfg.m = Some(50);
            }
            if scenario == Scenario::OctSparse {
                cfg.s = 5;
                cfg.m = Some(60);
            }
            if scenario == Scenario::Localization {
                cfg.m = Some(8);
                cfg.s = 1;
            }
            let ms = measurements_for(&cfg, cfg.m.unwrap(), 0).unwrap();
            let predicted = &ms.a * &ms.x_true;
            for (i, &y) in ms.y.iter().enumerate() {
                assert!(
                    (y - predicted[i]).abs() < 1e-8,
                    "{scenario} measurement {i}: {y} vs {}",
                    predicted[i]
                );
            }
        }
    }

    #[test]
    fn modal_ideal_single_run_recovers() {
        let cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        let (table, artifacts) = run_scenario(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(
            table.rows[0].scaled_error <= 1e-4,
            "error {}",
            table.rows[0].scaled_error
        );
        assert!(artifacts.coefficients.is_some());
    }

    #[test]
    fn ft_run_exact() {
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Ft);
        cfg.m = Some(128);
        let (table, _) = run_scenario(&cfg).unwrap();
        assert!(table.rows[0].scaled_error <= 1e-10);
        assert_eq!(table.rows[0].m, 128);
    }

    #[test]
    fn oct_dense_chain_recovers_layers() {
        let mut cfg = base_config(Scenario::OctDense, SolverChoice::Ls);
        cfg.n = 16;
        cfg.layers = Some(10);
        cfg.m = Some(40);
        let (table, _) = run_scenario(&cfg).unwrap();
        assert!(
            table.rows[0].scaled_error <= 1e-16,
            "dense OCT chain error {}",
            table.rows[0].scaled_error
        );
    }

    #[test]
    fn extract_d_round_trip() {
        let omegas: Vec<f64> = (1..=6).map(|k| k as f64).collect();
        let basis = BasisSpec::FourierHarmonics {
            omegas,
            period: 2.0 * std::f64::consts::PI,
        };
        let c = CoefficientVector::new(
            basis.clone(),
            (0..6)
                .map(|i| Complex64::new(0.4 + 0.05 * i as f64, 0.1))
                .collect(),
        )
        .unwrap();
        let d = CoefficientVector::new(
            basis,
            (0..6)
                .map(|i| Complex64::new(0.2, -0.3 + 0.1 * i as f64))
                .collect(),
        )
        .unwrap();
        let mut x = DVector::zeros(12);
        for i in 0..6 {
            let g = c.values[i] * d.values[i].conj();
            x[i] = g.re;
            x[6 + i] = g.im;
        }
        let back = extract_d_coefficients(&x, &c).unwrap();
        for i in 0..6 {
            assert!((back.values[i] - d.values[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn extract_d_inconsistency_guard() {
        let basis = BasisSpec::FourierHarmonics {
            omegas: vec![1.0, 2.0],
            period: 2.0 * std::f64::consts::PI,
        };
        let c = CoefficientVector::new(
            basis,
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        )
        .unwrap();
        let x = DVector::from_vec(vec![0.3, 0.1, 0.0, 0.0]);
        assert!(matches!(
            extract_d_coefficients(&x, &c),
            Err(Error::InconsistentCoefficient { n: 1 })
        ));
    }

    #[test]
    fn extract_layers_single_layer() {
        let n = 8;
        let omegas: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        let basis = BasisSpec::FourierHarmonics {
            omegas: omegas.clone(),
            period: 2.0 * std::f64::consts::PI,
        };
        let amp = (1.0 / n as f64).sqrt();
        let c = CoefficientVector::new(basis, vec![Complex64::new(amp, 0.0); n]).unwrap();
        // single layer r = 1 at T = 0 → d = c
        let d = c.clone();
        let depths: Vec<f64> = (0..5).map(|k| k as f64 * 0.3).collect();
        let layers = extract_layers(&d, &c, &omegas, &depths).unwrap();
        assert_eq!(layers.len(), 1);
        assert!((layers[0].0 - 1.0).abs() < 1e-10);
        assert_eq!(layers[0].1, 0.0);
    }

    #[test]
    fn localization_delta_recovered() {
        let mut cfg = base_config(Scenario::Localization, SolverChoice::Ls);
        cfg.m = Some(8);
        cfg.s = 1;
        let (table, artifacts) = run_scenario(&cfg).unwrap();
        assert!(table.rows[0].scaled_error <= 1e-20);
        let (x_true, x_hat) = artifacts.coefficients.unwrap();
        let delta_true = x_true[1].atan2(x_true[0]);
        let delta_hat = x_hat[1].atan2(x_hat[0]);
        assert!((delta_true - delta_hat).abs() < 1e-10);
    }

    #[test]
    fn sweep_rows_sorted_and_deterministic() {
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        cfg.n = 16;
        cfg.s = 2;
        cfg.m = None;
        cfg.m_sweep = Some(vec![14, 10]);
        cfg.snr_db = vec![Some(25.0), None];
        cfg.runs = 3;
        let (t1, _) = monte_carlo_sweep(&cfg).unwrap();
        let (t2, _) = monte_carlo_sweep(&cfg).unwrap();
        assert_eq!(t1.rows.len(), 2 * 2 * 3);
        // sorted by (M, snr, seed), noise-free last within each M
        assert!(t1.rows[0].m == 10 && t1.rows[0].snr_db == Some(25.0));
        assert!(t1.rows[5].m == 10 && t1.rows[5].snr_db.is_none());
        assert!(t1.rows[6].m == 14);
        // identical modulo the runtime column
        for (a, b) in t1.rows.iter().zip(&t2.rows) {
            assert_eq!(a.scaled_error, b.scaled_error);
            assert_eq!(a.residual, b.residual);
            assert_eq!(a.seed, b.seed);
        }
    }

    #[test]
    fn fresh_schedule_per_run_fixed_truth() {
        let cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        let a = measurements_for(&cfg, 25, 0).unwrap();
        let b = measurements_for(&cfg, 25, 1).unwrap();
        assert_eq!(a.x_true, b.x_true);
        assert_ne!(a.schedule, b.schedule);
    }

    #[test]
    fn csv_header_and_shape() {
        let table = ResultTable {
            rows: vec![ResultRow {
                scenario: "modal-ideal".into(),
                m: 25,
                snr_db: None,
                seed: 7,
                scaled_error: 1e-9,
                residual: 1e-12,
                runtime_ms: 3.25,
                status: SolverStatus::Converged,
            }],
        };
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scenario,M,snr_db,seed,scaled_error,residual,runtime_ms,status"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("modal-ideal,25,inf,7,"));
        assert!(row.ends_with("converged"));
    }

    #[test]
    fn empty_table_csv_is_header_only() {
        let table = ResultTable::default();
        assert_eq!(
            table.to_csv(),
            "scenario,M,snr_db,seed,scaled_error,residual,runtime_ms,status\n"
        );
    }

    #[test]
    fn diagnostics_report_rip() {
        let report = diagnostics_report("rip", 1).unwrap();
        assert!(report.starts_with("metric,value\n"));
        let delta: f64 = report
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert!(delta > 0.0 && delta < 1.0);
        assert!(diagnostics_report("bogus", 1).is_err());
    }

    #[test]
    fn emit_outputs_writes_files() {
        let mut cfg = base_config(Scenario::ModalIdeal, SolverChoice::Bp);
        cfg.n = 16;
        cfg.s = 2;
        cfg.m = Some(12);
        let (table, artifacts) = run_scenario(&cfg).unwrap();
        let dir = std::env::temp_dir().join(format!("interfero-test-{}", std::process::id()));
        let files = emit_outputs(&table, &artifacts, &cfg, &dir, true).unwrap();
        assert!(files.iter().any(|f| f.ends_with("modal-ideal_results.csv")));
        assert!(files
            .iter()
            .any(|f| f.ends_with("modal-ideal_scaled_error.svg")));
        assert!(files
            .iter()
            .any(|f| f.ends_with("modal-ideal_coefficients.svg")));
        for f in &files {
            assert!(std::fs::metadata(f).unwrap().len() > 0);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn slm_field_measurements_close_to_ideal() {
        let mut cfg = base_config(Scenario::ModalSlm, SolverChoice::Bp);
        cfg.n = 16;
        cfg.s = 2;
        cfg.m = Some(12);
        cfg.grid_points = Some(512);
        let ms = measurements_for(&cfg, 12, 0).unwrap();
        let predicted = &ms.a * &ms.x_true;
        for (i, &y) in ms.y.iter().enumerate() {
            assert!(
                (y - predicted[i]).abs() < 1e-3,
                "slm measurement {i}: {y} vs {}",
                predicted[i]
            );
        }
    }
}
