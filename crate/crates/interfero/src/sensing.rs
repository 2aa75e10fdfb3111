//! Constrained sensing matrices and their recoverability diagnostics.
//!
//! The interferometer fixes the *structure* of every measurement row — only
//! the delays α_m are free. With unknowns split into
//! x₁ = [|c_n||d_n|cos θ_n] and x₂ = [|c_n||d_n|sin θ_n], the normalized
//! measurements obey y = A·x with the block matrix
//!
//! ```text
//!   A = [A₁ A₂],  A₁ = [cos(nα_m)],  A₂ = [−sin(nα_m)],
//! ```
//!
//! reducing to the cosine-only matrix when θ ≡ 0 (modal analysis) and to a
//! reflectivity dictionary B_{mℓ} = Σ_n |c_n|²cos(ω_n(τ_m + T_ℓ)) for
//! layered OCT samples. Rows drawn with α_m ~ U[0,2π) make √2·â_m isotropic
//! and incoherent with parameter μ = 2, and the resulting normalized matrix
//! Â = √(2/M)·A concentrates ‖Âx‖² around ‖x‖² — the diagnostics here
//! measure all three properties empirically.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Delay samples α_m together with how they were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySchedule {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    UniformRandom { seed: u64 },
    NyquistGrid,
    Explicit,
}

impl DelaySchedule {
    pub fn explicit(values: Vec<f64>) -> Self {
        Self {
            values,
            provenance: Provenance::Explicit,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// M i.i.d. draws from U[0, 2π). With `avoid_singular`, draws within 1e-3 of
/// a multiple of π are redrawn — required when the schedule will drive a
/// dense-kernel frFT arm; leave it off for matrix-only scenarios so the
/// sampling distribution stays exactly uniform.
pub fn sample_delays_uniform(m: usize, seed: u64, avoid_singular: bool) -> DelaySchedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(m);
    while values.len() < m {
        let a = rng.gen_range(0.0..2.0 * PI);
        if avoid_singular && (a.sin().abs() < 1e-3) {
            continue;
        }
        values.push(a);
    }
    DelaySchedule {
        values,
        provenance: Provenance::UniformRandom { seed },
    }
}

/// The 2N-point uniform Nyquist schedule α_m = 2π(m−1)/(2N).
pub fn nyquist_schedule(n: usize) -> DelaySchedule {
    let m = 2 * n;
    let values = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    DelaySchedule {
        values,
        provenance: Provenance::NyquistGrid,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixKind {
    /// [A₁ A₂] with K = 2N.
    BlockCosSin { n: usize },
    /// Cosine-only, K = N.
    CosineOnly { n: usize },
    /// OCT reflectivity dictionary, K = L candidate depths.
    OctDictionary { depths: Vec<f64> },
    /// 2D cosine matrix over flat (n,m) indices.
    TwoD { n1: usize, n2: usize },
}

/// Real M×K measurement matrix with provenance.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    pub entries: DMatrix<f64>,
    pub kind: MatrixKind,
    pub normalized: bool,
    pub schedule: DelaySchedule,
}

impl SensingMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// √(2/M)-scaled copy (idempotent).
    pub fn normalized(&self) -> SensingMatrix {
        if self.normalized {
            return self.clone();
        }
        let s = (2.0 / self.rows() as f64).sqrt();
        SensingMatrix {
            entries: &self.entries * s,
            kind: self.kind.clone(),
            normalized: true,
            schedule: self.schedule.clone(),
        }
    }

    /// CSV export: header line with kind/provenance, then row-major entries.
    pub fn to_csv(&self) -> String {
        let kind = match &self.kind {
            MatrixKind::BlockCosSin { n } => format!("block_cos_sin,N={n}"),
            MatrixKind::CosineOnly { n } => format!("cosine_only,N={n}"),
            MatrixKind::OctDictionary { depths } => format!("oct_dictionary,L={}", depths.len()),
            MatrixKind::TwoD { n1, n2 } => format!("two_d,N1={n1},N2={n2}"),
        };
        let prov = match &self.schedule.provenance {
            Provenance::UniformRandom { seed } => format!("uniform_random,seed={seed}"),
            Provenance::NyquistGrid => "nyquist_grid".to_string(),
            Provenance::Explicit => "explicit".to_string(),
        };
        let mut out = format!(
            "# kind={kind},normalized={},schedule={prov},M={},K={}\n",
            self.normalized,
            self.rows(),
            self.cols()
        );
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| format!("{:.17e}", self.entries[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A = [cos(nα_m) | −sin(nα_m)], M×2N.
pub fn build_block_matrix(schedule: &DelaySchedule, n: usize, normalized: bool) -> SensingMatrix {
    let m = schedule.len();
    let mut entries = DMatrix::zeros(m, 2 * n);
    for (i, &a) in schedule.values.iter().enumerate() {
        for k in 1..=n {
            let na = k as f64 * a;
            entries[(i, k - 1)] = na.cos();
            entries[(i, n + k - 1)] = -na.sin();
        }
    }
    if normalized {
        entries *= (2.0 / m as f64).sqrt();
    }
    SensingMatrix {
        entries,
        kind: MatrixKind::BlockCosSin { n },
        normalized,
        schedule: schedule.clone(),
    }
}

/// A = [cos(nα_m)], M×N.
pub fn build_cosine_matrix(schedule: &DelaySchedule, n: usize, normalized: bool) -> SensingMatrix {
    let m = schedule.len();
    let mut entries = DMatrix::zeros(m, n);
    for (i, &a) in schedule.values.iter().enumerate() {
        for k in 1..=n {
            entries[(i, k - 1)] = (k as f64 * a).cos();
        }
    }
    if normalized {
        entries *= (2.0 / m as f64).sqrt();
    }
    SensingMatrix {
        entries,
        kind: MatrixKind::CosineOnly { n },
        normalized,
        schedule: schedule.clone(),
    }
}

/// OCT reflectivity dictionary B_{mℓ} = Σ_n p_n·cos(ω_n(τ_m + T_ℓ)) with
/// p_n = |c_n|² the known source spectrum.
///
/// Derivation (two lines, from the first-order layered model): substituting
/// d_n = c_n·Σ_ℓ r_ℓ e^{−jω_n T_ℓ} into y(τ_m) = Σ_n Re[|c_n||d_n|e^{j(ω_n τ_m + θ_n)}]
/// gives y(τ_m) = Σ_ℓ r_ℓ·Σ_n |c_n|²cos(ω_n(τ_m + T_ℓ)) — linear in r.
pub fn build_oct_dictionary(
    spectrum: &[f64],
    omegas: &[f64],
    schedule: &DelaySchedule,
    depths: &[f64],
) -> Result<SensingMatrix> {
    if spectrum.len() != omegas.len() {
        return Err(Error::DimensionMismatch(
            "spectrum/frequency lengths differ".into(),
        ));
    }
    let m = schedule.len();
    let l = depths.len();
    let mut entries = DMatrix::zeros(m, l);
    for (i, &tau) in schedule.values.iter().enumerate() {
        for (j, &t) in depths.iter().enumerate() {
            entries[(i, j)] = spectrum
                .iter()
                .zip(omegas)
                .map(|(&p, &w)| p * (w * (tau + t)).cos())
                .sum();
        }
    }
    Ok(SensingMatrix {
        entries,
        kind: MatrixKind::OctDictionary {
            depths: depths.to_vec(),
        },
        normalized: false,
        schedule: schedule.clone(),
    })
}

/// 2D cosine matrix: row k, flat column (n,m) ↦ cos(n·α1_k + m·α2_k).
pub fn build_2d_cosine_matrix(pairs: &[(f64, f64)], n1: usize, n2: usize) -> SensingMatrix {
    let m = pairs.len();
    let mut entries = DMatrix::zeros(m, n1 * n2);
    for (i, &(a1, a2)) in pairs.iter().enumerate() {
        for n in 1..=n1 {
            for mm in 1..=n2 {
                entries[(i, (n - 1) * n2 + (mm - 1))] = (n as f64 * a1 + mm as f64 * a2).cos();
            }
        }
    }
    SensingMatrix {
        entries,
        kind: MatrixKind::TwoD { n1, n2 },
        normalized: false,
        schedule: DelaySchedule::explicit(pairs.iter().map(|&(a, _)| a).collect()),
    }
}

/// Outcome of the concentration experiment.
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationEstimate {
    /// Fraction of trials with |‖Âx‖² − ‖x‖²| ≥ ε‖x‖².
    pub exceed_probability: f64,
    /// Monte Carlo mean of ‖Âx‖².
    pub mean_energy: f64,
}

/// Empirical concentration of ‖Âx‖² for a fixed vector x ∈ R^{2N} over
/// fresh normalized block matrices.
pub fn empirical_concentration(
    x: &[f64],
    m: usize,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> ConcentrationEstimate {
    let n = x.len() / 2;
    assert_eq!(x.len(), 2 * n, "x must have even length 2N");
    let x_norm_sq: f64 = x.iter().map(|v| v * v).sum();
    let results: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let schedule = sample_delays_uniform(m, seed.wrapping_add(t as u64), false);
            let a = build_block_matrix(&schedule, n, true);
            let mut energy = 0.0;
            for i in 0..m {
                let mut row = 0.0;
                for j in 0..2 * n {
                    row += a.entries[(i, j)] * x[j];
                }
                energy += row * row;
            }
            (energy, (energy - x_norm_sq).abs() >= epsilon * x_norm_sq)
        })
        .collect();
    let mean_energy = results.iter().map(|r| r.0).sum::<f64>() / trials as f64;
    let exceeded = results.iter().filter(|r| r.1).count();
    ConcentrationEstimate {
        exceed_probability: exceeded as f64 / trials as f64,
        mean_energy,
    }
}

/// Monte Carlo isotropy check: average of (√2·a)ᵀ(√2·a) over random rows
/// a = [cos(nα) | −sin(nα)]; approaches I as trials grow.
pub fn isotropy_estimate(n: usize, trials: usize, seed: u64) -> DMatrix<f64> {
    let k = 2 * n;
    let chunk = |lo: usize, hi: usize, s: u64| -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut acc = DMatrix::zeros(k, k);
        let mut row = vec![0.0; k];
        for _ in lo..hi {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            for j in 1..=n {
                let ja = j as f64 * a;
                row[j - 1] = ja.cos() * std::f64::consts::SQRT_2;
                row[n + j - 1] = -ja.sin() * std::f64::consts::SQRT_2;
            }
            for i in 0..k {
                for j in i..k {
                    acc[(i, j)] += row[i] * row[j];
                }
            }
        }
        acc
    };
    // deterministic reduction: fixed worker count and ordered sum
    let workers = 8.min(trials.max(1));
    let per = trials / workers;
    let mats: Vec<DMatrix<f64>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let lo = w * per;
            let hi = if w == workers - 1 { trials } else { lo + per };
            chunk(lo, hi, seed.wrapping_add(w as u64))
        })
        .collect();
    let mut total = DMatrix::zeros(k, k);
    for m in mats {
        total += m;
    }
    total /= trials as f64;
    // symmetrize (only the upper triangle was accumulated)
    for i in 0..k {
        for j in 0..i {
            total[(i, j)] = total[(j, i)];
        }
    }
    total
}

/// Incoherence parameter μ = max squared entry of the √M-scaled normalized
/// matrix (= 2·max|entry|² of the unnormalized one). Structurally ≤ 2 for
/// the cos/sin kinds, with equality whenever the schedule contains α = 0.
pub fn incoherence_parameter(matrix: &SensingMatrix) -> f64 {
    let a = matrix.normalized();
    let m = a.rows() as f64;
    let mut mu = 0.0_f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            mu = mu.max(m * a.entries[(i, j)] * a.entries[(i, j)]);
        }
    }
    mu
}

/// Exhaustive restricted-isometry constant over all s-column submatrices:
/// δ = max over supports of max(1 − λ_min, λ_max − 1) of the support Gram
/// matrix eigenvalues. Only for K ≤ 16.
pub fn rip_constant_exhaustive(a: &DMatrix<f64>, s: usize) -> Result<f64> {
    let k = a.ncols();
    if k > 16 {
        return Err(Error::SizeTooLarge { cols: k });
    }
    if s == 0 || s > k {
        return Err(Error::DimensionMismatch(format!(
            "sparsity {s} outside 1..{k}"
        )));
    }
    let mut delta = 0.0_f64;
    let mut support = (0..s).collect::<Vec<usize>>();
    loop {
        let sub = a.select_columns(support.iter());
        let gram = sub.transpose() * &sub;
        let eig = gram.symmetric_eigen().eigenvalues;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &e in eig.iter() {
            lo = lo.min(e);
            hi = hi.max(e);
        }
        delta = delta.max((1.0 - lo).max(hi - 1.0));
        // next s-combination of 0..k
        let mut i = s;
        loop {
            if i == 0 {
                return Ok(delta);
            }
            i -= 1;
            if support[i] != i + k - s {
                support[i] += 1;
                for j in i + 1..s {
                    support[j] = support[j - 1] + 1;
                }
                break;
            }
        }
    }
}
