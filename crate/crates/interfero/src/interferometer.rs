//! Two-arm interferometer simulation.
//!
//! The superposed output ψ_s = ψ_1 + ψ_2 of a reference arm (delayed by the
//! generalized delay of parameter α) and a sample arm is recorded as the
//! energy I(α) while α is swept. For coefficients c (source) and d (sample
//! arm output) in a shared basis,
//!
//! ```text
//!   I(α) = Σ|c_n|² + Σ|d_n|² + 2·Σ|c_n||d_n|·cos(nα + θ_n),
//!   θ_n = arg(c_n·d_n*),
//! ```
//!
//! and the normalized measurement y(α) = (I(α) − I₁ − I₂)/2 is linear in the
//! unknowns — the compressive-sensing data all downstream recovery runs on.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::basis::{analyze_field, synthesize_field, BasisSpec, CoefficientVector};
use crate::delay::{apply_frft_decomposed, apply_to_coefficients, diagonal_delay, OpticalParams};
use crate::error::{Error, Result};
use crate::grid::Field;

/// What the sample arm does to the source field.
#[derive(Debug, Clone)]
pub enum SampleArm {
    /// Pass-through: d = c (modal-analysis configuration).
    Identity,
    /// Weakly reflecting layered sample: first-order response
    /// h₂(t) = Σ_ℓ r_ℓ·δ(t − T_ℓ).
    Layered {
        reflectivities: Vec<f64>,
        round_trips: Vec<f64>,
    },
    /// Arbitrary diagonal response d_n = H_n·c_n.
    DiagonalResponse { gains: Vec<Complex64> },
}

impl SampleArm {
    pub fn layered(reflectivities: Vec<f64>, round_trips: Vec<f64>) -> Result<Self> {
        if reflectivities.is_empty() || reflectivities.len() != round_trips.len() {
            return Err(Error::DimensionMismatch(
                "layered sample needs equal, nonzero reflectivity/depth counts".into(),
            ));
        }
        if round_trips.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch(
                "layer round-trip times must be strictly increasing".into(),
            ));
        }
        if reflectivities.iter().any(|r| r.abs() > 1.0) {
            return Err(Error::DimensionMismatch("|r_ℓ| must be ≤ 1".into()));
        }
        Ok(SampleArm::Layered {
            reflectivities,
            round_trips,
        })
    }
}

/// Recorded interferogram: delay samples, energies, and (optionally) the
/// normalized linear measurements.
#[derive(Debug, Clone)]
pub struct Interferogram {
    pub delays: Vec<f64>,
    pub intensities: Vec<f64>,
    pub normalized: Option<Vec<f64>>,
    /// Arm energies I₁ (reference) and I₂ (sample).
    pub i1: f64,
    pub i2: f64,
}

impl Interferogram {
    fn check(self) -> Result<Self> {
        if self.delays.len() != self.intensities.len() || self.delays.is_empty() {
            return Err(Error::DimensionMismatch(
                "interferogram needs matching, nonempty delay/intensity lists".into(),
            ));
        }
        Ok(self)
    }
}

/// Closed-form interferogram from coefficient-domain arms.
pub fn analytic_interferogram(
    c: &CoefficientVector,
    d: &CoefficientVector,
    delays: &[f64],
) -> Result<Interferogram> {
    if c.basis != d.basis {
        return Err(Error::DimensionMismatch("arms use different bases".into()));
    }
    let i1 = c.energy();
    let i2 = d.energy();
    let terms: Vec<(f64, f64, f64)> = c
        .values
        .iter()
        .zip(&d.values)
        .enumerate()
        .map(|(k, (cn, dn))| {
            let n = (k + 1) as f64;
            (n, 2.0 * cn.norm() * dn.norm(), (cn * dn.conj()).arg())
        })
        .collect();
    let intensities: Vec<f64> = delays
        .iter()
        .map(|&a| {
            i1 + i2
                + terms
                    .iter()
                    .map(|&(n, m, th)| m * (n * a + th).cos())
                    .sum::<f64>()
        })
        .collect();
    Interferogram {
        delays: delays.to_vec(),
        intensities,
        normalized: None,
        i1,
        i2,
    }
    .check()
}

/// Which physical realization the reference arm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceArm {
    /// Ideal diagonal delay (exact eigenphases).
    Diagonal,
    /// Dense frFT kernel, applied with quarter-turn order decomposition.
    FrftKernel,
    /// Compensated three-SLM cascade, same decomposition.
    SlmCascade,
}

/// Field-level simulation: for each α, propagate the source through the
/// chosen reference arm, superpose with the sample arm output, and record
/// the discrete energy Δx·Σ|ψ_s|².
pub fn field_interferogram(
    input: &Field,
    arm: ReferenceArm,
    params: &OpticalParams,
    sample: &SampleArm,
    basis: &BasisSpec,
    delays: &[f64],
) -> Result<Interferogram> {
    let c = analyze_field(input, basis)?;
    let sample_out = sample_arm_output(&c, sample)?;
    let sample_field = synthesize_field(&sample_out, &input.grid)?;
    let i2 = sample_field.energy();
    let i1 = input.energy();
    let mut intensities = Vec::with_capacity(delays.len());
    for &alpha in delays {
        let delayed = match arm {
            ReferenceArm::Diagonal => {
                let dc = apply_to_coefficients(&diagonal_delay(basis.clone(), alpha), &c)?;
                synthesize_field(&dc, &input.grid)?
            }
            ReferenceArm::FrftKernel => apply_frft_decomposed(input, alpha, params, false)?,
            ReferenceArm::SlmCascade => apply_frft_decomposed(input, alpha, params, true)?,
        };
        let e: f64 = input.grid.dx()
            * delayed
                .values
                .iter()
                .zip(&sample_field.values)
                .map(|(a, b)| (a + b).norm_sqr())
                .sum::<f64>();
        intensities.push(e);
    }
    Interferogram {
        delays: delays.to_vec(),
        intensities,
        normalized: None,
        i1,
        i2,
    }
    .check()
}

/// Coefficient-domain action of the sample arm.
pub fn sample_arm_output(c: &CoefficientVector, sample: &SampleArm) -> Result<CoefficientVector> {
    match sample {
        SampleArm::Identity => Ok(c.clone()),
        SampleArm::Layered {
            reflectivities,
            round_trips,
        } => {
            let omegas = match &c.basis {
                BasisSpec::FourierHarmonics { omegas, .. } => omegas.clone(),
                // spatial bases: element n carries eigenfrequency n
                _ => (1..=c.basis.dim()).map(|n| n as f64).collect(),
            };
            let values = c
                .values
                .iter()
                .zip(&omegas)
                .map(|(cn, &w)| {
                    let h: Complex64 = reflectivities
                        .iter()
                        .zip(round_trips)
                        .map(|(&r, &t)| r * Complex64::from_polar(1.0, -w * t))
                        .sum();
                    cn * h
                })
                .collect();
            CoefficientVector::new(c.basis.clone(), values)
        }
        SampleArm::DiagonalResponse { gains } => {
            if gains.len() != c.values.len() {
                return Err(Error::DimensionMismatch("gain vector length".into()));
            }
            let values = c.values.iter().zip(gains).map(|(cn, h)| cn * h).collect();
            CoefficientVector::new(c.basis.clone(), values)
        }
    }
}

/// y(α_m) = (I(α_m) − I₁ − I₂)/2.
pub fn normalize_measurements(ig: &Interferogram) -> Vec<f64> {
    ig.intensities
        .iter()
        .map(|&i| 0.5 * (i - ig.i1 - ig.i2))
        .collect()
}

/// First-order layered-sample coefficients d_n = c_n·Σ_ℓ r_ℓ·e^{−jω_n T_ℓ}.
pub fn oct_sample_coefficients(
    c: &CoefficientVector,
    sample: &SampleArm,
    omegas: &[f64],
) -> Result<CoefficientVector> {
    let (reflectivities, round_trips) = match sample {
        SampleArm::Layered {
            reflectivities,
            round_trips,
        } => (reflectivities, round_trips),
        _ => {
            return Err(Error::IncompatibleRepr(
                "oct_sample_coefficients requires a layered sample".into(),
            ))
        }
    };
    if omegas.len() != c.values.len() {
        return Err(Error::DimensionMismatch("frequency list length".into()));
    }
    let values = c
        .values
        .iter()
        .zip(omegas)
        .map(|(cn, &w)| {
            let h: Complex64 = reflectivities
                .iter()
                .zip(round_trips)
                .map(|(&r, &t)| r * Complex64::from_polar(1.0, -w * t))
                .sum();
            cn * h
        })
        .collect();
    CoefficientVector::new(c.basis.clone(), values)
}

/// Add white Gaussian measurement noise at the given SNR (dB), defined
/// against the expected unnormalized measurement energy:
/// σ² = xᵀE[AᵀA]x / 10^(SNR/10) = (M/2)·‖x‖² / 10^(SNR/10) for delays
/// uniform on [0, 2π). `None` means noise-free.
pub fn add_noise<R: Rng>(y: &[f64], x_norm_sq: f64, snr_db: Option<f64>, rng: &mut R) -> Vec<f64> {
    match snr_db {
        None => y.to_vec(),
        Some(snr) => {
            let m = y.len() as f64;
            let sigma_sq = (m / 2.0) * x_norm_sq / 10f64.powf(snr / 10.0);
            let normal = Normal::new(0.0, sigma_sq.sqrt()).expect("finite sigma");
            y.iter().map(|&v| v + normal.sample(rng)).collect()
        }
    }
}

/// Noise standard deviation per measurement, unnormalized convention.
pub fn noise_sigma_unnormalized(m: usize, x_norm_sq: f64, snr_db: f64) -> f64 {
    ((m as f64 / 2.0) * x_norm_sq / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// 2D (cascaded-transform) interferogram: delays sweep a pair (α₁, α₂) with
/// y(α₁,α₂) = Σ_{n,m}|c_{nm}||d_{nm}|·cos(nα₁ + mα₂ + θ_{nm}), d = c.
pub fn analytic_interferogram_2d(
    c: &CoefficientVector,
    delay_pairs: &[(f64, f64)],
) -> Result<Interferogram> {
    let basis = &c.basis;
    let dim = basis.dim();
    let mut terms = Vec::with_capacity(dim);
    for (flat, cv) in c.values.iter().enumerate() {
        let (n, m) = basis.unflatten_2d(flat)?;
        terms.push((n as f64, m as f64, cv.norm_sqr()));
    }
    let i1 = c.energy();
    let intensities: Vec<f64> = delay_pairs
        .iter()
        .map(|&(a1, a2)| {
            2.0 * i1
                + 2.0
                    * terms
                        .iter()
                        .map(|&(n, m, p)| p * (n * a1 + m * a2).cos())
                        .sum::<f64>()
        })
        .collect();
    Ok(Interferogram {
        delays: delay_pairs.iter().map(|&(a1, _)| a1).collect(),
        intensities,
        normalized: None,
        i1,
        i2: i1,
    })
}

/// Two-frequency source localization (heterodyne demonstration): from two
/// monochromatic sources at frequencies ω₁, ω₂ and distances d₁, d₂, the
/// sampled beat signal is linear in x = [|a₁||a₂|cos Δ, |a₁||a₂|sin Δ] with
/// Δ = (ω₂d₂ − ω₁d₁)/c. Returns (y, A rows, ground-truth x).
#[allow(clippy::too_many_arguments)]
pub fn localization_measurements(
    a1: Complex64,
    a2: Complex64,
    omega1: f64,
    omega2: f64,
    d1: f64,
    d2: f64,
    c_light: f64,
    samples: &[f64],
) -> (Vec<f64>, Vec<[f64; 2]>, [f64; 2]) {
    let delta = (omega2 * d2 - omega1 * d1) / c_light;
    let amp = a1.norm() * a2.norm();
    let x = [amp * delta.cos(), amp * delta.sin()];
    let rows: Vec<[f64; 2]> = samples
        .iter()
        .map(|&t| {
            let w = (omega1 - omega2) * t;
            [w.cos(), -w.sin()]
        })
        .collect();
    let y = rows.iter().map(|r| r[0] * x[0] + r[1] * x[1]).collect();
    (y, rows, x)
}
