//! Compressive OCT: L = 100 candidate layers, only s = 5 reflective.
//! Basis pursuit over the depth dictionary recovers the reflectivity
//! profile from M = 60 interferometric measurements.

use interfero::basis::{BasisSpec, CoefficientVector};
use interfero::experiments::sparse_ground_truth;
use interfero::interferometer::{
    analytic_interferogram, normalize_measurements, oct_sample_coefficients, SampleArm,
};
use interfero::sensing::{build_oct_dictionary, sample_delays_uniform};
use interfero::solvers::{basis_pursuit, recovery_error, RecoveryProblem};
use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> interfero::Result<()> {
    let n = 64;
    let l = 100;
    let s = 5;
    let m = 60;
    let omegas: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let depths: Vec<f64> = (0..l).map(|k| k as f64 * PI / n as f64).collect();
    let basis = BasisSpec::FourierHarmonics {
        omegas: omegas.clone(),
        period: 2.0 * PI,
    };
    let amp = (1.0 / n as f64).sqrt();
    let c = CoefficientVector::new(basis, vec![Complex64::new(amp, 0.0); n])?;

    let r = sparse_ground_truth(l, s, 11);
    let layers: Vec<(f64, f64)> = r
        .iter()
        .zip(&depths)
        .filter(|(&rv, _)| rv > 0.0)
        .map(|(&rv, &t)| (rv, t))
        .collect();
    println!("true layers (r, T): {layers:.4?}");

    let sample = SampleArm::layered(
        layers.iter().map(|&(rv, _)| rv).collect(),
        layers.iter().map(|&(_, t)| t).collect(),
    )?;
    let d = oct_sample_coefficients(&c, &sample, &omegas)?;
    let schedule = sample_delays_uniform(m, 11, false);
    let ig = analytic_interferogram(&c, &d, &schedule.values)?;
    let y = normalize_measurements(&ig);

    let spectrum = vec![amp * amp; n];
    let dict = build_oct_dictionary(&spectrum, &omegas, &schedule, &depths)?;
    let problem = RecoveryProblem::new(dict.entries, DVector::from_vec(y))?;
    let result = basis_pursuit(&problem, 1e-10)?;
    println!("recovered support: {:?}", result.support);
    println!("scaled error: {:.3e}", recovery_error(&r, &result.x_hat)?);
    Ok(())
}
