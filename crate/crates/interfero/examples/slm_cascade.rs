//! Physics of the fractional Fourier transform reference arm: the HG modes
//! are eigenfunctions with eigenvalues e^{−jnα}, and the three-SLM cascade
//! (SLM, free-space Fresnel hop, SLM, hop, SLM) realizes the same kernel.

use interfero::basis::hermite_gaussian_mode;
use interfero::delay::{
    apply_frft_fast, apply_to_field, frft_kernel, slm_cascade_frft, DelayOperator, OpticalParams,
};
use interfero::grid::Grid;
use num_complex::Complex64;

fn main() -> interfero::Result<()> {
    let params = OpticalParams::new(1.0, 1.0)?;
    let sigma = params.sigma();
    let grid = Grid::new(-12.0 * sigma, 12.0 * sigma, 1024)?;
    let alpha = 1.0_f64;

    // eigenfunction check: frFT(φ_n) = e^{−jnα} φ_n
    for n in [1_usize, 4, 16] {
        let mode = hermite_gaussian_mode(n, sigma, &grid)?;
        let out = apply_frft_fast(&mode, alpha, &params, false)?;
        let expected = Complex64::from_polar(1.0, -(n as f64) * alpha);
        let err: f64 = mode
            .values
            .iter()
            .zip(&out.values)
            .map(|(a, b)| (b - expected * a).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * grid.dx().sqrt();
        println!("HG_{n}: ‖frFT(φ) − e^(−jnα)φ‖ = {err:.2e}");
    }

    // cascade equivalence: max modulus difference between the composed
    // SLM/Fresnel kernel and the direct frFT kernel
    let direct = frft_kernel(alpha, &grid, &params)?;
    let cascade = slm_cascade_frft(alpha, &params, &grid)?;
    if let (DelayOperator::Kernel { matrix: k1, .. }, DelayOperator::Kernel { matrix: k2, .. }) =
        (&direct, &cascade)
    {
        let worst = k1
            .iter()
            .zip(k2.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        println!("cascade vs direct kernel: max |Δ| = {worst:.2e}");
    }

    // and the cascade acts identically on a field
    let mode = hermite_gaussian_mode(3, sigma, &grid)?;
    let via_direct = apply_to_field(&direct, &mode)?;
    let via_cascade = apply_to_field(&cascade, &mode)?;
    let diff: f64 = via_direct
        .values
        .iter()
        .zip(&via_cascade.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
        * grid.dx().sqrt();
    println!("field through cascade vs direct: ‖Δ‖ = {diff:.2e}");
    Ok(())
}
