//! Modal analysis of a sparse Hermite-Gaussian beam: recover the modal
//! energies from M = 25 random interferometric measurements with basis
//! pursuit, and compare against the 2N-point Nyquist FT baseline.

use interfero::experiments::sparse_ground_truth;
use interfero::sensing::{build_cosine_matrix, nyquist_schedule, sample_delays_uniform};
use interfero::solvers::{basis_pursuit, ft_baseline, recovery_error, RecoveryProblem};

fn main() -> interfero::Result<()> {
    let n = 64;
    let s = 4;
    let seed = 42;
    let x = sparse_ground_truth(n, s, seed);
    println!(
        "true support: {:?}",
        x.iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, _)| i + 1)
            .collect::<Vec<_>>()
    );

    // compressive approach: 25 random delays, basis pursuit
    let m = 25;
    let schedule = sample_delays_uniform(m, seed, false);
    let a = build_cosine_matrix(&schedule, n, false);
    let y = &a.entries * &x;
    let problem = RecoveryProblem::new(a.entries, y)?;
    let bp = basis_pursuit(&problem, 1e-10)?;
    println!(
        "basis pursuit, M = {m}: scaled error {:.3e}, {} iterations",
        recovery_error(&x, &bp.x_hat)?,
        bp.iterations
    );

    // FT baseline: needs the full 2N-point uniform schedule
    let nyquist = nyquist_schedule(n);
    let a_full = build_cosine_matrix(&nyquist, n, false);
    let y_full: Vec<f64> = (&a_full.entries * &x).iter().copied().collect();
    let ft = ft_baseline(&y_full, &nyquist.values, n)?;
    println!(
        "FT baseline,   M = {}: scaled error {:.3e}",
        2 * n,
        recovery_error(&x, &ft.x_hat)?
    );
    Ok(())
}
