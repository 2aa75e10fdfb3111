//! Recovery in noise with the LASSO and the Dantzig selector, on the
//! √(2/M)-normalized measurement system. Shows the literal λ = 10√log(2N)
//! default (which over-shrinks at these problem sizes), a calibrated λ,
//! the nonnegativity constraint, and the least-squares debias refit.

use interfero::experiments::sparse_ground_truth;
use interfero::interferometer::noise_sigma_unnormalized;
use interfero::sensing::{build_cosine_matrix, sample_delays_uniform};
use interfero::solvers::{
    dantzig_selector, debias_on_support, lasso_default_lambda, lasso_with_lambda, recovery_error,
    RecoveryProblem,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> interfero::Result<()> {
    let (n, s, m, snr_db) = (64, 4, 40, 20.0);
    let x = sparse_ground_truth(n, s, 9);
    let schedule = sample_delays_uniform(m, 9, false);
    let a = build_cosine_matrix(&schedule, n, false);

    // noisy measurements at the aggregate SNR definition, then normalize
    let sigma = noise_sigma_unnormalized(m, x.norm_squared(), snr_db);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let gauss = Normal::new(0.0, sigma).unwrap();
    let scale = (2.0 / m as f64).sqrt();
    let y_hat = (&a.entries * &x).map(|v| scale * (v + gauss.sample(&mut rng)));
    let a_hat = &a.entries * scale;
    let sigma_hat = scale * sigma;

    let mut problem = RecoveryProblem::new(a_hat.clone(), y_hat.clone())?;
    problem.noise_sigma = Some(sigma_hat);

    let lam_default = lasso_default_lambda(n);
    let lasso_lit = lasso_with_lambda(&problem, lam_default)?;
    println!(
        "LASSO λ = {lam_default:.1} (literal default): error {:.3}, ‖x̂‖₀ = {}",
        recovery_error(&x, &lasso_lit.x_hat)?,
        lasso_lit.support.len()
    );
    let lasso_cal = lasso_with_lambda(&problem, 0.1)?;
    println!(
        "LASSO λ = 0.1 (calibrated):        error {:.3}",
        recovery_error(&x, &lasso_cal.x_hat)?
    );

    let dantzig = dantzig_selector(&problem, 2.0)?;
    println!(
        "Dantzig λ = 2:                     error {:.3}",
        recovery_error(&x, &dantzig.x_hat)?
    );
    problem.nonneg = true;
    let dantzig_nn = dantzig_selector(&problem, 2.0)?;
    let refit = debias_on_support(&a_hat, &y_hat, &dantzig_nn.support, true)?;
    println!(
        "Dantzig λ = 2, x ≥ 0:              error {:.3}, debiased {:.3}",
        recovery_error(&x, &dantzig_nn.x_hat)?,
        recovery_error(&x, &refit)?
    );
    Ok(())
}
