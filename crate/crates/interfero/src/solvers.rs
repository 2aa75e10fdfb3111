//! Sparse and dense recovery from interferometric measurements.
//!
//! Basis pursuit and LASSO run on an alternating-direction operator
//! splitting (augmented-Lagrangian form): penalty ρ = 1, over-relaxation
//! 1.5, absolute/relative stopping tolerances 1e-8/1e-6, iteration cap
//! 50,000. The Dantzig selector is exactly a linear program after the
//! x = x⁺ − x⁻ split and is solved by a self-contained two-phase dense
//! simplex with Bland's rule. The FT baseline inverts the 2N-point Nyquist
//! interferogram by direct DFT; the exhaustive oracle enumerates supports
//! and cross-validates everything else.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const RHO: f64 = 1.0;
const RELAX: f64 = 1.5;
const ABSTOL: f64 = 1e-8;
const RELTOL: f64 = 1e-6;
const MAX_ITER: usize = 50_000;
/// Reported support: |x̂_i| > 1e-4·‖x̂‖_∞.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

/// Measurement system handed to a solver. `a` is whatever normalization the
/// caller chose; LASSO/Dantzig expect the √(2/M) convention with
/// `noise_sigma` in the same scale.
#[derive(Debug, Clone)]
pub struct RecoveryProblem {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub noise_sigma: Option<f64>,
    /// Project iterates onto the nonnegative orthant (modal energies and
    /// reflectivities are physically nonnegative). Off by default.
    pub nonneg: bool,
}

impl RecoveryProblem {
    pub fn new(a: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrix rows vs {} measurements",
                a.nrows(),
                y.len()
            )));
        }
        Ok(Self {
            a,
            y,
            noise_sigma: None,
            nonneg: false,
        })
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = Some(sigma);
        self
    }

    pub fn with_nonneg(mut self) -> Self {
        self.nonneg = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    MaxIter,
    Infeasible,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverStatus::Converged => write!(f, "converged"),
            SolverStatus::MaxIter => write!(f, "max_iter"),
            SolverStatus::Infeasible => write!(f, "infeasible"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub x_hat: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub status: SolverStatus,
    pub support: Vec<usize>,
}

impl RecoveryResult {
    fn finish(
        a: &DMatrix<f64>,
        y: &DVector<f64>,
        x: DVector<f64>,
        iterations: usize,
        status: SolverStatus,
    ) -> Self {
        let residual = (a * &x - y).norm();
        let support = extract_support(&x);
        Self {
            x_hat: x,
            residual,
            iterations,
            status,
            support,
        }
    }
}

/// Indices with |x_i| above the relative support threshold.
pub fn extract_support(x: &DVector<f64>) -> Vec<usize> {
    let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Vec::new();
    }
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > SUPPORT_THRESHOLD * peak)
        .map(|(i, _)| i)
        .collect()
}

/// Scaled recovery error ‖x − x̂‖²/‖x‖².
pub fn recovery_error(x_true: &DVector<f64>, x_hat: &DVector<f64>) -> Result<f64> {
    if x_true.len() != x_hat.len() {
        return Err(Error::DimensionMismatch(
            "recovery_error length mismatch".into(),
        ));
    }
    let denom = x_true.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((x_true - x_hat).norm_squared() / denom)
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// ℓ1 minimization subject to Ax = y (to solver tolerance), by splitting
/// with projection onto the affine constraint set.
pub fn basis_pursuit(problem: &RecoveryProblem, tol: f64) -> Result<RecoveryResult> {
    let a = &problem.a;
    let y = &problem.y;
    let (m, k) = (a.nrows(), a.ncols());
    // x-update projects onto {x : Ax = y}: x = v − A⁺(Av − y). The
    // pseudo-inverse (SVD with relative rank cutoff) keeps the projection
    // stable when measurement rows are nearly dependent, which random
    // schedules do produce once M approaches the column count.
    let svd = a.clone().svd(true, true);
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(v));
    let cutoff = 1e-12 * smax.max(1.0);
    let project = |v: &DVector<f64>| -> DVector<f64> {
        let r = a * v - y;
        let correction = svd.solve(&r, cutoff).expect("SVD factors requested");
        v - correction
    };
    // feasibility check: the projection of 0 must reproduce y
    let x0 = project(&DVector::zeros(k));
    let y_norm = y.norm().max(1.0);
    if (a * &x0 - y).norm() > tol.max(1e-8) * y_norm {
        return Ok(RecoveryResult::finish(
            a,
            y,
            x0,
            0,
            SolverStatus::Infeasible,
        ));
    }
    let mut z = DVector::<f64>::zeros(k);
    let mut u = DVector::<f64>::zeros(k);
    let sqrt_k = (k as f64).sqrt();
    for it in 1..=MAX_ITER {
        let x = project(&(&z - &u));
        let x_relaxed = RELAX * &x + (1.0 - RELAX) * &z;
        let z_old = z.clone();
        let w = &x_relaxed + &u;
        z = w.map(|v| {
            let s = soft_threshold(v, 1.0 / RHO);
            if problem.nonneg {
                s.max(0.0)
            } else {
                s
            }
        });
        u += &x_relaxed - &z;
        let r_norm = (&x - &z).norm();
        let s_norm = RHO * (&z - &z_old).norm();
        let eps_pri = sqrt_k * ABSTOL + RELTOL * x.norm().max(z.norm());
        let eps_dual = sqrt_k * ABSTOL + RELTOL * RHO * u.norm();
        if r_norm < eps_pri && s_norm < eps_dual {
            // final answer from the feasible side of the splitting
            let x_final = project(&z);
            let _ = m;
            return Ok(RecoveryResult::finish(
                a,
                y,
                x_final,
                it,
                SolverStatus::Converged,
            ));
        }
    }
    let x_final = project(&z);
    Ok(RecoveryResult::finish(
        a,
        y,
        x_final,
        MAX_ITER,
        SolverStatus::MaxIter,
    ))
}

/// LASSO weight λ = 10·√(log 2N): the theory-prescribed default. At
/// interferometric noise levels this weight exceeds ‖Âᵀy‖_∞ and fully
/// shrinks the solution; scenarios override λ (see `lasso_with_lambda`).
pub fn lasso_default_lambda(n_cols: usize) -> f64 {
    10.0 * (2.0 * n_cols as f64).ln().sqrt()
}

/// LASSO: minimize ½‖Âx − y‖² + λσ‖x‖₁ with the default λ.
pub fn lasso(problem: &RecoveryProblem) -> Result<RecoveryResult> {
    lasso_with_lambda(problem, lasso_default_lambda(problem.a.ncols()))
}

/// LASSO with an explicit λ (penalty weight λ·σ).
pub fn lasso_with_lambda(problem: &RecoveryProblem, lambda: f64) -> Result<RecoveryResult> {
    let sigma = problem.noise_sigma.unwrap_or(0.0);
    let a = &problem.a;
    let y = &problem.y;
    let k = a.ncols();
    let weight = lambda * sigma;
    let ata = a.transpose() * a + DMatrix::identity(k, k) * RHO;
    let chol = ata.cholesky().expect("AᵀA + ρI is positive definite");
    let aty = a.transpose() * y;
    let mut z = DVector::<f64>::zeros(k);
    let mut u = DVector::<f64>::zeros(k);
    let sqrt_k = (k as f64).sqrt();
    for it in 1..=MAX_ITER {
        let x = chol.solve(&(&aty + RHO * (&z - &u)));
        let x_relaxed = RELAX * &x + (1.0 - RELAX) * &z;
        let z_old = z.clone();
        let w = &x_relaxed + &u;
        z = w.map(|v| {
            if problem.nonneg {
                (v - weight / RHO).max(0.0)
            } else {
                soft_threshold(v, weight / RHO)
            }
        });
        u += &x_relaxed - &z;
        let r_norm = (&x - &z).norm();
        let s_norm = RHO * (&z - &z_old).norm();
        let eps_pri = sqrt_k * ABSTOL + RELTOL * x.norm().max(z.norm());
        let eps_dual = sqrt_k * ABSTOL + RELTOL * RHO * u.norm();
        if r_norm < eps_pri && s_norm < eps_dual {
            return Ok(RecoveryResult::finish(a, y, z, it, SolverStatus::Converged));
        }
    }
    Ok(RecoveryResult::finish(
        a,
        y,
        z,
        MAX_ITER,
        SolverStatus::MaxIter,
    ))
}

/// Least-squares refit on a fixed support (debiasing step after an
/// ℓ1 solve); entries off the support stay zero.
pub fn debias_on_support(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    support: &[usize],
    nonneg: bool,
) -> Result<DVector<f64>> {
    let mut x = DVector::zeros(a.ncols());
    if support.is_empty() {
        return Ok(x);
    }
    let sub = a.select_columns(support.iter());
    let svd = sub.svd(true, true);
    let vals = svd
        .solve(y, 1e-12)
        .map_err(|e| Error::Infeasible(e.to_string()))?;
    for (i, &j) in support.iter().enumerate() {
        x[j] = if nonneg { vals[i].max(0.0) } else { vals[i] };
    }
    Ok(x)
}

/// Dantzig selector: minimize ‖x‖₁ subject to |Âᵀ(y − Âx)|_j ≤ λσ·‖â_j‖
/// — the per-column norm keeps the correlation test calibrated for
/// dictionaries whose columns are not unit norm (OCT); for the cos/sin
/// matrices ‖â_j‖ ≈ 1 and this is the plain ∞-norm constraint.
pub fn dantzig_selector(problem: &RecoveryProblem, lambda: f64) -> Result<RecoveryResult> {
    let a = &problem.a;
    let y = &problem.y;
    let k = a.ncols();
    let sigma = problem.noise_sigma.unwrap_or(0.0);
    let gram = a.transpose() * a;
    let aty = a.transpose() * y;
    let thresholds: Vec<f64> = (0..k)
        .map(|j| lambda * sigma * a.column(j).norm())
        .collect();
    // variables v = [x⁺; x⁻] ≥ 0 (just x ≥ 0 when the nonnegativity
    // constraint is on), constraints:
    //   G(x⁺−x⁻) ≤ Âᵀy + t
    //  −G(x⁺−x⁻) ≤ t − Âᵀy
    let width = if problem.nonneg { k } else { 2 * k };
    let mut a_ub = DMatrix::zeros(2 * k, width);
    let mut b_ub = DVector::zeros(2 * k);
    for i in 0..k {
        for j in 0..k {
            a_ub[(i, j)] = gram[(i, j)];
            a_ub[(k + i, j)] = -gram[(i, j)];
            if !problem.nonneg {
                a_ub[(i, k + j)] = -gram[(i, j)];
                a_ub[(k + i, k + j)] = gram[(i, j)];
            }
        }
        b_ub[i] = aty[i] + thresholds[i];
        b_ub[k + i] = thresholds[i] - aty[i];
    }
    let c = DVector::from_element(width, 1.0);
    match simplex::solve(&c, &a_ub, &b_ub) {
        Ok((v, iterations)) => {
            let x = DVector::from_fn(k, |i, _| {
                if problem.nonneg {
                    v[i]
                } else {
                    v[i] - v[k + i]
                }
            });
            Ok(RecoveryResult::finish(
                a,
                y,
                x,
                iterations,
                SolverStatus::Converged,
            ))
        }
        Err(simplex::LpError::Infeasible) => Err(Error::Infeasible(
            "Dantzig constraint set empty: λσ too small for the data".into(),
        )),
        Err(simplex::LpError::Unbounded) => Err(Error::Infeasible(
            "Dantzig LP unbounded (degenerate data)".into(),
        )),
        Err(simplex::LpError::IterationLimit) => Err(Error::MaxIter {
            iterations: simplex::MAX_PIVOTS,
        }),
    }
}

/// Modal energies from the 2N-point Nyquist interferogram:
/// x̂_n = |DFT(y)[n]|/N for n = 1..N−1 and |DFT(y)[N]|/(2N) for n = N
/// (the top bin aliases onto itself, doubling its DFT weight).
pub fn ft_baseline(y: &[f64], delays: &[f64], n: usize) -> Result<RecoveryResult> {
    let m = 2 * n;
    if y.len() != m || delays.len() != m {
        return Err(Error::ScheduleMismatch(format!(
            "FT baseline needs 2N = {m} samples, got {}",
            y.len()
        )));
    }
    for (i, &d) in delays.iter().enumerate() {
        let expect = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        if (d - expect).abs() > 1e-9 {
            return Err(Error::ScheduleMismatch(format!(
                "delay {i} = {d} is not on the uniform Nyquist grid"
            )));
        }
    }
    let mut x = DVector::zeros(n);
    for bin in 1..=n {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in y.iter().enumerate() {
            let ph = -2.0 * std::f64::consts::PI * bin as f64 * i as f64 / m as f64;
            re += v * ph.cos();
            im += v * ph.sin();
        }
        let mag = (re * re + im * im).sqrt();
        x[bin - 1] = if bin == n {
            mag / m as f64
        } else {
            mag / n as f64
        };
    }
    let support = extract_support(&x);
    Ok(RecoveryResult {
        x_hat: x,
        residual: 0.0,
        iterations: 1,
        status: SolverStatus::Converged,
        support,
    })
}

/// Minimum-residual solution by orthogonal factorization; errors when the
/// numerical rank (tolerance 1e-10·σ_max) falls below the column count.
pub fn least_squares(problem: &RecoveryProblem) -> Result<RecoveryResult> {
    let a = &problem.a;
    let y = &problem.y;
    let k = a.ncols();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &v| m.max(v));
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&v| v > 1e-10 * smax)
        .count();
    if rank < k {
        return Err(Error::RankDeficient { rank, cols: k });
    }
    let x = svd
        .solve(y, 1e-10 * smax)
        .map_err(|e| Error::Infeasible(e.to_string()))?;
    Ok(RecoveryResult::finish(a, y, x, 1, SolverStatus::Converged))
}

/// Brute-force oracle: least squares on every s-support, best residual
/// wins; ties broken by smaller ‖x‖₁, then lexicographically earlier
/// support.
pub fn exhaustive_sparse_oracle(problem: &RecoveryProblem, s: usize) -> Result<RecoveryResult> {
    let a = &problem.a;
    let y = &problem.y;
    let k = a.ncols();
    if s > k {
        return Err(Error::DimensionMismatch(format!(
            "sparsity {s} > {k} columns"
        )));
    }
    // C(k, s) feasibility guard
    let mut count: f64 = 1.0;
    for i in 0..s {
        count = count * (k - i) as f64 / (i + 1) as f64;
        if count > 1e6 {
            return Err(Error::CombinatorialBlowup { k, s });
        }
    }
    let mut best: Option<(f64, f64, Vec<usize>, DVector<f64>)> = None;
    let mut support: Vec<usize> = (0..s).collect();
    loop {
        let sub = a.select_columns(support.iter());
        let svd = sub.svd(true, true);
        if let Ok(vals) = svd.solve(y, 1e-12) {
            let mut x = DVector::zeros(k);
            for (i, &j) in support.iter().enumerate() {
                x[j] = vals[i];
            }
            let res = (a * &x - y).norm();
            let l1 = x.iter().map(|v| v.abs()).sum::<f64>();
            let better = match &best {
                None => true,
                Some((br, bl1, bsup, _)) => {
                    res < br - 1e-12
                        || ((res - br).abs() <= 1e-12
                            && (l1 < bl1 - 1e-12 || ((l1 - bl1).abs() <= 1e-12 && support < *bsup)))
                }
            };
            if better {
                best = Some((res, l1, support.clone(), x));
            }
        }
        // next s-combination
        let mut i = s;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if support[i] != i + k - s {
                support[i] += 1;
                for j in i + 1..s {
                    support[j] = support[j - 1] + 1;
                }
                break false;
            }
        };
        if done {
            break;
        }
    }
    let (res, _, _, x) = best.ok_or_else(|| Error::Infeasible("no solvable support".into()))?;
    let support = extract_support(&x);
    Ok(RecoveryResult {
        x_hat: x,
        residual: res,
        iterations: 1,
        status: SolverStatus::Converged,
        support,
    })
}

/// Dense two-phase simplex for min cᵀx s.t. Ax ≤ b, x ≥ 0, with Bland's
/// anti-cycling rule. Small and deterministic: exactly what the Dantzig LP
/// needs, nothing more.
pub mod simplex {
    use nalgebra::{DMatrix, DVector};

    pub const MAX_PIVOTS: usize = 200_000;
    const TOL: f64 = 1e-8;

    #[derive(Debug)]
    pub enum LpError {
        Infeasible,
        Unbounded,
        IterationLimit,
    }

    /// Returns the minimizer and the pivot count.
    pub fn solve(
        c: &DVector<f64>,
        a: &DMatrix<f64>,
        b: &DVector<f64>,
    ) -> Result<(DVector<f64>, usize), LpError> {
        let m = a.nrows();
        let n = a.ncols();
        // columns: n structural + m slacks + (artificials as needed)
        let mut need_artificial = Vec::new();
        for i in 0..m {
            if b[i] < 0.0 {
                need_artificial.push(i);
            }
        }
        let n_art = need_artificial.len();
        let total = n + m + n_art;
        let mut t = DMatrix::<f64>::zeros(m, total);
        let mut rhs = DVector::<f64>::zeros(m);
        let mut basis = vec![0usize; m];
        let mut art_col = n + m;
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[(i, j)] = sign * a[(i, j)];
            }
            t[(i, n + i)] = sign; // slack
            rhs[i] = sign * b[i];
            if sign < 0.0 {
                t[(i, art_col)] = 1.0;
                basis[i] = art_col;
                art_col += 1;
            } else {
                basis[i] = n + i;
            }
        }
        let mut pivots = 0usize;

        // phase 1: minimize the artificial sum
        if n_art > 0 {
            let mut cost = DVector::<f64>::zeros(total);
            for j in n + m..total {
                cost[j] = 1.0;
            }
            let obj = run(&mut t, &mut rhs, &mut basis, &cost, &mut pivots)?;
            if obj > TOL {
                return Err(LpError::Infeasible);
            }
            // drive any residual basic artificials out of the basis
            for i in 0..m {
                if basis[i] >= n + m {
                    if let Some(j) = (0..n + m).find(|&j| t[(i, j)].abs() > TOL) {
                        pivot(&mut t, &mut rhs, &mut basis, i, j);
                        pivots += 1;
                    }
                }
            }
        }

        // phase 2: the real objective over structural + slack columns
        let mut cost = DVector::<f64>::zeros(total);
        for j in 0..n {
            cost[j] = c[j];
        }
        // forbid re-entry of artificials
        for j in n + m..total {
            cost[j] = f64::INFINITY;
        }
        run(&mut t, &mut rhs, &mut basis, &cost, &mut pivots)?;

        let mut x = DVector::zeros(n);
        for i in 0..m {
            if basis[i] < n {
                x[basis[i]] = rhs[i];
            }
        }
        Ok((x, pivots))
    }

    fn run(
        t: &mut DMatrix<f64>,
        rhs: &mut DVector<f64>,
        basis: &mut [usize],
        cost: &DVector<f64>,
        pivots: &mut usize,
    ) -> Result<f64, LpError> {
        let m = t.nrows();
        let total = t.ncols();
        // reduced-cost row r_j = c_j − c_Bᵀ·B⁻¹·A_j, maintained
        // incrementally like any other tableau row; blocked (artificial)
        // columns stay at +∞ and never enter
        let mut red = vec![0.0_f64; total];
        let mut in_basis = vec![false; total];
        for &b in basis.iter() {
            in_basis[b] = true;
        }
        for (j, r) in red.iter_mut().enumerate() {
            if cost[j].is_infinite() {
                *r = f64::INFINITY;
                continue;
            }
            let mut v = cost[j];
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 && cb.is_finite() {
                    v -= cb * t[(i, j)];
                }
            }
            *r = v;
        }
        let mut obj = 0.0;
        for i in 0..m {
            let cb = cost[basis[i]];
            if cb.is_finite() {
                obj += cb * rhs[i];
            }
        }
        // pricing: most-negative reduced cost, falling back to Bland's rule
        // permanently once degenerate pivots stall the objective (keeps the
        // anti-cycling guarantee without Bland's slow crawl on the heavily
        // degenerate σ = 0 instances)
        let mut bland = false;
        let mut stall = 0usize;
        loop {
            let mut entering = None;
            if bland {
                for j in 0..total {
                    if !in_basis[j] && red[j] < -TOL {
                        entering = Some(j);
                        break;
                    }
                }
            } else {
                let mut best = -TOL;
                for j in 0..total {
                    if !in_basis[j] && red[j] < best {
                        best = red[j];
                        entering = Some(j);
                    }
                }
            }
            let Some(e) = entering else {
                return Ok(obj);
            };
            // ratio test, Bland ties by smallest basis index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if t[(i, e)] > TOL {
                    let ratio = rhs[i] / t[(i, e)];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - TOL
                                || ((ratio - lr).abs() <= TOL && basis[i] < basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((l, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            in_basis[basis[l]] = false;
            in_basis[e] = true;
            pivot(t, rhs, basis, l, e);
            let re = red[e];
            for (j, r) in red.iter_mut().enumerate() {
                if r.is_finite() {
                    *r -= re * t[(l, j)];
                }
            }
            red[e] = 0.0;
            let delta = re * rhs[l];
            obj += delta;
            if delta.abs() <= TOL {
                stall += 1;
                if stall > 2 * (m + total) {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit);
            }
        }
    }

    fn pivot(
        t: &mut DMatrix<f64>,
        rhs: &mut DVector<f64>,
        basis: &mut [usize],
        l: usize,
        e: usize,
    ) {
        let m = t.nrows();
        let total = t.ncols();
        let p = t[(l, e)];
        for j in 0..total {
            t[(l, j)] /= p;
        }
        rhs[l] /= p;
        for i in 0..m {
            if i != l {
                let f = t[(i, e)];
                if f != 0.0 {
                    for j in 0..total {
                        t[(i, j)] -= f * t[(l, j)];
                    }
                    rhs[i] -= f * rhs[l];
                }
            }
        }
        basis[l] = e;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{build_cosine_matrix, nyquist_schedule, sample_delays_uniform};
    use nalgebra::{DMatrix, DVector};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sparse_ground_truth(k: usize, s: usize, seed: u64) -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = DVector::zeros(k);
        let mut chosen = Vec::new();
        while chosen.len() < s {
            let i = rng.gen_range(0..k);
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        for &i in &chosen {
            x[i] = rng.gen_range(0.2..1.0);
        }
        let n = x.norm();
        x / n
    }

    #[test]
    fn bp_zero_measurements() {
        let s = sample_delays_uniform(4, 1, false);
        let a = build_cosine_matrix(&s, 8, false);
        let p = RecoveryProblem::new(a.entries, DVector::zeros(4)).unwrap();
        let r = basis_pursuit(&p, 1e-10).unwrap();
        assert!(r.x_hat.norm() < 1e-12);
        assert!(r.support.is_empty());
    }

    #[test]
    fn bp_matches_oracle_small() {
        let s = sample_delays_uniform(4, 5, false);
        let a = build_cosine_matrix(&s, 8, false);
        let x = sparse_ground_truth(8, 1, 3);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries.clone(), y.clone()).unwrap();
        let bp = basis_pursuit(&p, 1e-10).unwrap();
        let oracle = exhaustive_sparse_oracle(&p, 1).unwrap();
        assert_eq!(bp.support, oracle.support);
        for i in 0..8 {
            assert!((bp.x_hat[i] - oracle.x_hat[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn bp_recovers_modal_instance() {
        let s = sample_delays_uniform(25, 40, false);
        let a = build_cosine_matrix(&s, 64, false);
        let x = sparse_ground_truth(64, 4, 8);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries, y).unwrap();
        let r = basis_pursuit(&p, 1e-10).unwrap();
        let e = recovery_error(&x, &r.x_hat).unwrap();
        assert!(e <= 1e-4, "scaled error {e}");
        assert_eq!(r.status, SolverStatus::Converged);
    }

    #[test]
    fn bp_feasibility_invariant() {
        for seed in 0..5 {
            let s = sample_delays_uniform(20, 100 + seed, false);
            let a = build_cosine_matrix(&s, 32, false);
            let x = sparse_ground_truth(32, 3, seed);
            let y = &a.entries * &x;
            let p = RecoveryProblem::new(a.entries.clone(), y.clone()).unwrap();
            let r = basis_pursuit(&p, 1e-8).unwrap();
            if r.status == SolverStatus::Converged {
                assert!(r.residual <= 1e-8 * y.norm().max(1.0) + 1e-12);
            }
        }
    }

    #[test]
    fn bp_infeasible_data_flagged() {
        // y outside range(A): one row duplicated with different y values
        let mut a = DMatrix::zeros(2, 3);
        for j in 0..3 {
            a[(0, j)] = 1.0;
            a[(1, j)] = 1.0;
        }
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let p = RecoveryProblem::new(a, y).unwrap();
        let r = basis_pursuit(&p, 1e-8).unwrap();
        assert_eq!(r.status, SolverStatus::Infeasible);
    }

    #[test]
    fn lasso_vanishing_penalty_approaches_bp() {
        let s = sample_delays_uniform(30, 21, false);
        let a = build_cosine_matrix(&s, 16, true);
        let x = sparse_ground_truth(16, 2, 9);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries.clone(), y)
            .unwrap()
            .with_noise(1e-12);
        let r = lasso(&p).unwrap();
        let e = recovery_error(&x, &r.x_hat).unwrap();
        assert!(e.sqrt() <= 1e-3, "error {}", e.sqrt());
    }

    #[test]
    fn lasso_full_shrinkage_when_lambda_large() {
        let s = sample_delays_uniform(30, 22, false);
        let a = build_cosine_matrix(&s, 16, true);
        let x = sparse_ground_truth(16, 2, 10);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries.clone(), y.clone())
            .unwrap()
            .with_noise(1.0);
        let r = lasso_with_lambda(&p, 1e4).unwrap();
        assert!(r.x_hat.norm() < 1e-10);
        // and the λσ > ‖Âᵀy‖_∞ criterion really held
        let corr = (a.entries.transpose() * &y).amax();
        assert!(1e4 > corr);
    }

    #[test]
    fn lasso_subgradient_optimality() {
        let s = sample_delays_uniform(40, 23, false);
        let a = build_cosine_matrix(&s, 16, true);
        let x = sparse_ground_truth(16, 3, 11);
        let mut y = &a.entries * &x;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sigma = 0.05;
        for v in y.iter_mut() {
            *v += rng.gen_range(-sigma..sigma);
        }
        let p = RecoveryProblem::new(a.entries.clone(), y.clone())
            .unwrap()
            .with_noise(sigma);
        let lambda = 1.0;
        let r = lasso_with_lambda(&p, lambda).unwrap();
        let grad = a.entries.transpose() * (&a.entries * &r.x_hat - &y);
        assert!(
            grad.amax() <= lambda * sigma + 1e-4,
            "‖grad‖∞ = {}",
            grad.amax()
        );
        // equality pattern on the support
        for &i in &r.support {
            assert!(
                (grad[i].abs() - lambda * sigma).abs() < 1e-4,
                "support entry {i}: |g| = {}",
                grad[i].abs()
            );
        }
    }

    #[test]
    fn dantzig_noise_free_matches_bp() {
        let s = sample_delays_uniform(12, 31, false);
        let a = build_cosine_matrix(&s, 10, true);
        let x = sparse_ground_truth(10, 2, 12);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries.clone(), y.clone()).unwrap();
        let d = dantzig_selector(&p, 0.0).unwrap();
        let b = basis_pursuit(&p, 1e-10).unwrap();
        for i in 0..10 {
            assert!((d.x_hat[i] - b.x_hat[i]).abs() < 1e-5, "col {i}");
        }
    }

    #[test]
    fn dantzig_feasibility_invariant() {
        let s = sample_delays_uniform(30, 33, false);
        let a = build_cosine_matrix(&s, 12, true);
        let x = sparse_ground_truth(12, 2, 13);
        let mut y = &a.entries * &x;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sigma = 0.03;
        for v in y.iter_mut() {
            *v += rng.gen_range(-sigma..sigma);
        }
        let p = RecoveryProblem::new(a.entries.clone(), y.clone())
            .unwrap()
            .with_noise(sigma);
        let lambda = 2.0;
        let r = dantzig_selector(&p, lambda).unwrap();
        let corr = a.entries.transpose() * (&y - &a.entries * &r.x_hat);
        assert!(
            corr.amax() <= lambda * sigma + 1e-6,
            "‖corr‖∞ = {}",
            corr.amax()
        );
    }

    #[test]
    fn dantzig_matches_exhaustive_lp_oracle() {
        // tiny instance: compare against brute force over supports with the
        // same constraint, minimizing ℓ1
        let s = sample_delays_uniform(4, 35, false);
        let a = build_cosine_matrix(&s, 6, true);
        let x = sparse_ground_truth(6, 1, 14);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries.clone(), y.clone()).unwrap();
        let r = dantzig_selector(&p, 0.0).unwrap();
        // at σ=0 on consistent data the oracle solution is feasible and has
        // minimal ℓ1 among all feasible points; Dantzig must match it
        let oracle = exhaustive_sparse_oracle(&p, 1).unwrap();
        for i in 0..6 {
            assert!((r.x_hat[i] - oracle.x_hat[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn dantzig_nonneg_solution_is_nonneg_and_feasible() {
        let s = sample_delays_uniform(30, 37, false);
        let a = build_cosine_matrix(&s, 12, true);
        let x = sparse_ground_truth(12, 2, 15);
        let mut y = &a.entries * &x;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = 0.03;
        for v in y.iter_mut() {
            *v += rng.gen_range(-sigma..sigma);
        }
        let p = RecoveryProblem::new(a.entries.clone(), y.clone())
            .unwrap()
            .with_noise(sigma)
            .with_nonneg();
        let lambda = 2.0;
        let r = dantzig_selector(&p, lambda).unwrap();
        assert!(r.x_hat.iter().all(|&v| v >= 0.0));
        let corr = a.entries.transpose() * (&y - &a.entries * &r.x_hat);
        for j in 0..12 {
            let t = lambda * sigma * a.entries.column(j).norm();
            assert!(corr[j].abs() <= t + 1e-6, "col {j}: |corr| = {}", corr[j]);
        }
    }

    #[test]
    fn dantzig_nonneg_matches_unconstrained_on_nonneg_truth() {
        // on clean data with a nonnegative ground truth the constraint is
        // inactive at the optimum, so both variants agree
        let s = sample_delays_uniform(12, 39, false);
        let a = build_cosine_matrix(&s, 10, true);
        let x = sparse_ground_truth(10, 2, 16);
        let y = &a.entries * &x;
        let base = RecoveryProblem::new(a.entries.clone(), y.clone()).unwrap();
        let plain = dantzig_selector(&base, 0.0).unwrap();
        let nn = dantzig_selector(&base.clone().with_nonneg(), 0.0).unwrap();
        for i in 0..10 {
            assert!((plain.x_hat[i] - nn.x_hat[i]).abs() < 1e-6, "col {i}");
        }
    }

    #[test]
    fn ft_baseline_single_mode() {
        let n = 16;
        let sched = nyquist_schedule(n);
        let y: Vec<f64> = sched.values.iter().map(|&a| a.cos()).collect();
        let r = ft_baseline(&y, &sched.values, n).unwrap();
        assert!((r.x_hat[0] - 1.0).abs() < 1e-12);
        for i in 1..n {
            assert!(r.x_hat[i].abs() < 1e-12);
        }
    }

    #[test]
    fn ft_baseline_zero() {
        let n = 8;
        let sched = nyquist_schedule(n);
        let r = ft_baseline(&vec![0.0; 16], &sched.values, n).unwrap();
        assert!(r.x_hat.norm() == 0.0);
    }

    #[test]
    fn ft_baseline_top_bin_scaling() {
        // modal energy on the N-th mode needs the 1/(2N) bin scaling
        let n = 8;
        let sched = nyquist_schedule(n);
        let y: Vec<f64> = sched
            .values
            .iter()
            .map(|&a| 0.7 * (8.0 * a).cos())
            .collect();
        let r = ft_baseline(&y, &sched.values, n).unwrap();
        assert!((r.x_hat[7] - 0.7).abs() < 1e-12, "x̂_8 = {}", r.x_hat[7]);
    }

    #[test]
    fn ft_baseline_exact_on_modal_data() {
        let n = 64;
        let sched = nyquist_schedule(n);
        let x = sparse_ground_truth(n, 4, 77);
        let y: Vec<f64> = sched
            .values
            .iter()
            .map(|&a| (0..n).map(|k| x[k] * ((k + 1) as f64 * a).cos()).sum())
            .collect();
        let r = ft_baseline(&y, &sched.values, n).unwrap();
        let e = recovery_error(&x, &r.x_hat).unwrap();
        assert!(e <= 1e-10, "scaled error {e}");
    }

    #[test]
    fn ft_baseline_rejects_random_schedule() {
        let s = sample_delays_uniform(16, 3, false);
        let y = vec![0.0; 16];
        assert!(matches!(
            ft_baseline(&y, &s.values, 8),
            Err(Error::ScheduleMismatch(_))
        ));
    }

    #[test]
    fn least_squares_square_system() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![5.0, 10.0]);
        let p = RecoveryProblem::new(a.clone(), y.clone()).unwrap();
        let r = least_squares(&p).unwrap();
        let err = (&a * &r.x_hat - &y).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn least_squares_rank_deficient() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let p = RecoveryProblem::new(a, y).unwrap();
        assert!(matches!(
            least_squares(&p),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn oracle_full_support_is_least_squares() {
        let s = sample_delays_uniform(12, 41, false);
        let a = build_cosine_matrix(&s, 4, false);
        let x = DVector::from_vec(vec![0.3, -0.1, 0.8, 0.2]);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries, y).unwrap();
        let o = exhaustive_sparse_oracle(&p, 4).unwrap();
        let ls = least_squares(&p).unwrap();
        for i in 0..4 {
            assert!((o.x_hat[i] - ls.x_hat[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_finds_true_support() {
        let s = sample_delays_uniform(10, 43, false);
        let a = build_cosine_matrix(&s, 12, false);
        let x = sparse_ground_truth(12, 2, 15);
        let y = &a.entries * &x;
        let p = RecoveryProblem::new(a.entries, y).unwrap();
        let o = exhaustive_sparse_oracle(&p, 2).unwrap();
        assert!(o.residual < 1e-10);
        let true_support: Vec<usize> = (0..12).filter(|&i| x[i].abs() > 1e-12).collect();
        assert_eq!(o.support, true_support);
    }

    #[test]
    fn oracle_blowup_guard() {
        let a = DMatrix::<f64>::zeros(4, 300);
        let p = RecoveryProblem::new(a, DVector::zeros(4)).unwrap();
        assert!(matches!(
            exhaustive_sparse_oracle(&p, 5),
            Err(Error::CombinatorialBlowup { .. })
        ));
    }

    #[test]
    fn recovery_error_cases() {
        let x = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(recovery_error(&x, &x).unwrap(), 0.0);
        assert_eq!(recovery_error(&x, &DVector::zeros(2)).unwrap(), 1.0);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(recovery_error(&x, &y).unwrap(), 2.0);
        assert!(matches!(
            recovery_error(&DVector::zeros(2), &y),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn simplex_basic_lp() {
        // min −x1 − 2x2 s.t. x1 + x2 ≤ 4, x1 ≤ 2 → x = (0,4), obj = −8
        let c = DVector::from_vec(vec![-1.0, -2.0]);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![4.0, 2.0]);
        let (x, _) = simplex::solve(&c, &a, &b).unwrap();
        assert!((x[0] - 0.0).abs() < 1e-9 && (x[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn simplex_negative_rhs_phase1() {
        // min x1 + x2 s.t. −x1 ≤ −3 (i.e. x1 ≥ 3) → x = (3, 0)
        let c = DVector::from_vec(vec![1.0, 1.0]);
        let a = DMatrix::from_row_slice(1, 2, &[-1.0, 0.0]);
        let b = DVector::from_vec(vec![-3.0]);
        let (x, _) = simplex::solve(&c, &a, &b).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-9 && x[1].abs() < 1e-9);
    }

    #[test]
    fn simplex_infeasible_detected() {
        // x1 ≤ 1 and x1 ≥ 2 simultaneously
        let c = DVector::from_vec(vec![1.0]);
        let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![1.0, -2.0]);
        assert!(matches!(
            simplex::solve(&c, &a, &b),
            Err(simplex::LpError::Infeasible)
        ));
    }

    #[test]
    fn support_threshold_relative() {
        let x = DVector::from_vec(vec![1.0, 1e-3, 1e-6, 0.0]);
        assert_eq!(extract_support(&x), vec![0, 1]);
    }
}
