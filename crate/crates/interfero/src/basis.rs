//! Orthonormal bases and synthesis/analysis between coefficient and field
//! space.
//!
//! The Hermite-Gaussian mode of order n over width σ is
//!
//! ```text
//!   φ_n(x) ∝ H_n(√π·x/σ) · exp(−π x²/(2σ²))
//! ```
//!
//! normalized to unit *discrete* L2 norm on the working grid, so Parseval
//! holds exactly in the discretized model. With this argument scaling the
//! modes are orthogonal and are eigenfunctions of the fractional Fourier
//! transform built in [`crate::delay`] when σ² = λf.
//!
//! Basis elements are indexed n = 1..N (the n-th element is the physical
//! order-n mode) so that the generalized-delay eigenvalue on element n is
//! e^{−jnα}, matching the cos(nα_m) structure of the sensing matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, Field2, Grid, Grid2};

/// Which orthonormal (or near-orthonormal) family spans the signal space.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    /// Harmonics e^{jω_n t} with the given distinct frequencies and
    /// fundamental period.
    FourierHarmonics { omegas: Vec<f64>, period: f64 },
    /// 1D Hermite-Gaussian modes of orders 1..N.
    HermiteGaussian { sigma: f64, n: usize },
    /// Separable 2D Hermite-Gaussian modes φ_n(x)·η_m(y), n = 1..n_x,
    /// m = 1..n_y, flat index (n−1)·n_y + (m−1).
    HermiteGaussian2D {
        sigma_x: f64,
        sigma_y: f64,
        n_x: usize,
        n_y: usize,
    },
    /// Gaussian with its sign flipped at the Hermite zero crossings —
    /// an experimentally convenient approximation to the HG modes that is
    /// *not* perfectly orthogonal.
    FlippedGaussian { sigma: f64, n: usize },
}

impl BasisSpec {
    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        match self {
            BasisSpec::FourierHarmonics { omegas, .. } => omegas.len(),
            BasisSpec::HermiteGaussian { n, .. } | BasisSpec::FlippedGaussian { n, .. } => *n,
            BasisSpec::HermiteGaussian2D { n_x, n_y, .. } => n_x * n_y,
        }
    }

    /// Flat index of the 2D pair (n, m), both 1-based.
    pub fn flatten_2d(&self, n: usize, m: usize) -> Result<usize> {
        match self {
            BasisSpec::HermiteGaussian2D { n_x, n_y, .. } => {
                if n == 0 || m == 0 || n > *n_x || m > *n_y {
                    return Err(Error::DimensionMismatch(format!(
                        "2D index ({n},{m}) outside 1..{n_x} × 1..{n_y}"
                    )));
                }
                Ok((n - 1) * n_y + (m - 1))
            }
            _ => Err(Error::IncompatibleRepr("flatten_2d on a 1D basis".into())),
        }
    }

    /// Inverse of [`flatten_2d`](Self::flatten_2d).
    pub fn unflatten_2d(&self, flat: usize) -> Result<(usize, usize)> {
        match self {
            BasisSpec::HermiteGaussian2D { n_x, n_y, .. } => {
                if flat >= n_x * n_y {
                    return Err(Error::DimensionMismatch(format!(
                        "flat index {flat} out of range {}",
                        n_x * n_y
                    )));
                }
                Ok((flat / n_y + 1, flat % n_y + 1))
            }
            _ => Err(Error::IncompatibleRepr("unflatten_2d on a 1D basis".into())),
        }
    }
}

/// Expansion coefficients c_n in a chosen basis, n = 1..N.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    pub basis: BasisSpec,
    pub values: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(basis: BasisSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a dim-{} basis",
                values.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, values })
    }

    /// Standard unit vector e_k (1-based element index).
    pub fn unit(basis: BasisSpec, k: usize) -> Result<Self> {
        let dim = basis.dim();
        if k == 0 || k > dim {
            return Err(Error::DimensionMismatch(format!(
                "index {k} outside 1..{dim}"
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); dim];
        values[k - 1] = Complex64::new(1.0, 0.0);
        Self::new(basis, values)
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Unnormalized Hermite polynomial values H_n(u_i) by the three-term
/// recurrence H_{k+1} = 2u·H_k − 2k·H_{k−1}, rescaled whenever the running
/// magnitude overflows toward 1e100 (only the final normalized direction is
/// used, so joint rescaling of the pair is exact).
fn hermite_values(n: usize, u: &[f64]) -> Vec<f64> {
    let mut prev: Vec<f64> = vec![1.0; u.len()];
    if n == 0 {
        return prev;
    }
    let mut cur: Vec<f64> = u.iter().map(|&ui| 2.0 * ui).collect();
    for k in 1..n {
        let mut next: Vec<f64> = u
            .iter()
            .zip(cur.iter().zip(prev.iter()))
            .map(|(&ui, (&c, &p))| 2.0 * ui * c - 2.0 * k as f64 * p)
            .collect();
        let peak = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if peak > 1e100 {
            let inv = 1.0 / peak;
            for v in &mut next {
                *v *= inv;
            }
            for v in &mut cur {
                *v *= inv;
            }
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn boundary_tail_check(n: usize, values: &[f64], dx: f64) -> Result<()> {
    // Truncation audit: after unit normalization the discrete energy in the
    // two boundary samples bounds the escaped tail up to the Gaussian decay
    // rate; flag anything above the 1e-6 contract.
    let norm_sq: f64 = values.iter().map(|v| v * v).sum::<f64>() * dx;
    let edge = (values[0].powi(2) + values[values.len() - 1].powi(2)) * dx;
    let tail = edge / norm_sq;
    if !(tail <= 1e-6) {
        return Err(Error::ExtentTooSmall { n, tail });
    }
    Ok(())
}

/// Order-n Hermite-Gaussian mode sampled on `grid`, unit discrete L2 norm.
pub fn hermite_gaussian_mode(n: usize, sigma: f64, grid: &Grid) -> Result<Field> {
    let u: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| std::f64::consts::PI.sqrt() * x / sigma)
        .collect();
    let h = hermite_values(n, &u);
    let mut v: Vec<f64> = grid
        .points()
        .iter()
        .zip(&h)
        .map(|(&x, &hv)| hv * (-std::f64::consts::PI * x * x / (2.0 * sigma * sigma)).exp())
        .collect();
    boundary_tail_check(n, &v, grid.dx())?;
    let norm = (v.iter().map(|x| x * x).sum::<f64>() * grid.dx()).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    Field::new(
        grid.clone(),
        v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )
}

/// Gaussian envelope with its sign flipped at the zeros of H_n: the
/// flipped-Gaussian approximation to the order-n HG mode. Unit discrete norm.
///
/// Crossing points are located by sign changes of H_n on a 16× oversampled
/// grid, then each working-grid sample takes the sign of its cell.
pub fn flipped_gaussian_mode(n: usize, sigma: f64, grid: &Grid) -> Result<Field> {
    let (x_min, x_max) = grid.extent();
    let fine_count = grid.len() * 16;
    let fine: Vec<f64> = (0..fine_count)
        .map(|i| x_min + (x_max - x_min) * i as f64 / (fine_count - 1) as f64)
        .collect();
    let fine_u: Vec<f64> = fine
        .iter()
        .map(|&x| std::f64::consts::PI.sqrt() * x / sigma)
        .collect();
    let fine_h = hermite_values(n, &fine_u);
    let mut crossings = Vec::new();
    for i in 1..fine_count {
        if fine_h[i - 1].signum() != fine_h[i].signum() {
            crossings.push(0.5 * (fine[i - 1] + fine[i]));
        }
    }
    let mut v: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            let flips = crossings.iter().filter(|&&c| c <= x).count();
            let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
            // H_n is (−1)^n at −∞ relative to +∞; anchor the leftmost sign
            // to the polynomial's actual sign there.
            let base = if n % 2 == 0 { 1.0 } else { -1.0 };
            base * sign * (-std::f64::consts::PI * x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let norm = (v.iter().map(|x| x * x).sum::<f64>() * grid.dx()).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    Field::new(
        grid.clone(),
        v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )
}

/// All basis modes of a 1D basis, orders 1..N, as real-valued fields.
pub fn basis_modes(basis: &BasisSpec, grid: &Grid) -> Result<Vec<Field>> {
    match basis {
        BasisSpec::HermiteGaussian { sigma, n } => (1..=*n)
            .map(|k| hermite_gaussian_mode(k, *sigma, grid))
            .collect(),
        BasisSpec::FlippedGaussian { sigma, n } => (1..=*n)
            .map(|k| flipped_gaussian_mode(k, *sigma, grid))
            .collect(),
        _ => Err(Error::IncompatibleRepr(
            "basis_modes supports the 1D spatial bases only".into(),
        )),
    }
}

/// ψ = Σ c_n φ_n on the grid.
pub fn synthesize_field(coeffs: &CoefficientVector, grid: &Grid) -> Result<Field> {
    let modes = basis_modes(&coeffs.basis, grid)?;
    let mut out = Field::zeros(grid.clone());
    for (c, mode) in coeffs.values.iter().zip(&modes) {
        for (o, m) in out.values.iter_mut().zip(&mode.values) {
            *o += c * m;
        }
    }
    Ok(out)
}

/// c_n = ⟨φ_n, ψ⟩ with the Δx-weighted discrete inner product.
pub fn analyze_field(field: &Field, basis: &BasisSpec) -> Result<CoefficientVector> {
    let modes = basis_modes(basis, &field.grid)?;
    let values = modes
        .iter()
        .map(|m| m.inner(field))
        .collect::<Result<Vec<_>>>()?;
    CoefficientVector::new(basis.clone(), values)
}

/// Separable 2D synthesis: ψ(x,y) = Σ_{n,m} c_{nm} φ_n(x) η_m(y).
pub fn synthesize_field_2d(coeffs: &CoefficientVector, grid: &Grid2) -> Result<Field2> {
    let (sigma_x, sigma_y, n_x, n_y) = match &coeffs.basis {
        BasisSpec::HermiteGaussian2D {
            sigma_x,
            sigma_y,
            n_x,
            n_y,
        } => (*sigma_x, *sigma_y, *n_x, *n_y),
        _ => {
            return Err(Error::IncompatibleRepr(
                "synthesize_field_2d requires a 2D basis".into(),
            ))
        }
    };
    let mx: Vec<Field> = (1..=n_x)
        .map(|k| hermite_gaussian_mode(k, sigma_x, &grid.x))
        .collect::<Result<_>>()?;
    let my: Vec<Field> = (1..=n_y)
        .map(|k| hermite_gaussian_mode(k, sigma_y, &grid.y))
        .collect::<Result<_>>()?;
    let (gx, gy) = (grid.x.len(), grid.y.len());
    let mut values = vec![Complex64::new(0.0, 0.0); gx * gy];
    for n in 0..n_x {
        for m in 0..n_y {
            let c = coeffs.values[n * n_y + m];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for ix in 0..gx {
                let fx = c * mx[n].values[ix];
                for iy in 0..gy {
                    values[ix * gy + iy] += fx * my[m].values[iy];
                }
            }
        }
    }
    Field2::new(grid.clone(), values)
}

/// 2D analysis: c_{nm} = ⟨φ_n η_m, ψ⟩.
pub fn analyze_field_2d(field: &Field2, basis: &BasisSpec) -> Result<CoefficientVector> {
    let (sigma_x, sigma_y, n_x, n_y) = match basis {
        BasisSpec::HermiteGaussian2D {
            sigma_x,
            sigma_y,
            n_x,
            n_y,
        } => (*sigma_x, *sigma_y, *n_x, *n_y),
        _ => {
            return Err(Error::IncompatibleRepr(
                "analyze_field_2d requires a 2D basis".into(),
            ))
        }
    };
    let mx: Vec<Field> = (1..=n_x)
        .map(|k| hermite_gaussian_mode(k, sigma_x, &field.grid.x))
        .collect::<Result<_>>()?;
    let my: Vec<Field> = (1..=n_y)
        .map(|k| hermite_gaussian_mode(k, sigma_y, &field.grid.y))
        .collect::<Result<_>>()?;
    let (gx, gy) = (field.grid.x.len(), field.grid.y.len());
    let w = field.grid.weight();
    let mut values = Vec::with_capacity(n_x * n_y);
    // contract over y first: t[n? no — t[ix][m] = Σ_iy η_m(iy)·ψ(ix,iy)
    let mut t = vec![Complex64::new(0.0, 0.0); gx * n_y];
    for ix in 0..gx {
        for m in 0..n_y {
            let mut acc = Complex64::new(0.0, 0.0);
            for iy in 0..gy {
                acc += my[m].values[iy].conj() * field.values[ix * gy + iy];
            }
            t[ix * n_y + m] = acc;
        }
    }
    for n in 0..n_x {
        for m in 0..n_y {
            let mut acc = Complex64::new(0.0, 0.0);
            for ix in 0..gx {
                acc += mx[n].values[ix].conj() * t[ix * n_y + m];
            }
            values.push(w * acc);
        }
    }
    CoefficientVector::new(basis.clone(), values)
}

/// Orthonormality audit: G_{nk} = |⟨φ_n, φ_k⟩|.
pub fn gram_matrix(basis: &BasisSpec, grid: &Grid) -> Result<nalgebra::DMatrix<f64>> {
    let modes = basis_modes(basis, grid)?;
    let n = modes.len();
    let mut g = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let v = modes[i].inner(&modes[k])?.norm();
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    Ok(g)
}
