//! Gaussian-process regression with the limiting network kernel as prior
//! covariance (zero prior mean, isotropic observation noise).

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, NetworkHyper};
use crate::rng::{substream, Stream};

/// Relative jitters tried, in order, when a Gram matrix fails to factorise.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpModel {
    pub net: NetworkHyper,
    pub noise_var: f64,
}

impl GpModel {
    pub fn new(net: NetworkHyper, noise_var: f64) -> Result<Self> {
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidHyper(format!("noise variance must be non-negative, got {noise_var}")));
        }
        Ok(GpModel { net, noise_var })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPredictive {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    /// Relative jitter that made the training Gram matrix factorise.
    pub jitter: f64,
}

impl PosteriorPredictive {
    pub fn variance(&self) -> DVector<f64> {
        self.cov.diagonal()
    }
}

/// Cholesky factor of a Gram matrix plus the relative jitter it needed.
#[derive(Debug, Clone)]
pub struct Factor {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl Factor {
    /// Factorise `k`, adding `eps * mean(diag(k))` to the diagonal with `eps`
    /// climbing [`JITTER_LADDER`] until it succeeds.
    pub fn new(k: &DMatrix<f64>) -> Result<Self> {
        let n = k.nrows();
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorisation { max_jitter: 0.0 });
        }
        let scale = if n == 0 { 0.0 } else { k.diagonal().mean() };
        for &eps in &JITTER_LADDER {
            let mut kj = k.clone();
            for i in 0..n {
                kj[(i, i)] += eps * scale;
            }
            if let Some(chol) = Cholesky::new(kj) {
                if chol.l_dirty().diagonal().iter().all(|d| d.is_finite() && *d > 0.0) {
                    return Ok(Factor { chol, jitter: eps });
                }
            }
        }
        Err(Error::Factorisation { max_jitter: JITTER_LADDER[JITTER_LADDER.len() - 1] })
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }
}

fn check_rows(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!("{} inputs but {} targets", x.nrows(), y.len())));
    }
    Ok(())
}

fn noisy_gram(x: &DMatrix<f64>, model: &GpModel) -> Result<DMatrix<f64>> {
    let mut k = kernel_matrix(x, x, &model.net)?;
    for i in 0..k.nrows() {
        k[(i, i)] += model.noise_var;
    }
    Ok(k)
}

/// `n_draws` rows of function values at the rows of `xstar` drawn from the
/// prior.
pub fn sample_prior(xstar: &DMatrix<f64>, model: &GpModel, n_draws: usize, seed: u64) -> Result<DMatrix<f64>> {
    let k = kernel_matrix(xstar, xstar, &model.net)?;
    let factor = Factor::new(&k)?;
    let l = factor.chol.l();
    let m = xstar.nrows();
    let mut rng = substream(seed, Stream::PriorDraws, 0);
    let z = DMatrix::<f64>::from_fn(m, n_draws, |_, _| StandardNormal.sample(&mut rng));
    Ok((l * z).transpose())
}

/// Posterior predictive of the latent function at `xstar`.
pub fn posterior_predictive(xstar: &DMatrix<f64>, x: &DMatrix<f64>, y: &DVector<f64>, model: &GpModel) -> Result<PosteriorPredictive> {
    check_rows(x, y)?;
    let kss = kernel_matrix(xstar, xstar, &model.net)?;
    if x.nrows() == 0 {
        return Ok(PosteriorPredictive { mean: DVector::zeros(xstar.nrows()), cov: kss, jitter: 0.0 });
    }
    let factor = Factor::new(&noisy_gram(x, model)?)?;
    let kxs = kernel_matrix(x, xstar, &model.net)?;
    let alpha = factor.chol.solve(y);
    let mean = kxs.tr_mul(&alpha);
    let v = factor.chol.l().solve_lower_triangular(&kxs).expect("Cholesky factor has a positive diagonal");
    let mut cov = kss - v.tr_mul(&v);
    // restore exact symmetry lost to rounding
    let cov_t = cov.transpose();
    cov += cov_t;
    cov *= 0.5;
    Ok(PosteriorPredictive { mean, cov, jitter: factor.jitter })
}

/// Log marginal likelihood and the relative jitter it needed.
pub fn log_marginal_likelihood_detail(x: &DMatrix<f64>, y: &DVector<f64>, model: &GpModel) -> Result<(f64, f64)> {
    check_rows(x, y)?;
    let factor = Factor::new(&noisy_gram(x, model)?)?;
    let alpha = factor.chol.solve(y);
    let n = y.len() as f64;
    let value = -0.5 * y.dot(&alpha) - 0.5 * factor.log_det() - 0.5 * n * (2.0 * PI).ln();
    Ok((value, factor.jitter))
}

/// `log N(y | 0, K + s^2 I)`.
pub fn log_marginal_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, model: &GpModel) -> Result<f64> {
    log_marginal_likelihood_detail(x, y, model).map(|(v, _)| v)
}

/// Sensitivity of the noisy posterior mean to the overall kernel scale.
///
/// `net` gives the base kernel `K`; the model at scale `c` has kernel
/// `c^2 K` and noise `s^2`. Returns `(||m_{c1} - m_{c2}||, bound)` in the
/// spectral norm, where the bound is
/// `2 ||K_{*X}|| ||K^-1 y|| max_c e_c ||K^-1|| / (1 - e_c ||K^-1||)` with
/// `e_c = s^2 / c^2`. Errors with [`Error::ProvisoViolated`] unless
/// `e_c ||K^-1|| < 1` for both scales.
pub fn perturbation_bound(
    xstar: &DMatrix<f64>,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    net: &NetworkHyper,
    c1: f64,
    c2: f64,
    s: f64,
) -> Result<(f64, f64)> {
    check_rows(x, y)?;
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidHyper(format!("scales must be positive, got {c1} and {c2}")));
    }
    let k = kernel_matrix(x, x, net)?;
    let ksx = kernel_matrix(xstar, x, net)?;
    let eig = k.clone().symmetric_eigenvalues();
    let lambda_min = eig.min();
    if lambda_min <= 0.0 {
        return Err(Error::Factorisation { max_jitter: 0.0 });
    }
    let inv_norm = 1.0 / lambda_min;
    let eps = |c: f64| s * s / (c * c);
    let worst = eps(c1).max(eps(c2)) * inv_norm;
    if worst >= 1.0 {
        return Err(Error::ProvisoViolated(worst));
    }

    let mean_at = |c: f64| -> Result<DVector<f64>> {
        let mut kc = k.clone();
        for i in 0..kc.nrows() {
            kc[(i, i)] += eps(c);
        }
        let chol = Cholesky::new(kc).ok_or(Error::Factorisation { max_jitter: 0.0 })?;
        Ok(&ksx * chol.solve(y))
    };
    let lhs = (mean_at(c1)? - mean_at(c2)?).norm();

    let chol = Cholesky::new(k).ok_or(Error::Factorisation { max_jitter: 0.0 })?;
    let kinv_y = chol.solve(y).norm();
    let ksx_norm = ksx.singular_values().max();
    let term = |c: f64| inv_norm / (1.0 - inv_norm * eps(c)) * eps(c);
    let bound = 2.0 * ksx_norm * kinv_y * term(c1).max(term(c2));
    Ok((lhs, bound))
}

/// Points `cos(t) e1 + sin(t) e2` for `t = 2 pi k / n_points`, with `e1`, `e2`
/// the first two columns of the orthogonal factor of a seeded Gaussian
/// matrix. Returns the points and the parameters `t`.
pub fn circle_traversal(dim: usize, n_points: usize, seed: u64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if dim < 2 {
        return Err(Error::Shape(format!("circle needs at least 2 dimensions, got {dim}")));
    }
    let mut rng = substream(seed, Stream::Rotation, 0);
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let q = g.qr().q();
    let (e1, e2) = (q.column(0), q.column(1));
    let t: Vec<f64> = (0..n_points).map(|k| 2.0 * PI * k as f64 / n_points as f64).collect();
    let pts = DMatrix::from_fn(n_points, dim, |i, j| t[i].cos() * e1[j] + t[i].sin() * e2[j]);
    Ok((pts, t))
}
