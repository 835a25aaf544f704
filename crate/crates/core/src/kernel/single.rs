//! One LReLU unit applied to a bivariate Gaussian pre-activation.
//!
//! The LReLU splits as `psi(z) = ((1+a) z + (1-a)|z|) / 2`, so its product
//! moment is a weighted sum of the linear, cross and absolute-value
//! moments below.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use super::PreActivation;
use crate::error::{Error, Result};
use crate::special::{bvn_cdf, bvn_pdf, erf, std_normal_cdf, std_normal_pdf, BvnArgs};

/// Below this `sin(theta)` the absolute-value kernel uses its `rho = +-1`
/// limit; the erf terms divide by `sin(theta)`.
pub const SIN_THETA_FLOOR: f64 = 1e-7;

/// `E[G1 G2] = s1 s2 rho + t1 t2`
pub fn linear_kernel(p: PreActivation) -> f64 {
    p.s1 * p.s2 * p.rho + p.t1 * p.t2
}

/// Mean of the folded normal `E|G|` for `G ~ N(mu_std * sigma, sigma^2)`.
pub fn folded_mean(mu_std: f64, sigma: f64) -> f64 {
    sigma * (mu_std * erf(mu_std * FRAC_1_SQRT_2) + 2.0 * std_normal_pdf(mu_std))
}

/// `E[Q|Q|]` for `Q ~ N(m, 1)`.
fn signed_square_mean(m: f64) -> f64 {
    (1.0 + m * m) * erf(m * FRAC_1_SQRT_2) + 2.0 * m * std_normal_pdf(m)
}

/// `E|(Z + a)(Z + b)|` for standard normal `Z`: the `rho = 1` limit of the
/// standardised absolute-value kernel.
fn abs_product_collinear(a: f64, b: f64) -> f64 {
    let (lo, hi) = if -a < -b { (-a, -b) } else { (-b, -a) };
    let anti = |z: f64| (1.0 + a * b) * std_normal_cdf(z) - (z + a + b) * std_normal_pdf(z);
    // (Z+a)(Z+b) is negative exactly on (lo, hi)
    (1.0 + a * b) - 2.0 * (anti(hi) - anti(lo))
}

/// `E|G1||G2|`, the kernel of the absolute-value activation.
pub fn abs_kernel(p: PreActivation) -> f64 {
    let ss = p.s1 * p.s2;
    let (m1, m2) = p.standardised_means();
    let rho = p.rho.clamp(-1.0, 1.0);
    let sin2 = (1.0 - rho) * (1.0 + rho);
    let sin_t = sin2.sqrt();

    if sin_t < SIN_THETA_FLOOR || !m1.is_finite() || !m2.is_finite() {
        return if rho > 0.0 {
            ss * abs_product_collinear(m1, m2)
        } else {
            ss * abs_product_collinear(m1, -m2)
        };
    }

    let orthant = 4.0 * bvn_cdf(BvnArgs::new(m1, m2, rho)) - 2.0 * std_normal_cdf(m1) - 2.0 * std_normal_cdf(m2) + 1.0;
    let denom = SQRT_2 * sin_t;
    let density = bvn_pdf(BvnArgs::new(m1, m2, rho)).expect("|rho| < 1 checked above");
    ss * ((m1 * m2 + rho) * orthant
        + 2.0 * m1 * std_normal_pdf(m2) * erf((m1 - rho * m2) / denom)
        + 2.0 * m2 * std_normal_pdf(m1) * erf((m2 - rho * m1) / denom)
        + 4.0 * sin2 * density)
}

/// `E[G1 |G2|]`.
///
/// Writing `G1 = s1 (rho Z1 + sqrt(1-rho^2) Z2 + m1)` and `G2 = s2 Q` with
/// `Q = Z1 + m2`, the `Z2` part drops out and
/// `E[G1|G2|] = s1 s2 (rho E[Q|Q|] - rho m2 E|Q| + m1 E|Q|)`.
pub fn cross_term(p: PreActivation) -> f64 {
    let (m1, m2) = p.standardised_means();
    let rho = p.rho.clamp(-1.0, 1.0);
    let abs_q = folded_mean(m2, 1.0);
    p.s1 * p.s2 * (rho * (signed_square_mean(m2) - m2 * abs_q) + m1 * abs_q)
}

/// `E[psi(G1) psi(G2)]` for `psi(z) = max(a z, z)`.
pub fn lrelu_kernel(p: PreActivation, a: f64) -> f64 {
    let lin = (1.0 + a) * (1.0 + a);
    let mixed = 1.0 - a * a;
    let abs = (1.0 - a) * (1.0 - a);
    let mut k = lin * linear_kernel(p);
    if mixed != 0.0 {
        k += mixed * (cross_term(p) + cross_term(p.swap()));
    }
    if abs != 0.0 {
        k += abs * abs_kernel(p);
    }
    0.25 * k
}

/// Below this standardised mean the positive-part moments switch to their
/// asymptotic series; the closed forms cancel there.
const TAIL_SERIES_FROM: f64 = -8.0;

/// `(E[(Z + m)_+], E[(Z + m)_+^2])` for standard normal `Z`.
pub fn positive_part_moments(m: f64) -> (f64, f64) {
    if m >= TAIL_SERIES_FROM {
        let (cdf, pdf) = (std_normal_cdf(m), std_normal_pdf(m));
        return (m * cdf + pdf, (1.0 + m * m) * cdf + m * pdf);
    }
    // phi(u) * int_0^inf x^k exp(-u x - x^2/2) dx, expanding exp(-x^2/2)
    let u = -m;
    let inv_u2 = 1.0 / (u * u);
    let (mut t1, mut t2) = (inv_u2, 2.0 * inv_u2 / u);
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 0..40 {
        s1 += t1;
        s2 += t2;
        let kf = k as f64;
        let n1 = -t1 * (2.0 * kf + 3.0) * inv_u2;
        let n2 = -t2 * (2.0 * kf + 3.0) * (kf + 2.0) / (kf + 1.0) * inv_u2;
        if n1.abs() >= t1.abs() || n2.abs() >= t2.abs() || n2.abs() < 1e-17 * s2.abs() {
            break;
        }
        t1 = n1;
        t2 = n2;
    }
    let pdf = std_normal_pdf(u);
    (pdf * s1, pdf * s2)
}

/// `E[psi(G)]` for `G ~ N(mean, sigma^2)`.
pub fn lrelu_mean(mean: f64, sigma: f64, a: f64) -> f64 {
    if a == 1.0 {
        return mean;
    }
    let m = mean / sigma;
    // psi(z) = z_+ - a (-z)_+, both parts non-negative
    sigma * (positive_part_moments(m).0 - a * positive_part_moments(-m).0)
}

/// `E[psi(G)^2]` for `G ~ N(mean, sigma^2)`. Agrees with the diagonal of
/// [`lrelu_kernel`] but stays accurate when the mean is many standard
/// deviations below zero.
pub fn lrelu_second_moment(mean: f64, sigma: f64, a: f64) -> f64 {
    let m = mean / sigma;
    sigma * sigma * (positive_part_moments(m).1 + a * a * positive_part_moments(-m).1)
}

/// Kernel of a single LReLU unit with bias: inputs are augmented with a
/// trailing 1, weights are `N(mu, diag(sigma_diag))` over the augmented
/// coordinates.
pub fn single_layer_kernel_with_bias(x1: &[f64], x2: &[f64], mu: &[f64], sigma_diag: &[f64], a: f64) -> Result<f64> {
    let n = x1.len();
    if x2.len() != n || mu.len() != n + 1 || sigma_diag.len() != n + 1 {
        return Err(Error::Shape(format!(
            "inputs of length {n} need mean and variance vectors of length {}, got x2={}, mu={}, sigma={}",
            n + 1,
            x2.len(),
            mu.len(),
            sigma_diag.len()
        )));
    }
    if sigma_diag.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidHyper("weight variances must be non-negative".into()));
    }
    let aug = |x: &[f64], i: usize| if i < n { x[i] } else { 1.0 };
    let (mut v11, mut v22, mut v12, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..=n {
        let (u, w) = (aug(x1, i), aug(x2, i));
        v11 += sigma_diag[i] * u * u;
        v22 += sigma_diag[i] * w * w;
        v12 += sigma_diag[i] * u * w;
        t1 += mu[i] * u;
        t2 += mu[i] * w;
    }
    if v11 <= 0.0 || v22 <= 0.0 {
        return Err(Error::DegenerateInput("augmented input has zero stretched norm".into()));
    }
    let (s1, s2) = (v11.sqrt(), v22.sqrt());
    Ok(lrelu_kernel(PreActivation::new(s1, s2, v12 / (s1 * s2), t1, t2), a))
}
