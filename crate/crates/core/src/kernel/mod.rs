//! Limiting kernels of wide LReLU networks with non-zero-mean weights.
//!
//! [`single`] holds the closed-form second moments of one LReLU unit fed a
//! bivariate Gaussian pre-activation; [`deep`] composes them through the
//! layers of a network, carrying second moments and first moments (means)
//! together; [`matrix`] builds Gram matrices.

pub mod deep;
pub mod matrix;
pub mod single;

pub use deep::{arccos_reference, deep_kernel, input_state, layer_step, output_moments, OutputMoments};
pub use matrix::{kernel_matrix, kernel_matrix_with, output_covariance, output_mean};
pub use single::{
    abs_kernel, cross_term, folded_mean, linear_kernel, lrelu_kernel, lrelu_mean, single_layer_kernel_with_bias,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layer-constant prior of a weight matrix: entries have mean `mu / n` and
/// standard deviation `sigma / sqrt(n)` for fan-in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerHyper {
    pub mu: f64,
    pub sigma: f64,
}

impl LayerHyper {
    pub fn new(mu: f64, sigma: f64) -> Self {
        LayerHyper { mu, sigma }
    }

    /// From a mean and a variance `sigma^2`.
    pub fn from_variance(mu: f64, sigma2: f64) -> Self {
        LayerHyper { mu, sigma: sigma2.sqrt() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidHyper(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidHyper(format!("mu must be finite, got {}", self.mu)));
        }
        Ok(())
    }
}

/// Everything that determines the limiting kernel of an infinitely wide MLP.
///
/// `layers[0]` maps the input; when `final_layer_linear` is set the last
/// entry is the linear read-out and the network has `layers.len() - 1`
/// LReLU layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkHyper {
    pub slope: f64,
    pub input_dim: usize,
    pub layers: Vec<LayerHyper>,
    pub final_layer_linear: bool,
}

impl NetworkHyper {
    /// `depth` weight layers sharing one `(mu, sigma)`, linear read-out.
    pub fn uniform(depth: usize, input_dim: usize, slope: f64, layer: LayerHyper) -> Self {
        NetworkHyper { slope, input_dim, layers: vec![layer; depth], final_layer_linear: true }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of LReLU layers.
    pub fn hidden_layers(&self) -> usize {
        if self.final_layer_linear {
            self.layers.len() - 1
        } else {
            self.layers.len()
        }
    }

    /// Same structure with `layer` substituted in every position.
    pub fn with_uniform(&self, layer: LayerHyper) -> Self {
        NetworkHyper { layers: vec![layer; self.layers.len()], ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidHyper("network needs at least one layer".into()));
        }
        if !(self.slope > -1.0 && self.slope <= 1.0) {
            return Err(Error::InvalidHyper(format!("LReLU slope must lie in (-1, 1], got {}", self.slope)));
        }
        if self.input_dim == 0 {
            return Err(Error::InvalidHyper("input dimension must be positive".into()));
        }
        self.layers.iter().try_for_each(LayerHyper::validate)
    }
}

/// Two jointly Gaussian pre-activations `G_i ~ N(t_i, s_i^2)` with
/// correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreActivation {
    pub s1: f64,
    pub s2: f64,
    pub rho: f64,
    pub t1: f64,
    pub t2: f64,
}

impl PreActivation {
    pub fn new(s1: f64, s2: f64, rho: f64, t1: f64, t2: f64) -> Self {
        PreActivation { s1, s2, rho, t1, t2 }
    }

    /// Both arguments equal to `N(t, s^2)`.
    pub fn diagonal(s: f64, t: f64) -> Self {
        PreActivation { s1: s, s2: s, rho: 1.0, t1: t, t2: t }
    }

    pub fn swap(self) -> Self {
        PreActivation { s1: self.s2, s2: self.s1, rho: self.rho, t1: self.t2, t2: self.t1 }
    }

    pub fn scaled(self, c: f64) -> Self {
        PreActivation { s1: c * self.s1, s2: c * self.s2, rho: self.rho, t1: c * self.t1, t2: c * self.t2 }
    }

    /// Standardised means `t_i / s_i`.
    pub fn standardised_means(&self) -> (f64, f64) {
        (self.t1 / self.s1, self.t2 / self.s2)
    }
}

/// Post-activation moments of one layer at two inputs `x`, `y`:
/// second moments `k` and means `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelState {
    pub k_xx: f64,
    pub k_yy: f64,
    pub k_xy: f64,
    pub m_x: f64,
    pub m_y: f64,
}

impl KernelState {
    pub fn normalised(&self) -> f64 {
        self.k_xy / (self.k_xx * self.k_yy).sqrt()
    }
}
