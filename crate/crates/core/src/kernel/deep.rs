//! Layer-to-layer recursion of second moments and means.
//!
//! Layer `l` sees a Gaussian pre-activation whose covariance is
//! `sigma_l^2` times the previous layer's second moments and whose mean is
//! `mu_l` times the previous layer's post-activation mean; the first layer
//! sees `sigma_1^2 x.y / n0` and `mu_1 sum(x) / n0`.

use std::f64::consts::PI;

use super::single::{lrelu_kernel, lrelu_mean, lrelu_second_moment};
use super::{KernelState, LayerHyper, NetworkHyper, PreActivation};
use crate::error::{Error, Result};

/// Smallest pre-activation variance the recursion accepts.
pub const VANISHED_VARIANCE: f64 = 1e-300;

/// Pre-activation moments at one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PreMoments {
    pub var: f64,
    pub mean: f64,
}

/// Per-input quantities that do not depend on the second input: the
/// pre-activation moments of every LReLU layer and the final
/// post-activation moments.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PointChain {
    pub pre: Vec<PreMoments>,
    /// Post-activation second moment of every LReLU layer.
    pub k: Vec<f64>,
    pub sq_norm_scaled: f64,
    pub input_mean: f64,
    pub k_last: f64,
    pub m_last: f64,
}

fn check_variance(var: f64, layer: usize) -> Result<()> {
    if !var.is_finite() {
        return Err(Error::NonFinite { layer });
    }
    if var < VANISHED_VARIANCE {
        return Err(Error::VanishedSignal { layer, variance: var });
    }
    Ok(())
}

fn pair(vx: PreMoments, vy: PreMoments, cov: f64) -> PreActivation {
    let (s1, s2) = (vx.var.sqrt(), vy.var.sqrt());
    PreActivation::new(s1, s2, (cov / (s1 * s2)).clamp(-1.0, 1.0), vx.mean, vy.mean)
}

/// `E[psi(G1) psi(G2)]` given the one-point second moments `kx`, `ky`.
/// Identical pre-activations reuse `kx`; otherwise the bivariate value is
/// held to the Cauchy-Schwarz bound, which rounding in the strongly
/// mean-dominated regime can otherwise exceed.
fn cross_moment(vx: PreMoments, vy: PreMoments, cov: f64, kx: f64, ky: f64, a: f64) -> f64 {
    if vx == vy && cov >= vx.var {
        return kx;
    }
    let bound = (kx * ky).sqrt();
    lrelu_kernel(pair(vx, vy, cov), a).clamp(-bound, bound)
}

fn input_moments(x: &[f64], y: &[f64], layer: LayerHyper) -> (f64, f64, f64) {
    let n0 = x.len() as f64;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    (layer.sigma * layer.sigma * dot / n0, layer.mu * sx / n0, layer.mu * sy / n0)
}

fn check_input(x: &[f64], net: &NetworkHyper) -> Result<()> {
    if x.len() != net.input_dim {
        return Err(Error::Shape(format!("input of length {} for a network with {} inputs", x.len(), net.input_dim)));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateInput("zero-norm input".into()));
    }
    Ok(())
}

impl PointChain {
    pub(crate) fn new(x: &[f64], net: &NetworkHyper) -> Result<Self> {
        check_input(x, net)?;
        let a = net.slope;
        let (sq, mean, _) = input_moments(x, x, net.layers[0]);
        let mut pre = Vec::with_capacity(net.hidden_layers());
        let mut ks = Vec::with_capacity(net.hidden_layers());
        let mut cur = PreMoments { var: sq, mean };
        let (mut k, mut m) = (f64::NAN, f64::NAN);
        for l in 0..net.hidden_layers() {
            if l > 0 {
                let h = net.layers[l];
                cur = PreMoments { var: h.sigma * h.sigma * k, mean: h.mu * m };
            }
            check_variance(cur.var, l + 1)?;
            let s = cur.var.sqrt();
            k = lrelu_second_moment(cur.mean, s, a);
            m = lrelu_mean(cur.mean, s, a);
            pre.push(cur);
            ks.push(k);
        }
        Ok(PointChain { pre, k: ks, sq_norm_scaled: sq, input_mean: mean, k_last: k, m_last: m })
    }
}

/// First and second moments of the network output at two inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputMoments {
    pub second_moment: f64,
    pub mean_x: f64,
    pub mean_y: f64,
}

impl OutputMoments {
    pub fn covariance(&self) -> f64 {
        self.second_moment - self.mean_x * self.mean_y
    }
}

/// Output moments for inputs whose chains are already known; `input_cov`
/// is the first-layer pre-activation covariance.
pub(crate) fn pair_moments(cx: &PointChain, cy: &PointChain, input_cov: f64, net: &NetworkHyper) -> Result<OutputMoments> {
    let a = net.slope;
    let hidden = net.hidden_layers();
    let mut cov = input_cov;
    let mut k_xy = f64::NAN;
    for l in 0..hidden {
        if l > 0 {
            let h = net.layers[l];
            cov = h.sigma * h.sigma * k_xy;
        }
        k_xy = cross_moment(cx.pre[l], cy.pre[l], cov, cx.k[l], cy.k[l], a);
        if !k_xy.is_finite() {
            return Err(Error::NonFinite { layer: l + 1 });
        }
    }
    if !net.final_layer_linear {
        return Ok(OutputMoments { second_moment: k_xy, mean_x: cx.m_last, mean_y: cy.m_last });
    }
    let last = *net.layers.last().expect("validated network");
    if hidden == 0 {
        let (mx, my) = (cx.input_mean, cy.input_mean);
        return Ok(OutputMoments { second_moment: input_cov + mx * my, mean_x: mx, mean_y: my });
    }
    let (mx, my) = (last.mu * cx.m_last, last.mu * cy.m_last);
    Ok(OutputMoments { second_moment: last.sigma * last.sigma * k_xy + mx * my, mean_x: mx, mean_y: my })
}

pub(crate) fn input_covariance(x: &[f64], y: &[f64], net: &NetworkHyper) -> f64 {
    input_moments(x, y, net.layers[0]).0
}

/// Moments of the limiting network output at `x` and `y`.
pub fn output_moments(x: &[f64], y: &[f64], net: &NetworkHyper) -> Result<OutputMoments> {
    net.validate()?;
    let cx = PointChain::new(x, net)?;
    let cy = PointChain::new(y, net)?;
    pair_moments(&cx, &cy, input_covariance(x, y, net), net)
}

/// Limiting kernel `E[f(x) f(y)]` of the network.
pub fn deep_kernel(x: &[f64], y: &[f64], net: &NetworkHyper) -> Result<f64> {
    output_moments(x, y, net).map(|o| o.second_moment)
}

fn activate(vxx: f64, vyy: f64, vxy: f64, tx: f64, ty: f64, a: f64, layer: usize) -> Result<KernelState> {
    check_variance(vxx, layer)?;
    check_variance(vyy, layer)?;
    let px = PreMoments { var: vxx, mean: tx };
    let py = PreMoments { var: vyy, mean: ty };
    let (sx, sy) = (vxx.sqrt(), vyy.sqrt());
    let (k_xx, k_yy) = (lrelu_second_moment(tx, sx, a), lrelu_second_moment(ty, sy, a));
    let state = KernelState {
        k_xx,
        k_yy,
        k_xy: cross_moment(px, py, vxy, k_xx, k_yy, a),
        m_x: lrelu_mean(tx, sx, a),
        m_y: lrelu_mean(ty, sy, a),
    };
    if [state.k_xx, state.k_yy, state.k_xy, state.m_x, state.m_y].iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { layer });
    }
    Ok(state)
}

/// Post-activation state of the first layer.
pub fn input_state(x: &[f64], y: &[f64], first: LayerHyper, a: f64) -> Result<KernelState> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!("inputs of length {} and {}", x.len(), y.len())));
    }
    if x.iter().all(|&v| v == 0.0) || y.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateInput("zero-norm input".into()));
    }
    let (vxx, tx, _) = input_moments(x, x, first);
    let (vyy, ty, _) = input_moments(y, y, first);
    let (vxy, _, _) = input_moments(x, y, first);
    activate(vxx, vyy, vxy, tx, ty, a, 1)
}

/// Push a post-activation state through LReLU layer number `layer` (1-based,
/// used in error reports) with prior `hyper`.
pub fn layer_step(state: KernelState, hyper: LayerHyper, a: f64, layer: usize) -> Result<KernelState> {
    let s2 = hyper.sigma * hyper.sigma;
    activate(
        s2 * state.k_xx,
        s2 * state.k_yy,
        s2 * state.k_xy,
        hyper.mu * state.m_x,
        hyper.mu * state.m_y,
        a,
        layer,
    )
}

/// `cos(theta_L)` of the zero-mean LReLU recursion started at `theta0`.
pub fn arccos_reference(theta0: f64, a: f64, layers: usize) -> f64 {
    let c1 = (1.0 - a) * (1.0 - a) / (PI * (1.0 + a * a));
    let c2 = 2.0 * a / (1.0 + a * a);
    let mut cos_t = theta0.cos();
    for _ in 0..layers {
        let theta = cos_t.clamp(-1.0, 1.0).acos();
        cos_t = c1 * (theta.sin() + (PI - theta) * cos_t) + c2 * cos_t;
    }
    cos_t
}
