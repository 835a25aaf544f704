//! Inference over the shared layer hyperparameters `(mu, sigma^2)`: the
//! hyper-prior, likelihood surfaces on a grid, random-walk Metropolis-Hastings
//! and the predictive averaged over hyper-posterior samples.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gp::{log_marginal_likelihood_detail, posterior_predictive, GpModel, PosteriorPredictive};
use crate::kernel::{LayerHyper, NetworkHyper};
use crate::output::{csv_string, fmt_float};
use crate::rng::{substream, Stream};

/// Independent `N(mu_mean, mu_var)` on `mu` and `InvGamma(ig_shape, ig_scale)`
/// on `sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperPrior {
    pub mu_mean: f64,
    pub mu_var: f64,
    pub ig_shape: f64,
    pub ig_scale: f64,
}

impl Default for HyperPrior {
    fn default() -> Self {
        HyperPrior { mu_mean: -1.0, mu_var: 2.0, ig_shape: 2.5, ig_scale: 6.0 }
    }
}

impl HyperPrior {
    pub fn logpdf(&self, mu: f64, sigma2: f64) -> Result<f64> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidHyper(format!("sigma^2 must be positive, got {sigma2}")));
        }
        let d = mu - self.mu_mean;
        let normal = -0.5 * (2.0 * PI * self.mu_var).ln() - d * d / (2.0 * self.mu_var);
        let (a, b) = (self.ig_shape, self.ig_scale);
        let inv_gamma = a * b.ln() - libm::lgamma(a) - (a + 1.0) * sigma2.ln() - b / sigma2;
        Ok(normal + inv_gamma)
    }
}

/// Network with `(mu, sigma^2)` substituted into every layer of `template`.
pub fn network_at(template: &NetworkHyper, mu: f64, sigma2: f64) -> NetworkHyper {
    template.with_uniform(LayerHyper::from_variance(mu, sigma2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    LogMl,
    LogPosterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mu_range: (f64, f64),
    pub sig2_range: (f64, f64),
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { mu_range: (-2.5, 1.0), sig2_range: (0.1, 8.0), resolution: 200 }
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let (ml, mh) = self.mu_range;
        let (sl, sh) = self.sig2_range;
        if self.resolution == 0 {
            return Err(Error::Config("grid resolution must be positive".into()));
        }
        if self.resolution > 1 && !(ml < mh && sl < sh) {
            return Err(Error::Config("grid ranges need lo < hi".into()));
        }
        if !(sl > 0.0) {
            return Err(Error::Config("sigma^2 axis must be positive".into()));
        }
        Ok(())
    }

    pub fn mu_axis(&self) -> Vec<f64> {
        axis(self.mu_range.0, self.mu_range.1, self.resolution)
    }

    pub fn sig2_axis(&self) -> Vec<f64> {
        axis(self.sig2_range.0, self.sig2_range.1, self.resolution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub mu: f64,
    pub sigma2: f64,
    pub value: f64,
}

/// Surface over the grid plus its maxima. `values[(i, j)]` is at
/// `sig2_axis[i]`, `mu_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub target: Target,
    pub mu_axis: Vec<f64>,
    pub sig2_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    /// The same target along `mu = 0` exactly, on `sig2_axis`.
    pub mu0_values: Vec<f64>,
    pub argmax: GridPoint,
    pub argmax_mu0: GridPoint,
    pub failed_cells: usize,
    pub jittered_cells: usize,
}

#[derive(Debug, Serialize)]
struct GridMeta<'a> {
    target: Target,
    resolution: usize,
    mu_range: (f64, f64),
    sig2_range: (f64, f64),
    argmax: &'a GridPoint,
    argmax_mu0: &'a GridPoint,
    failed_cells: usize,
    jittered_cells: usize,
}

impl GridResult {
    /// Rows follow the `sigma^2` axis; the header holds the `mu` axis.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["sigma2\\mu".to_string()];
        header.extend(self.mu_axis.iter().map(|&m| fmt_float(m)));
        let rows = self.sig2_axis.iter().enumerate().map(|(i, &s)| {
            let mut row = vec![fmt_float(s)];
            row.extend(self.values.row(i).iter().map(|&v| fmt_float(v)));
            row
        });
        csv_string(&header, rows)
    }

    pub fn mu0_csv(&self) -> String {
        csv_string(
            &["sigma2", "value"],
            self.sig2_axis.iter().zip(&self.mu0_values).map(|(&s, &v)| vec![fmt_float(s), fmt_float(v)]),
        )
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        let meta = GridMeta {
            target: self.target,
            resolution: self.mu_axis.len(),
            mu_range: (self.mu_axis[0], *self.mu_axis.last().expect("non-empty axis")),
            sig2_range: (self.sig2_axis[0], *self.sig2_axis.last().expect("non-empty axis")),
            argmax: &self.argmax,
            argmax_mu0: &self.argmax_mu0,
            failed_cells: self.failed_cells,
            jittered_cells: self.jittered_cells,
        };
        serde_json::to_value(meta).expect("plain data serialises")
    }
}

/// Everything needed to evaluate the hyper-posterior at a point.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub x: &'a DMatrix<f64>,
    pub y: &'a DVector<f64>,
    pub template: &'a NetworkHyper,
    pub noise_var: f64,
    pub prior: HyperPrior,
}

impl Problem<'_> {
    /// Target value and jitter; failures of the factorisation map to `-inf`.
    fn eval(&self, mu: f64, sigma2: f64, target: Target) -> (f64, Option<f64>) {
        if !(sigma2 > 0.0) {
            return (f64::NEG_INFINITY, None);
        }
        let model = GpModel { net: network_at(self.template, mu, sigma2), noise_var: self.noise_var };
        match log_marginal_likelihood_detail(self.x, self.y, &model) {
            Ok((ll, jitter)) => {
                let v = match target {
                    Target::LogMl => ll,
                    Target::LogPosterior => ll + self.prior.logpdf(mu, sigma2).expect("sigma2 > 0 checked"),
                };
                (v, Some(jitter))
            }
            Err(_) => (f64::NEG_INFINITY, None),
        }
    }

    pub fn log_ml(&self, mu: f64, sigma2: f64) -> f64 {
        self.eval(mu, sigma2, Target::LogMl).0
    }

    pub fn log_posterior(&self, mu: f64, sigma2: f64) -> f64 {
        self.eval(mu, sigma2, Target::LogPosterior).0
    }
}

fn best(points: impl Iterator<Item = GridPoint>) -> GridPoint {
    points.fold(GridPoint { mu: f64::NAN, sigma2: f64::NAN, value: f64::NEG_INFINITY }, |acc, p| {
        if p.value > acc.value || acc.mu.is_nan() { p } else { acc }
    })
}

pub fn grid_eval(problem: &Problem, spec: &GridSpec, target: Target) -> Result<GridResult> {
    grid_eval_with(problem, spec, target, Execution::default())
}

pub fn grid_eval_with(problem: &Problem, spec: &GridSpec, target: Target, exec: Execution) -> Result<GridResult> {
    spec.validate()?;
    problem.template.validate()?;
    let mu_axis = spec.mu_axis();
    let sig2_axis = spec.sig2_axis();
    let (nm, ns) = (mu_axis.len(), sig2_axis.len());
    let cells = exec.map(ns * nm, |c| problem.eval(mu_axis[c % nm], sig2_axis[c / nm], target));
    let line = exec.map(ns, |i| problem.eval(0.0, sig2_axis[i], target));

    let failed_cells = cells.iter().chain(&line).filter(|(_, j)| j.is_none()).count();
    let jittered_cells = cells.iter().chain(&line).filter(|(_, j)| matches!(j, Some(e) if *e > 0.0)).count();
    let values = DMatrix::from_fn(ns, nm, |i, j| cells[i * nm + j].0);
    let mu0_values: Vec<f64> = line.iter().map(|(v, _)| *v).collect();

    let argmax = best((0..ns * nm).map(|c| GridPoint { mu: mu_axis[c % nm], sigma2: sig2_axis[c / nm], value: cells[c].0 }));
    let argmax_mu0 = best((0..ns).map(|i| GridPoint { mu: 0.0, sigma2: sig2_axis[i], value: mu0_values[i] }));
    Ok(GridResult { target, mu_axis, sig2_axis, values, mu0_values, argmax, argmax_mu0, failed_cells, jittered_cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub prop_var_mu: f64,
    pub prop_var_sig2: f64,
    pub prop_corr: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig { prop_var_mu: 2.38, prop_var_sig2: 4.76, prop_corr: -0.9, burn_in: 20, thin: 20, n_samples: 100, seed: 0 }
    }
}

impl MhConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prop_corr.abs() < 1.0 && self.prop_var_mu > 0.0 && self.prop_var_sig2 > 0.0) {
            return Err(Error::Config("proposal covariance must be positive definite".into()));
        }
        if self.thin == 0 || self.n_samples == 0 {
            return Err(Error::Config("thin and n_samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Lower Cholesky factor of the proposal covariance.
    fn proposal_factor(&self) -> [[f64; 2]; 2] {
        let l11 = self.prop_var_mu.sqrt();
        let c = self.prop_corr * (self.prop_var_mu * self.prop_var_sig2).sqrt();
        let l21 = c / l11;
        [[l11, 0.0], [l21, (self.prop_var_sig2 - l21 * l21).sqrt()]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub samples: Vec<(f64, f64)>,
    pub log_densities: Vec<f64>,
    pub acceptance_rate: f64,
}

impl Chain {
    /// Retained sample with the largest density.
    pub fn map(&self) -> Option<((f64, f64), f64)> {
        self.samples
            .iter()
            .zip(&self.log_densities)
            .fold(None, |acc, (&s, &d)| match acc {
                Some((_, bd)) if bd >= d => acc,
                _ => Some((s, d)),
            })
    }

    pub fn to_csv(&self) -> String {
        csv_string(
            &["mu", "sigma2", "log_density"],
            self.samples.iter().zip(&self.log_densities).map(|(&(m, s), &d)| vec![fmt_float(m), fmt_float(s), fmt_float(d)]),
        )
    }
}

/// Random-walk Metropolis on `(mu, sigma^2)` with the fixed Gaussian proposal of
/// `config`. Proposals with `sigma^2 <= 0` or `-inf` density are rejected.
pub fn mh_sample_target(log_density: impl Fn(f64, f64) -> f64, config: &MhConfig, init: (f64, f64)) -> Result<Chain> {
    config.validate()?;
    if !(init.1 > 0.0) {
        return Err(Error::InvalidHyper(format!("initial sigma^2 must be positive, got {}", init.1)));
    }
    let l = config.proposal_factor();
    let mut rng = substream(config.seed, Stream::Chain, 0);
    let mut cur = init;
    let mut cur_ld = log_density(cur.0, cur.1);
    let total = config.burn_in + config.thin * config.n_samples;
    let (mut accepted, mut samples, mut log_densities) = (0usize, Vec::new(), Vec::new());
    for it in 1..=total {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let u: f64 = rng.random();
        let prop = (cur.0 + l[0][0] * z1, cur.1 + l[1][0] * z1 + l[1][1] * z2);
        if prop.1 > 0.0 {
            let ld = log_density(prop.0, prop.1);
            let delta = ld - cur_ld;
            if ld > f64::NEG_INFINITY && (delta >= 0.0 || u.ln() < delta) {
                cur = prop;
                cur_ld = ld;
                accepted += 1;
            }
        }
        if it > config.burn_in && (it - config.burn_in).is_multiple_of(config.thin) {
            samples.push(cur);
            log_densities.push(cur_ld);
        }
    }
    Ok(Chain { samples, log_densities, acceptance_rate: accepted as f64 / total as f64 })
}

/// Hyper-posterior chain for a regression problem.
pub fn mh_sample(problem: &Problem, config: &MhConfig, init: (f64, f64)) -> Result<Chain> {
    problem.template.validate()?;
    mh_sample_target(|m, s| problem.log_posterior(m, s), config, init)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPredictive {
    pub mean: DVector<f64>,
    pub variance: DVector<f64>,
    /// Chain samples whose Gram matrix could not be factorised.
    pub skipped: usize,
}

/// Equal-weight mixture of the conditional predictives at the chain samples.
pub fn marginal_predictive(xstar: &DMatrix<f64>, problem: &Problem, chain: &Chain) -> Result<MarginalPredictive> {
    if chain.samples.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    // consecutive repeats are common in MH output; evaluate each state once
    let mut parts: Vec<(PosteriorPredictive, usize)> = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut skipped = 0;
    let mut last_ok = false;
    for &s in &chain.samples {
        if last == Some(s) {
            if last_ok {
                parts.last_mut().expect("pushed with last_ok").1 += 1;
            } else {
                skipped += 1;
            }
            continue;
        }
        last = Some(s);
        let model = GpModel { net: network_at(problem.template, s.0, s.1), noise_var: problem.noise_var };
        match posterior_predictive(xstar, problem.x, problem.y, &model) {
            Ok(p) => {
                parts.push((p, 1));
                last_ok = true;
            }
            Err(_) => {
                skipped += 1;
                last_ok = false;
            }
        }
    }
    if parts.is_empty() {
        return Err(Error::Factorisation { max_jitter: crate::gp::JITTER_LADDER[crate::gp::JITTER_LADDER.len() - 1] });
    }
    if parts.iter().all(|(p, _)| p.mean == parts[0].0.mean && p.cov == parts[0].0.cov) {
        let p = &parts[0].0;
        return Ok(MarginalPredictive { mean: p.mean.clone(), variance: p.variance(), skipped });
    }
    let total: usize = parts.iter().map(|(_, c)| c).sum();
    let w = |c: usize| c as f64 / total as f64;
    let m = xstar.nrows();
    let mut mean = DVector::zeros(m);
    let mut var = DVector::zeros(m);
    for (p, c) in &parts {
        mean += &p.mean * w(*c);
        var += p.variance() * w(*c);
    }
    for (p, c) in &parts {
        let d = &p.mean - &mean;
        var += d.component_mul(&d) * w(*c);
    }
    Ok(MarginalPredictive { mean, variance: var, skipped })
}
