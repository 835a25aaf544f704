//! Command-line front end. Every subcommand writes CSV/JSON files into the
//! `--out` directory; identical flags and seed give byte-identical files.

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde_json::json;

use crate::data::{gen_sine, gen_smooth_xor, load_snelson, Dataset};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::finite_net::{sample_function_values, sample_weights, F4Sigma, Generator, NetworkShape, WeightScheme};
use crate::gp::{circle_traversal, posterior_predictive, sample_prior, GpModel};
use crate::hyper::{grid_eval, marginal_predictive, mh_sample, network_at, Chain, GridSpec, HyperPrior, MhConfig, Problem, Target};
use crate::kernel::{arccos_reference, kernel_matrix, LayerHyper, NetworkHyper};
use crate::mmd::{convergence_experiment, ConvergenceConfig};
use crate::output::{csv_string, fmt_float, write_file, write_json};

#[derive(Debug, Parser)]
#[command(name = "nngp", version, about = "Limiting GPs of wide LReLU networks: kernels, regression, hyperparameter inference and convergence tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalised limiting kernel along a circle of input angles.
    KernelCurve(KernelCurveArgs),
    /// Fit hyperparameters on a dataset and report predictive errors.
    Fit(FitArgs),
    /// Log marginal likelihood or log posterior over a (mu, sigma^2) grid.
    Grid(GridArgs),
    /// Metropolis-Hastings chain over (mu, sigma^2).
    Mh(MhArgs),
    /// MMD^2 between finite networks and the limiting GP against width.
    Mmd(MmdArgs),
    /// Prior function draws along a great circle of inputs.
    PriorDraws(PriorDrawsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetArgs {
    /// Number of weight layers, including the linear read-out.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// LReLU negative slope.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub slope: f64,
    /// Weight mean.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Weight variance.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub sigma2: f64,
}

impl NetArgs {
    fn network(&self, input_dim: usize) -> Result<NetworkHyper> {
        if self.depth == 0 {
            return Err(Error::Config("--depth must be at least 1".into()));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::Config(format!("--sigma2 must be positive, got {}", self.sigma2)));
        }
        let net = NetworkHyper::uniform(self.depth, input_dim, self.slope, LayerHyper::from_variance(self.mu, self.sigma2));
        net.validate()?;
        Ok(net)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSel {
    Sine,
    Xor,
    Snelson(PathBuf),
}

impl FromStr for DatasetSel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sine" => Ok(DatasetSel::Sine),
            "xor" => Ok(DatasetSel::Xor),
            _ => match s.strip_prefix("snelson:") {
                Some(p) if !p.is_empty() => Ok(DatasetSel::Snelson(PathBuf::from(p))),
                _ => Err(format!("unknown dataset {s:?}; expected sine, xor or snelson:PATH")),
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// sine, xor or snelson:PATH
    #[arg(long, default_value = "sine")]
    pub dataset: DatasetSel,
    /// Observation noise variance.
    #[arg(long, default_value_t = 0.1)]
    pub noise_var: f64,
}

impl DataArgs {
    fn load(&self, seed: u64) -> Result<Dataset> {
        if !(self.noise_var >= 0.0) {
            return Err(Error::Config(format!("--noise-var must be non-negative, got {}", self.noise_var)));
        }
        let mut d = match &self.dataset {
            DatasetSel::Sine => gen_sine(seed),
            DatasetSel::Xor => gen_smooth_xor(seed),
            DatasetSel::Snelson(p) => load_snelson(p)?,
        };
        d.noise_var = self.noise_var;
        Ok(d)
    }
}

/// `mu_lo:mu_hi:sig_lo:sig_hi[:res]`, resolution 200 when omitted.
pub fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(parts.len() == 4 || parts.len() == 5) {
        return Err(format!("expected mu_lo:mu_hi:sig_lo:sig_hi[:res], got {s:?}"));
    }
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let resolution = match parts.get(4) {
        Some(r) => r.parse::<usize>().map_err(|_| format!("not a resolution: {r:?}"))?,
        None => 200,
    };
    let spec = GridSpec { mu_range: (num(parts[0])?, num(parts[1])?), sig2_range: (num(parts[2])?, num(parts[3])?), resolution };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Debug, Clone, Args)]
pub struct GridOpt {
    /// mu_lo:mu_hi:sig_lo:sig_hi[:res]
    #[arg(long, value_parser = parse_grid, default_value = "-2.5:1:0.1:8:200", allow_hyphen_values = true)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Args)]
pub struct PriorArgs {
    #[arg(long, default_value_t = HyperPrior::default().mu_mean, allow_hyphen_values = true)]
    pub prior_mu_mean: f64,
    #[arg(long, default_value_t = HyperPrior::default().mu_var)]
    pub prior_mu_var: f64,
    #[arg(long, default_value_t = HyperPrior::default().ig_shape)]
    pub prior_ig_shape: f64,
    #[arg(long, default_value_t = HyperPrior::default().ig_scale)]
    pub prior_ig_scale: f64,
}

impl PriorArgs {
    fn prior(&self) -> Result<HyperPrior> {
        if !(self.prior_mu_var > 0.0 && self.prior_ig_shape > 0.0 && self.prior_ig_scale > 0.0) {
            return Err(Error::Config("prior variance, shape and scale must be positive".into()));
        }
        Ok(HyperPrior { mu_mean: self.prior_mu_mean, mu_var: self.prior_mu_var, ig_shape: self.prior_ig_shape, ig_scale: self.prior_ig_scale })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Retained samples.
    #[arg(long, default_value_t = MhConfig::default().n_samples)]
    pub samples: usize,
    #[arg(long, default_value_t = MhConfig::default().burn_in)]
    pub burn_in: usize,
    #[arg(long, default_value_t = MhConfig::default().thin)]
    pub thin: usize,
    /// Initial (mu, sigma^2) as `mu:sigma2`; defaults to the prior mode.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
}

impl ChainArgs {
    fn config(&self, seed: u64) -> Result<MhConfig> {
        let c = MhConfig { n_samples: self.samples, burn_in: self.burn_in, thin: self.thin, seed, ..MhConfig::default() };
        c.validate()?;
        Ok(c)
    }

    fn init(&self, prior: &HyperPrior) -> Result<(f64, f64)> {
        match &self.init {
            None => Ok((prior.mu_mean, prior.ig_scale / (prior.ig_shape + 1.0))),
            Some(s) => {
                let bad = || Error::Config(format!("--init expects mu:sigma2, got {s:?}"));
                let (m, v) = s.split_once(':').ok_or_else(bad)?;
                Ok((m.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelCurveArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Number of angles in [0, pi].
    #[arg(long, default_value_t = 33)]
    pub points: usize,
    /// Also estimate the kernel from finite iid networks of this width.
    #[arg(long)]
    pub empirical_width: Option<usize>,
    /// Networks per empirical estimate.
    #[arg(long, default_value_t = 2000)]
    pub empirical_draws: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Mle,
    Map,
    MapMu0,
    MleMu0,
    Marginal,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, value_enum, default_value_t = Estimator::Mle)]
    pub estimator: Estimator,
    #[command(flatten)]
    pub grid: GridOpt,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    LogMl,
    LogPosterior,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub grid: GridOpt,
    #[arg(long, value_enum, default_value_t = TargetArg::LogMl)]
    pub target: TargetArg,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MhArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Iid,
    F1,
    F2,
    F3,
    F4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum F4SigmaArg {
    Analytic,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Iid)]
    pub scheme: SchemeArg,
    /// Standard deviation of the Gaussian first and last layers of RCE schemes.
    #[arg(long, default_value_t = SQRT_2)]
    pub boundary_sigma: f64,
    /// Which sigma the F4 limit uses.
    #[arg(long, value_enum, default_value_t = F4SigmaArg::Analytic)]
    pub f4_sigma: F4SigmaArg,
}

impl SchemeArgs {
    fn scheme(&self, net: &NetArgs) -> Result<WeightScheme> {
        if !(self.boundary_sigma > 0.0) {
            return Err(Error::Config("--boundary-sigma must be positive".into()));
        }
        let rce = |generator| WeightScheme::Rce { generator, boundary_sigma: self.boundary_sigma };
        Ok(match self.scheme {
            SchemeArg::Iid => {
                net.network(1)?;
                WeightScheme::Iid { mu: net.mu, sigma: net.sigma2.sqrt() }
            }
            SchemeArg::F1 => rce(Generator::F1),
            SchemeArg::F2 => rce(Generator::F2),
            SchemeArg::F3 => rce(Generator::F3),
            SchemeArg::F4 => rce(Generator::F4),
        })
    }

    fn f4(&self) -> F4Sigma {
        match self.f4_sigma {
            F4SigmaArg::Analytic => F4Sigma::Analytic,
            F4SigmaArg::Table => F4Sigma::Table,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MmdArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// w1,w2,... (nondecreasing)
    #[arg(long, value_delimiter = ',', default_values_t = [16, 64, 256, 1024])]
    pub widths: Vec<usize>,
    /// Draws per side at each width.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Number of probe inputs.
    #[arg(long, default_value_t = 4)]
    pub probes: usize,
    #[arg(long, default_value_t = 10)]
    pub input_dim: usize,
    #[arg(long, default_value_t = 200)]
    pub permutations: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PriorDrawsArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Input dimension of the circle.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Points along the circle.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 5)]
    pub draws: usize,
    /// Draw from finite networks of this width instead of the limiting GP.
    #[arg(long)]
    pub width: Option<usize>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// With --width, also write the weights of the first network.
    #[arg(long)]
    pub dump_weights: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Parse arguments, run, and map the outcome to an exit code: 0 on success,
/// 2 for invalid configuration, 1 for runtime failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(warnings) => {
            if warnings > 0 {
                eprintln!("warning: {warnings} grid cells or chain samples failed; see the JSON metadata");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidHyper(_) | Error::Parse { .. } | Error::Shape(_) | Error::TooFewSamples { .. } => 2,
                _ => 1,
            }
        }
    }
}

/// Run a parsed command; returns the number of reported partial failures.
pub fn run(cli: &Cli) -> Result<usize> {
    match &cli.command {
        Command::KernelCurve(a) => kernel_curve(a),
        Command::Fit(a) => fit(a),
        Command::Grid(a) => grid(a),
        Command::Mh(a) => mh(a),
        Command::Mmd(a) => mmd(a),
        Command::PriorDraws(a) => prior_draws(a),
    }
}

fn out_file(run: &RunArgs, name: &str) -> PathBuf {
    run.out.join(name)
}

fn matrix_rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect()
}

fn kernel_curve(a: &KernelCurveArgs) -> Result<usize> {
    if a.points == 0 {
        return Err(Error::Config("--points must be positive".into()));
    }
    let net = a.net.network(2)?;
    let thetas: Vec<f64> = (0..a.points).map(|i| if a.points == 1 { 0.0 } else { PI * i as f64 / (a.points - 1) as f64 }).collect();
    let x = DMatrix::from_fn(a.points + 1, 2, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        (i, 0) => thetas[i - 1].cos(),
        (i, _) => thetas[i - 1].sin(),
    });
    let k = kernel_matrix(&x, &x, &net)?;
    let normalised: Vec<f64> = (1..=a.points).map(|i| k[(0, i)] / (k[(0, 0)] * k[(i, i)]).sqrt()).collect();

    let empirical = match a.empirical_width {
        None => None,
        Some(0) => return Err(Error::Config("--empirical-width must be positive".into())),
        Some(w) => {
            if a.empirical_draws < 2 {
                return Err(Error::TooFewSamples { need: 2, got: a.empirical_draws });
            }
            let scheme = WeightScheme::Iid { mu: a.net.mu, sigma: a.net.sigma2.sqrt() };
            let shape = NetworkShape::uniform(2, a.net.depth, w);
            let f = sample_function_values(&shape, &scheme, a.net.slope, a.run.seed, &x, a.empirical_draws, Execution::default())?;
            let second = |i: usize, j: usize| f.column(i).dot(&f.column(j)) / a.empirical_draws as f64;
            Some((0..a.points).map(|i| second(0, i + 1) / (second(0, 0) * second(i + 1, i + 1)).sqrt()).collect::<Vec<_>>())
        }
    };

    let mut header = vec!["theta", "normalised", "zero_mean_reference"];
    if empirical.is_some() {
        header.push("empirical");
    }
    let rows = (0..a.points).map(|i| {
        let mut r = vec![fmt_float(thetas[i]), fmt_float(normalised[i]), fmt_float(arccos_reference(thetas[i], a.net.slope, net.hidden_layers()))];
        if let Some(e) = &empirical {
            r.push(fmt_float(e[i]));
        }
        r
    });
    write_file(&out_file(&a.run, "kernel_curve.csv"), &csv_string(&header, rows))?;
    Ok(0)
}

fn problem<'a>(d: &'a Dataset, template: &'a NetworkHyper, prior: HyperPrior) -> Problem<'a> {
    Problem { x: &d.x_train, y: &d.y_train, template, noise_var: d.noise_var, prior }
}

fn mse(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm_squared() / a.len() as f64
}

fn predictive_csv(d: &Dataset, train: (&DVector<f64>, &DVector<f64>), test: (&DVector<f64>, &DVector<f64>)) -> String {
    let dim = d.input_dim();
    let mut header = vec!["split".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.extend(["y", "mean", "variance"].map(String::from));
    let mut rows = Vec::new();
    for (split, x, y, (m, v)) in [("train", &d.x_train, &d.y_train, train), ("test", &d.x_test, &d.y_test, test)] {
        for i in 0..x.nrows() {
            let mut r = vec![split.to_string()];
            r.extend(x.row(i).iter().map(|&v| fmt_float(v)));
            r.extend([y[i], m[i], v[i]].map(fmt_float));
            rows.push(r);
        }
    }
    csv_string(&header, rows)
}

fn fit(a: &FitArgs) -> Result<usize> {
    let d = a.data.load(a.run.seed)?;
    let template = a.net.network(d.input_dim())?;
    let prior = a.prior.prior()?;
    let p = problem(&d, &template, prior);
    let (train, test, report, warnings) = match a.estimator {
        Estimator::Marginal => {
            let cfg = a.chain.config(a.run.seed)?;
            let chain = mh_sample(&p, &cfg, a.chain.init(&prior)?)?;
            let tr = marginal_predictive(&d.x_train, &p, &chain)?;
            let te = marginal_predictive(&d.x_test, &p, &chain)?;
            let skipped = te.skipped;
            write_file(&out_file(&a.run, "chain.csv"), &chain.to_csv())?;
            let report = json!({
                "acceptance_rate": chain.acceptance_rate,
                "chain_samples": chain.samples.len(),
                "skipped_samples": skipped,
                "map_sample": chain.map().map(|((m, s), v)| json!({"mu": m, "sigma2": s, "log_posterior": v})),
            });
            ((tr.mean, tr.variance), (te.mean, te.variance), report, skipped)
        }
        est => {
            a.grid.grid.validate()?;
            let target = if matches!(est, Estimator::Mle | Estimator::MleMu0) { Target::LogMl } else { Target::LogPosterior };
            let g = grid_eval(&p, &a.grid.grid, target)?;
            let best = if matches!(est, Estimator::Mle | Estimator::Map) { g.argmax } else { g.argmax_mu0 };
            if !best.value.is_finite() {
                return Err(Error::Factorisation { max_jitter: crate::gp::JITTER_LADDER[crate::gp::JITTER_LADDER.len() - 1] });
            }
            let model = GpModel::new(network_at(&template, best.mu, best.sigma2), d.noise_var)?;
            let tr = posterior_predictive(&d.x_train, &d.x_train, &d.y_train, &model)?;
            let te = posterior_predictive(&d.x_test, &d.x_train, &d.y_train, &model)?;
            let report = json!({ "mu": best.mu, "sigma2": best.sigma2, "target": target, "value": best.value, "failed_cells": g.failed_cells });
            ((tr.mean.clone(), tr.variance()), (te.mean.clone(), te.variance()), report, g.failed_cells)
        }
    };
    let meta = json!({
        "dataset": d.name,
        "estimator": a.estimator.to_possible_value().map(|v| v.get_name().to_string()),
        "depth": a.net.depth,
        "slope": a.net.slope,
        "noise_var": d.noise_var,
        "seed": a.run.seed,
        "hyperparameters": report,
        "train_mse": mse(&train.0, &d.y_train),
        "test_mse": mse(&test.0, &d.y_test),
        "test_target_variance": d.test_variance(),
    });
    write_json(&out_file(&a.run, "fit.json"), &meta)?;
    write_file(&out_file(&a.run, "predictive.csv"), &predictive_csv(&d, (&train.0, &train.1), (&test.0, &test.1)))?;
    Ok(warnings)
}

fn grid(a: &GridArgs) -> Result<usize> {
    let d = a.data.load(a.run.seed)?;
    let template = a.net.network(d.input_dim())?;
    let p = problem(&d, &template, a.prior.prior()?);
    let target = match a.target {
        TargetArg::LogMl => Target::LogMl,
        TargetArg::LogPosterior => Target::LogPosterior,
    };
    let g = grid_eval(&p, &a.grid.grid, target)?;
    write_file(&out_file(&a.run, "grid.csv"), &g.to_csv())?;
    write_file(&out_file(&a.run, "grid_mu0.csv"), &g.mu0_csv())?;
    let mut meta = g.metadata_json();
    meta["dataset"] = json!(d.name);
    meta["depth"] = json!(a.net.depth);
    meta["slope"] = json!(a.net.slope);
    meta["noise_var"] = json!(d.noise_var);
    meta["seed"] = json!(a.run.seed);
    write_json(&out_file(&a.run, "grid.json"), &meta)?;
    Ok(g.failed_cells)
}

fn mh(a: &MhArgs) -> Result<usize> {
    let d = a.data.load(a.run.seed)?;
    let template = a.net.network(d.input_dim())?;
    let prior = a.prior.prior()?;
    let cfg = a.chain.config(a.run.seed)?;
    let init = a.chain.init(&prior)?;
    let chain: Chain = mh_sample(&problem(&d, &template, prior), &cfg, init)?;
    write_file(&out_file(&a.run, "chain.csv"), &chain.to_csv())?;
    let meta = json!({
        "dataset": d.name,
        "depth": a.net.depth,
        "init": init,
        "config": cfg,
        "prior": prior,
        "acceptance_rate": chain.acceptance_rate,
        "samples": chain.samples.len(),
    });
    write_json(&out_file(&a.run, "chain.json"), &meta)?;
    Ok(0)
}

fn mmd(a: &MmdArgs) -> Result<usize> {
    let scheme = a.scheme.scheme(&a.net)?;
    let cfg = ConvergenceConfig {
        depth: a.net.depth,
        widths: a.widths.clone(),
        d_probe: a.probes,
        n_samples: a.samples,
        input_dim: a.input_dim,
        slope: a.net.slope,
        n_perm: a.permutations,
        f4_sigma: a.scheme.f4(),
        seed: a.run.seed,
    };
    let curve = convergence_experiment(&scheme, &cfg)?;
    write_file(&out_file(&a.run, "mmd.csv"), &curve.to_csv())?;
    let meta = json!({
        "scheme": scheme.name(),
        "config": cfg,
        "probes": matrix_rows(&curve.probes),
        "vanished_gp_draws": curve.vanished_gp_draws,
    });
    write_json(&out_file(&a.run, "mmd.json"), &meta)?;
    Ok(0)
}

fn prior_draws(a: &PriorDrawsArgs) -> Result<usize> {
    if a.points == 0 || a.draws == 0 {
        return Err(Error::Config("--points and --draws must be positive".into()));
    }
    let (x, t) = circle_traversal(a.dim, a.points, a.run.seed)?;
    let f = match a.width {
        None => {
            let model = GpModel::new(a.net.network(a.dim)?, 0.0)?;
            sample_prior(&x, &model, a.draws, a.run.seed)?
        }
        Some(0) => return Err(Error::Config("--width must be positive".into())),
        Some(w) => {
            let scheme = a.scheme.scheme(&a.net)?;
            let shape = NetworkShape::uniform(a.dim, a.net.depth, w);
            let f = sample_function_values(&shape, &scheme, a.net.slope, a.run.seed, &x, a.draws, Execution::default())?;
            if a.dump_weights {
                let seed0 = crate::rng::child_seed(a.run.seed, crate::rng::Stream::Weights, 0);
                let net = sample_weights(&shape, &scheme, a.net.slope, seed0)?;
                net.dump(&out_file(&a.run, "weights.bin"), &out_file(&a.run, "weights.json"), &scheme.name())?;
            }
            f
        }
    };
    let mut header = vec!["t".to_string()];
    header.extend((1..=a.draws).map(|k| format!("f{k}")));
    let rows = (0..a.points).map(|i| {
        let mut r = vec![fmt_float(t[i])];
        r.extend(f.column(i).iter().map(|&v| fmt_float(v)));
        r
    });
    write_file(&out_file(&a.run, "prior_draws.csv"), &csv_string(&header, rows))?;
    Ok(0)
}
