//! Unbiased MMD² between finite-width network outputs and draws from the
//! limiting GP, with a permutation null for scale.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::finite_net::{sample_function_values, F4Sigma, NetworkShape, WeightScheme};
use crate::kernel::{output_covariance, output_mean, NetworkHyper};
use crate::output::{csv_string, fmt_float};
use crate::rng::{child_seed, substream, Stream};

/// `n x d` function values; row `i` is one random function at the `d` probes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: DMatrix<f64>,
}

impl SampleSet {
    pub fn new(samples: DMatrix<f64>) -> Result<Self> {
        if samples.nrows() < 2 {
            return Err(Error::TooFewSamples { need: 2, got: samples.nrows() });
        }
        Ok(SampleSet { samples })
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }
}

#[inline]
fn gauss(a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2).exp()
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn check_pair(xs: &SampleSet, ys: &SampleSet) -> Result<()> {
    if xs.dim() != ys.dim() {
        return Err(Error::Shape(format!("sample dimensions {} and {} differ", xs.dim(), ys.dim())));
    }
    Ok(())
}

/// Unbiased U-statistic with `k(u, v) = exp(-|u - v|^2)`. May be negative.
pub fn mmd2_unbiased(xs: &SampleSet, ys: &SampleSet) -> Result<f64> {
    check_pair(xs, ys)?;
    let d = xs.dim();
    let (xr, yr) = (row_major(&xs.samples), row_major(&ys.samples));
    let (n, m) = (xs.len(), ys.len());
    let within = |v: &[f64], n: usize| {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += gauss(&v[i * d..(i + 1) * d], &v[j * d..(j + 1) * d]);
            }
        }
        2.0 * s / (n * (n - 1)) as f64
    };
    // summed in both loop orders so that swapping the arguments is exact
    let (mut by_x, mut by_y) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..m {
            by_x += gauss(&xr[i * d..(i + 1) * d], &yr[j * d..(j + 1) * d]);
        }
    }
    for j in 0..m {
        for i in 0..n {
            by_y += gauss(&xr[i * d..(i + 1) * d], &yr[j * d..(j + 1) * d]);
        }
    }
    let across = 0.5 * (by_x + by_y);
    Ok(within(&xr, n) + within(&yr, m) - 2.0 * across / (n * m) as f64)
}

/// Pooled Gram matrix of `xs` stacked over `ys`, for relabelling tests.
pub struct PooledGram {
    n: usize,
    m: usize,
    /// Strict upper triangle, row-major: row `i` holds `k(i, j)` for `j > i`.
    upper: Vec<f64>,
    offsets: Vec<usize>,
    row_totals: Vec<f64>,
}

impl PooledGram {
    pub fn new(xs: &SampleSet, ys: &SampleSet) -> Result<Self> {
        check_pair(xs, ys)?;
        let d = xs.dim();
        let mut all = row_major(&xs.samples);
        all.extend(row_major(&ys.samples));
        let (n, m) = (xs.len(), ys.len());
        let total = n + m;
        let mut offsets = Vec::with_capacity(total + 1);
        let mut upper = Vec::with_capacity(total * (total - 1) / 2);
        let mut row_totals = Vec::with_capacity(total);
        for i in 0..total {
            offsets.push(upper.len());
            let mut t = 0.0;
            for j in i + 1..total {
                let k = gauss(&all[i * d..(i + 1) * d], &all[j * d..(j + 1) * d]);
                upper.push(k);
                t += k;
            }
            row_totals.push(t);
        }
        offsets.push(upper.len());
        Ok(PooledGram { n, m, upper, offsets, row_totals })
    }

    /// MMD² when `is_y[i]` marks the pooled rows assigned to the second set.
    pub fn mmd2(&self, is_y: &[bool]) -> f64 {
        let w: Vec<f64> = is_y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for i in 0..self.n + self.m {
            let row = &self.upper[self.offsets[i]..self.offsets[i + 1]];
            let to_y: f64 = row.iter().zip(&w[i + 1..]).map(|(k, l)| k * l).sum();
            let to_x = self.row_totals[i] - to_y;
            if is_y[i] {
                syy += to_y;
                sxy += to_x;
            } else {
                sxx += to_x;
                sxy += to_y;
            }
        }
        let (n, m) = (self.n as f64, self.m as f64);
        2.0 * sxx / (n * (n - 1.0)) + 2.0 * syy / (m * (m - 1.0)) - 2.0 * sxy / (n * m)
    }

    /// Observed statistic (original labels).
    pub fn observed(&self) -> f64 {
        let labels: Vec<bool> = (0..self.n + self.m).map(|i| i >= self.n).collect();
        self.mmd2(&labels)
    }

    /// MMD² under `n_perm` random relabellings.
    pub fn permutation_null(&self, n_perm: usize, seed: u64) -> Vec<f64> {
        let mut rng = substream(seed, Stream::Permutation, 0);
        let mut labels: Vec<bool> = (0..self.n + self.m).map(|i| i >= self.n).collect();
        (0..n_perm)
            .map(|_| {
                labels.shuffle(&mut rng);
                self.mmd2(&labels)
            })
            .collect()
    }
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceConfig {
    pub depth: usize,
    pub widths: Vec<usize>,
    pub d_probe: usize,
    pub n_samples: usize,
    pub input_dim: usize,
    pub slope: f64,
    pub n_perm: usize,
    pub f4_sigma: F4Sigma,
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            depth: 4,
            widths: vec![16, 64, 256, 1024],
            d_probe: 4,
            n_samples: 2000,
            input_dim: 10,
            slope: 0.0,
            n_perm: 200,
            f4_sigma: F4Sigma::Analytic,
            seed: 0,
        }
    }
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() || self.widths.contains(&0) {
            return Err(Error::Config("widths must be a non-empty list of positive integers".into()));
        }
        if self.widths.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("widths must be nondecreasing".into()));
        }
        if self.n_samples < 2 {
            return Err(Error::TooFewSamples { need: 2, got: self.n_samples });
        }
        if self.d_probe == 0 || self.input_dim == 0 || self.depth < 1 {
            return Err(Error::Config("probe count, input dimension and depth must be positive".into()));
        }
        if self.n_perm < 2 {
            return Err(Error::Config("need at least 2 permutations for a null band".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub width: usize,
    pub mmd2: f64,
    pub null_low: f64,
    pub null_high: f64,
}

impl CurvePoint {
    pub fn in_null_band(&self) -> bool {
        self.null_low <= self.mmd2 && self.mmd2 <= self.null_high
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceCurve {
    pub points: Vec<CurvePoint>,
    pub probes: DMatrix<f64>,
    /// Per width, GP draws that were the zero function (see [`GpDraws`]).
    pub vanished_gp_draws: Vec<usize>,
    /// Per width, the permutation statistics behind the null band.
    pub null_samples: Vec<Vec<f64>>,
}

impl ConvergenceCurve {
    pub fn to_csv(&self) -> String {
        let rows = self.points.iter().map(|p| vec![p.width.to_string(), fmt_float(p.mmd2), fmt_float(p.null_low), fmt_float(p.null_high)]);
        csv_string(&["width", "mmd2", "null_low", "null_high"], rows)
    }
}

/// Probe inputs, `d_probe x input_dim` standard Gaussians.
pub fn probe_points(d_probe: usize, input_dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = substream(seed, Stream::Probes, 0);
    DMatrix::from_fn(d_probe, input_dim, |_, _| StandardNormal.sample(&mut rng))
}

/// `S` with `S S^T = cov`, negative eigenvalues from rounding clipped to 0.
/// Unlike a Cholesky factor this also covers the rank-deficient covariances
/// of strongly mean-dominated kernels.
fn psd_sqrt(cov: DMatrix<f64>) -> Result<DMatrix<f64>> {
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorisation { max_jitter: 0.0 });
    }
    let eig = cov.symmetric_eigen();
    let mut s = eig.eigenvectors;
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        s.column_mut(j).scale_mut(l.max(0.0).sqrt());
    }
    Ok(s)
}

/// One draw from `N(mean, S S^T)` using stream `(seed, GpDraws, index)`.
fn gaussian_draw(mean: &DVector<f64>, sqrt_cov: &DMatrix<f64>, seed: u64, index: u64) -> DVector<f64> {
    let mut rng = substream(seed, Stream::GpDraws, index);
    let z = DVector::from_fn(mean.len(), |_, _| StandardNormal.sample(&mut rng));
    mean + sqrt_cov * z
}

fn limiting_moments(probes: &DMatrix<f64>, net: &NetworkHyper) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let mean = output_mean(probes, net)?;
    let cov = output_covariance(probes, probes, net)?;
    Ok((mean, psd_sqrt(cov)?))
}

/// Draws of the limiting output, plus how many of them had a vanished signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GpDraws {
    pub samples: DMatrix<f64>,
    /// Draws whose latents switch every unit of some layer off; the limit is
    /// then the zero function and the draw is recorded as zeros.
    pub vanished: usize,
}

/// `n` draws of the limiting output at `probes`. Schemes whose limit depends
/// on the global latents get a fresh `A` (hence a fresh kernel) per draw.
pub fn gp_samples(
    scheme: &WeightScheme,
    depth: usize,
    slope: f64,
    f4: F4Sigma,
    probes: &DMatrix<f64>,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<GpDraws> {
    let input_dim = probes.ncols();
    let zero = || DVector::zeros(probes.nrows());
    let fixed = if scheme.has_random_hyper() {
        None
    } else {
        let a = scheme.sample_a_latents(depth, seed);
        Some(limiting_moments(probes, &scheme.limiting_network(depth, input_dim, slope, &a, f4)?)?)
    };
    let rows: Vec<Result<Option<DVector<f64>>>> = exec.map(n, |d| match &fixed {
        Some((mean, sqrt_cov)) => Ok(Some(gaussian_draw(mean, sqrt_cov, seed, d as u64))),
        None => {
            let a = scheme.sample_a_latents(depth, child_seed(seed, Stream::Latents, d as u64));
            match limiting_moments(probes, &scheme.limiting_network(depth, input_dim, slope, &a, f4)?) {
                Ok((mean, sqrt_cov)) => Ok(Some(gaussian_draw(&mean, &sqrt_cov, seed, d as u64))),
                Err(Error::VanishedSignal { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        }
    });
    let mut samples = DMatrix::zeros(n, probes.nrows());
    let mut vanished = 0;
    for (d, r) in rows.into_iter().enumerate() {
        let row = r?.unwrap_or_else(|| {
            vanished += 1;
            zero()
        });
        samples.row_mut(d).copy_from(&row.transpose());
    }
    Ok(GpDraws { samples, vanished })
}

/// MMD² between finite networks of each width and the limiting GP at a fixed
/// set of probe inputs, with a 2.5%-97.5% permutation null band.
pub fn convergence_experiment(scheme: &WeightScheme, config: &ConvergenceConfig) -> Result<ConvergenceCurve> {
    convergence_experiment_with(scheme, config, Execution::default())
}

pub fn convergence_experiment_with(scheme: &WeightScheme, config: &ConvergenceConfig, exec: Execution) -> Result<ConvergenceCurve> {
    config.validate()?;
    let seed = config.seed;
    let probes = probe_points(config.d_probe, config.input_dim, seed);
    let mut points = Vec::with_capacity(config.widths.len());
    let mut vanished_gp_draws = Vec::with_capacity(config.widths.len());
    let mut null_samples = Vec::with_capacity(config.widths.len());
    for (wi, &width) in config.widths.iter().enumerate() {
        let shape = NetworkShape::uniform(config.input_dim, config.depth, width);
        let nets = sample_function_values(&shape, scheme, config.slope, child_seed(seed, Stream::Weights, wi as u64), &probes, config.n_samples, exec)?;
        let gps = gp_samples(scheme, config.depth, config.slope, config.f4_sigma, &probes, config.n_samples, child_seed(seed, Stream::GpDraws, wi as u64), exec)?;
        vanished_gp_draws.push(gps.vanished);
        let gram = PooledGram::new(&SampleSet::new(nets)?, &SampleSet::new(gps.samples)?)?;
        let null = gram.permutation_null(config.n_perm, child_seed(seed, Stream::Permutation, wi as u64));
        points.push(CurvePoint { width, mmd2: gram.observed(), null_low: quantile(&null, 0.025), null_high: quantile(&null, 0.975) });
        null_samples.push(null);
    }
    Ok(ConvergenceCurve { points, probes, vanished_gp_draws, null_samples })
}

/// Spearman rank correlation, average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// One-sided permutation p-value for a negative Spearman correlation:
/// the fraction of `y` shuffles (plus the observed one) at least as negative.
pub fn spearman_negative_p(x: &[f64], y: &[f64], n_perm: usize, seed: u64) -> f64 {
    let observed = spearman(x, y);
    let mut rng = substream(seed, Stream::Permutation, 1);
    let mut shuffled = y.to_vec();
    let hits = (0..n_perm)
        .filter(|_| {
            shuffled.shuffle(&mut rng);
            spearman(x, &shuffled) <= observed
        })
        .count();
    (hits + 1) as f64 / (n_perm + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_net::Generator;
    use approx::assert_abs_diff_eq;

    fn gaussian_set(n: usize, d: usize, shift: f64, seed: u64) -> SampleSet {
        let mut rng = substream(seed, Stream::Oracle, 0);
        SampleSet::new(DMatrix::from_fn(n, d, |_, _| { let z: f64 = StandardNormal.sample(&mut rng); shift + z })).unwrap()
    }

    #[test]
    fn separated_point_masses() {
        let xs = SampleSet::new(DMatrix::from_element(5, 3, 0.0)).unwrap();
        let ys = SampleSet::new(DMatrix::from_element(7, 3, 10.0)).unwrap();
        assert_abs_diff_eq!(mmd2_unbiased(&xs, &ys).unwrap(), 2.0, epsilon = 1e-6);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(SampleSet::new(DMatrix::zeros(1, 4)), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn unbiased_under_the_null() {
        let stats: Vec<f64> = (0..100).map(|t| mmd2_unbiased(&gaussian_set(30, 2, 0.0, 2 * t), &gaussian_set(30, 2, 0.0, 2 * t + 1)).unwrap()).collect();
        let positive = stats.iter().filter(|&&s| s > 0.0).count();
        // two-sided sign test at about the 1% level
        assert!((37..=63).contains(&positive), "{positive} positive of 100");
    }

    #[test]
    fn symmetric_and_shift_invariant() {
        let (xs, ys) = (gaussian_set(20, 3, 0.0, 1), gaussian_set(25, 3, 0.5, 2));
        let a = mmd2_unbiased(&xs, &ys).unwrap();
        assert_eq!(a, mmd2_unbiased(&ys, &xs).unwrap());
        let shift = DMatrix::from_fn(1, 3, |_, j| [3.0, -1.0, 0.25][j]);
        let add = |s: &SampleSet| SampleSet::new(DMatrix::from_fn(s.len(), 3, |i, j| s.samples()[(i, j)] + shift[(0, j)])).unwrap();
        assert_abs_diff_eq!(a, mmd2_unbiased(&add(&xs), &add(&ys)).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn identical_sets_direct_formula() {
        let xs = gaussian_set(12, 2, 0.0, 5);
        let n = 12;
        let k = |i: usize, j: usize| gauss(xs.samples().row(i).transpose().as_slice(), xs.samples().row(j).transpose().as_slice());
        let (mut off, mut diag) = (0.0, 0.0);
        for i in 0..n {
            diag += k(i, i);
            for j in 0..n {
                if i != j {
                    off += k(i, j);
                }
            }
        }
        let want = 2.0 * off / (n * (n - 1)) as f64 - 2.0 * (off + diag) / (n * n) as f64;
        assert_abs_diff_eq!(mmd2_unbiased(&xs, &xs).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn pooled_gram_matches_direct() {
        let (xs, ys) = (gaussian_set(15, 4, 0.0, 3), gaussian_set(11, 4, 0.3, 4));
        let g = PooledGram::new(&xs, &ys).unwrap();
        assert_abs_diff_eq!(g.observed(), mmd2_unbiased(&xs, &ys).unwrap(), epsilon = 1e-12);
        let null = g.permutation_null(50, 9);
        assert_eq!(null, g.permutation_null(50, 9));
        assert!(null.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn quantiles_and_ranks() {
        let v = [3.0, 1.0, 2.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.875), 4.5);
        assert_eq!(ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[9.0, 4.0, 1.0]), -1.0, epsilon = 1e-15);
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(spearman_negative_p(&x, &y, 999, 0) < 0.01);
        assert!(spearman_negative_p(&x, &x, 999, 0) > 0.9);
    }

    #[test]
    fn gp_against_gp_is_null() {
        let scheme = WeightScheme::rce(Generator::F1);
        let probes = probe_points(4, 10, 3);
        let draw = |seed| gp_samples(&scheme, 4, 0.0, F4Sigma::Analytic, &probes, 300, seed, Execution::default()).unwrap().samples;
        let gram = PooledGram::new(&SampleSet::new(draw(1)).unwrap(), &SampleSet::new(draw(2)).unwrap()).unwrap();
        let null = gram.permutation_null(200, 0);
        let obs = gram.observed();
        assert!(quantile(&null, 0.025) <= obs && obs <= quantile(&null, 0.975), "{obs}");
    }

    #[test]
    fn gp_draw_covariance() {
        let scheme = WeightScheme::Iid { mu: -0.5, sigma: 1.5 };
        let probes = probe_points(3, 5, 1);
        let net = scheme.limiting_network(3, 5, 0.2, &[], F4Sigma::Analytic).unwrap();
        let cov = output_covariance(&probes, &probes, &net).unwrap();
        let mean = output_mean(&probes, &net).unwrap();
        let n = 20_000;
        let s = gp_samples(&scheme, 3, 0.2, F4Sigma::Analytic, &probes, n, 4, Execution::default()).unwrap().samples;
        for i in 0..3 {
            let col = s.column(i);
            let m = col.mean();
            assert!((m - mean[i]).abs() < 5.0 * (cov[(i, i)] / n as f64).sqrt());
            let v = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
            assert!((v / cov[(i, i)] - 1.0).abs() < 0.05, "{v} vs {}", cov[(i, i)]);
        }
    }

    #[test]
    fn random_hyper_draws_vary_kernel() {
        let scheme = WeightScheme::rce(Generator::F4);
        let probes = probe_points(2, 3, 0);
        let s = gp_samples(&scheme, 4, 0.0, F4Sigma::Analytic, &probes, 2000, 1, Execution::Sequential).unwrap();
        assert_eq!(s, gp_samples(&scheme, 4, 0.0, F4Sigma::Analytic, &probes, 2000, 1, Execution::Parallel).unwrap());
        assert!(s.samples.iter().all(|v| v.is_finite()));
        // a zero draw needs A within about 1e-2 of -sqrt 3 in some layer
        assert!(s.vanished < 40, "{}", s.vanished);
        // the kernel varies with A, so the output scale is heavy-tailed
        let sq: Vec<f64> = s.samples.column(0).iter().map(|v| v * v).collect();
        let (mean, _) = crate::finite_net::moments(&sq);
        let max = sq.iter().cloned().fold(0.0, f64::max);
        assert!(max > 10.0 * mean);
    }

    #[test]
    fn config_validation() {
        let scheme = WeightScheme::rce(Generator::F1);
        let bad = ConvergenceConfig { widths: vec![64, 16], ..Default::default() };
        assert!(matches!(convergence_experiment(&scheme, &bad), Err(Error::Config(_))));
        let bad = ConvergenceConfig { n_samples: 1, ..Default::default() };
        assert!(convergence_experiment(&scheme, &bad).is_err());
    }

    #[test]
    fn small_experiment_is_deterministic() {
        let scheme = WeightScheme::rce(Generator::F2);
        let cfg = ConvergenceConfig { widths: vec![4, 8], n_samples: 40, n_perm: 20, depth: 3, ..Default::default() };
        let a = convergence_experiment_with(&scheme, &cfg, Execution::Sequential).unwrap();
        let b = convergence_experiment_with(&scheme, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("width,mmd2,null_low,null_high\n4,"));
        for p in &a.points {
            assert!(p.null_low <= p.null_high);
        }
    }
}
