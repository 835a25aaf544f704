//! Finite-width random LReLU networks under iid Gaussian and
//! row-column-exchangeable (RCE) weight priors.
//!
//! RCE layers use `W_ji = (F_ji - E_D[F_ji] (1 - 1/sqrt n)) / sqrt n` with
//! `F_ji = F(A, B_j, C_i, D_ji)` and all latents uniform on
//! `[-sqrt 3, sqrt 3]`; the first and last layers stay zero-mean Gaussian.
//!
//! Weights are generated one row at a time from per-layer streams, so a
//! network can be evaluated without ever being stored
//! ([`sample_outputs`]) and gives bit-identical results to
//! [`sample_weights`] followed by [`SampledNetwork::forward`].

use std::f64::consts::SQRT_2;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng as _, RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{LayerHyper, NetworkHyper};
use crate::output::{write_file, write_json};
use crate::rng::{child_seed, substream, Rng, Stream};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

fn uniform_latent(rng: &mut Rng) -> f64 {
    SQRT_3 * (2.0 * rng.random::<f64>() - 1.0)
}

/// Uniform on `[-sqrt 3, sqrt 3]` from 32 random bits, symmetric about 0.
#[inline]
fn latent_from_bits(k: u32) -> f64 {
    const SCALE: f64 = 1.0 / 2_147_483_648.0;
    SQRT_3 * ((k as f64 + 0.5) * SCALE - 1.0)
}

/// Fill `out` with iid uniform latents, two per 64-bit draw.
#[inline]
fn fill_latents(rng: &mut Xoshiro256PlusPlus, out: &mut [f64]) {
    let mut pairs = out.chunks_exact_mut(2);
    for pair in &mut pairs {
        let u = rng.next_u64();
        pair[0] = latent_from_bits(u as u32);
        pair[1] = latent_from_bits((u >> 32) as u32);
    }
    if let [last] = pairs.into_remainder() {
        *last = latent_from_bits(rng.next_u64() as u32);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkShape {
    pub input_dim: usize,
    /// Hidden widths `n^(1) .. n^(L-1)`.
    pub widths: Vec<usize>,
    pub output_dim: usize,
}

impl NetworkShape {
    pub fn new(input_dim: usize, widths: Vec<usize>) -> Self {
        NetworkShape { input_dim, widths, output_dim: 1 }
    }

    /// `depth - 1` hidden layers of equal `width`.
    pub fn uniform(input_dim: usize, depth: usize, width: usize) -> Self {
        NetworkShape::new(input_dim, vec![width; depth.saturating_sub(1)])
    }

    /// Number of weight layers `L`.
    pub fn depth(&self) -> usize {
        self.widths.len() + 1
    }

    fn fan(&self, layer: usize) -> (usize, usize) {
        let dims: Vec<usize> = std::iter::once(self.input_dim).chain(self.widths.iter().copied()).chain([self.output_dim]).collect();
        (dims[layer], dims[layer + 1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 || self.widths.contains(&0) {
            return Err(Error::Shape("all layer sizes must be positive".into()));
        }
        Ok(())
    }
}

/// `F(A, B, C, D) = G(B) H(A, C, D)` with `E_D[H]` and `Var_D[H]` in closed
/// form. `G` must be positive so that it factors through the LReLU.
#[derive(Clone)]
pub struct CustomGenerator {
    pub g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub h: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    /// `E_D[H(A, C, D)]` as a function of `(A, C)`.
    pub h_mean: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// `Var_D[H(A, C, D)]` as a function of `(A, C)`.
    pub h_var: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomGenerator")
    }
}

#[derive(Debug, Clone)]
pub enum Generator {
    /// `sqrt 2 D`
    F1,
    /// `2 sqrt 2 D - 0.5`
    F2,
    /// `sqrt 2 D - 1.5 A C`
    F3,
    /// `sqrt 2 D (A + sqrt 3) - 0.1 A^2 C^2 - 0.4`
    F4,
    Custom(CustomGenerator),
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::F1 => "f1",
            Generator::F2 => "f2",
            Generator::F3 => "f3",
            Generator::F4 => "f4",
            Generator::Custom(_) => "custom",
        }
    }

    /// `(F, E_D[F])` at the given latents.
    #[inline]
    fn value_and_mean(&self, a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
        match self {
            Generator::F1 => (SQRT_2 * d, 0.0),
            Generator::F2 => (2.0 * SQRT_2 * d - 0.5, -0.5),
            Generator::F3 => {
                let m = -1.5 * a * c;
                (SQRT_2 * d + m, m)
            }
            Generator::F4 => {
                let m = -0.1 * a * a * c * c - 0.4;
                (SQRT_2 * d * (a + SQRT_3) + m, m)
            }
            Generator::Custom(g) => {
                let gb = (g.g)(b);
                (gb * (g.h)(a, c, d), gb * (g.h_mean)(a, c))
            }
        }
    }

    /// `(coef, mean)` with `F = coef D + mean`, for the generators that are
    /// affine in `D`.
    fn affine_in_d(&self, a: f64, c: f64) -> Option<(f64, f64)> {
        match self {
            Generator::F1 => Some((SQRT_2, 0.0)),
            Generator::F2 => Some((2.0 * SQRT_2, -0.5)),
            Generator::F3 => Some((SQRT_2, -1.5 * a * c)),
            Generator::F4 => Some((SQRT_2 * (a + SQRT_3), -0.1 * a * a * c * c - 0.4)),
            Generator::Custom(_) => None,
        }
    }

    /// Does the row latent `B` enter the weights?
    fn uses_b(&self) -> bool {
        matches!(self, Generator::Custom(_))
    }

    /// `E_B[G(B)]` and `E_B[G(B)^2]`.
    fn g_moments(&self) -> (f64, f64) {
        match self {
            Generator::Custom(g) => (uniform_expectation(|b| (g.g)(b)), uniform_expectation(|b| (g.g)(b).powi(2))),
            _ => (1.0, 1.0),
        }
    }
}

/// Composite Gauss-Legendre expectation over `U[-sqrt 3, sqrt 3]`.
fn uniform_expectation(f: impl Fn(f64) -> f64) -> f64 {
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let panels = 200;
    let h = 2.0 * SQRT_3 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = -SQRT_3 + (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(&WEIGHTS) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    total * 0.5 * h / (2.0 * SQRT_3)
}

/// Which `sigma` to report for F4. The table value `2 |A + sqrt 3|` and the
/// variance of the stated generator, `sqrt 2 |A + sqrt 3|`, disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum F4Sigma {
    #[default]
    Analytic,
    Table,
}

/// Limiting `(mu, sigma)` of a generator given its global latent `A`
/// (for generators with a row factor `G`, the `G` moments are excluded;
/// they enter the following layer).
pub fn scheme_hyperparams(generator: &Generator, a: f64, f4: F4Sigma) -> (f64, f64) {
    match generator {
        Generator::F1 | Generator::F3 => (0.0, SQRT_2),
        Generator::F2 => (-0.5, 8f64.sqrt()),
        Generator::F4 => {
            let sigma = match f4 {
                F4Sigma::Analytic => SQRT_2 * (a + SQRT_3).abs(),
                F4Sigma::Table => 2.0 * (a + SQRT_3).abs(),
            };
            (-0.1 * a * a - 0.4, sigma)
        }
        Generator::Custom(g) => {
            let mu = uniform_expectation(|c| (g.h_mean)(a, c));
            let var = uniform_expectation(|c| (g.h_var)(a, c));
            (mu, var.sqrt())
        }
    }
}

#[derive(Debug, Clone)]
pub enum WeightScheme {
    /// Every layer `W = (sigma Z + mu / sqrt n) / sqrt n`.
    Iid { mu: f64, sigma: f64 },
    /// Layers `2 .. L-1` from `generator`; layers 1 and `L` zero-mean Gaussian
    /// with standard deviation `boundary_sigma / sqrt n`.
    Rce { generator: Generator, boundary_sigma: f64 },
}

impl WeightScheme {
    pub fn rce(generator: Generator) -> Self {
        WeightScheme::Rce { generator, boundary_sigma: SQRT_2 }
    }

    pub fn name(&self) -> String {
        match self {
            WeightScheme::Iid { .. } => "iid".into(),
            WeightScheme::Rce { generator, .. } => generator.name().into(),
        }
    }

    /// Do the limiting hyperparameters depend on the global latents `A`?
    pub fn has_random_hyper(&self) -> bool {
        matches!(self, WeightScheme::Rce { generator: Generator::F4 | Generator::Custom(_), .. })
    }

    /// Limiting network hyperparameters. `a_latents` holds `A` for each RCE
    /// layer (layers `2 .. L-1`) and is ignored for iid schemes.
    pub fn limiting_network(&self, depth: usize, input_dim: usize, slope: f64, a_latents: &[f64], f4: F4Sigma) -> Result<NetworkHyper> {
        let layers = match self {
            WeightScheme::Iid { mu, sigma } => vec![LayerHyper::new(*mu, *sigma); depth],
            WeightScheme::Rce { generator, boundary_sigma } => {
                if depth < 2 {
                    return Err(Error::Config("RCE networks need at least 2 layers".into()));
                }
                if a_latents.len() != depth - 2 {
                    return Err(Error::Shape(format!("{} latents for {} RCE layers", a_latents.len(), depth - 2)));
                }
                let (g_abs, g_sq) = generator.g_moments();
                let mut layers = vec![LayerHyper::new(0.0, *boundary_sigma)];
                for (k, &a) in a_latents.iter().enumerate() {
                    let (mu, sigma) = scheme_hyperparams(generator, a, f4);
                    // the previous layer's row factor scales this layer's input
                    let (fm, fv) = if k == 0 { (1.0, 1.0) } else { (g_abs, g_sq) };
                    layers.push(LayerHyper::new(mu * fm, sigma * fv.sqrt()));
                }
                let fv = if depth > 2 { g_sq } else { 1.0 };
                layers.push(LayerHyper::new(0.0, boundary_sigma * fv.sqrt()));
                layers
            }
        };
        Ok(NetworkHyper { slope, input_dim, layers, final_layer_linear: true })
    }

    /// Draw `A` for each RCE layer the same way the sampler does.
    pub fn sample_a_latents(&self, depth: usize, seed: u64) -> Vec<f64> {
        match self {
            WeightScheme::Iid { .. } => Vec::new(),
            WeightScheme::Rce { .. } => (1..depth.saturating_sub(1)).map(|l| uniform_latent(&mut substream(seed, Stream::Latents, l as u64))).collect(),
        }
    }
}

/// Latents of one RCE layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Latents {
    pub a: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

enum RowKind<'a> {
    Gaussian { scale: f64 },
    Iid { mu_term: f64, sigma: f64 },
    Rce { generator: &'a Generator, latents: Latents },
    /// Built-in generators: `w_i = coef D_i + offset_i`.
    Affine { coef: f64, offset: Vec<f64>, latents: Latents },
}

/// Row-by-row generator for one weight layer. Bulk weight noise comes from
/// a xoshiro stream, which is several times cheaper per draw than ChaCha.
struct LayerSampler<'a> {
    kind: RowKind<'a>,
    n_in: usize,
    rng: Xoshiro256PlusPlus,
    d_buf: Vec<f64>,
}

impl<'a> LayerSampler<'a> {
    fn new(shape: &NetworkShape, scheme: &'a WeightScheme, layer: usize, seed: u64) -> Self {
        let (n_in, n_out) = shape.fan(layer);
        let root = 1.0 / (n_in as f64).sqrt();
        let rng = Xoshiro256PlusPlus::seed_from_u64(child_seed(seed, Stream::Weights, layer as u64));
        let kind = match scheme {
            WeightScheme::Iid { mu, sigma } => RowKind::Iid { mu_term: mu * root, sigma: *sigma },
            WeightScheme::Rce { boundary_sigma, .. } if layer == 0 || layer + 1 == shape.depth() => {
                RowKind::Gaussian { scale: boundary_sigma * root }
            }
            WeightScheme::Rce { generator, .. } => {
                let mut lr = substream(seed, Stream::Latents, layer as u64);
                let a = uniform_latent(&mut lr);
                let b = if generator.uses_b() { (0..n_out).map(|_| uniform_latent(&mut lr)).collect() } else { vec![0.0; n_out] };
                let c: Vec<f64> = (0..n_in).map(|_| uniform_latent(&mut lr)).collect();
                let affine: Option<Vec<(f64, f64)>> = c.iter().map(|&ci| generator.affine_in_d(a, ci)).collect();
                let latents = Latents { a, b, c };
                match affine {
                    Some(terms) => RowKind::Affine {
                        coef: terms.first().map_or(0.0, |t| t.0) * root,
                        offset: terms.iter().map(|t| t.1 * root * root).collect(),
                        latents,
                    },
                    None => RowKind::Rce { generator, latents },
                }
            }
        };
        LayerSampler { kind, n_in, rng, d_buf: vec![0.0; n_in] }
    }

    #[inline]
    fn fill_row(&mut self, j: usize, out: &mut [f64]) {
        let n = self.n_in as f64;
        let root = 1.0 / n.sqrt();
        match &self.kind {
            RowKind::Gaussian { scale } => {
                for w in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    *w = scale * z;
                }
            }
            RowKind::Iid { mu_term, sigma } => {
                for w in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    *w = (sigma * z + mu_term) * root;
                }
            }
            RowKind::Rce { generator, latents } => {
                let shrink = 1.0 - root;
                let (a, b) = (latents.a, latents.b[j]);
                fill_latents(&mut self.rng, &mut self.d_buf);
                for ((w, &c), &d) in out.iter_mut().zip(&latents.c).zip(&self.d_buf) {
                    let (f, m) = generator.value_and_mean(a, b, c, d);
                    *w = (f - m * shrink) * root;
                }
            }
            RowKind::Affine { coef, offset, .. } => {
                let mut pairs = out.chunks_exact_mut(2);
                let mut offs = offset.chunks_exact(2);
                for (w, o) in (&mut pairs).zip(&mut offs) {
                    let u = self.rng.next_u64();
                    w[0] = coef * latent_from_bits(u as u32) + o[0];
                    w[1] = coef * latent_from_bits((u >> 32) as u32) + o[1];
                }
                if let ([w], [o]) = (pairs.into_remainder(), offs.remainder()) {
                    *w = coef * latent_from_bits(self.rng.next_u64() as u32) + o;
                }
            }
        }
    }

    fn latents(&self) -> Option<Latents> {
        match &self.kind {
            RowKind::Rce { latents, .. } | RowKind::Affine { latents, .. } => Some(latents.clone()),
            _ => None,
        }
    }
}

#[inline]
fn lrelu(z: f64, a: f64) -> f64 {
    if z >= 0.0 { z } else { a * z }
}

/// `acts` holds `n_in` rows of `p` interleaved point values; returns the
/// pre-activations of one output unit.
#[inline]
fn row_preact(w: &[f64], acts: &[f64], p: usize, out: &mut [f64]) {
    if p == 4 {
        // the probe-point case of the convergence experiments
        let mut s = [0.0; 4];
        for (&wi, x) in w.iter().zip(acts.chunks_exact(4)) {
            s[0] += wi * x[0];
            s[1] += wi * x[1];
            s[2] += wi * x[2];
            s[3] += wi * x[3];
        }
        out.copy_from_slice(&s);
        return;
    }
    out.iter_mut().for_each(|o| *o = 0.0);
    for (i, &wi) in w.iter().enumerate() {
        let x = &acts[i * p..(i + 1) * p];
        for (o, &xv) in out.iter_mut().zip(x) {
            *o += wi * xv;
        }
    }
}

fn interleave(x: &DMatrix<f64>) -> Vec<f64> {
    let (p, d) = x.shape();
    let mut acts = vec![0.0; p * d];
    for i in 0..d {
        for q in 0..p {
            acts[i * p + q] = x[(q, i)];
        }
    }
    acts
}

/// Apply one layer given a row source; `activate` selects LReLU or identity.
fn apply_layer(
    n_out: usize,
    n_in: usize,
    acts: &[f64],
    p: usize,
    slope: f64,
    activate: bool,
    mut row: impl FnMut(usize, &mut [f64]),
) -> Vec<f64> {
    let mut next = vec![0.0; n_out * p];
    let mut w = vec![0.0; n_in];
    let mut h = vec![0.0; p];
    for j in 0..n_out {
        row(j, &mut w);
        row_preact(&w, acts, p, &mut h);
        for q in 0..p {
            next[j * p + q] = if activate { lrelu(h[q], slope) } else { h[q] };
        }
    }
    next
}

fn check_inputs(shape: &NetworkShape, x: &DMatrix<f64>) -> Result<()> {
    shape.validate()?;
    if x.ncols() != shape.input_dim {
        return Err(Error::Shape(format!("inputs have {} columns, network expects {}", x.ncols(), shape.input_dim)));
    }
    Ok(())
}

fn outputs(acts: Vec<f64>, p: usize, out_dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(p, out_dim, |q, k| acts[k * p + q])
}

/// Outputs at the rows of `x` of one random network, generated on the fly.
/// Returns a `points x output_dim` matrix.
pub fn sample_outputs(shape: &NetworkShape, scheme: &WeightScheme, slope: f64, seed: u64, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_inputs(shape, x)?;
    let p = x.nrows();
    let mut acts = interleave(x);
    let depth = shape.depth();
    for layer in 0..depth {
        let (n_in, n_out) = shape.fan(layer);
        let mut sampler = LayerSampler::new(shape, scheme, layer, seed);
        acts = apply_layer(n_out, n_in, &acts, p, slope, layer + 1 < depth, |j, w| sampler.fill_row(j, w));
    }
    Ok(outputs(acts, p, shape.output_dim))
}

/// One weight layer, `n_out x n_in`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightLayer {
    pub n_out: usize,
    pub n_in: usize,
    pub w: Vec<f64>,
}

impl WeightLayer {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_out, self.n_in, &self.w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledNetwork {
    pub slope: f64,
    pub layers: Vec<WeightLayer>,
    /// Per layer; `Some` for RCE layers.
    pub latents: Vec<Option<Latents>>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    dtype: &'static str,
    slope: f64,
    scheme: &'a str,
    layers: Vec<ManifestLayer>,
}

#[derive(Debug, Serialize)]
struct ManifestLayer {
    rows: usize,
    cols: usize,
    /// Offset into the binary file, in elements.
    offset: usize,
}

pub fn sample_weights(shape: &NetworkShape, scheme: &WeightScheme, slope: f64, seed: u64) -> Result<SampledNetwork> {
    shape.validate()?;
    let mut layers = Vec::with_capacity(shape.depth());
    let mut latents = Vec::with_capacity(shape.depth());
    for layer in 0..shape.depth() {
        let (n_in, n_out) = shape.fan(layer);
        let mut sampler = LayerSampler::new(shape, scheme, layer, seed);
        let mut w = vec![0.0; n_in * n_out];
        for (j, row) in w.chunks_mut(n_in).enumerate() {
            sampler.fill_row(j, row);
        }
        latents.push(sampler.latents());
        layers.push(WeightLayer { n_out, n_in, w });
    }
    Ok(SampledNetwork { slope, layers, latents })
}

impl SampledNetwork {
    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    /// Network outputs at the rows of `x`, `points x output_dim`.
    pub fn forward(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape(format!("inputs have {} columns, network expects {}", x.ncols(), self.input_dim())));
        }
        let p = x.nrows();
        let mut acts = interleave(x);
        let depth = self.layers.len();
        for (l, layer) in self.layers.iter().enumerate() {
            acts = apply_layer(layer.n_out, layer.n_in, &acts, p, self.slope, l + 1 < depth, |j, w| {
                w.copy_from_slice(&layer.w[j * layer.n_in..(j + 1) * layer.n_in])
            });
        }
        Ok(outputs(acts, p, self.layers[depth - 1].n_out))
    }

    /// Write all weights as little-endian `f64` to `bin` and the shapes to
    /// the JSON `manifest`.
    pub fn dump(&self, bin: &Path, manifest: &Path, scheme: &str) -> Result<()> {
        let mut bytes = Vec::new();
        let mut entries = Vec::new();
        let mut offset = 0;
        for l in &self.layers {
            entries.push(ManifestLayer { rows: l.n_out, cols: l.n_in, offset });
            offset += l.w.len();
            for v in &l.w {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(dir) = bin.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(bin, bytes)?;
        write_json(manifest, &Manifest { dtype: "float64-le", slope: self.slope, scheme, layers: entries })
    }
}

/// Read back a dump written by [`SampledNetwork::dump`].
pub fn load_dump(bin: &Path, manifest: &Path) -> Result<SampledNetwork> {
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest)?)?;
    let bytes = std::fs::read(bin)?;
    let values: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    let bad = || Error::Config("malformed weight manifest".into());
    let slope = meta["slope"].as_f64().ok_or_else(bad)?;
    let mut layers = Vec::new();
    for l in meta["layers"].as_array().ok_or_else(bad)? {
        let field = |k: &str| l[k].as_u64().map(|v| v as usize).ok_or_else(bad);
        let (rows, cols, offset) = (field("rows")?, field("cols")?, field("offset")?);
        let w = values.get(offset..offset + rows * cols).ok_or_else(bad)?.to_vec();
        layers.push(WeightLayer { n_out: rows, n_in: cols, w });
    }
    let n = layers.len();
    Ok(SampledNetwork { slope, layers, latents: vec![None; n] })
}

/// Write a text file next to a dump; small convenience for the CLI.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, text)
}

/// Mean and variance of a slice; used by the moment checks.
pub fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
}

/// Stack the outputs of `draws` independent networks at `x` (draw `d` uses
/// seed `child_seed(seed, Weights, d)`): a `draws x points` matrix.
pub fn sample_function_values(
    shape: &NetworkShape,
    scheme: &WeightScheme,
    slope: f64,
    seed: u64,
    x: &DMatrix<f64>,
    draws: usize,
    exec: crate::exec::Execution,
) -> Result<DMatrix<f64>> {
    check_inputs(shape, x)?;
    let rows: Vec<Result<DMatrix<f64>>> = exec.map(draws, |d| {
        sample_outputs(shape, scheme, slope, crate::rng::child_seed(seed, Stream::Weights, d as u64), x)
    });
    let mut out = DMatrix::zeros(draws, x.nrows());
    for (d, r) in rows.into_iter().enumerate() {
        out.row_mut(d).copy_from(&r?.column(0).transpose());
    }
    Ok(out)
}

/// Column vector helper for single-output networks.
pub fn first_output(m: &DMatrix<f64>) -> DVector<f64> {
    m.column(0).into_owned()
}
