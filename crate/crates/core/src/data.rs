//! Benchmark regression problems.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::output::{csv_string, fmt_float};
use crate::rng::{substream, Stream};

pub const DEFAULT_NOISE_VAR: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub x_train: DMatrix<f64>,
    pub y_train: DVector<f64>,
    pub x_test: DMatrix<f64>,
    pub y_test: DVector<f64>,
    pub noise_var: f64,
    /// Noise added to the synthetic targets, when known.
    pub train_noise: Option<DVector<f64>>,
    pub test_noise: Option<DVector<f64>>,
}

impl Dataset {
    pub fn input_dim(&self) -> usize {
        self.x_train.ncols()
    }

    /// Columns `split, x1, .., xd, y`.
    pub fn to_csv(&self) -> String {
        let d = self.input_dim();
        let mut header = vec!["split".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.push("y".into());
        let rows = [("train", &self.x_train, &self.y_train), ("test", &self.x_test, &self.y_test)]
            .into_iter()
            .flat_map(|(split, x, y)| {
                (0..x.nrows()).map(move |i| {
                    let mut row = vec![split.to_string()];
                    row.extend(x.row(i).iter().map(|&v| fmt_float(v)));
                    row.push(fmt_float(y[i]));
                    row
                })
            });
        csv_string(&header, rows)
    }

    pub fn test_variance(&self) -> f64 {
        let n = self.y_test.len() as f64;
        let m = self.y_test.mean();
        self.y_test.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
    }
}

pub fn sine_target(x: f64) -> f64 {
    x.sin()
}

pub fn smooth_xor_target(x1: f64, x2: f64) -> f64 {
    -x1 * x2 * (2.0 - x1 * x1 - x2 * x2).exp()
}

fn noise(rng: &mut crate::rng::Rng, n: usize, var: f64) -> DVector<f64> {
    let dist = Normal::new(0.0, var.sqrt()).expect("finite noise variance");
    DVector::from_fn(n, |_, _| dist.sample(rng))
}

/// 10 training inputs on a uniform grid over `[-sqrt 3, sqrt 3]`, 100 test
/// inputs uniform on the same interval, `y = sin x + eps`.
pub fn gen_sine(seed: u64) -> Dataset {
    let r = 3f64.sqrt();
    let mut rng = substream(seed, Stream::Dataset, 0);
    let x_train = DMatrix::from_fn(10, 1, |i, _| if i == 9 { r } else { -r + 2.0 * r * i as f64 / 9.0 });
    let train_noise = noise(&mut rng, 10, DEFAULT_NOISE_VAR);
    let x_test = DMatrix::from_fn(100, 1, |_, _| rng.random_range(-r..r));
    let test_noise = noise(&mut rng, 100, DEFAULT_NOISE_VAR);
    let y_train = DVector::from_fn(10, |i, _| sine_target(x_train[(i, 0)]) + train_noise[i]);
    let y_test = DVector::from_fn(100, |i, _| sine_target(x_test[(i, 0)]) + test_noise[i]);
    Dataset {
        name: "sine".into(),
        x_train,
        y_train,
        x_test,
        y_test,
        noise_var: DEFAULT_NOISE_VAR,
        train_noise: Some(train_noise),
        test_noise: Some(test_noise),
    }
}

/// Training inputs `(+-1, +-1)`, 100 test inputs uniform on `[-2, 2]^2`.
pub fn gen_smooth_xor(seed: u64) -> Dataset {
    let mut rng = substream(seed, Stream::Dataset, 1);
    let x_train = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
    let train_noise = noise(&mut rng, 4, DEFAULT_NOISE_VAR);
    let x_test = DMatrix::from_fn(100, 2, |_, _| rng.random_range(-2.0..2.0));
    let test_noise = noise(&mut rng, 100, DEFAULT_NOISE_VAR);
    let target = |x: &DMatrix<f64>, i: usize| smooth_xor_target(x[(i, 0)], x[(i, 1)]);
    let y_train = DVector::from_fn(4, |i, _| target(&x_train, i) + train_noise[i]);
    let y_test = DVector::from_fn(100, |i, _| target(&x_test, i) + test_noise[i]);
    Dataset {
        name: "xor".into(),
        x_train,
        y_train,
        x_test,
        y_test,
        noise_var: DEFAULT_NOISE_VAR,
        train_noise: Some(train_noise),
        test_noise: Some(test_noise),
    }
}

pub const SNELSON_ROWS: usize = 200;
pub const SNELSON_TRAIN: usize = 10;

/// Sorted-order indices of the training rows: equally spaced ranks with
/// both endpoints included.
pub fn snelson_train_indices() -> Vec<usize> {
    let last = (SNELSON_ROWS - 1) as f64;
    let steps = (SNELSON_TRAIN - 1) as f64;
    (0..SNELSON_TRAIN).map(|k| (k as f64 * last / steps).round() as usize).collect()
}

/// Parse 200 rows of whitespace-separated `x y`; blank lines and `#`
/// comments are skipped.
pub fn parse_snelson(text: &str) -> Result<Dataset> {
    let mut rows = Vec::with_capacity(SNELSON_ROWS);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: i + 1, msg: format!("expected 2 columns, found {}", fields.len()) });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("not a finite number: {s:?}") })
        };
        rows.push((parse(fields[0])?, parse(fields[1])?));
    }
    if rows.len() != SNELSON_ROWS {
        return Err(Error::Parse { line: text.lines().count(), msg: format!("expected {SNELSON_ROWS} rows, found {}", rows.len()) });
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let train = snelson_train_indices();
    let (mut tr, mut te) = (Vec::new(), Vec::new());
    for (i, r) in rows.into_iter().enumerate() {
        if train.contains(&i) { tr.push(r) } else { te.push(r) }
    }
    let col = |v: &[(f64, f64)]| DMatrix::from_fn(v.len(), 1, |i, _| v[i].0);
    let tgt = |v: &[(f64, f64)]| DVector::from_fn(v.len(), |i, _| v[i].1);
    Ok(Dataset {
        name: "snelson".into(),
        x_train: col(&tr),
        y_train: tgt(&tr),
        x_test: col(&te),
        y_test: tgt(&te),
        noise_var: DEFAULT_NOISE_VAR,
        train_noise: None,
        test_noise: None,
    })
}

pub fn load_snelson(path: &Path) -> Result<Dataset> {
    parse_snelson(&std::fs::read_to_string(path)?)
}
