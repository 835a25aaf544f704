//! Gram matrices of the limiting kernel over sets of inputs (one input per row).

use nalgebra::{DMatrix, DVector};

use super::deep::{input_covariance, pair_moments, OutputMoments, PointChain};
use super::NetworkHyper;
use crate::error::{Error, Result};
use crate::exec::Execution;

fn rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    x.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn chains(points: &[Vec<f64>], net: &NetworkHyper, exec: Execution) -> Result<Vec<PointChain>> {
    exec.map(points.len(), |i| PointChain::new(&points[i], net)).into_iter().collect()
}

fn moments_matrix(x: &DMatrix<f64>, y: &DMatrix<f64>, net: &NetworkHyper, exec: Execution) -> Result<Vec<OutputMoments>> {
    net.validate()?;
    if x.ncols() != net.input_dim || y.ncols() != net.input_dim {
        return Err(Error::Shape(format!(
            "inputs with {} and {} columns for a network with {} inputs",
            x.ncols(),
            y.ncols(),
            net.input_dim
        )));
    }
    let symmetric = std::ptr::eq(x, y) || x == y;
    let px = rows(x);
    let cx = chains(&px, net, exec)?;
    let (py, cy) = if symmetric { (px.clone(), cx.clone()) } else {
        let py = rows(y);
        let cy = chains(&py, net, exec)?;
        (py, cy)
    };
    let (n, m) = (px.len(), py.len());
    // one task per row; in the symmetric case only the upper triangle
    let upper: Vec<Result<Vec<OutputMoments>>> = exec.map(n, |i| {
        let start = if symmetric { i } else { 0 };
        (start..m).map(|j| pair_moments(&cx[i], &cy[j], input_covariance(&px[i], &py[j], net), net)).collect()
    });
    let mut out = vec![OutputMoments { second_moment: 0.0, mean_x: 0.0, mean_y: 0.0 }; n * m];
    for (i, row) in upper.into_iter().enumerate() {
        let row = row?;
        let start = if symmetric { i } else { 0 };
        for (off, v) in row.into_iter().enumerate() {
            let j = start + off;
            out[i * m + j] = v;
            if symmetric {
                out[j * m + i] = OutputMoments { mean_x: v.mean_y, mean_y: v.mean_x, ..v };
            }
        }
    }
    Ok(out)
}

fn to_matrix(n: usize, m: usize, v: &[OutputMoments], f: impl Fn(&OutputMoments) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |i, j| f(&v[i * m + j]))
}

/// `K[i, j] = deep_kernel(x_i, y_j)`; exactly symmetric when `x == y`.
pub fn kernel_matrix(x: &DMatrix<f64>, y: &DMatrix<f64>, net: &NetworkHyper) -> Result<DMatrix<f64>> {
    kernel_matrix_with(x, y, net, Execution::default())
}

pub fn kernel_matrix_with(x: &DMatrix<f64>, y: &DMatrix<f64>, net: &NetworkHyper, exec: Execution) -> Result<DMatrix<f64>> {
    let v = moments_matrix(x, y, net, exec)?;
    Ok(to_matrix(x.nrows(), y.nrows(), &v, |o| o.second_moment))
}

/// Covariance `E[f(x_i) f(y_j)] - E[f(x_i)] E[f(y_j)]` of the limiting output.
pub fn output_covariance(x: &DMatrix<f64>, y: &DMatrix<f64>, net: &NetworkHyper) -> Result<DMatrix<f64>> {
    let v = moments_matrix(x, y, net, Execution::default())?;
    Ok(to_matrix(x.nrows(), y.nrows(), &v, OutputMoments::covariance))
}

/// Mean `E[f(x_i)]` of the limiting output.
pub fn output_mean(x: &DMatrix<f64>, net: &NetworkHyper) -> Result<DVector<f64>> {
    net.validate()?;
    let px = rows(x);
    let mut out = DVector::zeros(px.len());
    for (i, p) in px.iter().enumerate() {
        let c = PointChain::new(p, net)?;
        out[i] = pair_moments(&c, &c, c.sq_norm_scaled, net)?.mean_x;
    }
    Ok(out)
}
