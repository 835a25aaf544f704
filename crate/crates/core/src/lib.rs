//! Limiting Gaussian processes of infinitely wide LReLU networks whose
//! weights have non-zero means or row-column-exchangeable priors.

pub mod cli;
pub mod data;
pub mod error;
pub mod exec;
pub mod finite_net;
pub mod gp;
pub mod hyper;
pub mod kernel;
pub mod mmd;
pub mod output;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use exec::Execution;
pub use kernel::{LayerHyper, NetworkHyper};
