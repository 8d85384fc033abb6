//! Downlink SIR and user-rate distributions of randomly deployed small cells
//! under FDMA/SDMA/TDMA multiple access, evaluated analytically and by Monte
//! Carlo simulation of the underlying Poisson point processes.

// `!(x > 0.0)` style checks are meant to catch NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod analytic;
pub mod config;
pub mod curve;
pub mod error;
pub mod load;
pub mod optimize;
pub mod pmf;
pub mod quad;
pub mod sim;

pub use error::{Error, Result};
