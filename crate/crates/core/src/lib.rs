//! Hellinger information for non-regular models, minimax lower bounds, and
//! max–min optimal designs for polynomial regression with non-negative errors.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision instances.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod design;
pub mod error;
pub mod estimator;
pub mod hellinger;
pub mod linalg;
pub mod lp;
pub mod models;
pub mod optim;
pub mod quadrature;
pub mod scalar;
pub mod sim;
pub mod sphere;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ErrorModel64 = models::ErrorModel<f64>;
pub type UniformModel64 = models::UniformModel<f64>;
pub type RegressionModel64 = models::RegressionModel<f64>;
pub type InfoResult64 = hellinger::InfoResult<f64>;
pub type ErrorModel32 = models::ErrorModel<f32>;
pub type Design64 = design::Design<f64>;
pub type DesignSolution64 = design::DesignSolution<f64>;
pub type Dataset64 = estimator::Dataset<f64>;
pub type SimPlan64 = sim::SimPlan<f64>;
pub type RiskEstimate64 = sim::RiskEstimate<f64>;
