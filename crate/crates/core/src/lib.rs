//! Linear and widely linear MMSE data estimators, their component-wise
//! conditionally unbiased (CWCU) counterparts, and soft-decision LLR
//! evaluation for QAM-style constellations.
//!
//! The numeric core is generic over [`Real`]; the aliases below fix it to
//! `f64`, which is what the simulator uses.

// `!(x > 0)` deliberately rejects NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellation;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linear;
pub mod llr;
pub mod model;
pub mod scalar;
pub mod sim;
pub mod widely;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix = linalg::Matrix<f64>;
pub type CMatrix32 = linalg::Matrix<f32>;
pub type CVector = linalg::CVector<f64>;
pub type Constellation = constellation::Constellation<f64>;
pub type LinearModel = model::LinearModel<f64>;
pub type AugmentedModel = model::AugmentedModel<f64>;
pub type LinearEstimatorBank = linear::LinearEstimatorBank<f64>;
pub type WidelyEstimatorBank = widely::WidelyEstimatorBank<f64>;
