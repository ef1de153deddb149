//! Curvature engine, gradient Ricci soliton models and radial soliton profiles.
//!
//! The crate is `no_std` (with `alloc`): every computation is a pure
//! function of a chart and a point, and all transcendental functions go
//! through `libm`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chart;
pub mod curvature;
pub mod diff;
pub mod error;
pub mod jet;
pub mod level;
pub mod linalg;
pub mod math;
pub mod profile;
pub mod report;
pub mod soliton;
pub mod tensor;

pub use chart::{ChartKind, ChartPoint, MetricChart, MetricJet};
pub use curvature::{CurvaturePack, Depth};
pub use error::{Error, Result};
pub use report::IdentityReport;
pub use tensor::Tensor;
