//! Identification of the riskiest directions of multivariate heavy-tailed
//! data.
//!
//! Observations `X = R U` are split into a radius `R` and a direction `U` on
//! the unit sphere. The set of directions whose conditional radial tail is as
//! heavy as the tail of `R` itself is estimated by comparing exceedance
//! counts inside geodesic balls (the statistic `ĝ`), either against data
//! ([`detector::scan`]) or against an exact limit oracle
//! ([`detector::algorithm_estimate`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod io;
pub mod sphere;
pub mod synth;
pub mod tail;

pub use error::{Error, Result};
