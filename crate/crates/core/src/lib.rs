//! Extreme first-passage-time statistics for piecewise deterministic Markov
//! processes: limit laws for the fastest and k-th fastest of N searchers,
//! exact samplers for four concrete models, and a Monte Carlo harness that
//! checks the former against the latter.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod error;
pub mod evt;
pub mod harness;
pub mod models;
pub mod output;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use evt::{AsymptoticLaw, ExtremeOrderQuery, GenGammaDist, MeanVariance};
pub use models::{FptSample, PdmpModel};
