//! Constellation design and channel simulation for over-the-air computation
//! of sums on a multiple-access channel with heavy-tailed (Cauchy) noise.
//!
//! `K` transmitters each hold an integer `s_k` in `[0, Q-1]` with `Q = q^2`.
//! Every node maps its value onto a QAM-like grid with in-phase spacing `d1`
//! and quadrature spacing `d2`; the transmissions superimpose on the channel,
//! and a single receiver decodes the noisy aggregate back to the integer sum
//! `f = s_1 + ... + s_K`. Because the quadrature axis carries the base-`q`
//! "high digit" of each symbol, a quadrature decision error costs `q` times
//! an in-phase one, and under impulsive noise the best split of the power
//! budget between `d1` and `d2` is markedly asymmetric.
//!
//! The crate provides:
//!
//! * [`grid`] — encoder, superposition geometry and the per-axis
//!   nearest-point decoder (the maximum-likelihood rule for componentwise
//!   Cauchy noise);
//! * [`noise`] — the complex Cauchy noise model: density and deterministic
//!   inverse-CDF sampling;
//! * [`analysis`] — closed-form mean-squared error of the decoded sum;
//! * [`optimizer`] — the power-constrained spacing design: root of the
//!   large-`K` stationarity function, an exact scan oracle, and KKT
//!   residuals;
//! * [`simulator`] — a deterministic, parallel Monte-Carlo engine whose
//!   results are bit-identical for any worker count.
//!
//! All numerics are generic over the scalar type via [`Real`] (`f32` or
//! `f64`); the aliases at the crate root fix `f64`, which is what the CLI
//! and most callers want.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod noise;
pub mod optimizer;
pub mod simulator;

mod accum;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` constellation geometry.
pub type ConstellationParams = grid::ConstellationParams<f64>;
/// `f64` complex channel sample.
pub type ComplexSample = grid::ComplexSample<f64>;
/// `f64` Cauchy noise model.
pub type NoiseModel = noise::NoiseModel<f64>;
/// `f64` power budget.
pub type PowerBudget = optimizer::PowerBudget<f64>;
/// `f64` spacing design result.
pub type OptimizationResult = optimizer::OptimizationResult<f64>;
/// `f64` Monte-Carlo configuration.
pub type McConfig = simulator::McConfig<f64>;
/// `f64` Monte-Carlo result.
pub type McResult = simulator::McResult<f64>;
/// `f64` sweep row.
pub type SweepRecord = simulator::SweepRecord<f64>;
