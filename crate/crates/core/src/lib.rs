//! Link-level simulation of a user → IRS 1 → IRS 2 → AP double-reflection link.
//!
//! The crate covers the full chain used by the experiments:
//!
//! - [`channel`]: geometry-driven Rician realizations, element grouping and the
//!   group-wise cascaded channel `H`.
//! - [`training`]: DFT training matrices, training schedules and noisy pilot
//!   observations.
//! - [`estimation`]: the full-matrix LS estimator (Scheme 1), the rank-one
//!   signature estimator (Scheme 2) and their MSE expressions.
//! - [`beamforming`]: alternating phase alignment, the closed-form rank-one
//!   design, expected gains, receive SNR and achievable rate.
//! - [`baselines`]: single-IRS deployment and the perfect-CSI bound.
//! - [`experiments`]: the seeded Monte Carlo harness and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod math;
pub mod training;

pub use error::{Error, Result};
pub use math::{CMatrix, CVector, C64};
