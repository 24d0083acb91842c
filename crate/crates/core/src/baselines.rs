//! Comparison systems: a single IRS holding all `M1 + M2` sub-surfaces at the
//! location of IRS 1, and the double-IRS system with perfect CSI.
//!
//! The single-IRS channel obeys `y = hᵀθ + z`.

use rand::Rng;
use serde::Serialize;

use crate::beamforming::{ao_optimize, phase_align, BeamformingPair};
use crate::channel::{distance, draw_rician, group_vector, path_loss, IrsArray, ScenarioConfig};
use crate::error::{Error, Result};
use crate::math::{complex_normal_vector, CMatrix, CVector, C64};
use crate::training::TrainingMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleIrsRealization {
    /// Group-wise user-IRS-AP channel, `M1 + M2` entries.
    pub h: CVector,
    pub alpha_single: f64,
    pub k_u: f64,
}

impl SingleIrsRealization {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Training symbols used by the estimator.
    pub fn training_time(&self) -> usize {
        self.h.len()
    }
}

/// Entrywise product of the two element-wise links, grouped by `n0`.
pub fn single_irs_cascade(g_u: &CVector, g_a: &CVector, n0: usize) -> Result<CVector> {
    if g_u.len() != g_a.len() {
        return Err(Error::Dimension(format!(
            "user link has {} entries, AP link has {}",
            g_u.len(),
            g_a.len()
        )));
    }
    group_vector(&g_u.component_mul(g_a), n0)
}

/// Rician user link (`K_U`, `α_U`) and Rayleigh IRS-AP link (`α_sin`).
pub fn realize_single_irs<G: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut G,
) -> Result<SingleIrsRealization> {
    cfg.validate()?;
    let irs = IrsArray {
        center: cfg.irs1_pos,
        azimuth: cfg.irs1_azimuth,
        columns: cfg.m1 + cfg.m2,
        n0: cfg.n0,
    };
    let beta_u = path_loss(distance(cfg.user_pos, cfg.irs1_pos)?, cfg.alpha_u, cfg)?;
    let beta_a = path_loss(distance(cfg.irs1_pos, cfg.ap_pos)?, cfg.alpha_single, cfg)?;
    let los_u = irs.steering(cfg.user_pos)?;
    let g_u = draw_rician(&los_u, cfg.k_u, rng) * C64::from(beta_u.sqrt());
    let g_a = complex_normal_vector(irs.n_elements(), beta_a, rng);
    Ok(SingleIrsRealization {
        h: single_irs_cascade(&g_u, &g_a, cfg.n0)?,
        alpha_single: cfg.alpha_single,
        k_u: cfg.k_u,
    })
}

/// DFT training over `n = len(h)` symbols, `y = Dᵀh + z`, `ĥ = (Dᵀ)⁻¹ y`.
pub fn estimate_single_irs<G: Rng + ?Sized>(
    h: &CVector,
    sigma_sq: f64,
    rng: &mut G,
) -> Result<CVector> {
    if !(sigma_sq >= 0.0) {
        return Err(Error::Domain(format!(
            "noise power must be non-negative, got {sigma_sq}"
        )));
    }
    let d = TrainingMatrix::dft(h.len())?;
    let mut y = d.matrix().transpose() * h;
    if sigma_sq > 0.0 {
        y += complex_normal_vector(h.len(), sigma_sq, rng);
    }
    Ok(d.inverse().transpose() * y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleIrsBeam {
    pub theta: CVector,
    /// Set when the estimate is identically zero.
    pub degenerate: bool,
}

/// `θ = ∠conj(ĥ)`, giving gain `(Σ|ĥ_i|)²` against `ĥ`.
pub fn beamform_single_irs(h_hat: &CVector) -> SingleIrsBeam {
    SingleIrsBeam {
        theta: phase_align(&h_hat.map(|z| z.conj())),
        degenerate: h_hat.iter().all(|z| z.norm() == 0.0),
    }
}

/// `|hᵀθ|² / σ²` against the true channel.
pub fn single_irs_snr(h: &CVector, theta: &CVector, sigma_sq: f64) -> Result<f64> {
    if h.len() != theta.len() {
        return Err(Error::Dimension(format!(
            "channel has {} entries, θ has {}",
            h.len(),
            theta.len()
        )));
    }
    if !(sigma_sq > 0.0) {
        return Err(Error::Domain(format!(
            "noise power must be positive, got {sigma_sq}"
        )));
    }
    Ok(h.dot(theta).norm_sqr() / sigma_sq)
}

/// AO on the true cascaded channel.
pub fn perfect_csi_bound(h_true: &CMatrix) -> Result<BeamformingPair> {
    ao_optimize(h_true)
}
