//! Cascaded-channel estimators and their MSE expressions.
//!
//! Scheme 1 recovers every entry of `H` by least squares from a full
//! `M1·M2`-symbol training block. Scheme 2 assumes `H = v2 v1ᴴ` and estimates
//! the two signatures `u2 = v2 V1` and `u1ᴴ = V2 v1ᴴ` from `M1 + M2` symbols,
//! rebuilding `Ĥ_L = ρ̂ û2 û1ᴴ` with `ρ̂ = 2 / (Û1 + Û2)`.

use crate::error::{Error, Result};
use crate::math::{frobenius_sq, norm_sq, ones, outer, CMatrix, CVector, C64};
use crate::training::{PilotObservation, TrainingMatrix, TrainingSchedule};

/// LS estimate of the full cascaded channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateS1 {
    pub h_hat: CMatrix,
    pub sigma_sq: f64,
}

impl EstimateS1 {
    pub fn from_observation(obs: &PilotObservation, sched: &TrainingSchedule) -> Result<Self> {
        estimate_scheme1(
            &obs.scheme1_matrix()?,
            &sched.theta1,
            &sched.theta2,
            obs.sigma_sq,
        )
    }
}

/// `Ĥ = (Θ2ᴴ)⁻¹ Y Θ1⁻¹`.
pub fn estimate_scheme1(
    y: &CMatrix,
    theta1: &TrainingMatrix,
    theta2: &TrainingMatrix,
    sigma_sq: f64,
) -> Result<EstimateS1> {
    if y.nrows() != theta2.size() || y.ncols() != theta1.size() {
        return Err(Error::Dimension(format!(
            "observation is {}x{} but training matrices are {}x{} and {}x{}",
            y.nrows(),
            y.ncols(),
            theta2.size(),
            theta2.size(),
            theta1.size(),
            theta1.size()
        )));
    }
    let h_hat = theta2.inverse().adjoint() * y * theta1.inverse();
    Ok(EstimateS1 { h_hat, sigma_sq })
}

/// `σ² · tr{(Θ1* Θ1ᵀ)⁻¹} · tr{(Θ2 Θ2ᴴ)⁻¹}`.
pub fn mse_scheme1_theory(
    theta1: &TrainingMatrix,
    theta2: &TrainingMatrix,
    sigma_sq: f64,
) -> Result<f64> {
    let t1 = theta1.matrix();
    let t2 = theta2.matrix();
    let g1 = t1.map(|z| z.conj()) * t1.transpose();
    let g2 = t2 * t2.adjoint();
    let tr1 = g1
        .try_inverse()
        .ok_or(Error::Singular("Θ1* Θ1ᵀ"))?
        .trace()
        .re;
    let tr2 = g2
        .try_inverse()
        .ok_or(Error::Singular("Θ2 Θ2ᴴ"))?
        .trace()
        .re;
    Ok(sigma_sq * tr1 * tr2)
}

/// When `|Û1 + Û2|` counts as too small for `ρ̂` to be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegeneracyThreshold {
    /// Scaled by `max(‖û1ᴴ‖, ‖û2‖)`.
    Relative(f64),
    Absolute(f64),
}

impl Default for DegeneracyThreshold {
    fn default() -> Self {
        Self::Relative(1e-8)
    }
}

/// Rank-one signature estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateS2 {
    /// Entries of the row vector `û1ᴴ`.
    pub u1_h: CVector,
    pub u2: CVector,
    pub rho_hat: C64,
    /// `ρ̂ û2 û1ᴴ`; all zeros when the combiner is exactly zero.
    pub hl_hat: CMatrix,
    /// `Û1 + Û2`.
    pub combiner: C64,
    pub degenerate: bool,
}

impl EstimateS2 {
    pub fn from_observation(
        obs: &PilotObservation,
        sched: &TrainingSchedule,
        threshold: DegeneracyThreshold,
    ) -> Result<Self> {
        let (y1, y2) = obs.scheme2_blocks()?;
        estimate_scheme2(&y1, &y2, &sched.theta1, &sched.theta2, threshold)
    }

    pub fn m1(&self) -> usize {
        self.u1_h.len()
    }

    pub fn m2(&self) -> usize {
        self.u2.len()
    }

    /// Column vector `û1`.
    pub fn u1(&self) -> CVector {
        self.u1_h.map(|z| z.conj())
    }

    pub fn ensure_usable(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::Degenerate(self.combiner.norm()))
        } else {
            Ok(())
        }
    }
}

/// `û2 = (Θ2ᴴ)⁻¹ y⁽¹⁾`, `û1ᴴ = (y⁽²⁾)ᵀ Θ1⁻¹`, `ρ̂ = 2 / (Σ û1ᴴ + Σ û2)`.
pub fn estimate_scheme2(
    y1: &CVector,
    y2: &CVector,
    theta1: &TrainingMatrix,
    theta2: &TrainingMatrix,
    threshold: DegeneracyThreshold,
) -> Result<EstimateS2> {
    if y1.len() != theta2.size() || y2.len() != theta1.size() {
        return Err(Error::Dimension(format!(
            "sub-block lengths {} and {} do not match M2 = {}, M1 = {}",
            y1.len(),
            y2.len(),
            theta2.size(),
            theta1.size()
        )));
    }
    let u2 = theta2.inverse().adjoint() * y1;
    let u1_h = theta1.inverse().transpose() * y2;
    let combiner = u1_h.sum() + u2.sum();

    let limit = match threshold {
        DegeneracyThreshold::Relative(r) => r * norm_sq(&u1_h).sqrt().max(norm_sq(&u2).sqrt()),
        DegeneracyThreshold::Absolute(a) => a,
    };
    let degenerate = combiner.norm() < limit || combiner.norm() == 0.0;
    let (rho_hat, hl_hat) = if combiner.norm() == 0.0 {
        (C64::new(0.0, 0.0), CMatrix::zeros(u2.len(), u1_h.len()))
    } else {
        let rho = C64::new(2.0, 0.0) / combiner;
        (rho, outer(&u2, &u1_h) * rho)
    };
    Ok(EstimateS2 {
        u1_h,
        u2,
        rho_hat,
        hl_hat,
        combiner,
        degenerate,
    })
}

/// `σ² |ρ̂|² (‖û2‖² tr{(Θ1Θ1ᴴ)⁻¹} + ‖û1ᴴ‖² tr{(Θ2Θ2ᴴ)⁻¹})`.
pub fn mse_scheme2_approx(
    est: &EstimateS2,
    theta1: &TrainingMatrix,
    theta2: &TrainingMatrix,
    sigma_sq: f64,
) -> Result<f64> {
    est.ensure_usable()?;
    if est.m1() != theta1.size() || est.m2() != theta2.size() {
        return Err(Error::Dimension(
            "estimate and training sizes differ".into(),
        ));
    }
    let tr1 = theta1.inverse_gram_trace()?;
    let tr2 = theta2.inverse_gram_trace()?;
    Ok(sigma_sq * est.rho_hat.norm_sqr() * (norm_sq(&est.u2) * tr1 + norm_sq(&est.u1_h) * tr2))
}

/// First-order error `ρ̂ (û2 u1,eᴴ + u2,e û1ᴴ)` for known signature errors.
pub fn linearized_error(est: &EstimateS2, u1_e_h: &CVector, u2_e: &CVector) -> CMatrix {
    (outer(&est.u2, u1_e_h) + outer(u2_e, &est.u1_h)) * est.rho_hat
}

/// What Scheme 2 converges to without noise for an arbitrary `H`:
/// `(H 1)(1ᵀ H) / (1ᵀ H 1)`. Equals `H` only when `H` is rank one.
pub fn scheme2_noise_free_target(h: &CMatrix) -> Option<CMatrix> {
    let (m2, m1) = h.shape();
    let u2 = h * ones(m1);
    let u1_h = h.transpose() * ones(m2);
    let total = u2.sum();
    if total.norm() == 0.0 {
        return None;
    }
    Some(outer(&u2, &u1_h) / total)
}

/// `Σ ‖Ĥ − H‖_F² / Σ ‖H‖_F²`.
pub fn nmse(h_hats: &[CMatrix], hs: &[CMatrix]) -> Result<f64> {
    if h_hats.is_empty() || h_hats.len() != hs.len() {
        return Err(Error::Dimension(format!(
            "nmse needs equal-length nonempty lists, got {} and {}",
            h_hats.len(),
            hs.len()
        )));
    }
    let mut err = 0.0;
    let mut energy = 0.0;
    for (a, b) in h_hats.iter().zip(hs) {
        if a.shape() != b.shape() {
            return Err(Error::Dimension(
                "estimate and channel shapes differ".into(),
            ));
        }
        err += frobenius_sq(&(a - b));
        energy += frobenius_sq(b);
    }
    Ok(err / energy)
}
