//! Cooperative passive beamforming: AO on a full estimate, closed form on a
//! rank-one estimate, and the gain / SNR / rate evaluations.

use crate::error::{Error, Result};
use crate::estimation::EstimateS2;
use crate::math::{bilinear, CMatrix, CVector, C64};

/// `v_i / |v_i|`, with zero entries mapped to 1.
pub fn phase_align(v: &CVector) -> CVector {
    v.map(|z| {
        let r = z.norm();
        if r == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            z / r
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingPair {
    pub phi1: CVector,
    pub phi2: CVector,
    /// `|φ2ᴴ Ĥ φ1|²` against the matrix the pair was designed for.
    pub objective: f64,
    pub iterations: usize,
}

impl BeamformingPair {
    pub fn gain(&self, h: &CMatrix) -> Result<C64> {
        check_shape(h, &self.phi1, &self.phi2)?;
        Ok(bilinear(&self.phi2, h, &self.phi1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoSettings {
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for AoSettings {
    fn default() -> Self {
        Self {
            max_iters: 50,
            rel_tol: 1e-6,
        }
    }
}

fn check_shape(h: &CMatrix, phi1: &CVector, phi2: &CVector) -> Result<()> {
    if h.ncols() != phi1.len() || h.nrows() != phi2.len() {
        return Err(Error::Dimension(format!(
            "{}x{} channel against beamformers of length {} and {}",
            h.nrows(),
            h.ncols(),
            phi1.len(),
            phi2.len()
        )));
    }
    Ok(())
}

fn objective(h: &CMatrix, phi1: &CVector, phi2: &CVector) -> f64 {
    bilinear(phi2, h, phi1).norm_sqr()
}

/// Rotate so the first nonzero entry is real positive.
fn normalize_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 0.0).copied() {
        let rot = z.conj() / z.norm();
        *v *= rot;
    }
}

/// Strongest singular pair of `h`, phase-aligned.
pub fn svd_init(h: &CMatrix) -> Result<BeamformingPair> {
    if h.is_empty() || h.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Domain("beamforming needs a nonzero channel".into()));
    }
    let svd = h.clone().svd(true, true);
    let u = svd.u.as_ref().ok_or(Error::Singular("SVD left vectors"))?;
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or(Error::Singular("SVD right vectors"))?;
    let mut k = 0;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > svd.singular_values[k] {
            k = i;
        }
    }
    let mut d = u.column(k).into_owned();
    let mut f = v_t.row(k).adjoint();
    normalize_phase(&mut d);
    normalize_phase(&mut f);
    let phi1 = phase_align(&f);
    let phi2 = phase_align(&d);
    let objective = objective(h, &phi1, &phi2);
    Ok(BeamformingPair {
        phi1,
        phi2,
        objective,
        iterations: 0,
    })
}

/// AO with the default settings.
pub fn ao_optimize(h: &CMatrix) -> Result<BeamformingPair> {
    ao_optimize_with(h, AoSettings::default())
}

pub fn ao_optimize_with(h: &CMatrix, settings: AoSettings) -> Result<BeamformingPair> {
    ao_optimize_traced(h, settings).map(|(pair, _)| pair)
}

/// Also returns the objective after initialization and after every half-step.
pub fn ao_optimize_traced(
    h: &CMatrix,
    settings: AoSettings,
) -> Result<(BeamformingPair, Vec<f64>)> {
    if settings.max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
    }
    let mut pair = svd_init(h)?;
    let mut trace = vec![pair.objective];
    let h_adj = h.adjoint();
    let mut current = pair.objective;
    for iter in 1..=settings.max_iters {
        pair.phi2 = phase_align(&(h * &pair.phi1));
        trace.push(objective(h, &pair.phi1, &pair.phi2));
        pair.phi1 = phase_align(&(&h_adj * &pair.phi2));
        let next = objective(h, &pair.phi1, &pair.phi2);
        trace.push(next);
        pair.iterations = iter;
        let gain = (next - current) / current.max(f64::MIN_POSITIVE);
        current = next;
        if gain < settings.rel_tol {
            break;
        }
    }
    normalize_phase(&mut pair.phi1);
    normalize_phase(&mut pair.phi2);
    pair.objective = objective(h, &pair.phi1, &pair.phi2);
    Ok((pair, trace))
}

/// `|φ2ᴴ Ĥ φ1|² + σ²`.
pub fn expected_gain_s1(pair: &BeamformingPair, h_hat: &CMatrix, sigma_sq: f64) -> Result<f64> {
    Ok(pair.gain(h_hat)?.norm_sqr() + sigma_sq)
}

/// Align with the estimated signatures: `φ1 = ∠û1`, `φ2 = ∠û2`.
pub fn beamform_s2(est: &EstimateS2) -> Result<BeamformingPair> {
    est.ensure_usable()?;
    let phi1 = phase_align(&est.u1());
    let phi2 = phase_align(&est.u2);
    let objective = objective(&est.hl_hat, &phi1, &phi2);
    Ok(BeamformingPair {
        phi1,
        phi2,
        objective,
        iterations: 0,
    })
}

/// `|ρ̂|² [ |φ2ᴴû2|² |û1ᴴφ1|² + σ² (|φ2ᴴû2|² + |û1ᴴφ1|²) ]`.
pub fn expected_gain_s2(pair: &BeamformingPair, est: &EstimateS2, sigma_sq: f64) -> Result<f64> {
    est.ensure_usable()?;
    check_shape(&est.hl_hat, &pair.phi1, &pair.phi2)?;
    let a = pair.phi2.dotc(&est.u2).norm_sqr();
    let b = (est.u1_h.transpose() * &pair.phi1)[0].norm_sqr();
    Ok(est.rho_hat.norm_sqr() * (a * b + sigma_sq * (a + b)))
}

/// `|φ2ᴴ H φ1|² / σ²`.
pub fn receive_snr(h_true: &CMatrix, pair: &BeamformingPair, sigma_sq: f64) -> Result<f64> {
    if !(sigma_sq > 0.0) {
        return Err(Error::Domain(format!(
            "noise power must be positive, got {sigma_sq}"
        )));
    }
    Ok(pair.gain(h_true)?.norm_sqr() / sigma_sq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub t: usize,
    pub t_training: usize,
    pub gamma: f64,
    pub sigma_sq: f64,
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.t_training > self.t {
            return Err(Error::InvalidConfig(format!(
                "training time {} does not fit in coherence time {}",
                self.t_training, self.t
            )));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "Gamma must be >= 1, got {}",
                self.gamma
            )));
        }
        if !(self.sigma_sq > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma_sq must be positive, got {}",
                self.sigma_sq
            )));
        }
        Ok(())
    }
}

/// `((T − T_t)/T) log2(1 + snr/Γ)` for a receive SNR `|g|²/σ²`.
pub fn rate_from_snr(snr: f64, rp: &RateParams) -> Result<f64> {
    rp.validate()?;
    let frac = (rp.t - rp.t_training) as f64 / rp.t as f64;
    Ok(frac * (snr / rp.gamma).ln_1p() / std::f64::consts::LN_2)
}

pub fn achievable_rate(h_true: &CMatrix, pair: &BeamformingPair, rp: &RateParams) -> Result<f64> {
    rp.validate()?;
    rate_from_snr(receive_snr(h_true, pair, rp.sigma_sq)?, rp)
}
