//! Channel model: path loss, array responses, Rician draws and grouping.
//!
//! Each IRS is a planar array of `M` columns (one column per sub-surface)
//! with `N0` elements stacked vertically inside a column. Columns are spaced by
//! half a wavelength along the horizontal axis given by the IRS azimuth, rows
//! by half a wavelength along z. Element `k` belongs to sub-surface `k / N0`.

mod scenario;

use nalgebra::allocator::Allocator;
use nalgebra::{DefaultAllocator, Dim, Matrix, OMatrix, Storage};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::{bilinear, complex_normal, kron_ones, outer, CMatrix, CVector, C64};

pub use scenario::{ScenarioConfig, DEFAULT_SCENARIO_JSON};

/// Distance-dependent path loss `β0 (d / d0)^(-α)`.
pub fn path_loss(d: f64, alpha: f64, cfg: &ScenarioConfig) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "link distance must be positive, got {d}"
        )));
    }
    Ok(cfg.beta0 * (d / cfg.d0).powf(-alpha))
}

/// Uniform linear array response, entry `n` = `exp(-jπ·spacing·n·cosine)`,
/// with `spacing` in half-wavelengths.
pub fn array_response(n_elems: usize, spacing: f64, incidence_cosine: f64) -> Result<CVector> {
    if n_elems == 0 {
        return Err(Error::Domain("array needs at least one element".into()));
    }
    if incidence_cosine.abs() > 1.0 + 1e-12 || incidence_cosine.is_nan() {
        return Err(Error::Domain(format!(
            "direction cosine {incidence_cosine} outside [-1, 1]"
        )));
    }
    let step = -std::f64::consts::PI * spacing * incidence_cosine;
    Ok(CVector::from_fn(n_elems, |n, _| {
        C64::from_polar(1.0, step * n as f64)
    }))
}

/// Weights `(√(K/(1+K)), √(1/(1+K)))`, with `K = ∞` giving pure LoS.
pub fn rician_weights(k: f64) -> (f64, f64) {
    if k.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt())
    }
}

/// `√(K/(1+K))·los + √(1/(1+K))·W` with `W` i.i.d. CN(0, 1), drawn in
/// column-major order. Path loss is left to the caller.
pub fn draw_rician<R, C, S, G>(
    los: &Matrix<C64, R, C, S>,
    k: f64,
    rng: &mut G,
) -> OMatrix<C64, R, C>
where
    R: Dim,
    C: Dim,
    S: Storage<C64, R, C>,
    DefaultAllocator: Allocator<R, C>,
    G: Rng + ?Sized,
{
    let (w_los, w_nlos) = rician_weights(k);
    los.map(|l| {
        let w = complex_normal(rng);
        if w_nlos == 0.0 {
            l
        } else {
            l * w_los + w * w_nlos
        }
    })
}

/// A planar IRS: `columns` sub-surfaces along the azimuth axis, `n0` rows each.
#[derive(Debug, Clone, Copy)]
pub struct IrsArray {
    pub center: [f64; 3],
    pub azimuth: f64,
    pub columns: usize,
    pub n0: usize,
}

impl IrsArray {
    pub fn n_elements(&self) -> usize {
        self.columns * self.n0
    }

    /// Horizontal and vertical direction cosines toward `target`.
    pub fn direction_cosines(&self, target: [f64; 3]) -> Result<(f64, f64)> {
        let d = [
            target[0] - self.center[0],
            target[1] - self.center[1],
            target[2] - self.center[2],
        ];
        let dist = distance(self.center, target)?;
        let axis = [self.azimuth.cos(), self.azimuth.sin()];
        let horizontal = (d[0] * axis[0] + d[1] * axis[1]) / dist;
        let vertical = d[2] / dist;
        Ok((horizontal.clamp(-1.0, 1.0), vertical.clamp(-1.0, 1.0)))
    }

    /// Element-wise unit-modulus response toward `target`, ordered
    /// sub-surface by sub-surface.
    pub fn steering(&self, target: [f64; 3]) -> Result<CVector> {
        let (ch, cv) = self.direction_cosines(target)?;
        let a_h = array_response(self.columns, 1.0, ch)?;
        let a_v = array_response(self.n0, 1.0, cv)?;
        Ok(a_h.kronecker(&a_v))
    }
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> Result<f64> {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "coincident endpoints {a:?} and {b:?}"
        )));
    }
    Ok(d)
}

/// LoS structure of the inter-IRS link, `G_I^L = amplitude · s · q2 q1ᴴ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LosFactors {
    pub q1: CVector,
    pub q2: CVector,
    /// Unit-modulus path gain with uniformly drawn phase.
    pub s: C64,
    /// `√β_I · √(K_I/(1+K_I))`.
    pub amplitude: f64,
    /// True when `K_I = ∞`, i.e. `G_I` is exactly its LoS component.
    pub exact: bool,
}

/// The three physical links at element resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementwiseChannels {
    pub g_u: CVector,
    pub g_i: CMatrix,
    pub g_a: CVector,
    pub los_factors: LosFactors,
}

impl ElementwiseChannels {
    /// Byte-stable JSON encoding used for reproducibility checks.
    pub fn canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("channel serialization cannot fail")
    }

    pub fn cascade(&self) -> Result<CMatrix> {
        cascade_elementwise(self)
    }

    /// Group-wise LoS signatures `(v1ᴴ, v2)`: grouped `q̄1ᴴ diag(ḡ_U)` and
    /// `diag(ḡ_A) s q̄2` (with the LoS amplitude folded into `s`).
    pub fn los_signatures(&self, n0: usize) -> Result<(CVector, CVector)> {
        let lf = &self.los_factors;
        if lf.q1.len() != self.g_u.len() || lf.q2.len() != self.g_a.len() {
            return Err(Error::Dimension(
                "LoS factors do not match link sizes".into(),
            ));
        }
        let gain = lf.s * lf.amplitude;
        let v1_h_elem = lf.q1.zip_map(&self.g_u, |q, g| q.conj() * g);
        let v2_elem = lf.q2.zip_map(&self.g_a, |q, g| g * gain * q);
        Ok((group_vector(&v1_h_elem, n0)?, group_vector(&v2_elem, n0)?))
    }

    /// Group-wise cascaded channel; carries the rank-one form when `G_I` is pure LoS.
    pub fn grouped(&self, n0: usize) -> Result<CascadedChannel> {
        let mut h = group_channel(&self.cascade()?, n0)?;
        if self.los_factors.exact {
            let (v1_h, v2) = self.los_signatures(n0)?;
            h.los_form = Some(LosForm { v1_h, v2 });
        }
        Ok(h)
    }
}

/// Draws one realization of all three links.
///
/// Random draws happen in a fixed order: the phase of `s`, then `g_U`, `G_I`, `g_A`.
pub fn realize_channels<G: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut G,
) -> Result<ElementwiseChannels> {
    cfg.validate()?;
    let irs1 = IrsArray {
        center: cfg.irs1_pos,
        azimuth: cfg.irs1_azimuth,
        columns: cfg.m1,
        n0: cfg.n0,
    };
    let irs2 = IrsArray {
        center: cfg.irs2_pos,
        azimuth: cfg.irs2_azimuth,
        columns: cfg.m2,
        n0: cfg.n0,
    };

    let beta_u = path_loss(distance(cfg.user_pos, cfg.irs1_pos)?, cfg.alpha_u, cfg)?;
    let beta_i = path_loss(distance(cfg.irs1_pos, cfg.irs2_pos)?, cfg.alpha_i, cfg)?;
    let beta_a = path_loss(distance(cfg.irs2_pos, cfg.ap_pos)?, cfg.alpha_a, cfg)?;

    let los_u = irs1.steering(cfg.user_pos)?;
    let q1 = irs1.steering(cfg.irs2_pos)?;
    let q2 = irs2.steering(cfg.irs1_pos)?;
    let los_a = irs2.steering(cfg.ap_pos)?;

    let s = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
    let los_i = outer(&q2, &q1.map(|z| z.conj())) * s;

    let g_u = draw_rician(&los_u, cfg.k_u, rng) * C64::from(beta_u.sqrt());
    let g_i = draw_rician(&los_i, cfg.k_i, rng) * C64::from(beta_i.sqrt());
    let g_a = draw_rician(&los_a, cfg.k_a, rng) * C64::from(beta_a.sqrt());

    let (w_los, _) = rician_weights(cfg.k_i);
    Ok(ElementwiseChannels {
        g_u,
        g_i,
        g_a,
        los_factors: LosFactors {
            q1,
            q2,
            s,
            amplitude: beta_i.sqrt() * w_los,
            exact: cfg.k_i.is_infinite(),
        },
    })
}

/// `H̄ = diag(g_A) · G_I · diag(g_U)`.
pub fn cascade_elementwise(ch: &ElementwiseChannels) -> Result<CMatrix> {
    let (n2, n1) = ch.g_i.shape();
    if ch.g_u.len() != n1 || ch.g_a.len() != n2 {
        return Err(Error::Dimension(format!(
            "G_I is {n2}x{n1} but g_U has {} and g_A has {} entries",
            ch.g_u.len(),
            ch.g_a.len()
        )));
    }
    Ok(CMatrix::from_fn(n2, n1, |r, c| {
        ch.g_a[r] * ch.g_i[(r, c)] * ch.g_u[c]
    }))
}

/// Rank-one representation `H = v2 · v1ᴴ`; `v1_h` holds the entries of the row `v1ᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LosForm {
    pub v1_h: CVector,
    pub v2: CVector,
}

impl LosForm {
    pub fn matrix(&self) -> CMatrix {
        outer(&self.v2, &self.v1_h)
    }
}

/// Group-wise `M2 × M1` double-reflection channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedChannel {
    pub h: CMatrix,
    pub los_form: Option<LosForm>,
}

impl CascadedChannel {
    pub fn new(h: CMatrix) -> Self {
        Self { h, los_form: None }
    }

    pub fn from_los(v1_h: CVector, v2: CVector) -> Self {
        let form = LosForm { v1_h, v2 };
        Self {
            h: form.matrix(),
            los_form: Some(form),
        }
    }

    pub fn m1(&self) -> usize {
        self.h.ncols()
    }

    pub fn m2(&self) -> usize {
        self.h.nrows()
    }

    pub fn gain(&self, theta1: &CVector, theta2: &CVector) -> Result<C64> {
        effective_gain(&self.h, theta1, theta2)
    }
}

fn check_grouping(n: usize, n0: usize, what: &str) -> Result<()> {
    if n0 == 0 || !n.is_multiple_of(n0) {
        return Err(Error::Dimension(format!(
            "{what} = {n} is not divisible by N0 = {n0}"
        )));
    }
    Ok(())
}

/// `[H]_{j,i}` = sum of the `(j, i)`-th `N0 × N0` block of `H̄`.
pub fn group_channel(h_elem: &CMatrix, n0: usize) -> Result<CascadedChannel> {
    let (n2, n1) = h_elem.shape();
    check_grouping(n1, n0, "N1")?;
    check_grouping(n2, n0, "N2")?;
    let mut h = CMatrix::zeros(n2 / n0, n1 / n0);
    for c in 0..n1 {
        for r in 0..n2 {
            h[(r / n0, c / n0)] += h_elem[(r, c)];
        }
    }
    Ok(CascadedChannel::new(h))
}

/// Block sums of `N0` consecutive entries.
pub fn group_vector(v: &CVector, n0: usize) -> Result<CVector> {
    check_grouping(v.len(), n0, "vector length")?;
    let mut out = CVector::zeros(v.len() / n0);
    for (k, z) in v.iter().enumerate() {
        out[k / n0] += z;
    }
    Ok(out)
}

/// `g = θ2ᴴ H θ1`.
pub fn effective_gain(h: &CMatrix, theta1: &CVector, theta2: &CVector) -> Result<C64> {
    if h.ncols() != theta1.len() || h.nrows() != theta2.len() {
        return Err(Error::Dimension(format!(
            "H is {}x{}, theta1 has {} and theta2 has {} entries",
            h.nrows(),
            h.ncols(),
            theta1.len(),
            theta2.len()
        )));
    }
    Ok(bilinear(theta2, h, theta1))
}

/// `(θ2 ⊗ 1)ᴴ H̄ (θ1 ⊗ 1)` evaluated at element resolution.
pub fn effective_gain_elementwise(
    h_elem: &CMatrix,
    theta1: &CVector,
    theta2: &CVector,
    n0: usize,
) -> Result<C64> {
    effective_gain(h_elem, &kron_ones(theta1, n0), &kron_ones(theta2, n0))
}
