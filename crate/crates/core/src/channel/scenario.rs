use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{db_to_linear, dbm_to_watts};

/// One record describing geometry, surfaces, fading and link budget.
///
/// All quantities are linear (Watts, linear power ratios, radians). dB inputs
/// are converted once when building the record, see [`ScenarioConfig::standard`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub user_pos: [f64; 3],
    pub ap_pos: [f64; 3],
    pub irs1_pos: [f64; 3],
    pub irs2_pos: [f64; 3],
    /// Orientation of the IRS 1 horizontal array axis w.r.t. the x-axis.
    pub irs1_azimuth: f64,
    pub irs2_azimuth: f64,
    #[serde(rename = "M1")]
    pub m1: usize,
    #[serde(rename = "M2")]
    pub m2: usize,
    /// Elements per sub-surface.
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "K_U")]
    pub k_u: f64,
    #[serde(rename = "K_I")]
    pub k_i: f64,
    #[serde(rename = "K_A")]
    pub k_a: f64,
    pub beta0: f64,
    pub d0: f64,
    #[serde(rename = "alpha_U")]
    pub alpha_u: f64,
    #[serde(rename = "alpha_I")]
    pub alpha_i: f64,
    #[serde(rename = "alpha_A")]
    pub alpha_a: f64,
    pub alpha_single: f64,
    /// Transmit power in Watts.
    #[serde(rename = "P")]
    pub p: f64,
    /// Noise power in Watts.
    pub sigma0_sq: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    /// Coherence block length in symbols.
    #[serde(rename = "T")]
    pub t: usize,
}

/// The bundled scenario preset, serialized with the canonical field names.
pub const DEFAULT_SCENARIO_JSON: &str = include_str!("../../presets/scenario_default.json");

impl ScenarioConfig {
    /// Corridor-corner deployment with M = 6 sub-surfaces of 10 elements per
    /// IRS, K_U = K_A = 20 dB, K_I = 20 dB and P = 20 dBm.
    pub fn standard() -> Self {
        Self {
            user_pos: [1.0, 20.0, 0.0],
            ap_pos: [1.0, 0.0, 0.0],
            irs1_pos: [0.0, 20.0, 0.0],
            irs2_pos: [0.0, 0.0, 0.0],
            irs1_azimuth: 130f64.to_radians(),
            irs2_azimuth: 30f64.to_radians(),
            m1: 6,
            m2: 6,
            n0: 10,
            k_u: db_to_linear(20.0),
            k_i: db_to_linear(20.0),
            k_a: db_to_linear(20.0),
            beta0: db_to_linear(-35.0),
            d0: 1.0,
            alpha_u: 2.2,
            alpha_i: 2.4,
            alpha_a: 2.2,
            alpha_single: 4.0,
            p: dbm_to_watts(20.0),
            sigma0_sq: dbm_to_watts(-79.0),
            gamma: db_to_linear(9.0),
            t: 150,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Normalized noise power `σ² = σ0² / P`.
    pub fn sigma_sq(&self) -> f64 {
        self.sigma0_sq / self.p
    }

    pub fn n1(&self) -> usize {
        self.m1 * self.n0
    }

    pub fn n2(&self) -> usize {
        self.m2 * self.n0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m1 == 0 || self.m2 == 0 || self.n0 == 0 {
            return bad(format!(
                "M1, M2, N0 must be >= 1 (got {}, {}, {})",
                self.m1, self.m2, self.n0
            ));
        }
        for (name, k) in [("K_U", self.k_u), ("K_I", self.k_i), ("K_A", self.k_a)] {
            if k.is_nan() || k < 0.0 {
                return bad(format!("{name} must be >= 0 (got {k})"));
            }
        }
        if !(self.beta0 > 0.0 && self.beta0 <= 1.0) {
            return bad(format!("beta0 must lie in (0, 1] (got {})", self.beta0));
        }
        if !(self.d0 > 0.0) {
            return bad(format!("d0 must be positive (got {})", self.d0));
        }
        for (name, a) in [
            ("alpha_U", self.alpha_u),
            ("alpha_I", self.alpha_i),
            ("alpha_A", self.alpha_a),
            ("alpha_single", self.alpha_single),
        ] {
            if !(a >= 2.0) {
                return bad(format!("{name} must be >= 2 (got {a})"));
            }
        }
        if !(self.p > 0.0) {
            return bad(format!("P must be positive (got {})", self.p));
        }
        if !(self.sigma0_sq >= 0.0) {
            return bad(format!("sigma0_sq must be >= 0 (got {})", self.sigma0_sq));
        }
        if !(self.gamma >= 1.0) {
            return bad(format!("Gamma must be >= 1 (got {})", self.gamma));
        }
        let finite = self
            .user_pos
            .iter()
            .chain(&self.ap_pos)
            .chain(&self.irs1_pos)
            .chain(&self.irs2_pos)
            .chain([&self.irs1_azimuth, &self.irs2_azimuth])
            .all(|x| x.is_finite());
        if !finite {
            return bad("positions and azimuths must be finite".into());
        }
        Ok(())
    }

    /// Scheme 1 needs `T >= M1·M2` training symbols.
    pub fn check_scheme1_fits(&self) -> Result<()> {
        let tt = self.m1 * self.m2;
        if self.t < tt {
            return Err(Error::InvalidConfig(format!(
                "T = {} is shorter than the Scheme 1 training time M1*M2 = {tt}",
                self.t
            )));
        }
        Ok(())
    }

    /// Scheme 2 (and the single-IRS baseline) need `T >= M1 + M2`.
    pub fn check_scheme2_fits(&self) -> Result<()> {
        let tt = self.m1 + self.m2;
        if self.t < tt {
            return Err(Error::InvalidConfig(format!(
                "T = {} is shorter than the Scheme 2 training time M1+M2 = {tt}",
                self.t
            )));
        }
        Ok(())
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_preset_matches_code_defaults() {
        let parsed = ScenarioConfig::from_json(DEFAULT_SCENARIO_JSON).unwrap();
        assert_eq!(parsed, ScenarioConfig::standard());
    }

    #[test]
    fn json_uses_canonical_field_names() {
        let v: serde_json::Value =
            serde_json::from_str(&ScenarioConfig::standard().to_json().unwrap()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        keys.sort();
        let mut expected = vec![
            "user_pos",
            "ap_pos",
            "irs1_pos",
            "irs2_pos",
            "irs1_azimuth",
            "irs2_azimuth",
            "M1",
            "M2",
            "N0",
            "K_U",
            "K_I",
            "K_A",
            "beta0",
            "d0",
            "alpha_U",
            "alpha_I",
            "alpha_A",
            "alpha_single",
            "P",
            "sigma0_sq",
            "Gamma",
            "T",
        ];
        expected.sort();
        assert_eq!(keys, expected);
    }

    #[test]
    fn normalized_noise_power() {
        // -79 dBm - 20 dBm = -99 dB
        let cfg = ScenarioConfig::standard();
        assert!((cfg.sigma_sq() / db_to_linear(-99.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_fields() {
        let base = ScenarioConfig::standard();
        type Mutation = Box<dyn Fn(&mut ScenarioConfig)>;
        let cases: Vec<Mutation> = vec![
            Box::new(|c| c.m1 = 0),
            Box::new(|c| c.n0 = 0),
            Box::new(|c| c.k_i = -1.0),
            Box::new(|c| c.beta0 = 1.5),
            Box::new(|c| c.beta0 = 0.0),
            Box::new(|c| c.alpha_i = 1.9),
            Box::new(|c| c.gamma = 0.5),
            Box::new(|c| c.p = 0.0),
        ];
        for mutate in cases {
            let mut c = base.clone();
            mutate(&mut c);
            assert!(
                matches!(c.validate(), Err(Error::InvalidConfig(_))),
                "{c:?}"
            );
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn training_time_checks() {
        let mut c = ScenarioConfig::standard();
        c.t = 35;
        assert!(c.check_scheme1_fits().is_err());
        assert!(c.check_scheme2_fits().is_ok());
        c.t = 11;
        assert!(c.check_scheme2_fits().is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_SCENARIO_JSON).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }
}
