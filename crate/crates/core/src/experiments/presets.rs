use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Scheme, SweepKind};
use crate::channel::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
}

impl Preset {
    pub fn build(
        self,
        scenario: ScenarioConfig,
        n_trials: usize,
        master_seed: u64,
    ) -> ExperimentConfig {
        match self {
            Preset::Fig2a => fig2a(scenario, n_trials, master_seed),
            Preset::Fig2b => fig2b(scenario, n_trials, master_seed),
            Preset::Fig3a => fig3a(scenario, n_trials, master_seed),
            Preset::Fig3b => fig3b(scenario, n_trials, master_seed),
        }
    }
}

fn rician_grid() -> Vec<f64> {
    (-10..=30).step_by(5).map(f64::from).collect()
}

/// NMSE of both estimators vs `K_I` in dB.
pub fn fig2a(scenario: ScenarioConfig, n_trials: usize, master_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        scenario,
        sweep: SweepKind::RicianNmse,
        sweep_values: rician_grid(),
        n_trials,
        master_seed,
        schemes: vec![Scheme::S1, Scheme::S2],
        coherence_times: None,
    }
}

/// Receive SNR of all four systems vs `K_I` in dB.
pub fn fig2b(scenario: ScenarioConfig, n_trials: usize, master_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        sweep: SweepKind::RicianSnr,
        schemes: Scheme::ALL.to_vec(),
        ..fig2a(scenario, n_trials, master_seed)
    }
}

/// Rate vs `M` for `T = 150` and `T = 400`.
pub fn fig3a(scenario: ScenarioConfig, n_trials: usize, master_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        scenario,
        sweep: SweepKind::RateVsM,
        sweep_values: (2..=10).map(f64::from).collect(),
        n_trials,
        master_seed,
        schemes: Scheme::ALL.to_vec(),
        coherence_times: Some(vec![150, 400]),
    }
}

/// Rate vs `P` in dBm at `M = 6`, `T = 150`.
pub fn fig3b(mut scenario: ScenarioConfig, n_trials: usize, master_seed: u64) -> ExperimentConfig {
    scenario.m1 = 6;
    scenario.m2 = 6;
    scenario.t = 150;
    ExperimentConfig {
        scenario,
        sweep: SweepKind::RateVsPower,
        sweep_values: (10..=35).step_by(5).map(f64::from).collect(),
        n_trials,
        master_seed,
        schemes: Scheme::ALL.to_vec(),
        coherence_times: None,
    }
}
