//! Seeded Monte Carlo sweeps over the scenario, with CSV output.
//!
//! Every trial draws a fresh channel from a seed derived from
//! `(master_seed, sweep_index, trial_index)`. All schemes in a trial see the
//! same channel; each scheme draws its pilot noise from a second seed derived
//! from the trial seed and the scheme id. Trials run in parallel and are
//! reduced in trial order, so output does not depend on the thread count.

mod csv;
mod presets;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    beamform_single_irs, estimate_single_irs, perfect_csi_bound, realize_single_irs, single_irs_snr,
};
use crate::beamforming::{ao_optimize, beamform_s2, rate_from_snr, receive_snr, RateParams};
use crate::channel::{realize_channels, CascadedChannel, ScenarioConfig};
use crate::error::{Error, Result};
use crate::estimation::{mse_scheme1_theory, mse_scheme2_approx, EstimateS1, EstimateS2};
use crate::math::{db_to_linear, dbm_to_watts, frobenius_sq};
use crate::training::{observe, TrainingSchedule};

pub use csv::{emit_csv, parse_csv, read_csv, write_csv};
pub use presets::{fig2a, fig2b, fig3a, fig3b, Preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    S1,
    S2,
    #[serde(rename = "single")]
    Single,
    #[serde(rename = "perfect")]
    Perfect,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::S1, Scheme::S2, Scheme::Single, Scheme::Perfect];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::S1 => "S1",
            Scheme::S2 => "S2",
            Scheme::Single => "single",
            Scheme::Perfect => "perfect",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.as_str() == s)
    }

    fn id(self) -> u64 {
        match self {
            Scheme::S1 => 1,
            Scheme::S2 => 2,
            Scheme::Single => 3,
            Scheme::Perfect => 4,
        }
    }

    /// Pilot symbols spent before data transmission.
    pub fn training_time(self, cfg: &ScenarioConfig) -> usize {
        match self {
            Scheme::S1 => cfg.m1 * cfg.m2,
            Scheme::S2 | Scheme::Single => cfg.m1 + cfg.m2,
            Scheme::Perfect => 0,
        }
    }

    fn has_estimate_error(self) -> bool {
        matches!(self, Scheme::S1 | Scheme::S2)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which scenario parameter a sweep value sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `K_I` in dB; NMSE metrics.
    RicianNmse,
    /// `K_I` in dB; SNR metrics.
    RicianSnr,
    /// `M1 = M2 = M`; rate metrics.
    RateVsM,
    /// `P` in dBm; rate metrics.
    RateVsPower,
    /// Values are labels only; all metrics.
    Custom,
}

impl SweepKind {
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepKind::RicianNmse | SweepKind::RicianSnr => cfg.k_i = db_to_linear(value),
            SweepKind::RateVsM => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "M must be a positive integer, got {value}"
                    )));
                }
                cfg.m1 = value as usize;
                cfg.m2 = value as usize;
            }
            SweepKind::RateVsPower => cfg.p = dbm_to_watts(value),
            SweepKind::Custom => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn wants_nmse(self) -> bool {
        matches!(self, SweepKind::RicianNmse | SweepKind::Custom)
    }

    fn wants_snr(self) -> bool {
        matches!(self, SweepKind::RicianSnr | SweepKind::Custom)
    }

    fn wants_rate(self) -> bool {
        matches!(
            self,
            SweepKind::RateVsM | SweepKind::RateVsPower | SweepKind::Custom
        )
    }
}

fn default_trials() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub scenario: ScenarioConfig,
    pub sweep: SweepKind,
    pub sweep_values: Vec<f64>,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub schemes: Vec<Scheme>,
    /// Rates are reported once per entry as `rate_T<t>`; the scenario `T`
    /// is used as `rate` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_times: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig("n_trials must be >= 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep_values must not be empty".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("schemes must not be empty".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::InvalidConfig(format!("scheme {s} listed twice")));
            }
        }
        if let Some(ts) = &self.coherence_times {
            if ts.is_empty() || ts.contains(&0) {
                return Err(Error::InvalidConfig(
                    "coherence_times must be nonempty and positive".into(),
                ));
            }
        }
        for v in &self.sweep_values {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "sweep value {v} is not finite"
                )));
            }
            let cfg = self.sweep.apply(&self.scenario, *v)?;
            for t in self.coherence_list(&cfg) {
                for s in &self.schemes {
                    if s.training_time(&cfg) > t {
                        return Err(Error::InvalidConfig(format!(
                            "{s} needs {} training symbols but T = {t} at sweep value {v}",
                            s.training_time(&cfg)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn coherence_list(&self, cfg: &ScenarioConfig) -> Vec<usize> {
        self.coherence_times.clone().unwrap_or_else(|| vec![cfg.t])
    }

    fn rate_metric_names(&self) -> Vec<String> {
        match &self.coherence_times {
            None => vec!["rate".into()],
            Some(ts) => ts.iter().map(|t| format!("rate_T{t}")).collect(),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Channel seed of one trial: chained SplitMix64 over the three counters.
pub fn trial_seed(master_seed: u64, sweep_index: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ sweep_index) ^ trial_index)
}

/// Pilot-noise seed for one scheme within a trial.
pub fn noise_seed(trial_seed: u64, scheme: Scheme) -> u64 {
    splitmix64(trial_seed ^ scheme.id().wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Everything measured in one trial for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// `‖Ĥ − H‖_F²` for the estimating double-IRS schemes.
    pub error_sq: Option<f64>,
    /// Theoretical MSE of the scheme's estimator.
    pub mse_theory: Option<f64>,
    /// `‖H‖_F²` of the double-IRS channel.
    pub channel_energy: f64,
    pub snr: f64,
    /// One rate per coherence time passed to [`run_trial`].
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Valid(TrialMetrics),
    /// Scheme 2 combiner (or an all-zero single-IRS estimate) was unusable.
    Degenerate,
}

/// One realization for one scheme, evaluated against the true channel.
pub fn run_trial(
    seed: u64,
    cfg: &ScenarioConfig,
    scheme: Scheme,
    coherence_times: &[usize],
) -> Result<TrialOutcome> {
    let mut chan_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(noise_seed(seed, scheme));
    let sigma_sq = cfg.sigma_sq();

    let channels = realize_channels(cfg, &mut chan_rng)?;
    let h: CascadedChannel = channels.grouped(cfg.n0)?;
    let channel_energy = frobenius_sq(&h.h);

    let (snr, error_sq, mse_theory) = match scheme {
        Scheme::S1 => {
            let sched = TrainingSchedule::scheme1_dft(cfg.m1, cfg.m2)?;
            let obs = observe(&h, &sched, sigma_sq, &mut noise_rng)?;
            let est = EstimateS1::from_observation(&obs, &sched)?;
            let pair = ao_optimize(&est.h_hat)?;
            let theory = mse_scheme1_theory(&sched.theta1, &sched.theta2, sigma_sq)?;
            (
                receive_snr(&h.h, &pair, sigma_sq)?,
                Some(frobenius_sq(&(&est.h_hat - &h.h))),
                Some(theory),
            )
        }
        Scheme::S2 => {
            let sched = TrainingSchedule::scheme2_dft(cfg.m1, cfg.m2)?;
            let obs = observe(&h, &sched, sigma_sq, &mut noise_rng)?;
            let est = EstimateS2::from_observation(&obs, &sched, Default::default())?;
            if est.degenerate {
                return Ok(TrialOutcome::Degenerate);
            }
            let pair = beamform_s2(&est)?;
            let theory = mse_scheme2_approx(&est, &sched.theta1, &sched.theta2, sigma_sq)?;
            (
                receive_snr(&h.h, &pair, sigma_sq)?,
                Some(frobenius_sq(&(&est.hl_hat - &h.h))),
                Some(theory),
            )
        }
        Scheme::Single => {
            let single = realize_single_irs(cfg, &mut chan_rng)?;
            let h_hat = estimate_single_irs(&single.h, sigma_sq, &mut noise_rng)?;
            let beam = beamform_single_irs(&h_hat);
            if beam.degenerate {
                return Ok(TrialOutcome::Degenerate);
            }
            (
                single_irs_snr(&single.h, &beam.theta, sigma_sq)?,
                None,
                None,
            )
        }
        Scheme::Perfect => {
            let pair = perfect_csi_bound(&h.h)?;
            (receive_snr(&h.h, &pair, sigma_sq)?, None, None)
        }
    };

    let t_train = scheme.training_time(cfg);
    let rates = coherence_times
        .iter()
        .map(|&t| {
            rate_from_snr(
                snr,
                &RateParams {
                    t,
                    t_training: t_train,
                    gamma: cfg.gamma,
                    sigma_sq,
                },
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TrialOutcome::Valid(TrialMetrics {
        error_sq,
        mse_theory,
        channel_energy,
        snr,
        rates,
    }))
}

/// Aggregated metric for one sweep value and scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub n_valid: usize,
    pub n_degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<ResultRow>,
}

impl SweepResult {
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.sweep_value
                .total_cmp(&b.sweep_value)
                .then_with(|| a.scheme.as_str().cmp(b.scheme.as_str()))
                .then_with(|| a.metric.cmp(&b.metric))
        });
    }

    pub fn get(&self, sweep_value: f64, scheme: Scheme, metric: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.scheme == scheme && r.metric == metric)
    }

    /// Means of one metric for one scheme, in sweep order.
    pub fn series(&self, scheme: Scheme, metric: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme && r.metric == metric)
            .map(|r| (r.sweep_value, r.mean))
            .collect()
    }
}

/// Sample mean and standard error of the mean.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Ratio of sums `Σx / Σy` with a delta-method standard error.
fn ratio_stderr(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let r = sx / sy;
    if n == 1 {
        return (r, f64::NAN);
    }
    let ybar = sy / n as f64;
    let resid: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - r * y).collect();
    let (_, se) = mean_stderr(&resid);
    (r, se / ybar)
}

fn aggregate(
    exp: &ExperimentConfig,
    sweep_value: f64,
    scheme: Scheme,
    outcomes: &[TrialOutcome],
    rows: &mut Vec<ResultRow>,
) {
    let valid: Vec<&TrialMetrics> = outcomes
        .iter()
        .filter_map(|o| match o {
            TrialOutcome::Valid(m) => Some(m),
            TrialOutcome::Degenerate => None,
        })
        .collect();
    let n_valid = valid.len();
    let n_degenerate = outcomes.len() - n_valid;
    let mut push = |metric: String, (mean, stderr): (f64, f64)| {
        rows.push(ResultRow {
            sweep_value,
            scheme,
            metric,
            mean,
            stderr,
            n_valid,
            n_degenerate,
        });
    };

    let energy: Vec<f64> = valid.iter().map(|m| m.channel_energy).collect();
    if exp.sweep.wants_nmse() && scheme.has_estimate_error() {
        let err: Vec<f64> = valid
            .iter()
            .map(|m| m.error_sq.unwrap_or(f64::NAN))
            .collect();
        let theory: Vec<f64> = valid
            .iter()
            .map(|m| m.mse_theory.unwrap_or(f64::NAN))
            .collect();
        push("nmse_mc".into(), ratio_stderr(&err, &energy));
        push("nmse_theory".into(), ratio_stderr(&theory, &energy));
    }
    if exp.sweep.wants_snr() {
        let snr: Vec<f64> = valid.iter().map(|m| m.snr).collect();
        let (mean, se) = mean_stderr(&snr);
        push("snr".into(), (mean, se));
        push(
            "snr_db".into(),
            (
                10.0 * mean.log10(),
                10.0 / std::f64::consts::LN_10 * se / mean,
            ),
        );
    }
    if exp.sweep.wants_rate() {
        for (k, name) in exp.rate_metric_names().into_iter().enumerate() {
            let rates: Vec<f64> = valid.iter().map(|m| m.rates[k]).collect();
            push(name, mean_stderr(&rates));
        }
    }
}

/// Runs every sweep value, scheme and trial. `threads = None` uses the
/// global rayon pool.
pub fn run_sweep(exp: &ExperimentConfig, threads: Option<usize>) -> Result<SweepResult> {
    exp.validate()?;
    let pool = match threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let mut rows = Vec::new();
    for (si, &value) in exp.sweep_values.iter().enumerate() {
        let cfg = exp.sweep.apply(&exp.scenario, value)?;
        let times = exp.coherence_list(&cfg);
        let work = || -> Result<Vec<Vec<TrialOutcome>>> {
            (0..exp.n_trials)
                .into_par_iter()
                .map(|ti| {
                    let seed = trial_seed(exp.master_seed, si as u64, ti as u64);
                    exp.schemes
                        .iter()
                        .map(|&s| run_trial(seed, &cfg, s, &times))
                        .collect()
                })
                .collect()
        };
        let per_trial = match &pool {
            Some(p) => p.install(work)?,
            None => work()?,
        };
        for (k, &scheme) in exp.schemes.iter().enumerate() {
            let outcomes: Vec<TrialOutcome> = per_trial.iter().map(|t| t[k].clone()).collect();
            aggregate(exp, value, scheme, &outcomes, &mut rows);
        }
    }
    let mut result = SweepResult { rows };
    result.sort();
    Ok(result)
}
