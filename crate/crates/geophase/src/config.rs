//! Experiment configuration: per-experiment defaults, a JSON file overlay and
//! `key=value` overrides, resolved in that order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use geophase_core::continuous::{ContinuousModel, InputSignal, ModelVariant};
use geophase_core::frontrun::FrontrunSpec;
use geophase_core::stochastic::ScheduleParams;
use geophase_core::{CycleDirection, CycleSpec, ImpactFunction, MarketParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Experiment {
    /// Single buy-then-sell cycle
    Cycle,
    /// Single sell-then-buy cycle
    Sellbuy,
    /// Repeated cycles on a drifting quote
    Drift,
    /// Cycles with bid-ask spread and fees
    Spread,
    /// Batch of random schedules with drift
    Montecarlo,
    /// Classical trader front-run by a fast trader
    Frontrun,
    /// Continuous model, no delay
    ContPlain,
    /// Continuous model with delayed price response
    ContDelay,
    /// Continuous model with spread
    ContSpread,
    /// Continuous model with delay and spread
    ContDelayspread,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Self::Cycle,
        Self::Sellbuy,
        Self::Drift,
        Self::Spread,
        Self::Montecarlo,
        Self::Frontrun,
        Self::ContPlain,
        Self::ContDelay,
        Self::ContSpread,
        Self::ContDelayspread,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cycle => "cycle",
            Self::Sellbuy => "sellbuy",
            Self::Drift => "drift",
            Self::Spread => "spread",
            Self::Montecarlo => "montecarlo",
            Self::Frontrun => "frontrun",
            Self::ContPlain => "cont-plain",
            Self::ContDelay => "cont-delay",
            Self::ContSpread => "cont-spread",
            Self::ContDelayspread => "cont-delayspread",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactKind {
    Linear,
    SignedPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketConfig {
    pub impact: ImpactKind,
    pub r: f64,
    /// Exponent, used by `signed_power` only.
    pub gamma: f64,
    pub q: f64,
    pub c: f64,
    pub sigma: f64,
    pub s0: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            impact: ImpactKind::Linear,
            r: 0.1,
            gamma: 1.0,
            q: 0.0,
            c: 0.0,
            sigma: 0.0,
            s0: 100.0,
        }
    }
}

impl MarketConfig {
    pub fn to_params(&self) -> Result<MarketParams, RunError> {
        let impact = match self.impact {
            ImpactKind::Linear => ImpactFunction::linear(self.r),
            ImpactKind::SignedPower => ImpactFunction::signed_power(self.r, self.gamma),
        }?;
        Ok(MarketParams::new(
            impact, self.q, self.c, self.sigma, self.s0,
        )?)
    }
}

/// `repeats` cycles, the j-th opening at `t_b + j * spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CycleConfig {
    pub t_b: usize,
    pub t_s: usize,
    pub k: f64,
    pub horizon: usize,
    pub repeats: usize,
    pub spacing: usize,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self {
            t_b: 20,
            t_s: 80,
            k: 1.0,
            horizon: 100,
            repeats: 1,
            spacing: 100,
        }
    }
}

impl CycleConfig {
    pub fn cycles(&self, direction: CycleDirection) -> Vec<CycleSpec> {
        (0..self.repeats)
            .map(|j| CycleSpec {
                t_b: self.t_b + j * self.spacing,
                t_s: self.t_s + j * self.spacing,
                k: self.k,
                direction,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    /// `null` disables trading.
    pub mean_interarrival: Option<f64>,
    pub mean_hold: f64,
    pub k: f64,
    pub horizon: usize,
    pub allow_short: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            mean_interarrival: Some(50.0),
            mean_hold: 1.0,
            k: 1.0,
            horizon: 5_000,
            allow_short: false,
        }
    }
}

impl ScheduleConfig {
    pub fn to_params(&self) -> Result<ScheduleParams, RunError> {
        let sp = ScheduleParams {
            mean_interarrival: self.mean_interarrival.unwrap_or(f64::INFINITY),
            mean_hold: self.mean_hold,
            k: self.k,
            horizon: self.horizon,
            allow_short: self.allow_short,
        };
        sp.validate()?;
        Ok(sp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontrunConfig {
    pub k_c: f64,
    pub k_h: f64,
    pub t_cb: usize,
    pub t_cs: usize,
    pub tau1: usize,
    pub tau2: usize,
    pub horizon: usize,
}

impl Default for FrontrunConfig {
    fn default() -> Self {
        Self {
            k_c: 1.0,
            k_h: 1.0,
            t_cb: 40,
            t_cs: 80,
            tau1: 5,
            tau2: 5,
            horizon: 100,
        }
    }
}

impl FrontrunConfig {
    pub fn spec(&self) -> FrontrunSpec {
        FrontrunSpec {
            k_c: self.k_c,
            k_h: self.k_h,
            t_cb: self.t_cb,
            t_cs: self.t_cs,
            tau1: self.tau1,
            tau2: self.tau2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Sinusoid,
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuousConfig {
    pub r: f64,
    pub tau: f64,
    pub q: f64,
    pub s0: f64,
    pub input: InputKind,
    pub amplitude: f64,
    pub period: f64,
    pub k: f64,
    pub ramp: f64,
    pub hold: f64,
    pub dt: f64,
    pub cycles: usize,
}

impl Default for ContinuousConfig {
    fn default() -> Self {
        Self {
            r: 0.1,
            tau: 0.25,
            q: 0.02,
            s0: 100.0,
            input: InputKind::Sinusoid,
            amplitude: 1.0,
            period: 1.0,
            k: 1.0,
            ramp: 0.1,
            hold: 1.0,
            dt: 1e-3,
            cycles: 3,
        }
    }
}

impl ContinuousConfig {
    pub fn model(&self, variant: ModelVariant) -> ContinuousModel {
        let tau = if variant.is_delayed() { self.tau } else { 0.0 };
        let spread = if variant.has_spread() { self.q } else { 0.0 };
        ContinuousModel {
            r: self.r,
            tau,
            spread,
            initial_quote: self.s0,
            variant,
        }
    }

    pub fn signal(&self) -> InputSignal {
        match self.input {
            InputKind::Sinusoid => InputSignal::Sinusoid {
                amplitude: self.amplitude,
                period: self.period,
            },
            InputKind::Trapezoid => InputSignal::TrapezoidCycle {
                k: self.k,
                ramp: self.ramp,
                hold: self.hold,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub market: MarketConfig,
    pub cycle: CycleConfig,
    pub schedule: ScheduleConfig,
    pub frontrun: FrontrunConfig,
    pub continuous: ContinuousConfig,
    pub trials: usize,
    pub base_seed: u64,
    pub output_dir: Option<String>,
    /// Parameter path to list of values; the cartesian product is run in
    /// key order.
    pub sweep: BTreeMap<String, Vec<Value>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            market: MarketConfig::default(),
            cycle: CycleConfig::default(),
            schedule: ScheduleConfig::default(),
            frontrun: FrontrunConfig::default(),
            continuous: ContinuousConfig::default(),
            trials: 1000,
            base_seed: 42,
            output_dir: None,
            sweep: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults tuned so each experiment shows its effect out of the box.
    pub fn defaults_for(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment: Some(experiment.name().to_string()),
            ..Self::default()
        };
        match experiment {
            Experiment::Cycle | Experiment::Sellbuy | Experiment::Frontrun => {}
            Experiment::Drift => {
                c.market.sigma = 0.02;
                c.cycle = CycleConfig {
                    t_b: 20,
                    t_s: 24,
                    k: 1.0,
                    horizon: 1000,
                    repeats: 10,
                    spacing: 100,
                };
            }
            Experiment::Spread => {
                c.market.q = 0.04;
                c.market.c = 0.01;
                c.cycle = CycleConfig {
                    t_b: 20,
                    t_s: 30,
                    k: 1.0,
                    horizon: 500,
                    repeats: 5,
                    spacing: 100,
                };
            }
            Experiment::Montecarlo => {
                c.market.q = 0.02;
                c.market.c = 0.01;
                c.market.sigma = 0.01;
            }
            Experiment::ContPlain | Experiment::ContDelay => {}
            Experiment::ContSpread => {
                c.continuous.q = 0.2;
                c.continuous.input = InputKind::Trapezoid;
                c.continuous.dt = 1e-4;
                c.continuous.cycles = 1;
            }
            Experiment::ContDelayspread => {
                c.continuous.dt = 1e-4;
                c.continuous.cycles = 1;
            }
        }
        c
    }
}

/// Scalar override `key=value`. The value is parsed as JSON when possible,
/// otherwise taken as a string.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: String,
    pub value: Value,
}

impl Override {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let (path, raw) = text.split_once('=').ok_or_else(|| {
            RunError::Config(format!("override `{text}` is not of the form key=value"))
        })?;
        let path = path.trim();
        if path.is_empty() {
            return Err(RunError::Config(format!(
                "override `{text}` has an empty key"
            )));
        }
        let value = serde_json::from_str(raw.trim())
            .unwrap_or_else(|_| Value::String(raw.trim().to_string()));
        Ok(Self {
            path: path.to_string(),
            value,
        })
    }
}

/// Sets a dotted path inside `root`; every segment must already exist.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), RunError> {
    let mut node = root;
    let mut segments = path.split('.').peekable();
    while let Some(segment) = segments.next() {
        let obj = node.as_object_mut().ok_or_else(|| {
            RunError::Config(format!("`{path}`: `{segment}` is not inside an object"))
        })?;
        let slot = obj
            .get_mut(segment)
            .ok_or_else(|| RunError::Config(format!("unknown config field `{path}`")))?;
        if segments.peek().is_none() {
            *slot = value;
            return Ok(());
        }
        node = slot;
    }
    Err(RunError::Config(format!("empty config path `{path}`")))
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() && k != "sweep" => {
                        merge(slot, v)
                    }
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn from_value(value: Value) -> Result<ExperimentConfig, RunError> {
    serde_json::from_value(value).map_err(|e| RunError::Config(format!("config: {e}")))
}

/// Defaults, then the file, then overrides.
pub fn resolve(
    experiment: Experiment,
    file_text: Option<&str>,
    overrides: &[Override],
) -> Result<ExperimentConfig, RunError> {
    let mut value = serde_json::to_value(ExperimentConfig::defaults_for(experiment))
        .map_err(|e| RunError::Config(e.to_string()))?;
    if let Some(text) = file_text {
        // strict parse of the file on its own for line/column diagnostics
        serde_json::from_str::<ExperimentConfig>(text)
            .map_err(|e| RunError::Config(format!("config file: {e}")))?;
        let overlay: Value = serde_json::from_str(text)
            .map_err(|e| RunError::Config(format!("config file: {e}")))?;
        merge(&mut value, overlay);
    }
    for o in overrides {
        set_path(&mut value, &o.path, o.value.clone())?;
    }
    let config = from_value(value)?;
    if let Some(name) = &config.experiment {
        if name != experiment.name() {
            return Err(RunError::Config(format!(
                "config names experiment `{name}` but `{experiment}` was requested"
            )));
        }
    }
    Ok(config)
}

pub fn load(
    experiment: Experiment,
    path: Option<&Path>,
    overrides: &[Override],
) -> Result<ExperimentConfig, RunError> {
    let text = match path {
        Some(p) => Some(
            std::fs::read_to_string(p)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => None,
    };
    resolve(experiment, text.as_deref(), overrides)
}

/// Parameter assignments of one sweep point and the config they produce.
pub type SweepPoint = (Vec<(String, Value)>, ExperimentConfig);

/// Expands the sweep table into one config per point, keys in sorted order
/// with the last key varying fastest.
pub fn expand_sweep(config: &ExperimentConfig) -> Result<Vec<SweepPoint>, RunError> {
    let mut base = serde_json::to_value(config).map_err(|e| RunError::Config(e.to_string()))?;
    set_path(&mut base, "sweep", Value::Object(Default::default()))?;
    let mut points: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for (key, values) in &config.sweep {
        if values.is_empty() {
            return Err(RunError::Config(format!("sweep `{key}` has no values")));
        }
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((key.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|point| {
            let mut value = base.clone();
            for (k, v) in &point {
                set_path(&mut value, k, v.clone())?;
            }
            Ok((point, from_value(value)?))
        })
        .collect()
}
