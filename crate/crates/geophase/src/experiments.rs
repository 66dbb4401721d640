//! Experiment drivers. Each one turns a resolved config into CSV tables and
//! a flat statistics object; `execute` adds metadata and sweep expansion.

use std::path::Path;

use geophase_core::continuous::{integrate, stokes_check, ModelVariant};
use geophase_core::discrete::{closed_form_phase, make_cycle_input, phase, shape_area, simulate};
use geophase_core::frontrun::{closed_form_frontrun, simulate_two_traders};
use geophase_core::stochastic::{
    aggregate, cycle_cash_prediction, gen_drift, run_trial, trial_seed, DURATION_ALGORITHM,
    NORMAL_ALGORITHM, RNG_ALGORITHM, SEED_DERIVATION,
};
use geophase_core::CycleDirection;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{expand_sweep, Experiment, ExperimentConfig, Override};
use crate::error::RunError;
use crate::output::{fmt_f64, json_bytes, object, stat, write_all, Table};

/// Tables and statistics of a single configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub stats: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Artifacts {
    fn new() -> Self {
        Self {
            tables: Vec::new(),
            stats: Map::new(),
            warnings: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: f64) {
        self.stats.insert(key.to_string(), stat(Some(value)));
    }

    fn put_opt(&mut self, key: &str, value: Option<f64>) {
        self.stats.insert(key.to_string(), stat(value));
    }

    fn put_count(&mut self, key: &str, value: usize) {
        self.stats.insert(key.to_string(), Value::from(value));
    }
}

/// Every file of a run, in write order, plus the statistics object.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub stats: Value,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }
}

fn discrete(config: &ExperimentConfig, direction: CycleDirection) -> Result<Artifacts, RunError> {
    let params = config.market.to_params()?;
    let horizon = config.cycle.horizon;
    let cycles = config.cycle.cycles(direction);
    for c in &cycles {
        c.validate()?;
    }
    let input = make_cycle_input(&cycles, horizon)?;
    let drifts = gen_drift(params.sigma, horizon, config.base_seed)?;
    let traj = simulate(params.initial_state(), &input, &drifts, &params)?;

    let mut table = Table::new("trajectory.csv", &["tick", "u", "w", "y", "s", "z"]);
    for (tick, state) in traj.states.iter().enumerate() {
        let u = traj.inputs.get(tick).copied().unwrap_or(0.0);
        let w = traj.drifts.get(tick).copied().unwrap_or(0.0);
        let mut row = vec![tick.to_string()];
        row.extend([u, w, state.inventory, state.quote, state.cash].map(fmt_f64));
        table.push(row);
    }

    let mut a = Artifacts::new();
    let last = traj.last();
    a.put("phase", phase(&traj));
    a.put(
        "predicted_phase",
        cycle_cash_prediction(&cycles, &traj.drifts, &params),
    );
    a.put(
        "closed_form_phase_per_cycle",
        closed_form_phase(config.cycle.k, &params),
    );
    a.put("cumulative_drift", traj.cumulative_drift());
    a.put("y_end", last.inventory);
    a.put("s_end", last.quote);
    a.put("z_end", last.cash);
    a.put_opt("shape_area", shape_area(&traj).ok());
    a.put_count("n_cycles", cycles.len());
    let negative = traj.negative_quote_ticks();
    a.put_count("negative_quote_ticks", negative);
    if negative > 0 {
        a.warnings
            .push(format!("quote was negative on {negative} ticks"));
    }
    a.tables.push(table);
    Ok(a)
}

fn montecarlo(config: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let params = config.market.to_params()?;
    let sp = config.schedule.to_params()?;
    if config.trials == 0 {
        return Err(RunError::Config("trials must be at least 1".into()));
    }
    let records = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(&sp, &params, config.base_seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    let report = aggregate(records);

    let mut table = Table::new(
        "trials.csv",
        &[
            "trial",
            "seed",
            "n_cycles",
            "mean_duration",
            "cum_drift",
            "s_end",
            "z_end",
        ],
    );
    for r in &report.records {
        let s = &r.summary;
        debug_assert_eq!(s.seed, trial_seed(config.base_seed, r.trial));
        let mut row = vec![
            r.trial.to_string(),
            s.seed.to_string(),
            s.n_cycles.to_string(),
        ];
        row.extend([s.mean_duration, s.cum_drift, s.s_end, s.z_end].map(fmt_f64));
        table.push(row);
    }

    let st = report.stats;
    let mut a = Artifacts::new();
    a.put_count("trials", st.trials);
    a.put("mean_z", st.mean_z);
    a.put_opt("std_z", st.std_z);
    a.put_opt("corr_z_ncycles", st.corr_z_ncycles);
    a.put_opt("corr_z_send", st.corr_z_send);
    a.put_opt("corr_z_drift", st.corr_z_drift);
    a.put("frac_profitable", st.frac_profitable);
    a.put(
        "closed_form_phase_per_cycle",
        closed_form_phase(sp.k, &params),
    );
    let negative = report
        .records
        .iter()
        .filter(|r| r.summary.s_end < 0.0)
        .count();
    a.put_count("negative_final_quote_trials", negative);
    if negative > 0 {
        a.warnings
            .push(format!("{negative} trials ended with a negative quote"));
    }
    a.tables.push(table);
    Ok(a)
}

fn frontrun(config: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let params = config.market.to_params()?;
    let fr = &config.frontrun;
    let spec = fr.spec();
    let drifts = gen_drift(params.sigma, fr.horizon, config.base_seed)?;
    let traj = simulate_two_traders(&spec, &params, &drifts, fr.horizon)?;

    let mut table = Table::new(
        "frontrun.csv",
        &["tick", "u_c", "u_h", "y_c", "y_h", "s", "z_c", "z_h"],
    );
    for (tick, st) in traj.states.iter().enumerate() {
        let u_c = traj.u_c.get(tick).copied().unwrap_or(0.0);
        let u_h = traj.u_h.get(tick).copied().unwrap_or(0.0);
        let mut row = vec![tick.to_string()];
        row.extend([u_c, u_h, st.y_c, st.y_h, st.quote, st.z_c, st.z_h].map(fmt_f64));
        table.push(row);
    }

    let (dz_c, dz_h) = traj.cash_deltas();
    let (cf_c, cf_h) = closed_form_frontrun(fr.k_c, fr.k_h, params.impact.coefficient());
    let mut a = Artifacts::new();
    a.put("dz_c", dz_c);
    a.put("dz_h", dz_h);
    a.put("closed_form_dz_c", cf_c);
    a.put("closed_form_dz_h", cf_h);
    a.put("s_end", traj.last().quote);
    let negative = traj.states.iter().filter(|s| s.quote < 0.0).count();
    a.put_count("negative_quote_ticks", negative);
    if negative > 0 {
        a.warnings
            .push(format!("quote was negative on {negative} ticks"));
    }
    a.tables.push(table);
    Ok(a)
}

fn continuous(config: &ExperimentConfig, variant: ModelVariant) -> Result<Artifacts, RunError> {
    let cc = &config.continuous;
    let model = cc.model(variant);
    let input = cc.signal();
    input.validate()?;
    let period = input.period();
    let span = cc.cycles as f64 * period;
    // delayed variants are measured after the initial delay, once the loop closes
    let start = if variant.is_delayed() { cc.tau } else { 0.0 };
    let full = integrate(&model, &input, cc.dt, start + span)?;
    let window = full.window(start, start + span)?;

    let mut table = Table::new("continuous.csv", &["t", "u", "y", "s", "z"]);
    for p in &full.samples {
        table.push_floats(&[p.t, p.u, p.y, p.s, p.z]);
    }

    let mut a = Artifacts::new();
    a.put("phase", window.phase());
    a.put_opt(
        "phase_per_cycle",
        (cc.cycles > 0).then(|| window.phase() / cc.cycles as f64),
    );
    a.put("phase_from_start", full.phase());
    a.put("window_start", start);
    a.put("window_end", start + span);
    a.put_count("samples", full.samples.len());
    if !variant.has_spread() || model.spread == 0.0 {
        let report = stokes_check(&window)?;
        a.put("line_integral", report.line_integral);
        a.put("area", report.area);
        a.put("stokes_residual", report.residual);
    }
    a.tables.push(table);
    Ok(a)
}

/// Tables and statistics for one configuration, without sweep expansion.
pub fn compute(experiment: Experiment, config: &ExperimentConfig) -> Result<Artifacts, RunError> {
    match experiment {
        Experiment::Cycle | Experiment::Drift | Experiment::Spread => {
            discrete(config, CycleDirection::BuyThenSell)
        }
        Experiment::Sellbuy => discrete(config, CycleDirection::SellThenBuy),
        Experiment::Montecarlo => montecarlo(config),
        Experiment::Frontrun => frontrun(config),
        Experiment::ContPlain => continuous(config, ModelVariant::Plain),
        Experiment::ContDelay => continuous(config, ModelVariant::Delayed),
        Experiment::ContSpread => continuous(config, ModelVariant::Spread),
        Experiment::ContDelayspread => continuous(config, ModelVariant::DelayedSpread),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn sweep(experiment: Experiment, config: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let points = expand_sweep(config)?;
    let results = points
        .par_iter()
        .map(|(_, cfg)| compute(experiment, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let keys: Vec<&String> = config.sweep.keys().collect();
    let stat_keys: Vec<String> = results
        .first()
        .map(|r| r.stats.keys().cloned().collect())
        .unwrap_or_default();
    let header: Vec<&str> = keys
        .iter()
        .map(|k| k.as_str())
        .chain(stat_keys.iter().map(String::as_str))
        .collect();
    let mut table = Table::new("sweep.csv", &header);
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for ((point, _), result) in points.iter().zip(&results) {
        let mut row: Vec<String> = point.iter().map(|(_, v)| cell(v)).collect();
        row.extend(
            stat_keys
                .iter()
                .map(|k| cell(result.stats.get(k).unwrap_or(&Value::Null))),
        );
        table.push(row);
        let params = object(point.iter().cloned());
        entries.push(object([
            ("point".to_string(), params),
            ("stats".to_string(), Value::Object(result.stats.clone())),
        ]));
        for w in &result.warnings {
            let at: Vec<String> = point
                .iter()
                .map(|(k, v)| format!("{k}={}", cell(v)))
                .collect();
            warnings.push(format!("{} ({})", w, at.join(", ")));
        }
    }
    let mut stats = Map::new();
    stats.insert("points".into(), Value::from(results.len()));
    stats.insert("sweep".into(), Value::Array(entries));
    Ok(Artifacts {
        tables: vec![table],
        stats,
        warnings,
    })
}

fn metadata(
    experiment: Experiment,
    config: &ExperimentConfig,
    overrides: &[Override],
    outputs: &[String],
) -> Result<Value, RunError> {
    let overrides = overrides
        .iter()
        .map(|o| {
            object([
                ("key".to_string(), Value::from(o.path.clone())),
                ("value".to_string(), o.value.clone()),
            ])
        })
        .collect();
    let pairs: Vec<(String, Value)> = vec![
        ("artifact".into(), Value::from(env!("CARGO_PKG_NAME"))),
        ("version".into(), Value::from(env!("CARGO_PKG_VERSION"))),
        ("experiment".into(), Value::from(experiment.name())),
        ("config".into(), serde_json::to_value(config)?),
        ("overrides".into(), Value::Array(overrides)),
        ("base_seed".into(), Value::from(config.base_seed)),
        ("rng".into(), Value::from(RNG_ALGORITHM)),
        ("normal".into(), Value::from(NORMAL_ALGORITHM)),
        ("durations".into(), Value::from(DURATION_ALGORITHM)),
        ("seed_derivation".into(), Value::from(SEED_DERIVATION)),
        ("outputs".into(), Value::from(outputs.to_vec())),
    ];
    Ok(object(pairs))
}

/// Runs an experiment in memory: data tables, `stats.json` and
/// `metadata.json`, byte for byte as they would be written.
pub fn execute(
    experiment: Experiment,
    config: &ExperimentConfig,
    overrides: &[Override],
) -> Result<RunOutput, RunError> {
    let artifacts = if config.sweep.is_empty() {
        compute(experiment, config)?
    } else {
        sweep(experiment, config)?
    };
    let mut files = Vec::new();
    for t in &artifacts.tables {
        files.push((t.file_name.clone(), t.to_bytes()?));
    }
    let stats = Value::Object(artifacts.stats);
    files.push(("stats.json".to_string(), json_bytes(&stats)?));
    let mut names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    names.push("metadata.json".to_string());
    let meta = metadata(experiment, config, overrides, &names)?;
    files.push(("metadata.json".to_string(), json_bytes(&meta)?));
    Ok(RunOutput {
        files,
        stats,
        warnings: artifacts.warnings,
    })
}

/// Runs an experiment and writes its files into `out_dir`.
pub fn run(
    experiment: Experiment,
    config: &ExperimentConfig,
    overrides: &[Override],
    out_dir: &Path,
) -> Result<RunOutput, RunError> {
    let output = execute(experiment, config, overrides)?;
    write_all(out_dir, &output.files)?;
    Ok(output)
}
