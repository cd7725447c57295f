//! One function per subcommand. Each returns the JSON document for stdout, named
//! artifacts for `--out`, and an exit code.

use serde::Serialize;
use serde_json::{json, Value};

use pisot_core::algnum::{classify_pisot, PrecisionReal};
use pisot_core::annihilate::{self, AnnihilatedSequence, CombinedSample};
use pisot_core::density;
use pisot_core::measures::{collapse_to_midpoints, detect_cycle};
use pisot_core::seqgen::IntegerSequence;
use pisot_core::{Error, Result};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::pipeline::{self, error_name, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

/// Terms shown in the JSON summary of a sequence.
pub const PREVIEW_TERMS: usize = 20;

#[derive(Debug)]
pub struct CommandOutput {
    pub json: Value,
    /// `(file name, contents)`.
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub code: i32,
}

impl CommandOutput {
    fn ok(json: Value) -> Self {
        CommandOutput { json, artifacts: Vec::new(), code: EXIT_OK }
    }

    fn artifact(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.artifacts.push((name.to_string(), bytes));
        self
    }

    pub fn from_error(e: &Error) -> Self {
        let json = json!({
            "schema_version": SCHEMA_VERSION,
            "error": error_name(e),
            "message": e.to_string(),
        });
        CommandOutput { json, artifacts: Vec::new(), code: exit_code(e) }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted { .. } | Error::BoundaryAmbiguous | Error::IndeterminateSign => EXIT_PRECISION,
        Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_INPUT,
    }
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::ConsistentWithTheorem => EXIT_OK,
        Verdict::Inconsistent => EXIT_INCONSISTENT,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn document(config: &ExperimentConfig, body: Value) -> Value {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "config": to_json(config) });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

pub fn pisot(config: &ExperimentConfig) -> Result<CommandOutput> {
    let p = config.poly()?;
    let alpha = config.alpha()?;
    let report = classify_pisot(&p, &alpha, &config.policy())?;
    Ok(CommandOutput::ok(document(config, json!({ "report": to_json(&report), "is_pisot": report.is_pisot }))))
}

pub fn generate(config: &ExperimentConfig) -> Result<CommandOutput> {
    let m = config.generate()?;
    let preview: Vec<String> = m.terms.iter().take(PREVIEW_TERMS).map(ToString::to_string).collect();
    let body = json!({
        "start_index": m.start_index,
        "length": m.len(),
        "increasing": m.is_increasing(),
        "preview": preview,
        "spec": to_json(&m.spec),
    });
    let csv = csv_bytes(|b| m.write_csv(b))?;
    Ok(CommandOutput::ok(document(config, body)).artifact("sequence.csv", csv))
}

/// `c_k` from the direct formula, over the range the identity route covers.
fn c_direct_sample(
    config: &ExperimentConfig,
    m: &IntegerSequence,
    e: &AnnihilatedSequence,
) -> Result<(CombinedSample, CombinedSample)> {
    let policy = config.policy();
    let bits = config.tolerances.residual_bits;
    let p = config.poly()?;
    let alpha = config.alpha()?;
    let eta = annihilate::eta_sequence(m, &alpha, &config.theta, bits, &policy)?;
    let tilde = annihilate::tilde_eta(&eta, &p)?;
    let via = annihilate::c_via_identity(&tilde, e, &alpha)?;
    let values = annihilate::c_direct_range(via.start_index, via.len(), &p, &alpha, &config.theta, bits, &policy)?;
    let direct = CombinedSample { values, ..via.clone() };
    Ok((direct, via))
}

pub fn annihilate(config: &ExperimentConfig) -> Result<CommandOutput> {
    let p = config.poly()?;
    let m = config.generate()?;
    let e = annihilate::e_sequence(&m, &p)?;
    let (c, via) = c_direct_sample(config, &m, &e)?;
    let agrees = c.values.iter().zip(&via.values).all(|(a, b)| a.overlaps(b));
    let shown: Vec<String> = e.value_set.iter().take(pipeline::VALUE_SET_LIMIT).map(ToString::to_string).collect();
    let body = json!({
        "start_index": e.start_index,
        "length": e.e_terms.len(),
        "identically_zero": e.is_identically_zero(),
        "e_value_set": shown,
        "e_value_set_size": e.value_set.len(),
        "e_sup_abs": e.sup_abs().to_string(),
        "c_length": c.len(),
        "c_max_abs_error": c.max_abs_error(),
        "c_identity_agrees": agrees,
    });
    let e_csv = csv_bytes(|b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["k", "e"])?;
        for (i, v) in e.e_terms.iter().enumerate() {
            w.write_record([(e.start_index + i as i64).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let c_csv = csv_bytes(|b| c.write_csv(b))?;
    Ok(CommandOutput::ok(document(config, body)).artifact("e.csv", e_csv).artifact("c.csv", c_csv))
}

pub fn eta(config: &ExperimentConfig) -> Result<CommandOutput> {
    let policy = config.policy();
    let alpha = config.alpha()?;
    let m = config.generate()?;
    let eta = annihilate::eta_sequence(&m, &alpha, &config.theta, config.tolerances.residual_bits, &policy)?;
    let preview: Vec<f64> = eta.values.iter().take(PREVIEW_TERMS).map(PrecisionReal::value).collect();
    let body = json!({
        "start_index": eta.start_index,
        "length": eta.len(),
        "max_abs_error": eta.max_abs_error(),
        "preview": preview,
    });
    let csv = csv_bytes(|b| eta.write_csv(b))?;
    Ok(CommandOutput::ok(document(config, body)).artifact("eta.csv", csv))
}

pub fn cycle(config: &ExperimentConfig) -> Result<CommandOutput> {
    let policy = config.policy();
    let tol = &config.tolerances;
    let alpha = config.alpha()?;
    let m = config.generate()?;
    let eta = annihilate::eta_sequence(&m, &alpha, &config.theta, tol.residual_bits, &policy)?;
    let sample = collapse_to_midpoints(&eta.values, tol.cycle_tol)?;
    let report = detect_cycle(&sample, eta.start_index, &tol.cycle_params())?;
    Ok(CommandOutput::ok(document(config, json!({ "cycle_report": to_json(&report) }))))
}

/// The predicted density of `c_k`, with its CDF; columns are space separated for gnuplot.
pub fn density(config: &ExperimentConfig, gnuplot: bool) -> Result<CommandOutput> {
    let p = config.poly()?;
    let alpha = config.alpha()?;
    let pd = density::predicted_density(&p, &alpha, &config.theta, 64, &config.policy())?;
    let cdf = density::predicted_cdf(&pd);
    let body = json!({
        "pieces": pd.pieces.len(),
        "total_mass": pd.total_mass,
        "min_piece_mass": pd.min_piece_mass(),
        "support_contains_interval": pd.support_contains_interval(),
        "density": to_json(&pd),
    });
    let d_csv = csv_bytes(|b| pd.write_csv(b))?;
    let cdf_csv = csv_bytes(|b| cdf.write_csv(b, gnuplot))?;
    let cdf_name = if gnuplot { "cdf.dat" } else { "cdf.csv" };
    Ok(CommandOutput::ok(document(config, body)).artifact("density.csv", d_csv).artifact(cdf_name, cdf_csv))
}

pub fn verify_main_theorem(config: &ExperimentConfig) -> Result<CommandOutput> {
    let record = pipeline::verify_main_theorem(config);
    let code = verdict_code(record.verdict);
    let mut out = CommandOutput { json: to_json(&record), artifacts: Vec::new(), code };
    if let Some(c) = &record.c_sample {
        out = out.artifact("c.csv", csv_bytes(|b| c.write_csv(b))?);
    }
    Ok(out)
}

pub fn spectrum_scan(config: &ExperimentConfig) -> Result<CommandOutput> {
    let table = pipeline::spectrum_scan(config)?;
    let csv = csv_bytes(|b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["theta", "star_discrepancy", "limit_set_clusters", "tilde_gamma_discrepancy"])?;
        for r in &table.rows {
            w.write_record([
                serde_json::to_string(&r.theta).expect("serializable"),
                format!("{:e}", r.star_discrepancy),
                r.limit_set_clusters_circular.to_string(),
                format!("{:e}", r.tilde_gamma_discrepancy),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(CommandOutput::ok(to_json(&table)).artifact("spectrum.csv", csv))
}

/// Run `f` on every config, up to `jobs` at a time. Output order follows the input.
pub fn run_batch<F>(configs: &[ExperimentConfig], jobs: usize, f: F) -> Vec<CommandOutput>
where
    F: Fn(&ExperimentConfig) -> Result<CommandOutput> + Sync,
{
    use rayon::prelude::*;
    let run = |c: &ExperimentConfig| f(c).unwrap_or_else(|e| CommandOutput::from_error(&e));
    if configs.len() == 1 || jobs == 1 {
        return configs.iter().map(run).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| configs.par_iter().map(run).collect()),
        Err(_) => configs.iter().map(run).collect(),
    }
}

/// Merge batch outputs: a JSON array, artifacts under one directory per experiment,
/// and the most severe exit code.
pub fn merge(configs: &[ExperimentConfig], outputs: Vec<CommandOutput>) -> CommandOutput {
    if outputs.len() == 1 {
        return outputs.into_iter().next().expect("one output");
    }
    let code = outputs.iter().map(|o| o.code).max_by_key(|&c| severity(c)).unwrap_or(EXIT_OK);
    let mut json = Vec::with_capacity(outputs.len());
    let mut artifacts = Vec::new();
    for (i, (o, c)) in outputs.into_iter().zip(configs).enumerate() {
        let dir = c.name.clone().unwrap_or_else(|| format!("experiment-{:03}", i + 1));
        json.push(o.json);
        artifacts.extend(o.artifacts.into_iter().map(|(n, b)| (format!("{dir}/{n}"), b)));
    }
    CommandOutput { json: Value::Array(json), artifacts, code }
}

/// Ordering of exit codes for a batch: errors over inconsistency over inconclusive.
fn severity(code: i32) -> i32 {
    match code {
        EXIT_OK => 0,
        EXIT_INCONCLUSIVE => 1,
        EXIT_INCONSISTENT => 2,
        EXIT_PRECISION => 3,
        _ => 4,
    }
}
