//! The two flagship experiments: the cycle/irrationality dichotomy for `eta_k`, and the
//! fractional-part spectrum of `xi alpha^k`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pisot_core::algnum::{classify_pisot, PrecisionReal, RealAlgebraic, RealInput};
use pisot_core::annihilate::{self, e_bound, e_sequence};
use pisot_core::density::{self, DensityReport};
use pisot_core::measures::{self, collapse_to_midpoints, detect_cycle, CycleReport};
use pisot_core::seqgen::{self, IntegerSequence, ResidualParams};
use pisot_core::{Error, Result};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ConsistentWithTheorem,
    Inconsistent,
    Inconclusive,
}

/// Boundedness of `f_k = m_{k+1} - alpha m_k`, judged by its sup and its growth trend.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub f_sup: f64,
    /// `sup |f_k|` over the first and the last quarter of the run.
    pub f_sup_first_quarter: f64,
    pub f_sup_last_quarter: f64,
    pub bounded: bool,
    /// Independent big-float evaluations of `f_k` at seeded random `k`, all agreeing.
    /// Only indices whose direct evaluation fits the precision limit are drawn.
    pub audit_indices: Vec<i64>,
    pub audit_passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictRecord {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub theta_is_rational: bool,
    pub hypothesis: Option<HypothesisCheck>,
    /// Distinct values of `e_k`, at most [`VALUE_SET_LIMIT`] of them.
    pub e_value_set: Vec<String>,
    pub e_value_set_size: usize,
    pub e_bound_holds: Option<bool>,
    pub cycle_report: Option<CycleReport>,
    /// Whether `eta~_k - (e_{k+1} - alpha e_k)` meets the direct formula for `c_k` at
    /// every `k`, within their errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_identity_agrees: Option<bool>,
    pub density_comparison: Option<DensityReport>,
    pub verdict: Verdict,
    pub diagnostics: String,
    /// The `c_k` behind the density comparison; written as a CSV artifact.
    #[serde(skip)]
    pub c_sample: Option<annihilate::CombinedSample>,
}

pub const VALUE_SET_LIMIT: usize = 64;

const AUDIT_SAMPLES: usize = 16;

struct Partial {
    hypothesis: Option<HypothesisCheck>,
    e_value_set: Vec<String>,
    e_value_set_size: usize,
    e_bound_holds: Option<bool>,
    cycle_report: Option<CycleReport>,
    c_identity_agrees: Option<bool>,
    density_comparison: Option<DensityReport>,
    c_sample: Option<annihilate::CombinedSample>,
    notes: Vec<String>,
}

fn hypothesis_check(
    m: &IntegerSequence,
    alpha: &RealAlgebraic,
    f: &[PrecisionReal],
    seed: u64,
    bits: u32,
    policy: &pisot_core::algnum::PrecisionPolicy,
) -> Result<HypothesisCheck> {
    let abs: Vec<f64> = f.iter().map(|v| v.value().abs()).collect();
    let q = (abs.len() / 4).max(1);
    let sup = |s: &[f64]| s.iter().cloned().fold(0.0, f64::max);
    let first = sup(&abs[..q]);
    let last = sup(&abs[abs.len() - q..]);
    // a bounded sequence cannot keep growing across the run
    let bounded = last <= 2.0 * first + 1.0;
    // direct evaluation needs alpha to the full size of m_k; audit only where that fits
    let fits = |i: usize| u64::from(m.terms[i].bits() as u32 + bits + 8) + u64::from(policy.guard_bits) <= u64::from(policy.max_bits);
    let reach = (0..f.len()).take_while(|&i| fits(i)).count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit_indices: Vec<i64> =
        (0..AUDIT_SAMPLES.min(reach)).map(|_| rng.random_range(0..reach) as i64).collect();
    audit_indices.sort_unstable();
    audit_indices.dedup();
    let mut audit_passed = true;
    for &i in &audit_indices {
        let i = i as usize;
        let size = m.terms[i].bits() as u32;
        let a = alpha.refine_bits(policy.check(u64::from(size + bits + 8))?, policy)?;
        let direct = &PrecisionReal::from_int(&m.terms[i + 1], a.bits()) - &a.mul_int(&m.terms[i]);
        audit_passed &= direct.overlaps(&f[i]);
    }
    let audit_indices = audit_indices.into_iter().map(|i| m.start_index + i).collect();
    Ok(HypothesisCheck { f_sup: sup(&abs), f_sup_first_quarter: first, f_sup_last_quarter: last, bounded, audit_indices, audit_passed })
}

fn value_set(e: &annihilate::AnnihilatedSequence) -> (Vec<String>, usize) {
    let all = &e.value_set;
    (all.iter().take(VALUE_SET_LIMIT).map(BigInt::to_string).collect(), all.len())
}

fn run_partial(config: &ExperimentConfig, part: &mut Partial) -> Result<Verdict> {
    let policy = config.policy();
    let tol = &config.tolerances;
    let bits = tol.residual_bits;
    let p = config.poly()?;
    let alpha = config.alpha()?;
    let theta = &config.theta;
    let m = config.generate()?;

    let f = seqgen::residuals(&m, &alpha, ResidualParams::F, bits, &policy)?;
    let hyp = hypothesis_check(&m, &alpha, &f.values, config.seed, bits, &policy)?;
    let bounded = hyp.bounded;
    if !hyp.audit_passed {
        part.notes.push("residual audit failed".into());
    }
    part.hypothesis = Some(hyp);

    let e = e_sequence(&m, &p)?;
    let (vs, size) = value_set(&e);
    part.e_value_set = vs;
    part.e_value_set_size = size;
    if !bounded {
        part.notes.push("f_k unbounded (hypothesis violated)".into());
        return Ok(Verdict::Inconclusive);
    }
    let bound = e_bound(&p, &alpha, &f.sup_abs);
    let e_sup = e.sup_abs().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    part.e_bound_holds = Some(e_sup <= bound.upper());

    let eta = annihilate::eta_sequence(&m, &alpha, theta, bits, &policy)?;
    let sample = collapse_to_midpoints(&eta.values, tol.cycle_tol)?;
    let report = detect_cycle(&sample, eta.start_index, &tol.cycle_params())?;
    let found = report.found;
    part.cycle_report = Some(report);

    if theta.is_rational() {
        if found {
            return Ok(Verdict::ConsistentWithTheorem);
        }
        part.notes.push(format!(
            "rational theta but no cycle of period <= {} at tol {:e} over N = {}",
            tol.ell_max, tol.cycle_tol, config.n
        ));
        return Ok(Verdict::Inconclusive);
    }

    let tilde = annihilate::tilde_eta(&eta, &p)?;
    let c = annihilate::c_via_identity(&tilde, &e, &alpha)?;
    let direct = annihilate::c_direct_range(c.start_index, c.len(), &p, &alpha, theta, bits, &policy)?;
    let agrees = c.values.iter().zip(&direct).all(|(a, b)| a.overlaps(b));
    part.c_identity_agrees = Some(agrees);
    if !agrees {
        part.notes.push("c_k identity check failed".into());
        return Ok(Verdict::Inconclusive);
    }
    let c_sample = collapse_to_midpoints(&c.values, tol.cycle_tol)?;
    part.c_sample = Some(c);
    let pd = density::predicted_density(&p, &alpha, theta, 64, &policy)?;
    let dr = density::compare(pd, &c_sample, tol.histogram_bins)?;
    let matches = dr.ks < tol.ks_threshold && dr.mass_outside_support < tol.outside_mass_threshold;
    let (ks, outside) = (dr.ks, dr.mass_outside_support);
    part.density_comparison = Some(dr);
    match (found, matches) {
        (true, _) => {
            part.notes.push("irrational theta but eta_k converges to a cycle".into());
            Ok(Verdict::Inconsistent)
        }
        (false, true) => Ok(Verdict::ConsistentWithTheorem),
        (false, false) => {
            part.notes.push(format!(
                "c_k distribution differs from the prediction: KS {ks:.4}, mass outside support {outside:.4}"
            ));
            Ok(Verdict::Inconclusive)
        }
    }
}

/// Run the dichotomy experiment. Errors never escape: they make the verdict inconclusive.
pub fn verify_main_theorem(config: &ExperimentConfig) -> VerdictRecord {
    let mut part = Partial {
        hypothesis: None,
        e_value_set: Vec::new(),
        e_value_set_size: 0,
        e_bound_holds: None,
        cycle_report: None,
        c_identity_agrees: None,
        density_comparison: None,
        c_sample: None,
        notes: Vec::new(),
    };
    let verdict = match run_partial(config, &mut part) {
        Ok(v) => v,
        Err(e) => {
            part.notes.push(format!("{}: {e}", error_name(&e)));
            Verdict::Inconclusive
        }
    };
    VerdictRecord {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        theta_is_rational: config.theta.is_rational(),
        hypothesis: part.hypothesis,
        e_value_set: part.e_value_set,
        e_value_set_size: part.e_value_set_size,
        e_bound_holds: part.e_bound_holds,
        cycle_report: part.cycle_report,
        c_identity_agrees: part.c_identity_agrees,
        density_comparison: part.density_comparison,
        verdict,
        diagnostics: part.notes.join("; "),
        c_sample: part.c_sample,
    }
}

pub fn error_name(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "Parse",
        Error::InvalidInput(_) => "InvalidInput",
        Error::NotSquarefree(_) => "NotSquarefree",
        Error::PrecisionExhausted { .. } => "PrecisionExhausted",
        Error::BoundaryAmbiguous => "BoundaryAmbiguous",
        Error::IndeterminateSign => "IndeterminateSign",
        Error::Inconclusive(_) => "Inconclusive",
        Error::NonMonicRecurrence(_) => "NonMonicRecurrence",
        Error::NotIncreasing(_) => "NotIncreasing",
        Error::DomainError(_) => "DomainError",
        Error::DegenerateTheta(_) => "DegenerateTheta",
        Error::InsufficientData(_) => "InsufficientData",
        Error::OutOfRange(_) => "OutOfRange",
        Error::Io(_) => "Io",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub theta: pisot_core::algnum::RealSpec,
    pub theta_is_rational: bool,
    /// `D*` of `{xi alpha^k - k theta}`.
    pub star_discrepancy: f64,
    /// Weyl sums for `h = 1 ..= 5`.
    pub weyl_sums: Vec<f64>,
    pub limit_set_clusters: usize,
    /// Clusters on the circle: one touching 0 and one touching 1 count once.
    pub limit_set_clusters_circular: usize,
    pub cluster_centers: Vec<f64>,
    /// `D*` of `{gamma~_k}`.
    pub tilde_gamma_discrepancy: f64,
    /// Largest `|gamma~_k - closed form|`.
    pub tilde_gamma_max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumTable {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub is_pisot: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub rows: Vec<SpectrumRow>,
}

fn fracs(values: &[PrecisionReal]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|v| {
            // a value within its error of an integer is reported as 0
            match v.frac() {
                Ok(f) => Ok(f.value().clamp(0.0, 1.0 - f64::EPSILON / 2.0)),
                Err(Error::BoundaryAmbiguous) if v.abs_error() < 1e-9 => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Fractional-part statistics of `xi alpha^k - k theta`, `k = 1 ..= N`, for each `theta`.
pub fn spectrum_scan(config: &ExperimentConfig) -> Result<SpectrumTable> {
    let policy = config.policy();
    let p = config.poly()?;
    let alpha = config.alpha()?;
    let xi = config.xi();
    let mut warnings = Vec::new();
    let is_pisot = match classify_pisot(&p, &alpha, &policy) {
        Ok(r) => {
            if !r.is_pisot {
                warnings.push(format!("alpha is not a Pisot number: {}", r.reason.unwrap_or_default()));
            }
            Some(r.is_pisot)
        }
        Err(e) => {
            warnings.push(format!("Pisot classification failed: {e}"));
            None
        }
    };
    let thetas: Vec<RealInput> =
        if config.thetas.is_empty() { vec![config.theta.clone()] } else { config.thetas.clone() };
    let bits = config.tolerances.residual_bits;
    let n = config.n as u64;
    let d = p.degree() as u64;
    let tail = config.tolerances.tail_fraction;
    let gap = config.tolerances.cluster_gap;
    let mut rows = Vec::with_capacity(thetas.len());
    for theta in &thetas {
        let g = annihilate::gamma(&xi, &alpha, theta, 1, n + d, bits, &policy)?;
        let x = fracs(&g.values[..config.n])?;
        let star = measures::star_discrepancy(&x)?;
        let weyl = (1..=5).map(|h| measures::weyl_sum(&x, h)).collect::<Result<Vec<_>>>()?;
        let est = measures::limit_set_estimate(&x, tail, gap)?;
        let mut circular = est.clusters.len();
        if circular > 1 {
            let first = &est.clusters[0];
            let last = &est.clusters[circular - 1];
            if first.center - first.radius <= gap && last.center + last.radius >= 1.0 - gap {
                circular -= 1;
            }
        }
        let tg = annihilate::tilde_gamma(&g, &p)?;
        let mut deviation: f64 = 0.0;
        for (i, v) in tg.values.iter().enumerate() {
            let closed = annihilate::tilde_gamma_closed(tg.start_index + i as i64, &p, theta, bits, &policy)?;
            deviation = deviation.max((&closed - v).value().abs());
        }
        let tgx = fracs(&tg.values)?;
        rows.push(SpectrumRow {
            theta: theta.to_spec(),
            theta_is_rational: theta.is_rational(),
            star_discrepancy: star,
            weyl_sums: weyl,
            limit_set_clusters: est.clusters.len(),
            limit_set_clusters_circular: circular,
            cluster_centers: est.clusters.iter().map(|c| c.center).collect(),
            tilde_gamma_discrepancy: measures::star_discrepancy(&tgx)?,
            tilde_gamma_max_deviation: deviation,
        });
    }
    Ok(SpectrumTable { schema_version: SCHEMA_VERSION, config: config.clone(), is_pisot, warnings, rows })
}
