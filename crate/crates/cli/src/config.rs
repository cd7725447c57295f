//! Experiment configuration: one JSON document, with command-line overrides.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use pisot_core::algnum::{largest_real_root, parse_rational, IntPolynomial, PrecisionPolicy, RealAlgebraic, RealInput};
use pisot_core::measures::CycleParams;
use pisot_core::seqgen::{self, IntegerSequence};
use pisot_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Which real root of the polynomial is `alpha`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootSelector {
    #[default]
    LargestReal,
    Interval([String; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `sum_s a_s m_{k+s} = 0` from `d` initial terms.
    Recurrence {
        #[serde(with = "pisot_core::serde_big")]
        initial: Vec<BigInt>,
    },
    /// A recurrence sequence plus a periodic integer perturbation, `perturbation[(k-1) mod len]`.
    PerturbedRecurrence {
        #[serde(with = "pisot_core::serde_big")]
        initial: Vec<BigInt>,
        perturbation: Vec<i64>,
    },
    /// Nearest integer to `xi alpha^k` for `k >= k_min`.
    RoundedPower {
        #[serde(default = "one")]
        k_min: u64,
    },
    /// `n_{k+1} = round(alpha n_k + beta ln n_k)`, shifted to `m_k = n_k + floor(k theta)`.
    LogDrift { beta: RealInput, n1: u64 },
    /// `m_k = slope k + intercept`.
    Linear { slope: i64, intercept: i64 },
    /// A `k,term` CSV file.
    Csv { path: String },
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub cycle_tol: f64,
    pub tail_fraction: f64,
    pub ell_max: usize,
    pub ks_threshold: f64,
    pub outside_mass_threshold: f64,
    /// Fraction bits carried by every residual value.
    pub residual_bits: u32,
    pub histogram_bins: usize,
    /// Gap for single-linkage limit-set clusters.
    pub cluster_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = CycleParams::default();
        Tolerances {
            cycle_tol: c.tol,
            tail_fraction: c.tail_fraction,
            ell_max: c.ell_max,
            ks_threshold: 0.02,
            outside_mass_threshold: 1e-3,
            residual_bits: 48,
            histogram_bins: 64,
            cluster_gap: 0.01,
        }
    }
}

impl Tolerances {
    pub fn cycle_params(&self) -> CycleParams {
        CycleParams { ell_max: self.ell_max, tol: self.cycle_tol, tail_fraction: self.tail_fraction }
    }
}

fn default_generator() -> GeneratorSpec {
    GeneratorSpec::RoundedPower { k_min: 1 }
}

fn default_n() -> usize {
    1000
}

fn zero_theta() -> RealInput {
    RealInput::integer(0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub polynomial: String,
    #[serde(default)]
    pub root: RootSelector,
    #[serde(default = "zero_theta")]
    pub theta: RealInput,
    /// Extra values of theta for a spectrum scan.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<RealInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<RealInput>,
    #[serde(default = "default_generator")]
    pub generator: GeneratorSpec,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_max: Option<u32>,
}

/// Overrides from the command line; `None` keeps the config value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub polynomial: Option<String>,
    pub root_interval: Option<[String; 2]>,
    pub theta: Option<RealInput>,
    pub xi: Option<RealInput>,
    pub generator: Option<GeneratorSpec>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub ell_max: Option<usize>,
    pub tail_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub precision_max: Option<u32>,
}

impl ExperimentConfig {
    /// Defaults for everything but the polynomial.
    pub fn for_polynomial(polynomial: &str) -> Self {
        ExperimentConfig {
            name: None,
            polynomial: polynomial.to_string(),
            root: RootSelector::LargestReal,
            theta: zero_theta(),
            thetas: Vec::new(),
            xi: None,
            generator: default_generator(),
            n: default_n(),
            tolerances: Tolerances::default(),
            seed: 0,
            precision_max: None,
        }
    }

    pub fn xi(&self) -> RealInput {
        self.xi.clone().unwrap_or_else(|| RealInput::integer(1))
    }

    pub fn policy(&self) -> PrecisionPolicy {
        match self.precision_max {
            Some(m) => PrecisionPolicy::with_max_bits(m),
            None => PrecisionPolicy::default(),
        }
    }

    pub fn poly(&self) -> Result<IntPolynomial> {
        self.polynomial.parse()
    }

    pub fn alpha(&self) -> Result<RealAlgebraic> {
        let p = self.poly()?;
        match &self.root {
            RootSelector::LargestReal => largest_real_root(&p),
            RootSelector::Interval([lo, hi]) => RealAlgebraic::new(p, parse_rational(lo)?, parse_rational(hi)?),
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.polynomial {
            self.polynomial = p.clone();
        }
        if let Some(r) = &o.root_interval {
            self.root = RootSelector::Interval(r.clone());
        }
        if let Some(t) = &o.theta {
            self.theta = t.clone();
        }
        if let Some(x) = &o.xi {
            self.xi = Some(x.clone());
        }
        if let Some(g) = &o.generator {
            self.generator = g.clone();
        }
        if let Some(n) = o.n {
            self.n = n;
        }
        if let Some(t) = o.tol {
            self.tolerances.cycle_tol = t;
        }
        if let Some(l) = o.ell_max {
            self.tolerances.ell_max = l;
        }
        if let Some(f) = o.tail_fraction {
            self.tolerances.tail_fraction = f;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if o.precision_max.is_some() {
            self.precision_max = o.precision_max;
        }
    }

    /// The sequence `m_k`, `k = 1 ..= N` (or from `k_min` for rounded powers).
    pub fn generate(&self) -> Result<IntegerSequence> {
        let policy = self.policy();
        let p = self.poly()?;
        let n = self.n;
        match &self.generator {
            GeneratorSpec::Recurrence { initial } => seqgen::recurrence_sequence(&p, initial, n),
            GeneratorSpec::PerturbedRecurrence { initial, perturbation } => {
                if perturbation.is_empty() {
                    return Err(Error::InvalidInput("perturbation must be nonempty".into()));
                }
                let base = seqgen::recurrence_sequence(&p, initial, n)?;
                let terms = base
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t + perturbation[i % perturbation.len()])
                    .collect();
                let spec = base.spec.clone().with("perturbation", perturbation);
                IntegerSequence::new(1, terms, spec)
            }
            GeneratorSpec::RoundedPower { k_min } => {
                let alpha = self.alpha()?;
                seqgen::rounded_power_sequence(&alpha, &self.xi(), *k_min, k_min + n as u64 - 1, &policy)
            }
            GeneratorSpec::LogDrift { beta, n1 } => {
                let alpha = self.alpha()?;
                let nseq = seqgen::log_drift_sequence(&alpha, beta, &BigInt::from(*n1), n, &policy)?;
                seqgen::m_from_n(&nseq, &self.theta, &policy)
            }
            GeneratorSpec::Linear { slope, intercept } => {
                let terms = (1..=n as i64).map(|k| BigInt::from(slope * k + intercept)).collect();
                let spec = seqgen::SequenceSpec::new("linear").with("slope", slope).with("intercept", intercept);
                IntegerSequence::new(1, terms, spec)
            }
            GeneratorSpec::Csv { path } => {
                let file = std::fs::File::open(Path::new(path))?;
                IntegerSequence::read_csv(file)
            }
        }
    }
}

/// A config file holds one experiment or a list of them.
pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let parse = |v: serde_json::Value| {
        serde_json::from_value::<ExperimentConfig>(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    };
    match value {
        serde_json::Value::Array(items) => items.into_iter().map(parse).collect(),
        serde_json::Value::Object(mut map) if map.contains_key("experiments") => {
            match map.remove("experiments") {
                Some(serde_json::Value::Array(items)) => items.into_iter().map(parse).collect(),
                _ => Err(Error::Parse("\"experiments\" must be a list".into())),
            }
        }
        other => Ok(vec![parse(other)?]),
    }
}
