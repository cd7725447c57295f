use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::Value;

use pisot_cli::commands::{self, CommandOutput, EXIT_INPUT};
use pisot_cli::config::{load_configs, ExperimentConfig, GeneratorSpec, Overrides};
use pisot_core::algnum::RealInput;
use pisot_core::{Error, Result};

#[derive(Parser)]
#[command(name = "pisot", version, about = "Experiments on Pisot recurrences and fractional-part cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the chosen root of a polynomial.
    Pisot {
        /// Overrides --polynomial.
        polynomial: Option<String>,
    },
    /// Generate the integer sequence m_k.
    Gen,
    /// Annihilate m_k by the polynomial: e_k, and c_k from the direct formula.
    Annihilate,
    /// eta_k = m_{k+1} - alpha m_k + {(k+1) theta} - alpha {k theta}.
    Eta,
    /// Look for a cycle in eta_k.
    Cycle,
    /// The predicted limiting density of c_k for irrational theta.
    Density {
        /// Write the CDF as space-separated columns.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Check that eta_k has a cycle exactly when theta is rational.
    VerifyMainTheorem,
    /// Fractional-part statistics of xi alpha^k - k theta over a list of theta.
    SpectrumScan {
        /// Values of theta separated by ';', e.g. "0;1/2;x^2+2x-1 in [0,1]".
        #[arg(long)]
        thetas: Option<String>,
        /// Scan theta = j/Q for j = 0 .. Q-1.
        #[arg(long, value_name = "Q")]
        grid: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorKind {
    Recurrence,
    PerturbedRecurrence,
    RoundedPower,
    LogDrift,
    Linear,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON object, list, or {"experiments": [...]}).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "BITS")]
    precision_max: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiments from a batch file to run at once.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Leave out `generated_at`, so identical inputs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[arg(long, global = true)]
    polynomial: Option<String>,
    /// Isolating interval for alpha instead of the largest real root, "LO,HI".
    #[arg(long, global = true, value_name = "LO,HI")]
    root_interval: Option<String>,
    /// "p/q", a decimal, or "POLY in [LO, HI]".
    #[arg(long, global = true)]
    theta: Option<String>,
    #[arg(long, global = true)]
    xi: Option<String>,
    #[arg(short = 'N', long = "samples", global = true)]
    n: Option<usize>,
    /// Cycle tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    ell_max: Option<usize>,
    #[arg(long, global = true)]
    tail_fraction: Option<f64>,

    #[arg(long, global = true, value_enum)]
    generator: Option<GeneratorKind>,
    /// Initial terms for recurrences, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    initial: Option<String>,
    /// Periodic perturbation added to a recurrence, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    perturbation: Option<String>,
    #[arg(long, global = true)]
    k_min: Option<u64>,
    #[arg(long, global = true)]
    beta: Option<String>,
    #[arg(long, global = true)]
    n1: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    slope: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    intercept: Option<i64>,
    /// CSV input for the csv generator.
    #[arg(long, global = true)]
    input: Option<String>,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidInput(format!("this generator needs --{flag}")))
}

impl Common {
    fn generator(&self) -> Result<Option<GeneratorSpec>> {
        let Some(kind) = self.generator else { return Ok(None) };
        let initial = || -> Result<Vec<BigInt>> { list(&need(&self.initial, "initial")?, "initial") };
        Ok(Some(match kind {
            GeneratorKind::Recurrence => GeneratorSpec::Recurrence { initial: initial()? },
            GeneratorKind::PerturbedRecurrence => GeneratorSpec::PerturbedRecurrence {
                initial: initial()?,
                perturbation: list(&need(&self.perturbation, "perturbation")?, "perturbation")?,
            },
            GeneratorKind::RoundedPower => GeneratorSpec::RoundedPower { k_min: self.k_min.unwrap_or(1) },
            GeneratorKind::LogDrift => GeneratorSpec::LogDrift {
                beta: need(&self.beta, "beta")?.parse()?,
                n1: need(&self.n1, "n1")?,
            },
            GeneratorKind::Linear => {
                GeneratorSpec::Linear { slope: need(&self.slope, "slope")?, intercept: self.intercept.unwrap_or(0) }
            }
            GeneratorKind::Csv => GeneratorSpec::Csv { path: need(&self.input, "input")? },
        }))
    }

    fn overrides(&self) -> Result<Overrides> {
        let root_interval = match &self.root_interval {
            Some(s) => match s.split_once(',') {
                Some((lo, hi)) => Some([lo.trim().to_string(), hi.trim().to_string()]),
                None => return Err(Error::Parse(format!("--root-interval wants LO,HI, got {s:?}"))),
            },
            None => None,
        };
        let parse_real = |s: &Option<String>| s.as_deref().map(str::parse::<RealInput>).transpose();
        Ok(Overrides {
            polynomial: self.polynomial.clone(),
            root_interval,
            theta: parse_real(&self.theta)?,
            xi: parse_real(&self.xi)?,
            generator: self.generator()?,
            n: self.n,
            tol: self.tol,
            ell_max: self.ell_max,
            tail_fraction: self.tail_fraction,
            seed: self.seed,
            precision_max: self.precision_max,
        })
    }

    fn configs(&self, positional_polynomial: Option<&str>) -> Result<Vec<ExperimentConfig>> {
        let mut configs = match &self.config {
            Some(path) => load_configs(path)?,
            None => {
                let poly = positional_polynomial.or(self.polynomial.as_deref()).ok_or_else(|| {
                    Error::InvalidInput("give --config FILE or --polynomial".into())
                })?;
                vec![ExperimentConfig::for_polynomial(poly)]
            }
        };
        let mut o = self.overrides()?;
        if let Some(p) = positional_polynomial {
            o.polynomial = Some(p.to_string());
        }
        for c in &mut configs {
            c.apply(&o);
        }
        Ok(configs)
    }
}

fn grid(q: u32) -> Result<Vec<RealInput>> {
    if q == 0 {
        return Err(Error::InvalidInput("--grid needs Q >= 1".into()));
    }
    Ok((0..q).map(|j| RealInput::rational(j.into(), q.into())).collect())
}

fn stamp(v: &mut Value, secs: u64) {
    match v {
        Value::Object(m) => {
            m.insert("generated_at".into(), Value::from(secs));
        }
        Value::Array(items) => items.iter_mut().for_each(|i| stamp(i, secs)),
        _ => {}
    }
}

fn write_out(dir: &Path, name: &str, out: &CommandOutput, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.json")), text)?;
    for (file, bytes) in &out.artifacts {
        let path = dir.join(file);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, bytes)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(&'static str, CommandOutput)> {
    let c = &cli.common;
    let (name, configs) = match &cli.command {
        Command::Pisot { polynomial } => ("pisot", c.configs(polynomial.as_deref())?),
        Command::Gen => ("gen", c.configs(None)?),
        Command::Annihilate => ("annihilate", c.configs(None)?),
        Command::Eta => ("eta", c.configs(None)?),
        Command::Cycle => ("cycle", c.configs(None)?),
        Command::Density { .. } => ("density", c.configs(None)?),
        Command::VerifyMainTheorem => ("verify-main-theorem", c.configs(None)?),
        Command::SpectrumScan { thetas, grid: q } => {
            let mut configs = c.configs(None)?;
            let extra = match (thetas, q) {
                (Some(t), _) => t.split(';').map(|s| s.trim().parse()).collect::<Result<Vec<RealInput>>>()?,
                (None, Some(q)) => grid(*q)?,
                (None, None) => Vec::new(),
            };
            if !extra.is_empty() {
                configs.iter_mut().for_each(|cfg| cfg.thetas = extra.clone());
            }
            ("spectrum-scan", configs)
        }
    };
    let jobs = c.jobs.max(1);
    let outputs = match &cli.command {
        Command::Pisot { .. } => commands::run_batch(&configs, jobs, commands::pisot),
        Command::Gen => commands::run_batch(&configs, jobs, commands::generate),
        Command::Annihilate => commands::run_batch(&configs, jobs, commands::annihilate),
        Command::Eta => commands::run_batch(&configs, jobs, commands::eta),
        Command::Cycle => commands::run_batch(&configs, jobs, commands::cycle),
        Command::Density { gnuplot } => commands::run_batch(&configs, jobs, |cfg| commands::density(cfg, *gnuplot)),
        Command::VerifyMainTheorem => commands::run_batch(&configs, jobs, commands::verify_main_theorem),
        Command::SpectrumScan { .. } => commands::run_batch(&configs, jobs, commands::spectrum_scan),
    };
    Ok((name, commands::merge(&configs, outputs)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, mut out) = match run(&cli) {
        Ok(r) => r,
        Err(e) => ("error", CommandOutput::from_error(&e)),
    };
    if !cli.common.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        stamp(&mut out.json, secs);
    }
    let text = serde_json::to_string_pretty(&out.json).expect("serializable") + "\n";
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).is_err() {
        return ExitCode::from(EXIT_INPUT as u8);
    }
    if let Some(dir) = &cli.common.out {
        if let Err(e) = write_out(dir, name, &out, &text) {
            eprintln!("pisot: cannot write {}: {e}", dir.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    if let Some(msg) = out.json.get("message").and_then(Value::as_str) {
        eprintln!("pisot: {msg}");
    }
    ExitCode::from(out.code as u8)
}
