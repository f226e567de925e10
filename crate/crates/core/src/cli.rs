//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when verification fails or a run error
//! occurs, 2 when the flags are malformed or inconsistent.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::blockenc::{encode, Boundary, Class, EncodeOptions, LambdaChoice, Manifest};
use crate::circuit::{count_resources, export_text, lower, CostModel};
use crate::error::Error;
use crate::fock::{gen_synthetic, DecayModel, HamiltonianSpec, SyntheticModel};
use crate::resources::{
    counted_select_swap, formula_class, formula_select_swap, optimal_lambda, reconcile, sample_spec, sweep, CostFormulaInput,
    FormulaClass, SweepGrid, CSV_HEADER,
};

/// Environment variable that overrides `--jobs`.
pub const JOBS_ENV: &str = "FEBE_JOBS";

#[derive(Parser, Debug)]
#[command(name = "febe", version, about = "Compile fermionic Hamiltonians into block-encoding circuits")]
pub struct Cli {
    /// Worker threads for verification and sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic Hamiltonian spec.
    Gen(GenArgs),
    /// Compile a spec into a block encoding and write its manifest.
    Encode(EncodeArgs),
    /// Rebuild a manifest's circuit and check it against its spec.
    Verify(VerifyArgs),
    /// Closed-form costs next to counted costs for one configuration.
    Estimate(EstimateArgs),
    /// Cartesian sweep over classes and parameters, as CSV or JSON.
    Sweep(SweepArgs),
    /// Lower a manifest's circuit to Clifford+T and print it as OpenQASM.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Hubbard,
    ExtendedHubbard,
    TiFactorized,
    Localized,
    /// Random dyadic coefficients shaped for `--class`.
    Random,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Model to generate.
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Number of modes, a power of two.
    #[arg(long)]
    pub n: usize,
    /// Seed for random coefficients.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hopping amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// On-site interaction.
    #[arg(long, default_value_t = 0.5)]
    pub u: f64,
    /// Nearest-neighbor density interaction.
    #[arg(long, default_value_t = 0.25)]
    pub v: f64,
    /// Exponential decay rate for `localized`.
    #[arg(long, default_value_t = 1.0)]
    pub decay: f64,
    /// Class whose shape `random` follows.
    #[arg(long)]
    pub class: Option<String>,
    /// Range for nearest-neighbor shapes.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Particle number recorded in the spec.
    #[arg(long)]
    pub eta: Option<usize>,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Either `auto` or a power of two.
fn parse_lambda(s: &str) -> Result<LambdaChoice, String> {
    if s == "auto" {
        return Ok(LambdaChoice::Auto);
    }
    match s.parse::<usize>() {
        Ok(v) if v >= 1 && v.is_power_of_two() => Ok(LambdaChoice::Fixed(v)),
        _ => Err(format!("`{s}` is neither `auto` nor a power of two")),
    }
}

fn parse_model(s: &str) -> Result<CostModel, String> {
    CostModel::parse(s).ok_or_else(|| format!("unknown cost model `{s}` (expected 4t or 7t)"))
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    Boundary::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Spec file to compile.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Encoder class tag, e.g. `one-body` or `eta-number`.
    #[arg(long)]
    pub class: String,
    /// Particle number for sector classes.
    #[arg(long)]
    pub eta: Option<usize>,
    /// Bits per coefficient word, sign included.
    #[arg(long = "m-b", default_value_t = 5)]
    pub m_b: usize,
    /// SELECT-SWAP group size: `auto` or a power of two.
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda: LambdaChoice,
    /// Hopping range for nearest-neighbor classes.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Boundary for nearest-neighbor classes: `torus` or `open`.
    #[arg(long, default_value = "torus", value_parser = parse_boundary)]
    pub boundary: Boundary,
    /// Toffoli cost model: `4t` or `7t`.
    #[arg(long = "cost-model", default_value = "4t", value_parser = parse_model)]
    pub cost_model: CostModel,
    /// Manifest path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the lowered circuit here.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Manifest to check.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// An encoder class or `select-swap`.
    #[arg(long)]
    pub class: String,
    /// Number of modes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Table length; derived from the class when omitted.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// SELECT-SWAP group size: `auto` or a power of two.
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda: LambdaChoice,
    /// Bits per coefficient word.
    #[arg(long = "m-b", default_value_t = 5)]
    pub m_b: usize,
    /// Particle number for sector classes.
    #[arg(long)]
    pub eta: Option<usize>,
    /// Hopping range for nearest-neighbor classes.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Boundary for nearest-neighbor classes.
    #[arg(long, default_value = "torus", value_parser = parse_boundary)]
    pub boundary: Boundary,
    /// Toffoli cost model: `4t` or `7t`.
    #[arg(long = "cost-model", default_value = "4t", value_parser = parse_model)]
    pub cost_model: CostModel,
    /// Spec to build and count; a random spec of the class is used otherwise.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Seed for the random spec.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma-separated class tags.
    #[arg(long, value_delimiter = ',', required = true)]
    pub classes: Vec<String>,
    /// Comma-separated mode counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated group sizes.
    #[arg(long, value_delimiter = ',', default_value = "auto", value_parser = parse_lambda)]
    pub lambda: Vec<LambdaChoice>,
    /// Comma-separated word widths.
    #[arg(long = "m-b", value_delimiter = ',', default_value = "5")]
    pub m_b: Vec<usize>,
    /// Comma-separated particle numbers for sector classes.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<usize>,
    /// Seed for the random specs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Toffoli cost model: `4t` or `7t`.
    #[arg(long = "cost-model", default_value = "4t", value_parser = parse_model)]
    pub cost_model: CostModel,
    /// Rows with at most this many modes are also verified.
    #[arg(long = "verify-max-n", default_value_t = 4)]
    pub verify_max_n: usize,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Manifest whose circuit is exported.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Toffoli cost model used for lowering.
    #[arg(long = "cost-model", default_value = "4t", value_parser = parse_model)]
    pub cost_model: CostModel,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Why a command stopped early.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(_) | Error::UnknownClass(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Failed(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Failed(e.to_string()))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Failed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn class_arg(tag: &str) -> Result<Class, Failure> {
    Class::parse(tag).map_err(|_| {
        let known: Vec<&str> = Class::ALL.iter().map(|c| c.tag()).collect();
        Failure::Usage(format!("unknown class `{tag}`; expected one of {}", known.join(", ")))
    })
}

fn gen(a: &GenArgs) -> Result<(), Failure> {
    let mut h = match a.model {
        ModelArg::Hubbard => gen_synthetic(SyntheticModel::Hubbard { t: a.t, u: a.u }, a.n, a.seed)?,
        ModelArg::ExtendedHubbard => gen_synthetic(SyntheticModel::ExtendedHubbard { t: a.t, u: a.u, v: a.v }, a.n, a.seed)?,
        ModelArg::TiFactorized => gen_synthetic(SyntheticModel::TiFactorized, a.n, a.seed)?,
        ModelArg::Localized => gen_synthetic(SyntheticModel::Localized(DecayModel::Exponential { c: 1.0, alpha: a.decay }), a.n, a.seed)?,
        ModelArg::Random => {
            let Some(tag) = &a.class else {
                return usage("--model random needs --class");
            };
            sample_spec(class_arg(tag)?, a.n, a.eta, a.m, a.seed)?
        }
    };
    if a.eta.is_some() {
        h.eta = a.eta;
    }
    h.validate()?;
    emit(a.output.as_deref(), &(h.to_json() + "\n"))
}

fn encode_cmd(a: &EncodeArgs) -> Result<(), Failure> {
    let class = class_arg(&a.class)?;
    let h = HamiltonianSpec::from_json(&read(&a.input)?)?;
    let opts = EncodeOptions { m_b: a.m_b, lambda: a.lambda, eta: a.eta, m: a.m, boundary: a.boundary, tables: None };
    let be = encode(&h, class, &opts)?;
    let man = Manifest::new(&be, &h, a.cost_model)?;
    if let Some(p) = &a.circuit {
        emit(Some(p), &export_text(&lower(&be.circuit, a.cost_model))?)?;
    }
    emit(a.output.as_deref(), &pretty(&man)?)
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), Failure> {
    let text = read(&a.input)?;
    let man: Manifest = serde_json::from_str(&text).map_err(|e| Failure::Failed(format!("manifest rejected: {e}")))?;
    let report = man.reverify().map_err(|e| Failure::Failed(format!("manifest rejected: {e}")))?;
    emit(a.output.as_deref(), &pretty(&report)?)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Failed(format!(
            "verification failed: deviation {:.3e} exceeds budget {:.3e}",
            report.max_abs_dev, report.eps_bound
        )))
    }
}

fn estimate_cmd(a: &EstimateArgs) -> Result<(), Failure> {
    let fclass = FormulaClass::parse(&a.class).map_err(|_| Failure::Usage(format!("unknown class `{}`", a.class)))?;
    let out = match fclass {
        FormulaClass::SelectSwap => {
            let Some(l) = a.l else {
                return usage("select-swap needs --L");
            };
            let lambda = match a.lambda {
                LambdaChoice::Auto => optimal_lambda(l, a.m_b),
                LambdaChoice::Fixed(x) => x,
            };
            if lambda > l.next_power_of_two() {
                return usage(format!("--lambda {lambda} exceeds L={l}"));
            }
            let f = formula_select_swap(l, lambda, a.m_b);
            let inp = CostFormulaInput { class: fclass, n: 0, l, lambda, m_b: a.m_b, eta: None, m: None };
            let report = formula_class(&inp)?;
            let counted = counted_select_swap(l, lambda, a.m_b, a.cost_model)?;
            json!({
                "class": "select-swap",
                "L": l,
                "lambda": lambda,
                "m_b": a.m_b,
                "t": f.t_count,
                "t_depth": f.t_depth,
                "qubits": f.qubits,
                "formula": report,
                "counted": counted,
                "reconcile": reconcile(&counted, &report),
            })
        }
        FormulaClass::Encoder(class) => {
            let h = match &a.input {
                Some(p) => HamiltonianSpec::from_json(&read(p)?)?,
                None => {
                    let Some(n) = a.n else {
                        return usage("encoder classes need --n or --input");
                    };
                    sample_spec(class, n, a.eta, a.m, a.seed)?
                }
            };
            if a.l.is_some() {
                return usage("--L is derived from the class; pass it only with select-swap");
            }
            let opts = EncodeOptions { m_b: a.m_b, lambda: a.lambda, eta: a.eta, m: a.m, boundary: a.boundary, tables: None };
            let be = encode(&h, class, &opts)?;
            let counted = count_resources(&be.circuit, a.cost_model);
            let inp = CostFormulaInput {
                class: fclass,
                n: h.n,
                l: be.meta.l,
                lambda: be.meta.lambda,
                m_b: a.m_b,
                eta: be.meta.eta,
                m: be.meta.m,
            };
            let report = formula_class(&inp)?;
            json!({
                "class": class.tag(),
                "n": h.n,
                "eta": be.meta.eta,
                "L": be.meta.l,
                "lambda": be.meta.lambda,
                "m_b": a.m_b,
                "alpha": be.alpha,
                "t": report.t_count,
                "formula": report,
                "counted": counted,
                "reconcile": reconcile(&counted, &report),
            })
        }
    };
    emit(a.output.as_deref(), &pretty(&out)?)
}

fn sweep_cmd(a: &SweepArgs) -> Result<(), Failure> {
    let classes = a.classes.iter().map(|c| class_arg(c)).collect::<Result<Vec<_>, _>>()?;
    if classes.iter().any(|c| c.is_eta()) && a.eta.is_empty() {
        return usage("sector classes in --classes need --eta");
    }
    let grid = SweepGrid {
        classes,
        ns: a.n.clone(),
        lambdas: a
            .lambda
            .iter()
            .map(|l| match l {
                LambdaChoice::Auto => None,
                LambdaChoice::Fixed(x) => Some(*x),
            })
            .collect(),
        m_bs: a.m_b.clone(),
        etas: a.eta.iter().map(|&e| Some(e)).collect(),
        seed: a.seed,
        model: a.cost_model,
        verify_max_n: a.verify_max_n,
    };
    let rows = sweep(&grid)?;
    let text = match a.format {
        Format::Json => pretty(&rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| Failure::Failed(e.to_string());
            w.write_record(CSV_HEADER).map_err(err)?;
            for r in &rows {
                w.write_record(r.csv_record()).map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Failed(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Failed(e.to_string()))?
        }
    };
    emit(a.output.as_deref(), &text)
}

fn export_cmd(a: &ExportArgs) -> Result<(), Failure> {
    let man: Manifest = serde_json::from_str(&read(&a.input)?).map_err(|e| Failure::Failed(format!("manifest rejected: {e}")))?;
    let be = encode(&man.spec()?, man.class, &man.options())?;
    emit(a.output.as_deref(), &export_text(&lower(&be.circuit, a.cost_model))?)
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => usage(format!("{JOBS_ENV}={v} is not a positive integer")),
        },
        Err(_) => match flag {
            Some(0) => usage("--jobs must be at least 1"),
            other => Ok(other),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Export(a) => export_cmd(a),
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Messages go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = jobs(cli.jobs).and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = threads {
            builder = builder.num_threads(k);
        }
        let pool = builder.build().map_err(|e| Failure::Failed(e.to_string()))?;
        pool.install(|| dispatch(&cli))
    });
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("febe: {msg}");
            2
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("febe: {msg}");
            1
        }
    }
}
