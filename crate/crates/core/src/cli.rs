//! Command-line front end: `build`, `estimate` and `sva`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::estimator::{table_rows, CostTable, EstimateParams};
use crate::families::FamilyDescription;
use crate::schemes::{build, AmplificationParams, SchemeKind};
use crate::structure::compile;
use crate::sva::{default_delta, degree_sweep, DegreeSweepResult};
use crate::verify::check_encoding;

/// Significant digits of every printed number.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "blockenc", version, about = "Block encodings of structured matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an encoding, verify it densely and print a JSON report.
    Build(BuildArgs),
    /// Print the resource comparison table as CSV.
    Estimate(EstimateArgs),
    /// Sweep minimal amplification-polynomial degrees and fit the prefactor.
    Sva(SvaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Checkerboard,
    Toeplitz,
    Tridiagonal,
    BinaryTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Base,
    Hermitian,
    Prep,
    Preamplified,
    HermitianPreamplified,
}

impl From<SchemeName> for SchemeKind {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Base => SchemeKind::Base,
            SchemeName::Hermitian => SchemeKind::Hermitian,
            SchemeName::Prep => SchemeKind::Prep,
            SchemeName::Preamplified => SchemeKind::Preamplified,
            SchemeName::HermitianPreamplified => SchemeKind::HermitianPreamplified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    pub family: Option<FamilyName>,
    #[arg(long, required_unless_present = "spec")]
    pub n: Option<usize>,
    /// Comma-separated values `A_0,A_1,…`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    /// Toeplitz offset of the main diagonal.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub circulant: bool,
    #[arg(long)]
    pub zero_corners: bool,
    /// Toeplitz band count used when values are drawn from `--seed`.
    #[arg(long, default_value_t = 3)]
    pub bandwidth: usize,
    /// Draw values uniformly from `[-1, 1]` when `--values` is absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON family description, e.g. `{"family":"toeplitz","n":8,"k":1,"values":[…]}`.
    #[arg(long, conflicts_with_all = ["family", "n", "values"])]
    pub spec: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = SchemeName::Base)]
    pub scheme: SchemeName,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = default_delta())]
    pub delta: f64,
    #[arg(long)]
    pub gamma_c: Option<f64>,
    #[arg(long)]
    pub gamma_r: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = default_delta())]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SvaArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0, 8.0, 16.0, 32.0])]
    pub gammas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.08, 0.159])]
    pub deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
    pub epsilons: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn fmt_num(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with numbers rounded to [`SIGNIFICANT_DIGITS`].
pub fn to_rounded_json(value: &impl serde::Serialize) -> String {
    let v = serde_json::to_value(value).unwrap_or(Value::Null);
    serde_json::to_string_pretty(&round_json(v)).unwrap_or_default()
}

fn random_values(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            if v != 0.0 {
                break v;
            }
        })
        .collect()
}

impl FamilyArgs {
    /// Resolves the flags (or the JSON file) into a family description.
    pub fn description(&self) -> Result<FamilyDescription> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("bad spec JSON: {e}")));
        }
        let family = self.family.ok_or_else(|| Error::InvalidParameter("missing --family".into()))?;
        let n = self.n.ok_or_else(|| Error::InvalidParameter("missing --n".into()))?;
        let count = match family {
            FamilyName::Checkerboard => 2,
            FamilyName::Toeplitz => self.bandwidth,
            FamilyName::Tridiagonal => (2 * n).saturating_sub(1),
            FamilyName::BinaryTree => 3,
        };
        let values = match (&self.values, self.seed) {
            (Some(v), _) => v.clone(),
            (None, Some(seed)) => random_values(count, seed),
            (None, None) => return Err(Error::InvalidParameter("give --values or --seed".into())),
        };
        Ok(match family {
            FamilyName::Checkerboard => FamilyDescription::Checkerboard {
                n,
                values,
                zero_corners: self.zero_corners,
            },
            FamilyName::Toeplitz => FamilyDescription::Toeplitz {
                n,
                k: self.k,
                values,
                circulant: self.circulant,
            },
            FamilyName::Tridiagonal => FamilyDescription::Tridiagonal {
                n,
                values,
                with_transpose: true,
            },
            FamilyName::BinaryTree => FamilyDescription::BinaryTree { n, values },
        })
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidParameter(format!("stdout: {e}"))),
    }
}

/// Runs `build`; returns whether verification passed.
pub fn cmd_build(args: &BuildArgs, stdout: &mut dyn Write) -> Result<bool> {
    let spec = args.family.description()?.to_spec()?;
    let compiled = compile(&spec)?;
    let amp = AmplificationParams {
        p: args.p,
        delta: args.delta,
        epsilon: args.epsilon,
        gamma_c: args.gamma_c,
        gamma_r: args.gamma_r,
    };
    let enc = build(&compiled, args.scheme.into(), args.p, &amp)?;
    let report = check_encoding(&enc, &spec)?;
    let mut json = to_rounded_json(&report);
    json.push('\n');
    emit(&args.family.out, stdout, &json)?;
    Ok(report.passed)
}

pub fn format_table(table: &CostTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_rounded_json(table) + "\n",
        OutputFormat::Csv => {
            let mut s = String::from("scheme,data_loading,subnormalisation,flag_qubits,figure_of_merit\n");
            for r in &table.rows {
                s += &format!(
                    "{},{},{},{},{}\n",
                    r.scheme,
                    fmt_num(r.data_loading),
                    fmt_num(r.subnormalisation),
                    r.flag_qubits,
                    fmt_num(r.figure_of_merit)
                );
            }
            s
        }
        OutputFormat::Text => {
            let mut s = format!(
                "{:<28} {:>16} {:>20} {:>6} {:>20}\n",
                "scheme", "data_loading", "subnormalisation", "flags", "figure_of_merit"
            );
            for r in &table.rows {
                s += &format!(
                    "{:<28} {:>16} {:>20} {:>6} {:>20}\n",
                    r.scheme,
                    fmt_num(r.data_loading),
                    fmt_num(r.subnormalisation),
                    r.flag_qubits,
                    fmt_num(r.figure_of_merit)
                );
            }
            s
        }
    }
}

/// Runs `estimate`; notes go to `stderr`.
pub fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<CostTable> {
    let spec = args.family.description()?.to_spec()?;
    let params = EstimateParams {
        p: args.p,
        delta: args.delta,
        epsilon: args.epsilon,
    };
    let table = table_rows(&spec, &params)?;
    emit(&args.family.out, stdout, &format_table(&table, args.format))?;
    if args.format != OutputFormat::Json {
        for note in &table.notes {
            let _ = writeln!(stderr, "# {note}");
        }
        for r in &table.rows {
            if let Some(note) = &r.note {
                let _ = writeln!(stderr, "# {}: {note}", r.scheme);
            }
        }
    }
    Ok(table)
}

pub fn format_sweep(result: &DegreeSweepResult) -> String {
    let mut s = String::from("gamma,delta,epsilon,degree,predicted_degree\n");
    for r in &result.rows {
        s += &format!(
            "{},{},{},{},{}\n",
            fmt_num(r.gamma),
            fmt_num(r.delta),
            fmt_num(r.epsilon),
            r.degree,
            fmt_num(r.predicted_degree)
        );
    }
    s += &format!(
        "# fitted prefactor c={} relative_spread={} low_confidence={}\n",
        fmt_num(result.fit.c),
        fmt_num(result.fit.relative_spread),
        result.fit.low_confidence
    );
    s
}

pub fn cmd_sva(args: &SvaArgs, stdout: &mut dyn Write) -> Result<DegreeSweepResult> {
    if args.gammas.is_empty() || args.deltas.is_empty() || args.epsilons.is_empty() {
        return Err(Error::InvalidParameter("empty sweep list".into()));
    }
    let result = degree_sweep(&args.gammas, &args.deltas, &args.epsilons)?;
    emit(&args.out, stdout, &format_sweep(&result))?;
    Ok(result)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Build(a) => cmd_build(a, stdout).map(|passed| if passed { EXIT_OK } else { EXIT_FAILED }),
        Command::Estimate(a) => cmd_estimate(a, stdout, stderr).map(|_| EXIT_OK),
        Command::Sva(a) => cmd_sva(a, stdout).map(|_| EXIT_OK),
    };
    match outcome {
        Ok(code) => {
            if code == EXIT_FAILED {
                let _ = writeln!(stderr, "verification failed");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match (&cli.command, &e) {
                (Command::Sva(_), Error::InfeasibleParameters(_)) => EXIT_FAILED,
                _ => EXIT_INVALID,
            }
        }
    }
}

/// Entry point used by the `blockenc` binary.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
