//! `lrfkit`: run single-query key-recovery attacks, sweeps, classical
//! baselines and the verification suite.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lrfkit::attacks::AttackKind;
use lrfkit::harness::{
    self, attack_params, parse_list, parse_schemes, rows_json, summary_json, sweep_row, write_csv, ExperimentSpec,
    Format, SchemeOptions, SweepSpec, EXIT_OK, EXIT_VERIFY_FAILED,
};
use lrfkit::qsim::MAX_AMPLITUDES_ENV;
use lrfkit::Error;

#[derive(Parser)]
#[command(name = "lrfkit", version, about = "Single-query quantum key recovery for rounding-based encryption")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one attack configuration.
    Attack(AttackArgs),
    /// Run a grid of configurations and emit one row per point.
    Sweep(SweepArgs),
    /// Run the classical key-recovery counterpart of a scheme.
    Baseline(PointArgs),
    /// Check the closed forms, simulator and schemes against each other.
    Verify(OutputArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SchemeArgs {
    /// Offset of the rounding function (lrf).
    #[arg(long)]
    offset: Option<u64>,
    /// Noise magnitude η.
    #[arg(long)]
    eta: Option<u64>,
    /// Public-key rows (pke).
    #[arg(long)]
    m: Option<usize>,
    /// Secret columns n̄ (frodo).
    #[arg(long)]
    nbar: Option<usize>,
    /// Ciphertext rows m̄ (frodo).
    #[arg(long)]
    mbar: Option<usize>,
    /// Bits per symbol B (frodo).
    #[arg(long)]
    bits: Option<u32>,
    /// Target columns, comma-separated (frodo).
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<usize>>,
}

impl SchemeArgs {
    fn options(&self) -> SchemeOptions {
        SchemeOptions {
            offset: self.offset,
            eta: self.eta,
            m: self.m,
            nbar: self.nbar,
            mbar: self.mbar,
            bits: self.bits,
            columns: self.columns.clone(),
        }
    }
}

#[derive(Args)]
struct PointArgs {
    /// Attack or scheme name: lrf, ske, pke, frodo, ring-lwe, ra-shared, ra-iid, classical-dec, classical-ra.
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    /// Block size of the rounding function (lrf only); defaults to ⌈q/2⌉.
    #[arg(long)]
    b: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    scheme_args: SchemeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

impl PointArgs {
    fn spec(&self) -> Result<ExperimentSpec, Error> {
        let kind: AttackKind = self.scheme.parse()?;
        let params = attack_params(kind, self.q, self.n, self.b, &self.scheme_args.options())?;
        let format = self.output.format.map(Format::from).unwrap_or(Format::Json);
        ExperimentSpec::new(params, self.trials, self.seed, self.output.out.clone(), format)
    }
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Also write the first trial's keys and a sample ciphertext as JSON.
    #[arg(long)]
    fixture_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated attack names.
    #[arg(long)]
    scheme: String,
    /// Moduli: `7`, `5,7,11`, `4..65` or `4..=64`, or a mix.
    #[arg(long)]
    q: String,
    /// Dimensions, same syntax as --q.
    #[arg(long)]
    n: String,
    /// Block sizes (lrf only), same syntax as --q; defaults to ⌈q/2⌉.
    #[arg(long)]
    b: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    scheme_args: SchemeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_cap_env() -> Result<(), Error> {
    match std::env::var(MAX_AMPLITUDES_ENV) {
        Ok(v) if v.trim().parse::<usize>().map_or(true, |c| c == 0) => {
            Err(Error::Parameter(format!("{MAX_AMPLITUDES_ENV}={v:?} is not a positive integer")))
        }
        _ => Ok(()),
    }
}

fn attack(args: &AttackArgs) -> Result<i32, Error> {
    let spec = args.point.spec()?;
    let (output, keys) = harness::run_attack(&spec)?;
    let text = match spec.format {
        Format::Json => output.to_json() + "\n",
        Format::Csv => output.to_csv()?,
    };
    emit(&text, spec.out.as_ref())?;
    if let Some(path) = &args.fixture_out {
        let keys =
            keys.ok_or_else(|| Error::Parameter(format!("`{}` has no scheme keys to export", spec.params.kind)))?;
        emit(&(harness::key_fixture(&keys, spec.seed, spec.trials)? + "\n"), Some(path))?;
    }
    Ok(EXIT_OK)
}

fn sweep(args: &SweepArgs) -> Result<i32, Error> {
    let spec = SweepSpec {
        schemes: parse_schemes(&args.scheme)?,
        qs: parse_list(&args.q)?,
        ns: parse_list::<u64>(&args.n)?.into_iter().map(|n| n as usize).collect(),
        bs: args.b.as_deref().map(parse_list).transpose()?,
        options: args.scheme_args.options(),
        trials: args.trials,
        seed: args.seed,
    };
    let rows = harness::run_sweep(&spec)?;
    let text = match args.output.format.map(Format::from).unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&rows),
        Format::Json => rows_json(&rows) + "\n",
    };
    emit(&text, args.output.out.as_ref())?;
    Ok(EXIT_OK)
}

fn baseline(args: &PointArgs) -> Result<i32, Error> {
    let spec = args.spec()?;
    let summary = harness::run_baseline(&spec)?;
    let text = match spec.format {
        Format::Csv => write_csv(&[sweep_row(&summary)?]),
        Format::Json => summary_json(&summary) + "\n",
    };
    emit(&text, spec.out.as_ref())?;
    Ok(EXIT_OK)
}

fn verify(args: &OutputArgs) -> Result<i32, Error> {
    if matches!(args.format, Some(FormatArg::Csv)) {
        return Err(Error::Parameter("verify prints a table; --format csv is not supported".into()));
    }
    let report = harness::run_verify();
    let table = report.table();
    emit(&table, args.out.as_ref())?;
    if args.out.is_some() {
        eprint!("{table}");
    }
    if report.over_time() {
        eprintln!("warning: verification exceeded its time budget");
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = check_cap_env().and_then(|()| match &cli.command {
        Command::Attack(a) => attack(a),
        Command::Sweep(s) => sweep(s),
        Command::Baseline(b) => baseline(b),
        Command::Verify(v) => verify(v),
    });
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lrfkit: {e}");
            harness::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
