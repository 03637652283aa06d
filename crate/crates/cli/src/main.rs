use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lcover::bench::{run_grid, BenchConfig, Grid, CSV_HEADER};
use lcover::cover::DEFAULT_C;
use lcover::oracle::{generate_tables, ScaleConfig};
use lcover::{
    construct, coverage_count, factorize, lower_bound_instance, phi_relative, select_basis, verify_cover,
    BasisChoice, ConstructConfig, Error, Mode,
};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_COVERING: u8 = 3;

#[derive(Parser)]
#[command(name = "lcover", version, about = "Build and check ℓ-coverings of Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a verified covering set.
    Construct(ConstructArgs),
    /// Check whether a slope set is a covering.
    Verify(VerifyArgs),
    /// Print exact arithmetic quantities.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Run a benchmark grid and print CSV.
    Bench(BenchArgs),
    /// Write brute-force oracle tables.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Det,
    Rand,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Det => Mode::Deterministic,
            ModeArg::Rand => Mode::Randomized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    AboveThreshold,
    DivisorLattice,
}

impl From<CaseArg> for BasisChoice {
    fn from(c: CaseArg) -> BasisChoice {
        match c {
            CaseArg::AboveThreshold => BasisChoice::AboveThreshold,
            CaseArg::DivisorLattice => BasisChoice::DivisorLattice,
        }
    }
}

#[derive(Args)]
struct TuningArgs {
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
    /// Force a divisor basis instead of the ℓ-size test.
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long, default_value_t = lcover::cover::DEFAULT_ROUNDS_FACTOR)]
    rounds_factor: f64,
}

impl TuningArgs {
    fn config(&self, mode: Mode, seed: u64) -> ConstructConfig {
        ConstructConfig {
            c: self.c,
            case_override: self.case.map(Into::into),
            mode,
            seed,
            rounds_factor: self.rounds_factor,
            ..ConstructConfig::default()
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: TuningArgs,
    /// JSON object on one line (the default).
    #[arg(long, conflicts_with = "raw")]
    json: bool,
    /// Slopes only, one per line.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    ell: u64,
    /// A file of slopes, or a comma-separated list.
    #[arg(long)]
    slopes: String,
}

#[derive(Subcommand)]
enum Analyze {
    /// φ(n, ℓ) and φ(n).
    Phi {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Number of units x with y in the segment of slope x.
    Coverage {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        y: u64,
    },
    /// The divisor basis construct would use.
    Basis {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        ell: u64,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Primorial instance whose coverings need all units.
    Lowerbound {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Semicolon-separated families (primorial:k, prime:p, power:p^e, random:count:bits,
    /// uniform:count:max) and length rules (ratio:x, log5, sqrt, fixed:v).
    #[arg(long)]
    grid: String,
    /// Comma-separated subset of det,rand.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "det")]
    modes: Vec<ModeArg>,
    #[arg(long, default_value_t = 1)]
    repeat: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Full,
    Small,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    scale: ScaleArg,
}

enum Failure {
    Lib(Error),
    NotCovering,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotCovering) => ExitCode::from(EXIT_NOT_COVERING),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidArgument(_) | Error::Parse(_) | Error::CapExceeded { .. } => EXIT_USAGE,
                _ => EXIT_VERIFICATION,
            })
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{v}");
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    let cfg = a.tuning.config(a.mode.into(), a.seed);
    let cover = construct(a.n, a.ell, &cfg)?;
    if a.raw {
        let mut out = std::io::stdout().lock();
        for x in &cover.slopes {
            writeln!(out, "{x}").map_err(Error::from)?;
        }
    } else {
        print_json(&json!({
            "n": cover.n,
            "ell": cover.ell,
            "method": cover.method.as_str(),
            "size": cover.size(),
            "slopes": cover.slopes,
            "stats": cover.stats,
        }));
    }
    Ok(())
}

fn parse_slopes(arg: &str) -> Result<Vec<u64>, Error> {
    let path = std::path::Path::new(arg);
    let text = if path.is_file() { std::fs::read_to_string(path)? } else { arg.to_string() };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad slope {t:?}"))))
        .collect()
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let slopes = parse_slopes(&a.slopes)?;
    if a.n < 2 || a.ell >= a.n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and ell < n (n = {}, ell = {})",
            a.n, a.ell
        ))
        .into());
    }
    let v = verify_cover(a.n, a.ell, &slopes)?;
    print_json(&json!({
        "complete": v.complete,
        "uncovered_count": v.uncovered_count,
        "witnesses": v.witnesses,
    }));
    if v.complete {
        Ok(())
    } else {
        Err(Failure::NotCovering)
    }
}

fn cmd_analyze(a: Analyze) -> CmdResult {
    match a {
        Analyze::Phi { n, ell } => {
            let f = factorize(n)?;
            print_json(&json!({"phi_rel": phi_relative(&f, ell)?, "phi": f.phi()}));
        }
        Analyze::Coverage { n, ell, y } => {
            print_json(&json!({"count": coverage_count(n, ell, y)?}));
        }
        Analyze::Basis { n, ell, tuning } => {
            if n < 2 || ell == 0 || ell >= n {
                return Err(
                    Error::InvalidArgument(format!("need 1 <= ell < n (n = {n}, ell = {ell})")).into()
                );
            }
            let f = factorize(n)?;
            let basis = select_basis(&f, ell, &tuning.config(Mode::Deterministic, 0));
            print_json(&serde_json::to_value(&basis).expect("basis serializes"));
        }
        Analyze::Lowerbound { k } => {
            let i = lower_bound_instance(k)?;
            print_json(&json!({"n": i.n, "ell": i.ell, "phi": i.phi_n, "certificate": i.certificate}));
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let grid = Grid::parse(&a.grid)?;
    let cfg = BenchConfig {
        modes: a.modes.iter().map(|&m| m.into()).collect(),
        repeat: a.repeat,
        seed: a.seed,
        jobs: a.jobs,
        construct: a.tuning.config(Mode::Deterministic, a.seed),
    };
    let records = run_grid(&grid, &cfg)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{CSV_HEADER}").map_err(Error::from)?;
    for r in records {
        writeln!(out, "{}", r.csv_row()).map_err(Error::from)?;
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CmdResult {
    let cfg = match a.scale {
        ScaleArg::Full => ScaleConfig::full(),
        ScaleArg::Small => ScaleConfig::small(),
    };
    std::fs::create_dir_all(&a.out).map_err(Error::from)?;
    for p in generate_tables(&cfg, &a.out)? {
        println!("{}", p.display());
    }
    Ok(())
}
