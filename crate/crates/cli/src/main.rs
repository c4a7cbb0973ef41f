//! Command-line front end for the `nctorus` library.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nctorus::covering::CoveringJson;
use nctorus::moyal::{moyal_partial_factor, seminorm_rk, Axis, MoyalJson};
use nctorus::oracles::dense_star_oracle;
use nctorus::spectral::{check_spectrum_size, dirac_spectrum};
use nctorus::torus::ElementJson;
use nctorus::verify::{covering_suite, lift_suite, verify_all, VerificationReport};
use nctorus::{CoveringSpec, CoveringTower, Error, MoyalMatrix, SkewMatrix, TorusElement, TruncationWindow};

const ORACLE_TOL: f64 = 1e-13;

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Truncated noncommutative torus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Twisted product of two element files.
    Star {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run the brute-force oracle and report the residual.
        #[arg(long)]
        oracle: bool,
    },
    /// Sorted Dirac spectrum on a truncation window.
    Spectrum {
        /// JSON file holding a deformation matrix, bare or under a "theta" key.
        theta: Option<PathBuf>,
        #[arg(long)]
        window: u64,
        /// Dimension when no theta file is given.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta12: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite coverings.
    Cover {
        #[command(subcommand)]
        action: CoverAction,
    },
    /// Moyal plane matrix calculus.
    Moyal {
        #[command(subcommand)]
        action: MoyalAction,
    },
    /// Run every identity suite.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hold every case to this tolerance instead of its own.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CoverArgs {
    /// CoveringSpec JSON file; overrides --k and --theta12.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    theta12: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CoverAction {
    /// Compatibility, module inner product and connection checks.
    Verify(CoverArgs),
    /// Lifted Dirac operator against the base.
    Lift(CoverArgs),
    /// Group orders and exactness along a prime tower (n = 2).
    Tower {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        primes: Vec<i64>,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        theta12: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    P,
    Q,
}

#[derive(Subcommand)]
enum MoyalAction {
    /// Derivative along one factor.
    Partial {
        input: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, default_value_t = 0)]
        factor: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seminorms r_0 .. r_k.
    Seminorm {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Io(_) => 2,
            Failure::Lib(e) => match e {
                Error::Parse(_) => 2,
                Error::SizeCap { .. } => 4,
                Error::Consistency(_) => 1,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) | Failure::Verification(m) => m.clone(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::Io(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    emit(&text, out)
}

fn planar_theta(n: usize, theta12: f64) -> Result<SkewMatrix, Failure> {
    if n < 2 {
        return Ok(SkewMatrix::zero(n));
    }
    let mut upper = vec![0.0; n * (n - 1) / 2];
    upper[0] = theta12;
    Ok(SkewMatrix::from_upper(n, &upper)?)
}

fn read_theta(path: &Path) -> Result<SkewMatrix, Failure> {
    let value: serde_json::Value = read_json(path)?;
    let rows = value.get("theta").cloned().unwrap_or(value);
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows)
        .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))?;
    Ok(SkewMatrix::from_rows(&rows)?)
}

fn report_outcome(report: &VerificationReport) -> CmdResult {
    for c in report.failures() {
        eprintln!("FAIL {} residual {:e} > {:e}", c.id, c.residual, c.tolerance);
    }
    if report.pass {
        Ok(())
    } else {
        let n = report.failures().count();
        Err(Failure::Verification(format!("{n} case(s) failed")))
    }
}

fn cmd_star(left: &Path, right: &Path, out: Option<&Path>, oracle: bool) -> CmdResult {
    let a = TorusElement::from_json(&read_json::<ElementJson>(left)?)?;
    let b = TorusElement::from_json(&read_json::<ElementJson>(right)?)?;
    let product = a.star(&b)?;
    emit_json(&product.to_json(), out)?;
    if oracle {
        let residual = product.max_diff(&dense_star_oracle(&a, &b)?);
        eprintln!("oracle residual {residual:e}");
        if residual > ORACLE_TOL {
            return Err(Failure::Verification(format!(
                "oracle residual {residual:e} exceeds {ORACLE_TOL:e}"
            )));
        }
    }
    Ok(())
}

fn cmd_spectrum(
    theta: Option<&Path>,
    window: u64,
    n: usize,
    theta12: f64,
    format: Format,
    out: Option<&Path>,
) -> CmdResult {
    let theta = match theta {
        Some(p) => read_theta(p)?,
        None => planar_theta(n, theta12)?,
    };
    if window == 0 {
        return Err(Error::InvalidParameter("window radius must be at least 1".into()).into());
    }
    check_spectrum_size(theta.dim(), window)?;
    let w = TruncationWindow::new(theta.dim(), window as u32)?;
    let report = dirac_spectrum(&theta, &w)?;
    match format {
        Format::Json => emit_json(&report.to_json(), out),
        Format::Csv => {
            let lines: Vec<String> = report.eigenvalues.iter().map(|e| e.to_string()).collect();
            emit(&lines.join("\n"), out)
        }
    }
}

fn cover_spec(args: &CoverArgs) -> Result<CoveringSpec, Failure> {
    if let Some(path) = &args.spec {
        return Ok(CoveringSpec::from_json(&read_json::<CoveringJson>(path)?)?);
    }
    let k = args.k.clone().unwrap_or_else(|| vec![2, 3]);
    let base = planar_theta(k.len(), args.theta12)?;
    Ok(CoveringSpec::new(&base, &k)?)
}

fn cmd_cover_suite(args: &CoverArgs, lift: bool) -> CmdResult {
    let spec = cover_spec(args)?;
    let start = std::time::Instant::now();
    let (name, cases) = if lift {
        ("cover.lift", lift_suite(&spec, args.seed)?)
    } else {
        ("cover.verify", covering_suite(&spec, args.seed)?)
    };
    let mut report = VerificationReport::new(name, args.seed, cases, start.elapsed().as_secs_f64());
    if let Some(t) = args.tol {
        report = report.with_tolerance(t);
    }
    emit_json(&report, args.out.as_deref())?;
    report_outcome(&report)
}

fn cmd_tower(primes: &[i64], theta12: f64, out: Option<&Path>) -> CmdResult {
    let tower = CoveringTower::build(&SkewMatrix::planar(theta12), primes)?;
    let json = tower.to_json()?;
    emit_json(&json, out)?;
    if json.exactness.iter().all(|r| r.ok()) {
        Ok(())
    } else {
        Err(Failure::Verification("exactness table has failing rows".into()))
    }
}

#[derive(Serialize)]
struct SeminormJson {
    theta: f64,
    values: Vec<f64>,
}

fn cmd_moyal(action: &MoyalAction) -> CmdResult {
    match action {
        MoyalAction::Partial { input, axis, factor, out } => {
            let x = MoyalMatrix::from_json(&read_json::<MoyalJson>(input)?)?;
            let axis = match axis {
                AxisArg::P => Axis::P,
                AxisArg::Q => Axis::Q,
            };
            let d = moyal_partial_factor(&x, *factor, axis)?;
            emit_json(&d.to_json(), out.as_deref())
        }
        MoyalAction::Seminorm { input, k, out } => {
            let x = MoyalMatrix::from_json(&read_json::<MoyalJson>(input)?)?;
            let values = (0..=*k).map(|j| seminorm_rk(&x, j)).collect();
            emit_json(&SeminormJson { theta: x.theta(), values }, out.as_deref())
        }
    }
}

fn cmd_verify_all(seed: u64, tol: Option<f64>, out: Option<&Path>) -> CmdResult {
    let report = verify_all(seed, tol)?;
    emit_json(&report, out)?;
    eprintln!(
        "{} cases, {} failed, {:.2}s",
        report.cases.len(),
        report.failures().count(),
        report.wall_time_s
    );
    report_outcome(&report)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Star { left, right, out, oracle } => cmd_star(&left, &right, out.as_deref(), oracle),
        Command::Spectrum { theta, window, n, theta12, format, out } => {
            cmd_spectrum(theta.as_deref(), window, n, theta12, format, out.as_deref())
        }
        Command::Cover { action } => match action {
            CoverAction::Verify(args) => cmd_cover_suite(&args, false),
            CoverAction::Lift(args) => cmd_cover_suite(&args, true),
            CoverAction::Tower { primes, theta12, out } => cmd_tower(&primes, theta12, out.as_deref()),
        },
        Command::Moyal { action } => cmd_moyal(&action),
        Command::VerifyAll { seed, tol, out } => cmd_verify_all(seed, tol, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
