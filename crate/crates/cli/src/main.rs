mod output;
mod selftest;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use canlift::arith::ArithError;
use canlift::dwork::{
    dwork_poly, hd_def, hd_mod_coeffs, lift_report, verify_canonical, DworkError, DworkParams,
    LiftReport,
};
use canlift::obstruction::{check_lift, HypersurfaceContext, ObstructionError};
use canlift::poly::{HomogPoly, PolyError};
use canlift::{FieldSpec, ResidueField, WittRing};

use output::{Format, GammaReport, HdReport};

#[derive(Parser, Debug)]
#[command(
    name = "canlift",
    version,
    about = "Canonical lifts mod p^2 of ordinary hypersurfaces and the Dwork family"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputArg::Text, global = true)]
    output: OutputArg,

    /// Worker threads for table scans and kernel assembly.
    #[arg(long, env = "CANLIFT_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Characteristic, an odd prime.
    #[arg(long)]
    p: u64,

    /// Degree of the residue field over F_p.
    #[arg(long = "n-ext", default_value_t = 1)]
    n_ext: usize,

    /// Defining polynomial of F_{p^n}, e.g. "y^2 + 1". Defaults to the
    /// smallest irreducible monic polynomial.
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the canonical parameter over one lambda.
    Lift {
        #[command(flatten)]
        field: FieldArgs,
        /// Dimension of the ambient projective space.
        #[arg(long = "N")]
        big_n: usize,
        /// Parameter in F_{p^n}: an integer, or "c0,c1,..." over an extension.
        #[arg(long)]
        lambda: String,
        /// Skip re-verification through the general canonicity test.
        #[arg(long)]
        no_verify: bool,
    },
    /// Solve for every lambda in F_{p^n}, or for the given list.
    Table {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long = "N")]
        big_n: usize,
        /// Restrict the scan to these parameters (repeatable).
        #[arg(long)]
        lambda: Vec<String>,
        #[arg(long)]
        no_verify: bool,
        /// Report zero timings, making output reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check whether a candidate lift is canonical: either a polynomial
    /// given with --f, or the Dwork member with parameter --eta.
    Check {
        #[command(flatten)]
        field: FieldArgs,
        /// Homogeneous polynomial over W_2(k), e.g. "x0^3 + x1^3 + x2^3".
        #[arg(long, conflicts_with_all = ["big_n", "eta"])]
        f: Option<String>,
        #[arg(long = "N", requires = "eta")]
        big_n: Option<usize>,
        /// Dwork parameter in W_2(k): an integer or "(a0|a1)".
        #[arg(long, requires = "big_n")]
        eta: Option<String>,
    },
    /// Print the Hasse-Dwork polynomial HD_{N+1}^{mp-1}, exactly and mod p^2.
    Hd {
        #[arg(long)]
        p: u64,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Run the general canonicity test on an arbitrary lift f.
    Gamma {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
    },
    /// Run the built-in invariant checks and print a pass/fail matrix.
    Selftest,
}

/// A failure with its exit code: 1 for precondition violations, 2 for
/// unparsable input, 3 for internal cross-check failures.
#[derive(Debug)]
enum CliError {
    Precondition(String),
    Parse(String),
    CrossCheck(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Precondition(_) => 1,
            CliError::Parse(_) => 2,
            CliError::CrossCheck(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::CrossCheck(m) => write!(f, "internal cross-check failed: {m}"),
        }
    }
}

impl From<DworkError> for CliError {
    fn from(e: DworkError) -> Self {
        match e {
            DworkError::CrossCheck(_) | DworkError::UniquenessFailure | DworkError::NoSolution => {
                CliError::CrossCheck(e.to_string())
            }
            DworkError::Arith(a) => a.into(),
            DworkError::Poly(p) => p.into(),
            DworkError::Obstruction(o) => o.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Arith(a) => a.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<ObstructionError> for CliError {
    fn from(e: ObstructionError) -> Self {
        match e {
            ObstructionError::Poly(p) => p.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

fn field_spec(args: &FieldArgs) -> Result<Arc<FieldSpec>, CliError> {
    let modulus = match &args.modulus {
        Some(text) => Some(FieldSpec::parse_modulus(text, args.p).map_err(|e| CliError::Parse(e.to_string()))?),
        None => None,
    };
    Ok(FieldSpec::new(args.p, args.n_ext, modulus)?)
}

fn parse_poly(text: &str, w: &WittRing) -> Result<HomogPoly<WittRing>, CliError> {
    HomogPoly::parse(text, w, None).map_err(|e| CliError::Parse(e.to_string()))
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn run(cli: Cli) -> Result<(), CliError> {
    let format = match cli.output {
        OutputArg::Json => Format::Json,
        OutputArg::Csv => Format::Csv,
        OutputArg::Text => Format::Text,
    };
    match cli.command {
        Command::Lift {
            field,
            big_n,
            lambda,
            no_verify,
        } => {
            let spec = field_spec(&field)?;
            let k = ResidueField::new(spec.clone());
            let lam = k.parse(&lambda).map_err(|e| CliError::Parse(e.to_string()))?;
            let report = lift_report(spec.clone(), big_n, &lam, !no_verify)?;
            emit(&output::lift_single(&report, format));
            precondition_of(&report, spec.p())
        }
        Command::Table {
            field,
            big_n,
            lambda,
            no_verify,
            no_timing,
        } => {
            let spec = field_spec(&field)?;
            let k = ResidueField::new(spec.clone());
            let mut params = if lambda.is_empty() {
                if spec.order().map_or(true, |q| q > 1 << 16) {
                    return Err(CliError::Precondition(
                        "field too large to scan; pass --lambda values".into(),
                    ));
                }
                k.elements().collect()
            } else {
                lambda
                    .iter()
                    .map(|t| k.parse(t).map_err(|e| CliError::Parse(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?
            };
            params.sort_by_key(|l| k.index_of(l));
            params.dedup();
            let rows: Vec<LiftReport> = params
                .par_iter()
                .map(|l| lift_report(spec.clone(), big_n, l, !no_verify))
                .collect::<Result<_, _>>()?;
            let rows: Vec<LiftReport> = rows
                .into_iter()
                .map(|mut r| {
                    if no_timing {
                        r.timing_ms = 0.0;
                    }
                    r
                })
                .collect();
            emit(&output::lift_table(&rows, format));
            Ok(())
        }
        Command::Check {
            field,
            f,
            big_n,
            eta,
        } => {
            let spec = field_spec(&field)?;
            let w = WittRing::new(spec.clone());
            let poly = match (f, big_n, eta) {
                (Some(text), _, _) => parse_poly(&text, &w)?,
                (None, Some(n), Some(eta)) => {
                    let eta = w.parse(&eta).map_err(|e| CliError::Parse(e.to_string()))?;
                    let params = DworkParams::with_eta(spec.clone(), n, eta)?;
                    // confirms the invariant form against the dual module
                    verify_canonical(&params)?;
                    dwork_poly(&params)?
                }
                _ => {
                    return Err(CliError::Precondition(
                        "check needs either --f or both --N and --eta".into(),
                    ))
                }
            };
            let report = check_lift(poly)?;
            emit(&output::obstruction(&report, format));
            Ok(())
        }
        Command::Hd { p, big_n, m } => {
            let spec = FieldSpec::prime(p)?;
            if big_n < 2 {
                return Err(DworkError::BadDimension(big_n).into());
            }
            if !(1..=2).contains(&m) {
                return Err(DworkError::HarmonicMultiplier(m).into());
            }
            let modular = hd_mod_coeffs(big_n as u32, spec.p(), m)?;
            let def = hd_def(big_n as u32 + 1, m * p as u32 - 1);
            if def.reduce_mod(p * p) != modular {
                return Err(CliError::CrossCheck(
                    "exact and modular Hasse-Dwork coefficients disagree".into(),
                ));
            }
            emit(&output::hd(&HdReport::new(&def, p), format));
            Ok(())
        }
        Command::Gamma { field, f } => {
            let spec = field_spec(&field)?;
            let w = WittRing::new(spec);
            let poly = parse_poly(&f, &w)?;
            let ctx = HypersurfaceContext::new(poly)?;
            let report = ctx.report()?;
            let verdict_image = if report.canonical {
                None
            } else {
                ctx.is_canonical()?.witness_image.map(|g| g.to_string())
            };
            emit(&output::gamma(&GammaReport::new(report, verdict_image), format));
            Ok(())
        }
        Command::Selftest => {
            let results = selftest::run_all();
            emit(&output::selftest(&results, format));
            match results.iter().find(|r| !r.passed) {
                Some(r) => Err(CliError::CrossCheck(format!("self-test {} failed", r.name))),
                None => Ok(()),
            }
        }
    }
}

/// The report is printed either way; a parameter that is not smooth and
/// ordinary still counts as a precondition failure for `lift`.
fn precondition_of(report: &LiftReport, p: u64) -> Result<(), CliError> {
    if (report.big_n as u64 + 1) % p == 0 {
        return Err(CliError::Precondition(format!("p = {p} divides N+1")));
    }
    if !report.smooth {
        return Err(CliError::Precondition("the hypersurface is singular".into()));
    }
    if !report.ordinary {
        return Err(CliError::Precondition("the hypersurface is not ordinary".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("canlift: could not configure {n} threads: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("canlift: {e}");
            ExitCode::from(e.code())
        }
    }
}
