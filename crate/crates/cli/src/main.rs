//! `modulus`: point evaluation, fundamental-domain reduction, seeded
//! invariant audits, exact series printing, Weierstrass division on
//! serialized series, and grid emission.
//!
//! Exit codes: 0 success, 1 audit failure, 2 domain/usage error, 3 I/O error.

mod audit;
mod config;
mod grid;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use modulus_core::modular_group::HalfPlanePoint;
use modulus_core::power_series::{recomposition_residual, weierstrass_divide, MpsDocument};
use modulus_core::q_transform::{q_from_tau, PuncturedDiskPoint};
use modulus_core::structures::{evaluate_symbol, parse_symbol_path};
use modulus_core::{Complex, Error};

/// Stdout writer that swallows broken pipes: a consumer that stopped
/// reading (audit ... | head) should not turn a finished computation into a
/// panic, and the exit code still reports the real outcome.
fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_fmt(args);
    let _ = out.write_all(b"\n");
}

macro_rules! outln {
    ($($t:tt)*) => { crate::emit(format_args!($($t)*)) };
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(std::io::Error),
    /// Checks already reported on stdout; carries no message of its own.
    Audit,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 2,
            CliError::Io(_) => 3,
            CliError::Audit => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "modulus", version, about = "Modular-invariant toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate J, E2, E4, E6, Jtilde, or a structure symbol at a point
    Eval {
        /// J | E2 | E4 | E6 | Jtilde | a symbol path such as RJ.Jre[0]
        target: String,
        #[arg(allow_negative_numbers = true)]
        x: f64,
        /// Second coordinate; omitted for one-argument symbols
        #[arg(allow_negative_numbers = true)]
        y: Option<f64>,
        /// Decimal digits to print (default from config, 9)
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Reduce a half-plane point to the fundamental domain
    Reduce {
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
    },
    /// Run a seeded invariant suite and print its report
    Audit {
        /// all | modularity | ramanujan | covering | qmaps | wdivision | structures
        suite: String,
        /// Sample count per check (positional form; 0 = per-check default)
        #[arg(value_name = "SAMPLES")]
        samples_pos: Option<usize>,
        /// RNG seed (positional form)
        #[arg(value_name = "SEED")]
        seed_pos: Option<u64>,
        /// Sample count per check; overrides the positional form
        #[arg(long)]
        samples: Option<usize>,
        /// RNG seed; overrides the positional form
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance applied to every check in the suite
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
    },
    /// Write a rectangular grid of (x, y, value) samples
    Grid {
        /// fundamental-domain | strip | q-disk
        region: String,
        /// Resolution as WxH, at most 4096 per axis
        #[arg(long)]
        res: String,
        /// absJ | reJ | imJ | tile-index
        #[arg(long)]
        quantity: String,
        #[arg(long)]
        out: PathBuf,
        /// csv | json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Print exact q-expansion coefficients of an Eisenstein series
    Series {
        /// Weight: 2, 4, or 6
        k: u32,
        /// Expansion order (default from config, 64)
        #[arg(long)]
        order: Option<usize>,
    },
    /// Weierstrass-divide serialized power series: g = Q f + sum R_i x^i
    Wdivide {
        /// Divisor document (JSON)
        #[arg(long)]
        f: PathBuf,
        /// Dividend document (JSON)
        #[arg(long)]
        g: PathBuf,
        /// Total-degree truncation of the output
        #[arg(long)]
        trunc: u32,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            match &e {
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Io(err) => eprintln!("error: i/o: {err}"),
                CliError::Audit => eprintln!("error: audit failed"),
            }
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::load()?;
    match cli.cmd {
        Cmd::Eval { target, x, y, digits } => {
            cmd_eval(&target, x, y, digits.unwrap_or(cfg.digits), &cfg)
        }
        Cmd::Reduce { x, y } => cmd_reduce(x, y),
        Cmd::Audit {
            suite,
            samples_pos,
            seed_pos,
            samples,
            seed,
            tol,
        } => {
            let samples = samples.or(samples_pos);
            let seed = seed.or(seed_pos).unwrap_or(cfg.seed);
            cmd_audit(&suite, samples, seed, tol, &cfg)
        }
        Cmd::Grid {
            region,
            res,
            quantity,
            out,
            format,
        } => grid::run_grid(&region, &res, &quantity, &out, &format),
        Cmd::Series { k, order } => cmd_series(k, order.unwrap_or(cfg.series_order)),
        Cmd::Wdivide { f, g, trunc } => cmd_wdivide(&f, &g, trunc),
    }
}

/// Fixed-point decimal with the sign dropped when every printed digit is
/// zero, so values that round to zero print as +0 regardless of their sign
/// bit or a stray 1e-17.
fn fmt_real_fixed(v: f64, digits: usize) -> String {
    let s = format!("{:.*}", digits, v.abs());
    if v.is_sign_negative() && s.chars().any(|c| c.is_ascii_digit() && c != '0') {
        format!("-{s}")
    } else {
        s
    }
}

fn fmt_complex(v: Complex, digits: usize) -> String {
    let re = fmt_real_fixed(v.re, digits);
    let im = fmt_real_fixed(v.im, digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn require_y(target: &str, y: Option<f64>) -> Result<f64, CliError> {
    y.ok_or_else(|| {
        Error::Usage(format!("target {target} takes two real arguments <x> <y>")).into()
    })
}

fn cmd_eval(
    target: &str,
    x: f64,
    y: Option<f64>,
    digits: usize,
    cfg: &config::Settings,
) -> Result<(), CliError> {
    match target {
        "J" => {
            let t = HalfPlanePoint::new(Complex::new(x, require_y(target, y)?))?;
            outln!("{}", fmt_complex(modulus_core::modular_j::j_eval(&t)?, digits));
        }
        "E2" | "E4" | "E6" => {
            let k: u32 = target[1..].parse().expect("matched weights parse");
            let t = HalfPlanePoint::new(Complex::new(x, require_y(target, y)?))?;
            let q = q_from_tau(&t)?.value();
            outln!(
                "{}",
                fmt_complex(modulus_core::eisenstein::eisenstein_value(k, q)?, digits)
            );
        }
        "Jtilde" => {
            let q = PuncturedDiskPoint::new(Complex::new(x, require_y(target, y)?))?;
            outln!(
                "{}",
                fmt_complex(modulus_core::modular_j::jtilde_eval(&q)?, digits)
            );
        }
        path if path.contains('.') => {
            let sym = parse_symbol_path(path)?;
            let args = match y {
                Some(y) => vec![x, y],
                None => vec![x],
            };
            let v = evaluate_symbol(&sym, &args, cfg.index_cap)?;
            if v == 0.0 {
                outln!("0");
            } else {
                outln!("{}", fmt_real_fixed(v, digits));
            }
        }
        _ => {
            return Err(Error::Usage(format!(
                "unknown target '{target}'; expected J, E2, E4, E6, Jtilde, \
                 or a structure symbol such as RJ.Jre[0]"
            ))
            .into())
        }
    }
    Ok(())
}

fn cmd_reduce(x: f64, y: f64) -> Result<(), CliError> {
    let t = HalfPlanePoint::new(Complex::new(x, y))?;
    let r = modulus_core::modular_group::reduce_to_fd(&t)?;
    let z = r.reduced.value();
    outln!("reduced: {}", fmt_complex(z, 9));
    outln!(
        "gamma: [[{}, {}], [{}, {}]]",
        r.gamma.a(),
        r.gamma.b(),
        r.gamma.c(),
        r.gamma.d()
    );
    let word = if r.word.is_empty() {
        "(identity)".to_string()
    } else {
        r.word
            .iter()
            .map(|g| g.token())
            .collect::<Vec<_>>()
            .join(" ")
    };
    outln!("word: {word}");
    Ok(())
}

fn cmd_audit(
    suite: &str,
    samples: Option<usize>,
    seed: u64,
    tol: Option<f64>,
    cfg: &config::Settings,
) -> Result<(), CliError> {
    let run = audit::run_suite(suite, samples, seed, tol, cfg)?;
    outln!("audit {suite}  seed {seed}  samples {}", match samples {
        None | Some(0) => "default".to_string(),
        Some(n) => n.to_string(),
    });
    for (check, worst) in run.report.checks.iter().zip(&run.worst) {
        let verdict = if check.pass { "pass" } else { "FAIL" };
        outln!(
            "  {verdict}  {:<26} max {:>12.5e}  tol {:>9.1e}",
            check.name, check.max_residual, check.tolerance
        );
        if !check.pass {
            if let Some(w) = worst {
                outln!("        worst input: {w}");
            }
        }
    }
    let failed = run.report.checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        outln!("all {} checks passed", run.report.checks.len());
    } else {
        outln!("{failed} of {} checks FAILED", run.report.checks.len());
    }
    outln!(
        "{}",
        serde_json::to_string_pretty(&run.report).expect("report serializes")
    );
    if run.pass() {
        Ok(())
    } else {
        Err(CliError::Audit)
    }
}

fn cmd_series(k: u32, order: usize) -> Result<(), CliError> {
    let s = modulus_core::eisenstein::eisenstein_qseries(k, order)?;
    for (n, c) in s.coefficients().iter().enumerate() {
        outln!("{n} {c}");
    }
    Ok(())
}

#[derive(Serialize)]
struct WdivideOutput {
    order: usize,
    quotient: MpsDocument,
    remainders: Vec<MpsDocument>,
    residual_zero: bool,
}

fn cmd_wdivide(f_path: &PathBuf, g_path: &PathBuf, trunc: u32) -> Result<(), CliError> {
    let read_doc = |p: &PathBuf| -> Result<modulus_core::power_series::MultiPowerSeries, CliError> {
        let text = std::fs::read_to_string(p).map_err(CliError::Io)?;
        let doc: MpsDocument = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        Ok(doc.to_series()?)
    };
    let f = read_doc(f_path)?;
    let g = read_doc(g_path)?;
    let division = weierstrass_divide(&f, &g, trunc)?;
    let residual = recomposition_residual(&f, &g, &division)?;
    let out = WdivideOutput {
        order: division.order,
        quotient: MpsDocument::from_series(&division.quotient),
        remainders: division.remainders.iter().map(MpsDocument::from_series).collect(),
        residual_zero: residual.is_zero(),
    };
    outln!("{}", serde_json::to_string_pretty(&out).expect("output serializes"));
    Ok(())
}
