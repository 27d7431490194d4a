//! Command-line driver.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bondi::{kerr_data, random_data, BondiData};
use crate::charges::{charges, FRAME_TOLERANCE};
use crate::error::{Error, Result};
use crate::io::{read_data, write_data};
use crate::report::Report;
use crate::sphere::SphereGrid;
use crate::verify::{all_passed, run_suite, Suite, CORPUS_AMPLITUDE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FRAME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const DEFAULT_BANDLIMIT: usize = 32;
pub const DEFAULT_SEEDS: u64 = 20;

/// Tolerances of the Kerr comparison.
const KERR_ENERGY_TOL: f64 = 1e-12;
const KERR_SPIN_TOL: f64 = 1e-8;
const KERR_TRANSVERSE_TOL: f64 = 1e-10;
const KERR_COM_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "scri-charges", version, about = "Charges at null infinity from Bondi-Sachs data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate all charges of the cut stored in a data file.
    Charges {
        #[arg(long)]
        input: PathBuf,
        /// Expected band limit; must match the file.
        #[arg(long)]
        bandlimit: Option<usize>,
        /// Treat a failed frame test as an error (exit 1).
        #[arg(long)]
        require_frame: bool,
        /// Reject shear content in degrees 0 and 1.
        #[arg(long)]
        strict: bool,
        /// Tolerance of the center-of-mass frame test.
        #[arg(long, default_value_t = FRAME_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the full pipeline on Kerr data and compare with the expected charges.
    Kerr {
        #[arg(long, allow_hyphen_values = true)]
        mass: f64,
        #[arg(long, allow_hyphen_values = true)]
        spin: f64,
        #[arg(long, default_value_t = DEFAULT_BANDLIMIT)]
        bandlimit: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a residual suite over seeded random data.
    Verify {
        #[arg(long, default_value = "limits")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEEDS)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_BANDLIMIT)]
        bandlimit: usize,
        /// Threshold for relative residuals (1e-9 for identities and lemmas, 1e-8 for limits).
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a data file: random (`--seed`) or Kerr (`--mass`, `--spin`).
    Generate {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BANDLIMIT)]
        bandlimit: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = CORPUS_AMPLITUDE)]
        amplitude: f64,
        /// Remove the degree-1 part of the mass aspect and make its mean positive.
        #[arg(long)]
        com_frame: bool,
        #[arg(long, allow_hyphen_values = true, requires = "spin")]
        mass: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "mass")]
        spin: Option<f64>,
    },
}

/// Outcome of a command: a report to emit and the exit code.
pub struct Outcome {
    pub report: Option<Report>,
    pub code: i32,
    pub message: Option<String>,
}

fn emit(report: &Report, output: Option<&Path>) -> Result<()> {
    let text = report.to_json();
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be finite and non-negative")));
    }
    Ok(())
}

fn cmd_charges(
    input: &Path,
    bandlimit: Option<usize>,
    require_frame: bool,
    strict: bool,
    tol: f64,
    timings: bool,
) -> Result<Outcome> {
    check_tolerance(tol)?;
    let start = Instant::now();
    let d = read_data(input, strict)?;
    if let Some(l) = bandlimit {
        if l != d.band_limit() {
            return Err(Error::BandLimitMismatch(format!(
                "--bandlimit {l} does not match the file's band limit {}",
                d.band_limit()
            )));
        }
    }
    let mut report = pipeline(&d, "charges", input.display().to_string(), tol)?;
    if timings {
        report.timings = Some([("total_s".to_string(), start.elapsed().as_secs_f64())].into());
    }
    let withheld = report.charges.as_ref().and_then(|c| c.withheld.clone());
    Ok(match withheld {
        None => Outcome { report: Some(report), code: EXIT_OK, message: None },
        Some(reason) if require_frame => Outcome {
            report: None,
            code: EXIT_USAGE,
            message: Some(format!("frame check failed: {reason}")),
        },
        Some(reason) => Outcome {
            report: Some(report),
            code: EXIT_FRAME,
            message: Some(reason),
        },
    })
}

fn pipeline(d: &BondiData, command: &str, input: String, tol: f64) -> Result<Report> {
    let grid = SphereGrid::new(d.band_limit());
    let mut report = Report::new(command, input, d.band_limit());
    report.charges = Some(charges(d, &grid, tol)?);
    Ok(report)
}

fn cmd_kerr(mass: f64, spin: f64, bandlimit: usize, timings: bool) -> Result<Outcome> {
    let start = Instant::now();
    let d = kerr_data(mass, spin, bandlimit)?;
    let input = format!("kerr(mass={mass}, spin={spin})");
    let mut report = pipeline(&d, "kerr", input, FRAME_TOLERANCE)?;
    let set = report.charges.clone().expect("charges evaluated");
    let ma = mass * spin;
    report.expected = [
        ("energy", mass),
        ("linear_momentum.x", 0.0),
        ("linear_momentum.y", 0.0),
        ("linear_momentum.z", 0.0),
        ("center_of_mass.x", 0.0),
        ("center_of_mass.y", 0.0),
        ("center_of_mass.z", 0.0),
        ("angular_momentum.x", 0.0),
        ("angular_momentum.y", 0.0),
        ("angular_momentum.z", -ma),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    report.check("kerr.energy", (set.energy - mass).abs(), KERR_ENERGY_TOL);
    let p = set.linear_momentum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    report.check("kerr.linear_momentum", p, KERR_ENERGY_TOL);
    if timings {
        report.timings = Some([("total_s".to_string(), start.elapsed().as_secs_f64())].into());
    }
    let (Some(c), Some(j)) = (set.center_of_mass, set.angular_momentum) else {
        let reason = set.withheld.unwrap_or_default();
        return Ok(Outcome { report: Some(report), code: EXIT_FRAME, message: Some(reason) });
    };
    report.check("kerr.angular_momentum.z", (j[2] + ma).abs(), KERR_SPIN_TOL);
    report.check(
        "kerr.angular_momentum.transverse",
        j[0].abs().max(j[1].abs()),
        KERR_TRANSVERSE_TOL,
    );
    report.check(
        "kerr.center_of_mass",
        c.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        KERR_COM_TOL,
    );
    let code = if report.passed() { EXIT_OK } else { EXIT_VERIFY };
    let message = (code != EXIT_OK).then(|| format!("failed: {}", report.failures().join(", ")));
    Ok(Outcome { report: Some(report), code, message })
}

fn cmd_verify(suite: &str, seeds: u64, bandlimit: usize, tol: Option<f64>, timings: bool) -> Result<Outcome> {
    let suite: Suite = suite.parse()?;
    let tol = tol.unwrap_or(suite.default_tolerance());
    check_tolerance(tol)?;
    if seeds == 0 {
        return Err(Error::InvalidArgument("--seeds must be positive".into()));
    }
    if bandlimit < 2 {
        return Err(Error::InvalidArgument(format!("band limit {bandlimit} below the minimum of 2")));
    }
    let start = Instant::now();
    let checks = run_suite(suite, seeds, bandlimit, tol)?;
    let mut report = Report::new("verify", format!("suite={suite}, seeds={seeds}"), bandlimit);
    let passed = all_passed(&checks);
    report.residuals = checks;
    if timings {
        report.timings = Some([("total_s".to_string(), start.elapsed().as_secs_f64())].into());
    }
    let code = if passed { EXIT_OK } else { EXIT_VERIFY };
    let message = (!passed).then(|| {
        let f = report.failures();
        format!("{} of {} residuals above threshold (first: {})", f.len(), report.residuals.len(), f[0])
    });
    Ok(Outcome { report: Some(report), code, message })
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    output: &Path,
    bandlimit: usize,
    seed: u64,
    amplitude: f64,
    com_frame: bool,
    kerr: Option<(f64, f64)>,
) -> Result<Outcome> {
    let d = match kerr {
        Some((m, a)) => kerr_data(m, a, bandlimit)?,
        None => {
            if !amplitude.is_finite() {
                return Err(Error::NonFinite("amplitude".into()));
            }
            random_data(seed, bandlimit, amplitude, com_frame)
        }
    };
    write_data(&d, output)?;
    Ok(Outcome { report: None, code: EXIT_OK, message: None })
}

pub fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Charges { input, bandlimit, require_frame, strict, tolerance, out } => {
            let o = cmd_charges(&input, bandlimit, require_frame, strict, tolerance, out.timings)?;
            finish(o, out.output.as_deref())
        }
        Command::Kerr { mass, spin, bandlimit, out } => {
            finish(cmd_kerr(mass, spin, bandlimit, out.timings)?, out.output.as_deref())
        }
        Command::Verify { suite, seeds, bandlimit, tolerance, out } => finish(
            cmd_verify(&suite, seeds, bandlimit, tolerance, out.timings)?,
            out.output.as_deref(),
        ),
        Command::Generate { output, bandlimit, seed, amplitude, com_frame, mass, spin } => {
            let kerr = mass.zip(spin);
            cmd_generate(&output, bandlimit, seed, amplitude, com_frame, kerr)
        }
    }
}

fn finish(o: Outcome, output: Option<&Path>) -> Result<Outcome> {
    if let Some(r) = &o.report {
        emit(r, output)?;
    }
    Ok(o)
}

/// Parse arguments, run, print diagnostics to stderr, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(o) => {
            if let Some(m) = o.message {
                eprintln!("scri-charges: {m}");
            }
            o.code
        }
        Err(e) => {
            eprintln!("scri-charges: error: {e}");
            EXIT_USAGE
        }
    }
}
