//! Command implementations behind the `circlepat` binary.
//!
//! Exit codes: 0 success, 2 usage or unreadable input, 3 mathematical
//! failure (positivity, immersion, a failed check).

// `!(x > 0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::path::PathBuf;

use circlepat_core::real::{Precision, Real};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod analyze;
pub mod document;
pub mod generate;
pub mod render;
pub mod verify;

pub use document::{Mode, PatternDocument, Provenance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MATH: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    pub fn math(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_MATH,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<circlepat_core::Error> for CliError {
    fn from(e: circlepat_core::Error) -> Self {
        use circlepat_core::Error as E;
        match e {
            E::InvalidParams(_) | E::Parity(_) => CliError::usage(e.to_string()),
            E::Positivity { site, value, .. } => {
                CliError::math(format!("positivity failure at {site}: radius {value:e}"))
            }
            other => CliError::math(other.to_string()),
        }
    }
}

/// Text for stdout plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

#[derive(Debug, Parser)]
#[command(
    name = "circlepat",
    version,
    about = "Hexagonal and square-grid circle patterns: generate, verify, render, analyze"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a pattern and write it as a document
    Generate(GenerateArgs),
    /// Re-run residual and immersion checks on a document
    Verify(VerifyArgs),
    /// Export a document as SVG
    Render(RenderArgs),
    /// Boundary recurrences: Painleve trajectories, Riccati ratios, p0
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Crossratio,
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Ext,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Ext => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// exponent c in [0, 2]; ignored for z2 and log
    #[arg(long, default_value = "1")]
    pub c: String,
    /// a1,a2,a3 or a1,a2 or iso; entries may be decimals or pi fractions like 2pi/5
    #[arg(long, default_value = "iso")]
    pub alpha: String,
    /// taxicab depth of z; radius generation on the radius route; half-width for erf
    #[arg(long)]
    pub n: i64,
    #[arg(long, value_enum, default_value = "hex")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "crossratio")]
    pub route: Route,
    #[arg(long, value_enum, default_value = "double")]
    pub precision: PrecisionArg,
    /// factor applied to the seed r(1,0,-1) on the radius route
    #[arg(long, default_value = "1")]
    pub seed_scale: String,
    /// document path (JSON)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CheckName {
    Crossratio,
    Constraint,
    Laxzc,
    Kite,
    Positivity,
    Immersion,
    Radius,
    Sgresidual,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::Crossratio,
        CheckName::Constraint,
        CheckName::Laxzc,
        CheckName::Kite,
        CheckName::Positivity,
        CheckName::Immersion,
        CheckName::Radius,
        CheckName::Sgresidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::Crossratio => "crossratio",
            CheckName::Constraint => "constraint",
            CheckName::Laxzc => "laxzc",
            CheckName::Kite => "kite",
            CheckName::Positivity => "positivity",
            CheckName::Immersion => "immersion",
            CheckName::Radius => "radius",
            CheckName::Sgresidual => "sgresidual",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// comma-separated subset; default is every check the document supports
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<CheckName>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Show {
    Circles,
    Quads,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub show: Show,
    /// pixels per unit length
    #[arg(long, default_value_t = 40.0)]
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeKind {
    Painleve,
    Riccati,
    P0,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub kind: AnalyzeKind,
    /// exponent c
    #[arg(long)]
    pub c: String,
    /// boundary angle alpha3
    #[arg(long, default_value = "pi/3")]
    pub alpha: String,
    /// number of steps; 25 for painleve and 40 for riccati when omitted
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "ext")]
    pub precision: PrecisionArg,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Generate(a) => generate::cmd_generate(&a),
        Command::Verify(a) => verify::cmd_verify(&a),
        Command::Render(a) => render::cmd_render(&a),
        Command::Analyze(a) => analyze::cmd_analyze(&a),
    }
}

/// Runs the binary logic on an argument list, mapping clap failures to the
/// usage exit code. Returns (exit code, stdout, stderr).
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                (code, text, String::new())
            } else {
                (code, String::new(), text)
            }
        }
        Ok(cli) => match run(cli) {
            Ok(o) => (o.code, o.stdout, String::new()),
            Err(e) => (e.code, String::new(), format!("error: {}\n", e.message)),
        },
    }
}

/// Parses a decimal or a multiple of pi: `pi`, `pi/3`, `2pi/5`, `2*pi/5`.
pub fn parse_angle<R: Real>(s: &str) -> Result<R, CliError> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let err = || CliError::usage(format!("cannot parse angle {s:?}"));
    let Some(pos) = t.find("pi") else {
        return R::parse_decimal(&t).ok_or_else(err);
    };
    let head = t[..pos].trim_end_matches('*');
    let tail = &t[pos + 2..];
    let num = if head.is_empty() {
        R::one()
    } else {
        R::parse_decimal(head).ok_or_else(err)?
    };
    let den = match tail.strip_prefix('/') {
        Some(d) => R::parse_decimal(d).ok_or_else(err)?,
        None if tail.is_empty() => R::one(),
        None => return Err(err()),
    };
    if den.is_zero() {
        return Err(err());
    }
    Ok(R::pi() * num / den)
}

pub fn parse_real<R: Real>(s: &str, what: &str) -> Result<R, CliError> {
    R::parse_decimal(s).ok_or_else(|| CliError::usage(format!("cannot parse {what} {s:?}")))
}

/// `iso`, `a1,a2`, or `a1,a2,a3`.
pub fn parse_alpha<R: Real>(s: &str) -> Result<[R; 3], CliError> {
    if s.trim().eq_ignore_ascii_case("iso") {
        let a = R::pi() / R::from_i64(3);
        return Ok([a.clone(), a.clone(), a]);
    }
    let parts: Vec<R> = s.split(',').map(parse_angle).collect::<Result<_, _>>()?;
    match parts.len() {
        2 => {
            let a3 = R::pi() - parts[0].clone() - parts[1].clone();
            Ok([parts[0].clone(), parts[1].clone(), a3])
        }
        3 => Ok([parts[0].clone(), parts[1].clone(), parts[2].clone()]),
        _ => Err(CliError::usage(format!(
            "expected two or three angles in {s:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_angle::<f64>("pi/3").unwrap(), pi / 3.0);
        assert!((parse_angle::<f64>("2pi/5").unwrap() - 0.4 * pi).abs() < 1e-15);
        assert!((parse_angle::<f64>("2*pi/5").unwrap() - 0.4 * pi).abs() < 1e-15);
        assert_eq!(parse_angle::<f64>("0.875").unwrap(), 0.875);
        assert!(parse_angle::<f64>("pi/").is_err());
        assert!(parse_angle::<f64>("pi/0").is_err());
        let a = parse_alpha::<f64>("pi/4,pi/4").unwrap();
        assert!((a[2] - pi / 2.0).abs() < 1e-15);
        assert!(parse_alpha::<f64>("1").is_err());
    }

    #[test]
    fn error_codes() {
        let e: CliError = circlepat_core::Error::InvalidParams("x".into()).into();
        assert_eq!(e.code, EXIT_USAGE);
        let e: CliError = circlepat_core::Error::NotAKite.into();
        assert_eq!(e.code, EXIT_MATH);
    }
}
