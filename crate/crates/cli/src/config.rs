use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qtree::{GraphParams, Potential, RootCondition};
use serde::Serialize;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<qtree::Error> for CliError {
    fn from(e: qtree::Error) -> Self {
        use qtree::Error as E;
        match e {
            E::InvalidPotential(_)
            | E::InvalidParams(_)
            | E::Precondition(_)
            | E::SizeCap { .. }
            | E::Io(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Root {
    Robin,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Number of levels.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Branching factor.
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    /// Robin parameter.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Root::Robin)]
    pub root: Root,
    /// `zero`, `step:V`, `@file.json` or inline JSON.
    #[arg(long, default_value = "zero")]
    pub q: String,
}

impl GraphArgs {
    pub fn params(&self) -> CliResult<GraphParams> {
        let rc = match self.root {
            Root::Robin => RootCondition::Robin,
            Root::Dirichlet => RootCondition::Dirichlet,
        };
        Ok(GraphParams::new(self.n, self.b, self.alpha, rc)?)
    }

    pub fn potential(&self) -> CliResult<Potential> {
        parse_potential(&self.q)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn writer(&self) -> CliResult<Box<dyn Write>> {
        open_output(self.out.as_ref())
    }
}

pub fn open_output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::Config(format!("{}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn parse_potential(src: &str) -> CliResult<Potential> {
    let s = src.trim();
    if s.eq_ignore_ascii_case("zero") {
        return Ok(Potential::zero());
    }
    if let Some(v) = s.strip_prefix("step:") {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Config(format!("bad step height in '{s}'")))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!(
                "step height must be finite, got {v}"
            )));
        }
        return Ok(Potential::centered_step(v));
    }
    let text = match s.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?
        }
        None => s.to_string(),
    };
    Potential::from_json(&text).map_err(|e| CliError::Config(format!("potential: {e}")))
}

/// Provenance block embedded in every JSON artifact.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, A: Serialize> {
    pub command: &'a str,
    pub options: &'a A,
    pub potential: Option<&'a Potential>,
    pub version: &'static str,
}

impl<'a, A: Serialize> RunConfig<'a, A> {
    pub fn new(command: &'a str, options: &'a A, potential: Option<&'a Potential>) -> Self {
        RunConfig {
            command,
            options,
            potential,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_sources() {
        assert!(parse_potential("zero").unwrap().is_zero());
        assert_eq!(
            parse_potential("step:-16").unwrap(),
            Potential::centered_step(-16.0)
        );
        let p = Potential::centered_step(3.0);
        assert_eq!(parse_potential(&p.to_json()).unwrap(), p);
        assert!(matches!(
            parse_potential("step:x"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse_potential("@/nonexistent/q.json"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse_potential("{\"kind\": 1}"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn error_classes() {
        let e: CliError = qtree::Error::InvalidParams("x".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = qtree::Error::RootSearch("x".into()).into();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 1);
    }
}
