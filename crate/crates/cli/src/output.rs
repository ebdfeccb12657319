use std::fmt;
use std::io::Write;
use std::path::Path;

use cayleylab::error::{CayleyError, GroupError, HyperbolicityError, ParseError, PingPongError, QiError, RelhypError, TreeGradedError};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
    Table,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Table => "table",
        })
    }
}

/// What a subcommand hands back: the primary text and whether the
/// mathematical verdict was a failure.
pub struct Report {
    pub text: String,
    pub failed: bool,
}

impl Report {
    pub fn ok(text: String) -> Self {
        Report { text, failed: false }
    }

    pub fn verdict(text: String, passed: bool) -> Self {
        Report { text, failed: !passed }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Module(cayleylab::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "USAGE",
            CliError::Io(_) => "IO",
            CliError::Module(e) => e.code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

macro_rules! from_module {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Module(e.into())
            }
        })*
    };
}

from_module!(
    cayleylab::Error,
    ParseError,
    GroupError,
    CayleyError,
    QiError,
    HyperbolicityError,
    RelhypError,
    TreeGradedError,
    PingPongError
);

pub type CliResult<T> = Result<T, CliError>;

pub fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("--format {format} is not available for `{command}`"))
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// Two aligned columns.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

pub fn write_primary(path: Option<&Path>, text: &str) -> CliResult<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Timestamped sidecar lines; never part of the primary output.
pub struct Log {
    file: Option<std::fs::File>,
}

impl Log {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        let file = path
            .map(|p| {
                std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(|e| CliError::Io(format!("cannot open log {}: {e}", p.display())))
            })
            .transpose()?;
        Ok(Log { file })
    }

    pub fn line(&mut self, msg: &str) {
        if let Some(f) = &mut self.file {
            let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
            let _ = writeln!(f, "{}.{:03} {msg}", now.as_secs(), now.subsec_millis());
        }
    }
}
