use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Io,
    Config,
    Numerical,
}

impl Kind {
    pub fn exit_code(self) -> ExitCode {
        ExitCode::from(match self {
            Kind::Io => 1,
            Kind::Config => 2,
            Kind::Numerical => 3,
        })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Config,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            Kind::Io => "i/o error",
            Kind::Config => "configuration error",
            Kind::Numerical => "numerical failure",
        };
        write!(f, "{label}: {:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags a library error with the failure class it belongs to.
pub trait Classify<T> {
    fn kind(self, kind: Kind) -> CliResult<T>;

    fn config(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.kind(Kind::Config)
    }

    fn numerical(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.kind(Kind::Numerical)
    }

    fn io(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.kind(Kind::Io)
    }
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn kind(self, kind: Kind) -> CliResult<T> {
        self.map_err(|e| CliError {
            kind,
            error: e.into(),
        })
    }
}
