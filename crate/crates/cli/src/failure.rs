use std::fmt;

use shadow_geom::GeomError;

/// Conditions that stop a run before a report can be written.
#[derive(Debug)]
pub enum Failure {
    /// Malformed or out-of-range configuration or input files.
    Config(String),
    /// A module size guard or iteration cap was hit.
    Capacity(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Capacity(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Capacity(_) => "capacity",
            Failure::Io(_) => "io",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Capacity(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

/// Capacity errors abort the run; everything else is left to the caller.
pub fn escalate(e: GeomError) -> Result<GeomError, Failure> {
    if e.is_capacity() {
        Err(Failure::Capacity(e.to_string()))
    } else {
        Ok(e)
    }
}
