pub mod cli;
pub mod commands;
pub mod config;
pub mod io;
pub mod plot;

pub use cli::run;

/// A command failure carrying its exit-code class: usage problems (missing
/// required flags) exit 2 like clap's own parse errors, validation problems
/// (bad values, shape mismatches, infeasible parameters) exit 3, runtime
/// problems (I/O, failed bench cells) exit 4.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        Failure::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Runtime(m) => m,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for Failure {}

impl From<tfclust_core::Error> for Failure {
    fn from(e: tfclust_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}
