use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use crate::config::FileConfig;
use crate::{commands, Failure};

pub fn build_command() -> Command {
    let seed = Arg::new("seed")
        .long("seed")
        .global(true)
        .value_parser(value_parser!(u64))
        .default_value("0")
        .help("RNG seed; every command is deterministic given it");
    let workers = Arg::new("workers")
        .long("workers")
        .global(true)
        .value_parser(value_parser!(usize))
        .default_value("1")
        .help("Worker threads for bench cells; never changes results");
    let out = Arg::new("out")
        .long("out")
        .global(true)
        .help("Output path (file, prefix, or directory depending on the command)");
    let config = Arg::new("config")
        .long("config")
        .global(true)
        .help("TOML file supplying flag values; explicit flags win");

    Command::new("tfclust")
        .about("Sparse and group-sparse K-means on wavelet and scattering features")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(seed)
        .arg(workers)
        .arg(out)
        .arg(config)
        .subcommand(
            Command::new("simulate")
                .about("Generate a benchmark dataset (CSV + labels + metadata)")
                .arg(
                    Arg::new("bench")
                        .long("bench")
                        .value_parser(["univariate", "multivariate"])
                        .help("Benchmark family"),
                )
                .arg(
                    Arg::new("n-per-cluster")
                        .long("n-per-cluster")
                        .value_parser(value_parser!(usize))
                        .help("Instances per cluster"),
                )
                .arg(
                    Arg::new("sigma")
                        .long("sigma")
                        .value_parser(value_parser!(f64))
                        .help("Noise standard deviation (default 2.75 univariate, 1.75 multivariate)"),
                ),
        )
        .subcommand(
            Command::new("transform")
                .about("Turn a signal CSV into a feature matrix document")
                .arg(Arg::new("in").long("in").help("Input signal CSV"))
                .arg(
                    Arg::new("method")
                        .long("method")
                        .value_parser(["raw", "dwt", "scattering"])
                        .help("Feature transform"),
                )
                .arg(
                    Arg::new("wavelet")
                        .long("wavelet")
                        .value_parser(["haar", "sym8"])
                        .default_value("sym8"),
                )
                .arg(
                    Arg::new("layers")
                        .long("layers")
                        .value_parser(value_parser!(usize))
                        .default_value("2")
                        .help("Scattering cascade depth"),
                )
                .arg(
                    Arg::new("a1")
                        .long("a1")
                        .value_parser(value_parser!(f64))
                        .default_value("1.4142135623730951")
                        .help("First-layer dilation factor"),
                )
                .arg(
                    Arg::new("a2")
                        .long("a2")
                        .value_parser(value_parser!(f64))
                        .default_value("2")
                        .help("Second-layer dilation factor"),
                )
                .arg(
                    Arg::new("t-scat")
                        .long("t-scat")
                        .value_parser(value_parser!(usize))
                        .default_value("32")
                        .help("Averaging window / subsampling resolution"),
                ),
        )
        .subcommand(
            Command::new("cluster")
                .about("Cluster a feature matrix document")
                .arg(Arg::new("in").long("in").help("Input feature document"))
                .arg(
                    Arg::new("method")
                        .long("method")
                        .value_parser(["kmeans", "sparse", "group-sparse"]),
                )
                .arg(Arg::new("k").long("k").value_parser(value_parser!(usize)).help("Clusters"))
                .arg(
                    Arg::new("s")
                        .long("s")
                        .default_value("auto")
                        .help("Sparsity budget: a number or \"auto\" (permutation gap)"),
                )
                .arg(
                    Arg::new("groups")
                        .long("groups")
                        .value_parser([
                            "none",
                            "embedded",
                            "wavelet-scales",
                            "multivariate",
                            "scattering-paths",
                        ])
                        .default_value("embedded")
                        .help("Group structure for group-sparse"),
                )
                .arg(
                    Arg::new("restarts")
                        .long("restarts")
                        .value_parser(value_parser!(usize))
                        .default_value("10"),
                )
                .arg(
                    Arg::new("max-iters")
                        .long("max-iters")
                        .value_parser(value_parser!(usize))
                        .default_value("15"),
                )
                .arg(
                    Arg::new("tol")
                        .long("tol")
                        .value_parser(value_parser!(f64))
                        .default_value("0.0001"),
                )
                .arg(
                    Arg::new("permutations")
                        .long("permutations")
                        .value_parser(value_parser!(usize))
                        .default_value("10")
                        .help("Permutation count for --s auto"),
                )
                .arg(
                    Arg::new("s-grid-size")
                        .long("s-grid-size")
                        .value_parser(value_parser!(usize))
                        .default_value("8")
                        .help("Grid size for --s auto"),
                )
                .arg(
                    Arg::new("refit-threshold")
                        .long("refit-threshold")
                        .value_parser(value_parser!(f64))
                        .help("Refit plain K-means on features with weight above this"),
                ),
        )
        .subcommand(
            Command::new("evaluate")
                .about("Adjusted Rand index of predictions against truth labels")
                .arg(Arg::new("truth").long("truth").help("Truth labels (CSV or result document)"))
                .arg(
                    Arg::new("pred")
                        .num_args(1..)
                        .help("Prediction files (CSV labels or result documents)"),
                ),
        )
        .subcommand(
            Command::new("bench")
                .about("Replicated simulate-transform-cluster-evaluate benchmark")
                .arg(
                    Arg::new("bench")
                        .long("bench")
                        .value_parser(["univariate", "multivariate"]),
                )
                .arg(
                    Arg::new("methods")
                        .long("methods")
                        .default_value("kmeans,sparse,group-sparse")
                        .help("Comma-separated method list"),
                )
                .arg(
                    Arg::new("n-grid")
                        .long("n-grid")
                        .default_value("5,10,30")
                        .help("Comma-separated n-per-cluster values"),
                )
                .arg(
                    Arg::new("replicates")
                        .long("replicates")
                        .value_parser(value_parser!(usize))
                        .default_value("20"),
                )
                .arg(Arg::new("sigma").long("sigma").value_parser(value_parser!(f64)))
                .arg(
                    Arg::new("wavelet")
                        .long("wavelet")
                        .value_parser(["haar", "sym8"])
                        .default_value("sym8"),
                )
                .arg(
                    Arg::new("restarts")
                        .long("restarts")
                        .value_parser(value_parser!(usize))
                        .default_value("10"),
                )
                .arg(
                    Arg::new("max-iters")
                        .long("max-iters")
                        .value_parser(value_parser!(usize))
                        .default_value("15"),
                )
                .arg(
                    Arg::new("tol")
                        .long("tol")
                        .value_parser(value_parser!(f64))
                        .default_value("0.0001"),
                )
                .arg(
                    Arg::new("permutations")
                        .long("permutations")
                        .value_parser(value_parser!(usize))
                        .default_value("10"),
                )
                .arg(
                    Arg::new("s-grid-size")
                        .long("s-grid-size")
                        .value_parser(value_parser!(usize))
                        .default_value("8"),
                )
                .arg(
                    Arg::new("svg")
                        .long("svg")
                        .action(ArgAction::SetTrue)
                        .help("Also render the ARI curves as a static SVG"),
                ),
        )
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match build_command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&matches) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(matches: &ArgMatches) -> Result<(), Failure> {
    let (name, sub) = matches
        .subcommand()
        .expect("subcommand_required is set");
    let cfg = match sub.get_one::<String>("config") {
        Some(p) => FileConfig::load(Path::new(p))?,
        None => FileConfig::empty(),
    };
    cfg.check_keys(&known_keys(name))?;
    let r = Resolver { m: sub, cfg: &cfg };
    r.workers()?;
    match name {
        "simulate" => commands::simulate::execute(&r),
        "transform" => commands::transform::execute(&r),
        "cluster" => commands::cluster::execute(&r),
        "evaluate" => commands::evaluate::execute(&r),
        "bench" => commands::bench::execute(&r),
        other => Err(Failure::validation(format!("unknown subcommand {other}"))),
    }
}

fn known_keys(sub_name: &str) -> Vec<String> {
    let cmd = build_command();
    let sub = cmd
        .get_subcommands()
        .find(|c| c.get_name() == sub_name)
        .expect("dispatch matched this name");
    let mut keys: Vec<String> = sub.get_arguments().map(|a| a.get_id().to_string()).collect();
    for global in ["seed", "workers", "out"] {
        keys.push(global.to_string());
    }
    keys.retain(|k| k != "config");
    keys
}

/// Resolves each setting as: explicit command-line flag, then `--config`
/// file key, then the built-in default.
pub struct Resolver<'a> {
    m: &'a ArgMatches,
    cfg: &'a FileConfig,
}

impl<'a> Resolver<'a> {
    fn cli_explicit(&self, key: &str) -> bool {
        self.m.value_source(key) == Some(ValueSource::CommandLine)
    }

    pub fn f64(&self, key: &str) -> Result<f64, Failure> {
        self.opt_f64(key)?
            .ok_or_else(|| Failure::validation(format!("missing value for --{key}")))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        if self.cli_explicit(key) {
            return Ok(self.m.get_one::<f64>(key).copied());
        }
        if let Some(v) = self.cfg.f64(key)? {
            return Ok(Some(v));
        }
        Ok(self.m.get_one::<f64>(key).copied())
    }

    pub fn usize(&self, key: &str) -> Result<usize, Failure> {
        self.opt_usize(key)?
            .ok_or_else(|| Failure::validation(format!("missing value for --{key}")))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        if self.cli_explicit(key) {
            return Ok(self.m.get_one::<usize>(key).copied());
        }
        if let Some(v) = self.cfg.usize(key)? {
            return Ok(Some(v));
        }
        Ok(self.m.get_one::<usize>(key).copied())
    }

    pub fn u64(&self, key: &str) -> Result<u64, Failure> {
        if self.cli_explicit(key) {
            return Ok(*self.m.get_one::<u64>(key).expect("typed arg"));
        }
        if let Some(v) = self.cfg.u64(key)? {
            return Ok(v);
        }
        Ok(*self.m.get_one::<u64>(key).expect("arg has a default"))
    }

    pub fn opt_string(&self, key: &str) -> Result<Option<String>, Failure> {
        if self.cli_explicit(key) {
            return Ok(self.m.get_one::<String>(key).cloned());
        }
        if let Some(v) = self.cfg.string(key)? {
            return Ok(Some(v));
        }
        Ok(self.m.get_one::<String>(key).cloned())
    }

    /// A flag the command cannot run without; missing is a usage error.
    pub fn require_string(&self, key: &str) -> Result<String, Failure> {
        self.opt_string(key)?
            .ok_or_else(|| Failure::usage(format!("missing required flag --{key}")))
    }

    /// Required flag whose value must be one of `allowed` (config values
    /// bypass clap's own check, so revalidate here).
    pub fn enum_string(&self, key: &str, allowed: &[&str]) -> Result<String, Failure> {
        let v = self.require_string(key)?;
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Failure::validation(format!(
                "--{key} must be one of {allowed:?}, got \"{v}\""
            )))
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, Failure> {
        if self.cli_explicit(key) {
            return Ok(self.m.get_flag(key));
        }
        if let Some(v) = self.cfg.bool(key)? {
            return Ok(v);
        }
        Ok(false)
    }

    pub fn string_list(&self, key: &str) -> Result<Vec<String>, Failure> {
        if self.cli_explicit(key) {
            let raw = self.m.get_one::<String>(key).cloned().unwrap_or_default();
            return Ok(raw.split(',').map(|s| s.trim().to_string()).collect());
        }
        if let Some(v) = self.cfg.string_list(key)? {
            return Ok(v);
        }
        let raw = self.m.get_one::<String>(key).cloned().unwrap_or_default();
        Ok(raw.split(',').map(|s| s.trim().to_string()).collect())
    }

    /// Positional prediction files for `evaluate`.
    pub fn positionals(&self, key: &str) -> Result<Vec<String>, Failure> {
        if let Some(values) = self.m.get_many::<String>(key) {
            return Ok(values.cloned().collect());
        }
        if let Some(v) = self.cfg.string_list(key)? {
            return Ok(v);
        }
        Err(Failure::usage(format!("at least one {key} file is required")))
    }

    pub fn seed(&self) -> Result<u64, Failure> {
        self.u64("seed")
    }

    pub fn workers(&self) -> Result<usize, Failure> {
        let w = self.usize("workers")?;
        if w == 0 {
            return Err(Failure::validation("--workers must be at least 1".to_string()));
        }
        Ok(w)
    }

    pub fn out_or(&self, fallback: &str) -> Result<String, Failure> {
        Ok(self.opt_string("out")?.unwrap_or_else(|| fallback.to_string()))
    }
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        // Usage-class failures share clap's exit code.
        Failure::Usage(msg.into())
    }
}
