use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};
use tfclust_core::cluster::{kmeans, multivariate_groups};
use tfclust_core::dwt::WaveletKind;
use tfclust_core::eval::adjusted_rand_index;
use tfclust_core::signals::{Dataset, FeatureMatrix, GroupPartition};
use tfclust_core::simgen::{make_multivariate_benchmark, make_univariate_benchmark, SimConfig};

use crate::cli::Resolver;
use crate::commands::pipeline;
use crate::commands::simulate::default_sigma;
use crate::io::{self, jnum};
use crate::plot;
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Kmeans,
    Sparse,
    GroupSparse,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Kmeans => "kmeans",
            Method::Sparse => "sparse",
            Method::GroupSparse => "group-sparse",
        }
    }

    fn from_name(name: &str) -> Result<Self, Failure> {
        match name {
            "kmeans" => Ok(Method::Kmeans),
            "sparse" => Ok(Method::Sparse),
            "group-sparse" => Ok(Method::GroupSparse),
            other => Err(Failure::validation(format!("unknown bench method \"{other}\""))),
        }
    }
}

struct BenchCtx {
    univariate: bool,
    sigma: f64,
    wavelet: WaveletKind,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    permutations: usize,
    s_grid_size: usize,
    seed: u64,
}

struct CellSpec {
    method: Method,
    n_idx: usize,
    n_per: usize,
    rep: usize,
}

struct CellOutcome {
    method: &'static str,
    n_per: usize,
    rep: usize,
    ari: Option<f64>,
    error: Option<String>,
    chosen_s: Option<f64>,
    no_structure: bool,
    max_trace_decrease: f64,
}

/// All methods at a given (n-grid index, replicate) see the same simulated
/// dataset and the same fitting seed, so comparisons are paired and the
/// outcome is independent of scheduling.
fn cell_seeds(ctx: &BenchCtx, n_idx: usize, rep: usize) -> (u64, u64) {
    let mut stream =
        tfclust_core::rng::stream(ctx.seed, &[tfclust_core::rng::CELL, n_idx as u64, rep as u64]);
    (stream.gen(), stream.gen())
}

fn features_for(
    method: Method,
    ctx: &BenchCtx,
    dataset: &Dataset,
) -> Result<(FeatureMatrix, Option<GroupPartition>), Failure> {
    if ctx.univariate {
        match method {
            Method::Kmeans => Ok((
                FeatureMatrix::from_rows(&dataset.instances, String::from("raw"), None)?,
                None,
            )),
            Method::Sparse => {
                let (x, _) = pipeline::dwt_features(&dataset.instances, dataset.t, ctx.wavelet)?;
                Ok((x, None))
            }
            Method::GroupSparse => {
                let (x, _) = pipeline::dwt_features(&dataset.instances, dataset.t, ctx.wavelet)?;
                let groups = x.groups.clone();
                Ok((x, groups))
            }
        }
    } else {
        let x = FeatureMatrix::from_rows(&dataset.instances, String::from("raw"), None)?;
        match method {
            Method::GroupSparse => {
                let groups = multivariate_groups(dataset.g, dataset.t)?;
                Ok((x, Some(groups)))
            }
            _ => Ok((x, None)),
        }
    }
}

fn try_cell(spec: &CellSpec, ctx: &BenchCtx) -> Result<CellOutcome, Failure> {
    let (data_seed, fit_seed) = cell_seeds(ctx, spec.n_idx, spec.rep);
    let sim = SimConfig::new(spec.n_per, ctx.sigma, data_seed)?;
    let dataset = if ctx.univariate {
        make_univariate_benchmark(&sim)?
    } else {
        make_multivariate_benchmark(&sim)?
    };
    let truth = dataset.labels.clone().expect("benchmarks are labeled");
    let k = truth.iter().copied().max().unwrap_or(0) + 1;
    let (x, groups) = features_for(spec.method, ctx, &dataset)?;

    let (labels, chosen_s, no_structure, max_decrease) = match spec.method {
        Method::Kmeans => {
            let assignment = kmeans(&x, k, ctx.restarts, fit_seed)?;
            (assignment.labels, None, false, 0.0)
        }
        _ => {
            let run = pipeline::run_sparse(
                &x,
                groups.as_ref(),
                k,
                None,
                ctx.restarts,
                ctx.max_iters,
                ctx.tol,
                ctx.permutations,
                ctx.s_grid_size,
                fit_seed,
            )?;
            let profile = run.profile.expect("auto mode always yields a profile");
            (
                run.result.assignment.labels,
                Some(profile.chosen_s),
                profile.no_structure,
                pipeline::max_trace_decrease(&run.result.objective_trace),
            )
        }
    };
    let ari = adjusted_rand_index(&truth, &labels)?.value;
    Ok(CellOutcome {
        method: spec.method.name(),
        n_per: spec.n_per,
        rep: spec.rep,
        ari: Some(ari),
        error: None,
        chosen_s,
        no_structure,
        max_trace_decrease: max_decrease,
    })
}

fn run_cell(spec: &CellSpec, ctx: &BenchCtx) -> CellOutcome {
    match try_cell(spec, ctx) {
        Ok(outcome) => outcome,
        Err(f) => CellOutcome {
            method: spec.method.name(),
            n_per: spec.n_per,
            rep: spec.rep,
            ari: None,
            error: Some(f.message().to_string()),
            chosen_s: None,
            no_structure: false,
            max_trace_decrease: 0.0,
        },
    }
}

struct Aggregate {
    method: &'static str,
    n_per: usize,
    ok: usize,
    failures: usize,
    mean_ari: Option<f64>,
    sd_ari: Option<f64>,
}

fn aggregate(outcomes: &[CellOutcome], methods: &[Method], n_grid: &[usize]) -> Vec<Aggregate> {
    let mut rows = Vec::new();
    for method in methods {
        for &n_per in n_grid {
            let aris: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.method == method.name() && o.n_per == n_per)
                .filter_map(|o| o.ari)
                .collect();
            let failures = outcomes
                .iter()
                .filter(|o| o.method == method.name() && o.n_per == n_per && o.error.is_some())
                .count();
            let mean = if aris.is_empty() {
                None
            } else {
                Some(aris.iter().sum::<f64>() / aris.len() as f64)
            };
            let sd = match (mean, aris.len()) {
                (Some(m), len) if len >= 2 => Some(
                    (aris.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (len - 1) as f64)
                        .sqrt(),
                ),
                _ => None,
            };
            rows.push(Aggregate {
                method: method.name(),
                n_per,
                ok: aris.len(),
                failures,
                mean_ari: mean,
                sd_ari: sd,
            });
        }
    }
    rows
}

pub fn execute(r: &Resolver) -> Result<(), Failure> {
    let bench = r.enum_string("bench", &["univariate", "multivariate"])?;
    let methods: Vec<Method> = r
        .string_list("methods")?
        .iter()
        .map(|name| Method::from_name(name))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(Failure::validation("--methods must name at least one method".to_string()));
    }
    let n_grid: Vec<usize> = r
        .string_list("n-grid")?
        .iter()
        .map(|v| {
            v.parse::<usize>().map_err(|_| {
                Failure::validation(format!("--n-grid entries must be integers, got \"{v}\""))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if n_grid.is_empty() || n_grid.iter().any(|&n| n == 0) {
        return Err(Failure::validation("--n-grid needs positive entries".to_string()));
    }
    let replicates = r.usize("replicates")?;
    if replicates == 0 {
        return Err(Failure::validation("--replicates must be at least 1".to_string()));
    }
    let sigma = r.opt_f64("sigma")?.unwrap_or_else(|| default_sigma(&bench));
    let wavelet_name = r.enum_string("wavelet", &["haar", "sym8"])?;
    let ctx = BenchCtx {
        univariate: bench == "univariate",
        sigma,
        wavelet: pipeline::wavelet_from_name(&wavelet_name)?,
        restarts: r.usize("restarts")?,
        max_iters: r.usize("max-iters")?,
        tol: r.f64("tol")?,
        permutations: r.usize("permutations")?,
        s_grid_size: r.usize("s-grid-size")?,
        seed: r.seed()?,
    };
    let workers = r.workers()?;
    let svg = r.flag("svg")?;
    let out_dir = PathBuf::from(r.out_or("bench-out")?);
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::runtime(format!("{}: {e}", out_dir.display())))?;

    let mut cells = Vec::new();
    for &method in &methods {
        for (n_idx, &n_per) in n_grid.iter().enumerate() {
            for rep in 0..replicates {
                cells.push(CellSpec { method, n_idx, n_per, rep });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::runtime(format!("worker pool: {e}")))?;
    let outcomes: Vec<CellOutcome> =
        pool.install(|| cells.par_iter().map(|spec| run_cell(spec, &ctx)).collect());

    let aggregates = aggregate(&outcomes, &methods, &n_grid);
    let failures: usize = aggregates.iter().map(|a| a.failures).sum();
    let max_decrease = outcomes.iter().map(|o| o.max_trace_decrease).fold(0.0, f64::max);

    write_plot_csv(&out_dir.join("plot_data.csv"), &aggregates, replicates)?;
    let summary = render_summary(&bench, sigma, replicates, ctx.seed, &methods, &n_grid, &aggregates, failures, max_decrease);
    io::write_string(&out_dir.join("summary.txt"), &summary)?;
    write_bench_json(
        &out_dir.join("bench.json"),
        &bench,
        sigma,
        &wavelet_name,
        replicates,
        &ctx,
        &methods,
        &n_grid,
        svg,
        &outcomes,
        &aggregates,
        max_decrease,
    )?;
    if svg {
        let series: Vec<plot::Series> = methods
            .iter()
            .map(|m| plot::Series {
                name: m.name().to_string(),
                points: aggregates
                    .iter()
                    .filter(|a| a.method == m.name())
                    .filter_map(|a| a.mean_ari.map(|mean| (a.n_per as f64, mean)))
                    .collect(),
            })
            .collect();
        let subtitle = format!("{bench}, sigma = {sigma}, {replicates} replicates");
        io::write_string(&out_dir.join("plot.svg"), &plot::render_ari_curves(&series, &subtitle))?;
    }

    print!("{summary}");
    if failures > 0 {
        return Err(Failure::runtime(format!(
            "{failures} of {} bench cells failed; see {}",
            cells.len(),
            out_dir.join("bench.json").display()
        )));
    }
    Ok(())
}

fn write_plot_csv(path: &Path, aggregates: &[Aggregate], replicates: usize) -> Result<(), Failure> {
    let mut out = String::from("method,n_per_cluster,mean_ari,sd_ari,replicates,failures\n");
    for a in aggregates {
        let mean = a.mean_ari.map(|m| format!("{m:.9}")).unwrap_or_else(|| "NA".to_string());
        let sd = a.sd_ari.map(|s| format!("{s:.9}")).unwrap_or_else(|| "NA".to_string());
        let _ = writeln!(out, "{},{},{mean},{sd},{replicates},{}", a.method, a.n_per, a.failures);
    }
    io::write_string(path, &out)
}

#[allow(clippy::too_many_arguments)]
fn render_summary(
    bench: &str,
    sigma: f64,
    replicates: usize,
    seed: u64,
    methods: &[Method],
    n_grid: &[usize],
    aggregates: &[Aggregate],
    failures: usize,
    max_decrease: f64,
) -> String {
    let mut out = format!(
        "benchmark: {bench} (sigma = {sigma}, replicates = {replicates}, seed = {seed})\n"
    );
    let name_width = methods.iter().map(|m| m.name().len()).max().unwrap_or(6).max(6);
    let _ = write!(out, "{:<name_width$}", "method");
    for n in n_grid {
        let _ = write!(out, "  {:>8}", format!("n={n}"));
    }
    out.push('\n');
    for method in methods {
        let _ = write!(out, "{:<name_width$}", method.name());
        for &n in n_grid {
            let cell = aggregates
                .iter()
                .find(|a| a.method == method.name() && a.n_per == n)
                .and_then(|a| a.mean_ari)
                .map(|m| format!("{m:.3}"))
                .unwrap_or_else(|| "--".to_string());
            let _ = write!(out, "  {cell:>8}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "failed cells: {failures}");
    let _ = writeln!(out, "max objective-trace decrease: {}", io::fmt_f64(max_decrease));
    out
}

#[allow(clippy::too_many_arguments)]
fn write_bench_json(
    path: &Path,
    bench: &str,
    sigma: f64,
    wavelet: &str,
    replicates: usize,
    ctx: &BenchCtx,
    methods: &[Method],
    n_grid: &[usize],
    svg: bool,
    outcomes: &[CellOutcome],
    aggregates: &[Aggregate],
    max_decrease: f64,
) -> Result<(), Failure> {
    let mut config = Map::new();
    config.insert("bench".into(), Value::from(bench));
    config.insert(
        "methods".into(),
        Value::Array(methods.iter().map(|m| Value::from(m.name())).collect()),
    );
    config.insert(
        "n-grid".into(),
        Value::Array(n_grid.iter().map(|&n| Value::from(n as u64)).collect()),
    );
    config.insert("replicates".into(), Value::from(replicates as u64));
    config.insert("sigma".into(), jnum(sigma));
    config.insert("wavelet".into(), Value::from(wavelet));
    config.insert("restarts".into(), Value::from(ctx.restarts as u64));
    config.insert("max-iters".into(), Value::from(ctx.max_iters as u64));
    config.insert("tol".into(), jnum(ctx.tol));
    config.insert("permutations".into(), Value::from(ctx.permutations as u64));
    config.insert("s-grid-size".into(), Value::from(ctx.s_grid_size as u64));
    config.insert("seed".into(), Value::from(ctx.seed));
    config.insert("svg".into(), Value::from(svg));

    let cells: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut cell = Map::new();
            cell.insert("method".into(), Value::from(o.method));
            cell.insert("n_per_cluster".into(), Value::from(o.n_per as u64));
            cell.insert("replicate".into(), Value::from(o.rep as u64));
            cell.insert("ari".into(), o.ari.map(jnum).unwrap_or(Value::Null));
            cell.insert(
                "error".into(),
                o.error.as_deref().map(Value::from).unwrap_or(Value::Null),
            );
            cell.insert("chosen_s".into(), o.chosen_s.map(jnum).unwrap_or(Value::Null));
            cell.insert("no_structure".into(), Value::from(o.no_structure));
            cell.insert("max_trace_decrease".into(), jnum(o.max_trace_decrease));
            Value::Object(cell)
        })
        .collect();

    let aggregate_rows: Vec<Value> = aggregates
        .iter()
        .map(|a| {
            let mut row = Map::new();
            row.insert("method".into(), Value::from(a.method));
            row.insert("n_per_cluster".into(), Value::from(a.n_per as u64));
            row.insert("ok".into(), Value::from(a.ok as u64));
            row.insert("failures".into(), Value::from(a.failures as u64));
            row.insert("mean_ari".into(), a.mean_ari.map(jnum).unwrap_or(Value::Null));
            row.insert("sd_ari".into(), a.sd_ari.map(jnum).unwrap_or(Value::Null));
            Value::Object(row)
        })
        .collect();

    let mut root = Map::new();
    root.insert("schema_version".into(), Value::from(1));
    root.insert("kind".into(), Value::from("bench"));
    root.insert("config".into(), Value::Object(config));
    root.insert("cells".into(), Value::Array(cells));
    root.insert("aggregates".into(), Value::Array(aggregate_rows));
    root.insert("max_trace_decrease".into(), jnum(max_decrease));
    io::write_json(path, &Value::Object(root))
}
