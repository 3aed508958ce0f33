use std::path::Path;

use serde_json::Value;
use tfclust_core::cluster::{kmeans, multivariate_groups, refit_on_selected};
use tfclust_core::dwt::wavelet_scale_groups;
use tfclust_core::signals::GroupPartition;

use crate::cli::Resolver;
use crate::commands::pipeline::{self, echo};
use crate::io::{self, FeatureDoc, GapDoc, RefitDoc, ResultDoc};
use crate::Failure;

fn parse_s(raw: &str) -> Result<Option<f64>, Failure> {
    if raw == "auto" {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| Failure::validation(format!("--s must be a number or \"auto\", got \"{raw}\"")))
}

fn resolve_groups(
    selector: &str,
    doc: &FeatureDoc,
) -> Result<Option<GroupPartition>, Failure> {
    match selector {
        "none" => Ok(None),
        "embedded" => Ok(doc.matrix.groups.clone()),
        "wavelet-scales" => Ok(Some(wavelet_scale_groups(doc.matrix.p)?)),
        "multivariate" => {
            if doc.g < 2 {
                return Err(Failure::validation(format!(
                    "multivariate groups need at least 2 slices per instance, this document has g = {}",
                    doc.g
                )));
            }
            if doc.g * doc.t != doc.matrix.p {
                return Err(Failure::validation(format!(
                    "multivariate groups need raw concatenated features: g*t = {} but p = {}",
                    doc.g * doc.t,
                    doc.matrix.p
                )));
            }
            Ok(Some(multivariate_groups(doc.g, doc.t)?))
        }
        "scattering-paths" => match &doc.matrix.groups {
            Some(groups) if doc.matrix.transform_tag.starts_with("scattering") => {
                Ok(Some(groups.clone()))
            }
            _ => Err(Failure::validation(
                "scattering-paths groups need a scattering feature document".to_string(),
            )),
        },
        other => Err(Failure::validation(format!("unknown group selector \"{other}\""))),
    }
}

pub fn execute(r: &Resolver) -> Result<(), Failure> {
    let in_path = r.require_string("in")?;
    let method = r.enum_string("method", &["kmeans", "sparse", "group-sparse"])?;
    let k = r
        .opt_usize("k")?
        .ok_or_else(|| Failure::usage("missing required flag --k"))?;
    let s = parse_s(&r.opt_string("s")?.unwrap_or_else(|| "auto".to_string()))?;
    let selector = r.enum_string(
        "groups",
        &["none", "embedded", "wavelet-scales", "multivariate", "scattering-paths"],
    )?;
    let restarts = r.usize("restarts")?;
    let max_iters = r.usize("max-iters")?;
    let tol = r.f64("tol")?;
    let permutations = r.usize("permutations")?;
    let s_grid_size = r.usize("s-grid-size")?;
    let refit_threshold = r.opt_f64("refit-threshold")?;
    let seed = r.seed()?;
    let out = r.out_or("result.json")?;

    let doc = io::read_feature_doc(Path::new(&in_path))?;
    let groups = resolve_groups(&selector, &doc)?;
    let x = &doc.matrix;

    let s_mode = if s.is_none() && method != "kmeans" { "auto" } else { "fixed" };
    let mut config_entries: Vec<(&str, Value)> = vec![
        ("in", Value::from(in_path.as_str())),
        ("method", Value::from(method.as_str())),
        ("k", Value::from(k as u64)),
        ("groups", Value::from(selector.as_str())),
        ("restarts", Value::from(restarts as u64)),
        ("seed", Value::from(seed)),
    ];

    let result = match method.as_str() {
        "kmeans" => {
            let assignment = kmeans(x, k, restarts, seed)?;
            ResultDoc {
                method,
                transform_tag: x.transform_tag.clone(),
                k,
                seed,
                s: None,
                labels: assignment.labels,
                weights: None,
                objective_trace: Vec::new(),
                iterations: 0,
                converged: true,
                gap: None,
                refit: None,
                config: Value::Null,
            }
        }
        _ => {
            let part = if method == "group-sparse" {
                Some(groups.ok_or_else(|| {
                    Failure::validation(
                        "group-sparse needs a group structure; pass --groups or use a feature \
                         document with embedded groups"
                            .to_string(),
                    )
                })?)
            } else {
                None
            };
            let run = pipeline::run_sparse(
                x,
                part.as_ref(),
                k,
                s,
                restarts,
                max_iters,
                tol,
                permutations,
                s_grid_size,
                seed,
            )?;
            if let Some(profile) = &run.profile {
                for skipped in &profile.skipped {
                    eprintln!("warning: skipped infeasible sparsity budget s = {skipped}");
                }
                if profile.no_structure {
                    eprintln!(
                        "warning: the winning gap is within two permutation standard deviations \
                         of zero; the data look unstructured"
                    );
                }
            }
            config_entries.push(("max-iters", Value::from(max_iters as u64)));
            config_entries.push(("tol", io::jnum(tol)));
            if s_mode == "auto" {
                config_entries.push(("permutations", Value::from(permutations as u64)));
                config_entries.push(("s-grid-size", Value::from(s_grid_size as u64)));
            }
            let result = run.result;
            let mut doc = ResultDoc {
                method,
                transform_tag: result.transform_tag.clone(),
                k,
                seed,
                s: Some(result.s),
                labels: result.assignment.labels.clone(),
                weights: Some(result.weights.values.clone()),
                objective_trace: result.objective_trace.clone(),
                iterations: result.iterations,
                converged: result.converged,
                gap: run.profile.map(|p| GapDoc {
                    grid: p.grid,
                    observed: p.observed,
                    perm_mean: p.perm_mean,
                    perm_std: p.perm_std,
                    gap: p.gap,
                    chosen_index: p.chosen_index,
                    chosen_s: p.chosen_s,
                    permutations: p.permutations,
                    no_structure: p.no_structure,
                    skipped: p.skipped,
                }),
                refit: None,
                config: Value::Null,
            };
            if let Some(threshold) = refit_threshold {
                let (assignment, selected) =
                    refit_on_selected(x, &result.weights.values, threshold, k, restarts, seed)?;
                doc.refit = Some(RefitDoc { threshold, selected, labels: assignment.labels });
                config_entries.push(("refit-threshold", io::jnum(threshold)));
            }
            doc
        }
    };

    config_entries.push(("s-mode", Value::from(s_mode)));
    if let Some(fixed) = s {
        config_entries.push(("s", io::jnum(fixed)));
    }
    let mut result = result;
    result.config = echo(&config_entries);

    io::write_result_doc(Path::new(&out), &result)?;
    match result.s {
        Some(s_val) => println!(
            "wrote {out}: method = {}, k = {k}, s = {s_val:.6}, iterations = {}, converged = {}",
            result.method, result.iterations, result.converged
        ),
        None => println!("wrote {out}: method = {}, k = {k}", result.method),
    }
    Ok(())
}
