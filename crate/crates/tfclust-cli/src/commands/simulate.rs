use std::path::PathBuf;

use tfclust_core::simgen::{make_multivariate_benchmark, make_univariate_benchmark, SimConfig};

use crate::cli::Resolver;
use crate::io::{self, DatasetMeta};
use crate::Failure;

pub fn default_sigma(bench: &str) -> f64 {
    match bench {
        "multivariate" => 1.75,
        _ => 2.75,
    }
}

pub fn execute(r: &Resolver) -> Result<(), Failure> {
    let bench = r.enum_string("bench", &["univariate", "multivariate"])?;
    let n_per = r
        .opt_usize("n-per-cluster")?
        .ok_or_else(|| Failure::usage("missing required flag --n-per-cluster"))?;
    let sigma = r.opt_f64("sigma")?.unwrap_or_else(|| default_sigma(&bench));
    let seed = r.seed()?;
    let out = r.out_or("dataset")?;

    let config = SimConfig::new(n_per, sigma, seed)?;
    let dataset = match bench.as_str() {
        "univariate" => make_univariate_benchmark(&config)?,
        _ => make_multivariate_benchmark(&config)?,
    };

    let csv_path = PathBuf::from(format!("{out}.csv"));
    io::write_dataset_csv(&csv_path, &dataset)?;
    let meta = DatasetMeta {
        g: dataset.g,
        bench: Some(bench),
        sigma: Some(sigma),
        n_per_cluster: Some(n_per),
        seed: Some(seed),
    };
    io::write_dataset_meta(&io::meta_path(&csv_path), &dataset, &meta)?;
    let labels = dataset.labels.as_ref().expect("benchmarks are labeled");
    io::write_labels(&PathBuf::from(format!("{out}.labels.csv")), labels)?;

    println!(
        "wrote {out}.csv: n = {}, g = {}, t = {} (labels in {out}.labels.csv)",
        dataset.n(),
        dataset.g,
        dataset.t
    );
    Ok(())
}
