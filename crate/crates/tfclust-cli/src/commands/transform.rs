use std::path::Path;

use serde_json::Value;
use tfclust_core::scattering::ScatteringConfig;
use tfclust_core::signals::FeatureMatrix;

use crate::cli::Resolver;
use crate::commands::pipeline::{self, echo};
use crate::io::{self, FeatureDoc};
use crate::Failure;

pub fn execute(r: &Resolver) -> Result<(), Failure> {
    let in_path = r.require_string("in")?;
    let method = r.enum_string("method", &["raw", "dwt", "scattering"])?;
    let out = r.out_or("features.json")?;
    let (dataset, _meta) = io::load_dataset(Path::new(&in_path))?;

    let (matrix, config) = match method.as_str() {
        "raw" => {
            let matrix =
                FeatureMatrix::from_rows(&dataset.instances, String::from("raw"), None)?;
            let config = echo(&[("method", Value::from("raw")), ("in", Value::from(in_path.as_str()))]);
            (matrix, config)
        }
        "dwt" => {
            if dataset.g != 1 {
                return Err(Failure::validation(
                    "the dwt transform expects univariate data (g = 1)".to_string(),
                ));
            }
            let wavelet = r.enum_string("wavelet", &["haar", "sym8"])?;
            let kind = pipeline::wavelet_from_name(&wavelet)?;
            let (matrix, padded) = pipeline::dwt_features(&dataset.instances, dataset.t, kind)?;
            let config = echo(&[
                ("method", Value::from("dwt")),
                ("wavelet", Value::from(wavelet.as_str())),
                ("in", Value::from(in_path.as_str())),
                ("padded_t", Value::from(padded as u64)),
            ]);
            (matrix, config)
        }
        _ => {
            if dataset.g != 1 {
                return Err(Failure::validation(
                    "the scattering transform expects univariate data (g = 1)".to_string(),
                ));
            }
            let layers = r.usize("layers")?;
            if layers > 2 {
                return Err(Failure::validation(
                    "--layers above 2 is not wired to flags; only --a1/--a2 exist".to_string(),
                ));
            }
            let a1 = r.f64("a1")?;
            let a2 = r.f64("a2")?;
            let t_scat = r.usize("t-scat")?;
            let dilations: Vec<f64> = [a1, a2][..layers].to_vec();
            let config = ScatteringConfig::new(dilations, t_scat)?;
            let output = pipeline::scattering_features(&dataset.instances, dataset.t, &config)?;
            let doc_config = echo(&[
                ("method", Value::from("scattering")),
                ("layers", Value::from(layers as u64)),
                ("a1", io::jnum(a1)),
                ("a2", io::jnum(a2)),
                ("t-scat", Value::from(t_scat as u64)),
                ("in", Value::from(in_path.as_str())),
                ("padded_t", Value::from(output.padded_len as u64)),
                (
                    "paths",
                    Value::Array(
                        output.path_labels.iter().map(|l| Value::from(l.as_str())).collect(),
                    ),
                ),
                ("samples_per_path", Value::from(output.samples_per_path as u64)),
            ]);
            (output.matrix, doc_config)
        }
    };

    let (n, p, tag) = (matrix.n, matrix.p, matrix.transform_tag.clone());
    let doc = FeatureDoc { matrix, g: dataset.g, t: dataset.t, config };
    io::write_feature_doc(Path::new(&out), &doc)?;
    println!("wrote {out}: {n} x {p} features, transform = {tag}");
    Ok(())
}
