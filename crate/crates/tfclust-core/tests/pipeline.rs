use tfclust_core::cluster::{multivariate_groups, refit_on_selected, sparse_kmeans, SparseConfig};
use tfclust_core::dwt::{dwt_forward, WaveletFilter, WaveletKind};
use tfclust_core::eval::adjusted_rand_index;
use tfclust_core::scattering::{build_filter_bank, scatter, scattering_groups, ScatteringConfig};
use tfclust_core::signals::FeatureMatrix;
use tfclust_core::simgen::{make_multivariate_benchmark, make_univariate_benchmark, SimConfig};

fn wavelet_features(instances: &[Vec<f64>], kind: WaveletKind) -> FeatureMatrix {
    let filter = WaveletFilter::new(kind);
    let rows: Vec<Vec<f64>> = instances
        .iter()
        .map(|x| dwt_forward(x, &filter).unwrap().values)
        .collect();
    FeatureMatrix::from_rows(&rows, format!("dwt-{}", kind.name()), None).unwrap()
}

#[test]
fn univariate_wavelet_pipeline_recovers_the_six_shapes() {
    let config = SimConfig::new(4, 0.1, 71).unwrap();
    let data = make_univariate_benchmark(&config).unwrap();
    let truth = data.labels.clone().unwrap();
    assert_eq!(data.n(), 24);
    assert_eq!(data.t, 512);

    let x = wavelet_features(&data.instances, WaveletKind::Sym8);
    let cfg = SparseConfig { restarts: 6, ..SparseConfig::new(6, 8.0, 7) };
    let run = sparse_kmeans(&x, None, &cfg).unwrap();
    let score = adjusted_rand_index(&truth, &run.assignment.labels).unwrap();
    assert!(score.value > 0.85, "ari {}", score.value);

    // The selected features support a refit that does no worse.
    let (refit, kept) = refit_on_selected(&x, &run.weights.values, 1e-4, 6, 6, 7).unwrap();
    assert!(!kept.is_empty() && kept.len() < x.p);
    let refit_score = adjusted_rand_index(&truth, &refit.labels).unwrap();
    assert!(refit_score.value > 0.85, "refit ari {}", refit_score.value);
}

#[test]
fn multivariate_pipeline_with_per_time_groups() {
    let config = SimConfig::new(4, 0.1, 72).unwrap();
    let data = make_multivariate_benchmark(&config).unwrap();
    let truth = data.labels.clone().unwrap();
    assert_eq!(data.g, 3);
    assert_eq!(data.t, 256);

    let rows: Vec<Vec<f64>> = data.instances.clone();
    let groups = multivariate_groups(data.g, data.t).unwrap();
    let x = FeatureMatrix::from_rows(&rows, String::from("raw"), Some(groups.clone())).unwrap();
    let cfg = SparseConfig { restarts: 6, ..SparseConfig::new(5, 6.0, 9) };
    let run = sparse_kmeans(&x, Some(&groups), &cfg).unwrap();
    let score = adjusted_rand_index(&truth, &run.assignment.labels).unwrap();
    assert!(score.value > 0.8, "ari {}", score.value);
}

#[test]
fn scattering_pipeline_separates_smooth_from_bumpy() {
    use tfclust_core::simgen::{donoho_curve, CurveKind};
    let t = 256;
    let config = ScatteringConfig::default();
    let bank = build_filter_bank(t, &config).unwrap();
    let heavisine = donoho_curve(CurveKind::Heavisine, t).unwrap();
    let bumps = donoho_curve(CurveKind::Bumps, t).unwrap();

    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for (label, center) in [(0usize, &heavisine), (1usize, &bumps)] {
        for rep in 0..6 {
            let mut rng = tfclust_core::rng::stream(73, &[label as u64, rep]);
            let noisy: Vec<f64> = center
                .iter()
                .map(|&v| v + 0.05 * rand_sample(&mut rng))
                .collect();
            let features = scatter(&noisy, &bank, &config).unwrap();
            rows.push(features.values);
            truth.push(label);
        }
    }
    let template = scatter(&heavisine, &bank, &config).unwrap();
    let groups = scattering_groups(&template).unwrap();
    let x = FeatureMatrix::from_rows(&rows, String::from("scattering"), Some(groups.clone()))
        .unwrap();
    let cfg = SparseConfig { restarts: 6, ..SparseConfig::new(2, 3.0, 11) };
    let run = sparse_kmeans(&x, Some(&groups), &cfg).unwrap();
    let score = adjusted_rand_index(&truth, &run.assignment.labels).unwrap();
    assert!(score.value > 0.9, "ari {}", score.value);
}

#[test]
fn the_whole_chain_is_deterministic() {
    let config = SimConfig::new(3, 2.0, 99).unwrap();
    let mut results = Vec::new();
    for _ in 0..2 {
        let data = make_univariate_benchmark(&config).unwrap();
        let x = wavelet_features(&data.instances, WaveletKind::Haar);
        let cfg = SparseConfig { restarts: 4, ..SparseConfig::new(6, 5.0, 42) };
        let run = sparse_kmeans(&x, None, &cfg).unwrap();
        results.push((run.assignment.labels.clone(), run.weights.values.clone()));
    }
    assert_eq!(results[0], results[1]);
}

fn rand_sample(rng: &mut impl rand::Rng) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let v: f64 = StandardNormal.sample(rng);
    v
}
