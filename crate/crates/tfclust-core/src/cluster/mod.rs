//! Weighted K-means with structured feature selection.
//!
//! [`kmeans`] is plain Lloyd iteration with k-means++ restarts.
//! [`sparse_kmeans`] alternates it with an exact weight solver: given an
//! assignment, per-feature between-cluster dispersion [`bcss`] is computed
//! and weights maximizing `w . B` are found under a unit L2 ball plus either
//! an L1 budget ([`solve_weights_l1`]) or a group-norm budget
//! ([`solve_weights_group`]). The alternation's objective trace is
//! nondecreasing by construction: each k-means step also polishes the
//! incumbent assignment, and each weight step is an exact maximizer.

mod kmeans;
mod sparse;
mod weights;

pub use kmeans::{kmeans, ClusterAssignment};
pub use sparse::{
    multivariate_groups, refit_on_selected, sparse_kmeans, ClusteringResult, SparseConfig,
};
pub use weights::{bcss, group_norm, solve_weights_group, solve_weights_l1, WeightVector};
