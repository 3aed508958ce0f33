//! Data model shared by the transforms and the clustering stage.
//!
//! A univariate signal is a plain `Vec<f64>` of finite samples. Multivariate
//! instances carry G rows on a common grid and flatten to one vector with the
//! G blocks concatenated in row order, so the feature index of (row g, time t)
//! is `g * t_len + t`. Everything downstream (feature matrices, group
//! partitions) indexes into that flattened layout.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One multivariate instance: G rows sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateSignal {
    pub rows: Vec<Vec<f64>>,
}

impl MultivariateSignal {
    /// Validates that rows are nonempty and equal-length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("multivariate signal with zero rows".into()));
        }
        let t = rows[0].len();
        if t == 0 {
            return Err(Error::Shape("multivariate signal with empty rows".into()));
        }
        for (g, row) in rows.iter().enumerate() {
            if row.len() != t {
                return Err(Error::Shape(format!(
                    "row {g} has length {}, expected {t}",
                    row.len()
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn g(&self) -> usize {
        self.rows.len()
    }

    pub fn t(&self) -> usize {
        self.rows[0].len()
    }
}

/// Concatenates the rows of a multivariate instance into one feature vector,
/// row blocks in order.
pub fn flatten_multivariate(signal: &MultivariateSignal) -> Vec<f64> {
    let mut flat = Vec::with_capacity(signal.g() * signal.t());
    for row in &signal.rows {
        flat.extend_from_slice(row);
    }
    flat
}

/// Splits a flattened vector back into its G equal rows. Inverse of
/// [`flatten_multivariate`].
pub fn unflatten_multivariate(flat: &[f64], g: usize) -> Result<MultivariateSignal> {
    if g == 0 || flat.is_empty() || flat.len() % g != 0 {
        return Err(Error::Shape(format!(
            "cannot split {} values into {g} equal rows",
            flat.len()
        )));
    }
    let t = flat.len() / g;
    MultivariateSignal::new(flat.chunks(t).map(<[f64]>::to_vec).collect())
}

/// An ordered collection of instances with optional ground-truth labels.
///
/// Instances are stored flattened; `g = 1` for univariate data. Labels are
/// cluster indices in `0..k` aligned by position.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub g: usize,
    pub t: usize,
    pub instances: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Validates block structure, equal instance lengths, finite values, and
    /// label alignment.
    pub fn new(
        g: usize,
        t: usize,
        instances: Vec<Vec<f64>>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if g == 0 || t == 0 {
            return Err(Error::Param("dataset with g = 0 or t = 0".into()));
        }
        for (i, inst) in instances.iter().enumerate() {
            if inst.len() != g * t {
                return Err(Error::Shape(format!(
                    "instance {i} has {} values, expected g*t = {}",
                    inst.len(),
                    g * t
                )));
            }
            if let Some(j) = inst.iter().position(|v| !v.is_finite()) {
                return Err(Error::Shape(format!(
                    "instance {i} has a non-finite value at position {j}"
                )));
            }
        }
        if let Some(ref l) = labels {
            if l.len() != instances.len() {
                return Err(Error::Shape(format!(
                    "{} labels for {} instances",
                    l.len(),
                    instances.len()
                )));
            }
        }
        Ok(Self { g, t, instances, labels })
    }

    pub fn n(&self) -> usize {
        self.instances.len()
    }
}

/// Disjoint feature-index groups covering `0..p` exactly, with optional
/// human-readable names per group (wavelet scale, scattering path, time
/// slice).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartition {
    pub groups: Vec<Vec<usize>>,
    pub names: Option<Vec<String>>,
}

impl GroupPartition {
    pub fn new(groups: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        if let Some(ref n) = names {
            if n.len() != groups.len() {
                return Err(Error::Shape(format!(
                    "{} names for {} groups",
                    n.len(),
                    groups.len()
                )));
            }
        }
        let part = Self { groups, names };
        part.check_tiling()?;
        Ok(part)
    }

    /// Every index in exactly one group, groups nonempty, union = 0..p.
    fn check_tiling(&self) -> Result<()> {
        let p: usize = self.groups.iter().map(Vec::len).sum();
        if p == 0 {
            return Err(Error::Shape("empty group partition".into()));
        }
        let mut seen = alloc::vec![false; p];
        for (gi, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Shape(format!("group {gi} is empty")));
            }
            for &idx in group {
                if idx >= p {
                    return Err(Error::Shape(format!(
                        "group {gi} references feature {idx}, but the partition covers only 0..{p}"
                    )));
                }
                if seen[idx] {
                    return Err(Error::Shape(format!(
                        "feature {idx} appears in more than one group"
                    )));
                }
                seen[idx] = true;
            }
        }
        Ok(())
    }

    /// Total number of features covered.
    pub fn p(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// All groups are singletons (group selection degenerates to plain L1).
    pub fn is_singleton(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }
}

/// Instances-by-features matrix produced by a transform, row-major.
///
/// `transform_tag` records how the columns were produced so result documents
/// stay interpretable; `groups`, when present, names the structured blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub n: usize,
    pub p: usize,
    pub values: Vec<f64>,
    pub transform_tag: String,
    pub groups: Option<GroupPartition>,
}

impl FeatureMatrix {
    pub fn new(
        n: usize,
        p: usize,
        values: Vec<f64>,
        transform_tag: String,
        groups: Option<GroupPartition>,
    ) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Shape("empty feature matrix".into()));
        }
        if values.len() != n * p {
            return Err(Error::Shape(format!(
                "{} values for an {n} x {p} matrix",
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!(
                "non-finite feature value at flat index {j}"
            )));
        }
        if let Some(ref g) = groups {
            if g.p() != p {
                return Err(Error::Shape(format!(
                    "group partition covers {} features, matrix has {p}",
                    g.p()
                )));
            }
        }
        Ok(Self { n, p, values, transform_tag, groups })
    }

    /// Builds from per-instance rows, checking equal lengths.
    pub fn from_rows(
        rows: &[Vec<f64>],
        transform_tag: String,
        groups: Option<GroupPartition>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("empty feature matrix".into()));
        }
        let p = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Shape(format!(
                    "feature row {i} has length {}, expected {p}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), p, values, transform_tag, groups)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn flatten_round_trip() {
        let m = MultivariateSignal::new(vec![
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
        ])
        .unwrap();
        let flat = flatten_multivariate(&m);
        assert_eq!(flat, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let back = unflatten_multivariate(&flat, 2).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn flatten_block_order_is_row_major() {
        // Feature index of (row g, time t) must be g * t_len + t.
        let m = MultivariateSignal::new(vec![vec![10.0, 11.0], vec![20.0, 21.0]]).unwrap();
        let flat = flatten_multivariate(&m);
        assert_eq!(flat[1 * 2 + 0], 20.0);
        assert_eq!(flat[0 * 2 + 1], 11.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(MultivariateSignal::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(unflatten_multivariate(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn partition_must_tile() {
        // Gap: index 2 missing.
        assert!(GroupPartition::new(vec![vec![0, 1], vec![3]], None).is_err());
        // Overlap.
        assert!(GroupPartition::new(vec![vec![0, 1], vec![1, 2]], None).is_err());
        // Exact tiling in any order is fine.
        let p = GroupPartition::new(vec![vec![2, 0], vec![1]], None).unwrap();
        assert_eq!(p.p(), 3);
        assert!(!p.is_singleton());
    }

    #[test]
    fn dataset_validates_labels_and_finiteness() {
        assert!(Dataset::new(1, 2, vec![vec![0.0, f64::NAN]], None).is_err());
        assert!(Dataset::new(1, 2, vec![vec![0.0, 1.0]], Some(vec![0, 1])).is_err());
        let d = Dataset::new(1, 2, vec![vec![0.0, 1.0]], Some(vec![0])).unwrap();
        assert_eq!(d.n(), 1);
    }
}
