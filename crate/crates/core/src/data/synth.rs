use ndarray::Array2;
use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Isotropic Gaussian clusters, `per_cluster` points around each row of
/// `centers`. Cluster `j` carries class `class_of[j]`; the cluster of origin of
/// every point is stored in `ids`.
pub fn make_gaussian_clusters(
    per_cluster: usize,
    centers: &Array2<f64>,
    sigma: f64,
    class_of: &[usize],
    seed: u64,
) -> Result<Dataset> {
    let k = centers.nrows();
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one cluster".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if class_of.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: class_of.len(),
        });
    }
    if per_cluster == 0 {
        return Err(Error::InvalidParameter("per_cluster must be at least 1".into()));
    }
    let num_classes = class_of.iter().max().expect("k >= 1") + 1;
    if let Some(missing) = (0..num_classes).find(|c| !class_of.contains(c)) {
        return Err(Error::InvalidParameter(format!(
            "class {missing} is not assigned to any cluster"
        )));
    }

    let d = centers.ncols();
    let normal = Normal::new(0.0, sigma).expect("sigma checked");
    let mut rng = seeded_rng(seed);
    let n = k * per_cluster;
    let mut features = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    for (j, center) in centers.outer_iter().enumerate() {
        for p in 0..per_cluster {
            let mut row = features.row_mut(j * per_cluster + p);
            for (x, &c) in row.iter_mut().zip(center) {
                *x = c + normal.sample(&mut rng);
            }
            labels.push(class_of[j]);
            ids.push(j);
        }
    }
    Dataset::new(features, labels, num_classes)?.with_ids(ids)
}

/// Centers evenly spaced on a circle of radius `5·√2`, starting at 225°, with
/// the clusters split into `classes` consecutive groups. Four clusters and two
/// classes give centers at `(±5, ±5)`, the lower pair class 0 and the upper
/// pair class 1.
pub fn ring_layout(clusters: usize, classes: usize) -> (Array2<f64>, Vec<usize>) {
    let radius = 5.0 * std::f64::consts::SQRT_2;
    let start = 225f64.to_radians();
    let centers = Array2::from_shape_fn((clusters, 2), |(i, axis)| {
        let angle = start + std::f64::consts::TAU * i as f64 / clusters as f64;
        let v = if axis == 0 { angle.cos() } else { angle.sin() };
        // snap the float noise so the four-cluster layout is exactly (±5, ±5)
        (radius * v * 1e9).round() / 1e9
    });
    let classes = classes.max(1);
    let class_of = (0..clusters).map(|i| i * classes / clusters).collect();
    (centers, class_of)
}
