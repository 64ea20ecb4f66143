//! Local outlier factor with the standard reachability formulation.
//!
//! Canonical conventions, shared by any re-implementation that needs to
//! reproduce scores bit-exactly:
//! * Euclidean distance accumulated in ascending dimension order;
//! * neighbor candidates ordered by (distance, reference index) and the
//!   first `k` taken, so ties never depend on sort stability;
//! * k-distance = distance to the k-th neighbor under that order;
//! * reachability distances floored at `DISTANCE_FLOOR`, means taken over
//!   neighbors in candidate order;
//! * lrd = 1 / mean reachability; score = mean neighbor lrd / query lrd.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keeps local reachability densities finite on coincident points.
pub const DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LofIndex {
    points: Vec<Vec<f64>>,
    k: usize,
    k_distance: Vec<f64>,
    lrd: Vec<f64>,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indices of the k nearest candidates to `target` among `points`,
/// excluding `skip`, ordered by (distance, index).
fn k_nearest(points: &[Vec<f64>], target: &[f64], skip: Option<usize>, k: usize) -> Vec<usize> {
    let mut cand: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != skip)
        .map(|(j, p)| (distance(target, p), j))
        .collect();
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cand.into_iter().take(k).map(|(_, j)| j).collect()
}

impl LofIndex {
    /// Builds the index, caching per-reference k-distances and local
    /// reachability densities. Requires more points than neighbors.
    pub fn build(points: Vec<Vec<f64>>, k_neighbors: usize) -> Result<Self> {
        if k_neighbors == 0 {
            return Err(Error::InvalidArgument("k_neighbors must be at least 1".into()));
        }
        if points.len() <= k_neighbors {
            return Err(Error::InvalidArgument(format!(
                "{} reference points cannot support k={k_neighbors}",
                points.len()
            )));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite reference point".into()));
            }
        }

        let neighbors: Vec<Vec<usize>> = (0..points.len())
            .map(|i| k_nearest(&points, &points[i], Some(i), k_neighbors))
            .collect();
        let k_distance: Vec<f64> = (0..points.len())
            .map(|i| distance(&points[i], &points[*neighbors[i].last().expect("k >= 1")]))
            .collect();
        let lrd: Vec<f64> = (0..points.len())
            .map(|i| {
                let mean_reach = neighbors[i]
                    .iter()
                    .map(|&j| distance(&points[i], &points[j]).max(k_distance[j]).max(DISTANCE_FLOOR))
                    .sum::<f64>()
                    / k_neighbors as f64;
                1.0 / mean_reach
            })
            .collect();
        Ok(Self { points, k: k_neighbors, k_distance, lrd })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Outlier score of a query point: about 1 inside the reference
    /// density, increasingly above 1 outside it.
    pub fn score(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: query.len() });
        }
        let neighbors = k_nearest(&self.points, query, None, self.k);
        let mean_reach = neighbors
            .iter()
            .map(|&j| distance(query, &self.points[j]).max(self.k_distance[j]).max(DISTANCE_FLOOR))
            .sum::<f64>()
            / self.k as f64;
        let lrd_q = 1.0 / mean_reach;
        let mean_lrd = neighbors.iter().map(|&j| self.lrd[j]).sum::<f64>() / self.k as f64;
        Ok(mean_lrd / lrd_q)
    }
}
