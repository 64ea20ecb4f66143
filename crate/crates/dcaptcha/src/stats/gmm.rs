//! Diagonal-covariance Gaussian mixture fitted by EM.
//!
//! Initialization is k-means++-style seeding driven by a ChaCha8 stream
//! seeded from the caller's 64-bit seed, so a (data, K, seed) triple always
//! produces the same model. Variances are floored at `VARIANCE_FLOOR`;
//! flooring is the only response to degenerate clusters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-6;
/// EM stops once mean per-sample log-likelihood improves by less than this.
pub const EM_TOLERANCE: f64 = 1e-6;
pub const EM_MAX_ITERS: usize = 200;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gmm {
    version: u32,
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl Gmm {
    /// Fits a K-component mixture. Requires K >= 1 and at least K rows.
    pub fn fit(data: &[Vec<f64>], k: usize, seed: u64) -> Result<Self> {
        Self::fit_traced(data, k, seed).map(|(m, _)| m)
    }

    /// As `fit`, also returning the mean log-likelihood after every EM
    /// iteration (the trace is non-decreasing up to rounding).
    pub fn fit_traced(data: &[Vec<f64>], k: usize, seed: u64) -> Result<(Self, Vec<f64>)> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if data.len() < k {
            return Err(Error::InvalidArgument(format!(
                "{} samples cannot support {k} components",
                data.len()
            )));
        }
        let dim = data[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("zero-dimensional data".into()));
        }
        for row in data {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite training value".into()));
            }
        }

        let mut model = Self::init_kmeanspp(data, k, dim, seed);
        let n = data.len();
        let mut resp = vec![0.0; n * k];
        let mut trace = Vec::new();
        let mut prev_ll = f64::NEG_INFINITY;
        for _ in 0..EM_MAX_ITERS {
            // E step: responsibilities and the current-parameter likelihood.
            let mut ll_sum = 0.0;
            for (i, x) in data.iter().enumerate() {
                let log_joint: Vec<f64> = (0..k)
                    .map(|c| model.weights[c].ln() + model.log_component_pdf(c, x))
                    .collect();
                let norm = logsumexp(&log_joint);
                ll_sum += norm;
                for c in 0..k {
                    resp[i * k + c] = (log_joint[c] - norm).exp();
                }
            }
            let ll = ll_sum / n as f64;
            trace.push(ll);

            // M step.
            for c in 0..k {
                let nk: f64 = (0..n).map(|i| resp[i * k + c]).sum();
                let nk_safe = nk.max(1e-12);
                model.weights[c] = nk / n as f64;
                let mut mean = vec![0.0; dim];
                for (i, x) in data.iter().enumerate() {
                    let r = resp[i * k + c];
                    for (m, v) in mean.iter_mut().zip(x) {
                        *m += r * v;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= nk_safe);
                let mut var = vec![0.0; dim];
                for (i, x) in data.iter().enumerate() {
                    let r = resp[i * k + c];
                    for ((v, xv), m) in var.iter_mut().zip(x).zip(&mean) {
                        let d = xv - m;
                        *v += r * d * d;
                    }
                }
                var.iter_mut().for_each(|v| *v = (*v / nk_safe).max(VARIANCE_FLOOR));
                model.means[c] = mean;
                model.variances[c] = var;
            }
            let wsum: f64 = model.weights.iter().sum();
            model.weights.iter_mut().for_each(|w| *w /= wsum);

            if ll - prev_ll < EM_TOLERANCE {
                break;
            }
            prev_ll = ll;
        }
        Ok((model, trace))
    }

    fn init_kmeanspp(data: &[Vec<f64>], k: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = data.len();
        let mut centers: Vec<usize> = Vec::with_capacity(k);
        centers.push(rng.gen_range(0..n));
        let mut d2: Vec<f64> = data.iter().map(|x| sq_dist(x, &data[centers[0]])).collect();
        while centers.len() < k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let mut target = rng.gen_range(0.0..total);
                let mut chosen = n - 1;
                for (i, &w) in d2.iter().enumerate() {
                    if target < w {
                        chosen = i;
                        break;
                    }
                    target -= w;
                }
                chosen
            } else {
                rng.gen_range(0..n)
            };
            centers.push(next);
            for (i, x) in data.iter().enumerate() {
                d2[i] = d2[i].min(sq_dist(x, &data[next]));
            }
        }

        // Shared initial spread: per-dimension global variance.
        let mut gmean = vec![0.0; dim];
        for x in data {
            for (m, v) in gmean.iter_mut().zip(x) {
                *m += v;
            }
        }
        gmean.iter_mut().for_each(|m| *m /= n as f64);
        let mut gvar = vec![0.0; dim];
        for x in data {
            for ((v, xv), m) in gvar.iter_mut().zip(x).zip(&gmean) {
                let d = xv - m;
                *v += d * d;
            }
        }
        gvar.iter_mut().for_each(|v| *v = (*v / n as f64).max(VARIANCE_FLOOR));

        Self {
            version: 1,
            weights: vec![1.0 / k as f64; k],
            means: centers.iter().map(|&i| data[i].clone()).collect(),
            variances: vec![gvar; k],
        }
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, |m| m.len())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    fn log_component_pdf(&self, c: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((xv, m), v) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            let d = xv - m;
            acc += LN_2PI + v.ln() + d * d / v;
        }
        -0.5 * acc
    }

    /// Log density of one point under the mixture.
    pub fn loglik_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let log_joint: Vec<f64> =
            (0..self.k()).map(|c| self.weights[c].ln() + self.log_component_pdf(c, x)).collect();
        Ok(logsumexp(&log_joint))
    }

    /// Mean per-row log-likelihood, so the score is length-invariant.
    pub fn mean_loglik<'a, I>(&self, rows: I) -> Result<f64>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut sum = 0.0;
        let mut n = 0usize;
        for row in rows {
            sum += self.loglik_point(row)?;
            n += 1;
        }
        if n == 0 {
            return Err(Error::InvalidArgument("no rows to score".into()));
        }
        Ok(sum / n as f64)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(rng: &mut ChaCha8Rng, center: &[f64], spread: f64, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| center.iter().map(|c| c + rng.gen_range(-spread..spread)).collect())
            .collect()
    }

    #[test]
    fn k1_recovers_sample_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data = cloud(&mut rng, &[2.0, -3.0], 1.5, 500);
        let model = Gmm::fit(&data, 1, 9).unwrap();
        let n = data.len() as f64;
        for d in 0..2 {
            let mean: f64 = data.iter().map(|x| x[d]).sum::<f64>() / n;
            let var: f64 = data.iter().map(|x| (x[d] - mean).powi(2)).sum::<f64>() / n;
            assert!((model.means()[0][d] - mean).abs() < 1e-9);
            assert!((model.variances()[0][d] - var).abs() < 1e-9);
        }
        assert!((model.weights()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separated_clouds_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [1usize, 3, 8] {
            let lo = vec![-10.0; dim];
            let hi = vec![10.0; dim];
            let mut data = cloud(&mut rng, &lo, 0.5, 200);
            data.extend(cloud(&mut rng, &hi, 0.5, 200));
            let model = Gmm::fit(&data, 2, 7).unwrap();
            // Oracle: the true centroids, computed directly.
            let mut matched_lo = false;
            let mut matched_hi = false;
            for mean in model.means() {
                if mean.iter().zip(&lo).all(|(a, b)| (a - b).abs() < 0.5) {
                    matched_lo = true;
                }
                if mean.iter().zip(&hi).all(|(a, b)| (a - b).abs() < 0.5) {
                    matched_hi = true;
                }
            }
            assert!(matched_lo && matched_hi, "dim {dim}: means {:?}", model.means());
        }
    }

    #[test]
    fn n_equals_k_collapses_to_points() {
        let data = vec![vec![0.0], vec![100.0], vec![200.0]];
        let model = Gmm::fit(&data, 3, 3).unwrap();
        let mut means: Vec<f64> = model.means().iter().map(|m| m[0]).collect();
        means.sort_by(|a, b| a.total_cmp(b));
        for (m, expected) in means.iter().zip([0.0, 100.0, 200.0]) {
            assert!((m - expected).abs() < 1e-6, "{m} vs {expected}");
        }
        for v in model.variances() {
            assert_eq!(v[0], VARIANCE_FLOOR);
        }
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let data = vec![vec![1.0], vec![2.0]];
        assert!(Gmm::fit(&data, 3, 0).is_err());
        assert!(Gmm::fit(&data, 0, 0).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = cloud(&mut rng, &[0.0, 0.0, 0.0], 2.0, 300);
        let a = Gmm::fit(&data, 4, 42).unwrap();
        let b = Gmm::fit(&data, 4, 42).unwrap();
        assert_eq!(a, b);
        let c = Gmm::fit(&data, 4, 43).unwrap();
        assert!(a != c, "different seeds should explore different inits");
    }

    #[test]
    fn em_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..10u64 {
            let dim = 1 + (trial as usize % 4);
            let n = 50 + (trial as usize * 13) % 100;
            let data: Vec<Vec<f64>> =
                (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
            let (_, trace) = Gmm::fit_traced(&data, 3, trial).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "LL decreased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn loglik_at_mean_of_k1_model_matches_closed_form() {
        let data = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 0.0]];
        let model = Gmm::fit(&data, 1, 0).unwrap();
        let mean = model.means()[0].clone();
        let got = model.loglik_point(&mean).unwrap();
        let expected: f64 =
            -0.5 * model.variances()[0].iter().map(|v| (2.0 * std::f64::consts::PI * v).ln()).sum::<f64>();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn loglik_decays_away_from_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = cloud(&mut rng, &[0.0, 0.0], 1.0, 200);
        let model = Gmm::fit(&data, 2, 1).unwrap();
        let near = model.loglik_point(&[0.0, 0.0]).unwrap();
        let far = model.loglik_point(&[50.0, -50.0]).unwrap();
        assert!(far < near);
    }

    #[test]
    fn mean_loglik_invariant_to_duplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = cloud(&mut rng, &[1.0], 1.0, 100);
        let model = Gmm::fit(&data, 2, 2).unwrap();
        let rows: Vec<&[f64]> = data[..10].iter().map(|r| r.as_slice()).collect();
        let doubled: Vec<&[f64]> = rows.iter().chain(rows.iter()).copied().collect();
        let a = model.mean_loglik(rows).unwrap();
        let b = model.mean_loglik(doubled).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let data = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let model = Gmm::fit(&data, 1, 0).unwrap();
        match model.loglik_point(&[1.0]) {
            Err(Error::DimensionMismatch { expected: 2, got: 1 }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn weights_stay_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut data = cloud(&mut rng, &[-4.0], 1.0, 120);
        data.extend(cloud(&mut rng, &[4.0], 1.0, 40));
        let model = Gmm::fit(&data, 3, 5).unwrap();
        let sum: f64 = model.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(model.weights().iter().all(|&w| w >= 0.0));
        assert!(model.variances().iter().flatten().all(|&v| v >= VARIANCE_FLOOR));
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = cloud(&mut rng, &[0.5, -0.5], 1.0, 80);
        let model = Gmm::fit(&data, 2, 11).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: Gmm = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
    }
}
