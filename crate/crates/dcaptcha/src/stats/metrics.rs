//! ROC curves, AUC, EER, and FPR-targeted threshold selection.
//!
//! Positive means "fake/anomalous" and a sample is classified positive when
//! its score is >= the threshold, matching the crate-wide polarity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Operating points at every distinct score, thresholds descending,
    /// starting from a point above the largest score (FPR = TPR = 0).
    pub points: Vec<RocPoint>,
    /// Mann-Whitney statistic: P(pos > neg) + 0.5 P(pos = neg).
    pub auc: f64,
    /// Rate where FPR equals FNR, linearly interpolated between adjacent
    /// operating points.
    pub eer: f64,
    /// Threshold (same interpolation) at which the EER occurs.
    pub eer_threshold: f64,
}

fn check_finite(scores: &[f64], what: &str) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyScores(what.into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite {what} score")));
    }
    Ok(())
}

/// AUC via midranks: rank all scores ascending with ties sharing their
/// average rank; U = R_pos - P(P+1)/2; AUC = U / (P N). Equals the
/// pairwise concordance count exactly (ranks and sums stay integral or
/// half-integral, well inside f64 exactness).
fn auc_mann_whitney(pos: &[f64], neg: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut r_pos = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // 1-based ranks i+1..=j share the midrank.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                r_pos += midrank;
            }
        }
        i = j;
    }
    let p = pos.len() as f64;
    let n = neg.len() as f64;
    let u = r_pos - p * (p + 1.0) / 2.0;
    u / (p * n)
}

/// Builds the full ROC curve with AUC and interpolated EER.
pub fn roc(pos_scores: &[f64], neg_scores: &[f64]) -> Result<RocCurve> {
    check_finite(pos_scores, "positive")?;
    check_finite(neg_scores, "negative")?;

    let mut values: Vec<f64> =
        pos_scores.iter().chain(neg_scores).copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();

    let p = pos_scores.len() as f64;
    let n = neg_scores.len() as f64;
    let mut points = vec![RocPoint { threshold: values[0] + 1.0, fpr: 0.0, tpr: 0.0 }];
    for &v in &values {
        let tp = pos_scores.iter().filter(|&&s| s >= v).count() as f64;
        let fp = neg_scores.iter().filter(|&&s| s >= v).count() as f64;
        points.push(RocPoint { threshold: v, fpr: fp / n, tpr: tp / p });
    }

    let (eer, eer_threshold) = interpolate_eer(&points);
    Ok(RocCurve { points, auc: auc_mann_whitney(pos_scores, neg_scores), eer, eer_threshold })
}

fn interpolate_eer(points: &[RocPoint]) -> (f64, f64) {
    // f = FPR - FNR runs from -1 (classify nothing positive) to +1
    // (classify everything positive); find the sign change.
    let f = |pt: &RocPoint| pt.fpr - (1.0 - pt.tpr);
    for j in 1..points.len() {
        let (fa, fb) = (f(&points[j - 1]), f(&points[j]));
        if fb >= 0.0 {
            if fb == 0.0 || fa >= 0.0 {
                return (points[j].fpr, points[j].threshold);
            }
            let t = -fa / (fb - fa);
            let a = &points[j - 1];
            let b = &points[j];
            let fpr = a.fpr + t * (b.fpr - a.fpr);
            let fnr = (1.0 - a.tpr) + t * ((1.0 - b.tpr) - (1.0 - a.tpr));
            let thr = a.threshold + t * (b.threshold - a.threshold);
            return ((fpr + fnr) / 2.0, thr);
        }
    }
    // FPR never reaches FNR; the final point (everything positive) is the
    // closest operating point.
    let last = points.last().expect("curve has points");
    (last.fpr.max(1.0 - last.tpr), last.threshold)
}

/// Smallest threshold whose empirical false-positive rate on the given
/// honest (negative) scores is <= target. Between two distinct admissible
/// score levels the midpoint is returned; when even classifying only the
/// top score as positive overshoots the target, the threshold is placed
/// 1.0 above the maximum (FPR = 0).
pub fn threshold_at_fpr(neg_scores: &[f64], target_fpr: f64) -> Result<f64> {
    check_finite(neg_scores, "negative")?;
    if !(0.0 < target_fpr && target_fpr < 1.0) {
        return Err(Error::InvalidArgument(format!("target_fpr {target_fpr} outside (0,1)")));
    }
    let n = neg_scores.len();
    let allowed = (target_fpr * n as f64).floor() as usize;

    let mut sorted = neg_scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    // Walk distinct values from the top; cum = count of scores >= value.
    let mut best: Option<(usize, f64)> = None; // (cum <= allowed, value)
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == v {
            j += 1;
        }
        if j <= allowed {
            best = Some((j, v));
        } else {
            break;
        }
        i = j;
    }
    Ok(match best {
        Some((cum, v)) => {
            // Midpoint between the last admissible value and the next
            // distinct value below it.
            let next_below = sorted[cum]; // exists: cum <= allowed < n
            (v + next_below) / 2.0
        }
        None => sorted[0] + 1.0,
    })
}

/// Convenience: empirical FPR of a threshold on negative scores under the
/// ">= threshold is positive" rule.
pub fn empirical_fpr(neg_scores: &[f64], threshold: f64) -> f64 {
    if neg_scores.is_empty() {
        return 0.0;
    }
    neg_scores.iter().filter(|&&s| s >= threshold).count() as f64 / neg_scores.len() as f64
}
