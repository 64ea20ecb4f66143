//! Statistical primitives: diagonal-covariance GMMs, local outlier factor,
//! and ROC-based evaluation metrics.
//!
//! Score polarity is fixed crate-wide: larger means more anomalous (more
//! likely fake), and thresholds are upper bounds that a passing score must
//! stay strictly below.

pub mod gmm;
pub mod lof;
pub mod metrics;

pub use gmm::Gmm;
pub use lof::LofIndex;
pub use metrics::{roc, threshold_at_fpr, RocCurve};
