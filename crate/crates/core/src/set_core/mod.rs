//! Finite compact sets and the metric constructions on them: projections,
//! metric pairs, Hausdorff distance, metric differences, metric chains and
//! metric linear combinations.
//!
//! Every operation is an exact brute-force computation on point clouds.

mod io;
mod ops;
mod point;
mod set;

use serde::{Deserialize, Serialize};

pub use io::{read_text, write_text};
pub(crate) use ops::metric_pair_indices;
pub use ops::{
    dist_point_set, hausdorff_direct, hausdorff_via_pairs, metric_chains, metric_difference,
    metric_linear_combination, metric_pairs, proj_point_set, scale_translate, set_norm,
    MetricPairSet,
};
pub use point::Point;
pub use set::CompactSet;

pub const DEFAULT_PROJ_TIE_TOL: f64 = 1e-9;
pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;

/// Numerical slack for projections and point identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute slack when deciding that two distances tie.
    pub proj_tie_tol: f64,
    /// Points closer than this are merged.
    pub dedup_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            proj_tie_tol: DEFAULT_PROJ_TIE_TOL,
            dedup_tol: DEFAULT_DEDUP_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        if self.proj_tie_tol >= 0.0 && self.dedup_tol >= 0.0 {
            Ok(())
        } else {
            Err(crate::Error::InvalidArgument(format!(
                "tolerances must be nonnegative: {self:?}"
            )))
        }
    }
}
