//! First metric divided differences and one-sided metric derivatives.
//!
//! For an anchor y₀ ∈ F(x₀) the anchored divided difference is
//!
//! ```text
//! [x₀, x]F|y₀ = { (y − y₀)/(x − x₀) : (y₀, y) ∈ Π(F(x₀), F(x)) }
//! ```
//!
//! and the one-sided derivative D±F(x₀)|y₀ is its Hausdorff limit as
//! x → x₀±, required uniformly over the anchors. Limits are estimated along
//! an [`HLadder`]; the estimate is the divided difference at the finest rung.
//!
//! All divided differences for a base point x₀ are taken against one
//! [`AnchorSampler`], so F(x₀) is sampled once and the anchors stay fixed
//! across rungs.

mod ladder;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ladder::{HLadder, Side, DEFAULT_FLOOR, DEFAULT_H0, DEFAULT_RATIO, DEFAULT_RUNGS};

use crate::error::{Error, Result};
use crate::set_core::{hausdorff_direct, metric_pair_indices};
use crate::set_core::{CompactSet, Point, Tolerances};
use crate::svf::{AnchorSampler, SetValuedFunction};

/// Smallest convergence tolerance used by [`default_conv_tol`].
pub const MIN_CONV_TOL: f64 = 1e-6;

/// max(1e−6, 4·scale/resolution), with `scale` the length scale of F(x₀).
pub fn default_conv_tol(scale: f64, resolution: usize) -> f64 {
    MIN_CONV_TOL.max(4.0 * scale / resolution as f64)
}

/// [x₀, x]F|y₀ for one anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchoredDividedDifference {
    pub x0: f64,
    pub x: f64,
    pub anchor: Point,
    pub value: CompactSet,
}

fn step(x0: f64, x: f64) -> Result<f64> {
    let h = x - x0;
    if h == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "divided difference needs x != x0 (both {x0})"
        )));
    }
    Ok(h)
}

/// dy/h with −0 mapped to 0.
fn quotient(dy: f64, h: f64) -> f64 {
    dy / h + 0.0
}

/// Anchored divided differences at `x` for every anchor of the sampler, in
/// anchor order.
pub fn divided_differences(sampler: &AnchorSampler<'_>, x: f64) -> Result<Vec<CompactSet>> {
    let h = step(sampler.x0(), x)?;
    let anchors = sampler.anchors();
    let sample = sampler.sample(x)?;
    let tol = sampler.tolerances();
    let dim = anchors.dim();

    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); anchors.len()];
    for (i, j) in metric_pair_indices(anchors, &sample, tol)? {
        let (y0, y) = (anchors.point(i), sample.point(j));
        buckets[i].extend(y0.iter().zip(y).map(|(a, b)| quotient(b - a, h)));
    }
    buckets
        .into_iter()
        .map(|coords| CompactSet::from_flat(dim, coords, tol.dedup_tol))
        .collect()
}

fn anchor_index(anchors: &CompactSet, y0: &Point, tol: &Tolerances) -> Result<usize> {
    if y0.dim() != anchors.dim() {
        return Err(Error::DimensionMismatch {
            expected: anchors.dim(),
            found: y0.dim(),
        });
    }
    anchors
        .position(y0, tol.dedup_tol)
        .ok_or_else(|| Error::UnknownAnchor(y0.coords().to_vec()))
}

/// [x₀, x]F|y₀ with F(x₀) sampled at `resolution`.
pub fn anchored_dd(
    f: &dyn SetValuedFunction,
    x0: f64,
    x: f64,
    y0: &Point,
    resolution: usize,
    tol: &Tolerances,
) -> Result<CompactSet> {
    step(x0, x)?;
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    let idx = anchor_index(sampler.anchors(), y0, tol)?;
    Ok(divided_differences(&sampler, x)?.swap_remove(idx))
}

/// Every anchored divided difference at `x`, one entry per anchor.
pub fn anchored_dds(
    f: &dyn SetValuedFunction,
    x0: f64,
    x: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<Vec<AnchoredDividedDifference>> {
    step(x0, x)?;
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    let dds = divided_differences(&sampler, x)?;
    Ok(sampler
        .anchors()
        .iter()
        .zip(dds)
        .map(|(y, value)| AnchoredDividedDifference {
            x0,
            x,
            anchor: Point::from_slice_unchecked(y),
            value,
        })
        .collect())
}

/// (B ⊖ A)/h for samples A of F(x₀) and B of F(x₀ + h).
pub fn full_dd_sets(
    a: &CompactSet,
    b: &CompactSet,
    h: f64,
    tol: &Tolerances,
) -> Result<CompactSet> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid step {h}")));
    }
    // Same pairs as metric_difference(b, a), divided before deduplication.
    let mut coords = Vec::new();
    for (i, j) in metric_pair_indices(b, a, tol)? {
        coords.extend(
            b.point(i)
                .iter()
                .zip(a.point(j))
                .map(|(y, y0)| quotient(y - y0, h)),
        );
    }
    CompactSet::from_flat(b.dim(), coords, tol.dedup_tol)
}

/// [x₀, x]F = (F(x) ⊖ F(x₀))/(x − x₀), the union of the anchored divided
/// differences over all anchors.
pub fn full_dd(
    f: &dyn SetValuedFunction,
    x0: f64,
    x: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<CompactSet> {
    let h = step(x0, x)?;
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    let sample = sampler.sample(x)?;
    let full = full_dd_sets(sampler.anchors(), &sample, h, tol)?;
    debug_assert!({
        let union = CompactSet::union_all(&divided_differences(&sampler, x)?)?;
        hausdorff_direct(&union, &full)? <= tol.dedup_tol.max(1e-12)
    });
    Ok(full)
}

/// Derivative estimate and convergence trace for one anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorDerivative {
    pub y: Point,
    /// Divided difference at the finest rung.
    pub derivative_points: CompactSet,
    /// haus(dd(h_k), dd(h_{k+1})) for consecutive rungs.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// D±F(x₀)|y for every sampled anchor y ∈ F(x₀).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeField {
    pub x0: f64,
    pub side: Side,
    pub resolution: usize,
    pub conv_tol: f64,
    pub steps: Vec<f64>,
    pub anchors: Vec<AnchorDerivative>,
    pub converged: bool,
}

impl DerivativeField {
    /// The anchors as a set, i.e. the sampled F(x₀).
    pub fn anchor_set(&self) -> Result<CompactSet> {
        CompactSet::new(self.anchors.iter().map(|a| a.y.clone()).collect())
    }

    pub fn get(&self, y: &Point, tol: f64) -> Option<&AnchorDerivative> {
        self.anchors
            .iter()
            .find(|a| a.y.len() == y.len() && a.y.distance(y) <= tol)
    }

    pub fn unconverged(&self) -> impl Iterator<Item = &AnchorDerivative> {
        self.anchors.iter().filter(|a| !a.converged)
    }

    /// Largest final-rung residual over the anchors.
    pub fn max_residual(&self) -> f64 {
        self.anchors
            .iter()
            .filter_map(|a| a.residuals.last().copied())
            .fold(0.0, f64::max)
    }
}

/// Estimates D±F(x₀) along the ladder using an existing sampler.
///
/// `conv_tol = None` selects [`default_conv_tol`] for the sampler's image
/// scale and resolution.
pub fn derivative_field(
    sampler: &AnchorSampler<'_>,
    side: Side,
    ladder: &HLadder,
    conv_tol: Option<f64>,
) -> Result<DerivativeField> {
    let x0 = sampler.x0();
    ladder.check_domain(&sampler.function().domain(), x0, side)?;
    let conv_tol = match conv_tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => return Err(Error::InvalidArgument(format!("invalid conv_tol {t}"))),
        None => default_conv_tol(sampler.image_scale(), sampler.resolution()),
    };
    let steps = ladder.steps();
    let rungs: Vec<Vec<CompactSet>> = steps
        .par_iter()
        .map(|h| divided_differences(sampler, x0 + side.sign() * h))
        .collect::<Result<_>>()?;

    let anchors: Vec<AnchorDerivative> = (0..sampler.anchors().len())
        .into_par_iter()
        .map(|i| {
            let residuals = rungs
                .windows(2)
                .map(|w| hausdorff_direct(&w[0][i], &w[1][i]))
                .collect::<Result<Vec<f64>>>()?;
            let converged = residuals.last().is_some_and(|&r| r <= conv_tol);
            Ok(AnchorDerivative {
                y: Point::from_slice_unchecked(sampler.anchors().point(i)),
                derivative_points: rungs[rungs.len() - 1][i].clone(),
                residuals,
                converged,
            })
        })
        .collect::<Result<_>>()?;

    let converged = anchors.iter().all(|a| a.converged);
    Ok(DerivativeField {
        x0,
        side,
        resolution: sampler.resolution(),
        conv_tol,
        steps,
        anchors,
        converged,
    })
}

/// Estimates D±F(x₀)|y for every anchor y of `eval(F, x0, resolution)`.
///
/// Non-convergence is reported through the field, not as an error.
pub fn one_sided_derivative(
    f: &dyn SetValuedFunction,
    x0: f64,
    side: Side,
    ladder: &HLadder,
    conv_tol: Option<f64>,
    resolution: usize,
    tol: &Tolerances,
) -> Result<DerivativeField> {
    ladder.check_domain(&f.domain(), x0, side)?;
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    derivative_field(&sampler, side, ladder, conv_tol)
}

/// D±F(x₀) = ∪_y D±F(x₀)|y.
pub fn derivative_union(field: &DerivativeField) -> Result<CompactSet> {
    if !field.converged {
        return Err(Error::Unconverged { x0: field.x0 });
    }
    CompactSet::union_all(field.anchors.iter().map(|a| &a.derivative_points))
}

pub(crate) fn check_anchors(sampler: &AnchorSampler<'_>, field: &DerivativeField) -> Result<()> {
    let anchors = sampler.anchors();
    if anchors.len() != field.anchors.len() {
        return Err(Error::LengthMismatch {
            what: "anchors of the field and of the sampled F(x0)",
            left: field.anchors.len(),
            right: anchors.len(),
        });
    }
    let tol = sampler.tolerances().dedup_tol;
    for (p, a) in anchors.iter().zip(&field.anchors) {
        if a.y.len() != p.len() || a.y.distance(&Point::from_slice_unchecked(p)) > tol {
            return Err(Error::UnknownAnchor(a.y.coords().to_vec()));
        }
    }
    Ok(())
}

/// sup_y haus([x₀, x]F|y, D|y) at `x`, using an existing sampler.
pub fn deviation_at(sampler: &AnchorSampler<'_>, field: &DerivativeField, x: f64) -> Result<f64> {
    check_anchors(sampler, field)?;
    let dds = divided_differences(sampler, x)?;
    dds.iter()
        .zip(&field.anchors)
        .map(|(dd, a)| hausdorff_direct(dd, &a.derivative_points))
        .try_fold(0.0, |acc, d| Ok(f64::max(acc, d?)))
}

/// sup_y haus([x₀, x₀ ± h]F|y, D±F(x₀)|y), the uniformity modulus at step h.
pub fn uniform_deviation(
    f: &dyn SetValuedFunction,
    x0: f64,
    side: Side,
    h: f64,
    field: &DerivativeField,
    resolution: usize,
    tol: &Tolerances,
) -> Result<f64> {
    if field.side != side || field.x0 != x0 {
        return Err(Error::InvalidArgument(format!(
            "field is for x0 = {} ({}), asked for x0 = {x0} ({side})",
            field.x0, field.side
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    deviation_at(&sampler, field, x0 + side.sign() * h)
}
