//! Set-valued functions of one real variable and their finite samplings.
//!
//! A [`SetValuedFunction`] describes each image F(x) exactly, either as a
//! finite point set in ℝⁿ or as a finite union of closed intervals of ℝ.
//! [`eval`] turns an image into a [`CompactSet`] at a given resolution.
//! [`AnchorSampler`] samples F(x) near a base point x₀ so that the parts
//! shared with F(x₀) reuse the anchor points of F(x₀) exactly.

mod expr;
mod gallery;
mod interval;
mod piecewise;

use serde::{Deserialize, Serialize};

pub use expr::Polynomial;
pub use gallery::{gallery, gallery_names, GalleryFunction, GalleryInfo, GalleryKind};
pub use interval::{Interval, IntervalUnion};
pub use piecewise::{Piece, PiecewiseSpec, PiecewiseSvf};

use crate::error::{Error, Result};
use crate::set_core::{set_norm, CompactSet, Point, Tolerances};

pub const DEFAULT_RESOLUTION: usize = 256;

/// Open interval (a, b) on which a set-valued function is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParams(format!("empty domain ({a}, {b})")));
        }
        Ok(Domain { a, b })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }
}

/// Exact description of one value F(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Image {
    /// Finitely many points of ℝⁿ.
    Points(Vec<Point>),
    /// A finite union of closed intervals of ℝ.
    Intervals(IntervalUnion),
}

impl Image {
    pub fn dim(&self) -> usize {
        match self {
            Image::Points(pts) => pts.first().map_or(1, Point::dim),
            Image::Intervals(_) => 1,
        }
    }

    /// Total length of the interval components; zero for finite images.
    pub fn measure(&self) -> f64 {
        match self {
            Image::Points(_) => 0.0,
            Image::Intervals(u) => u.measure(),
        }
    }

    /// Interval form of a one-dimensional image.
    pub fn as_intervals(&self) -> Option<IntervalUnion> {
        match self {
            Image::Intervals(u) => Some(u.clone()),
            Image::Points(pts) if self.dim() == 1 => {
                let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
                IntervalUnion::from_points(&xs).ok()
            }
            Image::Points(_) => None,
        }
    }

    /// Finite points are returned as they are; each interval component
    /// contributes `resolution + 1` equispaced points including its endpoints.
    pub fn sample(&self, resolution: usize, dedup_tol: f64) -> Result<CompactSet> {
        match self {
            Image::Points(pts) => CompactSet::with_dedup(pts.clone(), dedup_tol),
            Image::Intervals(u) => {
                let xs: Vec<Point> = u
                    .components()
                    .iter()
                    .flat_map(|c| c.sample(resolution))
                    .map(Point::scalar)
                    .collect();
                CompactSet::with_dedup(xs, dedup_tol)
            }
        }
    }
}

/// A map x ↦ F(x) from an open interval into the nonempty compact sets of ℝⁿ.
///
/// Implementations must be pure: the same `x` always yields the same image.
pub trait SetValuedFunction: Send + Sync {
    fn domain(&self) -> Domain;

    fn dim(&self) -> usize;

    /// F(x) for `x` inside the domain.
    fn image(&self, x: f64) -> Result<Image>;

    fn name(&self) -> String {
        "custom".to_string()
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution == 0 {
        Err(Error::InvalidArgument("resolution must be positive".into()))
    } else {
        Ok(())
    }
}

/// Samples F(x) at the given resolution.
pub fn eval(f: &dyn SetValuedFunction, x: f64, resolution: usize) -> Result<CompactSet> {
    check_resolution(resolution)?;
    f.domain().check(x)?;
    f.image(x)?
        .sample(resolution, Tolerances::default().dedup_tol)
}

/// Length scale of F(x₀) used by the resolution-aware default tolerances:
/// the measure of its interval part, or max(1, ‖F(x₀)‖) for a finite image.
pub fn image_scale(image: &Image, sampled: &CompactSet) -> f64 {
    let measure = image.measure();
    if measure > 0.0 {
        measure
    } else {
        set_norm(sampled).max(1.0)
    }
}

/// Samples F near a fixed base point x₀.
///
/// The anchors are `eval(F, x0, resolution)`. For one-dimensional images
/// a sample of F(x) consists of the anchors lying in F(x), the endpoints of
/// F(x)'s components, and `resolution + 1` equispaced points on every piece
/// of the closure of F(x) ∖ F(x₀). Its Hausdorff distance to F(x) is at
/// most the anchor spacing, and common parts of F(x) and F(x₀) are
/// represented by identical points.
pub struct AnchorSampler<'a> {
    f: &'a dyn SetValuedFunction,
    x0: f64,
    resolution: usize,
    tol: Tolerances,
    base: Image,
    base_intervals: Option<IntervalUnion>,
    anchors: CompactSet,
}

impl<'a> AnchorSampler<'a> {
    pub fn new(
        f: &'a dyn SetValuedFunction,
        x0: f64,
        resolution: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        check_resolution(resolution)?;
        tol.validate()?;
        f.domain().check(x0)?;
        let base = f.image(x0)?;
        let anchors = base.sample(resolution, tol.dedup_tol)?;
        let base_intervals = base.as_intervals();
        Ok(AnchorSampler {
            f,
            x0,
            resolution,
            tol: *tol,
            base,
            base_intervals,
            anchors,
        })
    }

    pub fn function(&self) -> &'a dyn SetValuedFunction {
        self.f
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The sampled F(x₀).
    pub fn anchors(&self) -> &CompactSet {
        &self.anchors
    }

    pub fn base_image(&self) -> &Image {
        &self.base
    }

    pub fn image_scale(&self) -> f64 {
        image_scale(&self.base, &self.anchors)
    }

    /// Sample of F(x) conforming to the anchors.
    pub fn sample(&self, x: f64) -> Result<CompactSet> {
        self.f.domain().check(x)?;
        if x == self.x0 {
            return Ok(self.anchors.clone());
        }
        let image = self.f.image(x)?;
        let (Some(base), Some(target)) = (&self.base_intervals, image.as_intervals()) else {
            return image.sample(self.resolution, self.tol.dedup_tol);
        };

        let mut xs: Vec<f64> = self
            .anchors
            .iter()
            .map(|p| p[0])
            .filter(|&y| target.contains(y))
            .collect();
        for c in target.components() {
            xs.push(c.lo);
            xs.push(c.hi);
        }
        for piece in target.difference_closure(base) {
            xs.extend(piece.sample(self.resolution));
        }
        let points = xs.into_iter().map(Point::scalar).collect();
        CompactSet::with_dedup(points, self.tol.dedup_tol)
    }
}

type PointsFn = dyn Fn(f64) -> Vec<Point> + Send + Sync;

/// Set-valued function with finite images given by a closure.
pub struct FnSvf {
    domain: Domain,
    dim: usize,
    name: String,
    f: Box<PointsFn>,
}

impl FnSvf {
    pub fn new<F>(name: &str, domain: Domain, dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> Vec<Point> + Send + Sync + 'static,
    {
        FnSvf {
            domain,
            dim,
            name: name.to_string(),
            f: Box::new(f),
        }
    }
}

impl SetValuedFunction for FnSvf {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn image(&self, x: f64) -> Result<Image> {
        Ok(Image::Points((self.f)(x)))
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn scalars(s: &CompactSet) -> Vec<f64> {
        s.scalars().unwrap()
    }

    #[test]
    fn eval_examples() {
        let two_powers = gallery("two_powers", &json!({"alpha": 1, "beta": 2})).unwrap();
        assert_eq!(
            scalars(&eval(&two_powers, 0.5, 16).unwrap()),
            vec![0.25, 0.5]
        );

        let growth = gallery("interval_growth", &json!({})).unwrap();
        assert_eq!(
            scalars(&eval(&growth, 0.0, 4).unwrap()),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let half = eval(&growth, -0.5, 8).unwrap();
        assert_eq!(half.len(), 9);
        assert_eq!(scalars(&half).last(), Some(&0.5));

        let strong = gallery("strong_example", &json!({})).unwrap();
        let s = scalars(&eval(&strong, 0.5, 10).unwrap());
        assert_eq!(s[0], -0.25);
        assert_eq!(s[1], 0.0);
        assert_eq!(*s.last().unwrap(), 2.5);
        assert_eq!(s.len(), 12);
    }

    #[test]
    fn eval_outside_domain() {
        let growth = gallery("interval_growth", &json!({})).unwrap();
        assert!(matches!(eval(&growth, 1.0, 4), Err(Error::Domain { .. })));
        assert!(matches!(eval(&growth, -3.0, 4), Err(Error::Domain { .. })));
        assert!(eval(&growth, 0.0, 0).is_err());
    }

    #[test]
    fn conforming_sample_reuses_anchors() {
        let growth = gallery("interval_growth", &json!({})).unwrap();
        let sampler = AnchorSampler::new(&growth, 0.0, 4, &Tolerances::default()).unwrap();
        let right = scalars(&sampler.sample(0.125).unwrap());
        assert_eq!(
            right,
            vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.03125, 1.0625, 1.09375, 1.125]
        );
        let left = scalars(&sampler.sample(-0.125).unwrap());
        assert_eq!(left, vec![0.0, 0.25, 0.5, 0.75, 0.875]);
        assert_eq!(sampler.sample(0.0).unwrap(), *sampler.anchors());
    }

    #[test]
    fn conforming_sample_stays_close_to_the_image() {
        let strong = gallery("strong_example", &json!({})).unwrap();
        let sampler = AnchorSampler::new(&strong, 0.0, 64, &Tolerances::default()).unwrap();
        for &x in &[-0.7, -0.01, 0.003, 0.4] {
            let conforming = sampler.sample(x).unwrap();
            let fine = eval(&strong, x, 4096).unwrap();
            let d = crate::set_core::hausdorff_direct(&conforming, &fine).unwrap();
            assert!(d <= 2.0 / 64.0, "x = {x}: {d}");
        }
    }

    #[test]
    fn image_scale_rules() {
        let strong = gallery("strong_example", &json!({})).unwrap();
        let s = AnchorSampler::new(&strong, 0.0, 8, &Tolerances::default()).unwrap();
        assert_eq!(s.image_scale(), 2.0);
        let cubic = gallery("smooth_singleton", &json!({"f": "x^3"})).unwrap();
        let s = AnchorSampler::new(&cubic, 0.5, 8, &Tolerances::default()).unwrap();
        assert_eq!(s.image_scale(), 1.0);
        let s = AnchorSampler::new(&cubic, 1.5, 8, &Tolerances::default()).unwrap();
        assert_eq!(s.image_scale(), 3.375);
    }

    #[test]
    fn closure_backed_function() {
        let f = FnSvf::new("pair", Domain::new(-1.0, 1.0).unwrap(), 1, |x| {
            vec![Point::scalar(x), Point::scalar(-x)]
        });
        assert_eq!(scalars(&eval(&f, 0.5, 3).unwrap()), vec![-0.5, 0.5]);
        assert_eq!(scalars(&eval(&f, 0.0, 3).unwrap()), vec![0.0]);
    }
}
