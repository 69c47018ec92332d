//! Local metric linear approximants and empirical approximation orders.
//!
//! Given the one-sided derivative fields at x₀,
//!
//! ```text
//! L F(x) = ∪_{y ∈ F(x₀)} {y} + (x − x₀)·D±F(x₀)|y
//! ```
//!
//! with the right field used for x ≥ x₀ and the left one for x < x₀.
//! [`error_curve`] measures haus(F(x), L F(x)) down an [`HLadder`] and
//! [`fit_order`] turns such a curve into a log-log slope.

mod fit;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{fit_order, NoiseFloor, OrderEstimate, OrderFit, MIN_USABLE_RUNGS};

use crate::calculus::{
    check_anchors, derivative_field, deviation_at, DerivativeField, HLadder, Side,
};
use crate::error::{Error, Result};
use crate::set_core::{hausdorff_via_pairs, CompactSet, Point, Tolerances};
use crate::svf::{AnchorSampler, SetValuedFunction};

/// L F around x₀, built from one or both one-sided derivative fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalLinearApproximant {
    pub x0: f64,
    pub right_field: Option<DerivativeField>,
    pub left_field: Option<DerivativeField>,
    pub f_at_x0: CompactSet,
}

impl LocalLinearApproximant {
    /// Both fields must be converged, belong to the same x₀ and share
    /// their anchors.
    pub fn new(right: Option<DerivativeField>, left: Option<DerivativeField>) -> Result<Self> {
        let first = right
            .as_ref()
            .or(left.as_ref())
            .ok_or_else(|| Error::InvalidArgument("approximant needs a derivative field".into()))?;
        let x0 = first.x0;
        let f_at_x0 = first.anchor_set()?;
        for (field, side) in [(&right, Side::Right), (&left, Side::Left)] {
            let Some(field) = field else { continue };
            if field.side != side {
                return Err(Error::InvalidArgument(format!(
                    "{side} field expected, got a {} field",
                    field.side
                )));
            }
            if !field.converged {
                return Err(Error::Unconverged { x0: field.x0 });
            }
            if field.x0 != x0 {
                return Err(Error::InvalidArgument(format!(
                    "fields at different base points {x0} and {}",
                    field.x0
                )));
            }
            if field.anchor_set()? != f_at_x0 {
                return Err(Error::InvalidArgument(
                    "left and right fields have different anchors".into(),
                ));
            }
        }
        Ok(LocalLinearApproximant {
            x0,
            right_field: right,
            left_field: left,
            f_at_x0,
        })
    }

    /// Estimates the derivative fields for `sides` and assembles L F.
    pub fn build(
        f: &dyn SetValuedFunction,
        x0: f64,
        sides: &[Side],
        ladder: &HLadder,
        conv_tol: Option<f64>,
        resolution: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
        let field = |side| -> Result<Option<DerivativeField>> {
            if sides.contains(&side) {
                derivative_field(&sampler, side, ladder, conv_tol).map(Some)
            } else {
                Ok(None)
            }
        };
        Self::new(field(Side::Right)?, field(Side::Left)?)
    }

    pub fn field(&self, side: Side) -> Option<&DerivativeField> {
        match side {
            Side::Right => self.right_field.as_ref(),
            Side::Left => self.left_field.as_ref(),
        }
    }

    fn field_for(&self, x: f64) -> Result<&DerivativeField> {
        let side = Side::of(x, self.x0);
        self.field(side).ok_or_else(|| {
            Error::InvalidArgument(format!("approximant has no {side} derivative field"))
        })
    }
}

fn translate_scaled(y: &[f64], t: f64, d: &CompactSet, out: &mut Vec<f64>) {
    for p in d.iter() {
        out.extend(y.iter().zip(p).map(|(a, b)| a + t * b));
    }
}

/// L F|y₀(x) = {y₀} + (x − x₀)·D±F(x₀)|y₀.
pub fn approximant_anchored(l: &LocalLinearApproximant, y0: &Point, x: f64) -> Result<CompactSet> {
    let tol = l.f_at_x0.dedup_tol();
    let idx = l
        .f_at_x0
        .position(y0, tol)
        .ok_or_else(|| Error::UnknownAnchor(y0.coords().to_vec()))?;
    let y = l.f_at_x0.point(idx);
    if x == l.x0 {
        return Ok(CompactSet::singleton(Point::from_slice_unchecked(y)));
    }
    let field = l.field_for(x)?;
    let mut coords = Vec::new();
    translate_scaled(
        y,
        x - l.x0,
        &field.anchors[idx].derivative_points,
        &mut coords,
    );
    CompactSet::from_flat(l.f_at_x0.dim(), coords, tol)
}

/// L F(x); at x = x₀ this is F(x₀) itself.
pub fn approximant_eval(l: &LocalLinearApproximant, x: f64) -> Result<CompactSet> {
    if x == l.x0 {
        return Ok(l.f_at_x0.clone());
    }
    let field = l.field_for(x)?;
    let t = x - l.x0;
    let mut coords = Vec::new();
    for (y, a) in l.f_at_x0.iter().zip(&field.anchors) {
        translate_scaled(y, t, &a.derivative_points, &mut coords);
    }
    CompactSet::from_flat(l.f_at_x0.dim(), coords, l.f_at_x0.dedup_tol())
}

/// Which side(s) of x₀ an error curve probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSide {
    Right,
    Left,
    /// Larger of the right and left values at each step.
    Both,
}

impl CurveSide {
    pub fn sides(self) -> &'static [Side] {
        match self {
            CurveSide::Right => &[Side::Right],
            CurveSide::Left => &[Side::Left],
            CurveSide::Both => &[Side::Right, Side::Left],
        }
    }
}

impl From<Side> for CurveSide {
    fn from(side: Side) -> Self {
        match side {
            Side::Right => CurveSide::Right,
            Side::Left => CurveSide::Left,
        }
    }
}

impl std::str::FromStr for CurveSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(CurveSide::Right),
            "left" => Ok(CurveSide::Left),
            "both" => Ok(CurveSide::Both),
            _ => Err(Error::InvalidArgument(format!(
                "unknown side `{s}` (expected right, left or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub h: f64,
    pub err: f64,
}

/// A quantity measured at steps h down a ladder, coarsest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub x0: f64,
    pub side: CurveSide,
    /// Length scale of F(x₀) and the resolution it was sampled at; together
    /// they set the default noise floor.
    pub image_scale: f64,
    pub resolution: usize,
    pub samples: Vec<ErrorSample>,
}

impl ErrorCurve {
    /// `h,err` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,err\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e}\n", s.h, s.err));
        }
        out
    }

    /// 4·scale/resolution·h, the size of sampling artifacts in haus at step h.
    pub fn default_noise_floor(&self) -> NoiseFloor {
        NoiseFloor::proportional(4.0 * self.image_scale / self.resolution as f64)
    }
}

fn check_approximant(sampler: &AnchorSampler<'_>, l: &LocalLinearApproximant) -> Result<()> {
    if sampler.anchors() != &l.f_at_x0 {
        return Err(Error::InvalidArgument(
            "approximant anchors differ from the sampled F(x0)".into(),
        ));
    }
    Ok(())
}

/// err(h) = haus(F(x₀ ± h), L F(x₀ ± h)) at every rung of the ladder.
pub fn error_curve(
    f: &dyn SetValuedFunction,
    l: &LocalLinearApproximant,
    ladder: &HLadder,
    side: CurveSide,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ErrorCurve> {
    let sampler = AnchorSampler::new(f, l.x0, resolution, tol)?;
    check_approximant(&sampler, l)?;
    for &s in side.sides() {
        ladder.check_domain(&f.domain(), l.x0, s)?;
        if l.field(s).is_none() {
            return Err(Error::InvalidArgument(format!(
                "approximant has no {s} derivative field"
            )));
        }
    }
    let samples = ladder
        .steps()
        .par_iter()
        .map(|&h| {
            let mut err = 0.0_f64;
            for &s in side.sides() {
                let x = l.x0 + s.sign() * h;
                let exact = sampler.sample(x)?;
                let approx = approximant_eval(l, x)?;
                err = err.max(hausdorff_via_pairs(&exact, &approx, tol)?);
            }
            Ok(ErrorSample { h, err })
        })
        .collect::<Result<_>>()?;
    Ok(ErrorCurve {
        x0: l.x0,
        side,
        image_scale: sampler.image_scale(),
        resolution,
        samples,
    })
}

/// Uniform deviation curve and its fitted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaProbe {
    pub deviations: ErrorCurve,
    pub noise_floor: NoiseFloor,
    pub estimate: OrderEstimate,
}

/// Deviation sup_y haus([x₀, x₀ ± h]F|y, D±F(x₀)|y) at every rung of the
/// ladder of `field`, measured against the field's anchors.
pub fn deviation_curve(
    f: &dyn SetValuedFunction,
    field: &DerivativeField,
    tol: &Tolerances,
) -> Result<ErrorCurve> {
    let sampler = AnchorSampler::new(f, field.x0, field.resolution, tol)?;
    check_anchors(&sampler, field)?;
    let samples = field
        .steps
        .par_iter()
        .map(|&h| {
            let err = deviation_at(&sampler, field, field.x0 + field.side.sign() * h)?;
            Ok(ErrorSample { h, err })
        })
        .collect::<Result<_>>()?;
    Ok(ErrorCurve {
        x0: field.x0,
        side: field.side.into(),
        image_scale: sampler.image_scale(),
        resolution: field.resolution,
        samples,
    })
}

/// Fits the order α of sup_y haus(dd|y, D|y) ≤ L·h^α along the ladder.
///
/// The derivative must converge at x₀. The default noise floor is the
/// field's convergence tolerance.
#[allow(clippy::too_many_arguments)]
pub fn alpha_probe(
    f: &dyn SetValuedFunction,
    x0: f64,
    side: Side,
    ladder: &HLadder,
    conv_tol: Option<f64>,
    resolution: usize,
    tol: &Tolerances,
    noise_floor: Option<NoiseFloor>,
) -> Result<AlphaProbe> {
    let sampler = AnchorSampler::new(f, x0, resolution, tol)?;
    let field = derivative_field(&sampler, side, ladder, conv_tol)?;
    if !field.converged {
        return Err(Error::Unconverged { x0 });
    }
    let deviations = deviation_curve(f, &field, tol)?;
    let noise_floor = noise_floor.unwrap_or(NoiseFloor::absolute(field.conv_tol));
    let estimate = fit_order(&deviations, &noise_floor)?;
    Ok(AlphaProbe {
        deviations,
        noise_floor,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::one_sided_derivative;
    use crate::set_core::hausdorff_direct;
    use crate::svf::{eval, gallery, Domain, FnSvf};
    use serde_json::json;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn both(f: &dyn SetValuedFunction, x0: f64, res: usize) -> LocalLinearApproximant {
        LocalLinearApproximant::build(
            f,
            x0,
            &[Side::Right, Side::Left],
            &HLadder::default(),
            None,
            res,
            &tol(),
        )
        .unwrap()
    }

    fn interval(lo: f64, hi: f64) -> CompactSet {
        let n = 4096;
        let xs: Vec<f64> = (0..=n)
            .map(|k| lo + (hi - lo) * k as f64 / n as f64)
            .collect();
        CompactSet::from_scalars(&xs).unwrap()
    }

    #[test]
    fn identity_at_base_point() {
        for name in [
            "interval_growth",
            "strong_example",
            "two_powers",
            "two_curves_2d",
        ] {
            let f = gallery(name, &json!({})).unwrap();
            let x0 = if name.starts_with("two") { 1.0 } else { 0.0 };
            let l = both(&f, x0, 32);
            assert_eq!(
                approximant_eval(&l, x0).unwrap(),
                eval(&f, x0, 32).unwrap(),
                "{name}"
            );
            let y = Point::from_slice_unchecked(l.f_at_x0.point(0));
            assert_eq!(
                approximant_anchored(&l, &y, x0).unwrap(),
                CompactSet::singleton(y)
            );
        }
    }

    #[test]
    fn anchored_examples() {
        let growth = gallery("interval_growth", &json!({})).unwrap();
        let l = both(&growth, 0.0, 64);
        let h = 0.1;
        let a = approximant_anchored(&l, &Point::scalar(1.0), h).unwrap();
        assert!(hausdorff_direct(&a, &interval(1.0, 1.0 + h)).unwrap() <= h / 64.0);
        assert!(approximant_anchored(&l, &Point::scalar(0.3), h).is_err());

        let strong = gallery("strong_example", &json!({})).unwrap();
        let l = both(&strong, 0.0, 64);
        let a = approximant_anchored(&l, &Point::scalar(2.0), h).unwrap();
        assert!(hausdorff_direct(&a, &interval(2.0, 2.0 + h)).unwrap() <= h / 64.0);
    }

    #[test]
    fn strong_example_approximant() {
        let strong = gallery("strong_example", &json!({})).unwrap();
        let l = both(&strong, 0.0, 256);
        let right = approximant_eval(&l, 0.5).unwrap();
        assert!(hausdorff_direct(&right, &interval(0.0, 2.5)).unwrap() <= 2.5 / 256.0);
        let left = approximant_eval(&l, -0.5).unwrap();
        assert!(hausdorff_direct(&left, &interval(0.0, 2.0)).unwrap() <= 2.0 / 256.0);
    }

    #[test]
    fn one_sided_approximant_rejects_other_side() {
        let f = gallery("interval_growth", &json!({})).unwrap();
        let l = LocalLinearApproximant::build(
            &f,
            0.0,
            &[Side::Right],
            &HLadder::default(),
            None,
            16,
            &tol(),
        )
        .unwrap();
        assert!(approximant_eval(&l, 0.1).is_ok());
        assert!(approximant_eval(&l, -0.1).is_err());
        assert!(error_curve(&f, &l, &HLadder::default(), CurveSide::Both, 16, &tol()).is_err());
    }

    #[test]
    fn unconverged_fields_are_rejected() {
        let f = FnSvf::new("zigzag", Domain::new(-1.0, 1.0).unwrap(), 1, |x| {
            let k = (-x.abs().log2()).floor() as i64;
            vec![Point::scalar(if k % 2 == 0 { x } else { -x })]
        });
        let field =
            one_sided_derivative(&f, 0.0, Side::Right, &HLadder::default(), None, 8, &tol())
                .unwrap();
        assert!(matches!(
            LocalLinearApproximant::new(Some(field), None),
            Err(Error::Unconverged { .. })
        ));
    }

    #[test]
    fn strong_example_error_curve() {
        let strong = gallery("strong_example", &json!({})).unwrap();
        let ladder = HLadder::default();
        let l = both(&strong, 0.0, 256);
        let curve = error_curve(&strong, &l, &ladder, CurveSide::Right, 256, &tol()).unwrap();
        for s in &curve.samples {
            // D|0 is estimated as {0, −h_K}, which shifts err(h) by h·h_K.
            assert!(
                (s.err - (s.h * s.h - s.h * ladder.finest())).abs() < 1e-12,
                "{s:?}"
            );
        }
        match fit_order(&curve, &curve.default_noise_floor()).unwrap() {
            OrderEstimate::Fitted(fit) => assert!((fit.slope - 2.0).abs() < 0.1, "{fit:?}"),
            OrderEstimate::Exact => panic!("expected a fit"),
        }
    }

    #[test]
    fn constant_error_curve_is_exact() {
        let f = gallery("constant", &json!({"intervals": [[0, 1], [3, 3]]})).unwrap();
        let l = both(&f, 0.0, 32);
        let curve = error_curve(&f, &l, &HLadder::default(), CurveSide::Both, 32, &tol()).unwrap();
        assert!(curve.samples.iter().all(|s| s.err == 0.0));
        assert_eq!(
            fit_order(&curve, &curve.default_noise_floor()).unwrap(),
            OrderEstimate::Exact
        );
    }

    #[test]
    fn smooth_square_error() {
        let f = gallery("smooth_singleton", &json!({"f": "x^2"})).unwrap();
        let ladder = HLadder::default();
        let l = both(&f, 1.0, 8);
        let curve = error_curve(&f, &l, &ladder, CurveSide::Right, 8, &tol()).unwrap();
        for s in &curve.samples {
            let expected = s.h * s.h - s.h * ladder.finest();
            assert!((s.err - expected).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn csv_output() {
        let curve = ErrorCurve {
            x0: 0.0,
            side: CurveSide::Right,
            image_scale: 1.0,
            resolution: 8,
            samples: vec![
                ErrorSample {
                    h: 0.25,
                    err: 0.0625,
                },
                ErrorSample { h: 0.1, err: 0.01 },
            ],
        };
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "h,err");
        assert_eq!(lines[1], "2.5000000000000000e-1,6.2500000000000000e-2");
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 0.01);
    }

    #[test]
    fn strong_example_alpha() {
        let strong = gallery("strong_example", &json!({})).unwrap();
        let probe = alpha_probe(
            &strong,
            0.0,
            Side::Right,
            &HLadder::default(),
            None,
            256,
            &tol(),
            None,
        )
        .unwrap();
        match probe.estimate {
            OrderEstimate::Fitted(fit) => assert!((fit.slope - 1.0).abs() < 0.1, "{fit:?}"),
            OrderEstimate::Exact => panic!("expected a fit"),
        }
    }

    #[test]
    fn constant_alpha_is_exact() {
        let f = gallery("constant", &json!({"points": [[0, 1], [2, 2]]})).unwrap();
        let probe = alpha_probe(
            &f,
            0.0,
            Side::Left,
            &HLadder::default(),
            None,
            8,
            &tol(),
            None,
        )
        .unwrap();
        assert_eq!(probe.estimate, OrderEstimate::Exact);
    }
}
