//! Built-in set-valued functions with known metric derivatives.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Domain, Image, Interval, IntervalUnion, Polynomial, SetValuedFunction};
use crate::calculus::Side;
use crate::error::{Error, Result};
use crate::set_core::{hausdorff_direct, CompactSet, Point};

/// Names accepted by [`gallery`].
pub fn gallery_names() -> &'static [&'static str] {
    &[
        "two_powers",
        "interval_growth",
        "two_curves_2d",
        "strong_example",
        "constant",
        "smooth_singleton",
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum GalleryKind {
    /// F(x) = {x^α, x^β} on (0, 2).
    TwoPowers { alpha: u32, beta: u32 },
    /// F(x) = [0, 1 + x] on (−1, 1).
    IntervalGrowth,
    /// F(x) = {(x^α, x^β), (x^(α+1), x^(β+1))} ⊂ ℝ² on (0, 2).
    TwoCurves2d { alpha: u32, beta: u32 },
    /// F(x) = [0, 2 − x²] for x < 0 and [0, 2 + x] ∪ {−x²} for x ≥ 0, on (−1, 1).
    StrongExample,
    /// F(x) = A₀.
    Constant { value: Image },
    /// F(x) = {f(x)} for a polynomial f.
    SmoothSingleton { f: Polynomial, source: String },
}

/// A gallery member together with its closed-form derivative data.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryFunction {
    name: &'static str,
    kind: GalleryKind,
    domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerParams {
    #[serde(default = "one")]
    alpha: u32,
    #[serde(default = "two")]
    beta: u32,
}

fn one() -> u32 {
    1
}

fn two() -> u32 {
    2
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    points: Option<Vec<Vec<f64>>>,
    intervals: Option<Vec<[f64; 2]>>,
    domain: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingletonParams {
    f: String,
    domain: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn parse_params<T: for<'de> Deserialize<'de>>(name: &str, params: &Value) -> Result<T> {
    let params = if params.is_null() {
        Value::Object(Default::default())
    } else {
        params.clone()
    };
    serde_json::from_value(params).map_err(|e| Error::InvalidParams(format!("{name}: {e}")))
}

fn check_powers(name: &str, p: &PowerParams) -> Result<()> {
    if p.alpha == 0 || p.beta == 0 {
        return Err(Error::InvalidParams(format!(
            "{name}: exponents must be positive integers"
        )));
    }
    if p.alpha == p.beta {
        return Err(Error::InvalidParams(format!(
            "{name}: alpha and beta must differ (both {})",
            p.alpha
        )));
    }
    if p.alpha.max(p.beta) > 64 {
        return Err(Error::InvalidParams(format!("{name}: exponents above 64")));
    }
    Ok(())
}

fn domain_or(d: Option<[f64; 2]>, default: (f64, f64)) -> Result<Domain> {
    let [a, b] = d.unwrap_or([default.0, default.1]);
    Domain::new(a, b)
}

/// Builds a gallery member from its name and JSON parameters.
pub fn gallery(name: &str, params: &Value) -> Result<GalleryFunction> {
    let (name, kind, domain) = match name {
        "two_powers" => {
            let p: PowerParams = parse_params(name, params)?;
            check_powers(name, &p)?;
            let kind = GalleryKind::TwoPowers {
                alpha: p.alpha,
                beta: p.beta,
            };
            ("two_powers", kind, Domain::new(0.0, 2.0)?)
        }
        "interval_growth" => {
            parse_params::<NoParams>(name, params)?;
            (
                "interval_growth",
                GalleryKind::IntervalGrowth,
                Domain::new(-1.0, 1.0)?,
            )
        }
        "two_curves_2d" => {
            let p: PowerParams = parse_params(name, params)?;
            check_powers(name, &p)?;
            let kind = GalleryKind::TwoCurves2d {
                alpha: p.alpha,
                beta: p.beta,
            };
            ("two_curves_2d", kind, Domain::new(0.0, 2.0)?)
        }
        "strong_example" => {
            parse_params::<NoParams>(name, params)?;
            (
                "strong_example",
                GalleryKind::StrongExample,
                Domain::new(-1.0, 1.0)?,
            )
        }
        "constant" => {
            let p: ConstantParams = parse_params(name, params)?;
            let value = match (p.points, p.intervals) {
                (Some(rows), None) => {
                    let set = CompactSet::from_rows(&rows)?;
                    Image::Points(set.points())
                }
                (None, Some(ivs)) => Image::Intervals(IntervalUnion::new(
                    ivs.iter()
                        .map(|[lo, hi]| Interval::new(*lo, *hi))
                        .collect::<Result<_>>()?,
                )?),
                _ => {
                    return Err(Error::InvalidParams(
                        "constant: give exactly one of `points` or `intervals`".into(),
                    ))
                }
            };
            let domain = domain_or(p.domain, (-1.0, 1.0))?;
            ("constant", GalleryKind::Constant { value }, domain)
        }
        "smooth_singleton" => {
            let p: SingletonParams = parse_params(name, params)?;
            let f = Polynomial::parse(&p.f)?;
            let domain = domain_or(p.domain, (-2.0, 2.0))?;
            let kind = GalleryKind::SmoothSingleton { f, source: p.f };
            ("smooth_singleton", kind, domain)
        }
        other => return Err(Error::UnknownGallery(other.to_string())),
    };
    Ok(GalleryFunction { name, kind, domain })
}

fn pt(coords: Vec<f64>) -> Point {
    Point::new(coords).expect("gallery formulas produce finite points")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn close_pt(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y))
}

impl GalleryFunction {
    pub fn kind(&self) -> &GalleryKind {
        &self.kind
    }

    /// Closed-form D^M_± F(x₀)|_y, where known.
    pub fn analytic_derivative(&self, x0: f64, side: Side, y: &[f64]) -> Option<Image> {
        if !self.domain.contains(x0) {
            return None;
        }
        let singles = |vals: Vec<Vec<f64>>| Some(Image::Points(vals.into_iter().map(pt).collect()));
        match &self.kind {
            GalleryKind::TwoPowers { alpha, beta } => {
                let (a, b) = (*alpha as f64, *beta as f64);
                if close(x0, 1.0) && close(y[0], 1.0) {
                    return singles(vec![vec![a], vec![b]]);
                }
                if close(y[0], x0.powf(a)) {
                    singles(vec![vec![a * x0.powf(a - 1.0)]])
                } else if close(y[0], x0.powf(b)) {
                    singles(vec![vec![b * x0.powf(b - 1.0)]])
                } else {
                    None
                }
            }
            GalleryKind::TwoCurves2d { alpha, beta } => {
                let (a, b) = (*alpha as f64, *beta as f64);
                let first = vec![a * x0.powf(a - 1.0), b * x0.powf(b - 1.0)];
                let second = vec![(a + 1.0) * x0.powf(a), (b + 1.0) * x0.powf(b)];
                if close(x0, 1.0) && close_pt(y, &[1.0, 1.0]) {
                    return singles(vec![vec![a, b], vec![a + 1.0, b + 1.0]]);
                }
                if close_pt(y, &[x0.powf(a), x0.powf(b)]) {
                    singles(vec![first])
                } else if close_pt(y, &[x0.powf(a + 1.0), x0.powf(b + 1.0)]) {
                    singles(vec![second])
                } else {
                    None
                }
            }
            GalleryKind::IntervalGrowth => {
                let top = 1.0 + x0;
                if !(0.0..=top).contains(&y[0]) {
                    return None;
                }
                if close(y[0], top) {
                    match side {
                        Side::Right => {
                            Some(Image::Intervals(IntervalUnion::single(0.0, 1.0).ok()?))
                        }
                        Side::Left => singles(vec![vec![1.0]]),
                    }
                } else {
                    singles(vec![vec![0.0]])
                }
            }
            GalleryKind::StrongExample => {
                if x0 != 0.0 || !(0.0..=2.0).contains(&y[0]) {
                    return None;
                }
                if side == Side::Right && close(y[0], 2.0) {
                    Some(Image::Intervals(IntervalUnion::single(0.0, 1.0).ok()?))
                } else {
                    singles(vec![vec![0.0]])
                }
            }
            GalleryKind::Constant { .. } => singles(vec![vec![0.0; self.dim()]]),
            GalleryKind::SmoothSingleton { f, .. } => singles(vec![vec![f.derivative().eval(x0)]]),
        }
    }

    /// Whether (x₀, y) is an interior point of Graph(F), where known.
    pub fn analytic_is_interior(&self, x0: f64, y: &[f64]) -> Option<bool> {
        match &self.kind {
            GalleryKind::IntervalGrowth => Some(0.0 < y[0] && y[0] < 1.0 + x0),
            GalleryKind::StrongExample if x0 < 0.0 => Some(0.0 < y[0] && y[0] < 2.0 - x0 * x0),
            GalleryKind::StrongExample => Some(0.0 < y[0] && y[0] < 2.0 + x0),
            GalleryKind::Constant {
                value: Image::Intervals(u),
            } => Some(u.components().iter().any(|c| c.lo < y[0] && y[0] < c.hi)),
            GalleryKind::TwoPowers { .. }
            | GalleryKind::TwoCurves2d { .. }
            | GalleryKind::SmoothSingleton { .. }
            | GalleryKind::Constant { .. } => Some(false),
        }
    }

    /// Closed-form haus(F(x), L^M F(x)) for the local approximant at x₀.
    pub fn analytic_approximant_error(&self, x0: f64, x: f64) -> Option<f64> {
        if !self.domain.contains(x0) || !self.domain.contains(x) {
            return None;
        }
        let h = x - x0;
        match &self.kind {
            GalleryKind::StrongExample if x0 == 0.0 => Some(h * h),
            GalleryKind::StrongExample => None,
            GalleryKind::IntervalGrowth if h >= 0.0 => Some(0.0),
            GalleryKind::IntervalGrowth => None,
            GalleryKind::Constant { .. } => Some(0.0),
            GalleryKind::TwoPowers { .. }
            | GalleryKind::TwoCurves2d { .. }
            | GalleryKind::SmoothSingleton { .. } => {
                // Finite images: build L(x) from the closed-form derivatives.
                let side = if h >= 0.0 { Side::Right } else { Side::Left };
                let Ok(Image::Points(base)) = self.image(x0) else {
                    return None;
                };
                let mut approx = Vec::new();
                for y in &base {
                    let Image::Points(ds) = self.analytic_derivative(x0, side, y)? else {
                        return None;
                    };
                    approx.extend(
                        ds.iter()
                            .map(|d| pt(y.iter().zip(d.iter()).map(|(a, b)| a + h * b).collect())),
                    );
                }
                let Ok(Image::Points(exact)) = self.image(x) else {
                    return None;
                };
                let l = CompactSet::new(approx).ok()?;
                let f = CompactSet::new(exact).ok()?;
                hausdorff_direct(&f, &l).ok()
            }
        }
    }
}

impl SetValuedFunction for GalleryFunction {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn dim(&self) -> usize {
        match &self.kind {
            GalleryKind::TwoCurves2d { .. } => 2,
            GalleryKind::Constant { value } => value.dim(),
            _ => 1,
        }
    }

    fn image(&self, x: f64) -> Result<Image> {
        Ok(match &self.kind {
            GalleryKind::TwoPowers { alpha, beta } => Image::Points(vec![
                Point::scalar(x.powi(*alpha as i32)),
                Point::scalar(x.powi(*beta as i32)),
            ]),
            GalleryKind::IntervalGrowth => Image::Intervals(
                IntervalUnion::single(0.0, 1.0 + x).expect("1 + x > 0 on the domain"),
            ),
            GalleryKind::TwoCurves2d { alpha, beta } => {
                let (a, b) = (*alpha as i32, *beta as i32);
                Image::Points(vec![
                    pt(vec![x.powi(a), x.powi(b)]),
                    pt(vec![x.powi(a + 1), x.powi(b + 1)]),
                ])
            }
            GalleryKind::StrongExample => {
                let parts = if x < 0.0 {
                    vec![Interval {
                        lo: 0.0,
                        hi: 2.0 - x * x,
                    }]
                } else {
                    vec![
                        Interval {
                            lo: 0.0,
                            hi: 2.0 + x,
                        },
                        Interval {
                            lo: -x * x,
                            hi: -x * x,
                        },
                    ]
                };
                Image::Intervals(IntervalUnion::new(parts).expect("nonempty"))
            }
            GalleryKind::Constant { value } => value.clone(),
            GalleryKind::SmoothSingleton { f, .. } => Image::Points(vec![Point::scalar(f.eval(x))]),
        })
    }

    fn name(&self) -> String {
        match &self.kind {
            GalleryKind::TwoPowers { alpha, beta } | GalleryKind::TwoCurves2d { alpha, beta } => {
                format!("{}(alpha={alpha}, beta={beta})", self.name)
            }
            GalleryKind::SmoothSingleton { source, .. } => format!("{}(f={source})", self.name),
            _ => self.name.to_string(),
        }
    }
}

/// Short description of each gallery member, for listings.
#[derive(Debug, Clone, Serialize)]
pub struct GalleryInfo {
    pub name: &'static str,
    pub formula: &'static str,
    pub domain: (f64, f64),
    pub params: &'static str,
}

impl GalleryInfo {
    pub fn all() -> Vec<GalleryInfo> {
        vec![
            GalleryInfo {
                name: "two_powers",
                formula: "F(x) = {x^alpha, x^beta}",
                domain: (0.0, 2.0),
                params: r#"{"alpha": 1, "beta": 2} (positive integers, alpha != beta)"#,
            },
            GalleryInfo {
                name: "interval_growth",
                formula: "F(x) = [0, 1 + x]",
                domain: (-1.0, 1.0),
                params: "{}",
            },
            GalleryInfo {
                name: "two_curves_2d",
                formula: "F(x) = {(x^alpha, x^beta), (x^(alpha+1), x^(beta+1))}",
                domain: (0.0, 2.0),
                params: r#"{"alpha": 1, "beta": 2} (positive integers, alpha != beta)"#,
            },
            GalleryInfo {
                name: "strong_example",
                formula: "F(x) = [0, 2 - x^2] for x < 0; [0, 2 + x] U {-x^2} for x >= 0",
                domain: (-1.0, 1.0),
                params: "{}",
            },
            GalleryInfo {
                name: "constant",
                formula: "F(x) = A0",
                domain: (-1.0, 1.0),
                params: r#"{"points": [[1], [4]]} or {"intervals": [[0, 1]]}, optional "domain": [a, b]"#,
            },
            GalleryInfo {
                name: "smooth_singleton",
                formula: "F(x) = {f(x)}, f a polynomial",
                domain: (-2.0, 2.0),
                params: r#"{"f": "x^3"}, optional "domain": [a, b]"#,
            },
        ]
    }
}
