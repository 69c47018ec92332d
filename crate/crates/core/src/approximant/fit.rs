use serde::{Deserialize, Serialize};

use super::ErrorCurve;
use crate::error::{Error, Result};

pub const MIN_USABLE_RUNGS: usize = 3;

/// Threshold `absolute + per_h·h` at or below which a value counts as noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseFloor {
    pub absolute: f64,
    pub per_h: f64,
}

impl NoiseFloor {
    pub fn absolute(c: f64) -> Self {
        NoiseFloor {
            absolute: c,
            per_h: 0.0,
        }
    }

    pub fn proportional(c: f64) -> Self {
        NoiseFloor {
            absolute: 0.0,
            per_h: c,
        }
    }

    pub fn at(&self, h: f64) -> f64 {
        self.absolute + self.per_h * h
    }
}

/// Least-squares line log err = slope·log h + intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub rungs_used: usize,
    /// Smallest and largest h that entered the fit.
    pub h_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderEstimate {
    /// Every rung is at or below the noise floor.
    Exact,
    Fitted(OrderFit),
}

impl OrderEstimate {
    /// The fitted slope, or +∞ for an exact curve.
    pub fn slope(&self) -> f64 {
        match self {
            OrderEstimate::Exact => f64::INFINITY,
            OrderEstimate::Fitted(fit) => fit.slope,
        }
    }
}

/// Empirical order of `curve` from the rungs above `noise_floor`.
pub fn fit_order(curve: &ErrorCurve, noise_floor: &NoiseFloor) -> Result<OrderEstimate> {
    let usable: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|s| s.h > 0.0 && s.err > noise_floor.at(s.h))
        .map(|s| (s.h.ln(), s.err.ln()))
        .collect();
    if usable.is_empty() {
        return Ok(OrderEstimate::Exact);
    }
    if usable.len() < MIN_USABLE_RUNGS {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            needed: MIN_USABLE_RUNGS,
        });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "all usable rungs share one step size".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = usable
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let used = curve
        .samples
        .iter()
        .filter(|s| s.h > 0.0 && s.err > noise_floor.at(s.h));
    let (lo, hi) = used.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        (lo.min(s.h), hi.max(s.h))
    });
    Ok(OrderEstimate::Fitted(OrderFit {
        slope,
        intercept,
        rms_residual: (rss / n).sqrt(),
        rungs_used: usable.len(),
        h_range: [lo, hi],
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximant::{CurveSide, ErrorSample};
    use proptest::prelude::*;

    fn curve(points: impl IntoIterator<Item = (f64, f64)>) -> ErrorCurve {
        ErrorCurve {
            x0: 0.0,
            side: CurveSide::Right,
            image_scale: 1.0,
            resolution: 256,
            samples: points
                .into_iter()
                .map(|(h, err)| ErrorSample { h, err })
                .collect(),
        }
    }

    fn power_curve(c: f64, p: f64, rungs: usize) -> ErrorCurve {
        curve((0..rungs).map(|k| {
            let h = 0.25 * 0.5f64.powi(k as i32);
            (h, c * h.powf(p))
        }))
    }

    #[test]
    fn recovers_square_and_linear() {
        for p in [1.0, 2.0] {
            let est = fit_order(&power_curve(1.0, p, 12), &NoiseFloor::default()).unwrap();
            assert!((est.slope() - p).abs() < 1e-9);
        }
    }

    #[test]
    fn all_zero_is_exact() {
        let c = curve((0..6).map(|k| (0.5f64.powi(k), 0.0)));
        assert_eq!(
            fit_order(&c, &NoiseFloor::default()).unwrap(),
            OrderEstimate::Exact
        );
        assert_eq!(OrderEstimate::Exact.slope(), f64::INFINITY);
    }

    #[test]
    fn floor_excludes_small_rungs() {
        let c = power_curve(1.0, 2.0, 12);
        let OrderEstimate::Fitted(fit) = fit_order(&c, &NoiseFloor::proportional(0.01)).unwrap()
        else {
            panic!("expected a fit");
        };
        assert_eq!(fit.rungs_used, 5);
        assert_eq!(fit.h_range, [0.015625, 0.25]);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn too_few_rungs() {
        let c = power_curve(1.0, 2.0, 2);
        assert_eq!(
            fit_order(&c, &NoiseFloor::default()),
            Err(Error::InsufficientData {
                usable: 2,
                needed: 3
            })
        );
    }

    #[test]
    fn json_shape() {
        let est = fit_order(&power_curve(2.0, 1.0, 4), &NoiseFloor::default()).unwrap();
        let v = serde_json::to_value(&est).unwrap();
        assert_eq!(v["kind"], "fitted");
        assert_eq!(v["rungs_used"], 4);
        assert_eq!(
            serde_json::to_value(OrderEstimate::Exact).unwrap()["kind"],
            "exact"
        );
    }

    proptest! {
        #[test]
        fn synthetic_power_law(c in 1e-3f64..1e3, p in 0.2f64..4.0, rungs in 3usize..14) {
            let est = fit_order(&power_curve(c, p, rungs), &NoiseFloor::default()).unwrap();
            let OrderEstimate::Fitted(fit) = est else { panic!("expected a fit") };
            prop_assert!((fit.slope - p).abs() < 1e-6);
            prop_assert!((fit.intercept - c.ln()).abs() < 1e-6);
        }
    }
}
