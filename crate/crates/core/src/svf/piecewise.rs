use serde::{Deserialize, Serialize};

use super::{Domain, Image, Interval, IntervalUnion, Polynomial, SetValuedFunction};
use crate::error::{Error, Result};

/// One piece of a piecewise interval-valued function, as written in a config.
///
/// On `[from, to)` the image is the union of the listed intervals
/// `[lo(x), hi(x)]` and isolated points `p(x)`, every boundary being a
/// polynomial expression in `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    #[serde(default)]
    pub intervals: Vec<[String; 2]>,
    #[serde(default)]
    pub points: Vec<String>,
}

/// Config form of a custom piecewise interval-valued function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub domain: [f64; 2],
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone)]
struct CompiledPiece {
    from: f64,
    to: f64,
    intervals: Vec<(Polynomial, Polynomial)>,
    points: Vec<Polynomial>,
}

/// Piecewise interval-valued function F : (a, b) → K(ℝ).
///
/// Pieces are half-open `[from, to)` except the last one, which also
/// contains its right end, so the function switches branches from the right.
#[derive(Debug, Clone)]
pub struct PiecewiseSvf {
    domain: Domain,
    pieces: Vec<CompiledPiece>,
}

impl PiecewiseSvf {
    pub fn from_spec(spec: &PiecewiseSpec) -> Result<Self> {
        let domain = Domain::new(spec.domain[0], spec.domain[1])?;
        if spec.pieces.is_empty() {
            return Err(Error::InvalidParams(
                "piecewise function without pieces".into(),
            ));
        }
        let mut pieces = Vec::with_capacity(spec.pieces.len());
        for (k, p) in spec.pieces.iter().enumerate() {
            if !(p.from < p.to) {
                return Err(Error::InvalidParams(format!(
                    "piece {k}: empty range [{}, {})",
                    p.from, p.to
                )));
            }
            if p.intervals.is_empty() && p.points.is_empty() {
                return Err(Error::InvalidParams(format!("piece {k}: empty image")));
            }
            if let Some(prev) = spec.pieces.get(k.wrapping_sub(1)) {
                if prev.to != p.from {
                    return Err(Error::InvalidParams(format!(
                        "piece {k} starts at {} but the previous one ends at {}",
                        p.from, prev.to
                    )));
                }
            }
            pieces.push(CompiledPiece {
                from: p.from,
                to: p.to,
                intervals: p
                    .intervals
                    .iter()
                    .map(|[lo, hi]| Ok((Polynomial::parse(lo)?, Polynomial::parse(hi)?)))
                    .collect::<Result<_>>()?,
                points: p
                    .points
                    .iter()
                    .map(|e| Polynomial::parse(e))
                    .collect::<Result<_>>()?,
            });
        }
        let (first, last) = (&pieces[0], &pieces[pieces.len() - 1]);
        if first.from > domain.a || last.to < domain.b {
            return Err(Error::InvalidParams(format!(
                "pieces cover [{}, {}] but the domain is ({}, {})",
                first.from, last.to, domain.a, domain.b
            )));
        }
        Ok(PiecewiseSvf { domain, pieces })
    }

    fn piece_at(&self, x: f64) -> &CompiledPiece {
        let last = self.pieces.len() - 1;
        self.pieces
            .iter()
            .enumerate()
            .find(|(k, p)| p.from <= x && (x < p.to || (*k == last && x <= p.to)))
            .map(|(_, p)| p)
            .unwrap_or(&self.pieces[last])
    }
}

impl SetValuedFunction for PiecewiseSvf {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn dim(&self) -> usize {
        1
    }

    fn image(&self, x: f64) -> Result<Image> {
        let piece = self.piece_at(x);
        let mut parts = Vec::with_capacity(piece.intervals.len() + piece.points.len());
        for (lo, hi) in &piece.intervals {
            let (l, h) = (lo.eval(x), hi.eval(x));
            parts.push(Interval::new(l, h).map_err(|_| {
                Error::InvalidParams(format!(
                    "interval [{lo:?}, {hi:?}] is inverted at x = {x}: [{l}, {h}]"
                ))
            })?);
        }
        for p in &piece.points {
            parts.push(Interval::point(p.eval(x))?);
        }
        Ok(Image::Intervals(IntervalUnion::new(parts)?))
    }

    fn name(&self) -> String {
        "piecewise".to_string()
    }
}
