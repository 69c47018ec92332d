use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval [lo, hi] of ℝ; `lo == hi` is an isolated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite(if lo.is_finite() { hi } else { lo }));
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `resolution + 1` equispaced points including both endpoints; a
    /// degenerate interval yields its single point.
    pub fn sample(&self, resolution: usize) -> Vec<f64> {
        if self.is_degenerate() {
            return vec![self.lo];
        }
        let n = resolution.max(1);
        let step = self.length();
        let mut out: Vec<f64> = (0..n)
            .map(|k| self.lo + step * (k as f64 / n as f64))
            .collect();
        out.push(self.hi);
        out
    }
}

/// A finite union of closed intervals of ℝ, stored as sorted disjoint
/// components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalUnion {
    components: Vec<Interval>,
}

impl IntervalUnion {
    /// Sorts and merges overlapping or touching intervals.
    pub fn new(mut parts: Vec<Interval>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptySet);
        }
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut components: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match components.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => components.push(iv),
            }
        }
        Ok(IntervalUnion { components })
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Interval::new(lo, hi)?])
    }

    pub fn from_points(points: &[f64]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&x| Interval::point(x))
                .collect::<Result<_>>()?,
        )
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    /// Lebesgue measure: the summed component lengths.
    pub fn measure(&self) -> f64 {
        self.components.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let idx = self.components.partition_point(|c| c.hi < x);
        self.components.get(idx).is_some_and(|c| c.contains(x))
    }

    /// The pieces of the closure of `self ∖ other`.
    ///
    /// Each piece keeps the boundary points it shares with `other`, so
    /// `(self ∖ other)` is covered up to its closure.
    pub fn difference_closure(&self, other: &IntervalUnion) -> Vec<Interval> {
        let mut pieces = Vec::new();
        for c in &self.components {
            if c.is_degenerate() {
                if !other.contains(c.lo) {
                    pieces.push(*c);
                }
                continue;
            }
            let mut cursor = c.lo;
            for o in other
                .components
                .iter()
                .filter(|o| o.hi >= c.lo && o.lo <= c.hi)
            {
                if o.lo > cursor {
                    pieces.push(Interval {
                        lo: cursor,
                        hi: o.lo,
                    });
                }
                cursor = cursor.max(o.hi);
            }
            if cursor < c.hi {
                pieces.push(Interval {
                    lo: cursor,
                    hi: c.hi,
                });
            }
        }
        pieces
    }
}

impl TryFrom<Vec<Interval>> for IntervalUnion {
    type Error = Error;

    fn try_from(parts: Vec<Interval>) -> Result<Self> {
        IntervalUnion::new(parts)
    }
}

impl From<IntervalUnion> for Vec<Interval> {
    fn from(u: IntervalUnion) -> Self {
        u.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn equispaced_sampling() {
        assert_eq!(iv(0.0, 1.0).sample(4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(iv(2.0, 2.0).sample(8), vec![2.0]);
        let s = iv(0.0, 2.5).sample(1024);
        assert_eq!(s.len(), 1025);
        assert_eq!(*s.last().unwrap(), 2.5);
    }

    #[test]
    fn union_merges_and_sorts() {
        let u = IntervalUnion::new(vec![
            iv(2.0, 3.0),
            iv(0.0, 1.0),
            iv(1.0, 1.5),
            iv(-1.0, -1.0),
        ])
        .unwrap();
        assert_eq!(
            u.components(),
            &[iv(-1.0, -1.0), iv(0.0, 1.5), iv(2.0, 3.0)]
        );
        assert_eq!(u.measure(), 2.5);
        assert!(u.contains(-1.0) && u.contains(1.2) && !u.contains(1.7) && !u.contains(-0.5));
        assert!(Interval::new(1.0, 0.0).is_err());
        assert_eq!(IntervalUnion::new(vec![]), Err(Error::EmptySet));
    }

    #[test]
    fn difference_closure_pieces() {
        let h = 0.125;
        let grown =
            IntervalUnion::new(vec![iv(0.0, 2.0 + h), Interval::point(-h * h).unwrap()]).unwrap();
        let base = IntervalUnion::single(0.0, 2.0).unwrap();
        assert_eq!(
            grown.difference_closure(&base),
            vec![iv(-h * h, -h * h), iv(2.0, 2.0 + h)]
        );
        assert!(base.difference_closure(&grown).is_empty());

        let holes = IntervalUnion::new(vec![iv(0.2, 0.4), iv(0.6, 0.7)]).unwrap();
        let whole = IntervalUnion::single(0.0, 1.0).unwrap();
        assert_eq!(
            whole.difference_closure(&holes),
            vec![iv(0.0, 0.2), iv(0.4, 0.6), iv(0.7, 1.0)]
        );
    }
}
