use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Point(coords))
    }

    /// Point of ℝ¹. Panics on a non-finite value.
    pub fn scalar(x: f64) -> Self {
        Point::new(vec![x]).expect("finite scalar")
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.0, &other.0)
    }

    // Crate-internal constructor for coordinates already known to be finite.
    pub(crate) fn from_slice_unchecked(coords: &[f64]) -> Self {
        Point(coords.to_vec())
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            f.debug_list().entries(self.0.iter()).finish()
        }
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    if a.len() == 1 {
        return a[0].abs();
    }
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lexicographic total order on coordinate slices.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_coordinates() {
        assert_eq!(Point::new(vec![]), Err(Error::ZeroDimension));
        assert!(matches!(
            Point::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn euclidean_distance() {
        let a = Point::new(vec![1.0, 1.0]).unwrap();
        let o = Point::origin(2);
        assert!((a.distance(&o) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Point::new(vec![3.0, 4.0]).unwrap().norm(), 5.0);
    }

    #[test]
    fn lexicographic_order() {
        assert_eq!(lex_cmp(&[0.0, 5.0], &[1.0, 0.0]), Ordering::Less);
        assert_eq!(lex_cmp(&[1.0, 5.0], &[1.0, 0.0]), Ordering::Greater);
        assert_eq!(lex_cmp(&[1.0, 0.0], &[1.0, 0.0]), Ordering::Equal);
    }
}
