use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{distance, lex_cmp, Point};
use super::DEFAULT_DEDUP_TOL;
use crate::error::{Error, Result};

/// A nonempty finite point cloud in ℝⁿ standing in for a compact set.
///
/// Points are kept in lexicographic order and no two of them lie within
/// `dedup_tol` of each other, so two sets built from the same points compare
/// equal as lists. Coordinates are stored row-major in one buffer.
#[derive(Clone, PartialEq)]
pub struct CompactSet {
    dim: usize,
    coords: Vec<f64>,
    dedup_tol: f64,
}

impl CompactSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        Self::with_dedup(points, DEFAULT_DEDUP_TOL)
    }

    pub fn with_dedup(points: Vec<Point>, dedup_tol: f64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim, coords, dedup_tol)
    }

    /// Builds a set from rows of coordinates, validating every entry.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.as_ref().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Builds a subset of ℝ¹.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let points = values
            .iter()
            .map(|&v| Point::new(vec![v]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn singleton(p: Point) -> Self {
        let dim = p.dim();
        CompactSet {
            dim,
            coords: p.into_coords(),
            dedup_tol: DEFAULT_DEDUP_TOL,
        }
    }

    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>, dedup_tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if coords.is_empty() {
            return Err(Error::EmptySet);
        }
        if !(dedup_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dedup tolerance must be nonnegative, got {dedup_tol}"
            )));
        }
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        debug_assert_eq!(coords.len() % dim, 0);
        Ok(canonicalize(dim, coords, dedup_tol))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Row-major coordinates; for `dim == 1` these are the sorted values.
    pub(crate) fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn points(&self) -> Vec<Point> {
        self.iter().map(Point::from_slice_unchecked).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Values of a one-dimensional set, in increasing order.
    pub fn scalars(&self) -> Option<Vec<f64>> {
        (self.dim == 1).then(|| self.coords.clone())
    }

    /// Index of a point of the set lying within `tol` of `p`.
    pub fn position(&self, p: &[f64], tol: f64) -> Option<usize> {
        if p.len() != self.dim {
            return None;
        }
        // Candidates have a first coordinate within tol of p[0].
        let lo = self.partition_first(p[0] - tol);
        (lo..self.len())
            .take_while(|&i| self.point(i)[0] <= p[0] + tol)
            .find(|&i| distance(self.point(i), p) <= tol)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.position(p, tol).is_some()
    }

    /// Union with another set of the same dimension.
    pub fn union(&self, other: &CompactSet) -> Result<CompactSet> {
        check_dims(self.dim, other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(canonicalize(
            self.dim,
            coords,
            self.dedup_tol.max(other.dedup_tol),
        ))
    }

    /// Union of a nonempty family of sets.
    pub fn union_all<'a, I>(sets: I) -> Result<CompactSet>
    where
        I: IntoIterator<Item = &'a CompactSet>,
    {
        let mut iter = sets.into_iter();
        let first = iter.next().ok_or(Error::EmptySet)?;
        let mut coords = first.coords.clone();
        let mut tol = first.dedup_tol;
        for s in iter {
            check_dims(first.dim, s.dim)?;
            coords.extend_from_slice(&s.coords);
            tol = tol.max(s.dedup_tol);
        }
        Ok(canonicalize(first.dim, coords, tol))
    }

    /// Applies `f` to every point and re-canonicalizes.
    pub fn map_points<F>(&self, mut f: F) -> Result<CompactSet>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self
            .coords
            .chunks_exact(self.dim)
            .zip(coords.chunks_exact_mut(self.dim))
        {
            f(src, dst);
        }
        Self::from_flat(self.dim, coords, self.dedup_tol)
    }

    fn partition_first(&self, bound: f64) -> usize {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.point(mid)[0] < bound {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn canonicalize(dim: usize, coords: Vec<f64>, dedup_tol: f64) -> CompactSet {
    let n = coords.len() / dim;
    let row = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lex_cmp(row(i), row(j)));

    let mut kept: Vec<f64> = Vec::with_capacity(coords.len());
    for &i in &order {
        let p = row(i);
        let kept_len = kept.len() / dim;
        // Kept points are sorted, so anything within tol sits in a trailing
        // run whose first coordinates are within tol of p[0].
        let duplicate = (0..kept_len)
            .rev()
            .map(|k| &kept[k * dim..(k + 1) * dim])
            .take_while(|q| p[0] - q[0] <= dedup_tol)
            .any(|q| distance(p, q) <= dedup_tol);
        if !duplicate {
            kept.extend_from_slice(p);
        }
    }
    CompactSet {
        dim,
        coords: kept,
        dedup_tol,
    }
}

impl fmt::Debug for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_set();
        for p in self.iter() {
            if p.len() == 1 {
                list.entry(&p[0]);
            } else {
                list.entry(&p);
            }
        }
        list.finish()
    }
}

impl Serialize for CompactSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CompactSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        CompactSet::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
