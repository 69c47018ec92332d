use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::point::{distance, norm, Point};
use super::set::{check_dims, CompactSet};
use super::Tolerances;
use crate::error::{Error, Result};

// Below this many point pairs the rayon split costs more than it saves.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// dist(x, A) = min over a ∈ A of |x − a|.
pub fn dist_point_set(x: &Point, set: &CompactSet) -> Result<f64> {
    check_dims(set.dim(), x.dim())?;
    Ok(min_distance(x, set))
}

fn min_distance(x: &[f64], set: &CompactSet) -> f64 {
    set.iter()
        .map(|a| distance(x, a))
        .fold(f64::INFINITY, f64::min)
}

/// Π_A(x): every point of A within `proj_tie_tol` of the minimal distance.
pub fn proj_point_set(x: &Point, set: &CompactSet, tol: &Tolerances) -> Result<CompactSet> {
    check_dims(set.dim(), x.dim())?;
    let d = min_distance(x, set);
    let coords: Vec<f64> = set
        .iter()
        .filter(|a| distance(x, a) <= d + tol.proj_tie_tol)
        .flatten()
        .copied()
        .collect();
    CompactSet::from_flat(set.dim(), coords, tol.dedup_tol)
}

/// Π(A, B): the ordered pairs (a, b) with a ∈ Π_A(b) or b ∈ Π_B(a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPairSet {
    pairs: Vec<(Point, Point)>,
}

impl MetricPairSet {
    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].0.dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Point, Point)> {
        self.pairs.iter()
    }

    /// Largest pair length, i.e. the Hausdorff distance of the two sets.
    pub fn max_length(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// Index form of Π(A, B), sorted by (index in A, index in B).
///
/// Because both sets are canonical this order is also the lexicographic order
/// of the point pairs.
pub(crate) fn metric_pair_indices(
    a: &CompactSet,
    b: &CompactSet,
    tol: &Tolerances,
) -> Result<Vec<(usize, usize)>> {
    check_dims(a.dim(), b.dim())?;
    if a.dim() == 1 {
        return Ok(metric_pair_indices_1d(a.flat(), b.flat(), tol.proj_tie_tol));
    }
    Ok(metric_pair_indices_dense(a, b, tol))
}

/// Exhaustive scan of A × B.
fn metric_pair_indices_dense(
    a: &CompactSet,
    b: &CompactSet,
    tol: &Tolerances,
) -> Vec<(usize, usize)> {
    let parallel = a.len() * b.len() >= PARALLEL_THRESHOLD;

    let row_min = nearest_distances(a, b, parallel);
    let col_min = nearest_distances(b, a, parallel);

    let slack = tol.proj_tie_tol;
    let row_pairs = |i: usize| -> Vec<(usize, usize)> {
        let p = a.point(i);
        b.iter()
            .enumerate()
            .filter(|&(j, q)| {
                let d = distance(p, q);
                d <= row_min[i] + slack || d <= col_min[j] + slack
            })
            .map(|(j, _)| (i, j))
            .collect()
    };
    if parallel {
        (0..a.len())
            .into_par_iter()
            .flat_map_iter(row_pairs)
            .collect()
    } else {
        (0..a.len()).flat_map(row_pairs).collect()
    }
}

/// Distance from `x` to the nearest value of the sorted slice `to`.
fn nearest_sorted(x: f64, to: &[f64]) -> f64 {
    let k = to.partition_point(|&y| y < x);
    let after = to.get(k).map_or(f64::INFINITY, |&y| distance(&[x], &[y]));
    let before = k
        .checked_sub(1)
        .map_or(f64::INFINITY, |k| distance(&[x], &[to[k]]));
    after.min(before)
}

/// Indices j with |x − to[j]| ≤ r, found by bisection on the sorted slice.
fn within_sorted(x: f64, r: f64, to: &[f64]) -> impl Iterator<Item = usize> + '_ {
    // The window is widened slightly; membership is decided by `distance`.
    let pad = r + 4.0 * f64::EPSILON * (x.abs() + r);
    let start = to.partition_point(|&y| y < x - pad);
    (start..to.len())
        .take_while(move |&j| to[j] <= x + pad)
        .filter(move |&j| distance(&[x], &[to[j]]) <= r)
}

/// Π(A, B) for sorted one-dimensional sets in O((|A| + |B|) log + |Π|).
fn metric_pair_indices_1d(a: &[f64], b: &[f64], slack: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(a.len() + b.len());
    for (i, &x) in a.iter().enumerate() {
        let r = nearest_sorted(x, b) + slack;
        pairs.extend(within_sorted(x, r, b).map(|j| (i, j)));
    }
    for (j, &y) in b.iter().enumerate() {
        let r = nearest_sorted(y, a) + slack;
        pairs.extend(within_sorted(y, r, a).map(|i| (i, j)));
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn nearest_distances(from: &CompactSet, to: &CompactSet, parallel: bool) -> Vec<f64> {
    if parallel {
        (0..from.len())
            .into_par_iter()
            .map(|i| min_distance(from.point(i), to))
            .collect()
    } else {
        from.iter().map(|p| min_distance(p, to)).collect()
    }
}

/// Exhaustive enumeration of Π(A, B) over A × B.
pub fn metric_pairs(a: &CompactSet, b: &CompactSet, tol: &Tolerances) -> Result<MetricPairSet> {
    let pairs = metric_pair_indices(a, b, tol)?
        .into_iter()
        .map(|(i, j)| {
            (
                Point::from_slice_unchecked(a.point(i)),
                Point::from_slice_unchecked(b.point(j)),
            )
        })
        .collect();
    Ok(MetricPairSet { pairs })
}

/// haus(A, B) = max{|a − b| : (a, b) ∈ Π(A, B)}.
pub fn hausdorff_via_pairs(a: &CompactSet, b: &CompactSet, tol: &Tolerances) -> Result<f64> {
    let pairs = metric_pair_indices(a, b, tol)?;
    Ok(pairs
        .iter()
        .map(|&(i, j)| distance(a.point(i), b.point(j)))
        .fold(0.0, f64::max))
}

/// Classical Hausdorff distance, the larger of the two directed distances.
///
/// Shares no code with the metric-pair route and serves as its oracle.
pub fn hausdorff_direct(a: &CompactSet, b: &CompactSet) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let parallel = a.len() * b.len() >= PARALLEL_THRESHOLD;
    let directed = |from: &CompactSet, to: &CompactSet| {
        nearest_distances(from, to, parallel)
            .into_iter()
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// ‖A‖ = max{|a| : a ∈ A}.
pub fn set_norm(set: &CompactSet) -> f64 {
    set.iter().map(norm).fold(0.0, f64::max)
}

/// {λa + t : a ∈ A}.
pub fn scale_translate(set: &CompactSet, lambda: f64, t: &Point) -> Result<CompactSet> {
    check_dims(set.dim(), t.dim())?;
    if !lambda.is_finite() {
        return Err(Error::NonFinite(lambda));
    }
    set.map_points(|src, dst| {
        for ((d, s), o) in dst.iter_mut().zip(src).zip(t.coords()) {
            *d = lambda * s + o;
        }
    })
}

/// Calls `visit` with the index tuple of every metric chain of `sets`.
///
/// Chains are grown depth-first along the adjacency lists of consecutive
/// metric-pair relations, so only tuples that are chains are ever formed.
fn for_each_chain<F>(sets: &[CompactSet], tol: &Tolerances, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]),
{
    let first = sets.first().ok_or(Error::InvalidArgument(
        "metric chains need at least one set".into(),
    ))?;
    for s in &sets[1..] {
        check_dims(first.dim(), s.dim())?;
    }

    let mut adjacency: Vec<Vec<Vec<usize>>> = Vec::with_capacity(sets.len().saturating_sub(1));
    for w in sets.windows(2) {
        let mut links = vec![Vec::new(); w[0].len()];
        for (i, j) in metric_pair_indices(&w[0], &w[1], tol)? {
            links[i].push(j);
        }
        adjacency.push(links);
    }

    let mut chain = Vec::with_capacity(sets.len());
    for start in 0..first.len() {
        chain.push(start);
        extend_chain(&adjacency, &mut chain, &mut visit);
        chain.pop();
    }
    Ok(())
}

fn extend_chain<F: FnMut(&[usize])>(
    adjacency: &[Vec<Vec<usize>>],
    chain: &mut Vec<usize>,
    visit: &mut F,
) {
    let depth = chain.len() - 1;
    if depth == adjacency.len() {
        visit(chain);
        return;
    }
    let last = chain[depth];
    for &next in &adjacency[depth][last] {
        chain.push(next);
        extend_chain(adjacency, chain, visit);
        chain.pop();
    }
}

/// CH(A₀, …, A_m): all tuples whose consecutive entries are metric pairs.
///
/// For a single set every point is a chain of length one.
pub fn metric_chains(sets: &[CompactSet], tol: &Tolerances) -> Result<Vec<Vec<Point>>> {
    let mut chains = Vec::new();
    for_each_chain(sets, tol, |idx| {
        chains.push(
            idx.iter()
                .zip(sets)
                .map(|(&i, s)| Point::from_slice_unchecked(s.point(i)))
                .collect(),
        );
    })?;
    Ok(chains)
}

/// ⊕ λᵢAᵢ = {Σ λᵢaᵢ : (a₀, …, a_m) ∈ CH(A₀, …, A_m)}.
pub fn metric_linear_combination(
    lambdas: &[f64],
    sets: &[CompactSet],
    tol: &Tolerances,
) -> Result<CompactSet> {
    if lambdas.len() != sets.len() {
        return Err(Error::LengthMismatch {
            what: "coefficients and sets",
            left: lambdas.len(),
            right: sets.len(),
        });
    }
    if let Some(&bad) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let dim = sets.first().map(CompactSet::dim).unwrap_or(1);
    let mut coords = Vec::new();
    let mut acc = vec![0.0; dim];
    for_each_chain(sets, tol, |idx| {
        acc.iter_mut().for_each(|c| *c = 0.0);
        for ((&i, s), &l) in idx.iter().zip(sets).zip(lambdas) {
            for (c, x) in acc.iter_mut().zip(s.point(i)) {
                *c += l * x;
            }
        }
        coords.extend_from_slice(&acc);
    })?;
    CompactSet::from_flat(dim, coords, tol.dedup_tol)
}

/// A ⊖ B = {a − b : (a, b) ∈ Π(A, B)}.
pub fn metric_difference(a: &CompactSet, b: &CompactSet, tol: &Tolerances) -> Result<CompactSet> {
    let dim = a.dim();
    let mut coords = Vec::new();
    for (i, j) in metric_pair_indices(a, b, tol)? {
        coords.extend(a.point(i).iter().zip(b.point(j)).map(|(x, y)| x - y));
    }
    CompactSet::from_flat(dim, coords, tol.dedup_tol)
}
