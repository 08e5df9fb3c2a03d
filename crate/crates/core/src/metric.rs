//! Bottleneck distance between block barcodes.
//!
//! Blocks match only within their own kind, at the sup-norm distance of
//! their defining corners; bands may instead be left unmatched at half
//! their width, while quadrants can never be dropped. All costs are
//! half-integers in grid units and the arithmetic is exact: a cost is a
//! count of half-units. The distance itself is found by binary search over
//! the finite sorted candidate costs, deciding feasibility at each
//! threshold with an augmenting-path bipartite matching.

use crate::blocks::{Barcode, Shape, ShapeKind};
use crate::error::{Error, Result};

/// An exact nonnegative cost: a number of half grid units, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cost {
    /// `Finite(h)` is the value `h / 2`.
    Finite(u64),
    Infinite,
}

impl Cost {
    pub fn halves(h: u64) -> Cost {
        Cost::Finite(h)
    }

    pub fn whole(units: u64) -> Cost {
        Cost::Finite(2 * units)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn add(self, other: Cost) -> Cost {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl std::fmt::Display for Cost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cost::Infinite => write!(f, "inf"),
            Cost::Finite(h) => {
                if h % 2 == 0 {
                    write!(f, "{}", h / 2)
                } else {
                    write!(f, "{}.5", h / 2)
                }
            }
        }
    }
}

/// Matching cost between two blocks: sup-norm corner distance within a
/// kind, infinite across kinds.
pub fn block_cost(a: Shape, b: Shape) -> Cost {
    if a.kind != b.kind {
        return Cost::Infinite;
    }
    let da = a.a.abs_diff(b.a) as u64;
    let db = a.b.abs_diff(b.b) as u64;
    Cost::whole(da.max(db))
}

/// Cost of leaving a block unmatched: half the width for bands, infinite
/// for quadrants.
pub fn deletion_cost(a: Shape) -> Cost {
    match a.kind {
        ShapeKind::HBand | ShapeKind::VBand => Cost::halves((a.b - a.a + 1) as u64),
        ShapeKind::Birth | ShapeKind::Death => Cost::Infinite,
    }
}

/// Result of a generic bottleneck search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bottleneck<C> {
    /// Both sides empty: nothing to match.
    Zero,
    Finite(C),
    Infinite,
}

/// Minimal threshold at which a feasible partial matching exists: matched
/// pairs must cost at most the threshold, unmatched items at most their
/// deletion cost. `None` stands for an infinite cost.
///
/// Feasibility at a threshold reduces to a perfect matching after adjoining
/// one diagonal partner per item; the search walks the sorted finite
/// candidate costs.
pub fn bottleneck_search<C, FM, FL, FR>(
    left: usize,
    right: usize,
    match_cost: FM,
    del_left: FL,
    del_right: FR,
) -> Bottleneck<C>
where
    C: PartialOrd + Copy,
    FM: Fn(usize, usize) -> Option<C>,
    FL: Fn(usize) -> Option<C>,
    FR: Fn(usize) -> Option<C>,
{
    let mut candidates: Vec<C> = Vec::new();
    for l in 0..left {
        for r in 0..right {
            if let Some(c) = match_cost(l, r) {
                candidates.push(c);
            }
        }
    }
    for l in 0..left {
        if let Some(c) = del_left(l) {
            candidates.push(c);
        }
    }
    for r in 0..right {
        if let Some(c) = del_right(r) {
            candidates.push(c);
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("costs are comparable"));
    candidates.dedup_by(|a, b| a == b);

    // One diagonal partner per item; a perfect matching on
    // (left + right) nodes per side decides feasibility.
    let total = left + right;
    let feasible = |limit: Option<C>| -> bool {
        let leq = |c: Option<C>| match (c, limit) {
            (Some(c), Some(l)) => c <= l,
            _ => false,
        };
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); total];
        for l in 0..left {
            for r in 0..right {
                if leq(match_cost(l, r)) {
                    adjacency[l].push(r);
                }
            }
            if leq(del_left(l)) {
                adjacency[l].push(right + l);
            }
        }
        for r in 0..right {
            let diag = left + r;
            if leq(del_right(r)) {
                adjacency[diag].push(r);
            }
            for l in 0..left {
                adjacency[diag].push(right + l);
            }
        }
        let mut matched_to: Vec<Option<usize>> = vec![None; total];
        let mut size = 0;
        for start in 0..total {
            let mut visited = vec![false; total];
            if augment(start, &adjacency, &mut matched_to, &mut visited) {
                size += 1;
            }
        }
        size == total
    };

    if feasible(None) {
        return Bottleneck::Zero;
    }
    let mut lo = 0usize;
    let mut hi = candidates.len();
    // Invariant: everything below lo is infeasible; hi is feasible or end.
    if hi == 0 || !feasible(Some(candidates[hi - 1])) {
        return Bottleneck::Infinite;
    }
    let mut best = hi - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(Some(candidates[mid])) {
            best = mid;
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Bottleneck::Finite(candidates[best])
}

fn augment(node: usize, adjacency: &[Vec<usize>], matched_to: &mut Vec<Option<usize>>, visited: &mut [bool]) -> bool {
    for &cand in &adjacency[node] {
        if visited[cand] {
            continue;
        }
        visited[cand] = true;
        if matched_to[cand].is_none() || augment(matched_to[cand].unwrap(), adjacency, matched_to, visited) {
            matched_to[cand] = Some(node);
            return true;
        }
    }
    false
}

/// Bottleneck distance between two barcodes on the same grid.
pub fn bottleneck(b1: &Barcode, b2: &Barcode) -> Result<Cost> {
    if b1.grid() != b2.grid() {
        return Err(Error::Dimension(format!(
            "bottleneck requires matching grids, got {:?} and {:?}",
            b1.grid(),
            b2.grid()
        )));
    }
    let items = |b: &Barcode| -> Vec<Shape> {
        b.iter().flat_map(|(s, m)| std::iter::repeat_n(s, m)).collect()
    };
    let (l, r) = (items(b1), items(b2));
    let fin = |c: Cost| match c {
        Cost::Finite(h) => Some(h),
        Cost::Infinite => None,
    };
    let out = bottleneck_search(
        l.len(),
        r.len(),
        |i, j| fin(block_cost(l[i], r[j])),
        |i| fin(deletion_cost(l[i])),
        |j| fin(deletion_cost(r[j])),
    );
    Ok(match out {
        Bottleneck::Zero => Cost::Finite(0),
        Bottleneck::Finite(h) => Cost::Finite(h),
        Bottleneck::Infinite => Cost::Infinite,
    })
}
