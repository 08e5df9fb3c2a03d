//! Interlevel-set persistence of a real-valued function on a finite graph.
//!
//! The poset of nonempty bounded open intervals, ordered by inclusion, is
//! discretized by the critical grid: the sorted distinct vertex values,
//! interleaved with midpoints and padded by one value on each side. A pair
//! of level indices `i < j` stands for the open interval
//! `(levels[i], levels[j])`; the space attached to it is the free space on
//! the connected components of the preimage, and the maps are the incidence
//! matrices induced by inclusions of intervals.
//!
//! Subdividing every edge at every level it crosses makes each preimage a
//! union of cells (vertices and open subedge segments), so components are
//! computed by union-find over cells. The Mayer-Vietoris argument makes the
//! resulting diagram exact on the interval poset; pairs with `i >= j` have
//! an empty interval and are filled by pullbacks, which keeps the full
//! rectangle exact (extending by zero spaces instead would break exactness
//! whenever two disjoint preimages merge in the union).
//!
//! Grid convention: the pair `(i, j)` sits at `x = k - 2 - i`, `y = j - 1`
//! where `k` is the number of levels, so both axes increase as the interval
//! grows; the interval pairs occupy the region `x + y >= n` of the
//! `[0, n] x [0, n]` grid with `n = k - 2`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blocks::{Barcode, Shape, ShapeKind};
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::field::{PrimeField, PrimeFieldMatrix};
use crate::module::{GridModule, Point};
use crate::zigzag::pullback;

/// A finite graph with one real value per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledGraph {
    values: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl LabeledGraph {
    pub fn new(values: Vec<f64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::Structure("vertex values must be finite".into()));
            }
        }
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::Structure(format!("self-loop at vertex {u}")));
            }
            if u >= values.len() || v >= values.len() {
                return Err(Error::Structure(format!("edge ({u}, {v}) out of range")));
            }
        }
        Ok(LabeledGraph { values, edges })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// The discretized interval poset: strictly increasing level values.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGrid {
    pub levels: Vec<f64>,
}

impl IntervalGrid {
    /// Number of levels.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Highest grid coordinate; the grid is `[0, n] x [0, n]`.
    pub fn grid_max(&self) -> usize {
        self.levels.len().saturating_sub(2)
    }

    /// Level-index pair of a grid point, when its interval is nonempty.
    pub fn pair_of(&self, p: Point) -> Option<(usize, usize)> {
        let n = self.grid_max();
        if p.x + p.y < n {
            return None;
        }
        Some((n - p.x, p.y + 1))
    }

    /// Grid point of a level-index pair `i < j`.
    pub fn point_of(&self, i: usize, j: usize) -> Point {
        let n = self.grid_max();
        Point::new(n - i, j - 1)
    }
}

/// Sorted distinct vertex values interleaved with midpoints, padded by one
/// value below the minimum and one above the maximum.
pub fn critical_grid(graph: &LabeledGraph) -> IntervalGrid {
    let mut distinct: Vec<f64> = graph.values().to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.is_empty() {
        return IntervalGrid { levels: Vec::new() };
    }
    let mut levels = Vec::with_capacity(2 * distinct.len() + 1);
    levels.push(distinct[0] - 1.0);
    for (idx, &v) in distinct.iter().enumerate() {
        if idx > 0 {
            levels.push((distinct[idx - 1] + v) / 2.0);
        }
        levels.push(v);
    }
    levels.push(distinct[distinct.len() - 1] + 1.0);
    IntervalGrid { levels }
}

/// Cells of the subdivided graph: original and subdivision vertices carry a
/// level index; segments are open subedge interiors spanning one elementary
/// level gap (or a single level, for edges with equal endpoint values).
#[derive(Debug, Clone)]
struct Subdivision {
    vertex_level: Vec<usize>,
    vertex_count: usize,
    /// (lo level, hi level, endpoint cell a, endpoint cell b); hi - lo <= 1.
    segments: Vec<(usize, usize, usize, usize)>,
    original: usize,
}

impl Subdivision {
    fn cell_count(&self) -> usize {
        self.vertex_count + self.segments.len()
    }

    /// Is the cell inside the open interval `(levels[i], levels[j])`?
    fn included(&self, cell: usize, i: usize, j: usize) -> bool {
        if cell < self.vertex_count {
            let l = self.vertex_level[cell];
            i < l && l < j
        } else {
            let (lo, hi, _, _) = self.segments[cell - self.vertex_count];
            if lo == hi {
                i < lo && lo < j
            } else {
                i <= lo && hi <= j
            }
        }
    }
}

fn build_subdivision(graph: &LabeledGraph, grid: &IntervalGrid) -> Subdivision {
    let level_of = |v: f64| -> usize {
        grid.levels
            .iter()
            .position(|&l| l == v)
            .expect("vertex values appear among the levels")
    };
    let mut vertex_level: Vec<usize> = graph.values().iter().map(|&v| level_of(v)).collect();
    let original = vertex_level.len();
    let mut segments = Vec::new();
    for &(u, v) in graph.edges() {
        let (lu, lv) = (vertex_level[u], vertex_level[v]);
        if lu == lv {
            segments.push((lu, lu, u, v));
            continue;
        }
        let (mut prev, lo, hi, far) = if lu < lv { (u, lu, lv, v) } else { (v, lv, lu, u) };
        for level in lo + 1..hi {
            let mid = vertex_level.len();
            vertex_level.push(level);
            segments.push((level - 1, level, prev, mid));
            prev = mid;
        }
        segments.push((hi - 1, hi, prev, far));
    }
    Subdivision { vertex_count: vertex_level.len(), vertex_level, segments, original }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind { parent: (0..len).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping component labels canonical.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Components of the preimage of `(levels[i], levels[j])`: for each included
/// cell its component id, plus the component count. Components are numbered
/// by their smallest cell index.
fn components(sub: &Subdivision, i: usize, j: usize) -> (Vec<Option<usize>>, usize) {
    let cells = sub.cell_count();
    let mut uf = UnionFind::new(cells);
    for (s, &(_, _, a, b)) in sub.segments.iter().enumerate() {
        let seg_cell = sub.vertex_count + s;
        if sub.included(seg_cell, i, j) {
            if sub.included(a, i, j) {
                uf.union(seg_cell, a);
            }
            if sub.included(b, i, j) {
                uf.union(seg_cell, b);
            }
        }
    }
    let mut label_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut labels = vec![None; cells];
    for cell in 0..cells {
        if sub.included(cell, i, j) {
            let root = uf.find(cell);
            let next = label_of_root.len();
            let label = *label_of_root.entry(root).or_insert(next);
            labels[cell] = Some(label);
        }
    }
    (labels, label_of_root.len())
}

/// The ingested interlevel module: the exact grid bimodule, the level grid,
/// and per interval pair the components listed as sorted original-vertex
/// sets (segments-only components give empty sets).
#[derive(Debug, Clone)]
pub struct InterlevelModule {
    pub module: GridModule,
    pub grid: IntervalGrid,
    pub components: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
}

/// Builds the H0 interlevel module of a function on a graph over GF(p).
pub fn interlevel_module(graph: &LabeledGraph, field: PrimeField) -> Result<InterlevelModule> {
    let grid = critical_grid(graph);
    if grid.is_empty() {
        // No vertices: a single zero space.
        return Ok(InterlevelModule {
            module: GridModule::zero(field, 0, 0),
            grid,
            components: BTreeMap::new(),
        });
    }
    let sub = build_subdivision(graph, &grid);
    let n = grid.grid_max();
    let size = (n + 1) * (n + 1);
    let didx = |p: Point| p.x * (n + 1) + p.y;
    let mut labels: Vec<Option<(Vec<Option<usize>>, usize)>> = vec![None; size];
    let mut dims: Vec<Option<usize>> = vec![None; size];
    for x in 0..=n {
        for y in 0..=n {
            let p = Point::new(x, y);
            if let Some((i, j)) = grid.pair_of(p) {
                let (l, count) = components(&sub, i, j);
                dims[didx(p)] = Some(count);
                labels[didx(p)] = Some((l, count));
            }
        }
    }
    // Incidence matrix of an inclusion of intervals: component of a cell in
    // the smaller preimage maps to its component in the larger one.
    let incidence = |small: &(Vec<Option<usize>>, usize), large: &(Vec<Option<usize>>, usize)| {
        let mut map = PrimeFieldMatrix::zeros(field, large.1, small.1);
        for (cell, lab) in small.0.iter().enumerate() {
            if let Some(col) = lab {
                let row = large.0[cell].expect("smaller preimage is contained in the larger");
                map[(row, *col)] = 1;
            }
        }
        map
    };
    let mut hmaps: Vec<Option<PrimeFieldMatrix>> = vec![None; n * (n + 1)];
    let mut vmaps: Vec<Option<PrimeFieldMatrix>> = vec![None; (n + 1) * n];
    let hidx = |p: Point| p.x * (n + 1) + p.y;
    let vidx = |p: Point| p.x * n + p.y;
    for x in 0..=n {
        for y in 0..=n {
            let p = Point::new(x, y);
            if labels[didx(p)].is_none() {
                continue;
            }
            let here = labels[didx(p)].as_ref().unwrap();
            if x < n {
                let right = labels[didx(Point::new(x + 1, y))].as_ref().unwrap();
                hmaps[hidx(p)] = Some(incidence(here, right));
            }
            if y < n {
                let up = labels[didx(Point::new(x, y + 1))].as_ref().unwrap();
                vmaps[vidx(p)] = Some(incidence(here, up));
            }
        }
    }
    // Empty intervals, below the antidiagonal: fill by pullbacks so the
    // whole rectangle stays exact.
    for y in (0..n).rev() {
        for x in (0..n).rev() {
            let s = Point::new(x, y);
            if dims[didx(s)].is_some() {
                continue;
            }
            let f = vmaps[vidx(Point::new(x + 1, y))].clone().expect("fill proceeds inward");
            let g = hmaps[hidx(Point::new(x, y + 1))].clone().expect("fill proceeds inward");
            let (d, pr_b, pr_c) = pullback(&f, &g)?;
            dims[didx(s)] = Some(d);
            hmaps[hidx(s)] = Some(pr_b);
            vmaps[vidx(s)] = Some(pr_c);
        }
    }
    let dims: Vec<usize> = dims.into_iter().map(|d| d.expect("fill covers the grid")).collect();
    let hmaps: Vec<PrimeFieldMatrix> = hmaps.into_iter().map(|h| h.expect("fill covers edges")).collect();
    let vmaps: Vec<PrimeFieldMatrix> = vmaps.into_iter().map(|v| v.expect("fill covers edges")).collect();
    let module = GridModule::new(field, n, n, dims, hmaps, vmaps)?;
    let report = module.validate();
    if !report.exact {
        return Err(Error::Inconsistency(
            "interlevel ingestion produced a non-exact module".into(),
        ));
    }
    let mut component_sets = BTreeMap::new();
    for x in 0..=n {
        for y in 0..=n {
            let p = Point::new(x, y);
            if let (Some((i, j)), Some((l, count))) = (grid.pair_of(p), labels[didx(p)].as_ref()) {
                let mut sets = vec![Vec::new(); *count];
                for cell in 0..sub.original {
                    if let Some(lab) = l[cell] {
                        sets[lab].push(cell);
                    }
                }
                component_sets.insert((i, j), sets);
            }
        }
    }
    Ok(InterlevelModule { module, grid, components: component_sets })
}

/// Decomposes the interlevel module; returns the barcode in grid coordinates
/// together with the level sequence for mapping corners back to values.
pub fn interlevel_barcode(graph: &LabeledGraph, field: PrimeField) -> Result<(Barcode, Vec<f64>)> {
    let ingested = interlevel_module(graph, field)?;
    let barcode = decompose(&ingested.module)?;
    Ok((barcode, ingested.grid.levels))
}

/// Level coordinates of a block's defining corner: the `x` coordinate reads
/// a left interval endpoint (reversed axis), the `y` coordinate a right one.
pub fn shape_level_coords(shape: &Shape, levels: &[f64]) -> (f64, f64) {
    let n = levels.len() - 2;
    match shape.kind {
        // Corner (a, b): left endpoint from x = a, right endpoint from y = b.
        ShapeKind::Birth | ShapeKind::Death => (levels[n - shape.a], levels[shape.b + 1]),
        // Bands are parameterized along one axis only; report its two ends.
        ShapeKind::HBand => (levels[shape.a + 1], levels[shape.b + 1]),
        ShapeKind::VBand => (levels[n - shape.b], levels[n - shape.a]),
    }
}
