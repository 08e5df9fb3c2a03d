//! Zigzag modules and their extension to exact grid bimodules.
//!
//! A zigzag is a sequence of spaces `N_0 .. N_L` with a map between each
//! consecutive pair, pointing either forward or backward. After normalizing
//! to the alternating pattern (even indices are sources), the zigzag embeds
//! on an antidiagonal staircase of a grid: `N_{2i}` sits at `(i, m - i)` and
//! `N_{2i-1}` at `(i, m - i + 1)`. The region above the staircase is filled
//! with pushouts, the region below with pullbacks; both constructions make
//! every unit square commute and be exact, so the filled module decomposes
//! into blocks, and restricting block supports back to the staircase yields
//! the interval decomposition of the zigzag.

use std::collections::BTreeMap;

use crate::blocks::Shape;
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::field::{random_invertible_from, PrimeField, PrimeFieldMatrix};
use crate::module::{GridModule, Orientation, PathModule, Point};
use crate::subspace::{complement, image, kernel, Subspace};

/// Direction of the map between `N_i` and `N_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `N_i -> N_{i+1}`
    Forward,
    /// `N_{i+1} -> N_i`
    Backward,
}

/// An edge of a zigzag: a direction and the matrix of the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagMap {
    pub direction: Direction,
    pub matrix: PrimeFieldMatrix,
}

/// A finite zigzag module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zigzag {
    field: PrimeField,
    dims: Vec<usize>,
    maps: Vec<ZigzagMap>,
}

impl Zigzag {
    pub fn new(field: PrimeField, dims: Vec<usize>, maps: Vec<ZigzagMap>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Structure("zigzag needs at least one space".into()));
        }
        if maps.len() + 1 != dims.len() {
            return Err(Error::Structure(format!(
                "{} maps for {} spaces",
                maps.len(),
                dims.len()
            )));
        }
        for (i, zm) in maps.iter().enumerate() {
            let (rows, cols) = match zm.direction {
                Direction::Forward => (dims[i + 1], dims[i]),
                Direction::Backward => (dims[i], dims[i + 1]),
            };
            if zm.matrix.rows() != rows || zm.matrix.cols() != cols {
                return Err(Error::Structure(format!(
                    "map {i} has shape {}x{}, expected {rows}x{cols}",
                    zm.matrix.rows(),
                    zm.matrix.cols()
                )));
            }
            if zm.matrix.field() != field {
                return Err(Error::Structure("zigzag map over a different field".into()));
            }
        }
        Ok(Zigzag { field, dims, maps })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[ZigzagMap] {
        &self.maps
    }

    /// Highest space index `L`.
    pub fn last_index(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn is_alternating(&self) -> bool {
        self.maps.iter().enumerate().all(|(i, zm)| {
            let want = if i % 2 == 0 { Direction::Forward } else { Direction::Backward };
            zm.direction == want
        })
    }

    /// Alternating form obtained by inserting identity maps, together with
    /// the normalized position of every original index.
    pub fn normalize(&self) -> (Zigzag, Vec<usize>) {
        let mut dims = vec![self.dims[0]];
        let mut maps: Vec<ZigzagMap> = Vec::new();
        let mut positions = vec![0usize];
        for zm in &self.maps {
            let here = dims.len() - 1;
            let want = if here % 2 == 0 { Direction::Forward } else { Direction::Backward };
            if zm.direction != want {
                let id = PrimeFieldMatrix::identity(self.field, *dims.last().unwrap());
                maps.push(ZigzagMap { direction: want, matrix: id });
                dims.push(*dims.last().unwrap());
            }
            let next = match zm.direction {
                Direction::Forward => zm.matrix.rows(),
                Direction::Backward => zm.matrix.cols(),
            };
            maps.push(zm.clone());
            dims.push(next);
            positions.push(dims.len() - 1);
        }
        (Zigzag { field: self.field, dims, maps }, positions)
    }
}

/// Pushout of `B <-f- A -g-> C`: the quotient of `B (+) C` by the image of
/// `(f, -g)`, realized on a deterministic echelon complement basis. Returns
/// the dimension of the apex and the two legs, satisfying
/// `in_b * f = in_c * g`.
pub fn pushout(
    f: &PrimeFieldMatrix,
    g: &PrimeFieldMatrix,
) -> Result<(usize, PrimeFieldMatrix, PrimeFieldMatrix)> {
    if f.cols() != g.cols() {
        return Err(Error::Dimension(format!(
            "pushout legs have domains of dimension {} and {}",
            f.cols(),
            g.cols()
        )));
    }
    let field = f.field();
    let (db, dc) = (f.rows(), g.rows());
    let graph = image(&f.vstack(&g.neg()));
    let total = Subspace::full(field, db + dc);
    let rep = complement(&total, &graph)?;
    // Quotient map in the complement basis: invert [rep | graph] and keep
    // the rows giving the complement coordinates.
    let basis = rep.basis().hstack(graph.basis());
    let inv = basis.inverse().expect("complement plus image spans everything");
    let q = inv.take_rows(&(0..rep.dim()).collect::<Vec<_>>());
    let in_b = q.take_columns(&(0..db).collect::<Vec<_>>());
    let in_c = q.take_columns(&(db..db + dc).collect::<Vec<_>>());
    Ok((rep.dim(), in_b, in_c))
}

/// Pullback of `B -f-> D <-g- C`: the kernel of `(f, -g)` inside `B (+) C`
/// with its coordinate projections, satisfying `f * pr_b = g * pr_c`.
pub fn pullback(
    f: &PrimeFieldMatrix,
    g: &PrimeFieldMatrix,
) -> Result<(usize, PrimeFieldMatrix, PrimeFieldMatrix)> {
    if f.rows() != g.rows() {
        return Err(Error::Dimension(format!(
            "pullback legs have codomains of dimension {} and {}",
            f.rows(),
            g.rows()
        )));
    }
    let (db, dc) = (f.cols(), g.cols());
    let ker = kernel(&f.hstack(&g.neg()));
    let pr_b = ker.basis().take_rows(&(0..db).collect::<Vec<_>>());
    let pr_c = ker.basis().take_rows(&(db..db + dc).collect::<Vec<_>>());
    Ok((ker.dim(), pr_b, pr_c))
}

/// Staircase coordinates of the normalized zigzag: one grid point per space,
/// descending from the top-left corner.
fn staircase_points(last_index: usize) -> (usize, usize, Vec<Point>) {
    let n = last_index.div_ceil(2);
    let m = last_index / 2;
    let points = (0..=last_index)
        .map(|j| {
            if j % 2 == 0 {
                Point::new(j / 2, m - j / 2)
            } else {
                Point::new((j + 1) / 2, m - (j - 1) / 2)
            }
        })
        .collect();
    (n, m, points)
}

/// Embeds an alternating zigzag on the antidiagonal staircase of a grid and
/// fills the rest by pushouts (above) and pullbacks (below). The result
/// passes validation; the staircase point of every zigzag index is returned
/// alongside.
pub fn extend_to_grid(z: &Zigzag) -> Result<(GridModule, Vec<Point>)> {
    if !z.is_alternating() {
        return Err(Error::Structure("extend_to_grid expects an alternating zigzag".into()));
    }
    let field = z.field();
    let last = z.last_index();
    let (n, m, stairs) = staircase_points(last);
    let mut dims: Vec<Option<usize>> = vec![None; (n + 1) * (m + 1)];
    let mut hmaps: Vec<Option<PrimeFieldMatrix>> = vec![None; n * (m + 1)];
    let mut vmaps: Vec<Option<PrimeFieldMatrix>> = vec![None; (n + 1) * m];
    let didx = |p: Point| p.x * (m + 1) + p.y;
    let hidx = |p: Point| p.x * (m + 1) + p.y;
    let vidx = |p: Point| p.x * m + p.y;
    for (j, &p) in stairs.iter().enumerate() {
        dims[didx(p)] = Some(z.dims()[j]);
        if j < last {
            let zm = &z.maps()[j];
            match zm.direction {
                // Horizontal staircase edge p_j -> p_{j+1}.
                Direction::Forward => hmaps[hidx(p)] = Some(zm.matrix.clone()),
                // Vertical edge from p_{j+1} up to p_j.
                Direction::Backward => vmaps[vidx(stairs[j + 1])] = Some(zm.matrix.clone()),
            }
        }
    }
    // Above the staircase: pushout at the top-right corner of each square
    // whose other three corners are known.
    for y in 1..=m {
        for x in 1..=n {
            let q = Point::new(x, y);
            let (a, b, c) = (Point::new(x - 1, y - 1), Point::new(x - 1, y), Point::new(x, y - 1));
            if dims[didx(q)].is_none()
                && dims[didx(a)].is_some()
                && dims[didx(b)].is_some()
                && dims[didx(c)].is_some()
            {
                let f = vmaps[vidx(a)].clone().expect("edge into filled region");
                let g = hmaps[hidx(a)].clone().expect("edge into filled region");
                let (d, in_b, in_c) = pushout(&f, &g)?;
                dims[didx(q)] = Some(d);
                hmaps[hidx(b)] = Some(in_b);
                vmaps[vidx(c)] = Some(in_c);
            }
        }
    }
    // Below the staircase: pullback at the bottom-left corner.
    for y in (0..m).rev() {
        for x in (0..n).rev() {
            let s = Point::new(x, y);
            let (b, c) = (Point::new(x + 1, y), Point::new(x, y + 1));
            if dims[didx(s)].is_none()
                && dims[didx(b)].is_some()
                && dims[didx(c)].is_some()
                && dims[didx(Point::new(x + 1, y + 1))].is_some()
            {
                let f = vmaps[vidx(b)].clone().expect("edge out of filled region");
                let g = hmaps[hidx(c)].clone().expect("edge out of filled region");
                let (d, pr_b, pr_c) = pullback(&f, &g)?;
                dims[didx(s)] = Some(d);
                hmaps[hidx(s)] = Some(pr_b);
                vmaps[vidx(s)] = Some(pr_c);
            }
        }
    }
    let dims: Vec<usize> = dims.into_iter().map(|d| d.expect("fill covers the grid")).collect();
    let hmaps: Vec<PrimeFieldMatrix> = hmaps.into_iter().map(|h| h.expect("fill covers edges")).collect();
    let vmaps: Vec<PrimeFieldMatrix> = vmaps.into_iter().map(|v| v.expect("fill covers edges")).collect();
    let module = GridModule::new(field, n, m, dims, hmaps, vmaps)?;
    let report = module.validate();
    if !report.exact {
        return Err(Error::Inconsistency(
            "pushout/pullback fill produced a non-exact module".into(),
        ));
    }
    Ok((module, stairs))
}

/// Multiset of index intervals `[lo, hi]` within `[0, len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalBarcode {
    len: usize,
    entries: BTreeMap<(usize, usize), usize>,
}

impl IntervalBarcode {
    pub fn empty(len: usize) -> IntervalBarcode {
        IntervalBarcode { len, entries: BTreeMap::new() }
    }

    pub fn from_entries(
        len: usize,
        entries: impl IntoIterator<Item = ((usize, usize), usize)>,
    ) -> Result<IntervalBarcode> {
        let mut ib = IntervalBarcode::empty(len);
        for ((lo, hi), mult) in entries {
            ib.add(lo, hi, mult)?;
        }
        Ok(ib)
    }

    pub fn add(&mut self, lo: usize, hi: usize, mult: usize) -> Result<()> {
        if lo > hi || hi > self.len {
            return Err(Error::Range(format!("interval [{lo}, {hi}] outside [0, {}]", self.len)));
        }
        if mult > 0 {
            *self.entries.entry((lo, hi)).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.entries.iter().map(|(&iv, &m)| (iv, m))
    }

    pub fn multiplicity(&self, lo: usize, hi: usize) -> usize {
        self.entries.get(&(lo, hi)).copied().unwrap_or(0)
    }

    /// Number of intervals containing `i`, with multiplicity.
    pub fn dim_at(&self, i: usize) -> usize {
        self.iter().filter(|&((lo, hi), _)| lo <= i && i <= hi).map(|(_, m)| m).sum()
    }
}

/// Decomposes a zigzag into intervals: normalize, extend to a grid, block
/// decompose, and cut each block support along the staircase. Every maximal
/// staircase run inside a support contributes one interval; runs are mapped
/// back to the caller's indexing.
pub fn zigzag_decompose(z: &Zigzag) -> Result<IntervalBarcode> {
    let (normalized, positions) = z.normalize();
    let (module, stairs) = extend_to_grid(&normalized)?;
    let barcode = decompose(&module)?;
    let (n, m) = barcode.grid();
    let mut out = IntervalBarcode::empty(z.last_index());
    for (shape, mult) in barcode.iter() {
        for (lo, hi) in staircase_runs(&shape, &stairs, n, m) {
            // Original indices whose normalized position falls in the run.
            let orig_lo = positions.iter().position(|&q| q >= lo);
            let orig_hi = positions.iter().rposition(|&q| q <= hi);
            if let (Some(a), Some(b)) = (orig_lo, orig_hi) {
                if a <= b && positions[a] <= hi && positions[b] >= lo {
                    out.add(a, b, mult)?;
                }
            }
        }
    }
    Ok(out)
}

/// Maximal runs of consecutive staircase indices inside a shape support.
fn staircase_runs(shape: &Shape, stairs: &[Point], n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (j, &p) in stairs.iter().enumerate() {
        if shape.contains(p, n, m) {
            current = match current {
                Some((lo, _)) => Some((lo, j)),
                None => Some((j, j)),
            };
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    if let Some(run) = current {
        runs.push(run);
    }
    runs
}

/// Direct sum of interval zigzag modules with alternating directions:
/// identity maps inside each interval, zero outside.
pub fn synth_zigzag(intervals: &IntervalBarcode, len: usize, field: PrimeField) -> Result<Zigzag> {
    for ((lo, hi), _) in intervals.iter() {
        if hi > len || lo > hi {
            return Err(Error::Range(format!("interval [{lo}, {hi}] outside [0, {len}]")));
        }
    }
    let instances: Vec<(usize, usize)> = intervals
        .iter()
        .flat_map(|(iv, mult)| std::iter::repeat_n(iv, mult))
        .collect();
    let at = |i: usize| -> Vec<usize> {
        instances
            .iter()
            .enumerate()
            .filter(|(_, &(lo, hi))| lo <= i && i <= hi)
            .map(|(k, _)| k)
            .collect()
    };
    let dims: Vec<usize> = (0..=len).map(|i| at(i).len()).collect();
    let mut maps = Vec::new();
    for i in 0..len {
        let direction = if i % 2 == 0 { Direction::Forward } else { Direction::Backward };
        let (src, dst) = match direction {
            Direction::Forward => (at(i), at(i + 1)),
            Direction::Backward => (at(i + 1), at(i)),
        };
        let mut matrix = PrimeFieldMatrix::zeros(field, dst.len(), src.len());
        for (col, inst) in src.iter().enumerate() {
            if let Some(row) = dst.iter().position(|d| d == inst) {
                matrix[(row, col)] = 1;
            }
        }
        maps.push(ZigzagMap { direction, matrix });
    }
    Zigzag::new(field, dims, maps)
}

/// Hides the interval structure behind seeded invertible changes of basis at
/// every index. The result is isomorphic to the input.
pub fn conjugate_zigzag(z: &Zigzag, seed: u64) -> Zigzag {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let bases: Vec<PrimeFieldMatrix> = z
        .dims()
        .iter()
        .map(|&d| random_invertible_from(d, &mut rng, z.field()))
        .collect();
    let maps = z
        .maps()
        .iter()
        .enumerate()
        .map(|(i, zm)| {
            let (src, dst) = match zm.direction {
                Direction::Forward => (i, i + 1),
                Direction::Backward => (i + 1, i),
            };
            let inv = bases[src].inverse().expect("invertible by construction");
            ZigzagMap { direction: zm.direction, matrix: bases[dst].mul(&zm.matrix).mul(&inv) }
        })
        .collect();
    Zigzag::new(z.field(), z.dims().to_vec(), maps).expect("shapes preserved")
}

/// Decomposes a path restriction into intervals over the path indices.
/// Segments with no relation split the path; each comparable chunk is a
/// zigzag decomposed on its own, with interval endpoints shifted back.
pub fn path_decompose(path: &PathModule) -> Result<IntervalBarcode> {
    if path.points.is_empty() {
        return Err(Error::Structure("empty path".into()));
    }
    let last = path.points.len() - 1;
    let mut out = IntervalBarcode::empty(last);
    let mut chunk_start = 0usize;
    while chunk_start <= last {
        let mut chunk_end = chunk_start;
        while chunk_end < last && path.maps[chunk_end].orientation != Orientation::None {
            chunk_end += 1;
        }
        let dims = path.spaces[chunk_start..=chunk_end].to_vec();
        let maps = (chunk_start..chunk_end)
            .map(|i| {
                let step = &path.maps[i];
                let direction = match step.orientation {
                    Orientation::Forward => Direction::Forward,
                    Orientation::Backward => Direction::Backward,
                    Orientation::None => unreachable!("chunks stop at unrelated segments"),
                };
                ZigzagMap { direction, matrix: step.map.clone().expect("comparable segment has a map") }
            })
            .collect();
        let z = Zigzag::new(path.field, dims, maps)?;
        for ((lo, hi), mult) in zigzag_decompose(&z)?.iter() {
            out.add(chunk_start + lo, chunk_start + hi, mult)?;
        }
        chunk_start = chunk_end + 1;
    }
    Ok(out)
}

/// Seeded fully random zigzag: dimensions up to `max_dim`, random directions
/// and matrices. Used to exercise the extension on inputs with no planted
/// interval structure.
pub fn random_zigzag(len: usize, max_dim: usize, seed: u64, field: PrimeField) -> Zigzag {
    use rand::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = (0..=len).map(|_| (rng.next_u64() % (max_dim as u64 + 1)) as usize).collect();
    let maps = (0..len)
        .map(|i| {
            let direction = if rng.next_u64() % 2 == 0 { Direction::Forward } else { Direction::Backward };
            let (rows, cols) = match direction {
                Direction::Forward => (dims[i + 1], dims[i]),
                Direction::Backward => (dims[i], dims[i + 1]),
            };
            ZigzagMap { direction, matrix: crate::field::random_matrix_from(rows, cols, &mut rng, field) }
        })
        .collect();
    Zigzag::new(field, dims, maps).expect("generated shapes are consistent")
}
