//! Canonical block shapes on a finite grid, barcodes, and synthesis.
//!
//! On the grid `[0, n] x [0, m]` the four shape families are
//!
//! * `Birth(a, b)`  — up-closed box `[a, n] x [b, m]`,
//! * `Death(a, b)`  — down-closed box `[0, a] x [0, b]` with `a < n, b < m`,
//! * `HBand(a, b)`  — full-width band `[0, n] x [a, b]` with `b < m`,
//! * `VBand(a, b)`  — full-height band `[a, b] x [0, m]` with `b < n`.
//!
//! The strict bounds are the dedup convention: any region touching both the
//! top row and the right column is a birth quadrant, full-height regions
//! touching the right column are births, and so on, mirroring the tie-break
//! that assigns doubly unbounded shapes to the birth quadrants. Under these
//! bounds the supports of distinct canonical shapes are distinct.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeField, PrimeFieldMatrix};
use crate::module::{GridModule, Point};

/// Shape family, in canonical enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Birth,
    VBand,
    HBand,
    Death,
}

impl ShapeKind {
    pub fn letter(&self) -> char {
        match self {
            ShapeKind::Birth => 'b',
            ShapeKind::VBand => 'v',
            ShapeKind::HBand => 'h',
            ShapeKind::Death => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<ShapeKind> {
        match c {
            'b' => Some(ShapeKind::Birth),
            'v' => Some(ShapeKind::VBand),
            'h' => Some(ShapeKind::HBand),
            'd' => Some(ShapeKind::Death),
            _ => None,
        }
    }
}

/// A canonical block shape. Meaning of `(a, b)` depends on the kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub kind: ShapeKind,
    pub a: usize,
    pub b: usize,
}

impl Shape {
    pub fn birth(a: usize, b: usize) -> Shape {
        Shape { kind: ShapeKind::Birth, a, b }
    }

    pub fn death(a: usize, b: usize) -> Shape {
        Shape { kind: ShapeKind::Death, a, b }
    }

    pub fn hband(a: usize, b: usize) -> Shape {
        Shape { kind: ShapeKind::HBand, a, b }
    }

    pub fn vband(a: usize, b: usize) -> Shape {
        Shape { kind: ShapeKind::VBand, a, b }
    }

    /// Canonicity bounds for the grid `[0, n] x [0, m]`.
    pub fn is_canonical(&self, n: usize, m: usize) -> bool {
        match self.kind {
            ShapeKind::Birth => self.a <= n && self.b <= m,
            ShapeKind::Death => self.a < n && self.b < m,
            ShapeKind::HBand => self.a <= self.b && self.b < m,
            ShapeKind::VBand => self.a <= self.b && self.b < n,
        }
    }

    /// Inclusive support box `(lower left, upper right)`.
    pub fn support_box(&self, n: usize, m: usize) -> (Point, Point) {
        match self.kind {
            ShapeKind::Birth => (Point::new(self.a, self.b), Point::new(n, m)),
            ShapeKind::Death => (Point::new(0, 0), Point::new(self.a, self.b)),
            ShapeKind::HBand => (Point::new(0, self.a), Point::new(n, self.b)),
            ShapeKind::VBand => (Point::new(self.a, 0), Point::new(self.b, m)),
        }
    }

    pub fn contains(&self, t: Point, n: usize, m: usize) -> bool {
        let (lo, hi) = self.support_box(n, m);
        lo.leq(&t) && t.leq(&hi)
    }

    /// Componentwise minimum of the support box.
    pub fn min_point(&self) -> Point {
        match self.kind {
            ShapeKind::Birth => Point::new(self.a, self.b),
            ShapeKind::Death => Point::new(0, 0),
            ShapeKind::HBand => Point::new(0, self.a),
            ShapeKind::VBand => Point::new(self.a, 0),
        }
    }

    /// All points of the support, row-major from the minimum.
    pub fn support_points(&self, n: usize, m: usize) -> Vec<Point> {
        let (lo, hi) = self.support_box(n, m);
        let mut pts = Vec::new();
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                pts.push(Point::new(x, y));
            }
        }
        pts
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({}, {})", self.kind.letter(), self.a, self.b)
    }
}

/// Support membership test plus the witness minimum, validated.
pub fn shape_geometry(shape: Shape, n: usize, m: usize) -> Result<(impl Fn(Point) -> bool, Point)> {
    if !shape.is_canonical(n, m) {
        return Err(Error::Structure(format!("shape {shape} not canonical on grid ({n}, {m})")));
    }
    let min = shape.min_point();
    Ok((move |t: Point| shape.contains(t, n, m), min))
}

/// All canonical shapes in deterministic order: births, vertical bands,
/// horizontal bands, deaths; lexicographic `(a, b)` within each kind.
pub fn enumerate_shapes(n: usize, m: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=m {
            out.push(Shape::birth(a, b));
        }
    }
    for a in 0..n {
        for b in a..n {
            out.push(Shape::vband(a, b));
        }
    }
    for a in 0..m {
        for b in a..m {
            out.push(Shape::hband(a, b));
        }
    }
    for a in 0..n {
        for b in 0..m {
            out.push(Shape::death(a, b));
        }
    }
    out
}

/// Multiset of canonical shapes with multiplicities on a fixed grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    n: usize,
    m: usize,
    entries: BTreeMap<Shape, usize>,
}

impl Barcode {
    pub fn empty(n: usize, m: usize) -> Barcode {
        Barcode { n, m, entries: BTreeMap::new() }
    }

    pub fn from_entries(n: usize, m: usize, entries: impl IntoIterator<Item = (Shape, usize)>) -> Result<Barcode> {
        let mut bc = Barcode::empty(n, m);
        for (shape, mult) in entries {
            bc.add(shape, mult)?;
        }
        Ok(bc)
    }

    pub fn add(&mut self, shape: Shape, mult: usize) -> Result<()> {
        if !shape.is_canonical(self.n, self.m) {
            return Err(Error::Structure(format!(
                "shape {shape} not canonical on grid ({}, {})",
                self.n, self.m
            )));
        }
        if mult > 0 {
            *self.entries.entry(shape).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Entries in canonical shape order.
    pub fn iter(&self) -> impl Iterator<Item = (Shape, usize)> + '_ {
        self.entries.iter().map(|(&s, &m)| (s, m))
    }

    pub fn multiplicity(&self, shape: Shape) -> usize {
        self.entries.get(&shape).copied().unwrap_or(0)
    }

    pub fn total_blocks(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of multiplicities of shapes whose support contains `t`.
    pub fn dim_at(&self, t: Point) -> usize {
        self.iter().filter(|(s, _)| s.contains(t, self.n, self.m)).map(|(_, mult)| mult).sum()
    }
}

/// Builds the direct sum of block modules described by a barcode: identity
/// maps inside each support, zero maps elsewhere.
pub fn synth(barcode: &Barcode, field: PrimeField) -> GridModule {
    let (n, m) = barcode.grid();
    // One column slot per block instance, allocated in canonical order.
    let instances: Vec<Shape> = barcode
        .iter()
        .flat_map(|(shape, mult)| std::iter::repeat_n(shape, mult))
        .collect();
    let covering = |t: Point| -> Vec<usize> {
        instances
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(t, n, m))
            .map(|(i, _)| i)
            .collect()
    };
    let mut dims = Vec::new();
    for x in 0..=n {
        for y in 0..=m {
            dims.push(covering(Point::new(x, y)).len());
        }
    }
    let edge = |s: Point, t: Point| -> PrimeFieldMatrix {
        let src = covering(s);
        let dst = covering(t);
        let mut map = PrimeFieldMatrix::zeros(field, dst.len(), src.len());
        for (col, inst) in src.iter().enumerate() {
            if let Some(row) = dst.iter().position(|d| d == inst) {
                map[(row, col)] = 1;
            }
        }
        map
    };
    let mut hmaps = Vec::new();
    for x in 0..n {
        for y in 0..=m {
            hmaps.push(edge(Point::new(x, y), Point::new(x + 1, y)));
        }
    }
    let mut vmaps = Vec::new();
    for x in 0..=n {
        for y in 0..m {
            vmaps.push(edge(Point::new(x, y), Point::new(x, y + 1)));
        }
    }
    GridModule::new(field, n, m, dims, hmaps, vmaps).expect("synth produces consistent shapes")
}

/// Deterministic random barcode: between 1 and `max_blocks` shapes, kinds
/// weighted 4:2:2:2 (birth:death:hband:vband), parameters uniform over the
/// canonical ranges.
pub fn random_barcode<R: RngCore>(n: usize, m: usize, max_blocks: usize, rng: &mut R) -> Barcode {
    let mut barcode = Barcode::empty(n, m);
    let count = 1 + (rng.next_u64() as usize) % max_blocks;
    for _ in 0..count {
        let shape = loop {
            let roll = rng.next_u64() % 10;
            let kind = match roll {
                0..=3 => ShapeKind::Birth,
                4 | 5 => ShapeKind::Death,
                6 | 7 => ShapeKind::HBand,
                _ => ShapeKind::VBand,
            };
            let uniform = |hi: usize, rng: &mut R| (rng.next_u64() as usize) % (hi + 1);
            let candidate = match kind {
                ShapeKind::Birth => Shape::birth(uniform(n, rng), uniform(m, rng)),
                ShapeKind::Death if n > 0 && m > 0 => Shape::death(uniform(n - 1, rng), uniform(m - 1, rng)),
                ShapeKind::HBand if m > 0 => {
                    let (a, b) = (uniform(m - 1, rng), uniform(m - 1, rng));
                    Shape::hband(a.min(b), a.max(b))
                }
                ShapeKind::VBand if n > 0 => {
                    let (a, b) = (uniform(n - 1, rng), uniform(n - 1, rng));
                    Shape::vband(a.min(b), a.max(b))
                }
                // Kind impossible on a degenerate grid: draw again.
                _ => continue,
            };
            break candidate;
        };
        barcode.add(shape, 1).expect("sampled shapes are canonical");
    }
    barcode
}

/// Seeded generator of exact modules with known ground truth: sample a
/// barcode, synthesize it, and hide the block structure behind a seeded
/// change of basis at every point.
pub fn random_exact_module(
    n: usize,
    m: usize,
    max_blocks: usize,
    seed: u64,
    field: PrimeField,
) -> (GridModule, Barcode) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let barcode = random_barcode(n, m, max_blocks, &mut rng);
    let plain = synth(&barcode, field);
    let hidden = plain.conjugate(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    (hidden, barcode)
}
