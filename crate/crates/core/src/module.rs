//! Persistence bimodules over a finite grid.
//!
//! A [`GridModule`] assigns a finite-dimensional GF(p) space to every point
//! of the grid `[0, n] x [0, m]` and a matrix to every unit step rightwards
//! (`hmaps`) and upwards (`vmaps`). Validation checks that every unit square
//! commutes and is exact in the Mayer-Vietoris sense: the sequence
//!
//! ```text
//!   M_s --(h, v)--> M_(x+1,y) (+) M_(x,y+1) --(v - h)--> M_(x+1,y+1)
//! ```
//!
//! has image equal to kernel at the middle term. Exactness of unit squares
//! propagates to all rectangles; that propagation is exercised by tests, not
//! assumed by the validator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{random_invertible_from, PrimeField, PrimeFieldMatrix};
use crate::subspace::{image, kernel, Subspace};

/// A grid point. `x` grows rightwards, `y` upwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: usize,
    pub y: usize,
}

impl Point {
    pub fn new(x: usize, y: usize) -> Self {
        Point { x, y }
    }

    /// Componentwise order (the grid poset).
    pub fn leq(&self, other: &Point) -> bool {
        self.x <= other.x && self.y <= other.y
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Outcome of validating a module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub commutes: bool,
    pub exact: bool,
    pub first_failure: Option<SquareFailure>,
}

/// First unit square that failed, with the dimensions entering the exactness
/// comparison at that square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareFailure {
    /// Lower-left corner of the failing unit square.
    pub corner: Point,
    pub kind: FailureKind,
    pub dim_image: usize,
    pub dim_kernel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Commute,
    Exact,
}

/// Persistence bimodule on the grid `[0, n] x [0, m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridModule {
    field: PrimeField,
    n: usize,
    m: usize,
    dims: Vec<usize>,
    hmaps: Vec<PrimeFieldMatrix>,
    vmaps: Vec<PrimeFieldMatrix>,
}

impl GridModule {
    /// Builds a module, checking every matrix shape against `dims`.
    ///
    /// `dims[x * (m + 1) + y]` is the dimension at `(x, y)`; `hmaps` is
    /// indexed by source points with `x < n`, `vmaps` by source points with
    /// `y < m`, in the same row-major-in-x layout.
    pub fn new(
        field: PrimeField,
        n: usize,
        m: usize,
        dims: Vec<usize>,
        hmaps: Vec<PrimeFieldMatrix>,
        vmaps: Vec<PrimeFieldMatrix>,
    ) -> Result<Self> {
        if dims.len() != (n + 1) * (m + 1) {
            return Err(Error::Structure(format!(
                "dims has {} entries for a {}x{} grid",
                dims.len(),
                n + 1,
                m + 1
            )));
        }
        if hmaps.len() != n * (m + 1) || vmaps.len() != (n + 1) * m {
            return Err(Error::Structure("wrong number of edge maps".into()));
        }
        let module = GridModule { field, n, m, dims, hmaps, vmaps };
        for x in 0..=n {
            for y in 0..=m {
                let d = module.dim(Point::new(x, y));
                if x < n {
                    let h = module.hmap(x, y);
                    if h.rows() != module.dim(Point::new(x + 1, y)) || h.cols() != d {
                        return Err(Error::Structure(format!("hmap at ({x}, {y}) has shape {}x{}", h.rows(), h.cols())));
                    }
                    if h.field() != field {
                        return Err(Error::Structure("edge map over a different field".into()));
                    }
                }
                if y < m {
                    let v = module.vmap(x, y);
                    if v.rows() != module.dim(Point::new(x, y + 1)) || v.cols() != d {
                        return Err(Error::Structure(format!("vmap at ({x}, {y}) has shape {}x{}", v.rows(), v.cols())));
                    }
                    if v.field() != field {
                        return Err(Error::Structure("edge map over a different field".into()));
                    }
                }
            }
        }
        Ok(module)
    }

    /// Module with zero spaces everywhere.
    pub fn zero(field: PrimeField, n: usize, m: usize) -> Self {
        let dims = vec![0; (n + 1) * (m + 1)];
        let hmaps = vec![PrimeFieldMatrix::zeros(field, 0, 0); n * (m + 1)];
        let vmaps = vec![PrimeFieldMatrix::zeros(field, 0, 0); (n + 1) * m];
        GridModule { field, n, m, dims, hmaps, vmaps }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn max_x(&self) -> usize {
        self.n
    }

    pub fn max_y(&self) -> usize {
        self.m
    }

    #[inline]
    fn pt_index(&self, p: Point) -> usize {
        debug_assert!(p.x <= self.n && p.y <= self.m);
        p.x * (self.m + 1) + p.y
    }

    pub fn dim(&self, p: Point) -> usize {
        self.dims[self.pt_index(p)]
    }

    /// Map for the unit step `(x, y) -> (x + 1, y)`.
    pub fn hmap(&self, x: usize, y: usize) -> &PrimeFieldMatrix {
        debug_assert!(x < self.n && y <= self.m);
        &self.hmaps[x * (self.m + 1) + y]
    }

    /// Map for the unit step `(x, y) -> (x, y + 1)`.
    pub fn vmap(&self, x: usize, y: usize) -> &PrimeFieldMatrix {
        debug_assert!(x <= self.n && y < self.m);
        &self.vmaps[x * self.m + y]
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..=self.n).flat_map(move |x| (0..=self.m).map(move |y| Point::new(x, y)))
    }

    /// Checks commutativity and exactness of every unit square.
    ///
    /// Exactness is the set equality `Im(h, v) = Ker(v - h)`; it implies
    /// commutativity of the square, so `exact` implies `commutes`. The first
    /// failing square is classified as `Exact` when the two dimensions
    /// disagree and as `Commute` when the dimensions agree but the spaces or
    /// the composites differ.
    pub fn validate(&self) -> ValidationReport {
        let mut commutes = true;
        let mut exact = true;
        let mut first_failure = None;
        for x in 0..self.n {
            for y in 0..self.m {
                let corner = Point::new(x, y);
                let h_bottom = self.hmap(x, y);
                let v_left = self.vmap(x, y);
                let v_right = self.vmap(x + 1, y);
                let h_top = self.hmap(x, y + 1);
                let square_commutes = v_right.mul(h_bottom) == h_top.mul(v_left);
                if !square_commutes {
                    commutes = false;
                }
                let phi = h_bottom.vstack(v_left);
                let psi = v_right.hstack(&h_top.neg());
                let im = image(&phi);
                let ker = kernel(&psi);
                let square_exact = im == ker;
                if !square_exact {
                    exact = false;
                    if first_failure.is_none() {
                        let kind = if im.dim() != ker.dim() { FailureKind::Exact } else { FailureKind::Commute };
                        first_failure = Some(SquareFailure {
                            corner,
                            kind,
                            dim_image: im.dim(),
                            dim_kernel: ker.dim(),
                        });
                    }
                } else if !square_commutes && first_failure.is_none() {
                    first_failure = Some(SquareFailure {
                        corner,
                        kind: FailureKind::Commute,
                        dim_image: im.dim(),
                        dim_kernel: ker.dim(),
                    });
                }
            }
        }
        ValidationReport { commutes, exact: exact && commutes, first_failure }
    }

    /// Composite map from `s` to `t`, horizontal steps first. On commuting
    /// modules this equals the composite along any monotone path.
    pub fn transport(&self, s: Point, t: Point) -> Result<PrimeFieldMatrix> {
        if !s.leq(&t) {
            return Err(Error::Order(format!("transport requires {s} <= {t}")));
        }
        let mut acc = PrimeFieldMatrix::identity(self.field, self.dim(s));
        for x in s.x..t.x {
            acc = self.hmap(x, s.y).mul(&acc);
        }
        for y in s.y..t.y {
            acc = self.vmap(t.x, y).mul(&acc);
        }
        Ok(acc)
    }

    /// Pointwise direct sum with block-diagonal edge maps.
    pub fn direct_sum(&self, other: &GridModule) -> Result<GridModule> {
        if self.field != other.field || self.n != other.n || self.m != other.m {
            return Err(Error::Structure("direct sum requires matching field and grid".into()));
        }
        let blockdiag = |a: &PrimeFieldMatrix, b: &PrimeFieldMatrix| {
            let mut out = PrimeFieldMatrix::zeros(self.field, a.rows() + b.rows(), a.cols() + b.cols());
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    out[(i, j)] = a[(i, j)];
                }
            }
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    out[(a.rows() + i, a.cols() + j)] = b[(i, j)];
                }
            }
            out
        };
        let dims = self.dims.iter().zip(other.dims.iter()).map(|(a, b)| a + b).collect();
        let hmaps = self.hmaps.iter().zip(other.hmaps.iter()).map(|(a, b)| blockdiag(a, b)).collect();
        let vmaps = self.vmaps.iter().zip(other.vmaps.iter()).map(|(a, b)| blockdiag(a, b)).collect();
        Ok(GridModule { field: self.field, n: self.n, m: self.m, dims, hmaps, vmaps })
    }

    /// Conjugates by a seeded random invertible change of basis at every
    /// point. The result is isomorphic to `self`, with dimensions unchanged.
    pub fn conjugate(&self, seed: u64) -> GridModule {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut bases = Vec::with_capacity(self.dims.len());
        for x in 0..=self.n {
            for y in 0..=self.m {
                let d = self.dim(Point::new(x, y));
                bases.push(random_invertible_from(d, &mut rng, self.field));
            }
        }
        let basis_at = |p: Point| &bases[p.x * (self.m + 1) + p.y];
        let mut hmaps = Vec::with_capacity(self.hmaps.len());
        for x in 0..self.n {
            for y in 0..=self.m {
                let s = Point::new(x, y);
                let t = Point::new(x + 1, y);
                let inv = basis_at(s).inverse().expect("invertible by construction");
                hmaps.push(basis_at(t).mul(self.hmap(x, y)).mul(&inv));
            }
        }
        let mut vmaps = Vec::with_capacity(self.vmaps.len());
        for x in 0..=self.n {
            for y in 0..self.m {
                let s = Point::new(x, y);
                let t = Point::new(x, y + 1);
                let inv = basis_at(s).inverse().expect("invertible by construction");
                vmaps.push(basis_at(t).mul(self.vmap(x, y)).mul(&inv));
            }
        }
        GridModule { field: self.field, n: self.n, m: self.m, dims: self.dims.clone(), hmaps, vmaps }
    }

    /// Smoothing by a nonzero nonnegative grid vector `(ex, ey)`.
    ///
    /// The space at the new point `u` is `Im rho_u^{u+eps}` realized as a
    /// concrete space of its own dimension; edge maps are the maps of `self`
    /// restricted to the chosen image bases. Shrinks the grid to
    /// `(n - ex) x (m - ey)`.
    pub fn smoothing(&self, ex: usize, ey: usize) -> Result<GridModule> {
        if ex == 0 && ey == 0 {
            return Err(Error::Range("smoothing vector must be nonzero".into()));
        }
        if ex > self.n || ey > self.m {
            return Err(Error::Range(format!(
                "smoothing vector ({ex}, {ey}) exceeds grid ({}, {})",
                self.n, self.m
            )));
        }
        let (n2, m2) = (self.n - ex, self.m - ey);
        let shift = |u: Point| Point::new(u.x + ex, u.y + ey);
        let mut bases = Vec::new();
        for x in 0..=n2 {
            for y in 0..=m2 {
                let u = Point::new(x, y);
                let rho = self.transport(u, shift(u))?;
                bases.push(image(&rho));
            }
        }
        let basis_at = |p: Point| &bases[p.x * (m2 + 1) + p.y];
        let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
        // The one-step map of self sends Im rho_u^{u+eps} into
        // Im rho_{u'}^{u'+eps}; re-express it in the chosen bases.
        let induced = |s: Point, t: Point, step: &PrimeFieldMatrix| -> Result<PrimeFieldMatrix> {
            let moved = step.mul(basis_at(s).basis());
            basis_at(t)
                .basis()
                .solve(&moved)
                .ok_or_else(|| Error::Inconsistency("smoothing image not preserved along edge".into()))
        };
        let mut hmaps = Vec::new();
        for x in 0..n2 {
            for y in 0..=m2 {
                let s = Point::new(x, y);
                let t = Point::new(x + 1, y);
                let step = self.hmap(s.x + ex, s.y + ey);
                hmaps.push(induced(s, t, step)?);
            }
        }
        let mut vmaps = Vec::new();
        for x in 0..=n2 {
            for y in 0..m2 {
                let s = Point::new(x, y);
                let t = Point::new(x, y + 1);
                let step = self.vmap(s.x + ex, s.y + ey);
                vmaps.push(induced(s, t, step)?);
            }
        }
        Ok(GridModule { field: self.field, n: n2, m: m2, dims, hmaps, vmaps })
    }

    /// Extends the grid by `k` in both directions, duplicating the last row
    /// and column and inserting identity maps.
    pub fn pad_extend(&self, k: usize) -> GridModule {
        if k == 0 {
            return self.clone();
        }
        let (n2, m2) = (self.n + k, self.m + k);
        let clamp = |p: Point| Point::new(p.x.min(self.n), p.y.min(self.m));
        let mut dims = Vec::new();
        for x in 0..=n2 {
            for y in 0..=m2 {
                dims.push(self.dim(clamp(Point::new(x, y))));
            }
        }
        let mut hmaps = Vec::new();
        for x in 0..n2 {
            for y in 0..=m2 {
                let s = clamp(Point::new(x, y));
                if x < self.n {
                    hmaps.push(self.hmap(s.x, s.y).clone());
                } else {
                    hmaps.push(PrimeFieldMatrix::identity(self.field, self.dim(s)));
                }
            }
        }
        let mut vmaps = Vec::new();
        for x in 0..=n2 {
            for y in 0..m2 {
                let s = clamp(Point::new(x, y));
                if y < self.m {
                    vmaps.push(self.vmap(s.x, s.y).clone());
                } else {
                    vmaps.push(PrimeFieldMatrix::identity(self.field, self.dim(s)));
                }
            }
        }
        GridModule { field: self.field, n: n2, m: m2, dims, hmaps, vmaps }
    }

    /// Restricts to a sequence of grid points. Consecutive comparable points
    /// get the transport between them with its orientation; incomparable
    /// consecutive points carry no relation.
    pub fn restrict_path(&self, path: &[Point]) -> Result<PathModule> {
        for p in path {
            if p.x > self.n || p.y > self.m {
                return Err(Error::Range(format!("path point {p} outside grid")));
            }
        }
        let spaces: Vec<usize> = path.iter().map(|&p| self.dim(p)).collect();
        let mut maps = Vec::new();
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = if a.leq(&b) {
                PathStep { orientation: Orientation::Forward, map: Some(self.transport(a, b)?) }
            } else if b.leq(&a) {
                PathStep { orientation: Orientation::Backward, map: Some(self.transport(b, a)?) }
            } else {
                PathStep { orientation: Orientation::None, map: None }
            };
            maps.push(seg);
        }
        Ok(PathModule { field: self.field, points: path.to_vec(), spaces, maps })
    }
}

/// Direction of the stored map along a path segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Map goes from the earlier path point to the later one.
    Forward,
    /// Map goes from the later path point to the earlier one.
    Backward,
    /// Points incomparable: no relation between them.
    None,
}

#[derive(Debug, Clone)]
pub struct PathStep {
    pub orientation: Orientation,
    pub map: Option<PrimeFieldMatrix>,
}

/// Restriction of a module to a point sequence.
#[derive(Debug, Clone)]
pub struct PathModule {
    pub field: PrimeField,
    pub points: Vec<Point>,
    pub spaces: Vec<usize>,
    pub maps: Vec<PathStep>,
}

/// Kernel of a matrix as a convenience re-export used by validation tests.
pub fn edge_kernel(map: &PrimeFieldMatrix) -> Subspace {
    kernel(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::apply;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Constant module: the field at every point, identities everywhere.
    fn identity_module(p: u64, n: usize, m: usize) -> GridModule {
        let f = gf(p);
        let dims = vec![1; (n + 1) * (m + 1)];
        let hmaps = vec![PrimeFieldMatrix::identity(f, 1); n * (m + 1)];
        let vmaps = vec![PrimeFieldMatrix::identity(f, 1); (n + 1) * m];
        GridModule::new(f, n, m, dims, hmaps, vmaps).unwrap()
    }

    /// The non-exact square: k at three corners, k^2 at the top right, with
    /// the two embeddings e1, e2.
    fn nonexact_square(p: u64) -> GridModule {
        let f = gf(p);
        let e1 = PrimeFieldMatrix::from_rows(f, 2, 1, &[vec![1], vec![0]]).unwrap();
        let e2 = PrimeFieldMatrix::from_rows(f, 2, 1, &[vec![0], vec![1]]).unwrap();
        let id = PrimeFieldMatrix::identity(f, 1);
        GridModule::new(
            f,
            1,
            1,
            vec![1, 1, 1, 2],
            // hmaps: (0,0) -> (1,0) is id, (0,1) -> (1,1) is e2
            vec![id.clone(), e2],
            // vmaps: (0,0) -> (0,1) is id, (1,0) -> (1,1) is e1
            vec![id, e1],
        )
        .unwrap()
    }

    #[test]
    fn identity_module_validates() {
        for (n, m) in [(0, 0), (2, 3), (4, 1)] {
            let report = identity_module(2, n, m).validate();
            assert!(report.commutes && report.exact, "grid {n}x{m}");
            assert!(report.first_failure.is_none());
        }
    }

    #[test]
    fn nonexact_square_rejected_with_dims() {
        let report = nonexact_square(2).validate();
        assert!(!report.exact);
        let failure = report.first_failure.unwrap();
        assert_eq!(failure.kind, FailureKind::Exact);
        assert_eq!(failure.corner, Point::new(0, 0));
        assert_eq!(failure.dim_image, 1);
        assert_eq!(failure.dim_kernel, 0);
    }

    #[test]
    fn structural_error_before_algebra() {
        let f = gf(2);
        // hmap shape disagrees with dims.
        let bad = GridModule::new(
            f,
            1,
            0,
            vec![1, 1],
            vec![PrimeFieldMatrix::zeros(f, 2, 1)],
            vec![],
        );
        assert!(matches!(bad, Err(Error::Structure(_))));
    }

    #[test]
    fn transport_examples() {
        let m = identity_module(5, 3, 2);
        let s = Point::new(1, 1);
        assert_eq!(m.transport(s, s).unwrap(), PrimeFieldMatrix::identity(gf(5), 1));
        assert_eq!(m.transport(s, Point::new(2, 1)).unwrap(), *m.hmap(1, 1));
        assert!(m.transport(Point::new(2, 1), s).is_err());
    }

    #[test]
    fn transport_path_independence_needs_commuting() {
        // On a commuting module both staircases agree.
        let m = identity_module(3, 2, 2);
        let s = Point::new(0, 0);
        let t = Point::new(2, 1);
        let horiz_first = m.transport(s, t).unwrap();
        // vertical first
        let mid = Point::new(0, 1);
        let vert_first = m.transport(mid, t).unwrap().mul(&m.transport(s, mid).unwrap());
        assert_eq!(horiz_first, vert_first);
    }

    #[test]
    fn direct_sum_adds_dims() {
        let a = identity_module(2, 1, 1);
        let z = GridModule::zero(gf(2), 1, 1);
        let sum = a.direct_sum(&z).unwrap();
        assert_eq!(sum, a);
        let both = a.direct_sum(&a).unwrap();
        for p in both.points() {
            assert_eq!(both.dim(p), a.dim(p) * 2);
        }
        assert!(both.validate().exact);
        // grid mismatch
        assert!(a.direct_sum(&identity_module(2, 2, 1)).is_err());
    }

    #[test]
    fn conjugate_preserves_validation_and_dims() {
        let m = identity_module(101, 2, 2);
        let c = m.conjugate(7);
        assert_eq!(m.validate(), ValidationReport { commutes: true, exact: true, first_failure: None });
        assert!(c.validate().exact);
        for p in m.points() {
            assert_eq!(m.dim(p), c.dim(p));
        }
        // dim <= 1 spaces admit few bases; over a large field the maps move.
        assert_eq!(c.conjugate(0).dims, c.dims);
        // A module of zero spaces is fixed by any conjugation.
        let zero = GridModule::zero(gf(101), 2, 2);
        assert_eq!(zero.conjugate(9), zero);
    }

    #[test]
    fn smoothing_identity_module() {
        let m = identity_module(2, 3, 2);
        for (ex, ey) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let s = m.smoothing(ex, ey).unwrap();
            assert_eq!(s.max_x(), 3 - ex);
            assert_eq!(s.max_y(), 2 - ey);
            for p in s.points() {
                assert_eq!(s.dim(p), 1);
            }
            assert!(s.validate().exact);
        }
        assert!(m.smoothing(0, 0).is_err());
        assert!(m.smoothing(4, 0).is_err());
    }

    #[test]
    fn pad_extend_duplicates_border() {
        let m = identity_module(2, 1, 1);
        assert_eq!(m.pad_extend(0), m);
        let p = m.pad_extend(2);
        assert_eq!(p.max_x(), 3);
        assert_eq!(p.max_y(), 3);
        for i in 1..=2 {
            for y in 0..=3usize {
                assert_eq!(p.dim(Point::new(1 + i, y.min(1))), m.dim(Point::new(1, y.min(1))));
            }
        }
        assert!(p.validate().exact);
    }

    #[test]
    fn restrict_path_variants() {
        let m = identity_module(2, 2, 2);
        // Length-1 path: single space, no maps.
        let single = m.restrict_path(&[Point::new(1, 1)]).unwrap();
        assert_eq!(single.spaces, vec![1]);
        assert!(single.maps.is_empty());
        // Comparable pair, both orientations.
        let fwd = m.restrict_path(&[Point::new(0, 0), Point::new(1, 1)]).unwrap();
        assert_eq!(fwd.maps[0].orientation, Orientation::Forward);
        let bwd = m.restrict_path(&[Point::new(1, 1), Point::new(0, 0)]).unwrap();
        assert_eq!(bwd.maps[0].orientation, Orientation::Backward);
        // Incomparable pair: no relation.
        let anti = m.restrict_path(&[Point::new(0, 1), Point::new(1, 0)]).unwrap();
        assert_eq!(anti.maps[0].orientation, Orientation::None);
        assert!(anti.maps[0].map.is_none());
    }

    #[test]
    fn switching_lemma_on_exact_squares() {
        // On every exact unit square, Ker(v right) = h bottom (Ker(v left)).
        let m = identity_module(3, 2, 2).conjugate(11);
        assert!(m.validate().exact);
        for x in 0..2 {
            for y in 0..2 {
                let lhs = edge_kernel(m.vmap(x + 1, y));
                let rhs = apply(m.hmap(x, y), &edge_kernel(m.vmap(x, y))).unwrap();
                assert_eq!(lhs, rhs, "switching at ({x}, {y})");
            }
        }
    }

    #[test]
    fn rectangle_exactness_follows_from_unit_squares() {
        let m = identity_module(2, 3, 3).conjugate(5);
        assert!(m.validate().exact);
        for s in m.points() {
            for t in m.points() {
                if !(s.leq(&t)) || (s.x == t.x && s.y == t.y) {
                    continue;
                }
                let h_bottom = m.transport(s, Point::new(t.x, s.y)).unwrap();
                let v_left = m.transport(s, Point::new(s.x, t.y)).unwrap();
                let v_right = m.transport(Point::new(t.x, s.y), t).unwrap();
                let h_top = m.transport(Point::new(s.x, t.y), t).unwrap();
                let phi = h_bottom.vstack(&v_left);
                let psi = v_right.hstack(&h_top.neg());
                assert_eq!(image(&phi), crate::subspace::kernel(&psi), "rectangle {s} to {t}");
            }
        }
    }

    #[test]
    fn smoothing_needs_exactness_to_stay_exact() {
        // Exactness is preserved by smoothing on conjugated identity modules.
        let m = identity_module(101, 3, 3).conjugate(3);
        let s = m.smoothing(1, 1).unwrap();
        assert!(s.validate().exact);
    }
}
