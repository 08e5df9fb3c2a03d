//! The decomposition engine.
//!
//! For a validated exact module, the multiplicity of a block shape is read
//! off from four families of subspaces attached to the cuts bounding the
//! shape's support. With `l`, `r` the left/right cuts on the x-axis and `v`,
//! `w` the bottom/top cuts on the y-axis, the shape subspaces at a support
//! point are
//!
//! ```text
//!   Ima+ = Ima+_l ∩ Ima+_v              Ker+ = Ker+_r ∩ Ker+_w
//!   Ima- = (Ima-_l + Ima-_v) ∩ Ima+     Ker- = (Ker-_r + Ker-_w) ∩ Ker+
//! ```
//!
//! and the quotient dimension of `V+ = Ima+ ∩ Ker+` over
//! `V- = Ima+ ∩ Ker- + Ima- ∩ Ker+` is the multiplicity. On a finite grid
//! the unions and intersections across a cut stabilize at the adjacent
//! index, so each cut subspace is a single image or kernel of a transport.
//! Every support is a box with a global minimum, which serves as the witness
//! point; the quotient dimension is constant over the support (a tested
//! property, see `check_lemmas`).

use rayon::prelude::*;

use crate::blocks::{enumerate_shapes, Barcode, Shape};
use crate::error::{Error, Result};
use crate::field::PrimeFieldMatrix;
use crate::module::{GridModule, Point};
use crate::subspace::{apply, complement, image, kernel, preimage, sum_intersect, Subspace};

/// A two-sided partition of one grid axis: indices `< position` fall on the
/// lower side, indices `>= position` on the upper side. `position = 0` makes
/// the lower side empty; `position = L + 1` makes the upper side empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cut {
    pub axis: Axis,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The four cuts delimiting a shape support: `l`, `r` on the x-axis and
/// `v`, `w` on the y-axis, with support box `[l, r-1] x [v, w-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeCuts {
    pub l: Cut,
    pub r: Cut,
    pub v: Cut,
    pub w: Cut,
}

impl Shape {
    /// Bounding cuts of the support on the grid `[0, n] x [0, m]`.
    pub fn cuts(&self, n: usize, m: usize) -> ShapeCuts {
        let (lo, hi) = self.support_box(n, m);
        ShapeCuts {
            l: Cut { axis: Axis::X, position: lo.x },
            r: Cut { axis: Axis::X, position: hi.x + 1 },
            v: Cut { axis: Axis::Y, position: lo.y },
            w: Cut { axis: Axis::Y, position: hi.y + 1 },
        }
    }
}

/// Cut subspaces of `M_t`. Images exist when `t` is on the upper side of
/// the cut, kernels when it is on the lower side; the other components are
/// `None`.
#[derive(Debug, Clone)]
pub struct CutSubspaces {
    pub ima_minus: Option<Subspace>,
    pub ima_plus: Option<Subspace>,
    pub ker_minus: Option<Subspace>,
    pub ker_plus: Option<Subspace>,
}

/// Shape subspaces of `M_t` for `t` in the support.
#[derive(Debug, Clone)]
pub struct ShapeSubspaces {
    pub ima_minus: Subspace,
    pub ima_plus: Subspace,
    pub ker_minus: Subspace,
    pub ker_plus: Subspace,
}

/// Transport tables for one module: every within-row horizontal composite
/// and within-column vertical composite, built once and shared by the
/// per-shape computations (which are pure reads and may run concurrently).
pub(crate) struct Engine<'a> {
    module: &'a GridModule,
    /// rows[y][x1][x2 - x1] = transport (x1, y) -> (x2, y)
    rows: Vec<Vec<Vec<PrimeFieldMatrix>>>,
    /// cols[x][y1][y2 - y1] = transport (x, y1) -> (x, y2)
    cols: Vec<Vec<Vec<PrimeFieldMatrix>>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(module: &'a GridModule) -> Self {
        let (n, m) = (module.max_x(), module.max_y());
        let mut rows = Vec::with_capacity(m + 1);
        for y in 0..=m {
            let mut per_start = Vec::with_capacity(n + 1);
            for x1 in 0..=n {
                let mut chain = vec![PrimeFieldMatrix::identity(module.field(), module.dim(Point::new(x1, y)))];
                for x2 in x1 + 1..=n {
                    let next = module.hmap(x2 - 1, y).mul(chain.last().unwrap());
                    chain.push(next);
                }
                per_start.push(chain);
            }
            rows.push(per_start);
        }
        let mut cols = Vec::with_capacity(n + 1);
        for x in 0..=n {
            let mut per_start = Vec::with_capacity(m + 1);
            for y1 in 0..=m {
                let mut chain = vec![PrimeFieldMatrix::identity(module.field(), module.dim(Point::new(x, y1)))];
                for y2 in y1 + 1..=m {
                    let next = module.vmap(x, y2 - 1).mul(chain.last().unwrap());
                    chain.push(next);
                }
                per_start.push(chain);
            }
            cols.push(per_start);
        }
        Engine { module, rows, cols }
    }

    fn htransport(&self, y: usize, x1: usize, x2: usize) -> &PrimeFieldMatrix {
        &self.rows[y][x1][x2 - x1]
    }

    fn vtransport(&self, x: usize, y1: usize, y2: usize) -> &PrimeFieldMatrix {
        &self.cols[x][y1][y2 - y1]
    }

    /// Realized cut subspaces at `t`: on a grid the chains across a cut
    /// stabilize at the adjacent index, so a single transport suffices per
    /// component.
    fn cut_subspaces(&self, t: Point, cut: Cut) -> CutSubspaces {
        let module = self.module;
        let field = module.field();
        let dim_t = module.dim(t);
        let (coord, len) = match cut.axis {
            Axis::X => (t.x, module.max_x()),
            Axis::Y => (t.y, module.max_y()),
        };
        let c = cut.position;
        debug_assert!(c <= len + 1);
        let transport_from = |src: usize| match cut.axis {
            Axis::X => self.htransport(t.y, src, t.x),
            Axis::Y => self.vtransport(t.x, src, t.y),
        };
        let transport_to = |dst: usize| match cut.axis {
            Axis::X => self.htransport(t.y, t.x, dst),
            Axis::Y => self.vtransport(t.x, t.y, dst),
        };
        let mut out = CutSubspaces { ima_minus: None, ima_plus: None, ker_minus: None, ker_plus: None };
        if coord >= c {
            out.ima_plus = Some(image(transport_from(c)));
            out.ima_minus = Some(if c == 0 {
                Subspace::zero(field, dim_t)
            } else {
                image(transport_from(c - 1))
            });
        } else {
            out.ker_minus = Some(kernel(transport_to(c - 1)));
            out.ker_plus = Some(if c == len + 1 {
                Subspace::full(field, dim_t)
            } else {
                kernel(transport_to(c))
            });
        }
        out
    }

    /// Shape subspaces at a support point, by the general formulas.
    fn shape_subspaces(&self, shape: Shape, t: Point) -> Result<ShapeSubspaces> {
        let (n, m) = (self.module.max_x(), self.module.max_y());
        if !shape.contains(t, n, m) {
            return Err(Error::Support(format!("{t} not in the support of {shape}")));
        }
        let cuts = shape.cuts(n, m);
        let l = self.cut_subspaces(t, cuts.l);
        let r = self.cut_subspaces(t, cuts.r);
        let v = self.cut_subspaces(t, cuts.v);
        let w = self.cut_subspaces(t, cuts.w);
        let (l_minus, l_plus) = (l.ima_minus.unwrap(), l.ima_plus.unwrap());
        let (v_minus, v_plus) = (v.ima_minus.unwrap(), v.ima_plus.unwrap());
        let (r_minus, r_plus) = (r.ker_minus.unwrap(), r.ker_plus.unwrap());
        let (w_minus, w_plus) = (w.ker_minus.unwrap(), w.ker_plus.unwrap());
        let (_, ima_plus) = sum_intersect(&l_plus, &v_plus)?;
        let (minus_sum, _) = sum_intersect(&l_minus, &v_minus)?;
        let (_, ima_minus) = sum_intersect(&minus_sum, &ima_plus)?;
        let (_, ker_plus) = sum_intersect(&r_plus, &w_plus)?;
        let (minus_sum, _) = sum_intersect(&r_minus, &w_minus)?;
        let (_, ker_minus) = sum_intersect(&minus_sum, &ker_plus)?;
        Ok(ShapeSubspaces { ima_minus, ima_plus, ker_minus, ker_plus })
    }

    /// `V+ = Ima+ ∩ Ker+` and `V- = Ima+ ∩ Ker- + Ima- ∩ Ker+`.
    fn v_spaces(&self, shape: Shape, t: Point) -> Result<(Subspace, Subspace)> {
        let ss = self.shape_subspaces(shape, t)?;
        let (_, v_plus) = sum_intersect(&ss.ima_plus, &ss.ker_plus)?;
        let (_, a) = sum_intersect(&ss.ima_plus, &ss.ker_minus)?;
        let (_, b) = sum_intersect(&ss.ima_minus, &ss.ker_plus)?;
        let (v_minus, _) = sum_intersect(&a, &b)?;
        Ok((v_minus, v_plus))
    }

    fn multiplicity(&self, shape: Shape) -> usize {
        let (v_minus, v_plus) = self
            .v_spaces(shape, shape.min_point())
            .expect("witness point lies in the support");
        v_plus.dim() - v_minus.dim()
    }
}

/// Cut subspaces of `M_t` across `cut` (public one-shot form).
pub fn cut_subspaces(module: &GridModule, t: Point, cut: Cut) -> CutSubspaces {
    Engine::new(module).cut_subspaces(t, cut)
}

/// Shape subspaces at `t in supp(shape)` by the general formulas.
pub fn shape_subspaces(module: &GridModule, shape: Shape, t: Point) -> Result<ShapeSubspaces> {
    Engine::new(module).shape_subspaces(shape, t)
}

/// `(V-, V+)` at `t in supp(shape)`; `V- ⊆ V+` always.
pub fn v_spaces(module: &GridModule, shape: Shape, t: Point) -> Result<(Subspace, Subspace)> {
    Engine::new(module).v_spaces(shape, t)
}

/// Multiplicity of `shape` in any block decomposition of `module`,
/// evaluated at the support minimum.
pub fn multiplicity(module: &GridModule, shape: Shape) -> usize {
    Engine::new(module).multiplicity(shape)
}

/// Full decomposition of a validated exact module.
///
/// Runs the validator first and refuses non-exact input. After computing all
/// multiplicities it asserts the pointwise identity `sum of multiplicities
/// covering t = dim M_t` at every grid point and reports an internal
/// inconsistency if it ever fails.
pub fn decompose(module: &GridModule) -> Result<Barcode> {
    let report = module.validate();
    if !report.exact {
        let detail = report
            .first_failure
            .map(|f| format!("square at {} ({:?}, dim im {}, dim ker {})", f.corner, f.kind, f.dim_image, f.dim_kernel))
            .unwrap_or_else(|| "validation failed".into());
        return Err(Error::NotExact(detail));
    }
    let (n, m) = (module.max_x(), module.max_y());
    let engine = Engine::new(module);
    let shapes = enumerate_shapes(n, m);
    let mults: Vec<usize> = shapes.par_iter().map(|&s| engine.multiplicity(s)).collect();
    let barcode = Barcode::from_entries(n, m, shapes.into_iter().zip(mults).filter(|&(_, c)| c > 0))?;
    for t in module.points() {
        let expected = barcode.dim_at(t);
        if expected != module.dim(t) {
            return Err(Error::Inconsistency(format!(
                "pointwise identity fails at {t}: blocks give {expected}, module has {}",
                module.dim(t)
            )));
        }
    }
    Ok(barcode)
}

/// Constructive witness of the decomposition: an anchor basis per shape and
/// an assembled change-of-basis matrix per grid point.
#[derive(Debug, Clone)]
pub struct Certificate {
    n: usize,
    m: usize,
    /// `(shape, W0)`: basis of a complement of `V-` in `V+` at the support
    /// minimum, one column per copy of the block.
    pub anchors: Vec<(Shape, PrimeFieldMatrix)>,
    assembled: Vec<PrimeFieldMatrix>,
}

impl Certificate {
    /// The verified invertible matrix assembled at `t`: the transported
    /// basis columns of every shape whose support contains `t`.
    pub fn assembled_at(&self, t: Point) -> &PrimeFieldMatrix {
        &self.assembled[t.x * (self.m + 1) + t.y]
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.n, self.m)
    }
}

/// Certifies that `barcode` describes `module` by building the block bases
/// explicitly and checking, point by point and edge by edge, that they
/// assemble into isomorphisms compatible with the maps of the module.
pub fn certify(module: &GridModule, barcode: &Barcode) -> Result<Certificate> {
    let (n, m) = (module.max_x(), module.max_y());
    if barcode.grid() != (n, m) {
        return Err(Error::Certification("barcode grid differs from module grid".into()));
    }
    let engine = Engine::new(module);
    // Anchor bases at each support minimum.
    let mut anchors: Vec<(Shape, PrimeFieldMatrix)> = Vec::new();
    // Per-shape transported bases over the support, row-major from the min.
    let mut transported: Vec<(Shape, Vec<(Point, PrimeFieldMatrix)>)> = Vec::new();
    for (shape, mult) in barcode.iter() {
        let anchor = shape.min_point();
        let (v_minus, v_plus) = engine.v_spaces(shape, anchor)?;
        let w0 = complement(&v_plus, &v_minus)?;
        if w0.dim() != mult {
            return Err(Error::Certification(format!(
                "shape {shape}: anchor complement has dimension {}, barcode says {mult}",
                w0.dim()
            )));
        }
        let mut bases: Vec<(Point, PrimeFieldMatrix)> = Vec::new();
        let lookup = |bases: &Vec<(Point, PrimeFieldMatrix)>, p: Point| -> PrimeFieldMatrix {
            bases.iter().find(|(q, _)| *q == p).expect("predecessor visited").1.clone()
        };
        for t in shape.support_points(n, m) {
            let basis = if t == anchor {
                w0.basis().clone()
            } else if t.x > anchor.x {
                module.hmap(t.x - 1, t.y).mul(&lookup(&bases, Point::new(t.x - 1, t.y)))
            } else {
                module.vmap(t.x, t.y - 1).mul(&lookup(&bases, Point::new(t.x, t.y - 1)))
            };
            bases.push((t, basis));
        }
        anchors.push((shape, w0.basis().clone()));
        transported.push((shape, bases));
    }
    // Assemble the per-point matrices and verify invertibility.
    let mut assembled = Vec::new();
    for x in 0..=n {
        for y in 0..=m {
            let t = Point::new(x, y);
            let mut acc = PrimeFieldMatrix::zeros(module.field(), module.dim(t), 0);
            for (shape, bases) in &transported {
                if shape.contains(t, n, m) {
                    let basis = &bases.iter().find(|(q, _)| *q == t).unwrap().1;
                    acc = acc.hstack(basis);
                }
            }
            if acc.cols() != module.dim(t) {
                return Err(Error::Certification(format!(
                    "assembled matrix at {t} has {} columns for dimension {}",
                    acc.cols(),
                    module.dim(t)
                )));
            }
            if acc.cols() > 0 && acc.inverse().is_none() {
                return Err(Error::Certification(format!("assembled matrix at {t} is singular")));
            }
            assembled.push(acc);
        }
    }
    // Verify every edge map is block structured with respect to the bases.
    let check_edge = |s: Point, t: Point, step: &PrimeFieldMatrix| -> Result<()> {
        for (shape, bases) in &transported {
            if !shape.contains(s, n, m) {
                continue;
            }
            let at_s = &bases.iter().find(|(q, _)| *q == s).unwrap().1;
            let moved = step.mul(at_s);
            if shape.contains(t, n, m) {
                let at_t = &bases.iter().find(|(q, _)| *q == t).unwrap().1;
                if moved != *at_t {
                    return Err(Error::Certification(format!(
                        "shape {shape}: basis not carried to its counterpart along {s} -> {t}"
                    )));
                }
            } else if !moved.is_zero() {
                return Err(Error::Certification(format!(
                    "shape {shape}: basis does not vanish when leaving the support along {s} -> {t}"
                )));
            }
        }
        Ok(())
    };
    for x in 0..=n {
        for y in 0..=m {
            let s = Point::new(x, y);
            if x < n {
                check_edge(s, Point::new(x + 1, y), module.hmap(x, y))?;
            }
            if y < m {
                check_edge(s, Point::new(x, y + 1), module.vmap(x, y))?;
            }
        }
    }
    Ok(Certificate { n, m, anchors, assembled })
}

/// Outcome of the sampled lemma suite.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub samples: usize,
    pub failures: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples `(shape, s <= t)` pairs in supports and checks the transport
/// behaviour of the cut machinery on them:
///
/// * images transport forward: `rho(Ima±_s) = Ima±_t`,
/// * kernels transport backward modulo the arrow: `rho^{-1}(Ker±_t) =
///   Ker±_s + Ker rho`. The summand is forced: `Ker rho` always lies in the
///   preimage, and it is absorbed into `Ker±_s` exactly when the arrow's
///   kernel dies inside the support (birth quadrants, or arrows parallel to
///   the kernel cut), which is the equivalent form of the switching identity
///   `f^{-1}(Ker v) = Ker g + Ker f`,
/// * `rho(V±_s) = V±_t` and `dim V+ - dim V-` agrees at `s` and `t`,
/// * both written forms of the boundary subspaces agree,
/// * on sampled unit squares, `Ker v_right = h_bottom(Ker v_left)`.
pub fn check_lemmas(module: &GridModule, samples: usize, seed: u64) -> LemmaReport {
    use rand::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (module.max_x(), module.max_y());
    let engine = Engine::new(module);
    let shapes = enumerate_shapes(n, m);
    let mut failures = Vec::new();
    let fail = |msg: String, failures: &mut Vec<String>| {
        if failures.len() < 8 {
            failures.push(msg);
        }
    };
    for _ in 0..samples {
        // Switching on a sampled unit square.
        if n > 0 && m > 0 {
            let x = (rng.next_u64() as usize) % n;
            let y = (rng.next_u64() as usize) % m;
            let lhs = kernel(module.vmap(x + 1, y));
            let rhs = apply(module.hmap(x, y), &kernel(module.vmap(x, y))).unwrap();
            if lhs != rhs {
                fail(format!("switching fails on the unit square at ({x}, {y})"), &mut failures);
            }
        }
        let shape = shapes[(rng.next_u64() as usize) % shapes.len()];
        let (lo, hi) = shape.support_box(n, m);
        let pick = |lo: usize, hi: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            lo + (rng.next_u64() as usize) % (hi - lo + 1)
        };
        let s = Point::new(pick(lo.x, hi.x, &mut rng), pick(lo.y, hi.y, &mut rng));
        let t = Point::new(pick(s.x, hi.x, &mut rng), pick(s.y, hi.y, &mut rng));
        let rho = module.transport(s, t).expect("s <= t by construction");
        let at_s = engine.shape_subspaces(shape, s).unwrap();
        let at_t = engine.shape_subspaces(shape, t).unwrap();
        // Inclusion chains come first; everything else relies on them.
        if !at_s.ima_plus.contains(&at_s.ima_minus) || !at_s.ker_plus.contains(&at_s.ker_minus) {
            fail(format!("inclusion chain fails for {shape} at {s}"), &mut failures);
            continue;
        }
        let pairs = [
            ("Ima-", &at_s.ima_minus, &at_t.ima_minus),
            ("Ima+", &at_s.ima_plus, &at_t.ima_plus),
        ];
        for (name, src, dst) in pairs {
            match apply(&rho, src) {
                Ok(img) if img == *dst => {}
                _ => fail(format!("{name} transport fails for {shape} on {s} -> {t}"), &mut failures),
            }
        }
        let ker_rho = kernel(&rho);
        let pairs = [
            ("Ker-", &at_t.ker_minus, &at_s.ker_minus),
            ("Ker+", &at_t.ker_plus, &at_s.ker_plus),
        ];
        for (name, dst, src) in pairs {
            let expected = sum_intersect(src, &ker_rho).unwrap().0;
            match preimage(&rho, dst) {
                Ok(pre) if pre == expected => {}
                _ => fail(format!("{name} pull back fails for {shape} on {s} -> {t}"), &mut failures),
            }
        }
        let (vm_s, vp_s) = engine.v_spaces(shape, s).unwrap();
        let (vm_t, vp_t) = engine.v_spaces(shape, t).unwrap();
        if apply(&rho, &vp_s).unwrap() != vp_t || apply(&rho, &vm_s).unwrap() != vm_t {
            fail(format!("V± transport fails for {shape} on {s} -> {t}"), &mut failures);
        }
        if vp_s.dim() - vm_s.dim() != vp_t.dim() - vm_t.dim() {
            fail(format!("witness independence fails for {shape} on {s} vs {t}"), &mut failures);
        }
        // Both written forms of the boundary subspaces agree.
        let cuts = shape.cuts(n, m);
        let l = engine.cut_subspaces(t, cuts.l);
        let v = engine.cut_subspaces(t, cuts.v);
        let lm = l.ima_minus.unwrap();
        let lp = l.ima_plus.unwrap();
        let vm = v.ima_minus.unwrap();
        let vp = v.ima_plus.unwrap();
        let (_, a) = sum_intersect(&lm, &vp).unwrap();
        let (_, b) = sum_intersect(&vm, &lp).unwrap();
        let (alt, _) = sum_intersect(&a, &b).unwrap();
        if alt != at_t.ima_minus {
            fail(format!("two forms of Ima- disagree for {shape} at {t}"), &mut failures);
        }
        let r = engine.cut_subspaces(t, cuts.r);
        let w = engine.cut_subspaces(t, cuts.w);
        let rm = r.ker_minus.unwrap();
        let rp = r.ker_plus.unwrap();
        let wm = w.ker_minus.unwrap();
        let wp = w.ker_plus.unwrap();
        let (_, a) = sum_intersect(&rm, &wp).unwrap();
        let (_, b) = sum_intersect(&wm, &rp).unwrap();
        let (alt, _) = sum_intersect(&a, &b).unwrap();
        if alt != at_t.ker_minus {
            fail(format!("two forms of Ker- disagree for {shape} at {t}"), &mut failures);
        }
    }
    LemmaReport { samples, failures }
}
