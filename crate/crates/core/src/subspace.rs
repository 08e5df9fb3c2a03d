//! Subspaces of GF(p)^n in canonical form.
//!
//! Every subspace is stored as a basis matrix in reduced column echelon form
//! with zero columns dropped. The form is unique, so two subspaces are equal
//! as sets of vectors exactly when their basis matrices are identical. All
//! operations below return canonical subspaces, which lets the rest of the
//! crate compare spaces bit for bit.

use crate::error::{Error, Result};
use crate::field::{PrimeField, PrimeFieldMatrix};

/// Reduced column echelon form of `A` with zero columns dropped.
///
/// Pivot of a column is its first nonzero row; pivots are strictly increasing
/// left to right, pivot entries are 1, and a pivot row is zero in every other
/// column. Column span is preserved.
pub fn col_echelon(a: &PrimeFieldMatrix) -> PrimeFieldMatrix {
    let mut t = a.transpose();
    let pivots = t.row_reduce();
    let keep: Vec<usize> = (0..pivots.len()).collect();
    t.take_rows(&keep).transpose()
}

/// A subspace of GF(p)^ambient, canonical echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: PrimeFieldMatrix,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace { basis: PrimeFieldMatrix::zeros(field, ambient, 0) }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace { basis: PrimeFieldMatrix::identity(field, ambient) }
    }

    /// Span of the columns of `a`.
    pub fn from_matrix(a: &PrimeFieldMatrix) -> Self {
        Subspace { basis: col_echelon(a) }
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    /// The canonical basis matrix (ambient rows, dim columns).
    pub fn basis(&self) -> &PrimeFieldMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains_vector(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient());
        let f = self.field();
        let mut v = v.to_vec();
        for j in 0..self.basis.cols() {
            let pivot = (0..self.basis.rows()).find(|&i| self.basis[(i, j)] != 0).unwrap();
            let c = v[pivot];
            if c != 0 {
                for i in 0..v.len() {
                    v[i] = f.sub(v[i], f.mul(c, self.basis[(i, j)]));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient(), other.ambient());
        (0..other.dim()).all(|j| self.contains_vector(&other.basis.column(j)))
    }
}

/// Sum and intersection in one Zassenhaus-style block elimination.
///
/// The columns of `[[U, V], [U, 0]]` span `{(u + v, u)}`; after column
/// echelon the tops of the top-pivot columns give U + V while the bottoms of
/// the remaining columns give the intersection.
pub fn sum_intersect(u: &Subspace, v: &Subspace) -> Result<(Subspace, Subspace)> {
    if u.ambient() != v.ambient() {
        return Err(Error::Dimension(format!(
            "sum_intersect ambient {} vs {}",
            u.ambient(),
            v.ambient()
        )));
    }
    let n = u.ambient();
    let field = u.field();
    let top = u.basis().hstack(v.basis());
    let bottom = u.basis().hstack(&PrimeFieldMatrix::zeros(field, n, v.dim()));
    let stacked = col_echelon(&top.vstack(&bottom));
    let mut sum_cols = Vec::new();
    let mut inter_cols = Vec::new();
    for j in 0..stacked.cols() {
        let top_zero = (0..n).all(|i| stacked[(i, j)] == 0);
        if top_zero {
            inter_cols.push(j);
        } else {
            sum_cols.push(j);
        }
    }
    let top_rows: Vec<usize> = (0..n).collect();
    let bottom_rows: Vec<usize> = (n..2 * n).collect();
    let sum = Subspace::from_matrix(&stacked.take_columns(&sum_cols).take_rows(&top_rows));
    let inter = Subspace::from_matrix(&stacked.take_columns(&inter_cols).take_rows(&bottom_rows));
    Ok((sum, inter))
}

/// Column span of `a`.
pub fn image(a: &PrimeFieldMatrix) -> Subspace {
    Subspace::from_matrix(a)
}

/// Null space of `a`, a subspace of the domain GF(p)^cols.
pub fn kernel(a: &PrimeFieldMatrix) -> Subspace {
    let field = a.field();
    let cols = a.cols();
    let mut m = a.clone();
    let pivots = m.row_reduce();
    let is_pivot = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut basis = PrimeFieldMatrix::zeros(field, cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        basis[(fc, k)] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            basis[(pc, k)] = field.neg(m[(r, fc)]);
        }
    }
    Subspace::from_matrix(&basis)
}

/// `{x : a * x in w}`, a subspace of the domain of `a`.
pub fn preimage(a: &PrimeFieldMatrix, w: &Subspace) -> Result<Subspace> {
    if a.rows() != w.ambient() {
        return Err(Error::Dimension(format!(
            "preimage: map has {} rows, subspace ambient {}",
            a.rows(),
            w.ambient()
        )));
    }
    // (x, y) with a x = w y; project the kernel of [a | -W] onto x.
    let joint = a.hstack(&w.basis().neg());
    let k = kernel(&joint);
    let x_rows: Vec<usize> = (0..a.cols()).collect();
    Ok(Subspace::from_matrix(&k.basis().take_rows(&x_rows)))
}

/// Image of a subspace under a linear map.
pub fn apply(a: &PrimeFieldMatrix, u: &Subspace) -> Result<Subspace> {
    if a.cols() != u.ambient() {
        return Err(Error::Dimension(format!(
            "apply: map has {} cols, subspace ambient {}",
            a.cols(),
            u.ambient()
        )));
    }
    Ok(Subspace::from_matrix(&a.mul(u.basis())))
}

/// Deterministic complement: `u = result ⊕ v`, built from the echelon basis
/// columns of `u` whose pivot rows are not pivot rows of `v`.
pub fn complement(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    if u.ambient() != v.ambient() {
        return Err(Error::Dimension(format!(
            "complement ambient {} vs {}",
            u.ambient(),
            v.ambient()
        )));
    }
    if !u.contains(v) {
        return Err(Error::Containment("complement: second argument is not a subspace of the first".into()));
    }
    let pivot_of = |m: &PrimeFieldMatrix, j: usize| (0..m.rows()).find(|&i| m[(i, j)] != 0).unwrap();
    let v_pivots: Vec<usize> = (0..v.dim()).map(|j| pivot_of(v.basis(), j)).collect();
    let keep: Vec<usize> = (0..u.dim())
        .filter(|&j| !v_pivots.contains(&pivot_of(u.basis(), j)))
        .collect();
    Ok(Subspace::from_matrix(&u.basis().take_columns(&keep)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn mat(p: u64, rows: &[Vec<u64>]) -> PrimeFieldMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        PrimeFieldMatrix::from_rows(gf(p), rows.len(), cols, rows).unwrap()
    }

    fn span(p: u64, rows: &[Vec<u64>]) -> Subspace {
        Subspace::from_matrix(&mat(p, rows))
    }

    /// Brute-force oracle: all vectors of a subspace of GF(p)^n, p^n small.
    fn enumerate_vectors(s: &Subspace) -> Vec<Vec<u64>> {
        let p = s.field().modulus();
        let n = s.ambient();
        let total = (p as usize).pow(n as u32);
        (0..total)
            .map(|mut ix| {
                let mut v = vec![0u64; n];
                for slot in v.iter_mut() {
                    *slot = (ix % p as usize) as u64;
                    ix /= p as usize;
                }
                v
            })
            .filter(|v| s.contains_vector(v))
            .collect()
    }

    #[test]
    fn col_echelon_examples() {
        // Zero matrix drops to an empty basis.
        let e = col_echelon(&mat(2, &[vec![0]]));
        assert_eq!((e.rows(), e.cols()), (1, 0));
        // Dependent second column collapses, pivot normalized.
        let e = col_echelon(&mat(5, &[vec![1, 2], vec![2, 4]]));
        assert_eq!(e.to_rows(), vec![vec![1], vec![2]]);
        // Identity is already canonical.
        let id = PrimeFieldMatrix::identity(gf(7), 3);
        assert_eq!(col_echelon(&id), id);
    }

    #[test]
    fn image_examples() {
        let z = image(&PrimeFieldMatrix::zeros(gf(5), 2, 3));
        assert!(z.is_zero());
        assert_eq!(z.ambient(), 2);
        assert!(image(&PrimeFieldMatrix::identity(gf(5), 2)).is_full());
        let s = image(&mat(2, &[vec![1, 1], vec![1, 1]]));
        assert_eq!(s.dim(), 1);
        assert!(s.contains_vector(&[1, 1]));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel(&PrimeFieldMatrix::identity(gf(5), 3)).is_zero());
        let k = kernel(&PrimeFieldMatrix::zeros(gf(5), 2, 3));
        assert!(k.is_full());
        assert_eq!(k.ambient(), 3);
        let k = kernel(&mat(2, &[vec![1, 1]]));
        assert_eq!(k.dim(), 1);
        assert!(k.contains_vector(&[1, 1]));
    }

    #[test]
    fn sum_intersect_examples() {
        let p = 5;
        let e1 = span(p, &[vec![1], vec![0]]);
        let e2 = span(p, &[vec![0], vec![1]]);
        let (s, i) = sum_intersect(&e1, &e2).unwrap();
        assert!(s.is_full());
        assert!(i.is_zero());

        let u = span(p, &[vec![1, 2], vec![2, 4]]);
        let (s, i) = sum_intersect(&u, &u).unwrap();
        assert_eq!(s, u);
        assert_eq!(i, u);

        // GF(3)^2: U = span(e1+e2), V = span(e1). Oracle: enumerate all 9 vectors.
        let u = span(3, &[vec![1], vec![1]]);
        let v = span(3, &[vec![1], vec![0]]);
        let (s, i) = sum_intersect(&u, &v).unwrap();
        assert_eq!(enumerate_vectors(&s).len(), 9);
        assert_eq!(enumerate_vectors(&i).len(), 1);
    }

    #[test]
    fn sum_intersect_ambient_mismatch() {
        let u = Subspace::zero(gf(2), 2);
        let v = Subspace::zero(gf(2), 3);
        assert!(sum_intersect(&u, &v).is_err());
    }

    #[test]
    fn preimage_examples() {
        let a = mat(2, &[vec![1, 0], vec![0, 0]]);
        let full = Subspace::full(gf(2), 2);
        assert!(preimage(&a, &full).unwrap().is_full());
        let zero = Subspace::zero(gf(2), 2);
        assert_eq!(preimage(&a, &zero).unwrap(), kernel(&a));
        // W = span(e1): every x has A x multiple of e1, oracle enumerates 4 vectors.
        let w = span(2, &[vec![1], vec![0]]);
        let pre = preimage(&a, &w).unwrap();
        assert_eq!(enumerate_vectors(&pre).len(), 4);
    }

    #[test]
    fn apply_examples() {
        let f = gf(2);
        let a = mat(2, &[vec![1, 1], vec![0, 0]]);
        let zero = Subspace::zero(f, 2);
        assert!(apply(&a, &zero).unwrap().is_zero());
        let u = span(2, &[vec![1, 0], vec![1, 1]]);
        assert_eq!(apply(&PrimeFieldMatrix::identity(f, 2), &u).unwrap(), u);
        let s = apply(&a, &Subspace::full(f, 2)).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains_vector(&[1, 0]));
    }

    #[test]
    fn complement_examples() {
        let f = gf(5);
        let full = Subspace::full(f, 2);
        let zero = Subspace::zero(f, 2);
        assert_eq!(complement(&full, &zero).unwrap(), full);
        assert!(complement(&full, &full).unwrap().is_zero());

        // GF(2)^2 with V = span(e1+e2): verify the direct sum by enumeration.
        let v = span(2, &[vec![1], vec![1]]);
        let full = Subspace::full(gf(2), 2);
        let w = complement(&full, &v).unwrap();
        assert_eq!(w.dim(), 1);
        assert!(!v.contains(&w));
        let (s, i) = sum_intersect(&v, &w).unwrap();
        assert!(s.is_full());
        assert!(i.is_zero());

        // V not inside U is rejected.
        let u = span(2, &[vec![1], vec![0]]);
        assert!(matches!(complement(&u, &v), Err(Error::Containment(_))));
    }

    fn arb_matrix(p: u64, max_dim: usize) -> impl Strategy<Value = PrimeFieldMatrix> {
        (0..=max_dim, 0..=max_dim).prop_flat_map(move |(rows, cols)| {
            proptest::collection::vec(0..p, rows * cols).prop_map(move |data| {
                let mut m = PrimeFieldMatrix::zeros(gf(p), rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m[(i, j)] = data[i * cols + j];
                    }
                }
                m
            })
        })
    }

    fn arb_two_subspaces(p: u64, ambient: usize) -> impl Strategy<Value = (Subspace, Subspace)> {
        let entries = move |cols: usize| proptest::collection::vec(0..p, ambient * cols);
        (0..=ambient, 0..=ambient).prop_flat_map(move |(c1, c2)| {
            (entries(c1), entries(c2)).prop_map(move |(d1, d2)| {
                let build = |cols: usize, data: &[u64]| {
                    let mut m = PrimeFieldMatrix::zeros(gf(p), ambient, cols);
                    for i in 0..ambient {
                        for j in 0..cols {
                            m[(i, j)] = data[i * cols + j];
                        }
                    }
                    Subspace::from_matrix(&m)
                };
                (build(c1, &d1), build(c2, &d2))
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn grassmann_identity_gf2((u, v) in arb_two_subspaces(2, 6)) {
            let (s, i) = sum_intersect(&u, &v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
            prop_assert!(s.contains(&u) && s.contains(&v));
            prop_assert!(u.contains(&i) && v.contains(&i));
        }

        #[test]
        fn grassmann_identity_gf101((u, v) in arb_two_subspaces(101, 8)) {
            let (s, i) = sum_intersect(&u, &v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        }

        #[test]
        fn apply_preimage_adjunction(a in arb_matrix(5, 5), wdata in proptest::collection::vec(0..5u64, 25)) {
            // W lives in the codomain of A.
            let mut wgen = PrimeFieldMatrix::zeros(a.field(), a.rows(), 5);
            for i in 0..a.rows() {
                for j in 0..5 {
                    wgen[(i, j)] = wdata[i * 5 + j];
                }
            }
            let w = Subspace::from_matrix(&wgen);
            let pre = preimage(&a, &w).unwrap();
            let lhs = apply(&a, &pre).unwrap();
            let (_, rhs) = sum_intersect(&w, &image(&a)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rank_nullity(a in arb_matrix(101, 8)) {
            prop_assert_eq!(image(&a).dim() + kernel(&a).dim(), a.cols());
        }

        #[test]
        fn canonical_under_respanning(a in arb_matrix(3, 5), shuffle in any::<u64>()) {
            // Different spanning sets of the same space give the same basis:
            // append random combinations of existing columns.
            let s = Subspace::from_matrix(&a);
            let f = a.field();
            let mut cols: Vec<Vec<u64>> = (0..a.cols()).map(|j| a.column(j)).collect();
            let mut state = shuffle;
            for _ in 0..3 {
                if cols.is_empty() { break; }
                let mut extra = vec![0u64; a.rows()];
                for c in &cols {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let coeff = state % f.modulus();
                    for (e, &x) in extra.iter_mut().zip(c.iter()) {
                        *e = f.add(*e, f.mul(coeff, x));
                    }
                }
                cols.push(extra);
            }
            cols.reverse();
            let mut b = PrimeFieldMatrix::zeros(f, a.rows(), cols.len());
            for (j, c) in cols.iter().enumerate() {
                for (i, &x) in c.iter().enumerate() {
                    b[(i, j)] = x;
                }
            }
            prop_assert_eq!(Subspace::from_matrix(&b), s);
        }
    }
}
