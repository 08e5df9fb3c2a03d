//! Python bindings: grid modules, barcodes, zigzags, interlevel-set
//! barcodes, bottleneck distance, and SVG plotting. JSON strings use the
//! same schemas as the command-line tool.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pdecomp::blocks::{self, Shape, ShapeKind};
use pdecomp::decompose;
use pdecomp::field::PrimeField;
use pdecomp::interlevel::{self, LabeledGraph};
use pdecomp::io;
use pdecomp::metric::{self, Cost};
use pdecomp::module::{GridModule, Point};
use pdecomp::zigzag;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(p: u64) -> PyResult<PrimeField> {
    PrimeField::new(p).map_err(err)
}

/// An exact persistence bimodule on a finite grid.
#[pyclass(name = "Module")]
struct PyModuleObj {
    inner: GridModule,
}

#[pymethods]
impl PyModuleObj {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModuleObj { inner: io::module_from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::module_to_json(&self.inner)
    }

    /// Grid as `(n, m)`, the maximal indices.
    fn grid(&self) -> (usize, usize) {
        (self.inner.max_x(), self.inner.max_y())
    }

    fn dim(&self, x: usize, y: usize) -> PyResult<usize> {
        if x > self.inner.max_x() || y > self.inner.max_y() {
            return Err(err(format!("point ({x}, {y}) outside the grid")));
        }
        Ok(self.inner.dim(Point::new(x, y)))
    }

    /// Returns `(commutes, exact)`.
    fn validate(&self) -> (bool, bool) {
        let report = self.inner.validate();
        (report.commutes, report.exact)
    }

    fn decompose(&self) -> PyResult<PyBarcode> {
        Ok(PyBarcode { inner: decompose::decompose(&self.inner).map_err(err)? })
    }

    /// Builds and verifies a certificate for the given barcode.
    fn certify(&self, barcode: &PyBarcode) -> PyResult<bool> {
        decompose::certify(&self.inner, &barcode.inner).map_err(err)?;
        Ok(true)
    }

    fn smoothing(&self, ex: usize, ey: usize) -> PyResult<Self> {
        Ok(PyModuleObj { inner: self.inner.smoothing(ex, ey).map_err(err)? })
    }

    fn pad_extend(&self, k: usize) -> Self {
        PyModuleObj { inner: self.inner.pad_extend(k) }
    }

    fn conjugate(&self, seed: u64) -> Self {
        PyModuleObj { inner: self.inner.conjugate(seed) }
    }

    fn direct_sum(&self, other: &PyModuleObj) -> PyResult<Self> {
        Ok(PyModuleObj { inner: self.inner.direct_sum(&other.inner).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Module(grid=({}, {}), p={})", self.inner.max_x(), self.inner.max_y(), self.inner.field().modulus())
    }
}

/// A multiset of block shapes with multiplicities.
#[pyclass(name = "Barcode")]
struct PyBarcode {
    inner: blocks::Barcode,
}

#[pymethods]
impl PyBarcode {
    #[staticmethod]
    #[pyo3(signature = (n, m, blocks))]
    fn new(n: usize, m: usize, blocks: Vec<(String, usize, usize, usize)>) -> PyResult<Self> {
        let mut barcode = blocks::Barcode::empty(n, m);
        for (kind, a, b, mult) in blocks {
            let kind = kind
                .chars()
                .next()
                .and_then(ShapeKind::from_letter)
                .filter(|_| kind.len() == 1)
                .ok_or_else(|| err(format!("unknown block kind {kind:?}")))?;
            barcode.add(Shape { kind, a, b }, mult).map_err(err)?;
        }
        Ok(PyBarcode { inner: barcode })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, _) = io::barcode_from_json(text).map_err(err)?;
        Ok(PyBarcode { inner })
    }

    fn to_json(&self) -> String {
        io::barcode_to_json(&self.inner, None)
    }

    fn grid(&self) -> (usize, usize) {
        self.inner.grid()
    }

    /// Blocks as `(kind, a, b, mult)` tuples in canonical order.
    fn blocks(&self) -> Vec<(String, usize, usize, usize)> {
        self.inner
            .iter()
            .map(|(s, mult)| (s.kind.letter().to_string(), s.a, s.b, mult))
            .collect()
    }

    fn total_blocks(&self) -> usize {
        self.inner.total_blocks()
    }

    /// Sum of multiplicities of blocks covering `(x, y)`.
    fn dim_at(&self, x: usize, y: usize) -> usize {
        self.inner.dim_at(Point::new(x, y))
    }

    /// Bottleneck distance; `inf` when no finite matching exists.
    fn bottleneck(&self, other: &PyBarcode) -> PyResult<f64> {
        match metric::bottleneck(&self.inner, &other.inner).map_err(err)? {
            Cost::Finite(halves) => Ok(halves as f64 / 2.0),
            Cost::Infinite => Ok(f64::INFINITY),
        }
    }

    fn __eq__(&self, other: &PyBarcode) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let blocks: Vec<String> = self
            .inner
            .iter()
            .map(|(s, mult)| format!("{}({}, {})x{}", s.kind.letter(), s.a, s.b, mult))
            .collect();
        format!("Barcode[{}]", blocks.join(", "))
    }
}

/// A zigzag module given by dimensions and directed maps.
#[pyclass(name = "Zigzag")]
struct PyZigzag {
    inner: zigzag::Zigzag,
}

#[pymethods]
impl PyZigzag {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyZigzag { inner: io::zigzag_from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::zigzag_to_json(&self.inner)
    }

    /// Direct sum of intervals `(lo, hi, mult)` over indices `0..=length`.
    #[staticmethod]
    fn from_intervals(intervals: Vec<(usize, usize, usize)>, length: usize, p: u64) -> PyResult<Self> {
        let iv = zigzag::IntervalBarcode::from_entries(
            length,
            intervals.into_iter().map(|(lo, hi, mult)| ((lo, hi), mult)),
        )
        .map_err(err)?;
        Ok(PyZigzag { inner: zigzag::synth_zigzag(&iv, length, field(p)?).map_err(err)? })
    }

    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    fn conjugate(&self, seed: u64) -> Self {
        PyZigzag { inner: zigzag::conjugate_zigzag(&self.inner, seed) }
    }

    /// Interval decomposition as `(lo, hi, mult)` tuples.
    fn decompose(&self) -> PyResult<Vec<(usize, usize, usize)>> {
        let iv = zigzag::zigzag_decompose(&self.inner).map_err(err)?;
        Ok(iv.iter().map(|((lo, hi), mult)| (lo, hi, mult)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Zigzag(dims={:?})", self.inner.dims())
    }
}

/// Builds the module described by a barcode over GF(p).
#[pyfunction]
#[pyo3(signature = (barcode, p = 2))]
fn synth(barcode: &PyBarcode, p: u64) -> PyResult<PyModuleObj> {
    Ok(PyModuleObj { inner: blocks::synth(&barcode.inner, field(p)?) })
}

/// Seeded random exact module with its ground-truth barcode.
#[pyfunction]
#[pyo3(signature = (n, m, max_blocks, seed, p = 2))]
fn random_module(n: usize, m: usize, max_blocks: usize, seed: u64, p: u64) -> PyResult<(PyModuleObj, PyBarcode)> {
    if max_blocks == 0 {
        return Err(err("max_blocks must be at least 1"));
    }
    let (module, truth) = blocks::random_exact_module(n, m, max_blocks, seed, field(p)?);
    Ok((PyModuleObj { inner: module }, PyBarcode { inner: truth }))
}

/// Interlevel-set barcode of vertex values on a graph; returns the barcode
/// and the level sequence.
#[pyfunction]
#[pyo3(signature = (values, edges, p = 2))]
fn interlevel_barcode(values: Vec<f64>, edges: Vec<(usize, usize)>, p: u64) -> PyResult<(PyBarcode, Vec<f64>)> {
    let graph = LabeledGraph::new(values, edges).map_err(err)?;
    let (barcode, levels) = interlevel::interlevel_barcode(&graph, field(p)?).map_err(err)?;
    Ok((PyBarcode { inner: barcode }, levels))
}

/// Deterministic SVG rendering of a barcode.
#[pyfunction]
fn plot_svg(barcode: &PyBarcode) -> String {
    pdecomp::cli::plot_svg(&barcode.inner)
}

#[pymodule]
fn pdecomp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModuleObj>()?;
    m.add_class::<PyBarcode>()?;
    m.add_class::<PyZigzag>()?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(random_module, m)?)?;
    m.add_function(wrap_pyfunction!(interlevel_barcode, m)?)?;
    m.add_function(wrap_pyfunction!(plot_svg, m)?)?;
    Ok(())
}
