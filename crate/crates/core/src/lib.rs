//! Decomposition of exact pointwise finite-dimensional two-parameter
//! persistence modules over finite grids into block summands, together with
//! the machinery that feeds on it: exact linear algebra over GF(p),
//! block and barcode synthesis, zigzag extension via pushouts and pullbacks,
//! interlevel-set persistence of functions on graphs, bottleneck distance
//! between barcodes, and a command-line interface over JSON files.

pub mod blocks;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod field;
pub mod interlevel;
pub mod io;
pub mod metric;
pub mod module;
pub mod subspace;
pub mod zigzag;

pub use blocks::{Barcode, Shape, ShapeKind};
pub use error::Error;
pub use field::{PrimeField, PrimeFieldMatrix};
pub use module::{GridModule, PathModule, Point, ValidationReport};
pub use subspace::Subspace;
