//! JSON interchange formats and atomic file writes.
//!
//! All formats use integers for field elements and floats only for graph
//! values and levels. Edge-map keys are `"x,y"` strings; a key may be
//! omitted exactly when the matrix is forced empty by a zero-dimensional
//! source or target. Output is deterministic: map keys are sorted and
//! barcode entries follow the canonical shape order.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blocks::{Barcode, Shape, ShapeKind};
use crate::error::{Error, Result};
use crate::field::{PrimeField, PrimeFieldMatrix};
use crate::interlevel::LabeledGraph;
use crate::module::{GridModule, Orientation, PathModule, Point};
use crate::zigzag::{Direction, IntervalBarcode, Zigzag, ZigzagMap};

fn schema<E: std::fmt::Display>(err: E) -> Error {
    Error::Schema(err.to_string())
}

/// Writes `content` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = path.file_name().map(|n| n.to_os_string()).ok_or_else(|| {
        Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))
    })?;
    tmp.push(".tmp");
    let tmp_path = dir.join(tmp);
    std::fs::write(&tmp_path, content)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

// ---------------------------------------------------------------- modules

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    p: u64,
    n: usize,
    m: usize,
    dims: Vec<Vec<usize>>,
    hmaps: BTreeMap<String, Vec<Vec<u64>>>,
    vmaps: BTreeMap<String, Vec<Vec<u64>>>,
}

fn edge_key(x: usize, y: usize) -> String {
    format!("{x},{y}")
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let (x, y) = key.split_once(',').ok_or_else(|| Error::Schema(format!("bad edge key {key:?}")))?;
    Ok((
        x.trim().parse().map_err(schema)?,
        y.trim().parse().map_err(schema)?,
    ))
}

pub fn module_to_json(module: &GridModule) -> String {
    let (n, m) = (module.max_x(), module.max_y());
    let dims = (0..=n)
        .map(|x| (0..=m).map(|y| module.dim(Point::new(x, y))).collect())
        .collect();
    let mut hmaps = BTreeMap::new();
    for x in 0..n {
        for y in 0..=m {
            let h = module.hmap(x, y);
            if h.rows() > 0 && h.cols() > 0 {
                hmaps.insert(edge_key(x, y), h.to_rows());
            }
        }
    }
    let mut vmaps = BTreeMap::new();
    for x in 0..=n {
        for y in 0..m {
            let v = module.vmap(x, y);
            if v.rows() > 0 && v.cols() > 0 {
                vmaps.insert(edge_key(x, y), v.to_rows());
            }
        }
    }
    let json = ModuleJson { p: module.field().modulus(), n, m, dims, hmaps, vmaps };
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

pub fn module_from_json(text: &str) -> Result<GridModule> {
    let json: ModuleJson = serde_json::from_str(text).map_err(schema)?;
    let field = PrimeField::new(json.p).map_err(|e| Error::Schema(e.to_string()))?;
    let (n, m) = (json.n, json.m);
    if json.dims.len() != n + 1 || json.dims.iter().any(|col| col.len() != m + 1) {
        return Err(Error::Schema(format!("dims must be {}x{}", n + 1, m + 1)));
    }
    let dim_at = |x: usize, y: usize| json.dims[x][y];
    let build = |entries: Option<&Vec<Vec<u64>>>, rows: usize, cols: usize, what: &str| -> Result<PrimeFieldMatrix> {
        match entries {
            Some(rows_data) => PrimeFieldMatrix::from_rows(field, rows, cols, rows_data)
                .map_err(|e| Error::Schema(format!("{what}: {e}"))),
            None if rows == 0 || cols == 0 => Ok(PrimeFieldMatrix::zeros(field, rows, cols)),
            None => Err(Error::Schema(format!("{what}: missing matrix for nonzero dimensions"))),
        }
    };
    for key in json.hmaps.keys().chain(json.vmaps.keys()) {
        let (x, y) = parse_key(key)?;
        if x > n || y > m {
            return Err(Error::Schema(format!("edge key {key:?} outside the grid")));
        }
    }
    let mut hmaps = Vec::new();
    for x in 0..n {
        for y in 0..=m {
            let entry = json.hmaps.get(&edge_key(x, y));
            hmaps.push(build(entry, dim_at(x + 1, y), dim_at(x, y), &format!("hmap {x},{y}"))?);
        }
    }
    let mut vmaps = Vec::new();
    for x in 0..=n {
        for y in 0..m {
            let entry = json.vmaps.get(&edge_key(x, y));
            vmaps.push(build(entry, dim_at(x, y + 1), dim_at(x, y), &format!("vmap {x},{y}"))?);
        }
    }
    let dims = (0..=n).flat_map(|x| (0..=m).map(move |y| dim_at(x, y))).collect();
    GridModule::new(field, n, m, dims, hmaps, vmaps).map_err(|e| Error::Schema(e.to_string()))
}

pub fn read_module(path: &Path) -> Result<GridModule> {
    module_from_json(&read_to_string(path)?)
}

pub fn write_module(path: &Path, module: &GridModule) -> Result<()> {
    write_atomic(path, &module_to_json(module))
}

// --------------------------------------------------------------- barcodes

#[derive(Serialize, Deserialize)]
struct BlockJson {
    kind: String,
    a: usize,
    b: usize,
    mult: usize,
}

#[derive(Serialize, Deserialize)]
struct BarcodeJson {
    n: usize,
    m: usize,
    blocks: Vec<BlockJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<f64>>,
}

pub fn barcode_to_json(barcode: &Barcode, levels: Option<&[f64]>) -> String {
    let (n, m) = barcode.grid();
    let blocks = barcode
        .iter()
        .map(|(shape, mult)| BlockJson {
            kind: shape.kind.letter().to_string(),
            a: shape.a,
            b: shape.b,
            mult,
        })
        .collect();
    let json = BarcodeJson { n, m, blocks, levels: levels.map(|l| l.to_vec()) };
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

pub fn barcode_from_json(text: &str) -> Result<(Barcode, Option<Vec<f64>>)> {
    let json: BarcodeJson = serde_json::from_str(text).map_err(schema)?;
    let mut barcode = Barcode::empty(json.n, json.m);
    for block in &json.blocks {
        let kind = block
            .kind
            .chars()
            .next()
            .and_then(ShapeKind::from_letter)
            .filter(|_| block.kind.len() == 1)
            .ok_or_else(|| Error::Schema(format!("unknown block kind {:?}", block.kind)))?;
        if block.mult == 0 {
            return Err(Error::Schema("block multiplicity must be positive".into()));
        }
        barcode
            .add(Shape { kind, a: block.a, b: block.b }, block.mult)
            .map_err(|e| Error::Schema(e.to_string()))?;
    }
    Ok((barcode, json.levels))
}

pub fn read_barcode(path: &Path) -> Result<(Barcode, Option<Vec<f64>>)> {
    barcode_from_json(&read_to_string(path)?)
}

pub fn write_barcode(path: &Path, barcode: &Barcode, levels: Option<&[f64]>) -> Result<()> {
    write_atomic(path, &barcode_to_json(barcode, levels))
}

// ---------------------------------------------------------------- zigzags

#[derive(Serialize, Deserialize)]
struct ZigzagMapJson {
    dir: String,
    mat: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct ZigzagJson {
    p: u64,
    dims: Vec<usize>,
    maps: Vec<ZigzagMapJson>,
}

pub fn zigzag_to_json(z: &Zigzag) -> String {
    let maps = z
        .maps()
        .iter()
        .map(|zm| ZigzagMapJson {
            dir: match zm.direction {
                Direction::Forward => "fwd".into(),
                Direction::Backward => "bwd".into(),
            },
            mat: zm.matrix.to_rows(),
        })
        .collect();
    let json = ZigzagJson { p: z.field().modulus(), dims: z.dims().to_vec(), maps };
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

pub fn zigzag_from_json(text: &str) -> Result<Zigzag> {
    let json: ZigzagJson = serde_json::from_str(text).map_err(schema)?;
    let field = PrimeField::new(json.p).map_err(|e| Error::Schema(e.to_string()))?;
    if json.dims.is_empty() {
        return Err(Error::Schema("zigzag needs at least one space".into()));
    }
    if json.maps.len() + 1 != json.dims.len() {
        return Err(Error::Schema("zigzag needs one map per adjacent pair".into()));
    }
    let mut maps = Vec::new();
    for (i, mj) in json.maps.iter().enumerate() {
        let direction = match mj.dir.as_str() {
            "fwd" => Direction::Forward,
            "bwd" => Direction::Backward,
            other => return Err(Error::Schema(format!("unknown direction {other:?}"))),
        };
        let (rows, cols) = match direction {
            Direction::Forward => (json.dims[i + 1], json.dims[i]),
            Direction::Backward => (json.dims[i], json.dims[i + 1]),
        };
        let matrix = PrimeFieldMatrix::from_rows(field, rows, cols, &mj.mat)
            .map_err(|e| Error::Schema(format!("map {i}: {e}")))?;
        maps.push(ZigzagMap { direction, matrix });
    }
    Zigzag::new(field, json.dims, maps).map_err(|e| Error::Schema(e.to_string()))
}

pub fn read_zigzag(path: &Path) -> Result<Zigzag> {
    zigzag_from_json(&read_to_string(path)?)
}

pub fn write_zigzag(path: &Path, z: &Zigzag) -> Result<()> {
    write_atomic(path, &zigzag_to_json(z))
}

// --------------------------------------------------------------- intervals

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    lo: usize,
    hi: usize,
    mult: usize,
}

#[derive(Serialize, Deserialize)]
struct IntervalsJson {
    len: usize,
    intervals: Vec<IntervalJson>,
}

pub fn intervals_to_json(iv: &IntervalBarcode) -> String {
    let intervals = iv
        .iter()
        .map(|((lo, hi), mult)| IntervalJson { lo, hi, mult })
        .collect();
    serde_json::to_string_pretty(&IntervalsJson { len: iv.len(), intervals }).expect("serializable") + "\n"
}

pub fn intervals_from_json(text: &str) -> Result<IntervalBarcode> {
    let json: IntervalsJson = serde_json::from_str(text).map_err(schema)?;
    let mut out = IntervalBarcode::empty(json.len);
    for iv in &json.intervals {
        if iv.mult == 0 {
            return Err(Error::Schema("interval multiplicity must be positive".into()));
        }
        out.add(iv.lo, iv.hi, iv.mult).map_err(|e| Error::Schema(e.to_string()))?;
    }
    Ok(out)
}

pub fn write_intervals(path: &Path, iv: &IntervalBarcode) -> Result<()> {
    write_atomic(path, &intervals_to_json(iv))
}

// ----------------------------------------------------------------- graphs

#[derive(Serialize, Deserialize)]
struct GraphJson {
    values: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

pub fn graph_to_json(graph: &LabeledGraph) -> String {
    let json = GraphJson { values: graph.values().to_vec(), edges: graph.edges().to_vec() };
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

pub fn graph_from_json(text: &str) -> Result<LabeledGraph> {
    let json: GraphJson = serde_json::from_str(text).map_err(schema)?;
    LabeledGraph::new(json.values, json.edges).map_err(|e| Error::Schema(e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<LabeledGraph> {
    graph_from_json(&read_to_string(path)?)
}

pub fn write_graph(path: &Path, graph: &LabeledGraph) -> Result<()> {
    write_atomic(path, &graph_to_json(graph))
}

// ------------------------------------------------------------------ paths

#[derive(Serialize, Deserialize)]
struct PathStepJson {
    dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mat: Option<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    p: u64,
    points: Vec<(usize, usize)>,
    dims: Vec<usize>,
    maps: Vec<PathStepJson>,
}

pub fn path_to_json(path: &PathModule) -> String {
    let maps = path
        .maps
        .iter()
        .map(|step| PathStepJson {
            dir: match step.orientation {
                Orientation::Forward => "fwd".into(),
                Orientation::Backward => "bwd".into(),
                Orientation::None => "none".into(),
            },
            mat: step.map.as_ref().map(|m| m.to_rows()),
        })
        .collect();
    let json = PathJson {
        p: path.field.modulus(),
        points: path.points.iter().map(|p| (p.x, p.y)).collect(),
        dims: path.spaces.clone(),
        maps,
    };
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

pub fn write_path(path_file: &Path, path: &PathModule) -> Result<()> {
    write_atomic(path_file, &path_to_json(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{random_exact_module, synth};
    use crate::zigzag::synth_zigzag;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn module_roundtrip() {
        for seed in 0..5 {
            let (module, _) = random_exact_module(3, 2, 5, seed, gf(if seed % 2 == 0 { 2 } else { 101 }));
            let text = module_to_json(&module);
            let back = module_from_json(&text).unwrap();
            assert_eq!(back, module, "seed {seed}");
            // Output is deterministic.
            assert_eq!(module_to_json(&back), text);
        }
    }

    #[test]
    fn module_schema_errors() {
        assert!(matches!(module_from_json("{"), Err(Error::Schema(_))));
        // Non-prime modulus.
        let bad = r#"{"p": 6, "n": 0, "m": 0, "dims": [[1]], "hmaps": {}, "vmaps": {}}"#;
        assert!(matches!(module_from_json(bad), Err(Error::Schema(_))));
        // Missing matrix with nonzero endpoint dimensions.
        let missing = r#"{"p": 2, "n": 1, "m": 0, "dims": [[1], [1]], "hmaps": {}, "vmaps": {}}"#;
        assert!(matches!(module_from_json(missing), Err(Error::Schema(_))));
        // Entry not reduced modulo p.
        let unreduced =
            r#"{"p": 2, "n": 1, "m": 0, "dims": [[1], [1]], "hmaps": {"0,0": [[2]]}, "vmaps": {}}"#;
        assert!(matches!(module_from_json(unreduced), Err(Error::Schema(_))));
    }

    #[test]
    fn absent_keys_mean_forced_empty() {
        let barcode = Barcode::from_entries(1, 1, [(Shape::birth(1, 1), 1)]).unwrap();
        let module = synth(&barcode, gf(2));
        let text = module_to_json(&module);
        // All maps into or out of zero spaces are omitted.
        assert!(!text.contains("0,0"));
        assert_eq!(module_from_json(&text).unwrap(), module);
    }

    #[test]
    fn barcode_roundtrip_with_levels() {
        let barcode = Barcode::from_entries(
            3,
            3,
            [(Shape::birth(0, 1), 2), (Shape::hband(1, 2), 1), (Shape::death(0, 0), 1)],
        )
        .unwrap();
        let text = barcode_to_json(&barcode, None);
        let (back, levels) = barcode_from_json(&text).unwrap();
        assert_eq!(back, barcode);
        assert!(levels.is_none());

        let text = barcode_to_json(&barcode, Some(&[-1.0, 0.0, 1.0]));
        let (back, levels) = barcode_from_json(&text).unwrap();
        assert_eq!(back, barcode);
        assert_eq!(levels.unwrap(), vec![-1.0, 0.0, 1.0]);

        let bad = r#"{"n": 1, "m": 1, "blocks": [{"kind": "q", "a": 0, "b": 0, "mult": 1}]}"#;
        assert!(matches!(barcode_from_json(bad), Err(Error::Schema(_))));
    }

    #[test]
    fn zigzag_roundtrip() {
        let intervals = IntervalBarcode::from_entries(4, [((0, 2), 1), ((1, 4), 2)]).unwrap();
        let z = synth_zigzag(&intervals, 4, gf(5)).unwrap();
        let text = zigzag_to_json(&z);
        assert_eq!(zigzag_from_json(&text).unwrap(), z);
        let bad = r#"{"p": 2, "dims": [1, 1], "maps": [{"dir": "sideways", "mat": [[1]]}]}"#;
        assert!(matches!(zigzag_from_json(bad), Err(Error::Schema(_))));
    }

    #[test]
    fn graph_and_intervals_roundtrip() {
        let g = LabeledGraph::new(vec![0.0, 2.0, 0.5], vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(graph_from_json(&graph_to_json(&g)).unwrap(), g);

        let iv = IntervalBarcode::from_entries(6, [((0, 6), 1), ((2, 3), 4)]).unwrap();
        assert_eq!(intervals_from_json(&intervals_to_json(&iv)).unwrap(), iv);
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "{}\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{}\n");
        // Overwrite goes through the same path.
        write_atomic(&path, "[]\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "[]\n");
    }
}
