//! Command-line surface over the JSON file formats.
//!
//! Exit codes: 0 success, 2 validation failure, 3 certification failure,
//! 4 schema or I/O error, 5 internal inconsistency. Failures print a single
//! machine-parseable line `error: <kind>: <message>` to stderr. Output
//! files are written atomically. `PDECOMP_THREADS` caps the worker pool
//! (0 or unset picks the default).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::blocks::{random_exact_module, synth, Barcode, ShapeKind};
use crate::decompose::{certify, decompose};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::interlevel::interlevel_barcode;
use crate::io;
use crate::metric::bottleneck;
use crate::module::Point;
use crate::zigzag::zigzag_decompose;

#[derive(Parser)]
#[command(name = "pdecomp", version, about = "Block decomposition of exact two-parameter persistence modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check commutativity and exactness of a module file.
    Validate { file: PathBuf },
    /// Decompose an exact module into its block barcode.
    Decompose {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify a barcode against a module by constructing explicit bases.
    Certify { module: PathBuf, barcode: PathBuf },
    /// Build the module described by a barcode.
    Synth {
        barcode: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Field modulus.
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Generate a seeded random exact module with hidden block structure.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the ground-truth barcode.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Decompose a zigzag module into intervals.
    Zigzag {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Interlevel-set barcode of a function on a graph.
    Interlevel {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Bottleneck distance between two barcodes.
    Distance { first: PathBuf, second: PathBuf },
    /// Smoothing by a grid vector (--ex, --ey).
    Smooth {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        ex: usize,
        #[arg(long, default_value_t = 0)]
        ey: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Restrict a module to a point sequence "x0,y0;x1,y1;...".
    Restrict {
        file: PathBuf,
        #[arg(long)]
        path: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render a barcode as SVG.
    Plot {
        barcode: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Parses argv, runs one subcommand, and maps errors onto exit codes.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let (code, kind) = classify(&err);
            eprintln!("error: {kind}: {err}");
            code
        }
    }
}

fn classify(err: &Error) -> (u8, &'static str) {
    match err {
        Error::NotExact(_) => (2, "validation"),
        Error::Certification(_) => (3, "certification"),
        Error::Inconsistency(_) => (5, "internal"),
        Error::Io(_) => (4, "io"),
        _ => (4, "schema"),
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("PDECOMP_THREADS") {
        if let Ok(threads) = raw.trim().parse::<usize>() {
            if threads > 0 {
                // Ignore the error when a pool already exists.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}

fn field(p: u64) -> Result<PrimeField> {
    PrimeField::new(p).map_err(|e| Error::Schema(e.to_string()))
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Validate { file } => {
            let module = io::read_module(&file)?;
            let report = module.validate();
            println!("commutes: {}", report.commutes);
            println!("exact: {}", report.exact);
            if let Some(f) = &report.first_failure {
                let kind = match f.kind {
                    crate::module::FailureKind::Commute => "commute",
                    crate::module::FailureKind::Exact => "exact",
                };
                println!(
                    "first_failure: square {} kind {} dim_image {} dim_kernel {}",
                    f.corner, kind, f.dim_image, f.dim_kernel
                );
            }
            Ok(if report.exact { 0 } else { 2 })
        }
        Command::Decompose { file, output } => {
            let module = io::read_module(&file)?;
            let barcode = decompose(&module)?;
            io::write_barcode(&output, &barcode, None)?;
            println!("blocks: {}", barcode.total_blocks());
            Ok(0)
        }
        Command::Certify { module, barcode } => {
            let module = io::read_module(&module)?;
            let (barcode, _) = io::read_barcode(&barcode)?;
            let certificate = certify(&module, &barcode)?;
            println!("certified: {} shapes", certificate.anchors.len());
            Ok(0)
        }
        Command::Synth { barcode, output, p } => {
            let (barcode, _) = io::read_barcode(&barcode)?;
            let module = synth(&barcode, field(p)?);
            io::write_module(&output, &module)?;
            Ok(0)
        }
        Command::Random { n, m, blocks, seed, p, output, truth } => {
            if blocks == 0 {
                return Err(Error::Schema("--blocks must be at least 1".into()));
            }
            let (module, barcode) = random_exact_module(n, m, blocks, seed, field(p)?);
            io::write_module(&output, &module)?;
            if let Some(truth_path) = truth {
                io::write_barcode(&truth_path, &barcode, None)?;
            }
            Ok(0)
        }
        Command::Zigzag { file, output } => {
            let z = io::read_zigzag(&file)?;
            let intervals = zigzag_decompose(&z)?;
            io::write_intervals(&output, &intervals)?;
            Ok(0)
        }
        Command::Interlevel { file, output, p } => {
            let graph = io::read_graph(&file)?;
            let (barcode, levels) = interlevel_barcode(&graph, field(p)?)?;
            io::write_barcode(&output, &barcode, Some(&levels))?;
            Ok(0)
        }
        Command::Distance { first, second } => {
            let (b1, _) = io::read_barcode(&first)?;
            let (b2, _) = io::read_barcode(&second)?;
            println!("{}", bottleneck(&b1, &b2)?);
            Ok(0)
        }
        Command::Smooth { file, ex, ey, output } => {
            let module = io::read_module(&file)?;
            let smoothed = module.smoothing(ex, ey)?;
            io::write_module(&output, &smoothed)?;
            Ok(0)
        }
        Command::Restrict { file, path, output } => {
            let module = io::read_module(&file)?;
            let points = parse_path(&path)?;
            let restricted = module.restrict_path(&points)?;
            io::write_path(&output, &restricted)?;
            Ok(0)
        }
        Command::Plot { barcode, output } => {
            let (barcode, _) = io::read_barcode(&barcode)?;
            io::write_atomic(&output, &plot_svg(&barcode))?;
            Ok(0)
        }
    }
}

fn parse_path(text: &str) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (x, y) = part
            .split_once(',')
            .ok_or_else(|| Error::Schema(format!("bad path point {part:?}")))?;
        let x = x.trim().parse().map_err(|e| Error::Schema(format!("bad path point {part:?}: {e}")))?;
        let y = y.trim().parse().map_err(|e| Error::Schema(format!("bad path point {part:?}: {e}")))?;
        points.push(Point::new(x, y));
    }
    if points.is_empty() {
        return Err(Error::Schema("path needs at least one point".into()));
    }
    Ok(points)
}

const CELL: f64 = 40.0;
const MARGIN: f64 = 40.0;

fn color(kind: ShapeKind) -> &'static str {
    match kind {
        ShapeKind::Birth => "#1f77b4",
        ShapeKind::Death => "#d62728",
        ShapeKind::HBand => "#2ca02c",
        ShapeKind::VBand => "#9467bd",
    }
}

/// Deterministic SVG rendering: one translucent rectangle per block over the
/// grid, colored by kind, opacity deepening with multiplicity, with a count
/// label for multiplicities above one.
pub fn plot_svg(barcode: &Barcode) -> String {
    let (n, m) = barcode.grid();
    let width = 2.0 * MARGIN + n as f64 * CELL;
    let height = 2.0 * MARGIN + m as f64 * CELL;
    let px = |x: usize| MARGIN + x as f64 * CELL;
    let py = |y: usize| height - MARGIN - y as f64 * CELL;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    ));
    for x in 0..=n {
        out.push_str(&format!(
            "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            px(x),
            py(0),
            py(m)
        ));
    }
    for y in 0..=m {
        out.push_str(&format!(
            "  <line x1=\"{0:.1}\" y1=\"{2:.1}\" x2=\"{1:.1}\" y2=\"{2:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            px(0),
            px(n),
            py(y)
        ));
    }
    let pad = 0.3 * CELL;
    for (shape, mult) in barcode.iter() {
        let (lo, hi) = shape.support_box(n, m);
        let x = px(lo.x) - pad;
        let y = py(hi.y) - pad;
        let w = px(hi.x) - px(lo.x) + 2.0 * pad;
        let h = py(lo.y) - py(hi.y) + 2.0 * pad;
        let opacity = 1.0 - 0.7f64.powi(mult as i32);
        out.push_str(&format!(
            "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{w:.1}\" height=\"{h:.1}\" fill=\"{}\" \
             fill-opacity=\"{opacity:.3}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            color(shape.kind),
            color(shape.kind)
        ));
        if mult > 1 {
            out.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">x{mult}</text>\n",
                x + 3.0,
                y + 13.0,
                color(shape.kind)
            ));
        }
    }
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\">({n}, {m})</text>\n",
        px(n) + 4.0,
        py(m) - 4.0
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::Shape;

    #[test]
    fn path_parsing() {
        assert_eq!(
            parse_path("0,0;1,0; 1,1").unwrap(),
            vec![Point::new(0, 0), Point::new(1, 0), Point::new(1, 1)]
        );
        assert!(parse_path("").is_err());
        assert!(parse_path("1;2").is_err());
        assert!(parse_path("a,b").is_err());
    }

    #[test]
    fn svg_is_deterministic_and_wellformed() {
        let empty = Barcode::empty(3, 3);
        let svg = plot_svg(&empty);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));

        let barcode = Barcode::from_entries(
            3,
            3,
            [(Shape::birth(1, 1), 1), (Shape::hband(0, 1), 3), (Shape::death(1, 2), 1), (Shape::vband(2, 2), 1)],
        )
        .unwrap();
        let one = plot_svg(&barcode);
        let two = plot_svg(&barcode);
        assert_eq!(one, two);
        // One rectangle per distinct block plus the background.
        assert_eq!(one.matches("<rect").count(), 1 + 4);
        // Multiplicity label present.
        assert!(one.contains(">x3<"));
    }

    #[test]
    fn single_birth_quadrant_anchored_at_corner() {
        let barcode = Barcode::from_entries(3, 3, [(Shape::birth(1, 1), 1)]).unwrap();
        let svg = plot_svg(&barcode);
        // The quadrant rect starts at the pixel of grid x = 1 minus padding.
        let x = MARGIN + CELL - 0.3 * CELL;
        assert!(svg.contains(&format!("x=\"{x:.1}\"")));
    }
}
