//! File formats.
//!
//! State files: a `dims,...` header line (`dims,N` for one mode,
//! `dims,Q,N` for transmon x magnon), then one matrix row per line as
//! comma-separated `re,im` pairs. Floats use the shortest representation
//! that parses back to the same value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use magnoncat::WignerGrid;
use magnoncat::hilbert::{Dims, SpaceDims};
use magnoncat::{CMatrix, Complex, DensityMatrix};

use crate::error::{CliError, CliResult};

pub fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(CliError::io(path))?;
    Ok(csv::WriterBuilder::new().flexible(true).from_writer(BufWriter::new(file)))
}

pub fn csv_error(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), source: std::io::Error::other(e.to_string()) }
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let err = csv_error(path);
    let header = match rho.dims() {
        Dims::Single(n) => vec!["dims".to_string(), n.to_string()],
        Dims::Composite(d) => vec!["dims".to_string(), d.qubit.to_string(), d.magnon.to_string()],
    };
    w.write_record(&header).map_err(&err)?;
    for row in rho.matrix().rows() {
        let fields = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]);
        w.write_record(fields).map_err(&err)?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    let bad = |reason: String| CliError::InputFile { path: path.to_path_buf(), reason };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut records = reader.records();
    let header = records.next().ok_or_else(|| bad("empty file".into()))?.map_err(|e| bad(e.to_string()))?;
    if header.get(0) != Some("dims") {
        return Err(bad("first line must start with `dims`".into()));
    }
    let sizes: Vec<usize> = header
        .iter()
        .skip(1)
        .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad dimension `{s}`"))))
        .collect::<CliResult<_>>()?;
    let dims = match sizes.as_slice() {
        [n] => Dims::Single(*n),
        [q, m] => Dims::Composite(SpaceDims::new(*q, *m).map_err(|e| bad(e.to_string()))?),
        _ => return Err(bad("header must be `dims,N` or `dims,Q,N`".into())),
    };
    let n = dims.total();
    if n < 2 {
        return Err(bad("dimension must be at least 2".into()));
    }
    let mut m = CMatrix::from_elem((n, n), Complex::new(0.0, 0.0));
    let mut rows = 0;
    for (i, record) in records.enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if i >= n {
            return Err(bad(format!("more than {n} matrix rows")));
        }
        if record.len() != 2 * n {
            return Err(bad(format!("row {} has {} fields, expected {}", i + 1, record.len(), 2 * n)));
        }
        for j in 0..n {
            let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("row {}: `{s}` is not a number", i + 1)));
            m[[i, j]] = Complex::new(parse(&record[2 * j])?, parse(&record[2 * j + 1])?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(bad(format!("found {rows} matrix rows, expected {n}")));
    }
    DensityMatrix::new(dims, m).map_err(|e| bad(format!("not a valid density matrix: {e}")))
}

pub fn write_wigner_csv(path: &Path, grid: &WignerGrid) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let err = csv_error(path);
    w.write_record(["re", "im", "W"]).map_err(&err)?;
    for (i, y) in grid.im_axis.iter().enumerate() {
        for (j, x) in grid.re_axis.iter().enumerate() {
            w.write_record([x.to_string(), y.to_string(), grid.values[[i, j]].to_string()]).map_err(&err)?;
        }
    }
    w.flush().map_err(CliError::io(path))
}

/// Binary 8-bit PGM with `[min W, max W]` mapped to `[0, 255]`; the top image
/// row is the largest imaginary part.
pub fn write_wigner_pgm(path: &Path, grid: &WignerGrid) -> CliResult<()> {
    let (lo, hi) = (grid.min(), grid.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (rows, cols) = grid.values.dim();
    let mut bytes = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    for i in (0..rows).rev() {
        for j in 0..cols {
            let level = ((grid.values[[i, j]] - lo) / span * 255.0).round().clamp(0.0, 255.0);
            bytes.push(level as u8);
        }
    }
    let mut file = File::create(path).map_err(CliError::io(path))?;
    file.write_all(&bytes).map_err(CliError::io(path))
}

/// Writes `text` to `path`.
pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(CliError::io(path))
}
