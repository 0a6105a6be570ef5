//! File formats: Matrix Market matrices, plain-text vectors, edge lists.
//!
//! Matrices travel as Matrix Market `coordinate real` files in `general` or
//! `symmetric` symmetry (symmetric input is expanded to full storage on
//! read, since the solvers assume both triangles are present). `pattern`
//! and `complex` fields are rejected outright. Vectors are one value per
//! line, or a one-column Matrix Market `array` file. Graphs are plain edge
//! lists, one `u v resistance` triple per line with 0-indexed vertices.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Reads a Matrix Market `coordinate real general|symmetric` file.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text).map_err(|(line, msg)| Error::parse(path, line, msg))
}

fn parse_matrix_market(text: &str) -> std::result::Result<CsrMatrix, (usize, String)> {
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or((1, "empty file".to_string()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err((1, format!("bad header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err((1, format!("unsupported format '{}', need coordinate", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        "pattern" => return Err((1, "pattern matrices carry no values; not supported".into())),
        "complex" => return Err((1, "complex matrices are not supported".into())),
        other => return Err((1, format!("unsupported field '{other}'"))),
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err((1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            if parts.len() != 3 {
                return Err((lineno, "size line must be 'rows cols nnz'".into()));
            }
            let dims: Vec<usize> = parts
                .iter()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| (lineno, format!("bad size line: {e}")))?;
            size = Some((dims[0], dims[1], dims[2]));
            triplets.reserve(dims[2]);
            continue;
        }
        let (nrows, ncols, _) = size.unwrap();
        if parts.len() != 3 {
            return Err((lineno, "entry must be 'row col value'".into()));
        }
        let r: usize = parts[0]
            .parse()
            .map_err(|e| (lineno, format!("bad row index: {e}")))?;
        let c: usize = parts[1]
            .parse()
            .map_err(|e| (lineno, format!("bad col index: {e}")))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|e| (lineno, format!("bad value: {e}")))?;
        if r == 0 || c == 0 || r > nrows || c > ncols {
            return Err((lineno, format!("index ({r}, {c}) out of bounds (1-indexed)")));
        }
        triplets.push((r - 1, c - 1, v));
        if symmetric && r != c {
            triplets.push((c - 1, r - 1, v));
        }
    }

    let (nrows, ncols, nnz) = size.ok_or((1, "missing size line".to_string()))?;
    let listed = if symmetric {
        triplets.len() - triplets.iter().filter(|t| t.0 != t.1).count() / 2
    } else {
        triplets.len()
    };
    if listed != nnz {
        return Err((1, format!("size line promised {nnz} entries, found {listed}")));
    }
    CsrMatrix::from_triplets(nrows, ncols, &triplets).map_err(|e| (1, e.to_string()))
}

/// Writes a matrix as Matrix Market `coordinate real general`.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", a.nrows(), a.ncols(), a.nnz()));
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            out.push_str(&format!("{} {} {:.16e}\n", i + 1, c + 1, v));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a vector: either a one-column Matrix Market `array` file or plain
/// text with one value per line (blank lines and `#`/`%` comments skipped).
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.to_lowercase().starts_with("%%matrixmarket") {
        return parse_mm_array(&text).map_err(|(line, msg)| Error::parse(path, line, msg));
    }
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|e| Error::parse(path, idx + 1, format!("bad value: {e}")))?;
        if !v.is_finite() {
            return Err(Error::parse(path, idx + 1, format!("non-finite value {v}")));
        }
        values.push(v);
    }
    Ok(values)
}

fn parse_mm_array(text: &str) -> std::result::Result<Vec<f64>, (usize, String)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or((1, "empty file".to_string()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[2] != "array" {
        return Err((1, "expected a Matrix Market array header".into()));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err((1, format!("unsupported array field '{other}'"))),
    }
    let mut size: Option<(usize, usize)> = None;
    let mut values = Vec::new();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if size.is_none() {
            let parts: Vec<usize> = line
                .split_whitespace()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| (lineno, format!("bad size line: {e}")))?;
            if parts.len() != 2 || parts[1] != 1 {
                return Err((lineno, "vector array must be one column".into()));
            }
            size = Some((parts[0], parts[1]));
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|e| (lineno, format!("bad value: {e}")))?;
        values.push(v);
    }
    let (n, _) = size.ok_or((1, "missing size line".to_string()))?;
    if values.len() != n {
        return Err((1, format!("expected {n} values, found {}", values.len())));
    }
    Ok(values)
}

/// Writes a vector as plain text, one value per line, 17 significant digits.
pub fn write_vector(path: impl AsRef<Path>, x: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(x.len() * 24);
    for v in x {
        out.push_str(&format!("{v:.16e}\n"));
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

/// Reads an edge list: one `u v resistance` triple per line, 0-indexed.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Vec<(usize, usize, f64)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::parse(path, idx + 1, "expected 'u v resistance'"));
        }
        let u: usize = parts[0]
            .parse()
            .map_err(|e| Error::parse(path, idx + 1, format!("bad vertex: {e}")))?;
        let v: usize = parts[1]
            .parse()
            .map_err(|e| Error::parse(path, idx + 1, format!("bad vertex: {e}")))?;
        let r: f64 = parts[2]
            .parse()
            .map_err(|e| Error::parse(path, idx + 1, format!("bad resistance: {e}")))?;
        edges.push((u, v, r));
    }
    Ok(edges)
}

/// Writes an edge list in the format accepted by [`read_edge_list`].
pub fn write_edge_list(path: impl AsRef<Path>, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut out = String::new();
    for &(u, v, r) in edges {
        out.push_str(&format!("{u} {v} {r:.16e}\n"));
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

/// Writes file contents through a temporary sibling and an atomic rename,
/// so a crashed run never leaves a truncated artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
