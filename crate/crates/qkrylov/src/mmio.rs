//! Matrix Market coordinate files (complex general / complex hermitian),
//! one-complex-per-line vector files, and edge-list graph files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, Vector, C64};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Write a dense matrix in Matrix Market coordinate format. Hermitian
/// matrices get the `hermitian` qualifier and only the lower triangle.
pub fn write_matrix_market(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let hermitian = m.is_hermitian();
    let qualifier = if hermitian { "hermitian" } else { "general" };
    writeln!(out, "%%MatrixMarket matrix coordinate complex {qualifier}")?;
    let mut triples: Vec<(usize, usize, C64)> = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if hermitian && j > i {
                continue;
            }
            let v = m.get(i, j);
            if v != C64::ZERO {
                triples.push((i, j, v));
            }
        }
    }
    writeln!(out, "{} {} {}", m.rows(), m.cols(), triples.len())?;
    for (i, j, v) in triples {
        writeln!(out, "{} {} {:.17e} {:.17e}", i + 1, j + 1, v.re, v.im)?;
    }
    Ok(())
}

/// Read a Matrix Market coordinate file into a dense matrix. Accepts
/// real/complex fields with general/symmetric/hermitian qualifiers.
pub fn read_matrix_market(path: &Path) -> Result<ComplexMatrix> {
    let file = BufReader::new(File::open(path)?);
    let mut lines = file.lines().enumerate();

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let first = first?;
    let header: Vec<&str> = first.split_whitespace().collect();
    if header.len() < 5 || header[0] != "%%MatrixMarket" || header[1] != "matrix" {
        return Err(parse_err(path, first_no + 1, "expected '%%MatrixMarket matrix ...'"));
    }
    if header[2] != "coordinate" {
        return Err(parse_err(path, first_no + 1, "only coordinate format is supported"));
    }
    let complex = match header[3] {
        "complex" => true,
        "real" | "integer" => false,
        other => return Err(parse_err(path, first_no + 1, format!("unsupported field '{other}'"))),
    };
    let qualifier = header[4];
    let (symmetric, conjugate) = match qualifier {
        "general" => (false, false),
        "symmetric" => (true, false),
        "hermitian" => (true, true),
        other => {
            return Err(parse_err(
                path,
                first_no + 1,
                format!("unsupported qualifier '{other}'"),
            ))
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<C64> = Vec::new();
    let mut seen = 0usize;
    let (mut rows, mut cols) = (0usize, 0usize);
    for (no, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        if size.is_none() {
            if parts.len() != 3 {
                return Err(parse_err(path, no + 1, "expected 'rows cols nnz'"));
            }
            rows = parts[0]
                .parse()
                .map_err(|_| parse_err(path, no + 1, "bad row count"))?;
            cols = parts[1]
                .parse()
                .map_err(|_| parse_err(path, no + 1, "bad col count"))?;
            let nnz: usize = parts[2]
                .parse()
                .map_err(|_| parse_err(path, no + 1, "bad nnz"))?;
            size = Some((rows, cols, nnz));
            entries = vec![C64::ZERO; rows * cols];
            continue;
        }
        let expected = if complex { 4 } else { 3 };
        if parts.len() != expected {
            return Err(parse_err(
                path,
                no + 1,
                format!("expected {expected} fields, got {}", parts.len()),
            ));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad row index"))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad col index"))?;
        if i < 1 || i > rows || j < 1 || j > cols {
            return Err(parse_err(path, no + 1, "index out of range"));
        }
        let re: f64 = parts[2]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad real part"))?;
        let im: f64 = if complex {
            parts[3]
                .parse()
                .map_err(|_| parse_err(path, no + 1, "bad imaginary part"))?
        } else {
            0.0
        };
        let (i, j) = (i - 1, j - 1);
        entries[i * cols + j] = c(re, im);
        if symmetric && i != j {
            entries[j * cols + i] = if conjugate { c(re, -im) } else { c(re, im) };
        }
        seen += 1;
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(path, 0, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            path,
            0,
            format!("declared {nnz} entries but found {seen}"),
        ));
    }
    ComplexMatrix::new(rows, cols, entries)
}

/// Write a vector as one complex entry per line ("re im").
pub fn write_vector(path: &Path, v: &Vector) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for z in v.entries() {
        writeln!(out, "{:.17e} {:.17e}", z.re, z.im)?;
    }
    Ok(())
}

/// Read a one-complex-per-line vector file. A line may hold one float (real
/// entry) or two floats (re im). Blank lines and '%'/'#' comments are skipped.
pub fn read_vector(path: &Path) -> Result<Vector> {
    let file = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    for (no, line) in file.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') || text.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        let re: f64 = parts[0]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad real part"))?;
        let im: f64 = if parts.len() > 1 {
            parts[1]
                .parse()
                .map_err(|_| parse_err(path, no + 1, "bad imaginary part"))?
        } else {
            0.0
        };
        entries.push(c(re, im));
    }
    if entries.is_empty() {
        return Err(parse_err(path, 0, "empty vector file"));
    }
    Ok(Vector::new(entries))
}

/// Read an edge list: one "u v" pair per line, 0-indexed. Returns the edges
/// and the vertex count (max index + 1).
pub fn read_edge_list(path: &Path) -> Result<(usize, Vec<(usize, usize)>)> {
    let file = BufReader::new(File::open(path)?);
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (no, line) in file.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(path, no + 1, "expected 'u v'"));
        }
        let u: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad vertex"))?;
        let v: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(path, no + 1, "bad vertex"))?;
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Ok((n, edges))
}

/// Write an edge list file.
pub fn write_edge_list(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (u, v) in edges {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
