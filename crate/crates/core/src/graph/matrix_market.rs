//! Matrix Market coordinate reader/writer for adjacency matrices.
//!
//! Only `coordinate real|integer general|symmetric` is accepted: weights are
//! required, so `pattern` and `complex` fields are rejected.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use super::WeightedDigraph;
use crate::error::{QswError, Result};
use crate::sparse::SparseMatrix;

fn mm_err(line: usize, reason: impl Into<String>) -> QswError {
    QswError::MatrixMarket {
        line,
        reason: reason.into(),
    }
}

/// Parses a Matrix Market coordinate stream into a validated digraph.
///
/// Symmetric files are expanded to full storage. Duplicate coordinates,
/// diagonal entries and non-positive weights are errors.
pub fn load_matrix_market<R: BufRead>(reader: R) -> Result<WeightedDigraph> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| mm_err(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(mm_err(1, "expected `%%MatrixMarket matrix ...` header"));
    }
    if tokens[2] != "coordinate" {
        return Err(mm_err(1, format!("unsupported format `{}`", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(mm_err(1, format!("unsupported field `{other}`"))),
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(mm_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = HashSet::new();
    let mut read_entries = 0usize;

    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((n_rows, n_cols, nnz)) = size else {
            if fields.len() != 3 {
                return Err(mm_err(lineno, "size line must hold `rows cols entries`"));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| mm_err(lineno, format!("bad size value `{s}`")))
            };
            let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            if dims.0 != dims.1 {
                return Err(mm_err(lineno, "adjacency matrix must be square"));
            }
            size = Some(dims);
            continue;
        };
        if fields.len() != 3 {
            return Err(mm_err(lineno, "entry must hold `row col value`"));
        }
        if read_entries == nnz {
            return Err(mm_err(lineno, "more entries than declared"));
        }
        let idx = |s: &str, bound: usize| -> Result<usize> {
            let v = s
                .parse::<usize>()
                .map_err(|_| mm_err(lineno, format!("bad index `{s}`")))?;
            if v == 0 || v > bound {
                return Err(mm_err(lineno, format!("index {v} out of bounds 1..={bound}")));
            }
            Ok(v - 1)
        };
        let r = idx(fields[0], n_rows)?;
        let c = idx(fields[1], n_cols)?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| mm_err(lineno, format!("bad value `{}`", fields[2])))?;
        if r == c {
            return Err(mm_err(
                lineno,
                format!("nonzero diagonal entry at ({}, {})", r + 1, c + 1),
            ));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(mm_err(lineno, format!("weight must be positive, got {w}")));
        }
        let mut push = |a: usize, b: usize| -> Result<()> {
            if !seen.insert((a, b)) {
                return Err(mm_err(lineno, format!("duplicate entry ({}, {})", a + 1, b + 1)));
            }
            triplets.push((a, b, Complex64::new(w, 0.0)));
            Ok(())
        };
        push(r, c)?;
        if symmetric {
            push(c, r)?;
        }
        read_entries += 1;
    }

    let (n, _, nnz) = size.ok_or_else(|| mm_err(1, "missing size line"))?;
    if read_entries != nnz {
        return Err(mm_err(0, format!("declared {nnz} entries, found {read_entries}")));
    }
    let adjacency = SparseMatrix::from_unique_triplets(n, n, triplets)?;
    WeightedDigraph::new(adjacency)
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<WeightedDigraph> {
    let file = File::open(path.as_ref())?;
    load_matrix_market(BufReader::new(file))
}

/// Writes `coordinate real general` with entries sorted by (column, row).
pub fn save_matrix_market<W: Write>(g: &WeightedDigraph, mut out: W) -> Result<()> {
    let adj = g.adjacency();
    let mut entries: Vec<(usize, usize, f64)> = adj.iter().map(|(r, c, v)| (r, c, v.re)).collect();
    entries.sort_by_key(|&(r, c, _)| (c, r));
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", adj.n_rows(), adj.n_cols(), entries.len())?;
    for (r, c, w) in entries {
        writeln!(out, "{} {} {:e}", r + 1, c + 1, w)?;
    }
    Ok(())
}
