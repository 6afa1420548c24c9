//! LibSVM text format: `label idx:val idx:val ...` with 1-based indices.

use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Reads a LibSVM file. Rows are samples; the column count is the largest
/// feature index present.
pub fn read_libsvm(path: impl AsRef<Path>) -> Result<(SparseMatrix, Vec<f64>)> {
    let file = std::fs::File::open(path)?;
    parse_libsvm(BufReader::new(file), None)
}

/// Parses LibSVM data. `n_features` fixes the column count; indices beyond it
/// are an error.
pub fn parse_libsvm(reader: impl BufRead, n_features: Option<usize>) -> Result<(SparseMatrix, Vec<f64>)> {
    let mut labels = Vec::new();
    let mut row_offsets = vec![0];
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    let mut max_col = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("invalid label '{label_tok}'")))?;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, found '{tok}'")))?;
            if i == "qid" {
                continue;
            }
            let i: usize = i.parse().map_err(|_| err(format!("invalid index '{i}'")))?;
            if i == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            let v: f64 = v.parse().map_err(|_| err(format!("invalid value '{v}'")))?;
            if let Some(n) = n_features {
                if i > n {
                    return Err(err(format!("feature index {i} exceeds {n}")));
                }
            }
            entries.push((i - 1, v));
        }
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(err("duplicate feature index".into()));
        }
        for (c, v) in entries {
            max_col = max_col.max(c + 1);
            col_indices.push(c);
            values.push(v);
        }
        labels.push(label);
        row_offsets.push(col_indices.len());
    }
    if labels.is_empty() {
        return Err(Error::Parse { line: 0, message: "empty LibSVM file".into() });
    }
    let cols = n_features.unwrap_or(max_col);
    let a = SparseMatrix::new(labels.len(), cols, row_offsets, col_indices, values)?;
    Ok((a, labels))
}
