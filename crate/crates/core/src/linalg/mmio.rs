//! Matrix Market coordinate reader (`real general`, 1-based indices).

use std::io::BufRead;
use std::path::Path;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let file = std::fs::File::open(path)?;
    parse_matrix_market(std::io::BufReader::new(file))
}

pub fn parse_matrix_market(reader: impl BufRead) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, message: "empty input".into() }),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse { line: 1, message: format!("not a Matrix Market header: {header}") });
    }
    if tokens[2] != "coordinate" || tokens[3] != "real" || tokens[4] != "general" {
        return Err(Error::UnsupportedFormat(format!(
            "only 'coordinate real general' is supported, got '{} {} {}'",
            tokens[2], tokens[3], tokens[4]
        )));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let parse_err = |message: String| Error::Parse { line: lineno, message };
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err("size line needs rows, cols and nnz".into()));
                }
                let nums: std::result::Result<Vec<usize>, _> = fields.iter().map(|f| f.parse()).collect();
                let nums = nums.map_err(|e| parse_err(format!("bad size line: {e}")))?;
                size = Some((nums[0], nums[1], nums[2]));
                triplets.reserve(nums[2]);
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err("entry needs row, col and value".into()));
                }
                let r: usize = fields[0].parse().map_err(|e| parse_err(format!("bad row index: {e}")))?;
                let c: usize = fields[1].parse().map_err(|e| parse_err(format!("bad column index: {e}")))?;
                let v: f64 = fields[2].parse().map_err(|e| parse_err(format!("bad value: {e}")))?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(parse_err(format!("index ({r}, {c}) outside {rows}x{cols}")));
                }
                triplets.push((r - 1, c - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or(Error::Parse { line: 1, message: "missing size line".into() })?;
    if triplets.len() != nnz {
        return Err(Error::Parse {
            line: 0,
            message: format!("declared {nnz} entries, found {}", triplets.len()),
        });
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}
