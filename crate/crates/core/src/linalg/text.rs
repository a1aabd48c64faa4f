//! Plain-text matrix files.
//!
//! ```text
//! 2
//! 2.0000000000000000e0 1.0000000000000000e0
//! 1.0000000000000000e0 2.0000000000000000e0
//! ```
//!
//! The first line holds the dimension, followed by one line per row with the
//! full (not triangular) row. Values are written with 17 significant digits so
//! that f64 matrices round-trip exactly. Parsing applies the same
//! symmetrization rule as [`SymMatrix::new`].

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::Real;

pub fn parse_matrix<T: Real>(text: &str) -> Result<SymMatrix<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (dim_line, dim_text) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input, expected dimension".into(),
    })?;
    let dim: usize = dim_text.parse().map_err(|_| Error::Parse {
        line: dim_line,
        message: format!("expected a positive integer dimension, got `{dim_text}`"),
    })?;
    if dim == 0 {
        return Err(Error::Parse {
            line: dim_line,
            message: "dimension must be at least 1".into(),
        });
    }

    let mut data = Vec::with_capacity(dim * dim);
    let mut last_line = dim_line;
    for row in 0..dim {
        let (line, text) = lines.next().ok_or(Error::Parse {
            line: last_line + 1,
            message: format!("expected {dim} rows, found {row}"),
        })?;
        last_line = line;
        let mut count = 0;
        for tok in text.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number `{tok}`"),
            })?;
            data.push(T::lit(v));
            count += 1;
        }
        if count != dim {
            return Err(Error::Parse {
                line,
                message: format!("row has {count} entries, expected {dim}"),
            });
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: "trailing content after matrix".into(),
        });
    }
    SymMatrix::new(dim, data).map_err(|e| Error::Parse {
        line: dim_line,
        message: e.to_string(),
    })
}

pub fn format_matrix<T: Real>(m: &SymMatrix<T>) -> String {
    let mut out = format!("{}\n", m.dim());
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{:.16e}", x.as_f64())).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix_file<T: Real>(path: impl AsRef<Path>) -> Result<SymMatrix<T>> {
    let text =
        std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_matrix(&text)
}

pub fn write_matrix_file<T: Real>(path: impl AsRef<Path>, m: &SymMatrix<T>) -> Result<()> {
    std::fs::write(path.as_ref(), format_matrix(m)).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}
