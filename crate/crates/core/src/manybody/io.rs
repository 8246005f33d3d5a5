//! Matrix export.
//!
//! Binary layout (all little-endian):
//!
//! | offset | type  | content                                   |
//! |--------|-------|-------------------------------------------|
//! | 0      | `u64` | dimension `D`                             |
//! | 8      | `f64` | coupling `g`                              |
//! | 16     | `f64` | truncation energy `E_max` (may be `inf`)  |
//! | 24     | `f64` | `D(D+1)/2` lower-triangle entries, row-major: `H[0][0], H[1][0], H[1][1], H[2][0], ...` |

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::Mat;

use super::HamiltonianMatrix;

/// Header of the binary matrix layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixHeader {
    pub dim: u64,
    pub g: f64,
    pub e_max: f64,
}

pub fn write_matrix_binary(h: &HamiltonianMatrix, out: impl Write) -> std::io::Result<()> {
    let header = MatrixHeader {
        dim: h.dim() as u64,
        g: h.g(),
        e_max: h.basis().e_max(),
    };
    write_symmetric_binary(&header, &h.matrix(), out)
}

pub fn write_symmetric_binary(
    header: &MatrixHeader,
    m: &Mat,
    mut out: impl Write,
) -> std::io::Result<()> {
    out.write_all(&header.dim.to_le_bytes())?;
    out.write_all(&header.g.to_le_bytes())?;
    out.write_all(&header.e_max.to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..=i {
            out.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads the binary layout back into a full symmetric matrix.
pub fn read_symmetric_binary(mut input: impl Read) -> Result<(MatrixHeader, Mat)> {
    let mut word = [0u8; 8];
    let mut next = |what: &str| -> Result<[u8; 8]> {
        input
            .read_exact(&mut word)
            .map_err(|e| Error::Parse(format!("truncated matrix file ({what}): {e}")))?;
        Ok(word)
    };
    let dim = u64::from_le_bytes(next("dimension")?);
    let g = f64::from_le_bytes(next("g")?);
    let e_max = f64::from_le_bytes(next("E_max")?);
    let d = usize::try_from(dim).map_err(|_| Error::Parse(format!("dimension {dim} too large")))?;
    let mut m = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = f64::from_le_bytes(next("entries")?);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok((MatrixHeader { dim, g, e_max }, m))
}

/// Full matrix as CSV, one row per line, 17 significant digits.
pub fn write_matrix_csv(m: &Mat, mut out: impl Write) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
