//! `ACLF` unit matrix files: magic `b"ACLF"`, `u32` rows, `u32` dim, `u32`
//! reserved (0), then `f32` little-endian values row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numcore::Matrix;

pub const UNIT_MAGIC: &[u8; 4] = b"ACLF";
pub const UNIT_HEADER_BYTES: u64 = 16;

pub fn encode_unit_matrix(matrix: &Matrix<f32>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 4 * matrix.data().len());
    out.extend_from_slice(UNIT_MAGIC);
    out.extend_from_slice(&(matrix.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(matrix.cols() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in matrix.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_unit_matrix(path: &Path, matrix: &Matrix<f32>) -> Result<()> {
    fs::write(path, encode_unit_matrix(matrix)).map_err(|e| Error::io(path, e))
}

/// Expected on-disk size for a `rows × dim` file.
pub fn unit_file_len(rows: usize, dim: usize) -> u64 {
    UNIT_HEADER_BYTES + 4 * (rows as u64) * (dim as u64)
}

pub fn decode_unit_matrix(bytes: &[u8], path: &Path) -> Result<Matrix<f32>> {
    if bytes.len() < UNIT_HEADER_BYTES as usize {
        return Err(Error::format("unit matrix", path, format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != UNIT_MAGIC {
        return Err(Error::format("unit matrix", path, "bad magic (expected ACLF)"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (rows, dim, reserved) = (word(4), word(8), word(12));
    if reserved != 0 {
        return Err(Error::format("unit matrix", path, "reserved header word is not zero"));
    }
    let expected = unit_file_len(rows, dim);
    if bytes.len() as u64 != expected {
        return Err(Error::format(
            "unit matrix",
            path,
            format!("{} bytes, header declares {rows}x{dim} ({expected} bytes)", bytes.len()),
        ));
    }
    let data = bytes[16..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    Matrix::new(rows, dim, data)
}

/// Reads a unit matrix and checks it has exactly `num_units × dim` values.
pub fn load_unit_matrix(path: &Path, num_units: usize, dim: usize) -> Result<Matrix<f32>> {
    let m = read_unit_matrix(path)?;
    if m.shape() != (num_units, dim) {
        return Err(Error::format(
            "unit matrix",
            path,
            format!("holds {}x{}, expected {num_units}x{dim}", m.rows(), m.cols()),
        ));
    }
    Ok(m)
}

pub fn read_unit_matrix(path: &Path) -> Result<Matrix<f32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_unit_matrix(&bytes, path)
}
