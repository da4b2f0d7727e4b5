//! Dense and sparse matrix containers plus their binary cache formats.
//!
//! `DenseMatrix` is a row-major `f64` buffer; `SparseRowMatrix` is CSR with
//! per-row sorted `(column, value)` pairs. Both reject non-finite values on
//! construction so downstream kernels never see NaN/Inf.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Magic bytes of the dense cache format.
pub const DENSE_MAGIC: &[u8; 4] = b"APCM";
/// Magic bytes of the sparse cache format.
pub const SPARSE_MAGIC: &[u8; 4] = b"APCS";
const FORMAT_VERSION: u8 = 1;

/// Row-major dense matrix of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    /// Builds from a row-major buffer, validating shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Format("non-finite value in matrix".into()));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_vec(rows.len(), cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.cols + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterator over row slices.
    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols.max(1))
    }

    /// Parallel iterator over mutable row slices. Each row is an independent
    /// work unit, so results are byte-identical to the sequential loop.
    pub fn par_rows_mut(&mut self) -> rayon::slice::ChunksExactMut<'_, f64> {
        use rayon::prelude::*;
        self.values.par_chunks_exact_mut(self.cols.max(1))
    }

    /// New matrix containing the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            values,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Writes the binary cache: magic "APCM", version u8, rows u64-LE,
    /// cols u64-LE, then rows*cols f64-LE values.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(DENSE_MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DENSE_MAGIC {
            return Err(Error::Format("bad magic, expected APCM".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported APCM version {}",
                version[0]
            )));
        }
        let rows = read_u64(r)? as usize;
        let cols = read_u64(r)? as usize;
        let mut values = vec![0.0f64; rows.checked_mul(cols).ok_or_else(|| {
            Error::Format("matrix dimensions overflow".into())
        })?];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Self::from_vec(rows, cols, values)
    }

    pub fn write_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        Self::read(&mut r)
    }
}

/// Sparse row matrix (CSR): per-row strictly increasing column indices, no
/// explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    rows: usize,
    cols: usize,
    row_starts: Vec<usize>,
    col_indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseRowMatrix {
    /// Builds from per-row `(column, value)` pair lists, validating the
    /// invariants: sorted strictly increasing columns, indices in range,
    /// finite non-zero values.
    pub fn from_rows(cols: usize, rows: &[Vec<(u32, f64)>]) -> Result<Self> {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_starts = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_starts.push(0);
        for row in rows {
            let mut prev: Option<u32> = None;
            for &(c, v) in row {
                if (c as usize) >= cols {
                    return Err(Error::Format(format!(
                        "column index {c} out of range for {cols} columns"
                    )));
                }
                if let Some(p) = prev {
                    if c <= p {
                        return Err(Error::Format(
                            "column indices must be strictly increasing within a row".into(),
                        ));
                    }
                }
                if v == 0.0 {
                    return Err(Error::Format("explicit zero stored in sparse row".into()));
                }
                if !v.is_finite() {
                    return Err(Error::Format("non-finite value in sparse matrix".into()));
                }
                prev = Some(c);
                col_indices.push(c);
                values.push(v);
            }
            row_starts.push(col_indices.len());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            row_starts,
            col_indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(columns, values)` slices of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_starts[i];
        let hi = self.row_starts[i + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Writes the binary cache: magic "APCS", version u8, rows u64-LE,
    /// cols u64-LE, then per row a u64-LE count followed by that many
    /// (u32-LE column, f64-LE value) pairs.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(SPARSE_MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            w.write_all(&(cols.len() as u64).to_le_bytes())?;
            for (c, v) in cols.iter().zip(vals) {
                w.write_all(&c.to_le_bytes())?;
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SPARSE_MAGIC {
            return Err(Error::Format("bad magic, expected APCS".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported APCS version {}",
                version[0]
            )));
        }
        let rows = read_u64(r)? as usize;
        let cols = read_u64(r)? as usize;
        let mut parsed = Vec::with_capacity(rows);
        let mut cbuf = [0u8; 4];
        let mut vbuf = [0u8; 8];
        for _ in 0..rows {
            let count = read_u64(r)? as usize;
            let mut row = Vec::with_capacity(count);
            for _ in 0..count {
                r.read_exact(&mut cbuf)?;
                r.read_exact(&mut vbuf)?;
                row.push((u32::from_le_bytes(cbuf), f64::from_le_bytes(vbuf)));
            }
            parsed.push(row);
        }
        Self::from_rows(cols, &parsed)
    }

    pub fn write_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        Self::read(&mut r)
    }
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}
