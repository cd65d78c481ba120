//! Compressed sparse matrix and sparse vector storage.
//!
//! All indices are zero-based. Matrices are stored either column-wise
//! ([`CscMatrix`]) or row-wise ([`CsrMatrix`]); the kernels pick whichever
//! layout lets them stream memory in order. Conversion between the two is an
//! exact structural transpose of the storage: values are preserved bitwise.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("pointer array has length {got}, expected {expected}")]
    BadPointerLength { expected: usize, got: usize },
    #[error("pointer array is not non-decreasing at position {0}")]
    PointerNotMonotone(usize),
    #[error("index/value arrays have lengths {indices} and {values}")]
    LengthMismatch { indices: usize, values: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u32, dim: usize },
    #[error("indices not strictly increasing within segment {0}")]
    UnsortedSegment(usize),
    #[error("duplicate index {0} in sparse vector")]
    DuplicateIndex(u32),
}

/// Compressed sparse column matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_ind: Vec<u32>,
    values: Vec<f64>,
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_ind: Vec<u32>,
    values: Vec<f64>,
}

/// Sparse vector: unique indices, not necessarily sorted. Stored zeros are
/// permitted (they arise from exact cancellation in accumulators).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

fn check_segments(
    ptr: &[usize],
    nsegments: usize,
    indices: &[u32],
    values: &[f64],
    index_dim: usize,
) -> Result<(), SparseError> {
    if ptr.len() != nsegments + 1 {
        return Err(SparseError::BadPointerLength {
            expected: nsegments + 1,
            got: ptr.len(),
        });
    }
    if indices.len() != values.len() {
        return Err(SparseError::LengthMismatch {
            indices: indices.len(),
            values: values.len(),
        });
    }
    if ptr[0] != 0 || ptr[nsegments] != indices.len() {
        return Err(SparseError::PointerNotMonotone(0));
    }
    for s in 0..nsegments {
        if ptr[s] > ptr[s + 1] {
            return Err(SparseError::PointerNotMonotone(s));
        }
        let seg = &indices[ptr[s]..ptr[s + 1]];
        for (k, &i) in seg.iter().enumerate() {
            if (i as usize) >= index_dim {
                return Err(SparseError::IndexOutOfRange {
                    index: i,
                    dim: index_dim,
                });
            }
            if k > 0 && seg[k - 1] >= i {
                return Err(SparseError::UnsortedSegment(s));
            }
        }
    }
    Ok(())
}

impl CscMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        col_ptr: Vec<usize>,
        row_ind: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        check_segments(&col_ptr, ncols, &row_ind, &values, nrows)?;
        Ok(CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_ind,
            values,
        })
    }

    /// Builds from (row, col, value) triplets. Duplicates are summed, entries
    /// within each column end up sorted by row.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_ind = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &entries {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of range");
            if last == Some((c, r)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_ind.push(r as u32);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((c, r));
            }
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_ind,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[u32] {
        &self.row_ind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn col(&self, j: usize) -> (&[u32], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_ind[range.clone()], &self.values[range])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.ncols]; self.nrows];
        for j in 0..self.ncols {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                dense[i as usize][j] += v;
            }
        }
        dense
    }
}

impl CsrMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_ind: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        check_segments(&row_ptr, nrows, &col_ind, &values, ncols)?;
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_ind,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_ind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_ind[range.clone()], &self.values[range])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.ncols]; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[i][j as usize] += v;
            }
        }
        dense
    }
}

/// Counting transpose of the storage; values move bitwise, entries in each
/// output segment come out sorted because the input segments are scanned in
/// order.
pub fn csc_to_csr(a: &CscMatrix) -> CsrMatrix {
    let (ptr, ind, vals) = transpose_storage(
        a.ncols,
        a.nrows,
        &a.col_ptr,
        &a.row_ind,
        &a.values,
    );
    CsrMatrix {
        nrows: a.nrows,
        ncols: a.ncols,
        row_ptr: ptr,
        col_ind: ind,
        values: vals,
    }
}

pub fn csr_to_csc(a: &CsrMatrix) -> CscMatrix {
    let (ptr, ind, vals) = transpose_storage(
        a.nrows,
        a.ncols,
        &a.row_ptr,
        &a.col_ind,
        &a.values,
    );
    CscMatrix {
        nrows: a.nrows,
        ncols: a.ncols,
        col_ptr: ptr,
        row_ind: ind,
        values: vals,
    }
}

fn transpose_storage(
    nsegs: usize,
    nout: usize,
    ptr: &[usize],
    ind: &[u32],
    vals: &[f64],
) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
    let nnz = vals.len();
    let mut out_ptr = vec![0usize; nout + 1];
    for &i in ind {
        out_ptr[i as usize + 1] += 1;
    }
    for k in 0..nout {
        out_ptr[k + 1] += out_ptr[k];
    }
    let mut cursor = out_ptr.clone();
    let mut out_ind = vec![0u32; nnz];
    let mut out_vals = vec![0.0f64; nnz];
    for s in 0..nsegs {
        for k in ptr[s]..ptr[s + 1] {
            let dest = cursor[ind[k] as usize];
            out_ind[dest] = s as u32;
            out_vals[dest] = vals[k];
            cursor[ind[k] as usize] += 1;
        }
    }
    (out_ptr, out_ind, out_vals)
}

impl SparseVector {
    pub fn new(dim: usize, indices: Vec<u32>, values: Vec<f64>) -> Result<Self, SparseError> {
        if indices.len() != values.len() {
            return Err(SparseError::LengthMismatch {
                indices: indices.len(),
                values: values.len(),
            });
        }
        let mut seen = vec![false; dim];
        for &i in &indices {
            if (i as usize) >= dim {
                return Err(SparseError::IndexOutOfRange { index: i, dim });
            }
            if seen[i as usize] {
                return Err(SparseError::DuplicateIndex(i));
            }
            seen[i as usize] = true;
        }
        Ok(SparseVector {
            dim,
            indices,
            values,
        })
    }

    pub fn empty(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            dense[i as usize] = v;
        }
        dense
    }

    pub fn from_dense(x: &[f64]) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in x.iter().enumerate() {
            if v != 0.0 {
                indices.push(i as u32);
                values.push(v);
            }
        }
        SparseVector {
            dim: x.len(),
            indices,
            values,
        }
    }

    /// Entries sorted by index; test helper for comparing against dense
    /// references without caring about first-touch order.
    pub fn sorted(&self) -> SparseVector {
        let mut pairs: Vec<(u32, f64)> = self.iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        SparseVector {
            dim: self.dim,
            indices: pairs.iter().map(|&(i, _)| i).collect(),
            values: pairs.iter().map(|&(_, v)| v).collect(),
        }
    }
}
