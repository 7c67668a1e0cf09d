//! Dense matrices over a [`Field`], with the qubit-indexed kernels used by
//! every engine: local gate application, partial trace, and reordering of
//! tensor factors.
//!
//! Qubit positions inside a `k`-qubit space are big-endian: position 0 is the
//! most significant bit of a basis index.

use num_complex::Complex64;
use thiserror::Error;

use crate::field::Field;
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qubit {0} is not in the block")]
    LabelNotInBlock(usize),
    #[error("not a permutation of the block labels")]
    BadPermutation,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix entries exceed double range")]
    Overflow,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ExactMatrix = Matrix<ExactScalar>;
pub type FloatMatrix = Matrix<Complex64>;

/// Number of qubits `k` with `2^k == dim`, if `dim` is a power of two.
pub fn qubit_count(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

impl<T: Field> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Column vector.
    pub fn column(entries: Vec<T>) -> Self {
        Matrix {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j].add_assign(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Tensor product; `self` supplies the more significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![T::zero(); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            data[(i * other.rows + k) * cols + j * other.cols + l] = a.mul(b);
                        }
                    }
                }
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn dagger(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows.min(self.cols) {
            t.add_assign(self.get(i, i));
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, T::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, T::sub)
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    /// `U†U == I`, compared with the field's equality.
    pub fn is_unitary(&self) -> bool {
        self.is_square()
            && self
                .dagger()
                .mul(self)
                .map(|p| p == Self::identity(self.rows))
                .unwrap_or(false)
    }

    pub fn to_float(&self) -> FloatMatrix {
        self.map(Field::to_c64)
    }

    /// Replaces `self` by `(U ⊗ I) · self` where `U` acts on the qubit
    /// `positions` of an `nqubits`-qubit row space.
    pub fn apply_left(&mut self, u: &Self, positions: &[usize], nqubits: usize) {
        assert_eq!(self.rows, 1 << nqubits, "row space is not {nqubits} qubits");
        let cols = self.cols;
        let groups = index_groups(positions, nqubits);
        let g = u.rows;
        let mut old = Vec::with_capacity(g);
        for group in &groups {
            for c in 0..cols {
                old.clear();
                old.extend(group.iter().map(|&r| self.data[r * cols + c].clone()));
                if old.iter().all(T::is_zero) {
                    continue;
                }
                for (s, &r) in group.iter().enumerate() {
                    let mut acc = T::zero();
                    for (t, x) in old.iter().enumerate() {
                        let w = u.get(s, t);
                        if !w.is_zero() && !x.is_zero() {
                            acc.add_assign(&w.mul(x));
                        }
                    }
                    self.data[r * cols + c] = acc;
                }
            }
        }
    }

    /// Replaces `self` by `self · (U ⊗ I)†` acting on column-space positions.
    pub fn apply_right_dagger(&mut self, u: &Self, positions: &[usize], nqubits: usize) {
        assert_eq!(
            self.cols,
            1 << nqubits,
            "column space is not {nqubits} qubits"
        );
        let cols = self.cols;
        let groups = index_groups(positions, nqubits);
        let g = u.rows;
        let conj_u: Vec<T> = u.data.iter().map(T::conj).collect();
        let mut old = Vec::with_capacity(g);
        for r in 0..self.rows {
            let row = &mut self.data[r * cols..(r + 1) * cols];
            for group in &groups {
                old.clear();
                old.extend(group.iter().map(|&c| row[c].clone()));
                if old.iter().all(T::is_zero) {
                    continue;
                }
                for (s, &c) in group.iter().enumerate() {
                    let mut acc = T::zero();
                    for (t, x) in old.iter().enumerate() {
                        let w = &conj_u[s * g + t];
                        if !w.is_zero() && !x.is_zero() {
                            acc.add_assign(&x.mul(w));
                        }
                    }
                    row[c] = acc;
                }
            }
        }
    }

    /// `U ρ U†` with `U` acting on `positions` of an `nqubits`-qubit space.
    pub fn conjugate_by(&self, u: &Self, positions: &[usize], nqubits: usize) -> Self {
        let mut out = self.clone();
        out.apply_left(u, positions, nqubits);
        out.apply_right_dagger(u, positions, nqubits);
        out
    }

    /// Partial trace of an `nqubits`-qubit operator, keeping `keep` (in the
    /// given order) and tracing out every other position.
    pub fn partial_trace_positions(&self, keep: &[usize], nqubits: usize) -> Self {
        let traced: Vec<usize> = (0..nqubits).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dt = 1usize << traced.len();
        let spread = |bits: usize, pos: &[usize]| -> usize {
            pos.iter().enumerate().fold(0, |acc, (t, &q)| {
                if bits >> (pos.len() - 1 - t) & 1 == 1 {
                    acc | 1 << (nqubits - 1 - q)
                } else {
                    acc
                }
            })
        };
        let keep_idx: Vec<usize> = (0..dk).map(|b| spread(b, keep)).collect();
        let trace_idx: Vec<usize> = (0..dt).map(|b| spread(b, &traced)).collect();
        let mut out = Self::zeros(dk, dk);
        for (i, &ki) in keep_idx.iter().enumerate() {
            for (j, &kj) in keep_idx.iter().enumerate() {
                let mut acc = T::zero();
                for &t in &trace_idx {
                    acc.add_assign(self.get(ki | t, kj | t));
                }
                out.data[i * dk + j] = acc;
            }
        }
        out
    }

    /// Reorders tensor factors: new position `i` carries old position
    /// `order[i]`. Applies to rows and, for square operators, to columns;
    /// a column vector only has its rows permuted.
    pub fn permute_positions(&self, order: &[usize]) -> Self {
        let n = order.len();
        let map_index = |new: usize| -> usize {
            (0..n).fold(0, |acc, i| {
                if new >> (n - 1 - i) & 1 == 1 {
                    acc | 1 << (n - 1 - order[i])
                } else {
                    acc
                }
            })
        };
        let row_map: Vec<usize> = (0..self.rows).map(map_index).collect();
        let col_map: Vec<usize> = if self.cols == 1 {
            vec![0]
        } else {
            (0..self.cols).map(map_index).collect()
        };
        let mut data = Vec::with_capacity(self.data.len());
        for &r in &row_map {
            for &c in &col_map {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// For each assignment of the non-target bits, the `2^g` indices obtained by
/// varying the target bits, ordered by the gate's own big-endian index.
fn index_groups(positions: &[usize], nqubits: usize) -> Vec<Vec<usize>> {
    let g = positions.len();
    let masks: Vec<usize> = positions.iter().map(|&q| 1 << (nqubits - 1 - q)).collect();
    let all: usize = masks.iter().sum();
    let offsets: Vec<usize> = (0..1usize << g)
        .map(|s| {
            (0..g)
                .filter(|&t| s >> (g - 1 - t) & 1 == 1)
                .map(|t| masks[t])
                .sum()
        })
        .collect();
    (0..1usize << nqubits)
        .filter(|base| base & all == 0)
        .map(|base| offsets.iter().map(|o| base | o).collect())
        .collect()
}

impl ExactMatrix {
    /// Largest component digit count over all entries.
    pub fn max_digits(&self) -> usize {
        self.data
            .iter()
            .map(ExactScalar::max_digits)
            .max()
            .unwrap_or(1)
    }
}

/// Exact-equality test with a dimension check.
pub fn mat_eq<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<bool, MatrixError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(MatrixError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data == b.data)
}
