//! Density matrices of small qubit blocks, labelled by global qubit index.

use num_complex::Complex64;

use crate::field::Field;
use crate::linalg::hermitian_eigenvalues;
use crate::matrix::{qubit_count, Matrix, MatrixError};
use crate::scalar::ExactScalar;

/// Tolerance for the numeric positive-semidefiniteness check.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// A density matrix on the qubits `labels`; label `labels[k]` is tensor
/// position `k` of `matrix`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityBlock<T> {
    labels: Vec<usize>,
    matrix: Matrix<T>,
}

pub type ExactBlock = DensityBlock<ExactScalar>;
pub type FloatBlock = DensityBlock<Complex64>;

impl<T: Field> DensityBlock<T> {
    /// Wraps a matrix without checking density-matrix properties; only the
    /// shape and label distinctness are verified.
    pub fn new(labels: Vec<usize>, matrix: Matrix<T>) -> Result<Self, MatrixError> {
        if !matrix.is_square() || qubit_count(matrix.rows()) != Some(labels.len()) {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(MatrixError::BadPermutation);
        }
        Ok(DensityBlock { labels, matrix })
    }

    /// `|b⟩⟨b|` on one qubit.
    pub fn basis(label: usize, bit: bool) -> Self {
        let mut m = Matrix::zeros(2, 2);
        let k = usize::from(bit);
        m.set(k, k, T::one());
        DensityBlock {
            labels: vec![label],
            matrix: m,
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(labels: Vec<usize>, amplitudes: &[T]) -> Result<Self, MatrixError> {
        let ket = Matrix::column(amplitudes.to_vec());
        Self::new(labels, ket.mul(&ket.dagger())?)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.contains(&label)
    }

    fn position(&self, label: usize) -> Result<usize, MatrixError> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(MatrixError::LabelNotInBlock(label))
    }

    /// Reduced state on `keep`; the result lists the kept labels in the
    /// order they occur in this block.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self, MatrixError> {
        if keep.is_empty() {
            return Err(MatrixError::DimensionMismatch("empty subsystem".into()));
        }
        for &l in keep {
            self.position(l)?;
        }
        let positions: Vec<usize> = (0..self.labels.len())
            .filter(|&k| keep.contains(&self.labels[k]))
            .collect();
        let labels = positions.iter().map(|&k| self.labels[k]).collect();
        let matrix = self
            .matrix
            .partial_trace_positions(&positions, self.labels.len());
        Ok(DensityBlock { labels, matrix })
    }

    /// Same physical state with tensor factors listed in `new_order`.
    pub fn relabel_reorder(&self, new_order: &[usize]) -> Result<Self, MatrixError> {
        if new_order.len() != self.labels.len() {
            return Err(MatrixError::BadPermutation);
        }
        let mut order = Vec::with_capacity(new_order.len());
        for &l in new_order {
            let k = self.position(l).map_err(|_| MatrixError::BadPermutation)?;
            if order.contains(&k) {
                return Err(MatrixError::BadPermutation);
            }
            order.push(k);
        }
        Ok(DensityBlock {
            labels: new_order.to_vec(),
            matrix: self.matrix.permute_positions(&order),
        })
    }

    /// Reorders so labels are ascending.
    pub fn sorted(&self) -> Self {
        let mut order = self.labels.clone();
        order.sort_unstable();
        if order == self.labels {
            return self.clone();
        }
        self.relabel_reorder(&order)
            .expect("sorted labels are a permutation")
    }

    /// Tensor product, labels concatenated (`self` first).
    pub fn kron(&self, other: &Self) -> Result<Self, MatrixError> {
        if other.labels.iter().any(|l| self.labels.contains(l)) {
            return Err(MatrixError::BadPermutation);
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(DensityBlock {
            labels,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// Product of `parts`, returned with labels in ascending order.
    pub fn kron_all<'a>(parts: impl IntoIterator<Item = &'a Self>) -> Result<Self, MatrixError> {
        let mut iter = parts.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| MatrixError::DimensionMismatch("no factors".into()))?
            .clone();
        let prod = iter.try_fold(first, |acc, p| acc.kron(p))?;
        Ok(prod.sorted())
    }

    /// `U ρ U†` with `U` acting on `targets` (in the gate's own qubit order).
    pub fn apply_unitary(&self, u: &Matrix<T>, targets: &[usize]) -> Result<Self, MatrixError> {
        if u.rows() != 1 << targets.len() || !u.is_square() {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} gate on {} qubits",
                u.rows(),
                u.cols(),
                targets.len()
            )));
        }
        let positions = targets
            .iter()
            .map(|&t| self.position(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DensityBlock {
            labels: self.labels.clone(),
            matrix: self.matrix.conjugate_by(u, &positions, self.labels.len()),
        })
    }

    /// Probability of reading `0` on `label`.
    pub fn prob_zero(&self, label: usize) -> Result<T, MatrixError> {
        let reduced = self.partial_trace(&[label])?;
        Ok(reduced.matrix.get(0, 0).clone())
    }

    /// Smallest eigenvalue of the numeric image, or an error if the matrix
    /// is not (numerically) Hermitian.
    pub fn min_eigenvalue(&self) -> Result<f64, MatrixError> {
        let f = self.matrix.to_float();
        let ev = hermitian_eigenvalues(&f)?;
        Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn to_float(&self) -> FloatBlock {
        DensityBlock {
            labels: self.labels.clone(),
            matrix: self.matrix.to_float(),
        }
    }
}

impl ExactBlock {
    /// Exactly Hermitian, exactly unit trace, and PSD within
    /// [`PSD_TOLERANCE`].
    pub fn is_valid_density(&self) -> bool {
        self.matrix.is_hermitian()
            && self.matrix.trace().is_one()
            && self
                .min_eigenvalue()
                .map(|m| m >= -PSD_TOLERANCE)
                .unwrap_or(false)
    }

    /// `tr ρ² == 1`, decided exactly.
    pub fn is_pure(&self) -> bool {
        // tr ρ² = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
        let mut acc = ExactScalar::zero();
        for x in self.matrix.data() {
            if !x.is_zero() {
                acc = acc.add(&x.norm_sqr());
            }
        }
        acc.is_one()
    }

    pub fn max_digits(&self) -> usize {
        self.matrix.max_digits()
    }
}

impl FloatBlock {
    pub fn prob_zero_f64(&self, label: usize) -> Result<f64, MatrixError> {
        Ok(self.prob_zero(label)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ExactMatrix;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    fn bell(labels: Vec<usize>) -> ExactBlock {
        let h = ExactScalar::inv_sqrt2();
        let z = ExactScalar::zero();
        ExactBlock::pure(labels, &[h.clone(), z.clone(), z, h]).unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell(vec![0, 1]).partial_trace(&[0]).unwrap();
        assert_eq!(r.labels(), &[0]);
        assert_eq!(*r.matrix(), ExactMatrix::identity(2).scale(&s("1/2")));
    }

    #[test]
    fn product_marginal_and_trace() {
        let a = ExactBlock::new(
            vec![4],
            ExactMatrix::from_rows(vec![
                vec![s("1/3"), s("1/5*i")],
                vec![s("-1/5*i"), s("2/3")],
            ])
            .unwrap(),
        )
        .unwrap();
        let b = bell(vec![1, 7]);
        let ab = a.kron(&b).unwrap();
        assert_eq!(ab.partial_trace(&[4]).unwrap(), a);
        assert_eq!(ab.partial_trace(&[7, 1]).unwrap(), b);
        assert!(ab.partial_trace(&[1]).unwrap().matrix().trace().is_one());
        assert_eq!(ab.partial_trace(&[3]), Err(MatrixError::LabelNotInBlock(3)));
    }

    #[test]
    fn relabel_examples() {
        let a = ExactBlock::basis(0, true);
        let b = bell(vec![1, 2]);
        let ab = a.kron(&b).unwrap();
        assert_eq!(ab.relabel_reorder(&[0, 1, 2]).unwrap(), ab);
        let ba = ab.relabel_reorder(&[1, 2, 0]).unwrap();
        assert_eq!(ba, b.kron(&a).unwrap());
        assert_eq!(ba.relabel_reorder(&[0, 1, 2]).unwrap(), ab);
        assert_eq!(
            ab.relabel_reorder(&[0, 1, 1]),
            Err(MatrixError::BadPermutation)
        );
        assert_eq!(
            ab.relabel_reorder(&[0, 1]),
            Err(MatrixError::BadPermutation)
        );
    }

    #[test]
    fn validity_and_purity() {
        let b = bell(vec![0, 1]);
        assert!(b.is_valid_density() && b.is_pure());
        let mixed = b.partial_trace(&[1]).unwrap();
        assert!(mixed.is_valid_density() && !mixed.is_pure());
        let not_psd = ExactBlock::new(
            vec![0],
            ExactMatrix::from_rows(vec![vec![s("3/2"), s("0")], vec![s("0"), s("-1/2")]]).unwrap(),
        )
        .unwrap();
        assert!(!not_psd.is_valid_density());
    }
}
