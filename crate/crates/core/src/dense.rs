//! Exact full-statevector reference simulator.
//!
//! Qubit `q` of an `n`-qubit state is tensor position `q`, i.e. bit
//! `n - 1 - q` of the amplitude index.

use thiserror::Error;

use crate::circuit::{Circuit, CircuitStep};
use crate::density::ExactBlock;
use crate::matrix::{ExactMatrix, MatrixError};
use crate::partition::{bounded_partitions, subsets_with, Partition};
use crate::sampling::OutcomeDistribution;
use crate::scalar::ExactScalar;

pub const DEFAULT_DENSE_CAP: usize = 14;
/// Density-matrix evaluation stores `4^n` entries and is capped lower.
pub const DENSITY_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenseError {
    #[error("width {width} exceeds the dense cap of {cap} qubits")]
    WidthCapExceeded { width: usize, cap: usize },
    #[error("circuit has mixed input blocks; use the density-matrix evaluator")]
    MixedInput,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Width cap, overridable with `PBLOCK_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("PBLOCK_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

fn check_cap(width: usize, cap: usize) -> Result<(), DenseError> {
    if width > cap {
        return Err(DenseError::WidthCapExceeded { width, cap });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<ExactScalar>,
}

impl StateVector {
    pub fn basis(bits: &[bool]) -> Self {
        let n = bits.len();
        let idx = bits
            .iter()
            .fold(0usize, |acc, &b| acc << 1 | usize::from(b));
        let mut amps = vec![ExactScalar::zero(); 1 << n];
        amps[idx] = ExactScalar::one();
        StateVector { width: n, amps }
    }

    /// Wraps amplitudes; the length must be `2^width`. Normalization is not
    /// checked (see [`StateVector::is_normalized`]).
    pub fn from_amplitudes(width: usize, amps: Vec<ExactScalar>) -> Result<Self, DenseError> {
        if amps.len() != 1 << width {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} amplitudes for {width} qubits",
                amps.len()
            ))
            .into());
        }
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[ExactScalar] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> ExactScalar {
        self.amps
            .iter()
            .filter(|a| !a.is_zero())
            .fold(ExactScalar::zero(), |acc, a| acc.add(&a.norm_sqr()))
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_sqr().is_one()
    }

    /// `|ψ⟩⟨ψ|` labelled `0..n`.
    pub fn density(&self) -> ExactBlock {
        self.reduced(&(0..self.width).collect::<Vec<_>>())
    }

    /// Reduced density matrix on `subset`, labels in the given order.
    pub fn reduced(&self, subset: &[usize]) -> ExactBlock {
        let n = self.width;
        let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
        let dk = 1usize << subset.len();
        let dr = 1usize << rest.len();
        let idx = |r: usize, c: usize| compose(r, subset, c, &rest, n);
        let mut m = ExactMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in i..dk {
                let mut acc = ExactScalar::zero();
                for c in 0..dr {
                    let a = &self.amps[idx(i, c)];
                    let b = &self.amps[idx(j, c)];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(&b.conj()));
                    }
                }
                if j != i {
                    m.set(j, i, acc.conj());
                }
                m.set(i, j, acc);
            }
        }
        ExactBlock::new(subset.to_vec(), m).expect("shape matches labels")
    }
}

/// Bits of `idx` at tensor `positions`, packed big-endian.
fn extract(idx: usize, positions: &[usize], n: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &q| acc << 1 | (idx >> (n - 1 - q) & 1))
}

/// Inverse of [`extract`] over a split of the positions into two sets.
fn compose(r: usize, rows: &[usize], c: usize, cols: &[usize], n: usize) -> usize {
    let place = |bits: usize, pos: &[usize]| {
        pos.iter().enumerate().fold(0usize, |acc, (t, &q)| {
            acc | (bits >> (pos.len() - 1 - t) & 1) << (n - 1 - q)
        })
    };
    place(r, rows) | place(c, cols)
}

pub fn dense_apply(state: &StateVector, step: &CircuitStep) -> StateVector {
    let mut v = ExactMatrix::column(state.amps.clone());
    v.apply_left(step.gate().matrix(), step.targets(), state.width);
    StateVector {
        width: state.width,
        amps: v.into_data(),
    }
}

pub fn dense_run(circuit: &Circuit) -> Result<StateVector, DenseError> {
    dense_run_with_cap(circuit, dense_cap())
}

pub fn dense_run_with_cap(circuit: &Circuit, cap: usize) -> Result<StateVector, DenseError> {
    check_cap(circuit.width(), cap)?;
    if !circuit.input_blocks().is_empty() {
        return Err(DenseError::MixedInput);
    }
    let mut state = StateVector::basis(circuit.input());
    for step in circuit.steps() {
        state = dense_apply(&state, step);
    }
    Ok(state)
}

/// Exact outcome distribution of measuring `qubit`.
pub fn dense_marginal(state: &StateVector, qubit: usize) -> OutcomeDistribution {
    let n = state.width;
    assert!(qubit < n, "qubit {qubit} out of range");
    let p0 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, a)| i >> (n - 1 - qubit) & 1 == 0 && !a.is_zero())
        .fold(ExactScalar::zero(), |acc, (_, a)| acc.add(&a.norm_sqr()));
    OutcomeDistribution::exact(p0)
}

/// Whether `v` (over `n` positions) factors as a vector on `rows` times a
/// vector on the remaining positions. On success returns the second factor
/// (unnormalized).
fn split_off(v: &[ExactScalar], rows: &[usize], n: usize) -> Option<Vec<ExactScalar>> {
    let cols: Vec<usize> = (0..n).filter(|q| !rows.contains(q)).collect();
    let pivot = v.iter().position(|a| !a.is_zero())?;
    let (r0, c0) = (extract(pivot, rows, n), extract(pivot, &cols, n));
    let p = &v[pivot];
    for (idx, a) in v.iter().enumerate() {
        let (r, c) = (extract(idx, rows, n), extract(idx, &cols, n));
        if r == r0 || c == c0 {
            continue;
        }
        let x = &v[compose(r, rows, c0, &cols, n)];
        let y = &v[compose(r0, rows, c, &cols, n)];
        let lhs_zero = a.is_zero();
        let rhs_zero = x.is_zero() || y.is_zero();
        if lhs_zero != rhs_zero {
            return None;
        }
        if !lhs_zero && a.mul(p) != x.mul(y) {
            return None;
        }
    }
    Some(
        (0..1usize << cols.len())
            .map(|c| v[compose(r0, rows, c, &cols, n)].clone())
            .collect(),
    )
}

/// Finest partition into parts of size ≤ `p` over which the state is a
/// product, or `None`.
///
/// For a pure state the finest product partition is unique and every other
/// product partition coarsens it, so it is also the first match in the
/// search order of [`bounded_partitions`]. The part containing the smallest
/// remaining qubit is the smallest subset that splits off.
pub fn dense_blockedness(state: &StateVector, p: usize) -> Result<Option<Partition>, DenseError> {
    check_cap(state.width, dense_cap())?;
    let mut labels: Vec<usize> = (0..state.width).collect();
    let mut v = state.amps.clone();
    let mut parts = Vec::new();
    while !labels.is_empty() {
        let n = labels.len();
        let positions: Vec<usize> = (0..n).collect();
        let mut found = None;
        'search: for size in 1..=p.min(n) {
            for subset in subsets_with(&positions, 0, size) {
                if size == n {
                    found = Some((subset, vec![ExactScalar::one()]));
                    break 'search;
                }
                if let Some(rest) = split_off(&v, &subset, n) {
                    found = Some((subset, rest));
                    break 'search;
                }
            }
        }
        let Some((subset, rest)) = found else {
            return Ok(None);
        };
        parts.push(subset.iter().map(|&k| labels[k]).collect::<Vec<_>>());
        labels = (0..n)
            .filter(|k| !subset.contains(k))
            .map(|k| labels[k])
            .collect();
        v = rest;
    }
    let partition = Partition::new(parts);
    debug_assert!(factors_over(state, &partition));
    Ok(Some(partition))
}

/// Whether the state is a product over `partition`, checked by peeling
/// the parts off one at a time.
pub fn factors_over(state: &StateVector, partition: &Partition) -> bool {
    let mut labels: Vec<usize> = (0..state.width).collect();
    let mut v = state.amps.clone();
    for part in partition.parts() {
        if part.len() == labels.len() {
            return part.iter().all(|q| labels.contains(q));
        }
        let rows: Vec<usize> = part
            .iter()
            .filter_map(|q| labels.iter().position(|l| l == q))
            .collect();
        if rows.len() != part.len() {
            return false;
        }
        let n = labels.len();
        let Some(rest) = split_off(&v, &rows, n) else {
            return false;
        };
        labels = (0..n)
            .filter(|k| !rows.contains(k))
            .map(|k| labels[k])
            .collect();
        v = rest;
    }
    labels.is_empty()
}

/// Initial density matrix of a circuit, honouring mixed input blocks.
pub fn initial_density(circuit: &Circuit) -> Result<ExactBlock, DenseError> {
    let n = circuit.width();
    let mut factors: Vec<ExactBlock> = circuit.input_blocks().to_vec();
    for q in 0..n {
        if !circuit.input_blocks().iter().any(|b| b.contains(q)) {
            factors.push(ExactBlock::basis(q, circuit.input()[q]));
        }
    }
    Ok(ExactBlock::kron_all(&factors)?)
}

/// Density-matrix evaluation, for circuits with mixed input blocks.
pub fn dense_density_run(circuit: &Circuit) -> Result<ExactBlock, DenseError> {
    check_cap(circuit.width(), dense_cap().min(DENSITY_CAP))?;
    let mut rho = initial_density(circuit)?;
    for step in circuit.steps() {
        rho = rho.apply_unitary(step.gate().matrix(), step.targets())?;
    }
    Ok(rho)
}

pub fn density_marginal(rho: &ExactBlock, qubit: usize) -> Result<OutcomeDistribution, DenseError> {
    Ok(OutcomeDistribution::exact(rho.prob_zero(qubit)?))
}

/// Brute-force search over [`bounded_partitions`] for the first partition
/// whose product of reduced states equals `rho` exactly. Works for mixed
/// states.
pub fn density_blockedness(rho: &ExactBlock, p: usize) -> Result<Option<Partition>, DenseError> {
    let sorted = rho.sorted();
    let mut cache: Vec<(Vec<usize>, ExactBlock)> = Vec::new();
    for partition in bounded_partitions(sorted.labels(), p) {
        let mut factors = Vec::with_capacity(partition.len());
        for part in partition.parts() {
            let reduced = match cache.iter().find(|(k, _)| k == part) {
                Some((_, b)) => b.clone(),
                None => {
                    let b = sorted.partial_trace(part)?;
                    cache.push((part.clone(), b.clone()));
                    b
                }
            };
            factors.push(reduced);
        }
        let product = ExactBlock::kron_all(&factors)?;
        if product.matrix() == sorted.matrix() {
            return Ok(Some(partition));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::builtin_gate;
    use crate::generate::{bell, ghz};

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn basic_updates() {
        let st = StateVector::basis(&[true, false]);
        let cnot = CircuitStep::new(builtin_gate("CNOT"), &[0, 1], 2).unwrap();
        assert_eq!(dense_apply(&st, &cnot), StateVector::basis(&[true, true]));

        let h = CircuitStep::new(builtin_gate("H"), &[0], 2).unwrap();
        let out = dense_apply(&StateVector::basis(&[false, false]), &h);
        let r = s("1/2*r2");
        let z = ExactScalar::zero();
        assert_eq!(out.amplitudes(), &[r.clone(), z.clone(), r, z]);
    }

    #[test]
    fn bell_state_and_marginal() {
        let st = dense_run(&bell()).unwrap();
        let r = s("1/2*r2");
        let z = ExactScalar::zero();
        assert_eq!(st.amplitudes(), &[r.clone(), z.clone(), z, r]);
        let d = dense_marginal(&st, 0);
        assert_eq!(d, OutcomeDistribution::exact(s("1/2")));
        assert_eq!(dense_blockedness(&st, 1).unwrap(), None);
        assert_eq!(
            dense_blockedness(&st, 2).unwrap(),
            Some(Partition::new(vec![vec![0, 1]]))
        );
        let reduced = st.reduced(&[0]);
        assert_eq!(reduced.matrix(), &ExactMatrix::identity(2).scale(&s("1/2")));
    }

    #[test]
    fn basis_marginal_and_blockedness() {
        let st = StateVector::basis(&[true, false, true]);
        assert_eq!(
            dense_marginal(&st, 0),
            OutcomeDistribution::exact(ExactScalar::zero())
        );
        assert_eq!(
            dense_blockedness(&st, 1).unwrap(),
            Some(Partition::singletons(&[0, 1, 2]))
        );
    }

    #[test]
    fn ghz_is_not_blocked_below_width() {
        for n in 3..=6 {
            let st = dense_run(&ghz(n)).unwrap();
            assert_eq!(dense_blockedness(&st, n - 1).unwrap(), None);
            assert!(dense_blockedness(&st, n).unwrap().is_some());
        }
    }

    #[test]
    fn width_cap() {
        let c = Circuit::new(15).unwrap();
        assert_eq!(
            dense_run_with_cap(&c, 14),
            Err(DenseError::WidthCapExceeded { width: 15, cap: 14 })
        );
    }

    #[test]
    fn ap1_partition() {
        // |3⟩ + |6⟩ + |9⟩ + |12⟩ over 4 qubits, qubit 0 most significant.
        let mut amps = vec![ExactScalar::zero(); 16];
        for k in [3, 6, 9, 12] {
            amps[k] = s("1/2");
        }
        let st = StateVector::from_amplitudes(4, amps).unwrap();
        let part = dense_blockedness(&st, 2).unwrap().unwrap();
        assert_eq!(part.display_bits(4), "{3,1}{2,0}");
        assert_eq!(dense_blockedness(&st, 1).unwrap(), None);
        assert_eq!(density_blockedness(&st.density(), 2).unwrap(), Some(part));
    }
}
