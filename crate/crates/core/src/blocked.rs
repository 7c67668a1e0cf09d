//! Exact simulation of circuits that stay `p`-blocked.
//!
//! The state is kept as block locations (qubit → block id) and block states
//! (one exact density matrix per block). A gate inside one block conjugates
//! that block; a gate straddling two blocks merges them, and a merged block
//! larger than `p` is split again by an exact product search.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitStep};
use crate::density::ExactBlock;
use crate::partition::{bounded_partitions, subsets_with, Partition};
use crate::sampling::OutcomeDistribution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {diagnostic} (block {qubits:?})")]
pub struct PBlockError {
    /// 1-based index of the offending step; 0 for the input.
    pub step: usize,
    pub qubits: Vec<usize>,
    pub diagnostic: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlockedOptions {
    /// Split after every gate whenever a finer product exists, instead of
    /// only when a merged block exceeds `p`.
    pub eager_split: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockedStats {
    pub merges: usize,
    pub splits: usize,
    pub largest_block: usize,
    /// Largest decimal digit count of any scalar component seen in a block.
    pub max_digits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockedState {
    p: usize,
    assignment: Vec<usize>,
    blocks: BTreeMap<usize, ExactBlock>,
    next_id: usize,
}

/// Why a block has no product form with parts of size ≤ `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoSplit {
    pub qubits: Vec<usize>,
}

/// Finest partition of `block` into parts of size ≤ `p` whose exact reduced
/// states multiply back to `block`, returned as those reduced states.
///
/// Pure blocks factor over a unique finest partition; the part holding the
/// smallest remaining label is the smallest subset with a pure reduced state.
/// Mixed blocks are searched over all bounded partitions, finest first.
pub fn split_exact(block: &ExactBlock, p: usize) -> Result<Vec<ExactBlock>, NoSplit> {
    let block = block.sorted();
    let fail = || NoSplit {
        qubits: block.labels().to_vec(),
    };
    if block.len() <= 1 {
        return Ok(vec![block.clone()]);
    }
    let parts = if block.is_pure() {
        split_pure(&block, p).ok_or_else(fail)?
    } else {
        split_search(&block, p).ok_or_else(fail)?
    };
    debug_assert_eq!(
        ExactBlock::kron_all(&parts).map(|b| b.matrix() == block.matrix()),
        Ok(true),
        "split does not reproduce the block"
    );
    Ok(parts)
}

fn split_pure(block: &ExactBlock, p: usize) -> Option<Vec<ExactBlock>> {
    let mut remaining = block.labels().to_vec();
    let mut parts = Vec::new();
    while !remaining.is_empty() {
        let anchor = remaining[0];
        let mut found = None;
        'search: for size in 1..=p.min(remaining.len()) {
            for subset in subsets_with(&remaining, anchor, size) {
                if subset.len() == remaining.len() {
                    found = Some(block.partial_trace(&subset).ok()?);
                    break 'search;
                }
                let reduced = block.partial_trace(&subset).ok()?;
                if reduced.is_pure() {
                    found = Some(reduced);
                    break 'search;
                }
            }
        }
        let part = found?;
        remaining.retain(|q| !part.contains(*q));
        parts.push(part);
    }
    // Only a pure state's reductions can certify factors one at a time; the
    // final product comparison guards the mixed remainder case anyway.
    let product = ExactBlock::kron_all(&parts).ok()?;
    (product.matrix() == block.matrix()).then_some(parts)
}

fn split_search(block: &ExactBlock, p: usize) -> Option<Vec<ExactBlock>> {
    let mut cache: BTreeMap<Vec<usize>, ExactBlock> = BTreeMap::new();
    for partition in bounded_partitions(block.labels(), p) {
        let mut factors = Vec::with_capacity(partition.len());
        for part in partition.parts() {
            let reduced = match cache.get(part) {
                Some(b) => b.clone(),
                None => {
                    let b = block.partial_trace(part).ok()?;
                    cache.insert(part.clone(), b.clone());
                    b
                }
            };
            factors.push(reduced);
        }
        let product = ExactBlock::kron_all(&factors).ok()?;
        if product.matrix() == block.matrix() {
            return Some(factors);
        }
    }
    None
}

impl BlockedState {
    /// All-singleton blocks `|b⟩⟨b|`; qubit `q` sits in block `q + 1`.
    pub fn init(bits: &[bool], p: usize) -> Self {
        let blocks = bits
            .iter()
            .enumerate()
            .map(|(q, &b)| (q + 1, ExactBlock::basis(q, b)))
            .collect();
        BlockedState {
            p: p.max(1),
            assignment: (1..=bits.len()).collect(),
            blocks,
            next_id: bits.len() + 1,
        }
    }

    /// Initial state of `circuit`, including mixed input blocks. Input
    /// blocks larger than `p` are split, failing with step 0.
    pub fn from_circuit(circuit: &Circuit, p: usize) -> Result<Self, PBlockError> {
        let mut st = Self::init(circuit.input(), p);
        for block in circuit.input_blocks() {
            for &q in block.labels() {
                st.blocks.remove(&st.assignment[q]);
            }
            let parts = if block.len() > st.p {
                split_exact(block, st.p).map_err(|e| PBlockError {
                    step: 0,
                    qubits: e.qubits,
                    diagnostic: format!(
                        "input block has no product form with parts of size <= {}",
                        st.p
                    ),
                })?
            } else {
                vec![block.sorted()]
            };
            for part in parts {
                st.insert(part);
            }
        }
        Ok(st)
    }

    fn insert(&mut self, block: ExactBlock) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        for &q in block.labels() {
            self.assignment[q] = id;
        }
        self.blocks.insert(id, block);
        id
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn width(&self) -> usize {
        self.assignment.len()
    }

    /// Block id of each qubit.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn blocks(&self) -> impl Iterator<Item = &ExactBlock> {
        self.blocks.values()
    }

    pub fn block_of(&self, qubit: usize) -> &ExactBlock {
        &self.blocks[&self.assignment[qubit]]
    }

    /// Current block locations as a partition.
    pub fn partition(&self) -> Partition {
        Partition::new(self.blocks.values().map(|b| b.labels().to_vec()).collect())
    }

    /// Product of all blocks, labels `0..n`.
    pub fn global_density(&self) -> ExactBlock {
        ExactBlock::kron_all(self.blocks.values()).expect("blocks are disjoint")
    }

    pub fn max_digits(&self) -> usize {
        self.blocks
            .values()
            .map(ExactBlock::max_digits)
            .max()
            .unwrap_or(1)
    }

    /// Applies one step. `index` is the 1-based step number used in errors.
    pub fn apply(
        &mut self,
        step: &CircuitStep,
        index: usize,
        opts: BlockedOptions,
        stats: &mut BlockedStats,
    ) -> Result<(), PBlockError> {
        let ids: Vec<usize> = step.targets().iter().map(|&q| self.assignment[q]).collect();
        let u = step.gate().matrix();
        let merged = ids.len() == 2 && ids[0] != ids[1];
        let block = if merged {
            stats.merges += 1;
            let a = self.blocks.remove(&ids[0]).expect("assigned block exists");
            let b = self.blocks.remove(&ids[1]).expect("assigned block exists");
            ExactBlock::kron_all([&a, &b]).expect("blocks are disjoint")
        } else {
            self.blocks.remove(&ids[0]).expect("assigned block exists")
        };
        let block = block
            .apply_unitary(u, step.targets())
            .expect("targets lie in the block");
        stats.max_digits = stats.max_digits.max(block.max_digits());

        if block.len() > self.p || (opts.eager_split && block.len() > 1) {
            let parts = split_exact(&block, self.p).map_err(|e| PBlockError {
                step: index,
                qubits: e.qubits,
                diagnostic: format!(
                    "gate {} on {:?} leaves no product form with blocks of size <= {}",
                    step.gate().name(),
                    step.targets(),
                    self.p
                ),
            })?;
            if parts.len() > 1 {
                stats.splits += 1;
            }
            for part in parts {
                stats.largest_block = stats.largest_block.max(part.len());
                self.insert(part);
            }
        } else {
            stats.largest_block = stats.largest_block.max(block.len());
            if merged {
                self.insert(block);
            } else {
                self.blocks.insert(ids[0], block);
            }
        }
        Ok(())
    }

    /// Exact distribution of measuring `qubit`.
    pub fn marginal(&self, qubit: usize) -> OutcomeDistribution {
        let p0 = self
            .block_of(qubit)
            .prob_zero(qubit)
            .expect("qubit is in its block");
        OutcomeDistribution::exact(p0)
    }
}

pub fn init_blocked(bits: &[bool], p: usize) -> BlockedState {
    BlockedState::init(bits, p)
}

/// One step on a copy of `state`.
pub fn apply_blocked(
    state: &BlockedState,
    step: &CircuitStep,
    index: usize,
    opts: BlockedOptions,
) -> Result<BlockedState, PBlockError> {
    let mut next = state.clone();
    next.apply(step, index, opts, &mut BlockedStats::default())?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockedRun {
    pub distribution: OutcomeDistribution,
    pub state: BlockedState,
    pub stats: BlockedStats,
}

pub fn run_blocked(
    circuit: &Circuit,
    p: usize,
    opts: BlockedOptions,
) -> Result<BlockedRun, PBlockError> {
    let mut state = BlockedState::from_circuit(circuit, p)?;
    let mut stats = BlockedStats {
        largest_block: state.blocks().map(ExactBlock::len).max().unwrap_or(0),
        max_digits: state.max_digits(),
        ..BlockedStats::default()
    };
    for (k, step) in circuit.steps().iter().enumerate() {
        state.apply(step, k + 1, opts, &mut stats)?;
    }
    Ok(BlockedRun {
        distribution: state.marginal(circuit.measured()),
        state,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::builtin_gate;
    use crate::generate::bell;
    use crate::scalar::ExactScalar;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn init_is_singletons() {
        let st = init_blocked(&[false, true], 1);
        assert_eq!(st.assignment(), &[1, 2]);
        assert_eq!(st.block_of(1), &ExactBlock::basis(1, true));
        assert_eq!(st.partition(), Partition::singletons(&[0, 1]));
    }

    #[test]
    fn case_two_merge_and_violation() {
        let mut c = Circuit::new(2).unwrap().with_input(&[false, true]).unwrap();
        c.push(builtin_gate("H"), &[0]).unwrap();
        c.push(builtin_gate("CNOT"), &[0, 1]).unwrap();
        let run = run_blocked(&c, 2, BlockedOptions::default()).unwrap();
        let r = s("1/2*r2");
        let z = ExactScalar::zero();
        let expected = ExactBlock::pure(vec![0, 1], &[z.clone(), r.clone(), r, z]).unwrap();
        assert_eq!(run.state.block_of(0), &expected);
        assert_eq!(run.state.assignment()[0], run.state.assignment()[1]);

        let err = run_blocked(&c, 1, BlockedOptions::default()).unwrap_err();
        assert_eq!(err.step, 2);
        assert_eq!(err.qubits, vec![0, 1]);
    }

    #[test]
    fn case_one_keeps_assignment() {
        let mut c = bell();
        c.push(builtin_gate("CNOT"), &[1, 0]).unwrap();
        let a = run_blocked(&c.prefix(2), 2, BlockedOptions::default()).unwrap();
        let b = run_blocked(&c, 2, BlockedOptions::default()).unwrap();
        assert_eq!(a.state.assignment(), b.state.assignment());
    }

    #[test]
    fn bell_distribution() {
        let run = run_blocked(&bell(), 2, BlockedOptions::default()).unwrap();
        assert_eq!(run.distribution, OutcomeDistribution::exact(s("1/2")));
    }

    #[test]
    fn split_product_and_bell() {
        let plus = ExactBlock::pure(vec![0], &[s("1/2*r2"), s("1/2*r2")]).unwrap();
        let one = ExactBlock::basis(1, true);
        let prod = plus.kron(&one).unwrap();
        assert_eq!(split_exact(&prod, 1).unwrap(), vec![plus, one]);

        let r = s("1/2*r2");
        let z = ExactScalar::zero();
        let bell = ExactBlock::pure(vec![0, 1], &[r.clone(), z.clone(), z, r]).unwrap();
        assert!(split_exact(&bell, 1).is_err());
    }

    #[test]
    fn split_mixed_blocks() {
        let half = ExactBlock::new(
            vec![2],
            crate::matrix::ExactMatrix::identity(2).scale(&s("1/2")),
        )
        .unwrap();
        let zero = ExactBlock::basis(5, false);
        let prod = half.kron(&zero).unwrap();
        assert!(!prod.is_pure());
        assert_eq!(split_exact(&prod, 1).unwrap(), vec![half, zero]);
    }

    #[test]
    fn eager_split_undoes_merge() {
        let mut c = Circuit::new(2).unwrap();
        c.push(builtin_gate("CNOT"), &[0, 1]).unwrap();
        let lazy = run_blocked(&c, 2, BlockedOptions::default()).unwrap();
        assert_eq!(lazy.state.partition(), Partition::new(vec![vec![0, 1]]));
        let eager = run_blocked(&c, 2, BlockedOptions { eager_split: true }).unwrap();
        assert_eq!(eager.state.partition(), Partition::singletons(&[0, 1]));
    }
}
