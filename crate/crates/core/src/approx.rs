//! ε-tolerant simulation with a certified error ledger.
//!
//! After every gate the touched block (at most `2p` qubits) is replaced by
//! the product of its exact reduced states over the partition into parts of
//! size ≤ `p` that is closest in trace norm. The ledger carries the bound
//! `e_0 = 0`, `e_{j+1} = (2p+3)(e_j + ε)`: if the true state is within `ε`
//! of some `p`-blocked state at every step, the output distribution is
//! within `e_T` of the true one.
//!
//! Gates with float matrices (used for perturbation studies) switch the
//! blocks they touch to float storage; such blocks stay float.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;

use crate::blocked::split_exact;
use crate::circuit::{Circuit, CircuitStep};
use crate::density::{DensityBlock, ExactBlock, FloatBlock};
use crate::field::Field;
use crate::generate::{fixed_partition, gen_block_local};
use crate::linalg::{trace_norm_float, trace_norm_hermitian};
use crate::matrix::{FloatMatrix, Matrix};
use crate::partition::bounded_partitions;
use crate::rng::{tags, CounterRng};
use crate::sampling::OutcomeDistribution;

/// Distances closer than this are ties; the earlier partition in search
/// order wins.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Slack on the hypothesis check, covering eigensolver error.
pub const FLAG_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxConfig {
    pub p: usize,
    /// Assumed per-step distance to some `p`-blocked state.
    pub epsilon: f64,
    pub eta_target: f64,
    pub seed: u64,
}

impl ApproxConfig {
    pub fn new(p: usize, epsilon: f64) -> Self {
        ApproxConfig {
            p,
            epsilon,
            eta_target: 1.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxOp {
    Exact(CircuitStep),
    Float {
        name: String,
        matrix: FloatMatrix,
        targets: Vec<usize>,
    },
}

impl ApproxOp {
    pub fn targets(&self) -> &[usize] {
        match self {
            ApproxOp::Exact(s) => s.targets(),
            ApproxOp::Float { targets, .. } => targets,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ApproxOp::Exact(s) => s.gate().name(),
            ApproxOp::Float { name, .. } => name,
        }
    }

    pub fn float_matrix(&self) -> FloatMatrix {
        match self {
            ApproxOp::Exact(s) => s.gate().matrix().to_float(),
            ApproxOp::Float { matrix, .. } => matrix.clone(),
        }
    }
}

/// A circuit whose steps may carry float gate matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxCircuit {
    pub width: usize,
    pub input: Vec<bool>,
    pub input_blocks: Vec<ExactBlock>,
    pub ops: Vec<ApproxOp>,
    pub measured: usize,
}

impl From<&Circuit> for ApproxCircuit {
    fn from(c: &Circuit) -> Self {
        ApproxCircuit {
            width: c.width(),
            input: c.input().to_vec(),
            input_blocks: c.input_blocks().to_vec(),
            ops: c.steps().iter().cloned().map(ApproxOp::Exact).collect(),
            measured: c.measured(),
        }
    }
}

impl ApproxCircuit {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.ops.iter().all(|o| matches!(o, ApproxOp::Exact(_)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxBlock {
    Exact(ExactBlock),
    Float(FloatBlock),
}

impl ApproxBlock {
    pub fn labels(&self) -> &[usize] {
        match self {
            ApproxBlock::Exact(b) => b.labels(),
            ApproxBlock::Float(b) => b.labels(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels().len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels().is_empty()
    }

    pub fn to_float(&self) -> FloatBlock {
        match self {
            ApproxBlock::Exact(b) => b.to_float(),
            ApproxBlock::Float(b) => b.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerEntry {
    /// Steps applied so far (1-based).
    pub j: usize,
    /// Bound `e_j` after this step.
    pub e: f64,
    /// Trace-norm residual of this step's split.
    pub d: f64,
    pub hypothesis_violated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorLedger {
    p: usize,
    epsilon: f64,
    entries: Vec<LedgerEntry>,
}

impl ErrorLedger {
    pub fn new(p: usize, epsilon: f64) -> Self {
        ErrorLedger {
            p,
            epsilon,
            entries: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// `e_j` for the last recorded step; `e_0 = 0`.
    pub fn current(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.e)
    }

    /// The recursion applied to `e`.
    pub fn next_bound(p: usize, e: f64, epsilon: f64) -> f64 {
        (2 * p + 3) as f64 * (e + epsilon)
    }

    /// Appends a step with measured residual `d`.
    pub fn record(&mut self, d: f64) -> LedgerEntry {
        let prev = self.current();
        let allowed = (2 * self.p + 1) as f64 * (prev + self.epsilon);
        let entry = LedgerEntry {
            j: self.entries.len() + 1,
            e: Self::next_bound(self.p, prev, self.epsilon),
            d,
            hypothesis_violated: d > allowed + FLAG_TOLERANCE,
        };
        self.entries.push(entry);
        entry
    }

    pub fn hypothesis_violated(&self) -> bool {
        self.entries.iter().any(|e| e.hypothesis_violated)
    }

    /// One line per step: `j e_j d_j flag`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let flag = if e.hypothesis_violated {
                "HypothesisViolated"
            } else {
                "ok"
            };
            writeln!(out, "{} {:e} {:e} {}", e.j, e.e, e.d, flag).unwrap();
        }
        out
    }
}

/// Conditional guarantee: if the true state was within `epsilon` of a
/// `p`-blocked state at every step, `||P − P′|| ≤ e_t`. Withdrawn when a
/// split residual contradicts that assumption.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub e_t: f64,
    pub epsilon: f64,
    pub withdrawn: bool,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e_T={:e} conditional_on_eps={:e}",
            self.e_t, self.epsilon
        )?;
        if self.withdrawn {
            write!(f, " (withdrawn: HypothesisViolated)")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxState {
    p: usize,
    assignment: Vec<usize>,
    blocks: BTreeMap<usize, ApproxBlock>,
    next_id: usize,
}

/// Product of reduced states over the closest partition, and its distance.
fn best_product<T: Field>(
    tau: &DensityBlock<T>,
    p: usize,
    distance: impl Fn(&Matrix<T>) -> f64,
) -> (Vec<DensityBlock<T>>, f64) {
    let mut cache: BTreeMap<Vec<usize>, DensityBlock<T>> = BTreeMap::new();
    let mut best: Option<(Vec<DensityBlock<T>>, f64)> = None;
    for partition in bounded_partitions(tau.labels(), p) {
        let factors: Vec<DensityBlock<T>> = partition
            .parts()
            .iter()
            .map(|part| {
                cache
                    .entry(part.clone())
                    .or_insert_with(|| tau.partial_trace(part).expect("part lies in block"))
                    .clone()
            })
            .collect();
        let product = DensityBlock::kron_all(&factors).expect("parts are disjoint");
        let diff = tau.matrix().sub(product.matrix()).expect("same shape");
        let d = distance(&diff);
        if best.as_ref().is_none_or(|(_, b)| d < b - TIE_TOLERANCE) {
            best = Some((factors, d));
        }
    }
    best.expect("at least one partition")
}

impl ApproxState {
    pub fn init(circuit: &ApproxCircuit, p: usize) -> Self {
        let p = p.max(1);
        let n = circuit.width;
        let mut st = ApproxState {
            p,
            assignment: vec![0; n],
            blocks: BTreeMap::new(),
            next_id: 1,
        };
        for b in &circuit.input_blocks {
            st.insert(ApproxBlock::Exact(b.sorted()));
        }
        for q in 0..n {
            if !circuit.input_blocks.iter().any(|b| b.contains(q)) {
                st.insert(ApproxBlock::Exact(ExactBlock::basis(q, circuit.input[q])));
            }
        }
        st
    }

    fn insert(&mut self, block: ApproxBlock) {
        let id = self.next_id;
        self.next_id += 1;
        for &q in block.labels() {
            self.assignment[q] = id;
        }
        self.blocks.insert(id, block);
    }

    pub fn blocks(&self) -> impl Iterator<Item = &ApproxBlock> {
        self.blocks.values()
    }

    pub fn block_of(&self, qubit: usize) -> &ApproxBlock {
        &self.blocks[&self.assignment[qubit]]
    }

    pub fn is_exact(&self) -> bool {
        self.blocks
            .values()
            .all(|b| matches!(b, ApproxBlock::Exact(_)))
    }

    /// Global state as a float density matrix, labels `0..n`.
    pub fn global_float(&self) -> FloatBlock {
        let parts: Vec<FloatBlock> = self.blocks.values().map(ApproxBlock::to_float).collect();
        FloatBlock::kron_all(&parts).expect("blocks are disjoint")
    }

    /// Applies `op`, re-blocks the touched block and returns the split
    /// residual `d_j`. Blocks already within `p` are not split (`d_j = 0`).
    /// Blocks larger than `p` that stay exact first try an exact
    /// factorization, which is always the minimizer when it exists.
    pub fn step(&mut self, op: &ApproxOp) -> f64 {
        let mut ids: Vec<usize> = op.targets().iter().map(|&q| self.assignment[q]).collect();
        ids.dedup();
        let parts: Vec<ApproxBlock> = ids
            .iter()
            .map(|id| self.blocks.remove(id).expect("assigned block exists"))
            .collect();
        let any_float = matches!(op, ApproxOp::Float { .. })
            || parts.iter().any(|b| matches!(b, ApproxBlock::Float(_)));
        let p = self.p;

        let (new_parts, d) = if any_float {
            let floats: Vec<FloatBlock> = parts.iter().map(ApproxBlock::to_float).collect();
            let merged = FloatBlock::kron_all(&floats).expect("blocks are disjoint");
            let tau = merged
                .apply_unitary(&op.float_matrix(), op.targets())
                .expect("targets lie in block");
            if tau.len() <= p {
                (vec![ApproxBlock::Float(tau)], 0.0)
            } else {
                let (factors, d) = best_product(&tau, p, |m| {
                    trace_norm_hermitian(m).expect("difference of Hermitian matrices")
                });
                (factors.into_iter().map(ApproxBlock::Float).collect(), d)
            }
        } else {
            let ApproxOp::Exact(step) = op else {
                unreachable!()
            };
            let exact: Vec<ExactBlock> = parts
                .into_iter()
                .map(|b| match b {
                    ApproxBlock::Exact(b) => b,
                    ApproxBlock::Float(_) => unreachable!(),
                })
                .collect();
            let merged = ExactBlock::kron_all(&exact).expect("blocks are disjoint");
            let tau = merged
                .apply_unitary(step.gate().matrix(), step.targets())
                .expect("targets lie in block");
            if tau.len() <= p {
                (vec![ApproxBlock::Exact(tau)], 0.0)
            } else if let Ok(factors) = split_exact(&tau, p) {
                (factors.into_iter().map(ApproxBlock::Exact).collect(), 0.0)
            } else {
                let (factors, d) = best_product(&tau, p, |m| {
                    trace_norm_float(m).expect("difference of Hermitian matrices")
                });
                (factors.into_iter().map(ApproxBlock::Exact).collect(), d)
            }
        };
        for b in new_parts {
            self.insert(b);
        }
        d
    }

    /// Distribution of measuring `qubit`; exact while its block is exact.
    pub fn marginal(&self, qubit: usize) -> OutcomeDistribution {
        match self.block_of(qubit) {
            ApproxBlock::Exact(b) => {
                OutcomeDistribution::exact(b.prob_zero(qubit).expect("qubit in block"))
            }
            ApproxBlock::Float(b) => {
                let r = b.partial_trace(&[qubit]).expect("qubit in block");
                OutcomeDistribution::float(r.matrix().get(0, 0).re, r.matrix().get(1, 1).re)
            }
        }
    }
}

/// One approximate step: applies `op` to `state` and appends the ledger.
pub fn approx_step(
    state: &mut ApproxState,
    op: &ApproxOp,
    ledger: &mut ErrorLedger,
) -> LedgerEntry {
    let d = state.step(op);
    ledger.record(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRun {
    pub distribution: OutcomeDistribution,
    pub ledger: ErrorLedger,
    pub certificate: Certificate,
    pub state: ApproxState,
}

pub fn run_approx(circuit: &ApproxCircuit, cfg: &ApproxConfig) -> ApproxRun {
    let mut state = ApproxState::init(circuit, cfg.p);
    let mut ledger = ErrorLedger::new(state.p, cfg.epsilon);
    for op in &circuit.ops {
        approx_step(&mut state, op, &mut ledger);
    }
    let certificate = Certificate {
        e_t: ledger.current(),
        epsilon: cfg.epsilon,
        withdrawn: ledger.hypothesis_violated(),
    };
    ApproxRun {
        distribution: state.marginal(circuit.measured),
        ledger,
        certificate,
        state,
    }
}

/// Largest per-step `ε` for which the bound guarantees output error `η`
/// over `t` steps: `η / (4 (2p+4)^t)`. Returns 0 when the power overflows.
pub fn required_epsilon(eta: f64, p: usize, t: usize) -> f64 {
    let base = (2 * p + 4) as f64;
    let power = base.powf(t as f64);
    if !power.is_finite() {
        return 0.0;
    }
    eta / (4.0 * power)
}

/// Closed-form bound `ε (2p+4)^j`; `e_0 = 0`.
pub fn bound_e(epsilon: f64, p: usize, j: usize) -> f64 {
    if j == 0 {
        return 0.0;
    }
    epsilon * ((2 * p + 4) as f64).powf(j as f64)
}

/// `exp(−iθ P⊗Q) = cos θ I − i sin θ P⊗Q` for Paulis `P, Q ∈ {X, Y, Z}`.
pub fn pauli_rotation(theta: f64, a: char, b: char) -> FloatMatrix {
    let pauli = |c: char| -> FloatMatrix {
        let (o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let j = Complex64::new(0.0, 1.0);
        let rows = match c {
            'X' => vec![vec![o, i], vec![i, o]],
            'Y' => vec![vec![o, -j], vec![j, o]],
            'Z' => vec![vec![i, o], vec![o, -i]],
            _ => panic!("not a Pauli letter: {c}"),
        };
        FloatMatrix::from_rows(rows).expect("square")
    };
    let pp = pauli(a).kron(&pauli(b));
    let id = FloatMatrix::identity(4).scale(&Complex64::new(theta.cos(), 0.0));
    id.add(&pp.scale(&Complex64::new(0.0, -theta.sin())))
        .expect("same shape")
}

/// A block-local circuit with `insertions` cross-block Pauli rotations
/// placed at random positions, `steps` operations in total. Each rotation
/// has `sin θ = epsilon / (2·insertions)`, so it moves a pure state by at
/// most `epsilon / insertions` in trace norm and the state stays within
/// `epsilon` of the unperturbed (blocked) state at every step.
pub fn gen_perturbed(
    n: usize,
    p: usize,
    steps: usize,
    insertions: usize,
    epsilon: f64,
    seed: u64,
) -> ApproxCircuit {
    assert!(n > p, "need at least two blocks");
    assert!(insertions <= steps, "more insertions than steps");
    let base = gen_block_local(n, p, steps - insertions, seed);
    let mut rng = CounterRng::new(seed, tags::PERTURB);
    let blocks = fixed_partition(n, p);
    let theta = if insertions == 0 {
        0.0
    } else {
        (epsilon / (2.0 * insertions as f64)).min(1.0).asin()
    };

    let mut slots: Vec<bool> = vec![false; steps];
    let mut placed = 0;
    while placed < insertions {
        let k = rng.index(steps);
        if !slots[k] {
            slots[k] = true;
            placed += 1;
        }
    }
    let mut base_ops = base.steps().iter().cloned();
    let letters = ['X', 'Y', 'Z'];
    let mut ops = Vec::with_capacity(steps);
    for rotate in slots {
        if rotate {
            let bi = rng.index(blocks.len());
            let mut bj = rng.index(blocks.len() - 1);
            if bj >= bi {
                bj += 1;
            }
            let a = *rng.choose(&blocks[bi]);
            let b = *rng.choose(&blocks[bj]);
            let (pa, pb) = (*rng.choose(&letters), *rng.choose(&letters));
            ops.push(ApproxOp::Float {
                name: format!("R{pa}{pb}"),
                matrix: pauli_rotation(theta, pa, pb),
                targets: vec![a, b],
            });
        } else {
            ops.push(ApproxOp::Exact(base_ops.next().expect("enough base steps")));
        }
    }
    ApproxCircuit {
        width: n,
        input: base.input().to_vec(),
        input_blocks: Vec::new(),
        ops,
        measured: base.measured(),
    }
}

/// Wraps a float 2-qubit gate as an [`ApproxOp`].
pub fn float_op(name: &str, matrix: FloatMatrix, targets: &[usize]) -> ApproxOp {
    ApproxOp::Float {
        name: name.to_string(),
        matrix,
        targets: targets.to_vec(),
    }
}

/// Exact step as an [`ApproxOp`].
pub fn exact_op(gate: Arc<crate::gate::GateDef>, targets: &[usize], width: usize) -> ApproxOp {
    ApproxOp::Exact(CircuitStep::new(gate, targets, width).expect("valid step"))
}
