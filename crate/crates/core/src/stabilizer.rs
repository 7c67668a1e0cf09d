//! Stabilizer-tableau simulation of Clifford circuits.
//!
//! A state of `n` qubits is described by `n` commuting, independent Pauli
//! generators with signs. Gates recognised as Clifford (by exact matrix
//! equality with I, X, Y, Z, H, S, CNOT, CZ or SWAP) update the generators
//! by conjugation; anything else is rejected.

use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitStep};
use crate::gate::{builtin_gate, GateDef};
use crate::sampling::OutcomeDistribution;
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilizerError {
    #[error("step {step}: gate {gate} is not Clifford")]
    NonCliffordGate { step: usize, gate: String },
    #[error("mixed input blocks have no stabilizer description")]
    MixedInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clifford {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Cnot,
    Cz,
    Swap,
}

impl Clifford {
    const ALL: [(Clifford, &'static str); 9] = [
        (Clifford::I, "I"),
        (Clifford::X, "X"),
        (Clifford::Y, "Y"),
        (Clifford::Z, "Z"),
        (Clifford::H, "H"),
        (Clifford::S, "S"),
        (Clifford::Cnot, "CNOT"),
        (Clifford::Cz, "CZ"),
        (Clifford::Swap, "SWAP"),
    ];

    /// Identifies a gate by its matrix, not its name.
    pub fn classify(gate: &GateDef) -> Option<Clifford> {
        Self::ALL
            .iter()
            .find(|(_, name)| builtin_gate(name).matrix() == gate.matrix())
            .map(|(c, _)| *c)
    }
}

/// `i^phase · P₀ ⊗ … ⊗ P_{n−1}` with `Pₖ` given by `(x[k], z[k])`:
/// `(0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    x: Vec<bool>,
    z: Vec<bool>,
    phase: u8,
}

/// Exponent of `i` in the product of single-qubit letters `(x1,z1)(x2,z2)`.
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (i32::from(x2), i32::from(z2));
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            x: vec![false; n],
            z: vec![false; n],
            phase: 0,
        }
    }

    /// `±Z_q`.
    pub fn z_on(n: usize, q: usize, negative: bool) -> Self {
        let mut p = Self::identity(n);
        p.z[q] = true;
        p.phase = if negative { 2 } else { 0 };
        p
    }

    pub fn width(&self) -> usize {
        self.x.len()
    }

    /// Phase exponent: the sign is `i^phase`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x[q], self.z[q]) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut phase = i32::from(self.phase) + i32::from(other.phase);
        let n = self.width();
        let mut out = Self::identity(n);
        for k in 0..n {
            phase += g(self.x[k], self.z[k], other.x[k], other.z[k]);
            out.x[k] = self.x[k] ^ other.x[k];
            out.z[k] = self.z[k] ^ other.z[k];
        }
        out.phase = phase.rem_euclid(4) as u8;
        out
    }

    pub fn commutes(&self, other: &Self) -> bool {
        let anti = (0..self.width())
            .filter(|&k| (self.x[k] & other.z[k]) ^ (self.z[k] & other.x[k]))
            .count();
        anti % 2 == 0
    }

    fn flip(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    fn h(&mut self, q: usize) {
        if self.x[q] && self.z[q] {
            self.flip();
        }
        std::mem::swap(&mut self.x[q], &mut self.z[q]);
    }

    fn s(&mut self, q: usize) {
        if self.x[q] && self.z[q] {
            self.flip();
        }
        self.z[q] ^= self.x[q];
    }

    fn cnot(&mut self, c: usize, t: usize) {
        if self.x[c] && self.z[t] && (self.x[t] == self.z[c]) {
            self.flip();
        }
        self.x[t] ^= self.x[c];
        self.z[c] ^= self.z[t];
    }

    fn apply(&mut self, gate: Clifford, targets: &[usize]) {
        let q = targets[0];
        match gate {
            Clifford::I => {}
            Clifford::X => {
                if self.z[q] {
                    self.flip();
                }
            }
            Clifford::Z => {
                if self.x[q] {
                    self.flip();
                }
            }
            Clifford::Y => {
                if self.x[q] ^ self.z[q] {
                    self.flip();
                }
            }
            Clifford::H => self.h(q),
            Clifford::S => self.s(q),
            Clifford::Cnot => self.cnot(q, targets[1]),
            Clifford::Cz => {
                let t = targets[1];
                self.h(t);
                self.cnot(q, t);
                self.h(t);
            }
            Clifford::Swap => {
                let t = targets[1];
                self.x.swap(q, t);
                self.z.swap(q, t);
            }
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}")?;
        for q in 0..self.width() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    generators: Vec<PauliString>,
}

/// Solves `Σ c_i v_i = target` over GF(2); `None` if unsolvable.
fn gf2_solve(vectors: &[Vec<bool>], target: &[bool]) -> Option<Vec<bool>> {
    let m = vectors.len();
    let len = target.len();
    // Augmented rows: vector bits, then an identity tag tracking combinations.
    let mut rows: Vec<(Vec<bool>, Vec<bool>)> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut tag = vec![false; m];
            tag[i] = true;
            (v.clone(), tag)
        })
        .collect();
    let mut rest = target.to_vec();
    let mut combo = vec![false; m];
    let mut used = vec![false; m];
    for col in 0..len {
        let Some(pivot) = (0..m).find(|&r| !used[r] && rows[r].0[col]) else {
            continue;
        };
        used[pivot] = true;
        let (pv, pt) = rows[pivot].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot && row.0[col] {
                row.0.iter_mut().zip(&pv).for_each(|(a, b)| *a ^= b);
                row.1.iter_mut().zip(&pt).for_each(|(a, b)| *a ^= b);
            }
        }
        if rest[col] {
            rest.iter_mut().zip(&pv).for_each(|(a, b)| *a ^= b);
            combo.iter_mut().zip(&pt).for_each(|(a, b)| *a ^= b);
        }
    }
    rest.iter().all(|b| !b).then_some(combo)
}

impl StabilizerTableau {
    /// Generators `(−1)^{b_q} Z_q`.
    pub fn init(bits: &[bool]) -> Self {
        let n = bits.len();
        StabilizerTableau {
            generators: (0..n).map(|q| PauliString::z_on(n, q, bits[q])).collect(),
        }
    }

    pub fn from_generators(generators: Vec<PauliString>) -> Self {
        StabilizerTableau { generators }
    }

    pub fn width(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Applies a recognised Clifford gate to every generator.
    pub fn apply_clifford(&mut self, gate: Clifford, targets: &[usize]) {
        for g in &mut self.generators {
            g.apply(gate, targets);
        }
    }

    /// Pairwise commuting, Hermitian (real signs), and independent.
    pub fn check_invariants(&self) -> bool {
        let n = self.width();
        let commuting =
            (0..n).all(|i| (i + 1..n).all(|j| self.generators[i].commutes(&self.generators[j])));
        let real = self.generators.iter().all(|g| g.phase % 2 == 0);
        commuting && real && self.rank() == n
    }

    fn bit_rows(&self) -> Vec<Vec<bool>> {
        self.generators
            .iter()
            .map(|g| g.x.iter().chain(&g.z).copied().collect())
            .collect()
    }

    fn rank(&self) -> usize {
        let mut rows = self.bit_rows();
        let mut rank = 0;
        for col in 0..2 * self.width() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[col] {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Row-reduced generators: X-part pivots by qubit first, then Z-part
    /// pivots, rows ordered by pivot. Equal states give equal forms.
    pub fn canonical(&self) -> StabilizerTableau {
        let n = self.width();
        let mut gens = self.generators.clone();
        let mut next = 0;
        for pass in 0..2 {
            for q in 0..n {
                let bit = |p: &PauliString| if pass == 0 { p.x[q] } else { p.z[q] };
                let Some(pivot) = (next..n).find(|&r| bit(&gens[r])) else {
                    continue;
                };
                gens.swap(next, pivot);
                let pg = gens[next].clone();
                for (r, g) in gens.iter_mut().enumerate() {
                    if r != next && bit(g) {
                        *g = pg.mul(g);
                    }
                }
                next += 1;
            }
        }
        StabilizerTableau { generators: gens }
    }

    /// One generator per line, e.g. `+XX`.
    pub fn dump(&self) -> String {
        self.generators.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Outcome distribution of measuring `qubit` in the computational basis.
    pub fn marginal(&self, qubit: usize) -> OutcomeDistribution {
        let n = self.width();
        if self.generators.iter().any(|g| g.x[qubit]) {
            return OutcomeDistribution::exact(ExactScalar::from_ratio(1, 2));
        }
        // ±Z_q commutes with every generator, so it lies in the group.
        let target: Vec<bool> = (0..2 * n).map(|k| k == n + qubit).collect();
        let combo = gf2_solve(&self.bit_rows(), &target).expect("±Z_q is in the stabilizer group");
        let product = self
            .generators
            .iter()
            .zip(&combo)
            .filter(|(_, &c)| c)
            .fold(PauliString::identity(n), |acc, (g, _)| acc.mul(g));
        let p0 = if product.phase == 0 {
            ExactScalar::one()
        } else {
            ExactScalar::zero()
        };
        OutcomeDistribution::exact(p0)
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

pub fn tableau_init(bits: &[bool]) -> StabilizerTableau {
    StabilizerTableau::init(bits)
}

/// Applies `step` (1-based `index` for errors) to a copy of `t`.
pub fn tableau_apply(
    t: &StabilizerTableau,
    step: &CircuitStep,
    index: usize,
) -> Result<StabilizerTableau, StabilizerError> {
    let mut next = t.clone();
    apply_in_place(&mut next, step, index)?;
    Ok(next)
}

fn apply_in_place(
    t: &mut StabilizerTableau,
    step: &CircuitStep,
    index: usize,
) -> Result<(), StabilizerError> {
    let gate = Clifford::classify(step.gate()).ok_or_else(|| StabilizerError::NonCliffordGate {
        step: index,
        gate: step.gate().name().to_string(),
    })?;
    t.apply_clifford(gate, step.targets());
    debug_assert!(t.width() > 16 || t.check_invariants());
    Ok(())
}

pub fn tableau_marginal(t: &StabilizerTableau, qubit: usize) -> OutcomeDistribution {
    t.marginal(qubit)
}

/// Final tableau of `circuit`.
pub fn stabilizer_state(circuit: &Circuit) -> Result<StabilizerTableau, StabilizerError> {
    if !circuit.input_blocks().is_empty() {
        return Err(StabilizerError::MixedInput);
    }
    let mut t = StabilizerTableau::init(circuit.input());
    for (k, step) in circuit.steps().iter().enumerate() {
        apply_in_place(&mut t, step, k + 1)?;
    }
    Ok(t)
}

pub fn run_stabilizer(circuit: &Circuit) -> Result<OutcomeDistribution, StabilizerError> {
    Ok(stabilizer_state(circuit)?.marginal(circuit.measured()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bell, ghz};

    fn half() -> OutcomeDistribution {
        OutcomeDistribution::exact(ExactScalar::from_ratio(1, 2))
    }

    #[test]
    fn init_and_dump() {
        assert_eq!(tableau_init(&[false]).dump(), "+Z\n");
        assert_eq!(tableau_init(&[true]).dump(), "-Z\n");
        assert_eq!(tableau_init(&[false, false]).dump(), "+ZI\n+IZ\n");
    }

    #[test]
    fn hadamard_and_bell() {
        let mut c = Circuit::new(1).unwrap();
        c.push(builtin_gate("H"), &[0]).unwrap();
        let t = stabilizer_state(&c).unwrap();
        assert_eq!(t.dump(), "+X\n");
        assert_eq!(t.marginal(0), half());

        let t = stabilizer_state(&bell()).unwrap();
        assert_eq!(t.canonical().dump(), "+XX\n+ZZ\n");
        assert_eq!(run_stabilizer(&bell()).unwrap(), half());
    }

    #[test]
    fn deterministic_outcomes() {
        let t = tableau_init(&[true]);
        assert_eq!(
            t.marginal(0),
            OutcomeDistribution::exact(ExactScalar::zero())
        );
        // |11⟩ after CNOT(0,1) is |10⟩; Z_1 appears only as a product.
        let mut c = Circuit::new(2).unwrap().with_input(&[true, true]).unwrap();
        c.push(builtin_gate("CNOT"), &[0, 1]).unwrap();
        c.set_measured(1).unwrap();
        assert_eq!(
            run_stabilizer(&c).unwrap(),
            OutcomeDistribution::exact(ExactScalar::one())
        );
    }

    #[test]
    fn t_gate_is_rejected() {
        let mut c = Circuit::new(1).unwrap();
        c.push(builtin_gate("H"), &[0]).unwrap();
        c.push(builtin_gate("T"), &[0]).unwrap();
        assert_eq!(
            run_stabilizer(&c),
            Err(StabilizerError::NonCliffordGate {
                step: 2,
                gate: "T".into()
            })
        );
    }

    #[test]
    fn conjugation_rules() {
        // Check each letter under each 1-qubit Clifford against U P U†.
        for (gate, name) in Clifford::ALL.iter().take(6) {
            let u = builtin_gate(name).matrix().clone();
            for letter in ["X", "Y", "Z"] {
                let mut p = PauliString::identity(1);
                p.x[0] = letter != "Z";
                p.z[0] = letter != "X";
                let before = builtin_gate(letter).matrix().clone();
                p.apply(*gate, &[0]);
                let expect = u.mul(&before).unwrap().mul(&u.dagger()).unwrap();
                let mut got = builtin_gate(&p.letter(0).to_string()).matrix().clone();
                if p.phase == 2 {
                    got = got.scale(&ExactScalar::from_int(-1));
                }
                assert_eq!(got, expect, "{name} on {letter}");
            }
        }
    }

    #[test]
    fn ghz_invariants() {
        let t = stabilizer_state(&ghz(60)).unwrap();
        assert!(t.check_invariants());
        assert_eq!(t.marginal(0), half());
        assert_eq!(t.marginal(59), half());
    }
}
