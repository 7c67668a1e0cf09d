//! Seeded circuit generators. Every generator is a pure function of its
//! parameters and seed (see [`crate::rng`] for the stream definition).

use crate::circuit::Circuit;
use crate::gate::builtin_gate;
use crate::rng::{tags, CounterRng};

const LOCAL_1Q: [&str; 6] = ["H", "S", "T", "X", "Y", "Z"];
const LOCAL_2Q: [&str; 3] = ["CNOT", "CZ", "SWAP"];
const CLIFFORD_1Q: [&str; 5] = ["H", "S", "X", "Y", "Z"];

fn rng_for(seed: u64, kind: u64) -> CounterRng {
    CounterRng::new(seed, tags::CIRCUIT).split(kind)
}

/// Contiguous blocks `[0, p), [p, 2p), …` covering `n` qubits.
pub fn fixed_partition(n: usize, p: usize) -> Vec<Vec<usize>> {
    (0..n)
        .collect::<Vec<_>>()
        .chunks(p.max(1))
        .map(<[usize]>::to_vec)
        .collect()
}

fn random_input(rng: &mut CounterRng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.bit()).collect()
}

fn distinct_pair(rng: &mut CounterRng, pool: &[usize]) -> (usize, usize) {
    let a = rng.index(pool.len());
    let mut b = rng.index(pool.len() - 1);
    if b >= a {
        b += 1;
    }
    (pool[a], pool[b])
}

/// Random gates that never cross the fixed partition of [`fixed_partition`],
/// so every prefix state is `p`-blocked. With `p == 1` only 1-qubit gates
/// occur. Input bits are random.
pub fn gen_block_local(n: usize, p: usize, steps: usize, seed: u64) -> Circuit {
    assert!(n >= p && p >= 1, "need n >= p >= 1");
    let mut rng = rng_for(seed, 1);
    let blocks = fixed_partition(n, p);
    let mut c = Circuit::new(n).expect("n >= 1");
    c.set_input(&random_input(&mut rng, n))
        .expect("width matches");
    for _ in 0..steps {
        let block = rng.choose(&blocks);
        if block.len() >= 2 && rng.below(3) == 0 {
            let (a, b) = distinct_pair(&mut rng, block);
            c.push(builtin_gate(rng.choose(&LOCAL_2Q)), &[a, b])
                .expect("valid step");
        } else {
            let q = *rng.choose(block);
            c.push(builtin_gate(rng.choose(&LOCAL_1Q)), &[q])
                .expect("valid step");
        }
    }
    c
}

/// Tracks a partition into groups of size ≤ p that the generated state is
/// guaranteed to factor over, plus which qubits are known basis states.
struct Tracker {
    group_of: Vec<usize>,
    groups: Vec<Vec<usize>>,
    classical: Vec<bool>,
}

impl Tracker {
    fn swap_members(&mut self, a: usize, b: usize) {
        let (ga, gb) = (self.group_of[a], self.group_of[b]);
        for q in self.groups[ga].iter_mut() {
            if *q == a {
                *q = b;
            }
        }
        for q in self.groups[gb].iter_mut() {
            if *q == b {
                *q = a;
            }
        }
        self.group_of.swap(a, b);
        self.classical.swap(a, b);
    }
}

/// Circuits whose states are `p`-blocked at every step but whose blocks
/// must be re-identified by the simulator: cross-block SWAPs, controlled
/// gates whose control is a known basis state (reversible classical logic),
/// and cross-block gate pairs `G, G⁻¹` on blocks small enough to merge.
/// Local gates inside the tracked groups create genuine superpositions.
pub fn gen_entangle_disentangle(n: usize, p: usize, steps: usize, seed: u64) -> Circuit {
    assert!(n >= 2 && p >= 1, "need n >= 2");
    let mut rng = rng_for(seed, 2);
    let groups = fixed_partition(n, p);
    let mut group_of = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for &q in members {
            group_of[q] = g;
        }
    }
    let mut t = Tracker {
        group_of,
        groups,
        classical: vec![true; n],
    };
    let mut c = Circuit::new(n).expect("n >= 2");
    c.set_input(&random_input(&mut rng, n))
        .expect("width matches");
    let all: Vec<usize> = (0..n).collect();

    while c.len() < steps {
        let remaining = steps - c.len();
        match rng.below(6) {
            0 | 1 => {
                let q = rng.index(n);
                let name = *rng.choose(&LOCAL_1Q);
                if name == "H" {
                    t.classical[q] = false;
                }
                c.push(builtin_gate(name), &[q]).expect("valid step");
            }
            2 => {
                let q = rng.index(n);
                let group = t.groups[t.group_of[q]].clone();
                if group.len() < 2 {
                    continue;
                }
                let (a, b) = distinct_pair(&mut rng, &group);
                if !(t.classical[a] && t.classical[b]) {
                    t.classical[a] = false;
                    t.classical[b] = false;
                }
                c.push(builtin_gate(rng.choose(&LOCAL_2Q)), &[a, b])
                    .expect("valid step");
            }
            3 => {
                let (a, b) = distinct_pair(&mut rng, &all);
                if t.group_of[a] != t.group_of[b] {
                    t.swap_members(a, b);
                } else {
                    t.classical.swap(a, b);
                }
                c.push(builtin_gate("SWAP"), &[a, b]).expect("valid step");
            }
            4 => {
                // Controlled gate on a known basis-state control: acts as a
                // conditional local gate on the target and keeps the product.
                let controls: Vec<usize> =
                    all.iter().copied().filter(|&q| t.classical[q]).collect();
                if controls.is_empty() {
                    continue;
                }
                let ctrl = *rng.choose(&controls);
                let others: Vec<usize> = all.iter().copied().filter(|&q| q != ctrl).collect();
                let tgt = *rng.choose(&others);
                let name = if rng.bit() { "CNOT" } else { "CZ" };
                c.push(builtin_gate(name), &[ctrl, tgt])
                    .expect("valid step");
            }
            _ => {
                if remaining < 2 {
                    continue;
                }
                let (a, b) = distinct_pair(&mut rng, &all);
                let (ga, gb) = (t.group_of[a], t.group_of[b]);
                let mergeable = ga == gb || t.groups[ga].len() + t.groups[gb].len() <= p;
                if !(mergeable || t.classical[a]) {
                    continue;
                }
                let g = builtin_gate(rng.choose(&LOCAL_2Q));
                let inv = std::sync::Arc::new(g.inverse());
                c.push(g, &[a, b]).expect("valid step");
                c.push(inv, &[a, b]).expect("valid step");
            }
        }
    }
    c
}

/// Random Clifford circuit over `{H, S, X, Y, Z, CNOT, CZ, SWAP}`.
pub fn gen_clifford(n: usize, steps: usize, seed: u64) -> Circuit {
    let mut rng = rng_for(seed, 3);
    let mut c = Circuit::new(n).expect("n >= 1");
    c.set_input(&random_input(&mut rng, n))
        .expect("width matches");
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..steps {
        if n >= 2 && rng.below(3) == 0 {
            let (a, b) = distinct_pair(&mut rng, &all);
            c.push(builtin_gate(rng.choose(&LOCAL_2Q)), &[a, b])
                .expect("valid step");
        } else {
            let q = rng.index(n);
            c.push(builtin_gate(rng.choose(&CLIFFORD_1Q)), &[q])
                .expect("valid step");
        }
    }
    c.set_measured(rng.index(n)).expect("in range");
    c
}

/// `H(0)` followed by the CNOT chain `(0,1), (1,2), …`, preparing
/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Circuit {
    let mut c = Circuit::new(n).expect("n >= 1");
    c.push(builtin_gate("H"), &[0]).expect("valid step");
    for q in 1..n {
        c.push(builtin_gate("CNOT"), &[q - 1, q])
            .expect("valid step");
    }
    c
}

/// `H(0), CNOT(0,1)` on `|00⟩`, measuring qubit 0.
pub fn bell() -> Circuit {
    ghz(2)
}
