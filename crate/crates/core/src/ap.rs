//! Equal-amplitude basis superpositions: arithmetic progressions
//! `Σ_k |x₀ + k·r⟩` and pairs `|x₀⟩ + |x₁⟩`, with a combinatorial
//! blockedness test.
//!
//! An equal-amplitude state is a product over a split `(S, R)` of its qubits
//! iff its support is the Cartesian product of its projections onto `S` and
//! `R`. Qubit `q` of an `n`-qubit register is bit `n − 1 − q` of the value.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::dense::StateVector;
use crate::partition::{subsets_with, Partition};
use crate::rng::{tags, CounterRng};
use crate::scalar::ExactScalar;

/// Registers are limited so values fit in a `u64`.
pub const MAX_WIDTH: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApError {
    #[error("progression leaves the {n}-qubit range")]
    RangeOverflow { n: usize },
    #[error("bad arguments: {0}")]
    BadArgs(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSuperposition {
    width: usize,
    support: Vec<u64>,
}

impl BasisSuperposition {
    /// Sorts and deduplicates `support`; every value must fit in `width` bits.
    pub fn new(width: usize, mut support: Vec<u64>) -> Result<Self, ApError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(ApError::BadArgs(format!(
                "width must be in 1..={MAX_WIDTH}"
            )));
        }
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return Err(ApError::BadArgs("empty support".into()));
        }
        if support.iter().any(|&x| x >> width != 0) {
            return Err(ApError::RangeOverflow { n: width });
        }
        Ok(BasisSuperposition { width, support })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    /// Exact amplitude vector, `1/√|support|` on the support. Only for
    /// widths the dense simulator accepts and supports whose size is a power
    /// of two (other sizes have amplitudes outside the scalar field).
    pub fn to_state(&self) -> Option<StateVector> {
        let amp = uniform_amplitude(self.support.len())?;
        let mut amps = vec![ExactScalar::zero(); 1 << self.width];
        for &x in &self.support {
            amps[x as usize] = amp.clone();
        }
        StateVector::from_amplitudes(self.width, amps).ok()
    }
}

/// `1/√m` when it lies in Q(√2): `m = 4^k` or `m = 2·4^k`.
pub fn uniform_amplitude(m: usize) -> Option<ExactScalar> {
    if m == 0 || !m.is_power_of_two() {
        return None;
    }
    let k = m.trailing_zeros();
    let half = 1i64.checked_shl(k / 2)?;
    if k.is_multiple_of(2) {
        Some(ExactScalar::from_ratio(1, half))
    } else {
        Some(
            ExactScalar::inv_sqrt2()
                .div(&ExactScalar::from_int(half))
                .ok()?,
        )
    }
}

/// `{x0 + k·r : 0 ≤ k < count}` on `n` qubits.
pub fn build_ap(x0: u64, r: u64, count: u64, n: usize) -> Result<BasisSuperposition, ApError> {
    if r == 0 || count == 0 {
        return Err(ApError::BadArgs("need r >= 1 and count >= 1".into()));
    }
    if n == 0 || n > MAX_WIDTH {
        return Err(ApError::BadArgs(format!(
            "width must be in 1..={MAX_WIDTH}"
        )));
    }
    let last = (count - 1)
        .checked_mul(r)
        .and_then(|s| s.checked_add(x0))
        .ok_or(ApError::RangeOverflow { n })?;
    if last >> n != 0 {
        return Err(ApError::RangeOverflow { n });
    }
    BasisSuperposition::new(n, (0..count).map(|k| x0 + k * r).collect())
}

/// `{x0, x1}` on `n` qubits.
pub fn build_pair(x0: u64, x1: u64, n: usize) -> Result<BasisSuperposition, ApError> {
    if x0 == x1 {
        return Err(ApError::BadArgs("pair elements must differ".into()));
    }
    if n == 0 || n > MAX_WIDTH || (x0 >> n) != 0 || (x1 >> n) != 0 {
        return Err(ApError::BadArgs(format!("values must fit in {n} bits")));
    }
    BasisSuperposition::new(n, vec![x0, x1])
}

/// Bits of `value` at qubits `qubits`, packed in the given order.
fn project(value: u64, qubits: &[usize], n: usize) -> u64 {
    qubits
        .iter()
        .fold(0, |acc, &q| acc << 1 | (value >> (n - 1 - q) & 1))
}

/// Whether the support over `labels` splits as `S × rest`, returning the
/// projection onto the rest if it does.
fn split_support(
    set: &BTreeSet<u64>,
    labels: &[usize],
    subset: &[usize],
    n: usize,
) -> Option<BTreeSet<u64>> {
    let rest: Vec<usize> = labels
        .iter()
        .copied()
        .filter(|q| !subset.contains(q))
        .collect();
    let ps: BTreeSet<u64> = set.iter().map(|&v| project(v, subset, n)).collect();
    let pr: BTreeSet<u64> = set.iter().map(|&v| project(v, &rest, n)).collect();
    (ps.len().checked_mul(pr.len()) == Some(set.len())).then(|| {
        // Re-embed the rest projection at its original bit positions.
        set.iter()
            .map(|&v| {
                rest.iter()
                    .fold(0u64, |acc, &q| acc | (v & 1 << (n - 1 - q)))
            })
            .collect()
    })
}

/// Finest partition into parts of size ≤ `p` over which the state is a
/// product, or `None`. The finest product partition of an equal-amplitude
/// state is unique; its part holding the smallest remaining qubit is the
/// smallest subset that splits off.
pub fn analyze_blockedness(s: &BasisSuperposition, p: usize) -> Option<Partition> {
    let n = s.width;
    let mut labels: Vec<usize> = (0..n).collect();
    let mut set: BTreeSet<u64> = s.support.iter().copied().collect();
    let mut parts = Vec::new();
    while !labels.is_empty() {
        let anchor = labels[0];
        let mut found = None;
        'search: for size in 1..=p.min(labels.len()) {
            for subset in subsets_with(&labels, anchor, size) {
                if subset.len() == labels.len() {
                    found = Some((subset, BTreeSet::from([0u64])));
                    break 'search;
                }
                if let Some(rest) = split_support(&set, &labels, &subset, n) {
                    found = Some((subset, rest));
                    break 'search;
                }
            }
        }
        let (subset, rest) = found?;
        labels.retain(|q| !subset.contains(q));
        parts.push(subset);
        set = rest;
    }
    let partition = Partition::new(parts);
    debug_assert!(is_product_over(s, &partition));
    Some(partition)
}

/// Cartesian-product check: the support equals the product of its
/// projections onto the parts.
pub fn is_product_over(s: &BasisSuperposition, partition: &Partition) -> bool {
    let n = s.width;
    let mut expected: u128 = 1;
    for part in partition.parts() {
        let proj: BTreeSet<u64> = s.support.iter().map(|&v| project(v, part, n)).collect();
        expected = expected.saturating_mul(proj.len() as u128);
    }
    expected == s.support.len() as u128
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusResult {
    pub blocked: usize,
    pub trials: usize,
    pub seed: u64,
}

impl CensusResult {
    pub fn fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.blocked as f64 / self.trials as f64
        }
    }
}

impl fmt::Display for CensusResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fraction={} trials={} seed={}",
            self.fraction(),
            self.trials,
            self.seed
        )
    }
}

/// Random odd `r` with exactly `r_bits` bits (top bit set).
pub fn random_period(rng: &mut CounterRng, r_bits: usize) -> u64 {
    if r_bits == 1 {
        return 1;
    }
    let top = 1u64 << (r_bits - 1);
    let middle = if r_bits > 2 {
        rng.below(1 << (r_bits - 2)) << 1
    } else {
        0
    };
    top | middle | 1
}

/// One census draw: `(x0, r, count)` with `x0` uniform in `[1, r)` (0 when
/// `r = 1`) and the largest count that fits in `n` qubits.
pub fn census_draw(rng: &mut CounterRng, r_bits: usize, n: usize) -> (u64, u64, u64) {
    let r = random_period(rng, r_bits);
    let x0 = if r == 1 { 0 } else { 1 + rng.below(r - 1) };
    let count = ((1u64 << n) - 1 - x0) / r + 1;
    (x0, r, count)
}

/// Fraction of seeded random progressions that are `p`-blocked.
pub fn census(
    r_bits: usize,
    trials: usize,
    p: usize,
    n: usize,
    seed: u64,
) -> Result<CensusResult, ApError> {
    if r_bits == 0 || r_bits > 60 {
        return Err(ApError::BadArgs("r_bits must be in 1..=60".into()));
    }
    if n < r_bits + 3 || n > MAX_WIDTH {
        return Err(ApError::BadArgs(format!(
            "need r_bits + 3 <= n <= {MAX_WIDTH}"
        )));
    }
    let mut rng = CounterRng::new(seed, tags::CENSUS);
    let mut blocked = 0;
    for _ in 0..trials {
        let (x0, r, count) = census_draw(&mut rng, r_bits, n);
        let s = build_ap(x0, r, count, n)?;
        if analyze_blockedness(&s, p).is_some() {
            blocked += 1;
        }
    }
    Ok(CensusResult {
        blocked,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::bounded_partitions;

    fn brute(s: &BasisSuperposition, p: usize) -> Option<Partition> {
        let labels: Vec<usize> = (0..s.width()).collect();
        bounded_partitions(&labels, p)
            .into_iter()
            .find(|part| is_product_over(s, part))
    }

    #[test]
    fn ap1() {
        let s = build_ap(3, 3, 4, 4).unwrap();
        assert_eq!(s.support(), &[3, 6, 9, 12]);
        let part = analyze_blockedness(&s, 2).unwrap();
        assert_eq!(part.display_bits(4), "{3,1}{2,0}");
        assert_eq!(analyze_blockedness(&s, 1), None);
    }

    #[test]
    fn builders() {
        assert_eq!(build_ap(0, 1, 16, 4).unwrap().support().len(), 16);
        assert_eq!(build_ap(5, 7, 1, 4).unwrap().support(), &[5]);
        assert_eq!(build_ap(3, 3, 6, 4), Err(ApError::RangeOverflow { n: 4 }));
        assert_eq!(build_pair(0, 3, 2).unwrap().support(), &[0, 3]);
        assert!(matches!(build_pair(2, 2, 2), Err(ApError::BadArgs(_))));
    }

    #[test]
    fn uniform_and_pairs() {
        let u = build_ap(0, 1, 32, 5).unwrap();
        assert_eq!(
            analyze_blockedness(&u, 1),
            Some(Partition::singletons(&[0, 1, 2, 3, 4]))
        );
        assert_eq!(analyze_blockedness(&build_pair(0, 3, 2).unwrap(), 1), None);
        let one_bit = build_pair(0b1010, 0b1000, 4).unwrap();
        assert!(analyze_blockedness(&one_bit, 1).is_some());
    }

    #[test]
    fn pairs_need_all_differing_bits_together() {
        for (x0, x1) in [(0b000000u64, 0b101101u64), (0b110000, 0b001100), (1, 62)] {
            let s = build_pair(x0, x1, 6).unwrap();
            let k = (x0 ^ x1).count_ones() as usize;
            for p in 1..=6 {
                assert_eq!(analyze_blockedness(&s, p).is_some(), p >= k);
                assert_eq!(analyze_blockedness(&s, p), brute(&s, p));
            }
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = CounterRng::new(11, 0);
        for _ in 0..200 {
            let n = 2 + rng.index(5);
            let bits = 1 + rng.index(n - 1);
            let (x0, r, count) = census_draw(&mut rng, bits, n);
            let s = build_ap(x0 % 4, r, count.min(1 + rng.below(count)), n).unwrap();
            for p in 1..=3 {
                assert_eq!(analyze_blockedness(&s, p), brute(&s, p), "{s:?} p={p}");
            }
        }
    }

    #[test]
    fn census_shape() {
        let a = census(4, 50, 2, 8, 3).unwrap();
        assert_eq!(a, census(4, 50, 2, 8, 3).unwrap());
        assert!(a.to_string().starts_with("fraction="));
        assert!(a.to_string().ends_with("trials=50 seed=3"));
        let r1 = census(1, 10, 1, 5, 0).unwrap();
        assert_eq!(r1.blocked, 10);
        assert!(census(12, 1, 3, 14, 0).is_err());
    }

    #[test]
    fn amplitudes() {
        assert_eq!(uniform_amplitude(4), Some(ExactScalar::from_ratio(1, 2)));
        assert_eq!(uniform_amplitude(2), Some(ExactScalar::inv_sqrt2()));
        assert_eq!(uniform_amplitude(3), None);
    }
}
