//! Two-outcome distributions and fair-coin sampling.
//!
//! A probability is truncated to `n` binary digits by exact comparisons
//! against dyadic rationals, then sampled with exactly `n` fair coin tosses:
//! the tosses `j₁…jₙ`, read as a binary integer, are compared with the digits
//! `i₁…iₙ`; outcome 0 is returned iff `j < i`, which has probability exactly
//! `0.i₁…iₙ`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::rng::{tags, CounterRng};
use crate::scalar::ExactScalar;

/// Largest number of binary digits [`truncate_prob`] will produce.
pub const MAX_DIGITS: usize = 1074;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("probability must be a real number in [0, 1]")]
    NotAProbability,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OutcomeDistribution {
    /// Exact probabilities in Q(√2); `p0 + p1 == 1` exactly.
    Exact {
        p0: ExactScalar,
        p1: ExactScalar,
    },
    Float {
        p0: f64,
        p1: f64,
    },
}

impl OutcomeDistribution {
    /// Exact distribution from `p0`; `p1 = 1 − p0`.
    pub fn exact(p0: ExactScalar) -> Self {
        let p1 = ExactScalar::one().sub(&p0);
        OutcomeDistribution::Exact { p0, p1 }
    }

    pub fn float(p0: f64, p1: f64) -> Self {
        OutcomeDistribution::Float { p0, p1 }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, OutcomeDistribution::Exact { .. })
    }

    pub fn exact_p0(&self) -> Option<&ExactScalar> {
        match self {
            OutcomeDistribution::Exact { p0, .. } => Some(p0),
            OutcomeDistribution::Float { .. } => None,
        }
    }

    pub fn exact_p1(&self) -> Option<&ExactScalar> {
        match self {
            OutcomeDistribution::Exact { p1, .. } => Some(p1),
            OutcomeDistribution::Float { .. } => None,
        }
    }

    pub fn p0(&self) -> f64 {
        match self {
            OutcomeDistribution::Exact { p0, .. } => {
                p0.to_complex().map(|z| z.re).unwrap_or(f64::NAN)
            }
            OutcomeDistribution::Float { p0, .. } => *p0,
        }
    }

    pub fn p1(&self) -> f64 {
        match self {
            OutcomeDistribution::Exact { p1, .. } => {
                p1.to_complex().map(|z| z.re).unwrap_or(f64::NAN)
            }
            OutcomeDistribution::Float { p1, .. } => *p1,
        }
    }

    /// Both probabilities real and in `[0, 1]`, summing to one (exactly, or
    /// within 1e-10 for float distributions).
    pub fn is_valid(&self) -> bool {
        match self {
            OutcomeDistribution::Exact { p0, p1 } => {
                let in_unit = |p: &ExactScalar| {
                    p.real_signum().is_some_and(|s| s != Ordering::Less)
                        && p.cmp_real(&ExactScalar::one())
                            .is_some_and(|s| s != Ordering::Greater)
                };
                in_unit(p0) && in_unit(p1) && p0.add(p1).is_one()
            }
            OutcomeDistribution::Float { p0, p1 } => {
                (0.0..=1.0).contains(p0)
                    && (0.0..=1.0).contains(p1)
                    && (p0 + p1 - 1.0).abs() <= 1e-10
            }
        }
    }
}

/// `|p₀ − q₀| + |p₁ − q₁|`. Computed exactly when both sides are exact.
pub fn dist_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> f64 {
    match (p, q) {
        (
            OutcomeDistribution::Exact { p0: a0, p1: a1 },
            OutcomeDistribution::Exact { p0: b0, p1: b1 },
        ) => {
            let abs = |x: ExactScalar| {
                if x.real_signum() == Some(Ordering::Less) {
                    x.neg()
                } else {
                    x
                }
            };
            let d = abs(a0.sub(b0)).add(&abs(a1.sub(b1)));
            d.to_complex().map(|z| z.re).unwrap_or(f64::NAN)
        }
        _ => (p.p0() - q.p0()).abs() + (p.p1() - q.p1()).abs(),
    }
}

/// A number `0.i₁i₂…iₙ` in binary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryFraction {
    bits: Vec<bool>,
}

impl BinaryFraction {
    pub fn new(bits: Vec<bool>) -> Self {
        BinaryFraction { bits }
    }

    /// Parses the digits after the binary point, e.g. `"0101"`.
    pub fn from_digits(digits: &str) -> Option<Self> {
        digits
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn value(&self) -> BigRational {
        let numer = self
            .bits
            .iter()
            .fold(BigInt::zero(), |acc, &b| (acc << 1) + u8::from(b));
        BigRational::new(numer, BigInt::one() << self.bits.len())
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for BinaryFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        if self.bits.is_empty() {
            return write!(f, "0");
        }
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// Smallest `n` with `2^-n ≤ eta`.
pub fn digits_for(eta: f64) -> Result<usize, SamplingError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(SamplingError::BadTolerance);
    }
    let mut n = 0;
    let mut step = 1.0f64;
    while step > eta && n < MAX_DIGITS {
        step /= 2.0;
        n += 1;
    }
    Ok(n)
}

/// The first `ceil(log₂(1/eta))` binary digits of `p`, found by exact
/// comparison of `p` against dyadic rationals. The result `t` satisfies
/// `t ≤ p < t + 2^-n` and `2^-n ≤ eta`.
pub fn truncate_prob(p: &ExactScalar, eta: f64) -> Result<BinaryFraction, SamplingError> {
    let n = digits_for(eta)?;
    let one = ExactScalar::one();
    let nonneg = p.real_signum().ok_or(SamplingError::NotAProbability)? != Ordering::Less;
    if !nonneg || p.cmp_real(&one) == Some(Ordering::Greater) {
        return Err(SamplingError::NotAProbability);
    }
    let mut bits = Vec::with_capacity(n);
    let mut acc = BigRational::zero();
    let mut step = BigRational::one();
    for _ in 0..n {
        step /= BigInt::from(2);
        let candidate = &acc + &step;
        let le =
            ExactScalar::from_rational(candidate.clone()).cmp_real(p) != Some(Ordering::Greater);
        if le {
            acc = candidate;
        }
        bits.push(le);
    }
    Ok(BinaryFraction::new(bits))
}

/// Fair coins drawn from the shared counter-based stream.
#[derive(Clone, Debug)]
pub struct CoinSource {
    rng: CounterRng,
    tosses: u64,
}

impl CoinSource {
    pub fn new(seed: u64) -> Self {
        CoinSource {
            rng: CounterRng::new(seed, tags::COIN),
            tosses: 0,
        }
    }

    pub fn toss(&mut self) -> bool {
        self.tosses += 1;
        self.rng.bit()
    }

    /// Coins consumed so far.
    pub fn tosses(&self) -> u64 {
        self.tosses
    }
}

/// Returns outcome 0 with probability exactly `x`, using `x.len()` tosses.
pub fn coin_sample(x: &BinaryFraction, coins: &mut CoinSource) -> u8 {
    // Compare the tosses with x's digits most significant first; every toss
    // is drawn even after the comparison is decided.
    let mut order = Ordering::Equal;
    for &digit in x.bits() {
        let coin = coins.toss();
        if order == Ordering::Equal {
            order = coin.cmp(&digit);
        }
    }
    u8::from(order != Ordering::Less)
}

/// Samples the measured outcome of `dist` to within `eta` in distribution.
pub fn sample_outcome(
    dist: &OutcomeDistribution,
    eta: f64,
    coins: &mut CoinSource,
) -> Result<u8, SamplingError> {
    let p0 = match dist {
        OutcomeDistribution::Exact { p0, .. } => p0.clone(),
        OutcomeDistribution::Float { p0, .. } => {
            let clamped = p0.clamp(0.0, 1.0);
            let q = BigRational::from_float(clamped).ok_or(SamplingError::NotAProbability)?;
            ExactScalar::from_rational(q)
        }
    };
    let x = truncate_prob(&p0, eta)?;
    Ok(coin_sample(&x, coins))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn truncation_examples() {
        let t = truncate_prob(&s("1/3"), 2f64.powi(-10)).unwrap();
        assert_eq!(t.to_string(), "0.0101010101");
        let err = BigRational::new(1.into(), 3.into()) - t.value();
        assert!(err >= BigRational::zero() && err <= BigRational::new(1.into(), 1024.into()));

        for eta in [0.5, 0.1, 1e-6] {
            let t = truncate_prob(&s("1/2"), eta).unwrap();
            assert_eq!(t.value(), BigRational::new(1.into(), 2.into()));
            assert!(t.bits()[0]);
        }
        // √2/2 = 0.10110101000001001111…₂
        let t = truncate_prob(&ExactScalar::inv_sqrt2(), 2f64.powi(-8)).unwrap();
        assert_eq!(t.to_string(), "0.10110101");
    }

    #[test]
    fn truncation_rejects_bad_input() {
        assert_eq!(
            truncate_prob(&s("3/2"), 0.1),
            Err(SamplingError::NotAProbability)
        );
        assert_eq!(
            truncate_prob(&s("-1/2"), 0.1),
            Err(SamplingError::NotAProbability)
        );
        assert_eq!(
            truncate_prob(&s("i"), 0.1),
            Err(SamplingError::NotAProbability)
        );
        assert_eq!(
            truncate_prob(&s("1/2"), 0.0),
            Err(SamplingError::BadTolerance)
        );
    }

    #[test]
    fn coin_consumption_and_extremes() {
        let mut coins = CoinSource::new(3);
        let zero = BinaryFraction::from_digits("0000").unwrap();
        for k in 1..=100 {
            assert_eq!(coin_sample(&zero, &mut coins), 1);
            assert_eq!(coins.tosses(), 4 * k);
        }
        let half = BinaryFraction::from_digits("1").unwrap();
        let ones: u32 = (0..2000)
            .map(|_| u32::from(coin_sample(&half, &mut coins)))
            .sum();
        assert!((800..1200).contains(&ones));
    }

    #[test]
    fn distances() {
        let a = OutcomeDistribution::exact(s("1/2"));
        let b = OutcomeDistribution::exact(s("3/4"));
        assert_eq!(dist_distance(&a, &a), 0.0);
        assert_eq!(dist_distance(&a, &b), 0.5);
        let one = OutcomeDistribution::exact(s("1"));
        let zero = OutcomeDistribution::exact(s("0"));
        assert_eq!(dist_distance(&one, &zero), 2.0);
        assert_eq!(
            dist_distance(&OutcomeDistribution::float(0.5, 0.5), &b),
            0.5
        );
    }

    #[test]
    fn validity() {
        assert!(OutcomeDistribution::exact(s("1/2 - 1/4*r2")).is_valid());
        assert!(!OutcomeDistribution::exact(s("r2")).is_valid());
        assert!(OutcomeDistribution::float(0.25, 0.75).is_valid());
    }
}
