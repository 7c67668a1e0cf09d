//! Counter-based deterministic PRNG shared by circuit generators, the AP
//! census, and the coin source.
//!
//! Update rule (reproducible across implementations):
//!
//! ```text
//! key      = mix64(seed ^ tag)
//! output_k = mix64(key + (k + 1) * 0x9E3779B97F4A7C15)   (wrapping)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer
//! `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`
//! and `k` counts draws from zero. `split(tag)` derives an independent
//! stream keyed by `mix64(key ^ tag)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain tags; distinct uses of one seed never share a stream.
pub mod tags {
    pub const CIRCUIT: u64 = 0x6369_7263_7569_7431;
    pub const CENSUS: u64 = 0x6365_6e73_7573_0001;
    pub const COIN: u64 = 0x636f_696e_0000_0001;
    pub const PERTURB: u64 = 0x7065_7274_7572_6201;
}

pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, tag: u64) -> Self {
        CounterRng {
            key: mix64(seed ^ tag),
            counter: 0,
        }
    }

    /// Independent child stream.
    pub fn split(&self, tag: u64) -> Self {
        CounterRng {
            key: mix64(self.key ^ tag),
            counter: 0,
        }
    }

    /// Number of 64-bit words drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, n)` by rejection sampling; `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    pub fn bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
