//! The shuffle and draw contract shared by dataset synthesis and training.
//!
//! Everything here is fixed bit-for-bit so that datasets built in another
//! language from the same seed come out identical:
//!
//! * draws are SplitMix64 outputs,
//! * a bounded draw in `[0, n)` rejects outputs at or above the largest
//!   multiple of `n` that fits in 2^64, then reduces modulo `n`,
//! * a shuffle is Fisher–Yates running `i` from `len - 1` down to `1`,
//!   swapping `i` with a bounded draw in `[0, i]`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw in `[0, n)`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "bounded draw over an empty range");
        // 2^64 mod n
        let rem = (u64::MAX % n).wrapping_add(1) % n;
        let max_accepted = u64::MAX - rem;
        loop {
            let x = self.next();
            if x <= max_accepted {
                return x % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One SplitMix64 step from `x`.
pub fn splitmix64(x: u64) -> u64 {
    SplitMix64::new(x).next()
}

/// 64-bit FNV-1a over the UTF-8 bytes of `name`.
pub fn stable_hash(name: &str) -> u64 {
    name.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3))
}

/// Per-stream seed: `splitmix64(seed ^ fnv1a(name))`.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    splitmix64(seed ^ stable_hash(name))
}
