//! Seeded ±1 step streams and integer partial-sum walks.
//!
//! Every `(master_seed, replication, level)` triple owns its own ChaCha8
//! keystream: the key is derived from `(master_seed, replication)` and the
//! level selects the stream id. A level can be extended lazily without
//! disturbing any other level, and two streams never share a keystream.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies one replication of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replication: u64,
}

const KEY_TAG: &[u8; 16] = b"nestedwalk/steps";

impl SeedSpec {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        Self {
            master_seed,
            replication,
        }
    }

    /// Step stream for row `level` of the step matrix.
    pub fn stream(&self, level: u32) -> StepStream {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.replication.to_le_bytes());
        key[16..].copy_from_slice(KEY_TAG);
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(u64::from(level));
        StepStream {
            rng,
            level,
            word: 0,
            bits_left: 0,
            drawn: 0,
        }
    }
}

/// Sequential reader over one row of fair ±1 steps.
#[derive(Debug, Clone)]
pub struct StepStream {
    rng: ChaCha8Rng,
    level: u32,
    word: u64,
    bits_left: u32,
    drawn: usize,
}

impl StepStream {
    #[inline]
    pub fn next_step(&mut self) -> i8 {
        if self.bits_left == 0 {
            self.word = self.rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.word & 1;
        self.word >>= 1;
        self.bits_left -= 1;
        self.drawn += 1;
        if bit == 1 {
            1
        } else {
            -1
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of steps handed out so far.
    pub fn drawn(&self) -> usize {
        self.drawn
    }
}

impl Iterator for StepStream {
    type Item = i8;

    fn next(&mut self) -> Option<i8> {
        Some(self.next_step())
    }
}

/// The increments `X_m(1), X_m(2), ...` of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSequence {
    level: u32,
    steps: Vec<i8>,
}

impl StepSequence {
    pub fn new(level: u32) -> Self {
        Self {
            level,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(level: u32, steps: Vec<i8>) -> Result<Self> {
        if let Some(pos) = steps.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::Domain(format!(
                "step {} has value {}, expected ±1",
                pos + 1,
                steps[pos]
            )));
        }
        Ok(Self { level, steps })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends `count` steps drawn from `stream`.
    pub fn extend_from(&mut self, stream: &mut StepStream, count: usize) {
        self.steps.reserve(count);
        self.steps.extend(stream.take(count));
    }
}

/// Reproducible prefix of row `level` for `seed`.
pub fn sample_steps(seed: SeedSpec, level: u32, count: usize) -> StepSequence {
    let mut seq = StepSequence::new(level);
    seq.extend_from(&mut seed.stream(level), count);
    seq
}

/// Integer walk `S(0) = 0, S(n) = S(n-1) + X(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    level: u32,
    values: Vec<i64>,
}

impl WalkPath {
    pub fn new(level: u32) -> Self {
        Self {
            level,
            values: vec![0],
        }
    }

    pub fn from_steps(level: u32, steps: &[i8]) -> Self {
        let mut path = Self::new(level);
        path.values.reserve(steps.len());
        for &s in steps {
            path.push_step(s);
        }
        path
    }

    pub fn from_values(level: u32, values: Vec<i64>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::Domain("walk must start at 0".into()));
        }
        if let Some(n) = values.windows(2).position(|w| (w[1] - w[0]).abs() != 1) {
            return Err(Error::Domain(format!(
                "increment at step {} is not ±1",
                n + 1
            )));
        }
        Ok(Self { level, values })
    }

    #[inline]
    pub fn push_step(&mut self, step: i8) {
        debug_assert!(step == 1 || step == -1);
        let last = *self.values.last().expect("walk always holds S(0)");
        self.values.push(last + i64::from(step));
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `S(n)`.
    #[inline]
    pub fn value(&self, n: usize) -> i64 {
        self.values[n]
    }

    pub fn get(&self, n: usize) -> Option<i64> {
        self.values.get(n).copied()
    }

    /// `X(n) = S(n) - S(n-1)` for `n >= 1`.
    #[inline]
    pub fn step(&self, n: usize) -> i8 {
        (self.values[n] - self.values[n - 1]) as i8
    }

    /// Number of steps, i.e. the largest valid time index.
    pub fn len_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn steps(&self) -> impl Iterator<Item = i8> + '_ {
        self.values.windows(2).map(|w| (w[1] - w[0]) as i8)
    }

    /// Smallest and largest visited site.
    pub fn range(&self) -> (i64, i64) {
        let min = *self.values.iter().min().expect("nonempty");
        let max = *self.values.iter().max().expect("nonempty");
        (min, max)
    }

    pub fn truncated(&self, steps: usize) -> Self {
        let n = steps.min(self.len_steps());
        Self {
            level: self.level,
            values: self.values[..=n].to_vec(),
        }
    }
}

pub fn partial_sums(steps: &StepSequence) -> WalkPath {
    WalkPath::from_steps(steps.level(), steps.steps())
}
