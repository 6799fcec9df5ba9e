//! Delayed two-input Boolean tasks and seeded input streams.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolFn {
    And,
    Or,
    Xor,
}

impl BoolFn {
    pub const ALL: [BoolFn; 3] = [BoolFn::And, BoolFn::Or, BoolFn::Xor];

    pub fn apply(self, a: u8, b: u8) -> u8 {
        let (a, b) = (a != 0, b != 0);
        let out = match self {
            BoolFn::And => a && b,
            BoolFn::Or => a || b,
            BoolFn::Xor => a != b,
        };
        out as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            BoolFn::And => "AND",
            BoolFn::Or => "OR",
            BoolFn::Xor => "XOR",
        }
    }

    pub fn parse(s: &str) -> Option<BoolFn> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AND" => Some(BoolFn::And),
            "OR" => Some(BoolFn::Or),
            "XOR" => Some(BoolFn::Xor),
            _ => None,
        }
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `f(u_k, u_{k−delay})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskSpec {
    pub function: BoolFn,
    pub delay: usize,
}

impl TaskSpec {
    pub fn new(function: BoolFn, delay: usize) -> Self {
        Self { function, delay }
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(u_k, u_k-{})", self.function, self.delay)
    }
}

pub fn target(task: TaskSpec, current: u8, delayed: u8) -> u8 {
    task.function.apply(current, delayed)
}

/// Target for every step of `bits`, or `None` where the delayed bit does not
/// exist or the step falls inside the first `warmup` steps.
pub fn build_targets(bits: &[u8], task: TaskSpec, warmup: usize) -> Vec<Option<u8>> {
    bits.iter()
        .enumerate()
        .map(|(k, &u)| {
            (k >= task.delay && k >= warmup).then(|| target(task, u, bits[k - task.delay]))
        })
        .collect()
}

/// `n` i.i.d. fair bits from a ChaCha8 stream seeded with `seed`.
pub fn generate_bits(n: usize, seed: u64) -> Result<Vec<u8>> {
    if n == 0 {
        return Err(Error::Empty("bit sequence"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.gen::<bool>() as u8).collect())
}

/// Seed for an independent sub-stream of `master`, one per `stream` index.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}
