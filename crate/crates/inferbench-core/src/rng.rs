//! Seeded sample selection and the issued-sequence digest.
//!
//! Reproducibility across implementations requires that every random
//! choice be pinned to a published algorithm, so this module spells all
//! of them out:
//!
//! * **Generator.** SplitMix64. State `x` is the seed verbatim; each call
//!   performs `x += 0x9E3779B97F4A7C15` and returns
//!   `mix(x)` where `mix(z)` is
//!   `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
//!   `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`,
//!   `z ^ (z >> 31)` (all arithmetic mod 2^64).
//! * **Bounded draw.** A raw output `r` is reduced to `[0, n)` by the
//!   multiply-shift reduction `(r * n) >> 64` in 128-bit arithmetic.
//! * **Selection without replacement** (`count <= dataset_size`): partial
//!   Fisher-Yates over `[0, n)` — for `i` in `0..count`, swap element `i`
//!   with element `i + draw(n - i)` — returning the first `count` slots.
//! * **Selection with replacement** (`count > dataset_size`): a plain
//!   stream of bounded draws.
//! * **Performance query stream.** Performance mode first selects a
//!   subset of `performance_sample_count` distinct indices (selection
//!   without replacement, seeded with the run seed), then issues queries
//!   by drawing subset positions with replacement from a second SplitMix64
//!   stream whose seed is the *first output* of SplitMix64 seeded with the
//!   run seed. The stream is unbounded so a run can extend until its
//!   minimum-duration rule is satisfied.
//! * **Digest.** The issued sample-index sequence is hashed with FNV-1a
//!   (64-bit, offset basis `0xcbf29ce484222325`, prime `0x100000001b3`),
//!   each index contributing its eight little-endian bytes.

use alloc::vec::Vec;

use thiserror::Error;

use crate::benchmark::Mode;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("data set is empty")]
    EmptyDataset,
    #[error("requested sample count is zero")]
    ZeroCount,
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Multiply-shift reduction of the next output into `[0, n)`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }
}

/// Deterministic sample-index selection.
///
/// Identical `(seed, dataset_size, count)` always yields an identical
/// sequence. `count <= dataset_size` gives a seeded shuffle prefix
/// (distinct indices); `count > dataset_size` draws uniformly with
/// replacement.
pub fn select_samples(seed: u64, dataset_size: usize, count: usize) -> Result<Vec<usize>, SampleError> {
    if dataset_size == 0 {
        return Err(SampleError::EmptyDataset);
    }
    if count == 0 {
        return Err(SampleError::ZeroCount);
    }
    let mut rng = SplitMix64::new(seed);
    if count <= dataset_size {
        let mut arr: Vec<usize> = (0..dataset_size).collect();
        for i in 0..count {
            let j = i + rng.next_below((dataset_size - i) as u64) as usize;
            arr.swap(i, j);
        }
        arr.truncate(count);
        Ok(arr)
    } else {
        Ok((0..count)
            .map(|_| rng.next_below(dataset_size as u64) as usize)
            .collect())
    }
}

/// FNV-1a (64-bit) over the little-endian bytes of each index.
pub fn sequence_digest(indices: &[usize]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &idx in indices {
        for byte in (idx as u64).to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    hash
}

/// Formats a digest the way it appears in logs and reports.
pub fn format_digest(digest: u64) -> alloc::string::String {
    alloc::format!("{digest:016x}")
}

/// The deterministic issue order for one run.
///
/// Accuracy mode visits the entire data set exactly once, in the order of
/// the seeded full shuffle. Performance mode draws from the seeded subset
/// as described in the module docs, and is infinite.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    mode: Mode,
    dataset_size: usize,
    /// Accuracy: the full permutation. Performance: the subset.
    base: Vec<usize>,
    position_seed: u64,
}

impl SamplePlan {
    pub fn new(
        mode: Mode,
        seed: u64,
        dataset_size: usize,
        performance_sample_count: u64,
    ) -> Result<Self, SampleError> {
        if dataset_size == 0 {
            return Err(SampleError::EmptyDataset);
        }
        let base = match mode {
            Mode::Accuracy => select_samples(seed, dataset_size, dataset_size)?,
            Mode::Performance => {
                let subset = (performance_sample_count as usize).min(dataset_size).max(1);
                select_samples(seed, dataset_size, subset)?
            }
        };
        let position_seed = SplitMix64::new(seed).next_u64();
        Ok(SamplePlan {
            mode,
            dataset_size,
            base,
            position_seed,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dataset_size(&self) -> usize {
        self.dataset_size
    }

    /// Distinct indices this plan can issue (the load set).
    pub fn loadable_indices(&self) -> &[usize] {
        &self.base
    }

    /// Number of queries in a complete accuracy pass; `None` when the plan
    /// is an unbounded performance stream.
    pub fn fixed_len(&self) -> Option<usize> {
        match self.mode {
            Mode::Accuracy => Some(self.base.len()),
            Mode::Performance => None,
        }
    }

    pub fn iter(&self) -> PlanIter<'_> {
        PlanIter {
            plan: self,
            next: 0,
            positions: SplitMix64::new(self.position_seed),
        }
    }

    /// The first `len` issued indices; used by the audit checker to
    /// regenerate a logged run's sequence from its seed.
    pub fn sequence(&self, len: usize) -> Vec<usize> {
        self.iter().take(len).collect()
    }
}

pub struct PlanIter<'a> {
    plan: &'a SamplePlan,
    next: usize,
    positions: SplitMix64,
}

impl Iterator for PlanIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self.plan.mode {
            Mode::Accuracy => {
                let idx = self.plan.base.get(self.next).copied();
                self.next += 1;
                idx
            }
            Mode::Performance => {
                let pos = self.positions.next_below(self.plan.base.len() as u64) as usize;
                Some(self.plan.base[pos])
            }
        }
    }
}
