//! Seeded random streams and chunked batch generation.
//!
//! Streams are Xoshiro256++ substreams of the master seed: the purpose selects
//! a block via `long_jump` (2^192 draws apart) and the stream index selects a
//! substream within it via `jump` (2^128 draws apart), so streams never
//! overlap. A batch of `n` draws is cut into chunks of [`CHUNK_SIZE`] items;
//! chunk `i` owns stream `i`, so the concatenated output never depends on how
//! many workers ran the chunks.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

pub type StreamRng = Xoshiro256PlusPlus;

/// Items per chunk. Part of the reproducibility contract: changing it changes
/// every seeded output.
pub const CHUNK_SIZE: usize = 1024;

/// Stream namespaces, so that different consumers of one master seed never
/// share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Roots = 1,
    Pairs = 2,
    Permutation = 3,
    Probe = 4,
    Assignment = 5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    fn block(self, purpose: Purpose) -> StreamRng {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(self.0);
        for _ in 0..purpose as u64 {
            rng.long_jump();
        }
        rng
    }

    /// RNG for stream `index` within `purpose`. Costs `index` jumps.
    pub fn stream(self, purpose: Purpose, index: u64) -> StreamRng {
        let mut rng = self.block(purpose);
        for _ in 0..index {
            rng.jump();
        }
        rng
    }

    /// Streams `0..count` of `purpose`, in order.
    pub fn streams(self, purpose: Purpose, count: usize) -> Vec<StreamRng> {
        let mut rng = self.block(purpose);
        (0..count)
            .map(|_| {
                let s = rng.clone();
                rng.jump();
                s
            })
            .collect()
    }
}

/// Runs `n` draws of `draw` in fixed chunks on the current rayon pool and
/// returns them in chunk order.
///
/// `init` builds per-chunk scratch state (traversal stacks and the like).
pub fn chunked<T, S, I, F>(seed: Seed, purpose: Purpose, n: usize, init: I, draw: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut StreamRng) -> T + Sync,
{
    let streams = seed.streams(purpose, n.div_ceil(CHUNK_SIZE));
    let chunks: Vec<Vec<T>> = streams
        .into_par_iter()
        .enumerate()
        .map(|(c, mut rng)| {
            let mut scratch = init();
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut scratch, &mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
