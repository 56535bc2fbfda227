//! Counter-based reproducible random number streams.
//!
//! Every Monte Carlo routine in this crate derives an independent ChaCha8
//! substream from a `(seed, stream)` pair instead of sharing one sequential
//! generator. Work items can then be scheduled in any order — serially or on
//! a rayon pool of any width — and still consume bit-identical randomness.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// An independent generator for stream index `stream` under master `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream index for replicate `rep` of grid point `grid_idx`. Packs the two
/// coordinates so distinct `(grid_idx, rep)` pairs never collide for
/// `rep < 2^32`.
pub fn grid_stream(grid_idx: usize, rep: u64) -> u64 {
    ((grid_idx as u64) << 32) | (rep & 0xffff_ffff)
}
