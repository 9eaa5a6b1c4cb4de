//! Seed plumbing. Every stochastic routine takes a `u64` seed; independent
//! streams are derived by mixing a stream label into the parent seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finaliser over `seed ^ label`.
pub fn derive(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream labels are ASCII tags, far from the small integers used as
/// per-item indices, so `derive(s, LABEL)` never meets `derive(s, i)`.
pub(crate) mod stream {
    pub const LAYOUT: u64 = 0x00006c61796f7574; // layout
    pub const EDGES: u64 = 0x0000006564676573; // edges
    pub const VOTES: u64 = 0x000000766f746573; // votes
    pub const TIES: u64 = 0x0000000074696573; // ties
    pub const QUERIES: u64 = 0x0071756572696573; // queries
    pub const CLUSTERING: u64 = 0x636c757374657269; // clustering
    pub const PURIFY: u64 = 0x0000707572696679; // purify
    pub const RANKING: u64 = 0x0072616e6b696e67; // ranking
    pub const ANSWERS: u64 = 0x00616e7377657273; // answers
    pub const SPLIT: u64 = 0x00000073706c6974; // split
    pub const FIND: u64 = 0x0000000066696e64; // find
    pub const MERGE: u64 = 0x0000006d65726765; // merge
    pub const TRIANGLES: u64 = 0x747269616e676c65; // triangles
}
