use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifies the random numbers of one replicate: a master seed and a
/// stream id (the replicate index). Each walker of the replicate draws from
/// its own lane. Output is a pure function of `(master, stream, lane)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(master: u64, stream: u64) -> Self {
        RngStream { master, stream }
    }

    /// Generator for lane `lane` (walker, sampler, ...) of this stream.
    pub fn lane(&self, lane: u64) -> ChaCha8Rng {
        let key = self.master ^ lane.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(self.stream);
        rng
    }
}

/// Lanes used by the collision engines.
pub const LANE_X: u64 = 0;
pub const LANE_Y: u64 = 1;
pub const LANE_W: u64 = 2;
/// Lane for sampling a random environment (cluster, tree, ...).
pub const LANE_ENV: u64 = 7;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn lanes_and_streams_differ_and_repeat() {
        let s = RngStream::new(42, 3);
        let a: u64 = s.lane(0).random();
        assert_eq!(a, s.lane(0).random::<u64>());
        assert_ne!(a, s.lane(1).random::<u64>());
        assert_ne!(a, RngStream::new(42, 4).lane(0).random::<u64>());
        assert_ne!(a, RngStream::new(43, 3).lane(0).random::<u64>());
    }
}
