//! Seeded random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by the master seed. Substreams
//! select a distinct 64-bit stream id, so the draws of one run never depend
//! on how many draws another run consumed or on which thread executed it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const GRID_BITS: u32 = 24;
const RUN_BITS: u32 = 24;
const AGENT_BITS: u32 = 15;

/// Which consumer of a run a substream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Exploration and tie-breaking draws of the agent.
    Agent,
    /// Prediction or opponent draws of the environment.
    Environment,
}

/// Coordinates of a substream within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubstreamKey {
    pub grid: usize,
    pub run: usize,
    pub agent: usize,
}

impl SubstreamKey {
    pub fn new(grid: usize, run: usize, agent: usize) -> Self {
        SubstreamKey { grid, run, agent }
    }

    /// Rejects keys whose components do not fit in the stream id.
    pub fn validate(&self) -> Result<()> {
        let fits = |v: usize, bits: u32| (v as u64) < (1u64 << bits);
        if fits(self.grid, GRID_BITS) && fits(self.run, RUN_BITS) && fits(self.agent, AGENT_BITS) {
            Ok(())
        } else {
            Err(Error::config(format!(
                "substream index out of range: grid < 2^{GRID_BITS}, run < 2^{RUN_BITS}, agent < 2^{AGENT_BITS}"
            )))
        }
    }

    fn stream_id(&self, role: StreamRole) -> u64 {
        let role_bit = match role {
            StreamRole::Agent => 0,
            StreamRole::Environment => 1,
        };
        ((self.grid as u64) << (RUN_BITS + AGENT_BITS + 1))
            | ((self.run as u64) << (AGENT_BITS + 1))
            | ((self.agent as u64) << 1)
            | role_bit
    }
}

#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn substream(seed: u64, key: SubstreamKey, role: StreamRole) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(key.stream_id(role));
        RngStream(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
