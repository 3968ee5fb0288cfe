//! Keyed random streams.
//!
//! Every random stream is identified by `(master_seed, replica, role)`. The key is packed
//! verbatim into a ChaCha8 seed, so distinct keys give distinct streams and the stream a
//! replica sees does not depend on how replicas are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Dynamics,
    Initial,
    Noise,
    Coupling,
    Walk,
    Sampling,
    Custom(u32),
}

impl Role {
    pub fn code(self) -> u64 {
        match self {
            Role::Dynamics => 1,
            Role::Initial => 2,
            Role::Noise => 3,
            Role::Coupling => 4,
            Role::Walk => 5,
            Role::Sampling => 6,
            Role::Custom(n) => (1u64 << 32) | n as u64,
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        Some(match name {
            "dynamics" => Role::Dynamics,
            "initial" => Role::Initial,
            "noise" => Role::Noise,
            "coupling" => Role::Coupling,
            "walk" => Role::Walk,
            "sampling" => Role::Sampling,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: u64,
    pub replica: u64,
    pub role: u64,
}

pub fn seed_stream(master: u64, replica: u64, role: Role) -> StreamKey {
    StreamKey { master, replica, role: role.code() }
}

impl StreamKey {
    pub fn seed_bytes(&self) -> [u8; 32] {
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&self.replica.to_le_bytes());
        seed[16..24].copy_from_slice(&self.role.to_le_bytes());
        seed
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.seed_bytes())
    }
}

/// Shorthand for `seed_stream(master, replica, role).rng()`.
pub fn stream(master: u64, replica: u64, role: Role) -> StreamRng {
    seed_stream(master, replica, role).rng()
}
