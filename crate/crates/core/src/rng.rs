//! Seeded, splittable random streams.
//!
//! A stream is a ChaCha8 generator keyed by a master seed and selected by a
//! stream index, so `(seed, index)` names the same sequence on every run and
//! on every thread.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

/// The stream numbered `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// An independent child stream keyed from the parent's next output.
pub fn fork<R: RngCore + ?Sized>(parent: &mut R) -> Stream {
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}

/// Per-trial seed: the first eight bytes of SHA-256 over the three indices.
pub fn trial_seed(master: u64, cell: u64, trial: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(cell.to_le_bytes());
    hasher.update(trial.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Lowercase hex SHA-256 of `data`, truncated to `chars` characters.
pub fn hex_digest(data: &[u8], chars: usize) -> String {
    let digest = Sha256::digest(data);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        out.push_str(&format!("{b:02x}"));
    }
    out.truncate(chars);
    out
}
