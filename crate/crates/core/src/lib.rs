//! Simulation, verification and attack toolkit for a bit-oriented quantum
//! public-key encryption scheme.
//!
//! Private keys are triples of coin-tossed Boolean functions; each public
//! key pairs a classical tag `(s1, s2, s3)` with the state
//! `Y^{k3} H^{k2} (|0⟩ + |k1⟩)/√2` where `k_i = F_i(s_i)`. Encrypting a 1
//! applies `Y^{⊗n}`; decrypting removes the dressing and reads the relative
//! phase of the two branches.
//!
//! The protocol runs exactly at any size on [`qsim::TwoBranchState`]; the
//! dense engine in [`qsim`] backs the numerical security checks in
//! [`verify`] and the adversaries in [`attacks`].

pub mod attacks;
pub mod bits;
pub mod boolfunc;
mod error;
pub mod py12;
pub mod qsim;
pub mod registry;
pub mod scheme;
pub mod verify;

pub use bits::{BitVec, Gf2Solution, Gf2System};
pub use boolfunc::{BooleanFunction, Monomial};
pub use error::{Error, Result};
pub use py12::{py12_decrypt, py12_encrypt, py12_issue, Py12Key};
pub use registry::{DirRegistry, MemoryRegistry, Registry};
pub use scheme::{
    decrypt, decrypt_dense, encrypt, issue_public_key, Ciphertext, KeyId, KeyTriple, PrepMethod, PrivateKey, PublicKey, Tag,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for independent trial `stream` under a run-wide `seed`. Trials
/// drawn this way give the same results however they are scheduled.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
