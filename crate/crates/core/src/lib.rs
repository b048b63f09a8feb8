//! Simulation kernels for five layers of quantum nonclassicality, each
//! reduced to a toy operational theory small enough to verify by brute
//! force at desk scale:
//!
//! 1. [`gpt`] — incompatibility: the two-measurement gbit state space,
//!    preparation-by-measurement, and the nonsimpliciality witness.
//! 2. [`kcbs`] — contextuality: the five-observable cyclic theory, the
//!    KCBS inequality, and exhaustive search over value assignments.
//! 3. [`toybit`] — entanglement without nonlocality: an epistemically
//!    restricted four-state toy bit supporting exact teleportation.
//! 4. [`boxes`] — nonlocality: bipartite behaviors, CHSH evaluation, and
//!    exact local-polytope membership by two independent oracles.
//! 5. [`boson`] — indistinguishability: matrix permanents (naive and
//!    Ryser) and exact boson-sampling output distributions.
//!
//! [`protocols`] runs the two key-distribution protocols (BB84-style and
//! KCBS-style, both executed locally in time rather than space) under
//! honest operation and the adversary models they are meant to resist;
//! [`security`] holds the information-theoretic calculus that fixes the
//! tolerable-error threshold.
//!
//! Everything is deterministic given a seed: see [`rng`] for the
//! stream-splitting convention that keeps multi-round simulations
//! reproducible round by round.

pub mod boson;
pub mod boxes;
pub mod error;
pub mod gpt;
pub mod kcbs;
pub mod protocols;
pub mod rng;
pub mod security;
pub mod toybit;

pub use error::{Error, Result};
