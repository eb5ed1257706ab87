//! Strong-subadditivity gap of tripartite quantum states and its relation to
//! bipartite quantum correlations.
//!
//! * [`qmat`]: states, partial traces, eigendecomposition, sampling, state files
//! * [`entropy`]: von Neumann entropy, mutual information, the SSA gap, Holevo quantity
//! * [`purify`]: canonical purification and the `B → BE`, `C → CE` extensions
//! * [`qcorr`]: discord, entanglement of formation, Koashi–Winter gap, correlation audits
//! * [`structure`]: builder and certifier for SSA-saturating states
//! * [`examples`]: the two-block worked example, its closed form and parameter sweeps
//!
//! Entropies are in bits throughout.

pub mod error;
pub mod examples;
pub mod entropy;
pub mod purify;
pub mod qcorr;
pub mod qmat;
pub mod structure;

pub use error::{Error, Result};
