//! Quantum correlations: discord, entanglement of formation, the Koashi–Winter
//! gap and the correlation audits built on them.

pub mod eof;
pub mod kw;
pub mod measure;
pub mod optim;

pub use eof::{concurrence, eof, eof_convex_roof, eof_two_qubit, EofMethod, EofResult};
pub use kw::{conservation_check, discord_via_kw, kw_gap, theorem1_audit, KWReport, Theorem1Audit};
pub use measure::{classical_correlation_at, discord, DiscordResult, MeasurementBasis};
pub use optim::OptimizerConfig;
