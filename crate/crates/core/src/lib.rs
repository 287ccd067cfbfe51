//! Simultaneous construction of the Burrows-Wheeler transform and the
//! longest-common-prefix array of a string collection.
//!
//! The [`engine`] builds both arrays column by column, keeping only a handful
//! of per-sequence arrays in memory and streaming partial results through
//! segment files managed by [`segio`]. The [`oracle`] module is a naive
//! in-memory reference used for verification.

pub mod cli;
pub mod engine;
pub mod error;
pub mod model;
pub mod oracle;
pub mod segio;

pub use engine::{build, BwtLcp, EngineConfig, RunSummary};
pub use error::{Error, Result};
pub use model::{validate_collection, Alphabet, GsaEntry, LcpValue, SequenceCollection, SymbolCode};
