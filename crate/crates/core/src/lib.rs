//! Quantum values of multiqubit correlation Bell inequalities, anticommuting
//! operator partitions, and the monogamy relations they certify.

pub mod bell;
pub mod cli;
pub mod error;
pub mod monogamy;
pub mod pauli;
pub mod qstate;
pub mod scenarios;
mod search;

pub use error::{Error, Result};
