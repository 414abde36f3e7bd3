//! Abstract numeration systems and the constructive theory of regular,
//! automatic and synchronized sequences over exact semirings.
//!
//! The crate is organized in layers:
//!
//! * [`semiring`]: exact scalar and matrix arithmetic over ℕ, ℕ∞, ℤ,
//!   ℤ/mℤ, 𝔹 and ℚ;
//! * [`automata`]: DFAs and NFAs over tuple alphabets, with the Boolean
//!   algebra, tape projections and word counting;
//! * [`numeration`]: abstract numeration systems with radix-order ranking
//!   and unranking, multidimensional padded systems and enumerations of
//!   ℕ^d;
//! * [`series`]: formal series through linear representations and
//!   weighted automata;
//! * [`regular`]: regular sequences, their kernels and closure
//!   properties;
//! * [`automatic`]: automatic sequences as DFAOs;
//! * [`logic`]: a compiler from first-order formulas over recognizable
//!   predicates to automata;
//! * [`counting`]: counting projections of recognizable sets, factor
//!   complexity and the recurrence function;
//! * [`synchronized`]: synchronized relations and sequences, and their
//!   composition with recognizable series;
//! * [`format`]: the textual interchange format used by the CLI.

pub mod automata;
pub mod automatic;
pub mod counting;
pub mod error;
pub mod format;
pub mod logic;
mod linalg;
pub mod numeration;
pub mod regular;
pub mod semiring;
pub mod series;
pub mod synchronized;

pub use error::{Error, Result};

/// State budget used by closure searches, overridable through the
/// `ANSKIT_BUDGET` environment variable.
pub fn default_budget() -> usize {
    std::env::var("ANSKIT_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(100_000)
}
