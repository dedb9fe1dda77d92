//! Symbolic differential algebra on the infinite jet space.
//!
//! Systems of PDEs are stored as orderly solvable equations `u^i_α + g`,
//! reduced by substituting prolonged tails, and completed to passive form by
//! reducing the cross-derivative differences of every pair of equations
//! whose leading terms share an unknown. Passive systems can be turned into
//! truncated Taylor solutions from parametric data.

pub mod error;
pub mod expr;
pub mod jet;
pub mod passivity;
pub mod ranking;
pub mod reduce;
pub mod series;
pub mod syzygy;
pub mod system_file;

pub use error::{Error, Result};
pub use expr::{Atom, Expr, Names, ZeroTestConfig, ZeroVerdict};
pub use jet::{JetVar, MultiIndex};
pub use ranking::Ranking;
pub use reduce::{DiffSystem, Equation};
