//! Exact Clifford algebras of (possibly degenerate) quadratic modules over
//! commutative rings: distinguished subalgebras, orthogonal maps, Clifford
//! and paravector Clifford groups, and a replayable check harness that
//! exercises the underlying algebraic identities over small rings.

pub mod error;
pub mod ring;
pub mod linalg;
pub mod quadratic;
pub mod clifford;
pub mod subalgebra;
pub mod orthogonal;
pub mod groups;
pub mod harness;
pub mod parse;

pub use error::{Error, Result};
