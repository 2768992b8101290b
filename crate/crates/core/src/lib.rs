//! Strong shift equivalence of nonnegative integer matrices and the
//! elementary conjugacies between vertex shifts that realise it.

pub mod cayley;
pub mod cli;
pub mod code;
pub mod complex;
pub mod degenerate;
pub mod edge;
pub mod error;
pub mod freudenthal;
pub mod gsft;
pub mod matrix;
pub mod random;
pub mod refinement;
pub mod shift;
pub mod williams;

pub use error::{Error, Result};
