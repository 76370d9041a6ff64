//! Best uniform polynomial approximation of the checkmark function
//! `f(x; a) = |x - a|` on `[-1, 1]`, and tools to study how the minimax error
//! `E_n(a)` and the alternation set move with `a`.

pub mod analysis;
pub mod error;
pub mod extremal;
pub mod oracle;
pub mod phases;
pub mod poly;
pub mod problem;
pub mod remez;
pub mod solver;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{Basis, Polynomial};
pub use problem::{checkmark_eval, g_eval, CheckmarkInstance, MinimaxSolution, MAX_DEGREE};
pub use remez::{remez_solve, RemezConfig};
pub use solver::{MinimaxSolver, SolverRegistry};
