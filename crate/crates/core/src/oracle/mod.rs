//! Brute-force reference: the discrete minimax problem on a dense grid,
//! posed as a linear program and solved with a self-contained simplex.

mod discrete;
mod simplex;

pub use discrete::{discrete_minimax, oracle_grid, OracleSolution};
pub use simplex::{simplex_solve, LpSolution, LpTableau};
