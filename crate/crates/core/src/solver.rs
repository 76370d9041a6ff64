//! Named minimax solvers selectable at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extremal::newton_refine;
use crate::problem::{CheckmarkInstance, MinimaxSolution};
use crate::remez::{remez_solve_from, ReferenceSet, RemezConfig};

pub trait MinimaxSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve_from(
        &self,
        inst: &CheckmarkInstance,
        cfg: &RemezConfig,
        warm: Option<&ReferenceSet>,
    ) -> Result<MinimaxSolution>;

    fn solve(&self, inst: &CheckmarkInstance, cfg: &RemezConfig) -> Result<MinimaxSolution> {
        self.solve_from(inst, cfg, None)
    }
}

/// Plain multi-point exchange.
pub struct Remez;

impl MinimaxSolver for Remez {
    fn name(&self) -> &'static str {
        "remez"
    }

    fn solve_from(
        &self,
        inst: &CheckmarkInstance,
        cfg: &RemezConfig,
        warm: Option<&ReferenceSet>,
    ) -> Result<MinimaxSolution> {
        remez_solve_from(inst, cfg, warm)
    }
}

/// Exchange followed by Newton polishing on the extremal system. Falls back
/// to the exchange result wherever Newton declines (tips, legs, stalls).
pub struct RemezNewton;

impl MinimaxSolver for RemezNewton {
    fn name(&self) -> &'static str {
        "remez-newton"
    }

    fn solve_from(
        &self,
        inst: &CheckmarkInstance,
        cfg: &RemezConfig,
        warm: Option<&ReferenceSet>,
    ) -> Result<MinimaxSolution> {
        let sol = remez_solve_from(inst, cfg, warm)?;
        match newton_refine(&sol) {
            Ok(refined) => Ok(refined),
            Err(Error::RefinementRefused { original, .. }) => Ok(*original),
            Err(Error::Configuration(_)) => Ok(sol),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn MinimaxSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry {
            solvers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, solver: Arc<dyn MinimaxSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn MinimaxSolver>> {
        self.solvers
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownSolver(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = SolverRegistry::empty();
        r.register(Arc::new(Remez));
        r.register(Arc::new(RemezNewton));
        r
    }
}
