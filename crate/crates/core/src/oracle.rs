//! Brute-force ground truth: enumerate every assignment.
//!
//! Shares nothing with the solver beyond the tuple and relation containers
//! and [`Instance::verify_assignment`].

use thiserror::Error;

use crate::algebra::Value;
use crate::instance::{Instance, InstanceError};
use crate::relations::{Relation, Tuple, DEFAULT_CLOSURE_CAP};
use crate::solver::{SolveResult, SolveStats, SolveStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{domain_size}^{num_vars} assignments exceed the budget of {budget}")]
    BudgetExceeded {
        domain_size: usize,
        num_vars: usize,
        budget: usize,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_assignments: usize,
    pub max_closure_tuples: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_assignments: 1 << 20,
            max_closure_tuples: DEFAULT_CLOSURE_CAP,
        }
    }
}

fn check_budget(instance: &Instance, budget: &OracleBudget) -> Result<(), OracleError> {
    let over = u32::try_from(instance.num_vars())
        .ok()
        .and_then(|n| instance.domain_size().checked_pow(n))
        .is_none_or(|total| total > budget.max_assignments);
    if over {
        return Err(OracleError::BudgetExceeded {
            domain_size: instance.domain_size(),
            num_vars: instance.num_vars(),
            budget: budget.max_assignments,
        });
    }
    Ok(())
}

/// All assignments in lexicographic order.
fn assignments(instance: &Instance) -> impl Iterator<Item = Tuple> {
    let n = instance.num_vars();
    let q = instance.domain_size();
    let mut cur = Some(vec![0 as Value; n]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = cur.as_mut().unwrap();
        let mut pos = n;
        loop {
            if pos == 0 {
                cur = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if (next[pos] as usize) < q {
                break;
            }
            next[pos] = 0;
        }
        Some(Tuple::new(out))
    })
}

pub fn verify_assignment(instance: &Instance, t: &Tuple) -> Result<bool, OracleError> {
    Ok(instance.verify_assignment(t)?)
}

/// Sat with the lexicographically least solution, or Unsat.
pub fn brute_force_solve(instance: &Instance, budget: &OracleBudget) -> Result<SolveResult, OracleError> {
    check_budget(instance, budget)?;
    let witness = assignments(instance).find(|t| {
        instance
            .constraints()
            .iter()
            .all(|c| c.is_satisfied_by(t))
    });
    Ok(SolveResult {
        status: if witness.is_some() {
            SolveStatus::Sat
        } else {
            SolveStatus::Unsat
        },
        witness,
        stats: SolveStats::default(),
    })
}

/// The full solution relation.
pub fn enumerate_solutions(instance: &Instance, budget: &OracleBudget) -> Result<Relation, OracleError> {
    check_budget(instance, budget)?;
    let sols = assignments(instance).filter(|t| {
        instance
            .constraints()
            .iter()
            .all(|c| c.is_satisfied_by(t))
    });
    Ok(Relation::from_tuples(instance.num_vars(), sols).expect("assignments have arity n"))
}
