//! Polynomial-time solving of CSP instances whose constraint relations are
//! invariant under a fixed GMM operation.
//!
//! The solver keeps a compact representation of order `k - 1` of the set of
//! solutions of the constraints applied so far. It starts from a
//! representation of the full space `A^n` and restricts it one constraint
//! at a time with [`GmmSolver::next`]. The instance is satisfiable iff the
//! final representation is nonempty, and any of its tuples is a solution.
//!
//! Coordinate indices in the public API are 1-based.

mod procedures;
mod projection;

use std::cell::Cell;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::{AlgebraError, Gmm, OperationTable, Value};
use crate::instance::InstanceError;
pub use crate::instance::{Constraint, Instance};
use crate::relations::{
    check_indices, closure_with_cap, full_space_rep, is_invariant, to_columns, CompactRep, Relation,
    RelationError, Tuple, DEFAULT_CLOSURE_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("malformed instance: {0}")]
    MalformedInstance(#[from] InstanceError),
    #[error("instance domain size {instance} differs from operation domain size {op}")]
    DomainMismatch { instance: usize, op: usize },
    #[error("relation of constraint {0} is not invariant under the operation")]
    ConstraintNotInvariant(usize),
    #[error("relation arity {relation} does not match {indices} indices")]
    TargetArity { indices: usize, relation: usize },
    #[error("prefix of length {prefix} is longer than arity {arity}")]
    PrefixTooLong { prefix: usize, arity: usize },
    #[error("witness {0:?} fails verification")]
    WitnessRejected(Tuple),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
}

/// Per-constraint representation sizes and timings of a run.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// `rep_sizes[l]` is the size of the representation after `l`
    /// constraints; index 0 is the initial full-space representation.
    pub rep_sizes: Vec<usize>,
    pub timings: Vec<Duration>,
    /// Representations (including intermediate ones) that exceeded the
    /// compactness bound.
    pub compactness_violations: usize,
    /// Largest representation seen at any step.
    pub max_rep_size: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witness: Option<Tuple>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == SolveStatus::Sat
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Budget on the number of points in any single saturation.
    pub closure_cap: usize,
    /// Check every constraint relation for invariance before solving.
    pub validate_constraints: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            closure_cap: DEFAULT_CLOSURE_CAP,
            validate_constraints: true,
        }
    }
}

/// The solution set of the first `applied` constraints, as a compact
/// representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverState {
    pub rep: CompactRep,
    pub applied: usize,
}

/// `2 n q^2 + sum_{j <= k-1} C(n, j) q^j`, saturating.
pub fn compactness_bound(n: usize, q: usize, k: usize) -> u128 {
    let (n, q) = (n as u128, q as u128);
    let mut total = 2u128.saturating_mul(n).saturating_mul(q.saturating_mul(q));
    let mut binom: u128 = 1;
    let mut qpow: u128 = 1;
    for j in 0..k as u128 {
        if j > n {
            break;
        }
        if j > 0 {
            binom = binom.saturating_mul(n - j + 1) / j;
            qpow = qpow.saturating_mul(q);
        }
        total = total.saturating_add(binom.saturating_mul(qpow));
    }
    total
}

/// Runs the procedures for one validated GMM operation.
pub struct GmmSolver<'g> {
    gmm: &'g Gmm,
    config: SolverConfig,
    violations: Cell<usize>,
    max_rep: Cell<usize>,
}

impl<'g> GmmSolver<'g> {
    pub fn new(gmm: &'g Gmm) -> Self {
        Self::with_config(gmm, SolverConfig::default())
    }

    pub fn with_config(gmm: &'g Gmm, config: SolverConfig) -> Self {
        GmmSolver {
            gmm,
            config,
            violations: Cell::new(0),
            max_rep: Cell::new(0),
        }
    }

    pub fn gmm(&self) -> &Gmm {
        self.gmm
    }

    /// Number of representations seen so far that broke the compactness
    /// bound.
    pub fn compactness_violations(&self) -> usize {
        self.violations.get()
    }

    pub fn max_rep_size(&self) -> usize {
        self.max_rep.get()
    }

    fn note_rep(&self, rep: &Relation) {
        let bound = compactness_bound(rep.arity(), self.gmm.domain_size(), self.gmm.arity());
        if rep.len() as u128 > bound {
            self.violations.set(self.violations.get() + 1);
        }
        self.max_rep.set(self.max_rep.get().max(rep.len()));
    }

    fn order(&self) -> usize {
        self.gmm.arity() - 1
    }

    fn check_target(&self, rep: &CompactRep, indices: &[usize], s: &Relation) -> Result<(), SolveError> {
        check_indices(indices, rep.arity())?;
        if s.arity() != indices.len() {
            return Err(SolveError::TargetArity {
                indices: indices.len(),
                relation: s.arity(),
            });
        }
        Ok(())
    }

    /// Some tuple `t` of `<rep>` with `pr_indices t` in `s`, or `None` if
    /// there is none.
    pub fn nonempty(
        &self,
        rep: &CompactRep,
        indices: &[usize],
        s: &Relation,
    ) -> Result<Option<Tuple>, SolveError> {
        self.check_target(rep, indices, s)?;
        self.nonempty_cols(rep.rep(), &to_columns(indices), |p| s.contains(p))
    }

    /// Compact representation of `{ t in <rep> : t_1 = prefix_1, .., t_m = prefix_m }`.
    pub fn fix_values(&self, rep: &CompactRep, prefix: &[Value]) -> Result<CompactRep, SolveError> {
        if prefix.len() > rep.arity() {
            return Err(SolveError::PrefixTooLong {
                prefix: prefix.len(),
                arity: rep.arity(),
            });
        }
        let out = self.fix_values_rel(rep.rep(), prefix)?;
        Ok(CompactRep::new(out, self.order()))
    }

    /// Compact representation of `{ t in <rep> : pr_indices t in s }`,
    /// handling all of `indices` at once.
    pub fn next_beta(
        &self,
        rep: &CompactRep,
        indices: &[usize],
        s: &Relation,
    ) -> Result<CompactRep, SolveError> {
        self.check_target(rep, indices, s)?;
        let out = self.next_beta_rel(rep.rep(), &to_columns(indices), s)?;
        self.note_rep(&out);
        Ok(CompactRep::new(out, self.order()))
    }

    /// Compact representation of `{ t in <rep> : pr_indices t in s }`,
    /// adding the scope one index at a time.
    pub fn next(
        &self,
        rep: &CompactRep,
        indices: &[usize],
        s: &Relation,
    ) -> Result<CompactRep, SolveError> {
        self.check_target(rep, indices, s)?;
        let out = self.next_rel(rep.rep(), &to_columns(indices), s)?;
        Ok(CompactRep::new(out, self.order()))
    }

    /// The state before any constraint: a representation of `A^n`.
    pub fn initial_state(&self, num_vars: usize) -> SolverState {
        let rep = full_space_rep(num_vars, self.gmm.op(), self.gmm.pairs());
        self.note_rep(rep.rep());
        SolverState { rep, applied: 0 }
    }

    /// Applies one constraint.
    pub fn apply(&self, state: &SolverState, constraint: &Constraint) -> Result<SolverState, SolveError> {
        let rep = if state.rep.is_empty() {
            state.rep.clone()
        } else {
            self.next(&state.rep, &constraint.scope, &constraint.relation)?
        };
        Ok(SolverState {
            rep,
            applied: state.applied + 1,
        })
    }

    /// The solution set represented by `state`, materialized by closure.
    pub fn explicit_solution_relation(&self, state: &SolverState) -> Result<Relation, SolveError> {
        Ok(closure_with_cap(state.rep.rep(), self.gmm.op(), self.config.closure_cap)?)
    }

    /// Checks the instance against the operation, including (when enabled)
    /// the invariance of every constraint relation.
    pub fn validate(&self, instance: &Instance) -> Result<(), SolveError> {
        if instance.domain_size() != self.gmm.domain_size() {
            return Err(SolveError::DomainMismatch {
                instance: instance.domain_size(),
                op: self.gmm.domain_size(),
            });
        }
        if self.config.validate_constraints {
            for (l, c) in instance.constraints().iter().enumerate() {
                if !is_invariant(&c.relation, self.gmm.op()) {
                    return Err(SolveError::ConstraintNotInvariant(l + 1));
                }
            }
        }
        Ok(())
    }

    /// Decides the instance, recording every intermediate state through
    /// `observe`.
    pub fn solve_observed(
        &self,
        instance: &Instance,
        mut observe: impl FnMut(&SolverState),
    ) -> Result<SolveResult, SolveError> {
        self.validate(instance)?;
        let mut stats = SolveStats::default();
        let started = Instant::now();
        let mut state = self.initial_state(instance.num_vars());
        stats.rep_sizes.push(state.rep.len());
        stats.timings.push(started.elapsed());
        observe(&state);
        for c in instance.constraints() {
            if state.rep.is_empty() {
                break;
            }
            let started = Instant::now();
            state = self.apply(&state, c)?;
            stats.rep_sizes.push(state.rep.len());
            stats.timings.push(started.elapsed());
            observe(&state);
        }
        stats.compactness_violations = self.compactness_violations();
        stats.max_rep_size = self.max_rep_size();
        let Some(witness) = state.rep.rep().first().cloned() else {
            return Ok(SolveResult {
                status: SolveStatus::Unsat,
                witness: None,
                stats,
            });
        };
        if !instance.verify_assignment(&witness)? {
            return Err(SolveError::WitnessRejected(witness));
        }
        Ok(SolveResult {
            status: SolveStatus::Sat,
            witness: Some(witness),
            stats,
        })
    }

    pub fn solve(&self, instance: &Instance) -> Result<SolveResult, SolveError> {
        self.solve_observed(instance, |_| {})
    }
}

/// Validates `op` as a GMM operation and decides `instance` with the
/// default configuration.
pub fn solve(instance: &Instance, op: &OperationTable) -> Result<SolveResult, SolveError> {
    let gmm = Gmm::new(op.clone())?;
    GmmSolver::new(&gmm).solve(instance)
}
