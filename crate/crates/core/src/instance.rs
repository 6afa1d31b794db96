use thiserror::Error;

use crate::algebra::Value;
use crate::relations::{Relation, Tuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("constraint {constraint}: scope index {index} out of range for {num_vars} variables")]
    ScopeOutOfRange {
        constraint: usize,
        index: usize,
        num_vars: usize,
    },
    #[error("constraint {constraint}: relation arity {relation} does not match scope length {scope}")]
    ArityMismatch {
        constraint: usize,
        scope: usize,
        relation: usize,
    },
    #[error("constraint {constraint}: value {value} outside domain of size {domain_size}")]
    ValueOutOfRange {
        constraint: usize,
        value: Value,
        domain_size: usize,
    },
    #[error("constraint {0} has an empty scope")]
    EmptyScope(usize),
    #[error("instance needs at least one variable")]
    NoVariables,
    #[error("assignment has {actual} values, instance has {expected} variables")]
    AssignmentArity { expected: usize, actual: usize },
}

/// A constraint: a scope of 1-based variable indices (repeats allowed) and
/// a relation of matching arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub relation: Relation,
}

impl Constraint {
    pub fn new(scope: Vec<usize>, relation: Relation) -> Self {
        Constraint { scope, relation }
    }

    /// Whether the assignment `t` (one value per variable) satisfies this
    /// constraint. `t` must cover every variable in the scope.
    pub fn is_satisfied_by(&self, t: &[Value]) -> bool {
        let image: Vec<Value> = self.scope.iter().map(|&v| t[v - 1]).collect();
        self.relation.contains(&image)
    }
}

/// A CSP instance over variables `1..=num_vars` and domain
/// `{0, .., domain_size-1}`, with an ordered list of constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    num_vars: usize,
    domain_size: usize,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(
        num_vars: usize,
        domain_size: usize,
        constraints: Vec<Constraint>,
    ) -> Result<Self, InstanceError> {
        if num_vars == 0 {
            return Err(InstanceError::NoVariables);
        }
        for (l, c) in constraints.iter().enumerate() {
            let constraint = l + 1;
            if c.scope.is_empty() {
                return Err(InstanceError::EmptyScope(constraint));
            }
            if let Some(&index) = c.scope.iter().find(|&&i| i == 0 || i > num_vars) {
                return Err(InstanceError::ScopeOutOfRange {
                    constraint,
                    index,
                    num_vars,
                });
            }
            if c.relation.arity() != c.scope.len() {
                return Err(InstanceError::ArityMismatch {
                    constraint,
                    scope: c.scope.len(),
                    relation: c.relation.arity(),
                });
            }
            if let Some(value) = c.relation.max_value().filter(|&v| v as usize >= domain_size) {
                return Err(InstanceError::ValueOutOfRange {
                    constraint,
                    value,
                    domain_size,
                });
            }
        }
        Ok(Instance {
            num_vars,
            domain_size,
            constraints,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// The instance made of the first `l` constraints.
    pub fn prefix(&self, l: usize) -> Instance {
        Instance {
            num_vars: self.num_vars,
            domain_size: self.domain_size,
            constraints: self.constraints[..l.min(self.constraints.len())].to_vec(),
        }
    }

    /// Whether `t` satisfies every constraint.
    pub fn verify_assignment(&self, t: &Tuple) -> Result<bool, InstanceError> {
        if t.arity() != self.num_vars {
            return Err(InstanceError::AssignmentArity {
                expected: self.num_vars,
                actual: t.arity(),
            });
        }
        Ok(self.constraints.iter().all(|c| c.is_satisfied_by(t)))
    }
}
