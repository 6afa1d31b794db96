//! Seeded random instance families.
//!
//! Each instance flips a coin to decide whether to plant a hidden
//! assignment that every constraint accepts, so roughly half of the
//! generated instances are satisfiable by construction and the rest are
//! unconstrained random draws.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::builtin::{maj3, mixed3, xor3};
use crate::algebra::{OperationTable, Value};
use crate::instance::{Constraint, Instance};
use crate::relations::{closure, Relation, Tuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("unknown family {0:?}, expected affine2, twosat or mixed3")]
    UnknownFamily(String),
    #[error("instances need at least one variable")]
    NoVariables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Parity equations over 2 or 3 variables, under `xor3`.
    Affine2,
    /// Binary clauses, under `maj3`.
    Twosat,
    /// Closures of random seed tuples over `{0, 1, 2}`, under `mixed3`.
    Mixed3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Affine2, Family::Twosat, Family::Mixed3];

    pub fn operation(self) -> OperationTable {
        match self {
            Family::Affine2 => xor3(),
            Family::Twosat => maj3(),
            Family::Mixed3 => mixed3(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Affine2 => "affine2",
            Family::Twosat => "twosat",
            Family::Mixed3 => "mixed3",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenerateError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub num_vars: usize,
    pub num_constraints: usize,
    pub seed: u64,
}

/// Distinct variables where possible; repeats only when `n < len`.
fn random_scope(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<usize> {
    if len <= n {
        sample(rng, n, len).into_iter().map(|v| v + 1).collect()
    } else {
        (0..len).map(|_| rng.gen_range(1..=n)).collect()
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, len: usize, q: usize) -> Vec<Value> {
    (0..len).map(|_| rng.gen_range(0..q) as Value).collect()
}

fn project(hidden: &[Value], scope: &[usize]) -> Vec<Value> {
    scope.iter().map(|&v| hidden[v - 1]).collect()
}

fn parity(rng: &mut ChaCha8Rng, n: usize, hidden: Option<&[Value]>) -> Constraint {
    let len = rng.gen_range(2..=3);
    let scope = random_scope(rng, n, len);
    let rhs = match hidden {
        Some(h) => project(h, &scope).iter().fold(0, |a, &b| a ^ b),
        None => rng.gen_range(0..2),
    };
    let relation = Relation::from_tuples(
        scope.len(),
        Relation::full(scope.len(), 2)
            .iter()
            .filter(|t| t.iter().fold(0, |a, &b| a ^ b) == rhs)
            .cloned(),
    )
    .expect("arity matches");
    Constraint::new(scope, relation)
}

fn clause(rng: &mut ChaCha8Rng, n: usize, hidden: Option<&[Value]>) -> Constraint {
    let scope = random_scope(rng, n, 2);
    let mut excluded = random_tuple(rng, 2, 2);
    if let Some(h) = hidden {
        let keep = project(h, &scope);
        while excluded == keep {
            excluded = random_tuple(rng, 2, 2);
        }
    }
    let relation = Relation::from_tuples(
        2,
        Relation::full(2, 2).iter().filter(|t| t.as_slice() != excluded).cloned(),
    )
    .expect("arity matches");
    Constraint::new(scope, relation)
}

fn closed_seeds(rng: &mut ChaCha8Rng, n: usize, hidden: Option<&[Value]>, op: &OperationTable) -> Constraint {
    let arity = rng.gen_range(1..=3.min(n));
    let scope = random_scope(rng, n, arity);
    let mut seeds: Vec<Tuple> = (0..rng.gen_range(1..=3))
        .map(|_| Tuple::new(random_tuple(rng, arity, 3)))
        .collect();
    if let Some(h) = hidden {
        seeds[0] = Tuple::new(project(h, &scope));
    }
    let seeds = Relation::from_tuples(arity, seeds).expect("arity matches");
    let relation = closure(&seeds, op).expect("closure of at most 27 tuples");
    Constraint::new(scope, relation)
}

/// A generated instance, with the planted assignment if there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub op: OperationTable,
    pub instance: Instance,
    pub planted: Option<Tuple>,
}

/// Deterministic in `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated, GenerateError> {
    let n = spec.num_vars;
    if n == 0 {
        return Err(GenerateError::NoVariables);
    }
    let op = spec.family.operation();
    let q = op.domain_size();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let planted = rng.gen_bool(0.5).then(|| random_tuple(&mut rng, n, q));
    let hidden = planted.as_deref();
    let constraints = (0..spec.num_constraints)
        .map(|_| match spec.family {
            Family::Affine2 => parity(&mut rng, n, hidden),
            Family::Twosat => clause(&mut rng, n, hidden),
            Family::Mixed3 => closed_seeds(&mut rng, n, hidden, &op),
        })
        .collect();
    let instance = Instance::new(n, q, constraints).expect("generated scopes and values are in range");
    Ok(Generated {
        op,
        instance,
        planted: planted.map(Tuple::new),
    })
}

pub fn gen_instance(spec: &GeneratorSpec) -> Result<(OperationTable, Instance), GenerateError> {
    let g = generate(spec)?;
    Ok((g.op, g.instance))
}
