//! Constraint satisfaction for relations invariant under a generalized
//! majority-minority (GMM) operation.
//!
//! A GMM operation behaves, on every two-element subset of the domain,
//! either like a near-unanimity operation or like a Mal'tsev operation.
//! When every constraint relation of an instance is invariant under such an
//! operation, [`solver::GmmSolver`] decides the instance in polynomial time
//! by maintaining a compact representation of the solution set.

pub mod algebra;
pub mod format;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod relations;
pub mod solver;

pub use algebra::{Gmm, OperationTable, PairKind, PairTable, Value};
pub use instance::{Constraint, Instance};
pub use relations::{CompactRep, Relation, Tuple};
pub use solver::{solve, GmmSolver, SolveResult, SolveStatus, SolverConfig};
pub use format::{parse_instance, serialize_instance};
pub use generate::{gen_instance, generate, Family, GeneratorSpec};
