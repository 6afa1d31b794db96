//! Finite operations on `{0, .., q-1}` and the majority/minority pair
//! classification of generalized majority-minority (GMM) operations.
//!
//! An operation of arity `k` is stored as a dense table of `q^k` values.
//! The argument tuple `(x_1, .., x_k)` is encoded in mixed radix `q` with
//! the first argument most significant, so the table lists the values in
//! lexicographic order of the arguments.

use std::fmt;

use thiserror::Error;

/// A domain element. Domains hold at most 256 values.
pub type Value = u8;

/// Largest supported domain size.
pub const MAX_DOMAIN_SIZE: usize = 1 << 8;

/// Default upper bound on `q^k` for an operation table.
pub const DEFAULT_TABLE_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operation arity must be at least 3, got {0}")]
    ArityTooSmall(usize),
    #[error("domain size must be between 1 and {MAX_DOMAIN_SIZE}, got {0}")]
    BadDomainSize(usize),
    #[error("table needs {expected} entries, got {actual}")]
    WrongTableLength { expected: usize, actual: usize },
    #[error("table entry {index} has value {value}, outside domain of size {domain_size}")]
    ValueOutOfRange {
        index: usize,
        value: usize,
        domain_size: usize,
    },
    #[error("table size {domain_size}^{arity} exceeds the cap of {cap} entries")]
    TableTooLarge {
        domain_size: usize,
        arity: usize,
        cap: usize,
    },
    #[error("expected {expected} arguments, got {actual}")]
    WrongArgCount { expected: usize, actual: usize },
    #[error("argument {value} outside domain of size {domain_size}")]
    ArgumentOutOfRange { value: usize, domain_size: usize },
    #[error("expected {expected} tuples, got {actual}")]
    WrongTupleCount { expected: usize, actual: usize },
    #[error("tuples have mismatched arities")]
    ArityMismatch,
    #[error("NotGmm({0},{1}): the pair satisfies neither the majority nor the minority identities")]
    NotGmm(Value, Value),
}

/// A `k`-ary operation on `{0, .., q-1}` stored as a dense value table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    domain_size: usize,
    arity: usize,
    values: Vec<Value>,
}

impl OperationTable {
    /// Builds a table, rejecting tables larger than [`DEFAULT_TABLE_CAP`].
    pub fn new(domain_size: usize, arity: usize, values: Vec<usize>) -> Result<Self, AlgebraError> {
        Self::with_cap(domain_size, arity, values, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(
        domain_size: usize,
        arity: usize,
        values: Vec<usize>,
        cap: usize,
    ) -> Result<Self, AlgebraError> {
        if arity < 3 {
            return Err(AlgebraError::ArityTooSmall(arity));
        }
        if domain_size == 0 || domain_size > MAX_DOMAIN_SIZE {
            return Err(AlgebraError::BadDomainSize(domain_size));
        }
        let expected = table_len(domain_size, arity, cap).ok_or(AlgebraError::TableTooLarge {
            domain_size,
            arity,
            cap,
        })?;
        if values.len() != expected {
            return Err(AlgebraError::WrongTableLength {
                expected,
                actual: values.len(),
            });
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(index, value)| {
                if value < domain_size {
                    Ok(value as Value)
                } else {
                    Err(AlgebraError::ValueOutOfRange {
                        index,
                        value,
                        domain_size,
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            domain_size,
            arity,
            values,
        })
    }

    /// Tabulates `f` over all argument tuples in lexicographic order.
    pub fn from_fn(
        domain_size: usize,
        arity: usize,
        f: impl Fn(&[Value]) -> Value,
    ) -> Result<Self, AlgebraError> {
        if domain_size == 0 || domain_size > MAX_DOMAIN_SIZE {
            return Err(AlgebraError::BadDomainSize(domain_size));
        }
        let len = table_len(domain_size, arity, DEFAULT_TABLE_CAP).ok_or(
            AlgebraError::TableTooLarge {
                domain_size,
                arity,
                cap: DEFAULT_TABLE_CAP,
            },
        )?;
        let mut args = vec![0 as Value; arity];
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(f(&args) as usize);
            // odometer, last argument fastest
            for slot in args.iter_mut().rev() {
                *slot += 1;
                if (*slot as usize) < domain_size {
                    break;
                }
                *slot = 0;
            }
        }
        Self::new(domain_size, arity, values)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The flat table in lexicographic argument order.
    pub fn values(&self) -> &[Value] {
        &self.values
    }

    /// Evaluates the operation, checking argument count and range.
    pub fn apply(&self, args: &[Value]) -> Result<Value, AlgebraError> {
        if args.len() != self.arity {
            return Err(AlgebraError::WrongArgCount {
                expected: self.arity,
                actual: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a as usize >= self.domain_size) {
            return Err(AlgebraError::ArgumentOutOfRange {
                value: bad as usize,
                domain_size: self.domain_size,
            });
        }
        Ok(self.eval(args))
    }

    /// Unchecked evaluation; `args` must have length `k` and in-range values.
    #[inline]
    pub fn eval(&self, args: &[Value]) -> Value {
        debug_assert_eq!(args.len(), self.arity);
        let index = args
            .iter()
            .fold(0usize, |acc, &a| acc * self.domain_size + a as usize);
        self.values[index]
    }

    /// Evaluates the operation on column `col` of `k` rows.
    #[inline]
    pub(crate) fn eval_column<R: AsRef<[Value]>>(&self, rows: &[R], col: usize) -> Value {
        debug_assert_eq!(rows.len(), self.arity);
        let index = rows
            .iter()
            .fold(0usize, |acc, r| acc * self.domain_size + r.as_ref()[col] as usize);
        self.values[index]
    }

    /// Applies the operation coordinatewise to `k` tuples of equal arity.
    pub fn apply_to_tuples<R: AsRef<[Value]>>(&self, tuples: &[R]) -> Result<Vec<Value>, AlgebraError> {
        if tuples.len() != self.arity {
            return Err(AlgebraError::WrongTupleCount {
                expected: self.arity,
                actual: tuples.len(),
            });
        }
        let n = tuples[0].as_ref().len();
        if tuples.iter().any(|t| t.as_ref().len() != n) {
            return Err(AlgebraError::ArityMismatch);
        }
        for t in tuples {
            if let Some(&bad) = t.as_ref().iter().find(|&&a| a as usize >= self.domain_size) {
                return Err(AlgebraError::ArgumentOutOfRange {
                    value: bad as usize,
                    domain_size: self.domain_size,
                });
            }
        }
        Ok(self.combine(tuples))
    }

    /// Unchecked coordinatewise application.
    #[inline]
    pub fn combine<R: AsRef<[Value]>>(&self, tuples: &[R]) -> Vec<Value> {
        let n = tuples[0].as_ref().len();
        (0..n).map(|col| self.eval_column(tuples, col)).collect()
    }

    /// The value of the operation on `(x, y, .., y)` with `x` at position `pos`.
    fn one_off(&self, pos: usize, x: Value, y: Value) -> Value {
        let mut args = vec![y; self.arity];
        args[pos] = x;
        self.eval(&args)
    }

    /// Whether `{a, b}` satisfies the near-unanimity identities: every
    /// argument tuple with a single dissenting `x` maps to the repeated `y`.
    fn is_majority_on(&self, a: Value, b: Value) -> bool {
        [(a, a), (a, b), (b, a), (b, b)].into_iter().all(|(x, y)| {
            (0..self.arity).all(|pos| self.one_off(pos, x, y) == y)
        })
    }

    /// Whether `{a, b}` satisfies `φ(x,y,..,y) = φ(y,..,y,x) = x`.
    fn is_minority_on(&self, a: Value, b: Value) -> bool {
        let last = self.arity - 1;
        [(a, a), (a, b), (b, a), (b, b)]
            .into_iter()
            .all(|(x, y)| self.one_off(0, x, y) == x && self.one_off(last, x, y) == x)
    }

    /// Classifies `{a, b}`. The majority identities are checked first; for
    /// `a != b` the two identity sets are mutually exclusive.
    pub fn classify_pair(&self, a: Value, b: Value) -> Result<PairKind, AlgebraError> {
        for v in [a, b] {
            if v as usize >= self.domain_size {
                return Err(AlgebraError::ArgumentOutOfRange {
                    value: v as usize,
                    domain_size: self.domain_size,
                });
            }
        }
        if a == b {
            return Ok(PairKind::Majority);
        }
        if self.is_majority_on(a, b) {
            Ok(PairKind::Majority)
        } else if self.is_minority_on(a, b) {
            Ok(PairKind::Minority)
        } else {
            Err(AlgebraError::NotGmm(a.min(b), a.max(b)))
        }
    }

    /// Classifies every unordered pair, failing on the first pair (in
    /// lexicographic order) that is neither majority nor minority.
    pub fn validate_gmm(&self) -> Result<PairTable, AlgebraError> {
        let q = self.domain_size;
        let mut kinds = vec![PairKind::Majority; q * q];
        for a in 0..q {
            for b in a + 1..q {
                let kind = self.classify_pair(a as Value, b as Value)?;
                kinds[a * q + b] = kind;
                kinds[b * q + a] = kind;
            }
        }
        Ok(PairTable {
            domain_size: q,
            kinds,
        })
    }
}

fn table_len(domain_size: usize, arity: usize, cap: usize) -> Option<usize> {
    let len = domain_size.checked_pow(arity.try_into().ok()?)?;
    (len <= cap).then_some(len)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    Majority,
    Minority,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKind::Majority => f.write_str("Majority"),
            PairKind::Minority => f.write_str("Minority"),
        }
    }
}

/// The kind of every pair of domain elements, stored as a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    domain_size: usize,
    kinds: Vec<PairKind>,
}

impl PairTable {
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    #[inline]
    pub fn kind(&self, a: Value, b: Value) -> PairKind {
        self.kinds[a as usize * self.domain_size + b as usize]
    }

    #[inline]
    pub fn is_minority(&self, a: Value, b: Value) -> bool {
        self.kind(a, b) == PairKind::Minority
    }

    /// Ordered pairs `(a, b)`, `a != b`, forming a minority pair, in
    /// lexicographic order.
    pub fn minority_pairs(&self) -> impl Iterator<Item = (Value, Value)> + '_ {
        let q = self.domain_size;
        (0..q).flat_map(move |a| {
            (0..q)
                .filter(move |&b| self.kinds[a * q + b] == PairKind::Minority)
                .map(move |b| (a as Value, b as Value))
        })
    }

    /// Unordered pairs `a <= b` with their kinds, in lexicographic order.
    pub fn unordered(&self) -> impl Iterator<Item = (Value, Value, PairKind)> + '_ {
        let q = self.domain_size;
        (0..q).flat_map(move |a| (a..q).map(move |b| (a as Value, b as Value, self.kinds[a * q + b])))
    }
}

/// A validated GMM operation together with its pair classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gmm {
    op: OperationTable,
    pairs: PairTable,
}

impl Gmm {
    pub fn new(op: OperationTable) -> Result<Self, AlgebraError> {
        let pairs = op.validate_gmm()?;
        Ok(Self { op, pairs })
    }

    pub fn op(&self) -> &OperationTable {
        &self.op
    }

    pub fn pairs(&self) -> &PairTable {
        &self.pairs
    }

    pub fn arity(&self) -> usize {
        self.op.arity
    }

    pub fn domain_size(&self) -> usize {
        self.op.domain_size
    }

    pub fn into_parts(self) -> (OperationTable, PairTable) {
        (self.op, self.pairs)
    }
}

/// Built-in operations used by the generators and tests.
pub mod builtin {
    use super::{OperationTable, Value};

    /// Ternary Boolean majority.
    pub fn maj3() -> OperationTable {
        OperationTable::from_fn(2, 3, |a| (a[0] & a[1]) | (a[0] & a[2]) | (a[1] & a[2]))
            .expect("valid table")
    }

    /// Ternary Boolean minority, `x ⊕ y ⊕ z`.
    pub fn xor3() -> OperationTable {
        OperationTable::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2]).expect("valid table")
    }

    /// Ternary Boolean conjunction. Not a GMM operation.
    pub fn and3() -> OperationTable {
        OperationTable::from_fn(2, 3, |a| a[0] & a[1] & a[2]).expect("valid table")
    }

    /// Ternary operation on `{0, 1, 2}`: XOR on `{0, 1}`, otherwise the
    /// repeated value if there is one, otherwise the first argument.
    pub fn mixed3() -> OperationTable {
        OperationTable::from_fn(3, 3, mixed3_value).expect("valid table")
    }

    fn mixed3_value(a: &[Value]) -> Value {
        if a.iter().all(|&v| v < 2) {
            a[0] ^ a[1] ^ a[2]
        } else if a[0] == a[1] || a[0] == a[2] {
            a[0]
        } else if a[1] == a[2] {
            a[1]
        } else {
            a[0]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::builtin::*;
    use super::*;

    #[test]
    fn builds_boolean_tables_in_lexicographic_order() {
        let maj = OperationTable::new(2, 3, vec![0, 0, 0, 1, 0, 1, 1, 1]).unwrap();
        assert_eq!(maj, maj3());
        let xor = OperationTable::new(2, 3, vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        assert_eq!(xor, xor3());
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(
            OperationTable::new(2, 3, vec![0, 0, 0]),
            Err(AlgebraError::WrongTableLength {
                expected: 8,
                actual: 3
            })
        );
        assert_eq!(
            OperationTable::new(2, 2, vec![0, 0, 0, 1]),
            Err(AlgebraError::ArityTooSmall(2))
        );
        assert!(matches!(
            OperationTable::new(2, 3, vec![0, 0, 0, 2, 0, 0, 0, 1]),
            Err(AlgebraError::ValueOutOfRange { index: 3, value: 2, .. })
        ));
        assert!(matches!(
            OperationTable::with_cap(4, 3, vec![0; 64], 63),
            Err(AlgebraError::TableTooLarge { .. })
        ));
    }

    #[test]
    fn applies_by_lookup() {
        assert_eq!(maj3().apply(&[0, 1, 1]), Ok(1));
        assert_eq!(xor3().apply(&[1, 1, 0]), Ok(0));
        assert_eq!(
            xor3().apply(&[1, 1]),
            Err(AlgebraError::WrongArgCount {
                expected: 3,
                actual: 2
            })
        );
        for op in [maj3(), xor3(), mixed3()] {
            for y in 0..op.domain_size() as Value {
                assert_eq!(op.apply(&[y, y, y]), Ok(y));
            }
        }
    }

    #[test]
    fn classifies_pairs() {
        assert_eq!(xor3().classify_pair(0, 1), Ok(PairKind::Minority));
        assert_eq!(maj3().classify_pair(0, 1), Ok(PairKind::Majority));
        assert_eq!(and3().classify_pair(1, 1), Ok(PairKind::Majority));
        assert_eq!(and3().classify_pair(1, 0), Err(AlgebraError::NotGmm(0, 1)));
    }

    #[test]
    fn validates_builtin_operations() {
        let maj = maj3().validate_gmm().unwrap();
        assert!(maj.unordered().all(|(_, _, k)| k == PairKind::Majority));

        let xor = xor3().validate_gmm().unwrap();
        assert_eq!(xor.kind(0, 1), PairKind::Minority);
        assert_eq!(xor.kind(1, 0), PairKind::Minority);
        assert_eq!(xor.kind(0, 0), PairKind::Majority);
        assert_eq!(xor.kind(1, 1), PairKind::Majority);

        let mixed = mixed3().validate_gmm().unwrap();
        assert_eq!(mixed.kind(0, 1), PairKind::Minority);
        assert_eq!(mixed.kind(0, 2), PairKind::Majority);
        assert_eq!(mixed.kind(1, 2), PairKind::Majority);
        assert_eq!(mixed.minority_pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);

        assert_eq!(and3().validate_gmm(), Err(AlgebraError::NotGmm(0, 1)));
    }

    #[test]
    fn applies_coordinatewise() {
        assert_eq!(maj3().apply_to_tuples(&[[0, 0], [0, 1], [1, 1]]), Ok(vec![0, 1]));
        assert_eq!(xor3().apply_to_tuples(&[[0, 1], [1, 1], [1, 0]]), Ok(vec![0, 0]));
        let t = [1u8, 0, 2];
        assert_eq!(mixed3().apply_to_tuples(&[t, t, t]), Ok(t.to_vec()));
        assert_eq!(
            xor3().apply_to_tuples(&[vec![0u8], vec![1, 1], vec![0]]),
            Err(AlgebraError::ArityMismatch)
        );
        assert!(matches!(
            xor3().apply_to_tuples(&[[0u8], [1]]),
            Err(AlgebraError::WrongTupleCount { .. })
        ));
    }
}
