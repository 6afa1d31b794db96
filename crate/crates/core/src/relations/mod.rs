//! Tuples, explicit relations, projections, signatures and closure under an
//! operation.
//!
//! Coordinate indices in the public API are 1-based.

mod representation;
mod signature;

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{ControlFlow, Deref};

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::algebra::{OperationTable, Value};

pub use representation::{check_representation, compress, extend_product, full_space_rep, CompactRep};
pub use signature::{signature_of, witnesses, Signature, SignatureEntry, WitnessedSignature};

/// Default tuple budget for closure computations.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("coordinate index {index} out of range for arity {arity} (indices are 1-based)")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("tuple of arity {actual} does not fit relation of arity {expected}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("closure exceeded the budget of {cap} tuples")]
    SizeCapExceeded { cap: usize },
    #[error("candidate representation is not a subset of the relation")]
    NotASubset,
}

/// A tuple of domain elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tuple(Vec<Value>);

impl Tuple {
    pub fn new(coords: Vec<Value>) -> Self {
        Tuple(coords)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Value> {
        self.0
    }

    /// Projection onto 1-based `indices`; repeats and any order allowed.
    pub fn project(&self, indices: &[usize]) -> Result<Tuple, RelationError> {
        check_indices(indices, self.arity())?;
        Ok(Tuple(indices.iter().map(|&i| self.0[i - 1]).collect()))
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &[Value]) -> Tuple {
        let mut coords = Vec::with_capacity(self.0.len() + other.len());
        coords.extend_from_slice(&self.0);
        coords.extend_from_slice(other);
        Tuple(coords)
    }
}

impl Deref for Tuple {
    type Target = [Value];

    fn deref(&self) -> &[Value] {
        &self.0
    }
}

impl AsRef<[Value]> for Tuple {
    fn as_ref(&self) -> &[Value] {
        &self.0
    }
}

impl Borrow<[Value]> for Tuple {
    fn borrow(&self) -> &[Value] {
        &self.0
    }
}

impl From<Vec<Value>> for Tuple {
    fn from(v: Vec<Value>) -> Self {
        Tuple(v)
    }
}

impl From<&[Value]> for Tuple {
    fn from(v: &[Value]) -> Self {
        Tuple(v.to_vec())
    }
}

impl<const N: usize> From<[Value; N]> for Tuple {
    fn from(v: [Value; N]) -> Self {
        Tuple(v.to_vec())
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Projection of `t` onto 1-based `indices`.
pub fn project_tuple(t: &Tuple, indices: &[usize]) -> Result<Tuple, RelationError> {
    t.project(indices)
}

pub(crate) fn check_indices(indices: &[usize], arity: usize) -> Result<(), RelationError> {
    match indices.iter().find(|&&i| i == 0 || i > arity) {
        Some(&index) => Err(RelationError::IndexOutOfRange { index, arity }),
        None => Ok(()),
    }
}

/// 1-based indices to 0-based columns.
pub(crate) fn to_columns(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&i| i - 1).collect()
}

/// Writes `t` restricted to 0-based `cols` into `out`.
#[inline]
pub(crate) fn gather(t: &[Value], cols: &[usize], out: &mut Vec<Value>) {
    out.clear();
    out.extend(cols.iter().map(|&c| t[c]));
}

/// A finite relation: a duplicate-free set of tuples of one arity, iterated
/// in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// All of `A^arity` for `A = {0, .., domain_size-1}`.
    pub fn full(arity: usize, domain_size: usize) -> Self {
        let mut rel = Relation::empty(arity);
        if domain_size == 0 {
            return rel;
        }
        let mut cur = vec![0 as Value; arity];
        loop {
            rel.tuples.insert(Tuple(cur.clone()));
            let mut pos = arity;
            loop {
                if pos == 0 {
                    return rel;
                }
                pos -= 1;
                cur[pos] += 1;
                if (cur[pos] as usize) < domain_size {
                    break;
                }
                cur[pos] = 0;
            }
        }
    }

    pub fn from_tuples<I, T>(arity: usize, tuples: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = T>,
        T: Into<Tuple>,
    {
        let mut rel = Relation::empty(arity);
        for t in tuples {
            rel.insert(t.into())?;
        }
        Ok(rel)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Inserts `t`; returns whether it was new.
    pub fn insert(&mut self, t: Tuple) -> Result<bool, RelationError> {
        if t.arity() != self.arity {
            return Err(RelationError::ArityMismatch {
                expected: self.arity,
                actual: t.arity(),
            });
        }
        Ok(self.tuples.insert(t))
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Tuple> + DoubleEndedIterator + Clone {
        self.tuples.iter()
    }

    pub fn first(&self) -> Option<&Tuple> {
        self.tuples.first()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    /// Projection onto 1-based `indices`.
    pub fn project(&self, indices: &[usize]) -> Result<Relation, RelationError> {
        check_indices(indices, self.arity)?;
        let cols = to_columns(indices);
        let mut buf = Vec::with_capacity(cols.len());
        let mut out = Relation::empty(cols.len());
        for t in &self.tuples {
            gather(t, &cols, &mut buf);
            if !out.tuples.contains(buf.as_slice()) {
                out.tuples.insert(Tuple(buf.clone()));
            }
        }
        Ok(out)
    }

    /// Largest value occurring in any tuple.
    pub fn max_value(&self) -> Option<Value> {
        self.tuples.iter().flat_map(|t| t.iter().copied()).max()
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation/{} ", self.arity)?;
        f.debug_set().entries(self.tuples.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a Relation {
    type Item = &'a Tuple;
    type IntoIter = std::collections::btree_set::Iter<'a, Tuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.tuples.iter()
    }
}

/// `{ pr_indices t : t in r }`.
pub fn project_relation(r: &Relation, indices: &[usize]) -> Result<Relation, RelationError> {
    r.project(indices)
}

/// Calls `f` once for every `k`-combination (with repetition, order
/// significant) of indices below `end` that uses at least one index in
/// `start..end`. Stops early when `f` breaks.
pub(crate) fn for_each_new_combination<B>(
    k: usize,
    start: usize,
    end: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if start >= end {
        return ControlFlow::Continue(());
    }
    let mut combo = vec![0usize; k];
    // `first` is the position of the first index drawn from the frontier;
    // earlier positions range over old indices, later ones over all.
    for first in 0..k {
        if first > 0 && start == 0 {
            break;
        }
        let lo = |p: usize| if p == first { start } else { 0 };
        let hi = |p: usize| if p < first { start } else { end };
        for (p, slot) in combo.iter_mut().enumerate() {
            *slot = lo(p);
        }
        'odometer: loop {
            f(&combo)?;
            for p in (0..k).rev() {
                combo[p] += 1;
                if combo[p] < hi(p) {
                    continue 'odometer;
                }
                combo[p] = lo(p);
            }
            break;
        }
    }
    ControlFlow::Continue(())
}

/// Whether applying `op` coordinatewise to any `k` tuples of `r` stays in `r`.
pub fn is_invariant(r: &Relation, op: &OperationTable) -> bool {
    let tuples: Vec<&Tuple> = r.iter().collect();
    let mut rows: Vec<&Tuple> = Vec::with_capacity(op.arity());
    let mut image = vec![0 as Value; r.arity()];
    for_each_new_combination(op.arity(), 0, tuples.len(), |combo| {
        rows.clear();
        rows.extend(combo.iter().map(|&i| tuples[i]));
        for (col, slot) in image.iter_mut().enumerate() {
            *slot = op.eval_column(&rows, col);
        }
        if r.contains(&image) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    })
    .is_continue()
}

/// The smallest relation containing `r` and invariant under `op`, with the
/// default budget.
pub fn closure(r: &Relation, op: &OperationTable) -> Result<Relation, RelationError> {
    closure_with_cap(r, op, DEFAULT_CLOSURE_CAP)
}

/// Closure by frontier saturation: each round combines only tuples that
/// include at least one tuple discovered in the previous round.
pub fn closure_with_cap(
    r: &Relation,
    op: &OperationTable,
    cap: usize,
) -> Result<Relation, RelationError> {
    if r.len() > cap {
        return Err(RelationError::SizeCapExceeded { cap });
    }
    let k = op.arity();
    let mut items: Vec<Vec<Value>> = r.iter().map(|t| t.0.clone()).collect();
    let mut seen: FxHashSet<Vec<Value>> = items.iter().cloned().collect();
    let mut start = 0;
    let mut image = vec![0 as Value; r.arity()];
    let mut rows: Vec<usize> = Vec::with_capacity(k);
    while start < items.len() {
        let end = items.len();
        let mut fresh = Vec::new();
        let flow = for_each_new_combination(k, start, end, |combo| {
            rows.clear();
            rows.extend_from_slice(combo);
            for (col, slot) in image.iter_mut().enumerate() {
                let idx = rows
                    .iter()
                    .fold(0usize, |acc, &t| acc * op.domain_size() + items[t][col] as usize);
                *slot = op.values()[idx];
            }
            if !seen.contains(image.as_slice()) {
                seen.insert(image.clone());
                fresh.push(image.clone());
                if seen.len() > cap {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return Err(RelationError::SizeCapExceeded { cap });
        }
        start = end;
        items.extend(fresh);
    }
    Ok(Relation {
        arity: r.arity(),
        tuples: items.into_iter().map(Tuple).collect(),
    })
}
