//! Representations: subsets of a relation that keep its signature and all
//! of its projections onto at most `j` coordinates.

use itertools::Itertools;
use rustc_hash::FxHashSet;

use super::{gather, signature_of, Relation, RelationError, Tuple};
use crate::algebra::{OperationTable, PairTable, Value};

/// A subset of some relation `R` that is a representation of `R` of the
/// given order. The solver always works with order `k - 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompactRep {
    rep: Relation,
    order: usize,
}

impl CompactRep {
    pub fn new(rep: Relation, order: usize) -> Self {
        CompactRep { rep, order }
    }

    pub fn empty(arity: usize, order: usize) -> Self {
        CompactRep::new(Relation::empty(arity), order)
    }

    pub fn rep(&self) -> &Relation {
        &self.rep
    }

    pub fn into_relation(self) -> Relation {
        self.rep
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arity(&self) -> usize {
        self.rep.arity()
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }
}

impl std::fmt::Debug for CompactRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CompactRep(order {}) {:?}", self.order, self.rep)
    }
}

/// All sorted 0-based index sets of size at most `j` over `n` coordinates,
/// by increasing size.
pub(crate) fn small_index_sets(n: usize, j: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=j.min(n)).flat_map(move |size| (0..n).combinations(size))
}

/// Whether `candidate` is a representation of `r` of order `j`: same
/// signature, and the same projection onto every set of at most `j`
/// coordinates.
pub fn check_representation(
    candidate: &Relation,
    r: &Relation,
    j: usize,
    pairs: &PairTable,
) -> Result<bool, RelationError> {
    if !candidate.is_subset(r) {
        return Err(RelationError::NotASubset);
    }
    if signature_of(candidate, pairs).signature() != signature_of(r, pairs).signature() {
        return Ok(false);
    }
    for cols in small_index_sets(r.arity(), j) {
        let indices: Vec<usize> = cols.iter().map(|c| c + 1).collect();
        if candidate.project(&indices)? != r.project(&indices)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds a compact representation of `r` of order `j`: the least witnessing
/// pair of each signature entry, plus the least preimage of every tuple of
/// every projection onto at most `j` coordinates.
pub fn compress(r: &Relation, j: usize, pairs: &PairTable) -> CompactRep {
    let mut rep = Relation::empty(r.arity());
    for (_, (t, u)) in signature_of(r, pairs).iter() {
        rep.tuples.insert(t.clone());
        rep.tuples.insert(u.clone());
    }
    let mut buf = Vec::new();
    for cols in small_index_sets(r.arity(), j) {
        let mut seen: FxHashSet<Vec<Value>> = FxHashSet::default();
        for t in r {
            gather(t, &cols, &mut buf);
            if !seen.contains(buf.as_slice()) {
                seen.insert(buf.clone());
                rep.tuples.insert(t.clone());
            }
        }
    }
    CompactRep::new(rep, j)
}

/// Order `k - 1` representation of the full relation `A^n`, with `0` as
/// the filler value: for every minority triple `(i, a, b)` the tuples with
/// `a` (resp. `b`) at `i` and `0` elsewhere, and for every set of at most
/// `k - 1` coordinates and every assignment to it, the tuple carrying that
/// assignment and `0` elsewhere.
pub fn full_space_rep(n: usize, op: &OperationTable, pairs: &PairTable) -> CompactRep {
    const FILL: Value = 0;
    let q = op.domain_size();
    let order = op.arity() - 1;
    let mut rep = Relation::empty(n);
    for col in 0..n {
        for (a, b) in pairs.minority_pairs() {
            for v in [a, b] {
                let mut t = vec![FILL; n];
                t[col] = v;
                rep.tuples.insert(Tuple(t));
            }
        }
    }
    for cols in small_index_sets(n, order) {
        for values in &Relation::full(cols.len(), q) {
            let mut t = vec![FILL; n];
            for (&c, &v) in cols.iter().zip(values.iter()) {
                t[c] = v;
            }
            rep.tuples.insert(Tuple(t));
        }
    }
    CompactRep::new(rep, order)
}

/// `{ s ++ c : s in s_rel }`.
pub fn extend_product(s_rel: &Relation, c: &[Value]) -> Relation {
    Relation {
        arity: s_rel.arity() + c.len(),
        tuples: s_rel.iter().map(|s| s.concat(c)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin::{maj3, xor3};
    use crate::relations::closure;

    fn rel(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::from_tuples(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    fn even_parity(n: usize) -> Relation {
        Relation::from_tuples(
            n,
            Relation::full(n, 2)
                .iter()
                .filter(|t| t.iter().fold(0, |a, &b| a ^ b) == 0)
                .cloned(),
        )
        .unwrap()
    }

    #[test]
    fn reflexive_representation() {
        let pairs = xor3().validate_gmm().unwrap();
        let r = even_parity(3);
        for j in 0..4 {
            assert_eq!(check_representation(&r, &r, j, &pairs), Ok(true));
        }
    }

    #[test]
    fn seven_of_eight_even_parity_tuples_represent() {
        let pairs = xor3().validate_gmm().unwrap();
        let r = even_parity(4);
        let g = Relation::from_tuples(4, r.iter().filter(|t| t.as_slice() != [1, 1, 1, 1]).cloned())
            .unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(check_representation(&g, &r, 2, &pairs), Ok(true));
        assert_eq!(signature_of(&r, &pairs).len(), 6);
    }

    #[test]
    fn missing_projection_is_detected() {
        let pairs = xor3().validate_gmm().unwrap();
        let g = rel(3, &[&[0, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(check_representation(&g, &even_parity(3), 2, &pairs), Ok(false));
        assert_eq!(
            check_representation(&rel(3, &[&[1, 1, 1]]), &even_parity(3), 2, &pairs),
            Err(RelationError::NotASubset)
        );
    }

    #[test]
    fn compress_examples() {
        let pairs = xor3().validate_gmm().unwrap();
        let single = rel(3, &[&[1, 0, 1]]);
        assert_eq!(compress(&single, 2, &pairs).rep(), &single);

        let r = even_parity(4);
        let c = compress(&r, 2, &pairs);
        assert!(c.len() <= 45);
        assert_eq!(check_representation(c.rep(), &r, 2, &pairs), Ok(true));
    }

    #[test]
    fn full_space_examples() {
        let maj = maj3();
        let rep = full_space_rep(3, &maj, &maj.validate_gmm().unwrap());
        let want = Relation::from_tuples(
            3,
            Relation::full(3, 2).iter().filter(|t| t.iter().filter(|&&v| v == 1).count() <= 2).cloned(),
        )
        .unwrap();
        assert_eq!(rep.rep(), &want);

        let xor = xor3();
        let rep = full_space_rep(2, &xor, &xor.validate_gmm().unwrap());
        assert_eq!(rep.rep(), &Relation::full(2, 2));
        assert_eq!(closure(rep.rep(), &xor).unwrap(), Relation::full(2, 2));
    }

    #[test]
    fn extends_by_constant_suffix() {
        let s = rel(1, &[&[0], &[1]]);
        assert_eq!(extend_product(&s, &[1]), rel(2, &[&[0, 1], &[1, 1]]));
        assert_eq!(extend_product(&Relation::empty(2), &[1]), Relation::empty(3));
        assert_eq!(extend_product(&Relation::full(0, 2), &[3, 4]), rel(2, &[&[3, 4]]));
    }
}
