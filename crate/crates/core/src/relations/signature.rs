use std::collections::{BTreeMap, BTreeSet};

use super::{Relation, Tuple};
use crate::algebra::{PairTable, Value};

/// A triple `(i, a, b)`: coordinate `i` (1-based) and an ordered pair of
/// distinct values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignatureEntry {
    pub i: usize,
    pub a: Value,
    pub b: Value,
}

impl SignatureEntry {
    pub fn new(i: usize, a: Value, b: Value) -> Self {
        SignatureEntry { i, a, b }
    }
}

/// Whether `(t, t2)` witnesses `entry`: the tuples agree before coordinate
/// `i`, and take `a` and `b` respectively at `i`.
///
/// Returns false when the tuples differ in arity or `i` is out of range.
pub fn witnesses(t: &[Value], t2: &[Value], entry: SignatureEntry) -> bool {
    let SignatureEntry { i, a, b } = entry;
    if t.len() != t2.len() || i == 0 || i > t.len() || a == b {
        return false;
    }
    t[..i - 1] == t2[..i - 1] && t[i - 1] == a && t2[i - 1] == b
}

/// The set of minority-pair triples witnessed by some pair of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    entries: BTreeSet<SignatureEntry>,
}

impl Signature {
    pub fn contains(&self, entry: &SignatureEntry) -> bool {
        self.entries.contains(entry)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignatureEntry> {
        self.entries.iter()
    }
}

impl FromIterator<SignatureEntry> for Signature {
    fn from_iter<I: IntoIterator<Item = SignatureEntry>>(iter: I) -> Self {
        Signature {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A signature in which every entry carries one witnessing pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WitnessedSignature {
    witnesses: BTreeMap<SignatureEntry, (Tuple, Tuple)>,
}

impl WitnessedSignature {
    pub fn get(&self, entry: &SignatureEntry) -> Option<&(Tuple, Tuple)> {
        self.witnesses.get(entry)
    }

    pub fn contains(&self, entry: &SignatureEntry) -> bool {
        self.witnesses.contains_key(entry)
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignatureEntry, &(Tuple, Tuple))> {
        self.witnesses.iter()
    }

    pub fn signature(&self) -> Signature {
        self.witnesses.keys().copied().collect()
    }
}

/// Computes the signature of `r`, with the lexicographically least
/// witnessing pair for each entry.
///
/// Tuples sharing a prefix are contiguous in lexicographic order, so each
/// coordinate needs one pass over the relation.
pub fn signature_of(r: &Relation, pairs: &PairTable) -> WitnessedSignature {
    let tuples: Vec<&Tuple> = r.iter().collect();
    let q = pairs.domain_size();
    let minority: Vec<(Value, Value)> = pairs.minority_pairs().collect();
    let mut out = BTreeMap::new();
    if minority.is_empty() {
        return WitnessedSignature { witnesses: out };
    }
    let mut first_with = vec![None::<usize>; q];
    for col in 0..r.arity() {
        let mut start = 0;
        while start < tuples.len() {
            let prefix = &tuples[start][..col];
            let mut end = start;
            first_with.iter_mut().for_each(|s| *s = None);
            while end < tuples.len() && &tuples[end][..col] == prefix {
                let v = tuples[end][col] as usize;
                first_with[v].get_or_insert(end);
                end += 1;
            }
            for &(a, b) in &minority {
                if let (Some(ta), Some(tb)) = (first_with[a as usize], first_with[b as usize]) {
                    out.entry(SignatureEntry::new(col + 1, a, b))
                        .or_insert_with(|| (tuples[ta].clone(), tuples[tb].clone()));
                }
            }
            start = end;
        }
    }
    WitnessedSignature { witnesses: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin::{maj3, mixed3, xor3};

    fn rel(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::from_tuples(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    #[test]
    fn witness_definition() {
        assert!(witnesses(&[0, 0, 1], &[0, 0, 2], SignatureEntry::new(3, 1, 2)));
        assert!(!witnesses(&[0, 1], &[1, 1], SignatureEntry::new(2, 1, 1)));
        assert!(!witnesses(&[0, 1], &[1, 0], SignatureEntry::new(2, 1, 0)));
        assert!(witnesses(&[1, 0, 0], &[0, 1, 1], SignatureEntry::new(1, 1, 0)));
        assert!(!witnesses(&[1], &[0], SignatureEntry::new(2, 1, 0)));
    }

    /// Brute force over all ordered pairs of tuples.
    fn brute_signature(r: &Relation, pairs: &PairTable) -> BTreeSet<SignatureEntry> {
        let mut out = BTreeSet::new();
        for t in r {
            for u in r {
                for i in 1..=r.arity() {
                    let e = SignatureEntry::new(i, t[i - 1], u[i - 1]);
                    if e.a != e.b && pairs.is_minority(e.a, e.b) && witnesses(t, u, e) {
                        out.insert(e);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn signature_examples() {
        let r = rel(2, &[&[0, 0], &[0, 1]]);
        let xor = xor3().validate_gmm().unwrap();
        let sig = signature_of(&r, &xor);
        let entries: Vec<_> = sig.signature().iter().copied().collect();
        assert_eq!(
            entries,
            vec![SignatureEntry::new(2, 0, 1), SignatureEntry::new(2, 1, 0)]
        );
        assert!(signature_of(&r, &maj3().validate_gmm().unwrap()).is_empty());
        assert!(signature_of(&rel(2, &[&[1, 0]]), &xor).is_empty());
    }

    #[test]
    fn stored_witnesses_are_least_and_valid() {
        let pairs = mixed3().validate_gmm().unwrap();
        let r = Relation::full(3, 3);
        let sig = signature_of(&r, &pairs);
        assert_eq!(sig.signature().iter().copied().collect::<BTreeSet<_>>(), brute_signature(&r, &pairs));
        for (e, (t, u)) in sig.iter() {
            assert!(witnesses(t, u, *e));
            let least = r
                .iter()
                .flat_map(|t| r.iter().map(move |u| (t, u)))
                .find(|(t, u)| witnesses(t, u, *e))
                .unwrap();
            assert_eq!((t, u), least);
        }
    }
}
