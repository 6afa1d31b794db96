//! The procedures that maintain compact representations: `nonempty`,
//! `fix_values`, `next_beta` and `next`.
//!
//! All functions here work with 0-based columns. Representations are
//! always of order `k - 1`.
//!
//! Restoring projections follows the procedures' loops over index sets
//! `I` with `|I| <= k - 1`, batched per index set. Only value tuples in
//! `pr_I u` can occur, since `u` already realizes `pr_I <u>`. Those not yet
//! realized are looked for first in the closure of tuples already known to
//! satisfy the restriction (which needs only the columns of `I`), and only
//! then by a search over `pr_{guard, I} <u>`.

use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::projection::{Columns, ProjectedClosure};
use super::{GmmSolver, SolveError};
use crate::algebra::Value;
use crate::relations::{
    extend_product, gather, signature_of, witnesses, Relation, SignatureEntry, Tuple,
};

/// Accumulates the tuples of a new representation, tracking which values
/// each column already realizes.
struct RepBuilder {
    arity: usize,
    domain_size: usize,
    view: Columns,
    seen: FxHashSet<Tuple>,
    column_values: Vec<bool>,
}

impl RepBuilder {
    fn new(arity: usize, domain_size: usize) -> Self {
        RepBuilder {
            arity,
            domain_size,
            view: Columns::new(arity, domain_size),
            seen: FxHashSet::default(),
            column_values: vec![false; arity * domain_size],
        }
    }

    fn insert(&mut self, t: &Tuple) {
        if self.seen.insert(t.clone()) {
            for (c, &v) in t.iter().enumerate() {
                self.column_values[c * self.domain_size + v as usize] = true;
            }
            self.view.push(t.clone());
        }
    }

    fn has_value(&self, col: usize, v: Value) -> bool {
        self.column_values[col * self.domain_size + v as usize]
    }

    fn covered_on(&self, cols: &[usize]) -> FxHashSet<Vec<Value>> {
        self.view.projections(cols).into_iter().collect()
    }

    fn relation(&self) -> Relation {
        Relation::from_tuples(self.arity, self.view.rows().iter().cloned())
            .expect("tuples share the builder's arity")
    }
}

/// The values each column takes in the target relation, with one preimage
/// per value.
struct UnaryProjections {
    per_column: Vec<Vec<Option<Tuple>>>,
}

impl UnaryProjections {
    fn preimage(&self, col: usize, v: Value) -> Option<&Tuple> {
        self.per_column[col][v as usize].as_ref()
    }

    fn count(&self, col: usize) -> usize {
        self.per_column[col].iter().filter(|p| p.is_some()).count()
    }

    fn is_empty(&self) -> bool {
        self.per_column.first().is_none_or(|c| c.iter().all(Option::is_none))
    }
}

/// Describes the restricted relation `{ t in <U> : pr_guard t in target }`
/// whose representation is being built.
struct Restriction<'a> {
    guard: &'a [usize],
    target: &'a dyn Fn(&[Value]) -> bool,
}

impl<'g> GmmSolver<'g> {
    fn cap(&self) -> usize {
        self.config.closure_cap
    }

    /// A tuple of `<rep>` whose projection onto `cols` satisfies `target`.
    pub(crate) fn nonempty_cols(
        &self,
        rep: &Relation,
        cols: &[usize],
        target: impl Fn(&[Value]) -> bool,
    ) -> Result<Option<Tuple>, SolveError> {
        let mut pc = ProjectedClosure::new(rep, cols);
        let hit = pc.search(self.gmm.op(), self.cap(), target)?;
        Ok(hit.map(|i| pc.preimage(i).clone()))
    }

    /// Unary projections of the restriction, one saturation per column.
    fn unary_projections(
        &self,
        u: &Columns,
        restriction: &Restriction<'_>,
    ) -> Result<UnaryProjections, SolveError> {
        let q = self.gmm.domain_size();
        let g = restriction.guard.len();
        let n = u.rows().first().map_or(0, |t| t.arity());
        let mut per_column = Vec::with_capacity(n);
        let mut cols = restriction.guard.to_vec();
        cols.push(0);
        for col in 0..n {
            cols[g] = col;
            let mut pc = ProjectedClosure::from_columns(u, &cols);
            pc.saturate(self.gmm.op(), self.cap())?;
            let mut values = vec![None; q];
            for (p, pre) in pc.iter() {
                if (restriction.target)(&p[..g]) {
                    values[p[g] as usize].get_or_insert_with(|| pre.clone());
                }
            }
            per_column.push(values);
        }
        Ok(UnaryProjections { per_column })
    }

    /// Makes `out` realize every tuple of `pr_I` of the restriction for all
    /// `|I| <= k - 1`.
    fn restore_projections(
        &self,
        u: &Columns,
        restriction: &Restriction<'_>,
        unary: &UnaryProjections,
        out: &mut RepBuilder,
    ) -> Result<(), SolveError> {
        let n = unary.per_column.len();
        let q = self.gmm.domain_size();
        let g = restriction.guard.len();
        for col in 0..n {
            for v in 0..q as Value {
                if let Some(pre) = unary.preimage(col, v) {
                    if !out.has_value(col, v) {
                        out.insert(pre);
                    }
                }
            }
        }
        let order = self.gmm.arity() - 1;
        let free: Vec<usize> = (0..n).filter(|&c| unary.count(c) > 1).collect();
        // rows of u that already meet the restriction
        let mut inside = Columns::new(n, q);
        let mut buf = Vec::with_capacity(g);
        for t in u.rows() {
            gather(t, restriction.guard, &mut buf);
            if (restriction.target)(&buf) {
                inside.push(t.clone());
            }
        }
        let mut cols = restriction.guard.to_vec();
        for size in 2..=order.min(free.len()) {
            for set in itertools::Itertools::combinations(free.iter().copied(), size) {
                // pr_I of the restriction lies inside pr_I <u> = pr_I u
                let covered = out.covered_on(&set);
                let mut missing: FxHashSet<Vec<Value>> = u
                    .projections(&set)
                    .into_iter()
                    .filter(|p| {
                        !covered.contains(p)
                            && set.iter().zip(p).all(|(&c, &v)| unary.preimage(c, v).is_some())
                    })
                    .collect();
                if missing.is_empty() {
                    continue;
                }
                // everything generated by known members of the restriction
                // is a member too, so no guard columns are needed here
                let mut known = ProjectedClosure::from_columns(&inside, &set);
                known.extend_from_columns(&out.view, &set);
                while let Some(hit) = known.search(self.gmm.op(), self.cap(), |p| missing.contains(p))? {
                    missing.remove(known.point(hit));
                    out.insert(known.preimage(hit));
                    if missing.is_empty() {
                        break;
                    }
                }
                if missing.is_empty() {
                    continue;
                }
                cols.truncate(g);
                cols.extend_from_slice(&set);
                let mut pc = ProjectedClosure::from_columns(u, &cols);
                while let Some(hit) = pc.search(self.gmm.op(), self.cap(), |p| {
                    missing.contains(&p[g..]) && (restriction.target)(&p[..g])
                })? {
                    missing.remove(&pc.point(hit)[g..]);
                    out.insert(pc.preimage(hit));
                    if missing.is_empty() {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    /// One iteration of `fix_values`: a representation of
    /// `{ t in <u> : t[col] = value }`.
    fn fix_step(&self, u: &Relation, col: usize, value: Value) -> Result<Relation, SolveError> {
        let n = u.arity();
        if u.iter().all(|t| t[col] == value) {
            return Ok(u.clone());
        }
        if !u.iter().any(|t| t[col] == value) {
            // pr_col <u> = pr_col u for a representation of order >= 1
            return Ok(Relation::empty(n));
        }
        let guard = [col];
        let target = |p: &[Value]| p[0] == value;
        let restriction = Restriction {
            guard: &guard,
            target: &target,
        };
        let view = Columns::from_relation(u, self.gmm.domain_size());
        let unary = self.unary_projections(&view, &restriction)?;
        if unary.is_empty() {
            return Ok(Relation::empty(n));
        }
        let op = self.gmm.op();
        let k = op.arity();
        let mut out = RepBuilder::new(n, self.gmm.domain_size());

        let sig = signature_of(u, self.gmm.pairs());
        for i in col + 1..n {
            for (a, b) in self.gmm.pairs().minority_pairs() {
                let Some((t2, t3)) = sig.get(&SignatureEntry::new(i + 1, a, b)) else {
                    continue;
                };
                let Some(t1) = unary.preimage(i, a) else {
                    continue;
                };
                let mut rows: Vec<&Tuple> = vec![t1];
                rows.extend(std::iter::repeat_n(t2, k - 2));
                rows.push(t3);
                let t4 = Tuple::new(op.combine(&rows));
                let mut rows: Vec<&Tuple> = vec![t1; k - 1];
                rows.push(&t4);
                let t5 = Tuple::new(op.combine(&rows));
                debug_assert!(witnesses(t1, &t5, SignatureEntry::new(i + 1, a, b)));
                out.insert(t1);
                out.insert(&t5);
            }
        }
        self.restore_projections(&view, &restriction, &unary, &mut out)?;
        let rel = out.relation();
        debug_assert!(signature_of(&rel, self.gmm.pairs())
            .iter()
            .all(|(e, _)| e.i > col + 1));
        Ok(rel)
    }

    /// Representation of `{ t in <u> : t[..m] = prefix }`, reusing and
    /// extending the memo of intermediate results keyed by prefix.
    fn fix_values_memo(
        &self,
        memo: &mut FxHashMap<Vec<Value>, Rc<Relation>>,
        u: &Rc<Relation>,
        prefix: &[Value],
    ) -> Result<Rc<Relation>, SolveError> {
        let (mut done, mut cur) = (0..=prefix.len())
            .rev()
            .find_map(|m| memo.get(&prefix[..m]).map(|r| (m, Rc::clone(r))))
            .unwrap_or((0, Rc::clone(u)));
        while done < prefix.len() {
            cur = if cur.is_empty() {
                Rc::clone(&cur)
            } else {
                Rc::new(self.fix_step(&cur, done, prefix[done])?)
            };
            self.note_rep(&cur);
            done += 1;
            memo.insert(prefix[..done].to_vec(), Rc::clone(&cur));
        }
        Ok(cur)
    }

    pub(crate) fn fix_values_rel(&self, u: &Relation, prefix: &[Value]) -> Result<Relation, SolveError> {
        let mut cur = u.clone();
        for (col, &v) in prefix.iter().enumerate() {
            if cur.is_empty() {
                break;
            }
            cur = self.fix_step(&cur, col, v)?;
            self.note_rep(&cur);
        }
        Ok(cur)
    }

    /// Representation of `{ t in <u> : pr_cols t in s }`.
    pub(crate) fn next_beta_rel(
        &self,
        u: &Relation,
        cols: &[usize],
        s: &Relation,
    ) -> Result<Relation, SolveError> {
        let n = u.arity();
        let j = cols.len();
        if u.is_empty() || s.is_empty() {
            return Ok(Relation::empty(n));
        }
        let target = |p: &[Value]| s.contains(p);
        let restriction = Restriction {
            guard: cols,
            target: &target,
        };
        let view = Columns::from_relation(u, self.gmm.domain_size());
        let unary = self.unary_projections(&view, &restriction)?;
        if unary.is_empty() {
            return Ok(Relation::empty(n));
        }
        let op = self.gmm.op();
        let k = op.arity();
        let mut out = RepBuilder::new(n, self.gmm.domain_size());
        self.restore_projections(&view, &restriction, &unary, &mut out)?;

        let sig_u = signature_of(u, self.gmm.pairs());
        let sig_out = signature_of(&out.relation(), self.gmm.pairs());
        let u = Rc::new(u.clone());
        let mut memo: FxHashMap<Vec<Value>, Rc<Relation>> = FxHashMap::default();
        let mut extended = cols.to_vec();
        extended.push(0);
        for i in 0..n {
            extended[j] = i;
            for (a, b) in self.gmm.pairs().minority_pairs() {
                let entry = SignatureEntry::new(i + 1, a, b);
                // Sig of the restriction is contained in Sig of <u>, which
                // equals Sig u.
                let Some((wa, wb)) = sig_u.get(&entry) else {
                    continue;
                };
                if sig_out.contains(&entry) || unary.preimage(i, b).is_none() {
                    continue;
                }
                let Some(t1) = unary.preimage(i, a) else {
                    continue;
                };
                // φ(t1, φ(t1, wa, .., wa, wb), ..) agrees with t1 before i and
                // takes b at i; if it also meets the constraint it is the
                // partner we need.
                let mut rows: Vec<&Tuple> = vec![t1];
                rows.extend(std::iter::repeat_n(wa, k - 2));
                rows.push(wb);
                let mid = Tuple::new(op.combine(&rows));
                let mut rows: Vec<&Tuple> = vec![t1; k - 1];
                rows.push(&mid);
                let candidate = Tuple::new(op.combine(&rows));
                let image: Vec<Value> = cols.iter().map(|&c| candidate[c]).collect();
                let t2 = if s.contains(&image) {
                    Some(candidate)
                } else {
                    let fixed = self.fix_values_memo(&mut memo, &u, &t1[..i])?;
                    let with_b = extend_product(s, &[b]);
                    self.nonempty_cols(&fixed, &extended, |p| with_b.contains(p))?
                };
                if let Some(t2) = t2 {
                    debug_assert!(witnesses(t1, &t2, entry));
                    out.insert(t1);
                    out.insert(&t2);
                }
            }
        }
        Ok(out.relation())
    }

    /// Folds `next_beta` over growing prefixes of the scope.
    pub(crate) fn next_rel(
        &self,
        u: &Relation,
        cols: &[usize],
        s: &Relation,
    ) -> Result<Relation, SolveError> {
        let mut cur = u.clone();
        for l in 0..cols.len() {
            if cur.is_empty() {
                break;
            }
            let head: Vec<usize> = (1..=l + 1).collect();
            let s_head = s.project(&head)?;
            // for short heads pr_head <cur> = pr_head cur, so a step that
            // removes nothing can be skipped
            if l + 1 < cols.len() && l + 1 < self.gmm.arity() {
                let scope = &cols[..=l];
                let mut buf = Vec::with_capacity(scope.len());
                let unchanged = cur.iter().all(|t| {
                    gather(t, scope, &mut buf);
                    s_head.contains(&buf)
                });
                if unchanged {
                    continue;
                }
            }
            cur = self.next_beta_rel(&cur, &cols[..=l], &s_head)?;
            self.note_rep(&cur);
        }
        Ok(cur)
    }
}
