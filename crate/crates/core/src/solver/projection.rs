//! Saturation of a projection `pr_cols U` under the operation, keeping for
//! every projected point one full preimage in `<U>`.
//!
//! Projection commutes with coordinatewise application, so the saturated
//! point set is exactly `pr_cols <U>`. A point produced as
//! `φ(p_1, .., p_k)` gets the preimage `φ(t_1, .., t_k)` where `t_i` is the
//! preimage of `p_i`; the full relation `<U>` is never materialized.

use std::ops::ControlFlow;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::algebra::{OperationTable, Value};
use crate::relations::{for_each_new_combination, gather, Relation, RelationError, Tuple};

pub(crate) struct ProjectedClosure {
    width: usize,
    points: Vec<Value>,
    preimages: Vec<Tuple>,
    index: FxHashMap<Vec<Value>, usize>,
    /// Points below this index have been combined with each other.
    settled: usize,
}

/// Tuples stored both row-wise and column-wise, for fast distinct
/// projections.
pub(crate) struct Columns {
    domain_size: usize,
    rows: Vec<Tuple>,
    data: Vec<Vec<Value>>,
}

/// Largest key space for which `distinct` uses a dense bitmap.
const DENSE_KEYS: u128 = 1 << 20;

impl Columns {
    pub fn new(arity: usize, domain_size: usize) -> Self {
        Columns {
            domain_size,
            rows: Vec::new(),
            data: vec![Vec::new(); arity],
        }
    }

    pub fn from_relation(r: &Relation, domain_size: usize) -> Self {
        let mut out = Columns::new(r.arity(), domain_size);
        for t in r {
            out.push(t.clone());
        }
        out
    }

    pub fn push(&mut self, t: Tuple) {
        for (col, &v) in self.data.iter_mut().zip(t.iter()) {
            col.push(v);
        }
        self.rows.push(t);
    }

    pub fn rows(&self) -> &[Tuple] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Row index of the first occurrence of each distinct projection onto
    /// `cols`, in row order.
    pub fn distinct(&self, cols: &[usize]) -> Vec<usize> {
        let q = self.domain_size as u128;
        let dense = (q.checked_pow(cols.len() as u32)).is_some_and(|size| size <= DENSE_KEYS);
        if !dense {
            let mut seen: FxHashSet<Vec<Value>> = FxHashSet::default();
            let mut buf = Vec::with_capacity(cols.len());
            return (0..self.len())
                .filter(|&r| {
                    gather(&self.rows[r], cols, &mut buf);
                    seen.insert(buf.clone())
                })
                .collect();
        }
        let q = self.domain_size as u32;
        let mut keys = vec![0u32; self.len()];
        let mut size = 1usize;
        for &c in cols {
            for (key, &v) in keys.iter_mut().zip(&self.data[c]) {
                *key = *key * q + v as u32;
            }
            size *= q as usize;
        }
        let mut seen = vec![false; size];
        keys.iter()
            .enumerate()
            .filter(|&(_, &key)| !std::mem::replace(&mut seen[key as usize], true))
            .map(|(r, _)| r)
            .collect()
    }

    /// The distinct projections onto `cols`.
    pub fn projections(&self, cols: &[usize]) -> Vec<Vec<Value>> {
        self.distinct(cols)
            .into_iter()
            .map(|r| cols.iter().map(|&c| self.rows[r][c]).collect())
            .collect()
    }
}

impl ProjectedClosure {
    /// Seeds with the projections of `rep` onto 0-based `cols`, keeping the
    /// first (lexicographically least) preimage of each.
    pub fn new(rep: &Relation, cols: &[usize]) -> Self {
        let mut pc = Self::empty(cols.len());
        let mut buf = Vec::with_capacity(cols.len());
        for t in rep {
            gather(t, cols, &mut buf);
            if !pc.index.contains_key(buf.as_slice()) {
                pc.push(buf.clone(), t.clone());
            }
        }
        pc
    }

    /// Same as [`ProjectedClosure::new`] over the rows of `view`.
    pub fn from_columns(view: &Columns, cols: &[usize]) -> Self {
        let mut pc = Self::empty(cols.len());
        for r in view.distinct(cols) {
            let t = &view.rows()[r];
            pc.push(cols.iter().map(|&c| t[c]).collect(), t.clone());
        }
        pc
    }

    /// Adds the projections of `view` not present yet, as unsettled points.
    pub fn extend_from_columns(&mut self, view: &Columns, cols: &[usize]) {
        for r in view.distinct(cols) {
            let t = &view.rows()[r];
            let point: Vec<Value> = cols.iter().map(|&c| t[c]).collect();
            if !self.index.contains_key(&point) {
                self.push(point, t.clone());
            }
        }
    }

    fn empty(width: usize) -> Self {
        ProjectedClosure {
            width,
            points: Vec::new(),
            preimages: Vec::new(),
            index: FxHashMap::default(),
            settled: 0,
        }
    }

    fn push(&mut self, point: Vec<Value>, preimage: Tuple) {
        self.points.extend_from_slice(&point);
        self.index.insert(point, self.preimages.len());
        self.preimages.push(preimage);
    }

    pub fn len(&self) -> usize {
        self.preimages.len()
    }

    pub fn point(&self, i: usize) -> &[Value] {
        &self.points[i * self.width..(i + 1) * self.width]
    }

    pub fn preimage(&self, i: usize) -> &Tuple {
        &self.preimages[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Value], &Tuple)> {
        (0..self.len()).map(move |i| (self.point(i), self.preimage(i)))
    }

    /// Saturates completely.
    pub fn saturate(&mut self, op: &OperationTable, cap: usize) -> Result<(), RelationError> {
        self.search(op, cap, |_| false).map(|_| ())
    }

    /// Returns the first point (existing points in order, then new points
    /// as they are generated) satisfying `target`, or `None` once the
    /// projection is saturated without a hit.
    pub fn search(
        &mut self,
        op: &OperationTable,
        cap: usize,
        mut target: impl FnMut(&[Value]) -> bool,
    ) -> Result<Option<usize>, RelationError> {
        if let Some(hit) = (0..self.len()).find(|&i| target(self.point(i))) {
            return Ok(Some(hit));
        }
        let k = op.arity();
        let q = op.domain_size();
        let table = op.values();
        let width = self.width;
        let mut image = vec![0 as Value; width];
        while self.settled < self.len() {
            let mut rows: Vec<&Tuple> = Vec::with_capacity(k);
            let start = self.settled;
            let end = self.len();
            let mut fresh: Vec<(Vec<Value>, Tuple)> = Vec::new();
            let points = &self.points;
            let index = &mut self.index;
            let preimages = &self.preimages;
            let flow = for_each_new_combination(k, start, end, |combo| {
                for (c, slot) in image.iter_mut().enumerate() {
                    let idx = combo
                        .iter()
                        .fold(0usize, |acc, &p| acc * q + points[p * width + c] as usize);
                    *slot = table[idx];
                }
                if index.contains_key(image.as_slice()) {
                    return ControlFlow::Continue(());
                }
                rows.clear();
                rows.extend(combo.iter().map(|&p| &preimages[p]));
                let preimage = Tuple::new(op.combine(&rows));
                index.insert(image.clone(), end + fresh.len());
                fresh.push((image.clone(), preimage));
                if end + fresh.len() > cap {
                    return ControlFlow::Break(Err(RelationError::SizeCapExceeded { cap }));
                }
                if target(&image) {
                    return ControlFlow::Break(Ok(end + fresh.len() - 1));
                }
                ControlFlow::Continue(())
            });
            for (point, preimage) in fresh {
                self.points.extend_from_slice(&point);
                self.preimages.push(preimage);
            }
            match flow {
                ControlFlow::Break(Err(e)) => return Err(e),
                ControlFlow::Break(Ok(hit)) => return Ok(Some(hit)),
                ControlFlow::Continue(()) => self.settled = end,
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin::{mixed3, xor3};
    use crate::relations::closure;

    #[test]
    fn saturated_points_are_the_projection_of_the_closure() {
        let op = mixed3();
        let seed = Relation::from_tuples(
            4,
            [[0u8, 1, 2, 0], [1, 1, 0, 2], [0, 0, 1, 1], [2, 0, 1, 0]],
        )
        .unwrap();
        let full = closure(&seed, &op).unwrap();
        for cols in [vec![0], vec![1, 3], vec![3, 0, 3], vec![0, 1, 2]] {
            let mut pc = ProjectedClosure::new(&seed, &cols);
            pc.saturate(&op, 1 << 20).unwrap();
            let mut via_columns = ProjectedClosure::from_columns(&Columns::from_relation(&seed, 3), &cols);
            via_columns.saturate(&op, 1 << 20).unwrap();
            assert!(pc.iter().eq(via_columns.iter()));
            let indices: Vec<usize> = cols.iter().map(|c| c + 1).collect();
            let want = full.project(&indices).unwrap();
            let got = Relation::from_tuples(indices.len(), pc.iter().map(|(p, _)| p.to_vec())).unwrap();
            assert_eq!(got, want);
            for (p, pre) in pc.iter() {
                assert!(full.contains(pre));
                let mut buf = Vec::new();
                gather(pre, &cols, &mut buf);
                assert_eq!(buf, p);
            }
        }
    }

    #[test]
    fn search_stops_at_target() {
        let seed = Relation::from_tuples(3, [[0u8, 0, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
        let mut pc = ProjectedClosure::new(&seed, &[0, 1, 2]);
        let hit = pc.search(&xor3(), 100, |p| p == [1, 0, 1]).unwrap().unwrap();
        assert_eq!(pc.preimage(hit).as_slice(), &[1, 0, 1]);
        let mut pc = ProjectedClosure::new(&seed, &[0, 1, 2]);
        assert_eq!(pc.search(&xor3(), 100, |p| p == [1, 0, 0]).unwrap(), None);
    }
}
