//! Vertex sets and boolean transition relations over the vertices of a
//! labeled graph presentation.

use std::fmt;

/// A set of vertex indices `0..n`, stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            bits: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn singleton(n: usize, v: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(v);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, it: I) -> Self {
        let mut s = Self::empty(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range {}", self.n);
        self.bits[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.bits[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.contains(v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A boolean relation on `0..n`: `(u, v)` is related when some path with a
/// given label runs from `u` to `v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionRelation {
    rows: Vec<VertexSet>,
}

impl TransitionRelation {
    pub fn empty(n: usize) -> Self {
        TransitionRelation {
            rows: vec![VertexSet::empty(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        TransitionRelation {
            rows: (0..n).map(|v| VertexSet::singleton(n, v)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn row(&self, u: usize) -> &VertexSet {
        &self.rows[u]
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(VertexSet::is_empty)
    }

    /// Relational composition: `(u, w)` iff `u self v` and `v other w` for some `v`.
    pub fn compose(&self, other: &TransitionRelation) -> TransitionRelation {
        let n = self.size();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = VertexSet::empty(n);
                for v in row.iter() {
                    out.union_with(&other.rows[v]);
                }
                out
            })
            .collect();
        TransitionRelation { rows }
    }

    /// Vertices with at least one successor.
    pub fn domain(&self) -> VertexSet {
        VertexSet::from_indices(
            self.size(),
            (0..self.size()).filter(|&u| !self.rows[u].is_empty()),
        )
    }

    /// Vertices with at least one predecessor.
    pub fn range(&self) -> VertexSet {
        let mut out = VertexSet::empty(self.size());
        for row in &self.rows {
            out.union_with(row);
        }
        out
    }

    /// `{u : u self v for some v in target}`.
    pub fn preimage(&self, target: &VertexSet) -> VertexSet {
        VertexSet::from_indices(
            self.size(),
            (0..self.size()).filter(|&u| self.rows[u].intersects(target)),
        )
    }

    /// `{v : u self v for some u in source}`.
    pub fn image(&self, source: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.size());
        for u in source.iter() {
            out.union_with(&self.rows[u]);
        }
        out
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |v| (u, v)))
            .collect()
    }
}

impl fmt::Debug for TransitionRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
