//! Regular open partitions of `[0, 1]` by finitely many open intervals.
//!
//! A partition is stored as its sorted set of interior cut points; the cells
//! are the open intervals between consecutive cuts (with `0` and `1` added).

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("cell ({0}, {1}) is empty")]
    EmptyCell(String, String),
    #[error("cells overlap or leave a gap near {0}")]
    NotAPartition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegularOpenPartition {
    cuts: Vec<Rational>,
}

impl RegularOpenPartition {
    /// The partition `{(0, 1)}`.
    pub fn trivial() -> Self {
        RegularOpenPartition { cuts: Vec::new() }
    }

    /// Partition with the given cut points; points outside `(0, 1)` are
    /// ignored and duplicates merged.
    pub fn from_cuts<I: IntoIterator<Item = Rational>>(cuts: I) -> Self {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut cuts: Vec<Rational> = cuts.into_iter().filter(|c| *c > zero && *c < one).collect();
        cuts.sort();
        cuts.dedup();
        RegularOpenPartition { cuts }
    }

    /// Builds a partition from an explicit list of cells, checking that they
    /// are nonempty, pairwise disjoint and that their closures cover `[0, 1]`.
    pub fn from_cells(cells: &[(Rational, Rational)]) -> Result<Self, PartitionError> {
        validate_cells(cells)?;
        let mut sorted = cells.to_vec();
        sorted.sort();
        Ok(Self::from_cuts(sorted.iter().skip(1).map(|(l, _)| l.clone())))
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cells in left-to-right order.
    pub fn cells(&self) -> Vec<(Rational, Rational)> {
        let mut ends = Vec::with_capacity(self.cuts.len() + 2);
        ends.push(Rational::zero());
        ends.extend(self.cuts.iter().cloned());
        ends.push(Rational::one());
        ends.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    /// Index of the cell containing `x`, or `None` if `x` is a cut point or
    /// lies outside `(0, 1)`.
    pub fn locate(&self, x: &Rational) -> Option<usize> {
        if *x <= Rational::zero() || *x >= Rational::one() {
            return None;
        }
        match self.cuts.binary_search(x) {
            Ok(_) => None,
            Err(i) => Some(i),
        }
    }

    /// Common refinement `self ∨ other`.
    pub fn join(&self, other: &RegularOpenPartition) -> RegularOpenPartition {
        let (a, b) = (&self.cuts, &other.cuts);
        let mut cuts = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    cuts.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    cuts.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    cuts.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        cuts.extend_from_slice(&a[i..]);
        cuts.extend_from_slice(&b[j..]);
        RegularOpenPartition { cuts }
    }

    /// `self ⪯ finer`: every cell of `finer` lies inside a cell of `self`.
    ///
    /// A cell of `finer` fits inside a cell of `self` iff no cut of `self`
    /// falls strictly inside it, i.e. iff every cut of `self` is a cut of
    /// `finer`.
    pub fn is_refined_by(&self, finer: &RegularOpenPartition) -> bool {
        let mut j = 0;
        for c in &self.cuts {
            while j < finer.cuts.len() && finer.cuts[j] < *c {
                j += 1;
            }
            if j == finer.cuts.len() || finer.cuts[j] != *c {
                return false;
            }
        }
        true
    }

    /// Checks the partition invariants on the cell list.
    pub fn validate(&self) -> Result<(), PartitionError> {
        validate_cells(&self.cells())
    }
}

/// Nonempty, disjoint, closures cover `[0, 1]`.
pub fn validate_cells(cells: &[(Rational, Rational)]) -> Result<(), PartitionError> {
    let mut sorted = cells.to_vec();
    sorted.sort();
    let mut reach = Rational::zero();
    for (l, r) in &sorted {
        if l >= r {
            return Err(PartitionError::EmptyCell(l.to_string(), r.to_string()));
        }
        if *l != reach {
            return Err(PartitionError::NotAPartition(reach.to_string()));
        }
        reach = r.clone();
    }
    if reach != Rational::one() {
        return Err(PartitionError::NotAPartition(reach.to_string()));
    }
    Ok(())
}
