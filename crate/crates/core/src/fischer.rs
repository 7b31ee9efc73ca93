//! Irreducibility, synchronizing words and the Fischer cover as the
//! synchronizing part of the Krieger cover.

use std::collections::BTreeSet;

use serde_json::json;

use crate::graph::CoverGraph;
use crate::krieger::{build_krieger_graph, termination_level, KriegerError};
use crate::relation::VertexSet;
use crate::shift::{Context, RightContext, ShiftError, Subshift};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FischerError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Krieger(#[from] KriegerError),
    #[error("the subshift is not irreducible")]
    NotIrreducible,
    #[error("no synchronizing word of length at most {max_len}")]
    NoSynchronizingWord { max_len: usize },
    #[error("{0} is not a synchronizing word")]
    NotSynchronizing(String),
    #[error("the profile partition did not stabilize")]
    NotTerminated,
    #[error("extracted cover is not strongly connected")]
    NotStronglyConnected,
}

pub type Result<T, E = FischerError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynchronizingCertificate {
    pub word: Word,
    /// Index of the focused class among the Krieger vertices.
    pub class_index: usize,
    pub class_key: String,
    /// Contexts `x` for which the class of `m·x` was checked.
    pub checked: Vec<RightContext>,
}

fn require_exact(shift: &Subshift) -> Result<()> {
    if shift.is_exact() {
        Ok(())
    } else {
        Err(ShiftError::Unsupported("oracle inputs have no finite presentation".into()).into())
    }
}

/// True iff for all `u, w` in the language some `v` makes `uvw` admissible.
///
/// Every vertex of the presentation starts an infinite path, so a word is in
/// the language iff its relation is nonempty; irreducibility is then a
/// reachability question between ranges and domains of monoid elements.
pub fn is_irreducible(shift: &Subshift) -> Result<bool> {
    require_exact(shift)?;
    let g = shift.presentation().unwrap();
    let n = g.vertex_count();
    let mut reach: Vec<VertexSet> = (0..n).map(|v| VertexSet::singleton(n, v)).collect();
    // reflexive transitive closure by repeated expansion
    loop {
        let mut changed = false;
        for v in 0..n {
            let mut next = reach[v].clone();
            for e in g.edges().iter().filter(|e| reach[v].contains(e.src)) {
                next.insert(e.dst);
            }
            if next != reach[v] {
                reach[v] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let monoid = shift.relation_monoid()?;
    let ranges: BTreeSet<Vec<usize>> = monoid
        .elements
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.range().to_vec())
        .collect();
    let domains: BTreeSet<Vec<usize>> = monoid
        .elements
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.domain().to_vec())
        .collect();
    for range in &ranges {
        let mut reachable = VertexSet::empty(n);
        for &v in range {
            reachable.union_with(&reach[v]);
        }
        for dom in &domains {
            if !dom.iter().any(|&d| reachable.contains(d)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn terminated_krieger(shift: &Subshift) -> Result<(usize, CoverGraph)> {
    let bound = shift.achievable_future_sets()?.len() + 1;
    let level = termination_level(shift, bound)?
        .level
        .ok_or(FischerError::NotTerminated)?;
    Ok((level, build_krieger_graph(shift, level)?))
}

fn focus(shift: &Subshift, g: &CoverGraph, level: usize, m: &Word) -> Result<(BTreeSet<usize>, Vec<RightContext>)> {
    let mut classes = BTreeSet::new();
    let mut checked = Vec::new();
    for s in shift.achievable_future_sets()? {
        let mut ctx = Some(Context::Set(s.clone()));
        for &a in m.symbols().iter().rev() {
            ctx = ctx.and_then(|c| shift.prepend(&c, a));
        }
        let Some(ctx) = ctx else { continue };
        let p = shift.profile_of(&ctx, level)?;
        let idx = g
            .vertices
            .iter()
            .position(|v| v.profile.as_ref() == Some(&p))
            .ok_or(FischerError::NotTerminated)?;
        classes.insert(idx);
        checked.push(shift.to_right_context(&Context::Set(s.clone())));
    }
    Ok((classes, checked))
}

fn certificate(shift: &Subshift, g: &CoverGraph, level: usize, m: &Word) -> Result<Option<SynchronizingCertificate>> {
    let (classes, checked) = focus(shift, g, level, m)?;
    Ok((classes.len() == 1).then(|| {
        let idx = *classes.iter().next().unwrap();
        SynchronizingCertificate {
            word: m.clone(),
            class_index: idx,
            class_key: g.vertices[idx].key.clone(),
            checked,
        }
    }))
}

/// Default search bound: twice the square of the number of Krieger classes.
pub fn default_max_len(shift: &Subshift) -> Result<usize> {
    let (_, g) = terminated_krieger(shift)?;
    Ok(2 * g.vertex_count() * g.vertex_count())
}

/// First synchronizing word in length-then-lexicographic order. A word `m`
/// qualifies when every admissible `m·x` lands in one Krieger class.
pub fn find_synchronizing_word(shift: &Subshift, max_len: usize) -> Result<Option<SynchronizingCertificate>> {
    require_exact(shift)?;
    let (level, g) = terminated_krieger(shift)?;
    for len in 1..=max_len {
        for m in shift.language_of_length(len)? {
            if let Some(c) = certificate(shift, &g, level, &m)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

pub fn build_fischer_graph(shift: &Subshift) -> Result<CoverGraph> {
    require_exact(shift)?;
    if !is_irreducible(shift)? {
        return Err(FischerError::NotIrreducible);
    }
    let max_len = default_max_len(shift)?;
    let cert = find_synchronizing_word(shift, max_len)?
        .ok_or(FischerError::NoSynchronizingWord { max_len })?;
    build_fischer_graph_with(shift, &cert.word)
}

/// Fischer cover grown from the class focused by a given synchronizing word.
pub fn build_fischer_graph_with(shift: &Subshift, m: &Word) -> Result<CoverGraph> {
    require_exact(shift)?;
    if !is_irreducible(shift)? {
        return Err(FischerError::NotIrreducible);
    }
    let (level, krieger) = terminated_krieger(shift)?;
    let cert = certificate(shift, &krieger, level, m)?
        .ok_or_else(|| FischerError::NotSynchronizing(shift.alphabet().format_word(m)))?;
    // close the focused class under the source map
    let mut keep = BTreeSet::from([cert.class_index]);
    let mut stack = vec![cert.class_index];
    while let Some(v) = stack.pop() {
        for (_, e) in krieger.edges_into(v) {
            if keep.insert(e.source) {
                stack.push(e.source);
            }
        }
    }
    let mut g = krieger.induced(&keep);
    if !g.is_strongly_connected() {
        return Err(FischerError::NotStronglyConnected);
    }
    g.metadata.insert("cover".into(), json!("fischer"));
    g.metadata
        .insert("sync_word".into(), json!(shift.alphabet().format_word(m)));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::fixtures::*;
    use crate::shift::SubshiftSpec;
    use crate::word::digits;

    fn shift(spec: SubshiftSpec) -> Subshift {
        Subshift::new(spec).unwrap()
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&shift(SubshiftSpec::full(2))).unwrap());
        assert!(is_irreducible(&shift(golden_mean())).unwrap());
        assert!(is_irreducible(&shift(even_shift())).unwrap());
        let two = shift(SubshiftSpec::SoficGraph(two_loops_graph()));
        assert!(!is_irreducible(&two).unwrap());
        assert!(is_irreducible(&shift(square_gap(10))).is_err());
    }

    #[test]
    fn synchronizing_words() {
        let w = |spec| find_synchronizing_word(&shift(spec), 4).unwrap().unwrap().word;
        assert_eq!(w(even_shift()), digits("1"));
        assert_eq!(w(SubshiftSpec::full(2)), digits("0"));
        // a one-step SFT is synchronized by every word, so "0" comes first
        assert_eq!(w(golden_mean()), digits("0"));
        let gm = shift(golden_mean());
        let g = build_krieger_graph(&gm, 1).unwrap();
        assert!(certificate(&gm, &g, 1, &digits("1")).unwrap().is_some());
        let even = shift(even_shift());
        let g = build_krieger_graph(&even, 2).unwrap();
        assert!(certificate(&even, &g, 2, &digits("0")).unwrap().is_none());
    }

    #[test]
    fn fischer_graphs() {
        let g = build_fischer_graph(&shift(even_shift())).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 3));
        assert_eq!(g.adjacency(), vec![vec![1, 1], vec![1, 0]]);
        let loops: Vec<_> = g.edges.iter().filter(|e| e.range == e.source).collect();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].label, 1);
        assert_eq!(g.metadata["sync_word"], "1");
        let g = build_fischer_graph(&shift(golden_mean())).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 3));
        let g = build_fischer_graph(&shift(SubshiftSpec::full(2))).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 2));
    }

    #[test]
    fn fischer_refuses_reducible_input() {
        let two = shift(SubshiftSpec::SoficGraph(two_loops_graph()));
        assert_eq!(build_fischer_graph(&two).unwrap_err(), FischerError::NotIrreducible);
    }

    #[test]
    fn choice_of_sync_word_is_irrelevant() {
        let s = shift(even_shift());
        let a = build_fischer_graph_with(&s, &digits("1")).unwrap();
        let b = build_fischer_graph_with(&s, &digits("0110")).unwrap();
        assert_eq!(a.signature(), b.signature());
    }
}
