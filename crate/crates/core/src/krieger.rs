//! Past-profile partitions, termination detection, augmented stages and the
//! Krieger (past-set) cover.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::graph::CoverGraph;
use crate::shift::{hex_digest, Context, PastProfile, RightContext, ShiftError, Subshift};
use crate::word::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KriegerError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("no class at level {level} matches the source of edge ({class}, {symbol}); the level is below termination")]
    SourceClassMissing {
        level: usize,
        class: String,
        symbol: String,
    },
    #[error("graph vertices carry no past profiles")]
    MissingProfiles,
    #[error("stage level must be at least 2")]
    StageTooLow,
}

pub type Result<T, E = KriegerError> = std::result::Result<T, E>;

/// Contexts sharing one past profile at level `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileClass {
    pub level: usize,
    pub profile: PastProfile,
    pub members: Vec<RightContext>,
}

/// Groups contexts by profile. Classes with larger pasts come first, ties
/// broken by canonical serialization.
fn group(shift: &Subshift, profiles: &[PastProfile]) -> Vec<(PastProfile, Vec<usize>)> {
    let alphabet = shift.alphabet();
    let mut by_key: BTreeMap<(Reverse<usize>, String), (PastProfile, Vec<usize>)> =
        BTreeMap::new();
    for (i, p) in profiles.iter().enumerate() {
        by_key
            .entry((Reverse(p.total_size()), p.serialize(alphabet)))
            .or_insert_with(|| (p.clone(), Vec::new()))
            .1
            .push(i);
    }
    by_key.into_values().collect()
}

fn profiles_at(shift: &Subshift, contexts: &[Context], k: usize) -> Result<Vec<PastProfile>> {
    Ok(contexts
        .iter()
        .map(|c| shift.profile_of(c, k))
        .collect::<Result<_, _>>()?)
}

/// Partition of all contexts by equality of `P_{≤k}`.
pub fn profile_partition(shift: &Subshift, k: usize) -> Result<Vec<ProfileClass>> {
    let contexts = shift.contexts(k)?;
    let profiles = profiles_at(shift, &contexts, k)?;
    Ok(group(shift, &profiles)
        .into_iter()
        .map(|(profile, idx)| ProfileClass {
            level: k,
            profile,
            members: idx.iter().map(|&i| shift.to_right_context(&contexts[i])).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminationReport {
    /// Least stabilizing level, if any was found within the bound.
    pub level: Option<usize>,
    /// Number of profile classes at levels `1, 2, …` over the contexts used
    /// for the final check.
    pub class_counts: Vec<usize>,
    /// False for oracle inputs, whose answers hold only up to the horizon.
    pub exact: bool,
}

/// Checks whether level `n` is stable: the partitions at `n` and `n + 1`
/// coincide and prepending a symbol maps each class into a single class.
fn level_is_stable(shift: &Subshift, contexts: &[Context], n: usize) -> Result<(bool, usize, usize)> {
    let deep = profiles_at(shift, contexts, n + 1)?;
    let shallow: Vec<PastProfile> = deep.iter().map(|p| p.truncate(n)).collect();
    let classes_n = group(shift, &shallow);
    let count_deep = group(shift, &deep).len();
    if classes_n.len() != count_deep {
        return Ok((false, classes_n.len(), count_deep));
    }
    let alphabet = shift.alphabet();
    for (profile, members) in &classes_n {
        for a in profile.set(1).iter().map(|w| w.symbols()[0]) {
            let mut seen: Option<String> = None;
            for &i in members {
                let Some(pre) = shift.prepend(&contexts[i], a) else {
                    continue;
                };
                let key = shift.profile_of(&pre, n)?.serialize(alphabet);
                match &seen {
                    None => seen = Some(key),
                    Some(k) if *k != key => return Ok((false, classes_n.len(), count_deep)),
                    _ => {}
                }
            }
        }
    }
    Ok((true, classes_n.len(), count_deep))
}

/// The least `N <= max_k` at which the profile partition stabilizes.
pub fn termination_level(shift: &Subshift, max_k: usize) -> Result<TerminationReport> {
    let max_k = max_k.max(1);
    // Oracle contexts are words of one length for every level, leaving room
    // for profiles up to level `max_k + 1` within the horizon.
    let reserve = shift.horizon().map_or(max_k + 1, |h| h.min(max_k + 1));
    let contexts = shift.contexts(reserve)?;
    let mut counts = Vec::new();
    let mut level = None;
    for n in 1..=max_k {
        if n + 1 > reserve {
            break;
        }
        let (stable, at_n, at_next) = level_is_stable(shift, &contexts, n)?;
        counts.truncate(n - 1);
        counts.push(at_n);
        counts.push(at_next);
        if stable {
            level = Some(n);
            break;
        }
    }
    Ok(TerminationReport {
        level,
        class_counts: counts,
        exact: shift.is_exact(),
    })
}

fn class_tag(i: usize) -> String {
    format!("c{i}")
}

/// Krieger cover at level `n`. When `n` is not a stable level the graph is
/// stamped as an approximation; a source class that cannot be located is an
/// error.
pub fn build_krieger_graph(shift: &Subshift, n: usize) -> Result<CoverGraph> {
    build(shift, n, false)
}

/// Like [`build_krieger_graph`], but a missing source class is replaced by
/// the class of the prepended (and, for oracle inputs, truncated) context.
pub fn build_krieger_approximation(shift: &Subshift, n: usize) -> Result<CoverGraph> {
    build(shift, n, true)
}

fn build(shift: &Subshift, n: usize, lenient: bool) -> Result<CoverGraph> {
    let n = n.max(1);
    let alphabet = shift.alphabet().clone();
    let contexts = shift.contexts(n + 1)?;
    let (stable, _, _) = level_is_stable(shift, &contexts, n)?;
    let deep = profiles_at(shift, &contexts, n + 1)?;
    let shallow: Vec<PastProfile> = deep.iter().map(|p| p.truncate(n)).collect();
    let classes = group(shift, &shallow);
    let lookup: BTreeMap<&PastProfile, usize> =
        classes.iter().enumerate().map(|(i, (p, _))| (p, i)).collect();

    let mut g = CoverGraph::new(alphabet.clone());
    for (i, (p, _)) in classes.iter().enumerate() {
        g.add_vertex(p.digest(&alphabet), class_tag(i), Some(p.clone()));
    }
    // the fallback class of a context: its prefix for oracle words
    let horizon_depth = shift.horizon().map(|h| h - (n + 1));
    let class_of_context = |c: &Context| -> Result<Option<usize>> {
        let c = match (c, horizon_depth) {
            (Context::Word(w), Some(d)) => Context::Word(w.prefix(d)),
            _ => c.clone(),
        };
        let p = shift.profile_of(&c, n)?;
        Ok(lookup.get(&p).copied())
    };
    for (i, (p, members)) in classes.iter().enumerate() {
        let rep = members[0];
        for a in p.set(1).iter().map(|w| w.symbols()[0]) {
            let src = deep[rep].source_profile(a);
            let mut source = lookup.get(&src).copied();
            if source.is_none() && lenient {
                if let Some(pre) = shift.prepend(&contexts[rep], a) {
                    source = class_of_context(&pre)?;
                }
            }
            let source = source.ok_or_else(|| KriegerError::SourceClassMissing {
                level: n,
                class: class_tag(i),
                symbol: alphabet.name(a).to_string(),
            })?;
            g.add_edge(format!("{}:{}", class_tag(i), alphabet.name(a)), i, source, a);
        }
    }
    debug_assert!(g.is_range_resolving());
    let status = if stable && shift.is_exact() {
        "terminated"
    } else if stable {
        "stable-up-to-horizon"
    } else {
        "approximate"
    };
    g.metadata.insert("cover".into(), json!("krieger"));
    g.metadata.insert("level".into(), json!(n));
    g.metadata.insert("status".into(), json!(status));
    if let Some(h) = shift.horizon() {
        g.metadata.insert("horizon".into(), json!(h));
    }
    Ok(g)
}

/// One stage `𝒦_k` of the augmented cover, with its projection to stage
/// `k - 1` when `k >= 3`.
#[derive(Debug, Clone)]
pub struct AugStage {
    pub k: usize,
    pub graph: CoverGraph,
    /// Vertex `i` of this stage maps to vertex `vertex_projection[i]` of
    /// stage `k - 1`.
    pub vertex_projection: Option<Vec<usize>>,
    pub edge_projection: Option<Vec<usize>>,
    pub previous: Option<Box<AugStage>>,
}

fn stage_key(shift: &Subshift, p: &PastProfile, alpha: &Word) -> String {
    let a = shift.alphabet();
    hex_digest(format!("{}|{}", p.serialize(a), a.format_word(alpha)).as_bytes())
}

/// `(P_{≤k-1}(αx), α)` vertices and `(P_{≤k}(αx), aα)` edges.
fn stage_over(shift: &Subshift, contexts: &[Context], k: usize) -> Result<CoverGraph> {
    let alphabet = shift.alphabet().clone();
    let words = shift.language_of_length(k - 1)?;
    // (profile at level k of αx, α) for every admissible αx
    let mut pairs: BTreeSet<(PastProfile, Word)> = BTreeSet::new();
    for c in contexts {
        for alpha in &words {
            let mut ctx = Some(c.clone());
            for &s in alpha.symbols().iter().rev() {
                ctx = ctx.and_then(|x| shift.prepend(&x, s));
            }
            if let Some(ctx) = ctx {
                pairs.insert((shift.profile_of(&ctx, k)?, alpha.clone()));
            }
        }
    }
    let mut vertex_set: BTreeMap<String, (PastProfile, Word)> = BTreeMap::new();
    for (p, alpha) in &pairs {
        let t = p.truncate(k - 1);
        vertex_set
            .entry(stage_key(shift, &t, alpha))
            .or_insert((t, alpha.clone()));
    }
    let mut g = CoverGraph::new(alphabet.clone());
    let mut index = BTreeMap::new();
    for (key, (p, alpha)) in &vertex_set {
        let tag = format!("{}#{}", alphabet.format_word(alpha), &key[..6]);
        index.insert(key.clone(), g.add_vertex(key.clone(), tag, Some(p.clone())));
    }
    let mut edges: BTreeMap<String, (usize, usize, Symbol)> = BTreeMap::new();
    for (p, alpha) in &pairs {
        let r = index[&stage_key(shift, &p.truncate(k - 1), alpha)];
        for a in p.set(1).iter().map(|w| w.symbols()[0]) {
            let a_alpha = alpha.prepend(a);
            let src_alpha = a_alpha.prefix(k - 1);
            let src_profile = p.source_profile(a);
            let Some(&s) = index.get(&stage_key(shift, &src_profile, &src_alpha)) else {
                return Err(KriegerError::SourceClassMissing {
                    level: k,
                    class: g.vertices[r].tag.clone(),
                    symbol: alphabet.name(a).to_string(),
                });
            };
            edges
                .entry(stage_key(shift, p, &a_alpha))
                .or_insert((r, s, a));
        }
    }
    for (key, (r, s, a)) in edges {
        g.add_edge(key, r, s, a);
    }
    g.metadata.insert("cover".into(), json!("augmented-stage"));
    g.metadata.insert("level".into(), json!(k));
    Ok(g)
}

pub fn build_augmented_stage(shift: &Subshift, k: usize) -> Result<AugStage> {
    if k < 2 {
        return Err(KriegerError::StageTooLow);
    }
    let contexts = shift.contexts(2 * k - 1)?;
    let graph = stage_over(shift, &contexts, k)?;
    if k == 2 {
        return Ok(AugStage {
            k,
            graph,
            vertex_projection: None,
            edge_projection: None,
            previous: None,
        });
    }
    let prev = stage_over(shift, &contexts, k - 1)?;
    let vertex_projection = graph
        .vertices
        .iter()
        .map(|v| {
            let p = v.profile.as_ref().unwrap().truncate(k - 2);
            let alpha = stage_alpha(&v.tag, shift);
            prev.vertex_index(&stage_key(shift, &p, &alpha.prefix(k - 2)))
        })
        .collect::<Option<Vec<_>>>();
    let edge_projection = graph
        .edges
        .iter()
        .map(|e| {
            // the edge datum is (P_{≤k}(αx), aα); rebuild it from its range
            let r = &graph.vertices[e.range];
            let alpha = stage_alpha(&r.tag, shift);
            let a_alpha = alpha.prepend(e.label);
            let full = edge_profile(shift, &contexts, &alpha, k, &e.id)?;
            let key = stage_key(shift, &full.truncate(k - 1), &a_alpha.prefix(k - 1));
            prev.edges.iter().position(|pe| pe.id == key)
        })
        .collect::<Option<Vec<_>>>();
    Ok(AugStage {
        k,
        graph,
        vertex_projection,
        edge_projection,
        previous: Some(Box::new(AugStage {
            k: k - 1,
            graph: prev,
            vertex_projection: None,
            edge_projection: None,
            previous: None,
        })),
    })
}

fn stage_alpha(tag: &str, shift: &Subshift) -> Word {
    let text = tag.rsplit_once('#').map_or(tag, |(a, _)| a);
    shift.alphabet().parse_word(text).unwrap_or_default()
}

/// Recovers the level-`k` profile carried by an edge of stage `k` by
/// matching its key against the admissible `(αx)` contexts.
fn edge_profile(
    shift: &Subshift,
    contexts: &[Context],
    alpha: &Word,
    k: usize,
    edge_key: &str,
) -> Option<PastProfile> {
    for c in contexts {
        let mut ctx = Some(c.clone());
        for &s in alpha.symbols().iter().rev() {
            ctx = ctx.and_then(|x| shift.prepend(&x, s));
        }
        let Some(ctx) = ctx else { continue };
        let p = shift.profile_of(&ctx, k).ok()?;
        for a in p.set(1).iter().map(|w| w.symbols()[0]) {
            if stage_key(shift, &p, &alpha.prepend(a)) == edge_key {
                return Some(p);
            }
        }
    }
    None
}

/// For each sample `x`, compares the number of admissible `a·x` with the
/// number of edges whose range is the class of `x`.
pub fn fiber_bijection_check(
    shift: &Subshift,
    g: &CoverGraph,
    samples: &[RightContext],
) -> Result<bool> {
    let level = g
        .vertices
        .first()
        .and_then(|v| v.profile.as_ref())
        .map(PastProfile::level)
        .ok_or(KriegerError::MissingProfiles)?;
    for x in samples {
        let ctx = shift.resolve(x)?;
        let p = shift.profile_of(&ctx, level)?;
        let Some(v) = g.vertices.iter().position(|v| v.profile.as_ref() == Some(&p)) else {
            return Err(ShiftError::InvalidContext("sample has no class in the graph".into()).into());
        };
        let preimages = shift
            .alphabet()
            .symbols()
            .filter(|&a| shift.prepend(&ctx, a).is_some())
            .count();
        if preimages != g.edges_into(v).count() {
            return Ok(false);
        }
    }
    Ok(true)
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
    fn partition_counts() {
        assert_eq!(profile_partition(&shift(SubshiftSpec::full(2)), 3).unwrap().len(), 1);
        assert_eq!(profile_partition(&shift(golden_mean()), 1).unwrap().len(), 2);
        assert_eq!(profile_partition(&shift(even_shift()), 1).unwrap().len(), 2);
        assert_eq!(profile_partition(&shift(even_shift()), 3).unwrap().len(), 3);
    }

    #[test]
    fn termination_levels() {
        let t = termination_level(&shift(SubshiftSpec::full(2)), 5).unwrap();
        assert_eq!(t.level, Some(1));
        assert_eq!(termination_level(&shift(golden_mean()), 5).unwrap().level, Some(1));
        let t = termination_level(&shift(even_shift()), 5).unwrap();
        assert_eq!(t.level, Some(2));
        assert_eq!(t.class_counts, vec![2, 3, 3]);
        assert!(t.exact);
    }

    #[test]
    fn krieger_graphs() {
        let g = build_krieger_graph(&shift(SubshiftSpec::full(2)), 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 2));
        let g = build_krieger_graph(&shift(golden_mean()), 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 3));
        assert_eq!(g.adjacency(), vec![vec![1, 1], vec![1, 0]]);
        let g = build_krieger_graph(&shift(even_shift()), 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 5));
        assert_eq!(g.metadata["status"], "terminated");
    }

    #[test]
    fn below_termination_is_stamped_or_fails() {
        let s = shift(even_shift());
        match build_krieger_graph(&s, 1) {
            Ok(g) => assert_eq!(g.metadata["status"], "approximate"),
            Err(KriegerError::SourceClassMissing { .. }) => {}
            Err(e) => panic!("{e}"),
        }
        let g = build_krieger_approximation(&s, 1).unwrap();
        assert_eq!(g.metadata["status"], "approximate");
    }

    #[test]
    fn path_language_matches_even_shift() {
        let s = shift(even_shift());
        let g = build_krieger_graph(&s, 2).unwrap();
        let l3: BTreeSet<_> = s.language_of_length(3).unwrap().into_iter().collect();
        assert_eq!(g.path_language(3), l3);
    }

    #[test]
    fn path_language_reads_forward() {
        // "001" forbidden: 100 is allowed but its reverse is not
        let s = shift(SubshiftSpec::sft(2, vec![digits("001")]));
        let n = termination_level(&s, 6).unwrap().level.unwrap();
        let g = build_krieger_graph(&s, n).unwrap();
        for len in 1..=6 {
            let l: BTreeSet<_> = s.language_of_length(len).unwrap().into_iter().collect();
            assert_eq!(g.path_language(len), l, "length {len}");
        }
    }

    #[test]
    fn stages() {
        let st = build_augmented_stage(&shift(SubshiftSpec::full(2)), 2).unwrap();
        assert_eq!((st.graph.vertex_count(), st.graph.edge_count()), (2, 4));
        let st = build_augmented_stage(&shift(golden_mean()), 2).unwrap();
        assert_eq!((st.graph.vertex_count(), st.graph.edge_count()), (2, 3));
        let st = build_augmented_stage(&shift(SubshiftSpec::full(1)), 2).unwrap();
        assert_eq!((st.graph.vertex_count(), st.graph.edge_count()), (1, 1));
    }

    #[test]
    fn stage_projection_is_surjective_morphism() {
        for spec in [golden_mean(), even_shift(), SubshiftSpec::full(2)] {
            let s = shift(spec);
            let st = build_augmented_stage(&s, 3).unwrap();
            let prev = &st.previous.as_ref().unwrap().graph;
            let vp = st.vertex_projection.as_ref().expect("vertex projection");
            let ep = st.edge_projection.as_ref().expect("edge projection");
            for (i, e) in st.graph.edges.iter().enumerate() {
                let pe = &prev.edges[ep[i]];
                assert_eq!(pe.range, vp[e.range]);
                assert_eq!(pe.source, vp[e.source]);
            }
            let hit_v: BTreeSet<_> = vp.iter().collect();
            let hit_e: BTreeSet<_> = ep.iter().collect();
            assert_eq!(hit_v.len(), prev.vertex_count());
            assert_eq!(hit_e.len(), prev.edge_count());
        }
    }

    #[test]
    fn fiber_counts() {
        let s = shift(golden_mean());
        let g = build_krieger_graph(&s, 1).unwrap();
        let samples = vec![
            RightContext::SftWord(digits("0")),
            RightContext::SftWord(digits("1")),
            RightContext::SftWord(digits("0101")),
        ];
        assert!(fiber_bijection_check(&s, &g, &samples).unwrap());
    }

    #[test]
    fn square_gap_keeps_growing() {
        let s = shift(square_gap(18));
        let counts: Vec<usize> = (1..=6)
            .map(|k| profile_partition(&s, k).unwrap().len())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
    }
}
