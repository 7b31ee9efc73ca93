//! One-sided subshifts: presentations, languages, right contexts and past
//! profiles.
//!
//! Points of a subshift are never stored. A point `x` enters the
//! computations only through a finite surrogate, its [`RightContext`]. For
//! shifts with a finite labeled-graph presentation (full shifts, SFTs and
//! sofic shifts) the surrogate is the set of vertices from which `x` can be
//! read, which determines every past set `P_k(x)` exactly. For oracle shifts
//! the surrogate is a finite prefix of `x`, valid up to the oracle horizon.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use crate::relation::{TransitionRelation, VertexSet};
use crate::word::{Alphabet, Symbol, Word};

pub const DEFAULT_MONOID_CAP: usize = 4096;
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShiftError {
    #[error("word length {requested} exceeds the oracle horizon {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },
    #[error("relation monoid exceeds the configured bound of {cap} elements")]
    MonoidBudgetExceeded { cap: usize },
    #[error("{what} exceeds the configured budget of {cap}")]
    BudgetExceeded { what: &'static str, cap: usize },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid subshift: {0}")]
    InvalidSpec(String),
    #[error("unsupported for this subshift: {0}")]
    Unsupported(String),
    #[error("the subshift is empty")]
    EmptyShift,
}

pub type Result<T, E = ShiftError> = std::result::Result<T, E>;

/// One edge of a labeled graph, read forward from `src` to `dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledEdge {
    pub src: usize,
    pub dst: usize,
    pub label: Symbol,
}

/// A finite labeled directed graph. The points it presents are the label
/// sequences of right-infinite paths read forward, so the shift drops the
/// first edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    vertices: Vec<String>,
    edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    /// Builds an essential presentation: every vertex needs an outgoing and
    /// an incoming edge.
    pub fn new(alphabet: Alphabet, vertices: Vec<String>, edges: Vec<LabeledEdge>) -> Result<Self> {
        let g = Self::new_unchecked(alphabet, vertices, edges)?;
        for v in 0..g.vertex_count() {
            if !g.edges.iter().any(|e| e.src == v) {
                return Err(ShiftError::InvalidSpec(format!(
                    "vertex {} has no outgoing edge",
                    g.vertices[v]
                )));
            }
            if !g.edges.iter().any(|e| e.dst == v) {
                return Err(ShiftError::InvalidSpec(format!(
                    "vertex {} has no incoming edge",
                    g.vertices[v]
                )));
            }
        }
        Ok(g)
    }

    fn new_unchecked(
        alphabet: Alphabet,
        vertices: Vec<String>,
        mut edges: Vec<LabeledEdge>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(ShiftError::EmptyShift);
        }
        for e in &edges {
            if e.src >= vertices.len() || e.dst >= vertices.len() {
                return Err(ShiftError::InvalidSpec("edge endpoint out of range".into()));
            }
            if e.label as usize >= alphabet.size() {
                return Err(ShiftError::InvalidSpec(format!(
                    "edge label {} outside the alphabet",
                    e.label
                )));
            }
        }
        edges.sort();
        edges.dedup();
        Ok(LabeledGraph {
            alphabet,
            vertices,
            edges,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// The relation of a single symbol.
    pub fn symbol_relation(&self, a: Symbol) -> TransitionRelation {
        let mut r = TransitionRelation::empty(self.vertex_count());
        for e in self.edges.iter().filter(|e| e.label == a) {
            r.insert(e.src, e.dst);
        }
        r
    }

    /// `(u, v)` related iff a path labeled `w` runs from `u` to `v`; the empty
    /// word gives the identity.
    pub fn relation_of_word(&self, w: &Word) -> TransitionRelation {
        w.symbols().iter().fold(
            TransitionRelation::identity(self.vertex_count()),
            |acc, &a| acc.compose(&self.symbol_relation(a)),
        )
    }

    /// Removes vertices without an infinite forward path. Returns `None` when
    /// nothing survives.
    fn prune_dead_ends(self) -> Option<LabeledGraph> {
        let n = self.vertex_count();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] && !self.edges.iter().any(|e| e.src == v && alive[e.dst]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for v in 0..n {
            if alive[v] {
                remap[v] = names.len();
                names.push(self.vertices[v].clone());
            }
        }
        if names.is_empty() {
            return None;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.src] && alive[e.dst])
            .map(|e| LabeledEdge {
                src: remap[e.src],
                dst: remap[e.dst],
                label: e.label,
            })
            .collect();
        LabeledGraph::new_unchecked(self.alphabet, names, edges).ok()
    }
}

/// Word-membership predicate of an oracle subshift.
pub type MembershipFn = dyn Fn(&[Symbol]) -> bool + Send + Sync;

/// A subshift known only through a membership predicate, correct for words
/// of length at most `horizon`. The predicate must be factor-closed.
#[derive(Clone)]
pub struct OracleSpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub horizon: usize,
    pub predicate: Arc<MembershipFn>,
}

impl fmt::Debug for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleSpec")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl OracleSpec {
    /// Binary shift whose blocks of zeros between two ones have perfect-square
    /// lengths (`0, 1, 4, 9, …`). Not sofic.
    pub fn square_gap(horizon: usize) -> Self {
        OracleSpec {
            name: "square-gap".into(),
            alphabet: Alphabet::numeric(2),
            horizon,
            predicate: Arc::new(square_gap_member),
        }
    }
}

fn is_square(n: usize) -> bool {
    let r = (n as f64).sqrt() as usize;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
}

fn square_gap_member(w: &[Symbol]) -> bool {
    if w.iter().any(|&s| s > 1) {
        return false;
    }
    let ones: Vec<usize> = w
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 1)
        .map(|(i, _)| i)
        .collect();
    ones.windows(2).all(|p| is_square(p[1] - p[0] - 1))
}

/// A presentation of a one-sided subshift.
#[derive(Clone, Debug)]
pub enum SubshiftSpec {
    Full(Alphabet),
    SftForbidden {
        alphabet: Alphabet,
        forbidden: Vec<Word>,
    },
    SoficGraph(LabeledGraph),
    Oracle(OracleSpec),
}

impl SubshiftSpec {
    pub fn full(m: usize) -> Self {
        SubshiftSpec::Full(Alphabet::numeric(m))
    }

    pub fn sft(m: usize, forbidden: Vec<Word>) -> Self {
        SubshiftSpec::SftForbidden {
            alphabet: Alphabet::numeric(m),
            forbidden,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            SubshiftSpec::Full(a) => a,
            SubshiftSpec::SftForbidden { alphabet, .. } => alphabet,
            SubshiftSpec::SoficGraph(g) => g.alphabet(),
            SubshiftSpec::Oracle(o) => &o.alphabet,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SubshiftSpec::Full(_) => "full",
            SubshiftSpec::SftForbidden { .. } => "sft",
            SubshiftSpec::SoficGraph(_) => "sofic",
            SubshiftSpec::Oracle(_) => "oracle",
        }
    }
}

/// Finite stand-in for a point `x` of the subshift.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RightContext {
    /// A prefix of `x` at least as long as the SFT memory.
    SftWord(Word),
    /// The set of presentation vertices from which `x` is readable.
    FutureSet(Vec<usize>),
    /// The first `depth` letters of `word`, for oracle shifts.
    OracleWord { word: Word, depth: usize },
}

/// Resolved form of a [`RightContext`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Context {
    Set(VertexSet),
    Word(Word),
}

/// The family `(P_1, …, P_k)` of past sets of a context. Each set is sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PastProfile {
    sets: Vec<Vec<Word>>,
}

impl PastProfile {
    pub fn new(mut sets: Vec<Vec<Word>>) -> Self {
        for s in &mut sets {
            s.sort();
            s.dedup();
        }
        PastProfile { sets }
    }

    pub fn level(&self) -> usize {
        self.sets.len()
    }

    /// `P_j` for `1 <= j <= level`.
    pub fn set(&self, j: usize) -> &[Word] {
        &self.sets[j - 1]
    }

    pub fn sets(&self) -> &[Vec<Word>] {
        &self.sets
    }

    pub fn contains(&self, w: &Word) -> bool {
        let j = w.len();
        j >= 1 && j <= self.level() && self.sets[j - 1].binary_search(w).is_ok()
    }

    pub fn truncate(&self, k: usize) -> PastProfile {
        PastProfile {
            sets: self.sets[..k.min(self.level())].to_vec(),
        }
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// `{ν : νa ∈ self}` restricted to lengths `1..level`, i.e. the profile of
    /// `a·x` one level down.
    pub fn source_profile(&self, a: Symbol) -> PastProfile {
        let sets = (1..self.level())
            .map(|j| {
                self.sets[j]
                    .iter()
                    .filter(|w| *w.symbols().last().unwrap() == a)
                    .map(|w| w.prefix(j))
                    .collect()
            })
            .collect();
        PastProfile::new(sets)
    }

    /// Canonical text form: words joined by `,`, levels joined by `;`.
    pub fn serialize(&self, alphabet: &Alphabet) -> String {
        self.sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|w| alphabet.format_word(w))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self, alphabet: &Alphabet) -> String {
        hex_digest(self.serialize(alphabet).as_bytes())
    }
}

/// SHA-256 of `bytes` as lowercase hex.
pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftOptions {
    /// Maximum number of distinct relations in the transition monoid.
    pub monoid_cap: usize,
    /// Maximum number of words or contexts produced by one enumeration.
    pub enumeration_cap: usize,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions {
            monoid_cap: DEFAULT_MONOID_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug)]
struct Presentation {
    graph: LabeledGraph,
    /// For SFT inputs, the window word each vertex stands for.
    windows: Option<Vec<Word>>,
    memory: usize,
    symbol_relations: Vec<TransitionRelation>,
}

/// The distinct relations of nonempty words, closed under right
/// multiplication by symbol relations.
#[derive(Debug, Clone)]
pub struct RelationMonoid {
    pub elements: Vec<TransitionRelation>,
}

/// A validated subshift with lazily computed presentation data.
#[derive(Debug)]
pub struct Subshift {
    spec: SubshiftSpec,
    options: ShiftOptions,
    presentation: Option<Presentation>,
    monoid: OnceLock<Result<RelationMonoid>>,
    future_sets: OnceLock<Result<Vec<VertexSet>>>,
}

impl Subshift {
    pub fn new(spec: SubshiftSpec) -> Result<Self> {
        Self::with_options(spec, ShiftOptions::default())
    }

    pub fn with_options(spec: SubshiftSpec, options: ShiftOptions) -> Result<Self> {
        let presentation = match &spec {
            SubshiftSpec::Full(a) => Some(sft_presentation(a, &[])?),
            SubshiftSpec::SftForbidden { alphabet, forbidden } => {
                Some(sft_presentation(alphabet, forbidden)?)
            }
            SubshiftSpec::SoficGraph(g) => Some(Presentation {
                symbol_relations: g.alphabet().symbols().map(|a| g.symbol_relation(a)).collect(),
                graph: g.clone(),
                windows: None,
                memory: 0,
            }),
            SubshiftSpec::Oracle(o) => {
                if o.horizon == 0 {
                    return Err(ShiftError::InvalidSpec("oracle horizon must be positive".into()));
                }
                None
            }
        };
        Ok(Subshift {
            spec,
            options,
            presentation,
            monoid: OnceLock::new(),
            future_sets: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &SubshiftSpec {
        &self.spec
    }

    pub fn options(&self) -> ShiftOptions {
        self.options
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.spec.alphabet()
    }

    /// True when every computation is exact (finite presentation available).
    pub fn is_exact(&self) -> bool {
        self.presentation.is_some()
    }

    pub fn horizon(&self) -> Option<usize> {
        match &self.spec {
            SubshiftSpec::Oracle(o) => Some(o.horizon),
            _ => None,
        }
    }

    /// The labeled graph presentation (dead ends pruned for SFT inputs).
    pub fn presentation(&self) -> Option<&LabeledGraph> {
        self.presentation.as_ref().map(|p| &p.graph)
    }

    /// SFT memory: longest forbidden word length minus one.
    pub fn memory(&self) -> usize {
        self.presentation.as_ref().map_or(0, |p| p.memory)
    }

    fn oracle(&self) -> Option<&OracleSpec> {
        match &self.spec {
            SubshiftSpec::Oracle(o) => Some(o),
            _ => None,
        }
    }

    fn check_horizon(&self, len: usize) -> Result<()> {
        match self.oracle() {
            Some(o) if len > o.horizon => Err(ShiftError::HorizonExceeded {
                requested: len,
                horizon: o.horizon,
            }),
            _ => Ok(()),
        }
    }

    fn oracle_member(&self, w: &[Symbol]) -> bool {
        let o = self.oracle().expect("oracle spec");
        w.iter().all(|&s| (s as usize) < o.alphabet.size()) && (o.predicate)(w)
    }

    /// `L_k(X)` in lexicographic order.
    pub fn language_of_length(&self, k: usize) -> Result<Vec<Word>> {
        self.check_horizon(k)?;
        let m = self.alphabet().size() as Symbol;
        let cap = self.options.enumeration_cap;
        let mut out = Vec::new();
        match &self.presentation {
            Some(p) => {
                let n = p.graph.vertex_count();
                let mut stack = vec![(Word::empty(), VertexSet::full(n))];
                while let Some((w, set)) = stack.pop() {
                    if w.len() == k {
                        out.push(w);
                        if out.len() > cap {
                            return Err(ShiftError::BudgetExceeded { what: "language", cap });
                        }
                        continue;
                    }
                    for a in (0..m).rev() {
                        let next = p.symbol_relations[a as usize].image(&set);
                        if !next.is_empty() {
                            let mut v = w.0.clone();
                            v.push(a);
                            stack.push((Word(v), next));
                        }
                    }
                }
            }
            None => {
                let mut stack = vec![Word::empty()];
                while let Some(w) = stack.pop() {
                    if w.len() == k {
                        out.push(w);
                        if out.len() > cap {
                            return Err(ShiftError::BudgetExceeded { what: "language", cap });
                        }
                        continue;
                    }
                    for a in (0..m).rev() {
                        let mut v = w.0.clone();
                        v.push(a);
                        if self.oracle_member(&v) {
                            stack.push(Word(v));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_in_language(&self, w: &Word) -> Result<bool> {
        self.check_horizon(w.len())?;
        if !w.all_below(self.alphabet().size()) {
            return Ok(false);
        }
        Ok(match &self.presentation {
            Some(p) => {
                let mut set = VertexSet::full(p.graph.vertex_count());
                for &a in w.symbols() {
                    set = p.symbol_relations[a as usize].image(&set);
                    if set.is_empty() {
                        return Ok(false);
                    }
                }
                true
            }
            None => self.oracle_member(w.symbols()),
        })
    }

    fn require_presentation(&self, what: &str) -> Result<&Presentation> {
        self.presentation
            .as_ref()
            .ok_or_else(|| ShiftError::Unsupported(format!("{what} needs a finite presentation")))
    }

    /// The monoid generated by the symbol relations of the presentation.
    pub fn relation_monoid(&self) -> Result<&RelationMonoid> {
        let p = self.require_presentation("the relation monoid")?;
        self.monoid
            .get_or_init(|| relation_monoid(&p.symbol_relations, self.options.monoid_cap))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Every set `S(x) = {v : x is readable from v}` for points `x`, sorted.
    pub fn achievable_future_sets(&self) -> Result<&[VertexSet]> {
        self.require_presentation("achievable future sets")?;
        self.future_sets
            .get_or_init(|| {
                let n = self.presentation.as_ref().unwrap().graph.vertex_count();
                let monoid = self.relation_monoid()?;
                Ok(future_sets_from_monoid(n, monoid))
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub(crate) fn resolve(&self, ctx: &RightContext) -> Result<Context> {
        match (ctx, &self.presentation) {
            (RightContext::SftWord(w), Some(p)) if p.windows.is_some() => {
                if w.len() < p.memory {
                    return Err(ShiftError::InvalidContext(format!(
                        "word of length {} is shorter than the memory {}",
                        w.len(),
                        p.memory
                    )));
                }
                if !self.is_in_language(w)? {
                    return Err(ShiftError::InvalidContext("word not in the language".into()));
                }
                let window = w.prefix(p.memory);
                let v = p
                    .windows
                    .as_ref()
                    .unwrap()
                    .iter()
                    .position(|x| *x == window)
                    .ok_or_else(|| ShiftError::InvalidContext("window not extendable".into()))?;
                Ok(Context::Set(VertexSet::singleton(p.graph.vertex_count(), v)))
            }
            (RightContext::FutureSet(vs), Some(p)) => {
                let n = p.graph.vertex_count();
                if vs.iter().any(|&v| v >= n) {
                    return Err(ShiftError::InvalidContext("vertex out of range".into()));
                }
                let set = VertexSet::from_indices(n, vs.iter().copied());
                if !self.achievable_future_sets()?.contains(&set) {
                    return Err(ShiftError::InvalidContext(format!(
                        "{vs:?} is not an achievable future set"
                    )));
                }
                Ok(Context::Set(set))
            }
            (RightContext::OracleWord { word, depth }, None) => {
                let horizon = self.horizon().unwrap();
                if *depth > word.len() || *depth > horizon {
                    return Err(ShiftError::InvalidContext(format!(
                        "depth {depth} exceeds the word length or horizon"
                    )));
                }
                let w = word.prefix(*depth);
                if !self.oracle_member(w.symbols()) {
                    return Err(ShiftError::InvalidContext("word not in the language".into()));
                }
                Ok(Context::Word(w))
            }
            _ => Err(ShiftError::InvalidContext(
                "context kind does not match the subshift".into(),
            )),
        }
    }

    pub(crate) fn to_right_context(&self, ctx: &Context) -> RightContext {
        match ctx {
            Context::Set(s) => {
                let p = self.presentation.as_ref().unwrap();
                match &p.windows {
                    Some(windows) if s.len() == 1 => {
                        RightContext::SftWord(windows[s.iter().next().unwrap()].clone())
                    }
                    _ => RightContext::FutureSet(s.to_vec()),
                }
            }
            Context::Word(w) => RightContext::OracleWord {
                word: w.clone(),
                depth: w.len(),
            },
        }
    }

    /// `(P_1(x), …, P_k(x))` for the point represented by `ctx`.
    pub fn past_profile(&self, k: usize, ctx: &RightContext) -> Result<PastProfile> {
        let c = self.resolve(ctx)?;
        self.profile_of(&c, k)
    }

    pub(crate) fn profile_of(&self, ctx: &Context, k: usize) -> Result<PastProfile> {
        let m = self.alphabet().size() as Symbol;
        let mut sets: Vec<Vec<Word>> = vec![Vec::new(); k];
        match ctx {
            Context::Set(s) => {
                let p = self.require_presentation("future-set contexts")?;
                let mut frontier = vec![(Word::empty(), s.clone())];
                for level in sets.iter_mut() {
                    let mut next = Vec::new();
                    for (w, set) in &frontier {
                        for a in 0..m {
                            let pred = p.symbol_relations[a as usize].preimage(set);
                            if !pred.is_empty() {
                                next.push((w.prepend(a), pred));
                            }
                        }
                    }
                    if next.len() > self.options.enumeration_cap {
                        return Err(ShiftError::BudgetExceeded {
                            what: "past set",
                            cap: self.options.enumeration_cap,
                        });
                    }
                    level.extend(next.iter().map(|(w, _)| w.clone()));
                    frontier = next;
                }
            }
            Context::Word(x) => {
                self.check_horizon(k + x.len())?;
                let mut frontier = vec![Word::empty()];
                for level in sets.iter_mut() {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for a in 0..m {
                            let cand = w.prepend(a);
                            if self.oracle_member(cand.concat(x).symbols()) {
                                next.push(cand);
                            }
                        }
                    }
                    level.extend(next.iter().cloned());
                    frontier = next;
                }
            }
        }
        Ok(PastProfile::new(sets))
    }

    /// Context of `a·x`, or `None` when `a·x` is not a point.
    pub(crate) fn prepend(&self, ctx: &Context, a: Symbol) -> Option<Context> {
        match ctx {
            Context::Set(s) => {
                let p = self.presentation.as_ref()?;
                let pred = p.symbol_relations[a as usize].preimage(s);
                (!pred.is_empty()).then_some(Context::Set(pred))
            }
            Context::Word(w) => {
                let cand = w.prepend(a);
                (cand.len() <= self.horizon().unwrap() && self.oracle_member(cand.symbols()))
                    .then_some(Context::Word(cand))
            }
        }
    }

    /// Contexts standing for all points. For oracle shifts these are the
    /// words of length `horizon - reserve`, leaving room for profiles up to
    /// level `reserve`.
    pub(crate) fn contexts(&self, reserve: usize) -> Result<Vec<Context>> {
        match &self.presentation {
            Some(_) => Ok(self
                .achievable_future_sets()?
                .iter()
                .cloned()
                .map(Context::Set)
                .collect()),
            None => {
                let horizon = self.horizon().unwrap();
                if reserve > horizon {
                    return Err(ShiftError::HorizonExceeded {
                        requested: reserve,
                        horizon,
                    });
                }
                Ok(self
                    .language_of_length(horizon - reserve)?
                    .into_iter()
                    .map(Context::Word)
                    .collect())
            }
        }
    }

    /// Public view of [`Subshift::contexts`].
    pub fn sample_contexts(&self, reserve: usize) -> Result<Vec<RightContext>> {
        Ok(self
            .contexts(reserve)?
            .iter()
            .map(|c| self.to_right_context(c))
            .collect())
    }
}

fn sft_presentation(alphabet: &Alphabet, forbidden: &[Word]) -> Result<Presentation> {
    let m = alphabet.size();
    for (i, f) in forbidden.iter().enumerate() {
        if f.len() < 2 {
            return Err(ShiftError::InvalidSpec("forbidden words need length >= 2".into()));
        }
        if !f.all_below(m) {
            return Err(ShiftError::InvalidSpec("forbidden word outside the alphabet".into()));
        }
        for (j, g) in forbidden.iter().enumerate() {
            if i != j && g.contains_factor(f) {
                return Err(ShiftError::InvalidSpec(
                    "forbidden set is not factor-minimal".into(),
                ));
            }
        }
    }
    let memory = forbidden.iter().map(Word::len).max().map_or(0, |l| l - 1);
    let admissible = |w: &Word| !forbidden.iter().any(|f| w.contains_factor(f));
    let windows: Vec<Word> = Word::all_of_length(m, memory)
        .into_iter()
        .filter(|w| admissible(w))
        .collect();
    let index: HashMap<&Word, usize> = windows.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut edges = Vec::new();
    for (i, w) in windows.iter().enumerate() {
        for b in 0..m as Symbol {
            let mut ext = w.0.clone();
            ext.push(b);
            let ext = Word(ext);
            if !admissible(&ext) {
                continue;
            }
            let label = ext.symbols()[0];
            let next = ext.suffix_from(1);
            if let Some(&j) = index.get(&next) {
                edges.push(LabeledEdge {
                    src: i,
                    dst: j,
                    label,
                });
            }
        }
    }
    let names = windows.iter().map(|w| format!("[{}]", alphabet.format_word(w))).collect();
    let graph = LabeledGraph::new_unchecked(alphabet.clone(), names, edges)?
        .prune_dead_ends()
        .ok_or(ShiftError::EmptyShift)?;
    let windows = graph
        .vertex_names()
        .iter()
        .map(|n| alphabet.parse_word(&n[1..n.len() - 1]).unwrap())
        .collect();
    Ok(Presentation {
        symbol_relations: alphabet.symbols().map(|a| graph.symbol_relation(a)).collect(),
        graph,
        windows: Some(windows),
        memory,
    })
}

fn relation_monoid(generators: &[TransitionRelation], cap: usize) -> Result<RelationMonoid> {
    let mut seen: HashMap<TransitionRelation, usize> = HashMap::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    for g in generators {
        if !seen.contains_key(g) {
            seen.insert(g.clone(), elements.len());
            elements.push(g.clone());
            queue.push_back(elements.len() - 1);
        }
    }
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let prod = elements[i].compose(g);
            if !seen.contains_key(&prod) {
                if elements.len() >= cap {
                    return Err(ShiftError::MonoidBudgetExceeded { cap });
                }
                seen.insert(prod.clone(), elements.len());
                elements.push(prod);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(RelationMonoid { elements })
}

/// `S` is achievable iff `S = R⁻¹(T_E)` where `R` is the relation of a word
/// (possibly empty), `E` is an idempotent relation of a nonempty word and
/// `T_E = {u : u E t, t E t}` is the set of starts of infinite `E`-chains.
fn future_sets_from_monoid(n: usize, monoid: &RelationMonoid) -> Vec<VertexSet> {
    let mut targets = BTreeSet::new();
    for e in &monoid.elements {
        if e.compose(e) != *e {
            continue;
        }
        let diag = VertexSet::from_indices(n, (0..n).filter(|&t| e.contains(t, t)));
        let starts = e.preimage(&diag);
        if !starts.is_empty() {
            targets.insert(starts.to_vec());
        }
    }
    let identity = TransitionRelation::identity(n);
    let mut out = BTreeSet::new();
    for t in &targets {
        let t = VertexSet::from_indices(n, t.iter().copied());
        for r in std::iter::once(&identity).chain(&monoid.elements) {
            let s = r.preimage(&t);
            if !s.is_empty() {
                out.insert(s.to_vec());
            }
        }
    }
    out.into_iter()
        .map(|v| VertexSet::from_indices(n, v))
        .collect()
}

/// Free-standing version of [`Subshift::achievable_future_sets`] for a bare
/// presentation.
pub fn achievable_future_sets(g: &LabeledGraph, monoid_cap: usize) -> Result<Vec<VertexSet>> {
    let gens: Vec<_> = g.alphabet().symbols().map(|a| g.symbol_relation(a)).collect();
    let monoid = relation_monoid(&gens, monoid_cap)?;
    Ok(future_sets_from_monoid(g.vertex_count(), &monoid))
}

/// Common fixtures.
pub mod fixtures {
    use super::*;

    fn graph(vertices: &[&str], edges: &[(&str, &str, Symbol)], m: usize) -> LabeledGraph {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let edges = edges
            .iter()
            .map(|&(s, d, l)| LabeledEdge {
                src: names.iter().position(|v| v == s).unwrap(),
                dst: names.iter().position(|v| v == d).unwrap(),
                label: l,
            })
            .collect();
        LabeledGraph::new(Alphabet::numeric(m), names, edges).expect("valid fixture")
    }

    /// Even shift: an even number of zeros between any two ones.
    pub fn even_shift_graph() -> LabeledGraph {
        graph(&["v1", "v2"], &[("v1", "v1", 1), ("v1", "v2", 0), ("v2", "v1", 0)], 2)
    }

    /// Golden mean shift as a labeled graph (no two consecutive ones).
    pub fn golden_mean_graph() -> LabeledGraph {
        graph(&["v1", "v2"], &[("v1", "v1", 0), ("v1", "v2", 1), ("v2", "v1", 0)], 2)
    }

    /// Full shift on `m` symbols as a one-vertex graph.
    pub fn full_shift_graph(m: usize) -> LabeledGraph {
        let edges: Vec<(&str, &str, Symbol)> = (0..m as Symbol).map(|a| ("v", "v", a)).collect();
        graph(&["v"], &edges, m)
    }

    /// Disjoint union of the full one-shifts on `0` and on `1`.
    pub fn two_loops_graph() -> LabeledGraph {
        graph(&["v1", "v2"], &[("v1", "v1", 0), ("v2", "v2", 1)], 2)
    }

    pub fn even_shift() -> SubshiftSpec {
        SubshiftSpec::SoficGraph(even_shift_graph())
    }

    pub fn golden_mean() -> SubshiftSpec {
        SubshiftSpec::sft(2, vec![crate::word::digits("11")])
    }

    pub fn square_gap(horizon: usize) -> SubshiftSpec {
        SubshiftSpec::Oracle(OracleSpec::square_gap(horizon))
    }
}
