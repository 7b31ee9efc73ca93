//! Finite cover graphs `r, s : E → V` with labels and positive rational
//! weights, together with DOT and JSON exchange formats.
//!
//! An edge `e` goes from `s(e)` to `r(e)`: reading a point forward walks the
//! arrows from source to range, so a path `e_1, e_2, …` satisfies
//! `s(e_{i+1}) = r(e_i)` and spells `label(e_1) label(e_2) …`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde_json::{json, Value};

use crate::shift::PastProfile;
use crate::word::{Alphabet, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("graph is empty")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverVertex {
    /// Opaque canonical key, stable across runs.
    pub key: String,
    /// Short human-readable name.
    pub tag: String,
    pub profile: Option<PastProfile>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEdge {
    pub id: String,
    pub range: usize,
    pub source: usize,
    pub label: Symbol,
    pub weight: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverGraph {
    pub alphabet: Alphabet,
    pub vertices: Vec<CoverVertex>,
    pub edges: Vec<CoverEdge>,
    pub metadata: BTreeMap<String, Value>,
}

pub fn one() -> BigRational {
    BigRational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits: BigInt = format!("{}{}", int.trim_start_matches(['-', '+']), frac)
            .parse()
            .ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(digits, den);
        return Some(if neg { -r } else { r });
    }
    t.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl CoverGraph {
    pub fn new(alphabet: Alphabet) -> Self {
        CoverGraph {
            alphabet,
            vertices: Vec::new(),
            edges: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, key: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.key == key)
    }

    pub fn add_vertex(&mut self, key: String, tag: String, profile: Option<PastProfile>) -> usize {
        self.vertices.push(CoverVertex { key, tag, profile });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, id: String, range: usize, source: usize, label: Symbol) -> usize {
        self.add_weighted_edge(id, range, source, label, one())
    }

    pub fn add_weighted_edge(
        &mut self,
        id: String,
        range: usize,
        source: usize,
        label: Symbol,
        weight: BigRational,
    ) -> usize {
        self.edges.push(CoverEdge {
            id,
            range,
            source,
            label,
            weight,
        });
        self.edges.len() - 1
    }

    /// Edges whose range is `v`.
    pub fn edges_into(&self, v: usize) -> impl Iterator<Item = (usize, &CoverEdge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.range == v)
    }

    /// Structural invariants: endpoints exist, ids are unique, weights are
    /// positive and labels lie in the alphabet.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertex_count();
        let mut ids = BTreeSet::new();
        for e in &self.edges {
            if e.range >= n || e.source >= n {
                return Err(GraphError::Malformed(format!("edge {} has a dangling endpoint", e.id)));
            }
            if !e.weight.is_positive() {
                return Err(GraphError::Malformed(format!("edge {} has non-positive weight", e.id)));
            }
            if e.label as usize >= self.alphabet.size() {
                return Err(GraphError::Malformed(format!("edge {} label out of range", e.id)));
            }
            if !ids.insert(&e.id) {
                return Err(GraphError::Malformed(format!("duplicate edge id {}", e.id)));
            }
        }
        let keys: BTreeSet<_> = self.vertices.iter().map(|v| &v.key).collect();
        if keys.len() != n {
            return Err(GraphError::Malformed("duplicate vertex key".into()));
        }
        Ok(())
    }

    /// Edges sharing a range vertex carry distinct labels.
    pub fn is_range_resolving(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|e| seen.insert((e.range, e.label)))
    }

    /// `A[v][u]` = number of edges with range `v` and source `u`.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u64; n]; n];
        for e in &self.edges {
            a[e.range][e.source] += 1;
        }
        a
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = (0..self.vertex_count()).map(|_| g.add_node(())).collect();
        for e in &self.edges {
            g.add_edge(nodes[e.source], nodes[e.range], ());
        }
        g
    }

    /// Strongly connected components carrying at least one cycle, each sorted,
    /// in ascending order of their smallest vertex.
    pub fn recurrent_components(&self) -> Vec<Vec<usize>> {
        let g = self.digraph();
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| {
                c.len() > 1 || self.edges.iter().any(|e| e.source == c[0] && e.range == c[0])
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn is_strongly_connected(&self) -> bool {
        let comps = self.recurrent_components();
        self.vertex_count() > 0 && comps.len() == 1 && comps[0].len() == self.vertex_count()
    }

    /// The sub-graph on `keep` (indices into `self.vertices`), keeping edges
    /// with both endpoints inside. Vertex order is preserved.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> CoverGraph {
        let mut out = CoverGraph::new(self.alphabet.clone());
        out.metadata = self.metadata.clone();
        let mut remap = BTreeMap::new();
        for &v in keep {
            let vx = &self.vertices[v];
            remap.insert(v, out.add_vertex(vx.key.clone(), vx.tag.clone(), vx.profile.clone()));
        }
        for e in &self.edges {
            if let (Some(&r), Some(&s)) = (remap.get(&e.range), remap.get(&e.source)) {
                out.add_weighted_edge(e.id.clone(), r, s, e.label, e.weight.clone());
            }
        }
        out
    }

    /// Words spelled by paths of `n` edges, sorted.
    pub fn path_language(&self, n: usize) -> BTreeSet<Word> {
        // frontier: (word so far, vertex reached) for distinct pairs only
        let mut frontier: BTreeSet<(Word, usize)> = if n == 0 {
            return std::iter::once(Word::empty()).collect();
        } else {
            self.edges
                .iter()
                .map(|e| (Word(vec![e.label]), e.range))
                .collect()
        };
        for _ in 1..n {
            let mut next = BTreeSet::new();
            for (w, v) in &frontier {
                for e in self.edges.iter().filter(|e| e.source == *v) {
                    let mut s = w.0.clone();
                    s.push(e.label);
                    next.insert((Word(s), e.range));
                }
            }
            frontier = next;
        }
        frontier.into_iter().map(|(w, _)| w).collect()
    }

    /// Canonical description: sorted vertex keys and sorted edge tuples
    /// `(range key, source key, label, weight)`. Two graphs are isomorphic
    /// as keyed graphs iff their signatures agree.
    pub fn signature(&self) -> (Vec<String>, Vec<(String, String, Symbol, String)>) {
        let mut keys: Vec<String> = self.vertices.iter().map(|v| v.key.clone()).collect();
        keys.sort();
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                (
                    self.vertices[e.range].key.clone(),
                    self.vertices[e.source].key.clone(),
                    e.label,
                    format_rational(&e.weight),
                )
            })
            .collect();
        edges.sort();
        (keys, edges)
    }

    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|v| {
                let mut o = json!({ "key": v.key, "tag": v.tag });
                if let Some(p) = &v.profile {
                    o["profile"] = Value::Array(
                        p.sets()
                            .iter()
                            .map(|s| {
                                Value::Array(
                                    s.iter()
                                        .map(|w| Value::String(self.alphabet.format_word(w)))
                                        .collect(),
                                )
                            })
                            .collect(),
                    );
                }
                o
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "range": self.vertices[e.range].key,
                    "source": self.vertices[e.source].key,
                    "label": self.alphabet.name(e.label),
                    "weight": format_rational(&e.weight),
                })
            })
            .collect();
        json!({
            "type": "cover",
            "alphabet": self.alphabet.names(),
            "vertices": vertices,
            "edges": edges,
            "metadata": self.metadata,
        })
    }

    pub fn from_json(v: &Value) -> Result<CoverGraph, GraphError> {
        let bad = |m: &str| GraphError::Malformed(m.to_string());
        let names: Vec<String> = v["alphabet"]
            .as_array()
            .ok_or_else(|| bad("missing alphabet"))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("alphabet entry")))
            .collect::<Result<_, _>>()?;
        let alphabet = Alphabet::named(names).ok_or_else(|| bad("invalid alphabet"))?;
        let mut g = CoverGraph::new(alphabet);
        for vx in v["vertices"].as_array().ok_or_else(|| bad("missing vertices"))? {
            let key = vx["key"].as_str().ok_or_else(|| bad("vertex key"))?.to_string();
            let tag = vx["tag"].as_str().unwrap_or(&key).to_string();
            let profile = match vx.get("profile") {
                None | Some(Value::Null) => None,
                Some(p) => {
                    let sets = p
                        .as_array()
                        .ok_or_else(|| bad("profile"))?
                        .iter()
                        .map(|level| {
                            level
                                .as_array()
                                .ok_or_else(|| bad("profile level"))?
                                .iter()
                                .map(|w| {
                                    w.as_str()
                                        .and_then(|s| g.alphabet.parse_word(s))
                                        .ok_or_else(|| bad("profile word"))
                                })
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(PastProfile::new(sets))
                }
            };
            g.add_vertex(key, tag, profile);
        }
        for (i, e) in v["edges"]
            .as_array()
            .ok_or_else(|| bad("missing edges"))?
            .iter()
            .enumerate()
        {
            let end = |field: &str| {
                e[field]
                    .as_str()
                    .and_then(|k| g.vertex_index(k))
                    .ok_or_else(|| bad(&format!("edge {i}: unknown {field}")))
            };
            let range = end("range")?;
            let source = end("source")?;
            let label = e["label"]
                .as_str()
                .and_then(|l| g.alphabet.lookup(l))
                .ok_or_else(|| bad(&format!("edge {i}: label")))?;
            let weight = match &e["weight"] {
                Value::Null => one(),
                Value::String(s) => parse_rational(s).ok_or_else(|| bad("edge weight"))?,
                Value::Number(n) => n
                    .as_i64()
                    .map(|k| BigRational::from_integer(k.into()))
                    .ok_or_else(|| bad("edge weight must be an integer or a rational string"))?,
                _ => return Err(bad("edge weight")),
            };
            let id = e["id"].as_str().map_or_else(|| format!("e{i}"), str::to_string);
            g.add_weighted_edge(id, range, source, label, weight);
        }
        if let Some(Value::Object(m)) = v.get("metadata") {
            g.metadata = m.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        }
        g.validate()?;
        Ok(g)
    }

    /// DOT rendering with arrows from source to range. `header` lines are
    /// emitted as comments before the graph.
    pub fn to_dot(&self, name: &str, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            out.push_str(&format!("// {h}\n"));
        }
        out.push_str(&format!("digraph \"{}\" {{\n", escape(name)));
        for (k, v) in &self.metadata {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("  // {k} = {text}\n"));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let short: String = v.key.chars().take(8).collect();
            out.push_str(&format!(
                "  n{i} [label=\"{} {}\"];\n",
                escape(&short),
                escape(&v.tag)
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{}:{}\", id=\"{}\"];\n",
                e.source,
                e.range,
                escape(self.alphabet.name(e.label)),
                format_rational(&e.weight),
                escape(&e.id)
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Weights as floating point numbers, in edge order.
    pub fn weights_f64(&self) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| e.weight.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
