//! JSON input schemas: subshifts, interval maps, substitutions, covers and
//! potentials.

use serde_json::Value;

use crate::graph::{parse_rational, CoverGraph};
use crate::interval::{tent_map, PiecewiseLinearMap, Rational};
use crate::shift::{LabeledEdge, LabeledGraph, OracleSpec, SubshiftSpec};
use crate::substitution::Substitution;
use crate::word::{Alphabet, Symbol, Word};

pub const SCHEMA: &str = "coverforge/1";

/// Oracle horizon used when the input does not give one.
pub const DEFAULT_ORACLE_HORIZON: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("missing or invalid field `{0}`")]
    Field(&'static str),
    #[error("unknown input type `{0}`")]
    UnknownType(String),
    #[error("unsupported schema `{0}`")]
    Schema(String),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, crate::Error>;

#[derive(Debug, Clone)]
pub enum Input {
    Subshift(SubshiftSpec),
    Map(PiecewiseLinearMap),
    Tent(Rational),
    Substitution(Substitution),
    Cover(CoverGraph),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Subshift(s) => s.kind(),
            Input::Map(_) => "pl",
            Input::Tent(_) => "tent",
            Input::Substitution(_) => "substitution",
            Input::Cover(_) => "cover",
        }
    }
}

fn field<'a>(v: &'a Value, name: &'static str) -> std::result::Result<&'a Value, InputError> {
    v.get(name).ok_or(InputError::Field(name))
}

fn string_list(v: &Value, name: &'static str) -> std::result::Result<Vec<String>, InputError> {
    field(v, name)?
        .as_array()
        .ok_or(InputError::Field(name))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or(InputError::Field(name)))
        .collect()
}

fn rational_value(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => None,
    }
}

fn rational_list(v: &Value, name: &'static str) -> std::result::Result<Vec<Rational>, InputError> {
    field(v, name)?
        .as_array()
        .ok_or(InputError::Field(name))?
        .iter()
        .map(|x| rational_value(x).ok_or(InputError::Field(name)))
        .collect()
}

fn usize_field(v: &Value, name: &'static str) -> std::result::Result<usize, InputError> {
    field(v, name)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or(InputError::Field(name))
}

/// Declared `alphabet` if present, otherwise `{0..m-1}` from `m`.
fn alphabet_of(v: &Value) -> std::result::Result<Alphabet, InputError> {
    if v.get("alphabet").is_some() {
        return Alphabet::named(string_list(v, "alphabet")?).ok_or(InputError::Field("alphabet"));
    }
    let m = usize_field(v, "m")?;
    if m == 0 || m > Symbol::MAX as usize {
        return Err(InputError::Field("m"));
    }
    Ok(Alphabet::numeric(m))
}

fn parse_word(alphabet: &Alphabet, text: &str) -> std::result::Result<Word, InputError> {
    alphabet
        .parse_word(text)
        .ok_or_else(|| InputError::Invalid(format!("word `{text}` is not over the alphabet")))
}

/// Parses JSON text, accepting either a document or a path handled by the caller.
pub fn parse_input_str(text: &str) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    parse_input(&v)
}

pub fn parse_input(v: &Value) -> Result<Input> {
    if let Some(schema) = v.get("schema") {
        if schema.as_str() != Some(SCHEMA) {
            return Err(InputError::Schema(schema.to_string()).into());
        }
    }
    let ty = field(v, "type")?.as_str().ok_or(InputError::Field("type"))?;
    Ok(match ty {
        "full" => Input::Subshift(SubshiftSpec::Full(alphabet_of(v)?)),
        "sft" => {
            let alphabet = alphabet_of(v)?;
            let forbidden = string_list(v, "forbidden")?
                .iter()
                .map(|w| parse_word(&alphabet, w))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Input::Subshift(SubshiftSpec::SftForbidden { alphabet, forbidden })
        }
        "sofic" => Input::Subshift(SubshiftSpec::SoficGraph(parse_sofic(v)?)),
        "oracle" => {
            let name = field(v, "oracle")?.as_str().ok_or(InputError::Field("oracle"))?;
            let horizon = match v.get("horizon") {
                Some(_) => usize_field(v, "horizon")?,
                None => DEFAULT_ORACLE_HORIZON,
            };
            match name {
                "square-gap" => Input::Subshift(SubshiftSpec::Oracle(OracleSpec::square_gap(horizon))),
                other => return Err(InputError::Invalid(format!("unknown oracle `{other}`")).into()),
            }
        }
        "pl" => {
            let b = rational_list(v, "breakpoints")?;
            let s = rational_list(v, "slopes")?;
            let c = rational_list(v, "intercepts")?;
            let jumps = v.get("allow_jumps").and_then(Value::as_bool).unwrap_or(false);
            Input::Map(if jumps {
                PiecewiseLinearMap::with_jumps(b, s, c)?
            } else {
                PiecewiseLinearMap::new(b, s, c)?
            })
        }
        "tent" => {
            let mu = rational_value(field(v, "mu")?).ok_or(InputError::Field("mu"))?;
            tent_map(&mu)?;
            Input::Tent(mu)
        }
        "substitution" => {
            let rules = field(v, "rules")?.as_object().ok_or(InputError::Field("rules"))?;
            let pairs = rules
                .iter()
                .map(|(k, w)| w.as_str().map(|w| (k.clone(), w.to_string())).ok_or(InputError::Field("rules")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Input::Substitution(Substitution::from_pairs(pairs)?)
        }
        "cover" => Input::Cover(CoverGraph::from_json(v)?),
        other => return Err(InputError::UnknownType(other.to_string()).into()),
    })
}

/// Labels are declared symbol names, or decimal digits when no alphabet is
/// declared.
fn parse_sofic(v: &Value) -> std::result::Result<LabeledGraph, crate::Error> {
    let vertices = string_list(v, "vertices")?;
    let raw = field(v, "edges")?.as_array().ok_or(InputError::Field("edges"))?;
    let mut triples = Vec::with_capacity(raw.len());
    for e in raw {
        let parts = e.as_array().filter(|p| p.len() == 3).ok_or(InputError::Field("edges"))?;
        let text = |i: usize| match &parts[i] {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) if i == 2 => Some(n.to_string()),
            _ => None,
        };
        let (s, d, l) = match (text(0), text(1), text(2)) {
            (Some(s), Some(d), Some(l)) => (s, d, l),
            _ => return Err(InputError::Field("edges").into()),
        };
        triples.push((s, d, l));
    }
    let alphabet = if v.get("alphabet").is_some() {
        alphabet_of(v)?
    } else {
        let mut top = 0usize;
        for (_, _, l) in &triples {
            let n: usize = l
                .parse()
                .map_err(|_| InputError::Invalid(format!("label `{l}` is not a decimal symbol")))?;
            top = top.max(n);
        }
        if top >= Symbol::MAX as usize {
            return Err(InputError::Field("edges").into());
        }
        Alphabet::numeric(top + 1)
    };
    let index = |name: &str| {
        vertices
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| InputError::Invalid(format!("unknown vertex `{name}`")))
    };
    let mut edges = Vec::with_capacity(triples.len());
    for (s, d, l) in &triples {
        let label = alphabet
            .lookup(l)
            .ok_or_else(|| InputError::Invalid(format!("unknown label `{l}`")))?;
        edges.push(LabeledEdge {
            src: index(s)?,
            dst: index(d)?,
            label,
        });
    }
    Ok(LabeledGraph::new(alphabet, vertices, edges)?)
}

/// A potential value: a number, a rational string or `log(p/q)`.
fn potential_value(v: &Value) -> Option<f64> {
    if let Some(x) = v.as_f64() {
        return Some(x);
    }
    let s = v.as_str()?.trim();
    if let Some(inner) = s.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
        let q = parse_rational(inner.trim())?;
        let x = num_traits::ToPrimitive::to_f64(&q)?;
        return (x > 0.0).then(|| x.ln());
    }
    parse_rational(s).and_then(|q| num_traits::ToPrimitive::to_f64(&q))
}

/// Potential `A` on the edges of `g` from a map keyed by edge id or by
/// `label:<symbol>`; an edge id takes precedence, unmatched edges get 0.
pub fn parse_potential(g: &CoverGraph, v: &Value) -> Result<Vec<f64>> {
    let map = v.as_object().ok_or(InputError::Field("potential"))?;
    let mut by_label = vec![None; g.alphabet.size()];
    let mut by_id = std::collections::BTreeMap::new();
    for (k, x) in map {
        let val = potential_value(x)
            .filter(|x| x.is_finite())
            .ok_or_else(|| InputError::Invalid(format!("bad potential value for `{k}`")))?;
        if let Some(name) = k.strip_prefix("label:") {
            let s = g
                .alphabet
                .lookup(name)
                .ok_or_else(|| InputError::Invalid(format!("unknown label `{name}`")))?;
            by_label[s as usize] = Some(val);
        } else {
            if !g.edges.iter().any(|e| e.id == *k) {
                return Err(InputError::Invalid(format!("unknown edge id `{k}`")).into());
            }
            by_id.insert(k.clone(), val);
        }
    }
    Ok(g
        .edges
        .iter()
        .map(|e| {
            by_id
                .get(&e.id)
                .copied()
                .or(by_label[e.label as usize])
                .unwrap_or(0.0)
        })
        .collect())
}
