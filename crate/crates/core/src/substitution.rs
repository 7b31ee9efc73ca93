//! Substitutions, their edge shifts `E_S` and the coding of edge paths as
//! points of the wedge of circles.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::graph::CoverGraph;
use crate::word::{Alphabet, Symbol, Word};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("invalid substitution: {0}")]
    Invalid(String),
    #[error("inadmissible path at step {0}")]
    InadmissiblePath(usize),
    #[error("path too short")]
    PathTooShort,
}

pub type Result<T, E = SubstitutionError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: Vec<Word>,
}

/// One edge `(α, i)` of `E_S`, with `i` counted from 1.
pub type PathEdge = (Symbol, usize);

/// A point `(t, α)` on circle `α`; `t = 0` is the wedge point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirclePoint {
    pub t: Rational,
    pub circle: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolenoidEstimate {
    pub point: CirclePoint,
    /// The true coordinate lies in `[t, t + error]`.
    pub error: Rational,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, rules: Vec<Word>) -> Result<Self> {
        if rules.len() != alphabet.size() {
            return Err(SubstitutionError::Invalid("one rule per symbol required".into()));
        }
        for (a, w) in rules.iter().enumerate() {
            if w.is_empty() {
                return Err(SubstitutionError::Invalid(format!(
                    "image of {} is empty",
                    alphabet.name(a as Symbol)
                )));
            }
            if !w.all_below(alphabet.size()) {
                return Err(SubstitutionError::Invalid("image uses an unknown symbol".into()));
            }
        }
        Ok(Substitution { alphabet, rules })
    }

    /// Builds from `(symbol, image)` pairs; the alphabet is the sorted set
    /// of symbols and images are parsed with the alphabet's word syntax.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: AsRef<str>,
    {
        let mut pairs: Vec<(String, String)> = pairs
            .into_iter()
            .map(|(k, v)| (k.into(), v.as_ref().to_string()))
            .collect();
        pairs.sort();
        let alphabet = Alphabet::named(pairs.iter().map(|(k, _)| k.clone()))
            .ok_or_else(|| SubstitutionError::Invalid("duplicate or missing symbols".into()))?;
        let rules = pairs
            .iter()
            .map(|(k, v)| {
                alphabet
                    .parse_word(v)
                    .ok_or_else(|| SubstitutionError::Invalid(format!("cannot parse image of {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, rules)
    }

    pub fn fibonacci() -> Self {
        Self::from_pairs([("a", "ab"), ("b", "a")]).unwrap()
    }

    pub fn thue_morse() -> Self {
        Self::from_pairs([("a", "ab"), ("b", "ba")]).unwrap()
    }

    pub fn doubling() -> Self {
        Self::from_pairs([("a", "aa")]).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, a: Symbol) -> &Word {
        &self.rules[a as usize]
    }

    pub fn image_len(&self, a: Symbol) -> usize {
        self.rules[a as usize].len()
    }

    /// `E_S`: one edge `(α, i)` with range `α`, source `S(α)_i`, label `i`.
    pub fn build_edge_shift(&self) -> CoverGraph {
        let longest = self.rules.iter().map(Word::len).max().unwrap_or(1);
        let labels = Alphabet::named((1..=longest).map(|i| i.to_string())).unwrap();
        let mut g = CoverGraph::new(labels);
        for a in self.alphabet.symbols() {
            let name = self.alphabet.name(a).to_string();
            g.add_vertex(name.clone(), name, None);
        }
        for a in self.alphabet.symbols() {
            for (i, &b) in self.image(a).symbols().iter().enumerate() {
                g.add_edge(
                    format!("{},{}", self.alphabet.name(a), i + 1),
                    a as usize,
                    b as usize,
                    i as Symbol,
                );
            }
        }
        g.metadata.insert("cover".into(), json!("substitution-edge-shift"));
        g
    }

    /// `M[α][β]` = occurrences of `β` in `S(α)`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let m = self.alphabet.size();
        let mut out = vec![vec![0; m]; m];
        for a in 0..m {
            for &b in self.rules[a].symbols() {
                out[a][b as usize] += 1;
            }
        }
        out
    }

    pub fn validate_path(&self, p: &[PathEdge]) -> Result<()> {
        for (j, &(a, i)) in p.iter().enumerate() {
            if a as usize >= self.alphabet.size() || i == 0 || i > self.image_len(a) {
                return Err(SubstitutionError::InadmissiblePath(j));
            }
            if let Some(&(next, _)) = p.get(j + 1) {
                if self.image(a).symbols()[i - 1] != next {
                    return Err(SubstitutionError::InadmissiblePath(j));
                }
            }
        }
        Ok(())
    }

    /// Partial sum `Σ_j (i_j - 1) / Π_{l ≤ j} |S(α_l)|` on circle `α_1`.
    pub fn presolenoid_point(&self, p: &[PathEdge]) -> Result<SolenoidEstimate> {
        if p.is_empty() {
            return Err(SubstitutionError::PathTooShort);
        }
        self.validate_path(p)?;
        let mut t = Rational::zero();
        let mut scale = Rational::one();
        for &(a, i) in p {
            scale /= Rational::from_integer(self.image_len(a).into());
            t += &scale * Rational::from_integer((i - 1).into());
        }
        Ok(SolenoidEstimate {
            point: CirclePoint {
                t,
                circle: p[0].0,
            },
            error: scale,
        })
    }

    /// The wedge point with its canonical circle.
    pub fn wedge(&self) -> CirclePoint {
        CirclePoint {
            t: Rational::zero(),
            circle: 0,
        }
    }

    /// `T_S(t, α) = (|S(α)| t mod 1, S(α)_i)` for `t` in the `i`-th arc; on an
    /// arc boundary the lower arc is used.
    pub fn apply_presolenoid_map(&self, point: &CirclePoint) -> CirclePoint {
        let len = self.image_len(point.circle);
        let l = Rational::from_integer(len.into());
        let scaled = &point.t * &l;
        let i = scaled.ceil().to_integer();
        let i: usize = i.try_into().unwrap_or(1).clamp(1, len);
        let t = scaled - Rational::from_integer((i - 1).into());
        if t.is_zero() || t == Rational::one() {
            return self.wedge();
        }
        CirclePoint {
            t,
            circle: self.image(point.circle).symbols()[i - 1],
        }
    }

    /// Distance on the wedge of circles.
    pub fn distance(&self, a: &CirclePoint, b: &CirclePoint) -> Rational {
        let to_wedge = |t: &Rational| {
            let s = t - t.floor();
            std::cmp::min(s.clone(), Rational::one() - s)
        };
        if a.circle == b.circle {
            let d = (&a.t - &b.t).abs();
            to_wedge(&d)
        } else {
            to_wedge(&a.t) + to_wedge(&b.t)
        }
    }

    /// `T_S(π(p))` against `π(σ p)`, allowing `tol` plus the propagated
    /// truncation errors of both codings.
    pub fn intertwine_check(&self, p: &[PathEdge], tol: &Rational) -> Result<bool> {
        if p.len() < 2 {
            return Err(SubstitutionError::PathTooShort);
        }
        let head = self.presolenoid_point(p)?;
        let tail = self.presolenoid_point(&p[1..])?;
        let lhs = self.apply_presolenoid_map(&head.point);
        let expand = Rational::from_integer(self.image_len(p[0].0).into());
        let bound = tol + expand * &head.error + &tail.error;
        Ok(self.distance(&lhs, &tail.point) <= bound)
    }
}
