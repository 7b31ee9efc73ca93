//! Piecewise-linear self-maps of `[0, 1]` with rational data, the image and
//! preimage calculus on regular open partitions, and SFT covers.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::partition::{Rational, RegularOpenPartition};
use crate::graph::{format_rational, CoverGraph};
use crate::word::Alphabet;

pub const DEFAULT_CELL_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error("partition exceeds the cell budget of {cap}")]
    BudgetExceeded { cap: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = MapError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearMap {
    breakpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    intercepts: Vec<Rational>,
    continuous: bool,
}

impl PiecewiseLinearMap {
    /// A continuous map `x ↦ c_i x + d_i` on `[a_i, a_{i+1}]`.
    pub fn new(breakpoints: Vec<Rational>, slopes: Vec<Rational>, intercepts: Vec<Rational>) -> Result<Self> {
        let m = Self::with_jumps(breakpoints, slopes, intercepts)?;
        if !m.continuous {
            return Err(MapError::Invalid("map is discontinuous at a breakpoint".into()));
        }
        Ok(m)
    }

    /// Like [`PiecewiseLinearMap::new`] but allows jumps at breakpoints, as
    /// in `x ↦ 2x mod 1`.
    pub fn with_jumps(breakpoints: Vec<Rational>, slopes: Vec<Rational>, intercepts: Vec<Rational>) -> Result<Self> {
        let p = slopes.len();
        if p == 0 || breakpoints.len() != p + 1 || intercepts.len() != p {
            return Err(MapError::Invalid("need p+1 breakpoints, p slopes and p intercepts".into()));
        }
        if breakpoints[0] != Rational::zero() || breakpoints[p] != Rational::one() {
            return Err(MapError::Invalid("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MapError::Invalid("pieces must have positive width".into()));
        }
        if slopes.iter().any(Zero::is_zero) {
            return Err(MapError::Invalid("slopes must be nonzero".into()));
        }
        let mut map = PiecewiseLinearMap {
            breakpoints,
            slopes,
            intercepts,
            continuous: true,
        };
        for i in 0..p {
            let (lo, hi) = map.piece_image(i);
            if lo < Rational::zero() || hi > Rational::one() {
                return Err(MapError::Invalid(format!("piece {i} leaves [0, 1]")));
            }
        }
        map.continuous = (1..p).all(|i| {
            map.eval_piece(i - 1, &map.breakpoints[i]) == map.eval_piece(i, &map.breakpoints[i])
        });
        Ok(map)
    }

    pub fn identity() -> Self {
        Self::new(
            vec![Rational::zero(), Rational::one()],
            vec![Rational::one()],
            vec![Rational::zero()],
        )
        .unwrap()
    }

    pub fn pieces(&self) -> usize {
        self.slopes.len()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[Rational] {
        &self.intercepts
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// `min |c_i| > 1`.
    pub fn is_expansive(&self) -> bool {
        self.slopes.iter().all(|c| c.abs() > Rational::one())
    }

    pub fn eval_piece(&self, i: usize, x: &Rational) -> Rational {
        &self.slopes[i] * x + &self.intercepts[i]
    }

    pub fn invert_piece(&self, i: usize, y: &Rational) -> Rational {
        (y - &self.intercepts[i]) / &self.slopes[i]
    }

    /// Piece containing `x`; breakpoints belong to the piece on their left.
    pub fn piece_of(&self, x: &Rational) -> usize {
        (0..self.pieces())
            .find(|&i| *x <= self.breakpoints[i + 1])
            .unwrap_or(self.pieces() - 1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.eval_piece(self.piece_of(x), x)
    }

    /// `T(C_i)` as a closed interval `(lo, hi)`.
    pub fn piece_image(&self, i: usize) -> (Rational, Rational) {
        let a = self.eval_piece(i, &self.breakpoints[i]);
        let b = self.eval_piece(i, &self.breakpoints[i + 1]);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// The partition `𝒰` by the interiors of the pieces.
    pub fn pieces_partition(&self) -> RegularOpenPartition {
        RegularOpenPartition::from_cuts(self.breakpoints.iter().cloned())
    }

    /// `T(𝒱) = ⋁_i {T(U_i ∩ V_j)} ∪ {X \ T(C_i)}`.
    pub fn image_partition(&self, v: &RegularOpenPartition) -> RegularOpenPartition {
        let mut cuts = Vec::new();
        for i in 0..self.pieces() {
            let (a, b) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
            cuts.push(self.eval_piece(i, a));
            cuts.push(self.eval_piece(i, b));
            for c in v.cuts().iter().filter(|c| *c > a && *c < b) {
                cuts.push(self.eval_piece(i, c));
            }
        }
        RegularOpenPartition::from_cuts(cuts)
    }

    /// `T^{-1}(𝒱)`: pull back each cell of `𝒱 ∨ T(𝒰)` lying in `T(U_i)`
    /// through the branch `T_i`. Each output cell comes with its provenance
    /// `(piece, index of the cell of 𝒱 ∨ T(𝒰))`.
    pub fn preimage_partition_with_provenance(
        &self,
        v: &RegularOpenPartition,
    ) -> (RegularOpenPartition, Vec<(usize, usize)>) {
        let w = v.join(&self.image_partition(&self.pieces_partition()));
        let mut cuts: Vec<Rational> = self.breakpoints.clone();
        for i in 0..self.pieces() {
            let (lo, hi) = self.piece_image(i);
            for c in w.cuts().iter().filter(|c| **c > lo && **c < hi) {
                cuts.push(self.invert_piece(i, c));
            }
        }
        let out = RegularOpenPartition::from_cuts(cuts);
        let two = Rational::from_integer(2.into());
        let provenance = out
            .cells()
            .iter()
            .map(|(l, r)| {
                let mid = (l + r) / &two;
                let i = self.piece_of(&mid);
                let cell = w.locate(&self.eval_piece(i, &mid)).unwrap_or(0);
                (i, cell)
            })
            .collect();
        (out, provenance)
    }

    pub fn preimage_partition(&self, v: &RegularOpenPartition) -> RegularOpenPartition {
        self.preimage_partition_with_provenance(v).0
    }
}

/// Memoized images `T^β(𝒰)` and preimages `T^{-α}(T^β(𝒰))`.
#[derive(Debug)]
pub struct Refiner<'a> {
    map: &'a PiecewiseLinearMap,
    cap: usize,
    images: Vec<RegularOpenPartition>,
    pulled: HashMap<(usize, usize), RegularOpenPartition>,
    joined: HashMap<(usize, usize), RegularOpenPartition>,
}

impl<'a> Refiner<'a> {
    pub fn new(map: &'a PiecewiseLinearMap, cap: usize) -> Self {
        Refiner {
            map,
            cap,
            images: vec![map.pieces_partition()],
            pulled: HashMap::new(),
            joined: HashMap::new(),
        }
    }

    fn check(&self, p: &RegularOpenPartition) -> Result<()> {
        if p.len() > self.cap {
            Err(MapError::BudgetExceeded { cap: self.cap })
        } else {
            Ok(())
        }
    }

    pub fn image(&mut self, beta: usize) -> Result<RegularOpenPartition> {
        while self.images.len() <= beta {
            let next = self.map.image_partition(self.images.last().unwrap());
            self.check(&next)?;
            self.images.push(next);
        }
        Ok(self.images[beta].clone())
    }

    /// `T^{-α}(T^β(𝒰))`.
    pub fn term(&mut self, alpha: usize, beta: usize) -> Result<RegularOpenPartition> {
        if let Some(p) = self.pulled.get(&(alpha, beta)) {
            return Ok(p.clone());
        }
        let p = if alpha == 0 {
            self.image(beta)?
        } else {
            let prev = self.term(alpha - 1, beta)?;
            self.map.preimage_partition(&prev)
        };
        self.check(&p)?;
        self.pulled.insert((alpha, beta), p.clone());
        Ok(p)
    }

    /// `⋁_{α ≤ m, β ≤ n} T^{-α}(T^β(𝒰))`.
    pub fn umn(&mut self, m: usize, n: usize) -> Result<RegularOpenPartition> {
        if let Some(p) = self.joined.get(&(m, n)) {
            return Ok(p.clone());
        }
        let mut acc = self.term(m, n)?;
        if m > 0 {
            acc = acc.join(&self.umn(m - 1, n)?);
        }
        if n > 0 {
            acc = acc.join(&self.umn(m, n - 1)?);
        }
        self.check(&acc)?;
        self.joined.insert((m, n), acc.clone());
        Ok(acc)
    }
}

/// `𝒰_{m,n}` with the default cell budget.
pub fn refine_umn(map: &PiecewiseLinearMap, m: usize, n: usize, cap: usize) -> Result<RegularOpenPartition> {
    Refiner::new(map, cap).umn(m, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitenessReport {
    pub gamma: usize,
    pub max_alpha: usize,
    /// `(m, n, least α)` for every checked pair; `None` when no `α` within
    /// the bound works.
    pub entries: Vec<(usize, usize, Option<usize>)>,
}

impl FinitenessReport {
    /// True when every pair found its `α`.
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.2.is_some())
    }
}

/// For each `(m, n)` up to the bounds, the least `α` with
/// `𝒰_{m,n} ⪯ ⋁_{α' ≤ α, β ≤ γ} T^{-α'}(T^β(𝒰))`.
pub fn detect_finiteness(
    map: &PiecewiseLinearMap,
    gamma: usize,
    max_m: usize,
    max_n: usize,
    max_alpha: usize,
    cap: usize,
) -> Result<FinitenessReport> {
    let mut refiner = Refiner::new(map, cap);
    // targets[α] = ⋁_{α' ≤ α, β ≤ γ} T^{-α'}(T^β(𝒰)), grown on demand
    let mut targets: Vec<RegularOpenPartition> = Vec::new();
    let mut entries = Vec::new();
    for m in 0..=max_m {
        for n in 0..=max_n {
            let u = refiner.umn(m, n)?;
            let mut found = None;
            for alpha in 0..=max_alpha {
                if targets.len() <= alpha {
                    let mut acc = targets.last().cloned().unwrap_or_else(RegularOpenPartition::trivial);
                    for beta in 0..=gamma {
                        acc = acc.join(&refiner.term(alpha, beta)?);
                    }
                    refiner.check(&acc)?;
                    targets.push(acc);
                }
                if u.is_refined_by(&targets[alpha]) {
                    found = Some(alpha);
                    break;
                }
            }
            entries.push((m, n, found));
        }
    }
    Ok(FinitenessReport {
        gamma,
        max_alpha,
        entries,
    })
}

/// Default bounds used when stamping SFT covers as verified.
pub const DEFAULT_FINITENESS_BOUNDS: (usize, usize, usize) = (4, 4, 16);

/// Vertex shift on the cells of `𝒱 = ⋁_{β ≤ γ} T^β(𝒰)`: an edge from `V` to
/// `W` when `T(V) ∩ W ≠ ∅`, labeled by `V`.
pub fn extract_sft_cover(map: &PiecewiseLinearMap, gamma: usize, cap: usize) -> Result<CoverGraph> {
    let mut refiner = Refiner::new(map, cap);
    let mut v = RegularOpenPartition::trivial();
    for beta in 0..=gamma {
        v = v.join(&refiner.image(beta)?);
    }
    let cells = v.cells();
    let alphabet = Alphabet::numeric(cells.len());
    let mut g = CoverGraph::new(alphabet);
    for (i, (l, r)) in cells.iter().enumerate() {
        g.add_vertex(
            format!("({},{})", format_rational(l), format_rational(r)),
            format!("V{i}"),
            None,
        );
    }
    let mut edges = Vec::new();
    for (i, (l, r)) in cells.iter().enumerate() {
        let piece = map.piece_of(&((l + r) / Rational::from_integer(2.into())));
        let (a, b) = {
            let x = map.eval_piece(piece, l);
            let y = map.eval_piece(piece, r);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        };
        for (j, (l2, r2)) in cells.iter().enumerate() {
            if a < *r2 && *l2 < b {
                edges.push((j, i));
            }
        }
    }
    // prune vertices with no forward continuation
    let mut alive = vec![true; cells.len()];
    loop {
        let mut changed = false;
        for v in 0..cells.len() {
            if alive[v] && !edges.iter().any(|&(r, s)| s == v && alive[r]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep: std::collections::BTreeSet<usize> = (0..cells.len()).filter(|&v| alive[v]).collect();
    for (r, s) in edges {
        g.add_edge(format!("V{s}>V{r}"), r, s, s as u16);
    }
    let mut g = g.induced(&keep);
    let (mm, mn, ma) = DEFAULT_FINITENESS_BOUNDS;
    let verified = map.is_expansive()
        && detect_finiteness(map, gamma, mm, mn, ma, cap).is_ok_and(|r| r.holds());
    g.metadata.insert("cover".into(), json!("interval-sft"));
    g.metadata.insert("gamma".into(), json!(gamma));
    g.metadata.insert("expansive".into(), json!(map.is_expansive()));
    g.metadata
        .insert("status".into(), json!(if verified { "verified" } else { "unverified" }));
    Ok(g)
}
