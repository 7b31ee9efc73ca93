//! The tent family `x ↦ μ min(x, 1 - x)` and its break-point sets.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::map::{MapError, PiecewiseLinearMap, Result};
use super::partition::Rational;
use crate::graph::format_rational;

pub const DEFAULT_POINT_BUDGET: usize = 100_000;

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Tent map with parameter `0 < μ <= 2`.
pub fn tent_map(mu: &Rational) -> Result<PiecewiseLinearMap> {
    if *mu <= Rational::zero() || *mu > Rational::from_integer(2.into()) {
        return Err(MapError::OutOfRange(format!("tent parameter {mu} not in (0, 2]")));
    }
    PiecewiseLinearMap::new(
        vec![Rational::zero(), half(), Rational::one()],
        vec![mu.clone(), -mu.clone()],
        vec![Rational::zero(), mu.clone()],
    )
}

fn tent(mu: &Rational, x: &Rational) -> Rational {
    if *x <= half() {
        mu * x
    } else {
        mu * (Rational::one() - x)
    }
}

/// `T^{-1}(y)` in `[0, 1]`.
fn tent_preimage(mu: &Rational, y: &Rational) -> Vec<Rational> {
    if *y < Rational::zero() || *y > mu * half() {
        return Vec::new();
    }
    let x = y / mu;
    vec![x.clone(), Rational::one() - x]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakSets {
    /// `B_j` for `j = 1..=n`.
    pub b: Vec<BTreeSet<Rational>>,
    /// `D_j` for `j = 1..=n`.
    pub d: Vec<BTreeSet<Rational>>,
}

impl BreakSets {
    pub fn last_b(&self) -> &BTreeSet<Rational> {
        self.b.last().unwrap()
    }

    pub fn last_d(&self) -> &BTreeSet<Rational> {
        self.d.last().unwrap()
    }

    /// Least `j < n` with `B_j = B_{j+1}` and `D_j = D_{j+1}`.
    pub fn stabilized_at(&self) -> Option<usize> {
        (1..self.b.len())
            .find(|&j| self.b[j - 1] == self.b[j] && self.d[j - 1] == self.d[j])
    }
}

/// `B_1 = D_1 = {μ/2}`, `B_{j+1} = B_j ∪ T(B_j) ∪ T^{-1}(B_j \ {μ/2})` and
/// `D_{j+1} = D_j ∪ T(D_j) ∪ T^{-1}(D_j)`.
pub fn tent_break_sets(mu: &Rational, n: usize, budget: usize) -> Result<BreakSets> {
    if *mu <= Rational::zero() || *mu >= Rational::from_integer(2.into()) {
        return Err(MapError::OutOfRange(format!("break sets need 0 < μ < 2, got {mu}")));
    }
    let top = mu * half();
    let start: BTreeSet<Rational> = [top.clone()].into();
    let mut b = vec![start.clone()];
    let mut d = vec![start];
    for _ in 1..n.max(1) {
        let pb = b.last().unwrap();
        let mut nb = pb.clone();
        for x in pb {
            nb.insert(tent(mu, x));
            if *x != top {
                nb.extend(tent_preimage(mu, x));
            }
        }
        let pd = d.last().unwrap();
        let mut nd = pd.clone();
        for x in pd {
            nd.insert(tent(mu, x));
            nd.extend(tent_preimage(mu, x));
        }
        if nb.len() > budget || nd.len() > budget {
            return Err(MapError::BudgetExceeded { cap: budget });
        }
        b.push(nb);
        d.push(nd);
    }
    Ok(BreakSets { b, d })
}

fn set_json(s: &BTreeSet<Rational>) -> Value {
    Value::Array(s.iter().map(|x| json!(format_rational(x))).collect())
}

/// Structured description of the minimal cover of the tent map with weight 1.
pub fn cover_report_tent(mu: &Rational, n: usize, budget: usize) -> Result<Value> {
    let two = Rational::from_integer(2.into());
    if *mu <= Rational::zero() || *mu > two {
        return Err(MapError::OutOfRange(format!("tent parameter {mu} not in (0, 2]")));
    }
    if *mu == two {
        return Ok(json!({
            "mu": "2",
            "open_map": true,
            "x_min": {
                "continuum": "[0,1]",
                "discrete": "grand orbit of 1/2",
            },
            "essential_cover": "the tent map itself",
            "weights": {
                "default": 1,
                "anomalies": [{ "point": "1", "weight": 2 }],
            },
        }));
    }
    let sets = tent_break_sets(mu, n, budget)?;
    let stabilized = sets.stabilized_at();
    Ok(json!({
        "mu": format_rational(mu),
        "open_map": false,
        "levels": n,
        "B": set_json(sets.last_b()),
        "D": set_json(sets.last_d()),
        "B_sizes": sets.b.iter().map(BTreeSet::len).collect::<Vec<_>>(),
        "D_sizes": sets.d.iter().map(BTreeSet::len).collect::<Vec<_>>(),
        "stabilized_at": stabilized,
        "terminates": stabilized.is_some(),
        "half_in_B": sets.last_b().contains(&half()),
        "weights": {
            "default": 1,
            "anomalies": [{ "point": format!("({})-", format_rational(&(mu * half()))), "weight": 2 }],
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn tent_examples() {
        let t = tent_map(&q(2, 1)).unwrap();
        assert_eq!(t.breakpoints(), &[q(0, 1), q(1, 2), q(1, 1)]);
        assert_eq!(t.slopes(), &[q(2, 1), q(-2, 1)]);
        let t = tent_map(&q(1, 1)).unwrap();
        assert!(!t.is_expansive());
        let t = tent_map(&q(3, 2)).unwrap();
        assert_eq!(t.eval(&q(1, 2)), q(3, 4));
        assert!(tent_map(&q(5, 2)).is_err());
        assert!(tent_map(&q(0, 1)).is_err());
    }

    #[test]
    fn break_sets() {
        let s = tent_break_sets(&q(1, 1), 4, DEFAULT_POINT_BUDGET).unwrap();
        assert!(s.b.iter().all(|b| *b == BTreeSet::from([q(1, 2)])));
        assert!(s.d.iter().all(|d| *d == BTreeSet::from([q(1, 2)])));
        assert_eq!(s.stabilized_at(), Some(1));
        let s = tent_break_sets(&q(3, 2), 3, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(s.b[0], BTreeSet::from([q(3, 4)]));
        assert_eq!(s.b[1], BTreeSet::from([q(3, 8), q(3, 4)]));
        assert_eq!(s.b[2], BTreeSet::from([q(1, 4), q(3, 8), q(9, 16), q(3, 4)]));
        let s = tent_break_sets(&q(3, 2), 5, DEFAULT_POINT_BUDGET).unwrap();
        assert!(s.b.windows(2).all(|w| w[0].len() < w[1].len()));
        assert_eq!(s.stabilized_at(), None);
    }

    #[test]
    fn reports() {
        let r = cover_report_tent(&q(2, 1), 3, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(r["weights"]["anomalies"][0]["point"], "1");
        assert_eq!(r["weights"]["anomalies"][0]["weight"], 2);
        let r = cover_report_tent(&q(1, 1), 3, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(r["stabilized_at"], 1);
        assert_eq!(r["half_in_B"], true);
        let r = cover_report_tent(&q(3, 2), 5, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(r["terminates"], false);
    }
}
