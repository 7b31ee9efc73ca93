//! Transfer and Ruelle operators on finite cover graphs, Perron data by power
//! iteration, entropy and equilibrium-measure checks.

use std::ops::{Add, Mul};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::graph::CoverGraph;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransferError {
    #[error("matrix is not irreducible")]
    Reducible,
    #[error("matrix is not square or contains negative or non-finite entries")]
    BadMatrix,
    #[error("power iteration did not reach the tolerance (residual {})", best.residual)]
    NoConvergence { best: Box<PerronData> },
    #[error("graph has no recurrent part")]
    EmptyRecurrentPart,
    #[error("function length {got} does not match {expected}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T, E = TransferError> = std::result::Result<T, E>;

/// Values usable as vertex and edge functions.
pub trait Scalar: Clone + Zero + PartialEq + Add<Output = Self> + Mul<Output = Self> {
    fn from_weight(w: &BigRational) -> Self;
}

impl Scalar for f64 {
    fn from_weight(w: &BigRational) -> Self {
        w.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn from_weight(w: &BigRational) -> Self {
        w.clone()
    }
}

/// `Λ(f)(v) = Σ_{r(e) = v} w(e) f(e)`.
pub fn apply_transfer<T: Scalar>(g: &CoverGraph, f: &[T]) -> Result<Vec<T>> {
    if f.len() != g.edge_count() {
        return Err(TransferError::Dimension {
            expected: g.edge_count(),
            got: f.len(),
        });
    }
    let mut out = vec![T::zero(); g.vertex_count()];
    for (e, fe) in g.edges.iter().zip(f) {
        let term = T::from_weight(&e.weight) * fe.clone();
        out[e.range] = out[e.range].clone() + term;
    }
    Ok(out)
}

/// Exact check of `Λ(f · (g∘r)) = Λ(f) · g`.
pub fn transfer_identity_check(g: &CoverGraph, f: &[BigRational], gv: &[BigRational]) -> Result<bool> {
    if gv.len() != g.vertex_count() {
        return Err(TransferError::Dimension {
            expected: g.vertex_count(),
            got: gv.len(),
        });
    }
    let twisted: Vec<BigRational> = g
        .edges
        .iter()
        .zip(f)
        .map(|(e, fe)| fe * &gv[e.range])
        .collect();
    let lhs = apply_transfer(g, &twisted)?;
    let rhs: Vec<BigRational> = apply_transfer(g, f)?
        .into_iter()
        .zip(gv)
        .map(|(a, b)| a * b)
        .collect();
    Ok(lhs == rhs)
}

/// `M[v][u] = Σ_{r(e) = v, s(e) = u} w(e) e^{A(e)}`.
pub fn ruelle_matrix(g: &CoverGraph, potential: &[f64]) -> Result<Vec<Vec<f64>>> {
    if potential.len() != g.edge_count() {
        return Err(TransferError::Dimension {
            expected: g.edge_count(),
            got: potential.len(),
        });
    }
    let n = g.vertex_count();
    let mut m = vec![vec![0.0; n]; n];
    for (e, (w, a)) in g.edges.iter().zip(g.weights_f64().into_iter().zip(potential)) {
        m[e.range][e.source] += w * a.exp();
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub lambda: f64,
    /// Right eigenvector, sup-norm 1.
    pub h: Vec<f64>,
    /// Left eigenvector, normalized so that `ν·h = 1`.
    pub nu: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn validate_matrix(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n || row.iter().any(|x| !x.is_finite() || *x < 0.0)) {
        return Err(TransferError::BadMatrix);
    }
    Ok(())
}

/// Irreducible in the Perron–Frobenius sense with a positive spectral radius.
pub fn is_irreducible_matrix(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let sccs = tarjan_scc(&g);
    sccs.len() == 1 && (n > 1 || m[0][0] > 0.0)
}

fn residuals(m: &[Vec<f64>], lambda: f64, h: &[f64], nu: &[f64]) -> (f64, f64) {
    let n = m.len();
    let mut right: f64 = 0.0;
    let mut left: f64 = 0.0;
    for i in 0..n {
        let mh: f64 = (0..n).map(|j| m[i][j] * h[j]).sum();
        right = right.max((mh - lambda * h[i]).abs());
        let num: f64 = (0..n).map(|j| nu[j] * m[j][i]).sum();
        left = left.max((num - lambda * nu[i]).abs());
    }
    (right, left)
}

/// Simultaneous left/right power iteration on `M + I` from the all-ones
/// vector. The shift by the identity makes the iteration converge for
/// periodic matrices too.
pub fn perron_data(m: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<PerronData> {
    validate_matrix(m)?;
    if !is_irreducible_matrix(m) {
        return Err(TransferError::Reducible);
    }
    let n = m.len();
    let mut h = vec![1.0; n];
    let mut nu = vec![1.0; n];
    let mut best: Option<PerronData> = None;
    for it in 1..=max_iter.max(1) {
        let mut h2: Vec<f64> = (0..n)
            .map(|i| h[i] + (0..n).map(|j| m[i][j] * h[j]).sum::<f64>())
            .collect();
        let mut nu2: Vec<f64> = (0..n)
            .map(|i| nu[i] + (0..n).map(|j| nu[j] * m[j][i]).sum::<f64>())
            .collect();
        let hmax = h2.iter().cloned().fold(0.0, f64::max);
        h2.iter_mut().for_each(|x| *x /= hmax);
        let dot: f64 = nu2.iter().zip(&h2).map(|(a, b)| a * b).sum();
        nu2.iter_mut().for_each(|x| *x /= dot);
        h = h2;
        nu = nu2;
        let mh_dot: f64 = (0..n)
            .map(|i| nu[i] * (0..n).map(|j| m[i][j] * h[j]).sum::<f64>())
            .sum();
        let lambda = mh_dot; // ν·h = 1
        let (r, l) = residuals(m, lambda, &h, &nu);
        let data = PerronData {
            lambda,
            h: h.clone(),
            nu: nu.clone(),
            residual: r.max(l),
            iterations: it,
        };
        if data.residual <= tol {
            return Ok(data);
        }
        if best.as_ref().is_none_or(|b| data.residual < b.residual) {
            best = Some(data);
        }
    }
    Err(TransferError::NoConvergence {
        best: Box::new(best.unwrap()),
    })
}

/// Perron value of the largest recurrent component, ignoring weights.
pub fn perron_value(g: &CoverGraph, tol: f64, max_iter: usize) -> Result<f64> {
    let comps = g.recurrent_components();
    if comps.is_empty() {
        return Err(TransferError::EmptyRecurrentPart);
    }
    let adj = g.adjacency();
    let mut best: f64 = 0.0;
    for c in comps {
        let sub: Vec<Vec<f64>> = c
            .iter()
            .map(|&i| c.iter().map(|&j| adj[i][j] as f64).collect())
            .collect();
        let lambda = match perron_data(&sub, tol, max_iter) {
            Ok(pd) => pd.lambda,
            Err(TransferError::NoConvergence { best }) => best.lambda,
            Err(e) => return Err(e),
        };
        best = best.max(lambda);
    }
    Ok(best)
}

/// Natural log of the Perron value of the recurrent part.
pub fn entropy(g: &CoverGraph) -> Result<f64> {
    Ok(perron_value(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub right_residual: f64,
    pub left_residual: f64,
    /// Largest failure of shift invariance or Kolmogorov consistency over
    /// cylinders of length at most 3.
    pub invariance_violation: f64,
    /// `|Σ μ[e] - 1|` over single edges.
    pub mass_defect: f64,
    pub max_violation: f64,
    /// `μ[e]` for every edge, in edge order.
    pub edge_weights: Vec<f64>,
}

/// Measure of the cylinder spelled by edges `path` (read forward):
/// `h(s(e_1)) λ^{-n} Π w e^{A} ν(r(e_n))`.
pub fn cylinder_measure(g: &CoverGraph, potential: &[f64], pd: &PerronData, path: &[usize]) -> f64 {
    let weights = g.weights_f64();
    let first = &g.edges[path[0]];
    let last = &g.edges[*path.last().unwrap()];
    let prod: f64 = path
        .iter()
        .map(|&e| weights[e] * potential[e].exp() / pd.lambda)
        .product();
    pd.h[first.source] * prod * pd.nu[last.range]
}

pub fn equilibrium_check(g: &CoverGraph, potential: &[f64], pd: &PerronData) -> Result<EquilibriumReport> {
    let m = ruelle_matrix(g, potential)?;
    let (right, left) = residuals(&m, pd.lambda, &pd.h, &pd.nu);
    let ne = g.edge_count();
    // admissible paths of length 1..=3
    let mut paths: Vec<Vec<Vec<usize>>> = vec![(0..ne).map(|e| vec![e]).collect()];
    for _ in 1..3 {
        let next: Vec<Vec<usize>> = paths
            .last()
            .unwrap()
            .iter()
            .flat_map(|p| {
                let end = g.edges[*p.last().unwrap()].range;
                (0..ne).filter(move |&e| g.edges[e].source == end).map(move |e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
        paths.push(next);
    }
    let mu = |p: &[usize]| cylinder_measure(g, potential, pd, p);
    let mut violation: f64 = 0.0;
    for p in paths.iter().flatten() {
        let here = mu(p);
        let start = g.edges[p[0]].source;
        let end = g.edges[*p.last().unwrap()].range;
        let before: f64 = (0..ne)
            .filter(|&e| g.edges[e].range == start)
            .map(|e| {
                let mut q = vec![e];
                q.extend_from_slice(p);
                mu(&q)
            })
            .sum();
        let after: f64 = (0..ne)
            .filter(|&e| g.edges[e].source == end)
            .map(|e| {
                let mut q = p.clone();
                q.push(e);
                mu(&q)
            })
            .sum();
        violation = violation.max((before - here).abs()).max((after - here).abs());
    }
    let edge_weights: Vec<f64> = (0..ne).map(|e| mu(&[e])).collect();
    let mass_defect = (edge_weights.iter().sum::<f64>() - 1.0).abs();
    Ok(EquilibriumReport {
        right_residual: right,
        left_residual: left,
        invariance_violation: violation,
        mass_defect,
        max_violation: right.max(left).max(violation).max(mass_defect),
        edge_weights,
    })
}
