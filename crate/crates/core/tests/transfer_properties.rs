//! Transfer identity on cover fixtures and Perron value invariances.

use coverforge::fischer::build_fischer_graph;
use coverforge::graph::CoverGraph;
use coverforge::interval::{extract_sft_cover, tent_map, Rational, DEFAULT_CELL_BUDGET};
use coverforge::krieger::{build_krieger_graph, termination_level};
use coverforge::shift::fixtures;
use coverforge::substitution::Substitution;
use coverforge::transfer::{apply_transfer, perron_data, transfer_identity_check, DEFAULT_MAX_ITER};
use coverforge::{Subshift, SubshiftSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn krieger(spec: SubshiftSpec) -> CoverGraph {
    let shift = Subshift::new(spec).unwrap();
    let level = termination_level(&shift, 6).unwrap().level.unwrap();
    build_krieger_graph(&shift, level).unwrap()
}

fn fixture_graphs() -> Vec<(&'static str, CoverGraph)> {
    let tent = tent_map(&Rational::from_integer(2.into())).unwrap();
    vec![
        ("krieger-even", krieger(fixtures::even_shift())),
        ("krieger-full3", krieger(SubshiftSpec::full(3))),
        ("fischer-golden", build_fischer_graph(&Subshift::new(fixtures::golden_mean()).unwrap()).unwrap()),
        ("fibonacci-edge-shift", Substitution::fibonacci().build_edge_shift()),
        ("tent2-sft", extract_sft_cover(&tent, 0, DEFAULT_CELL_BUDGET).unwrap()),
    ]
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(-50i64..=50).into(), rng.random_range(1i64..=20).into())
}

#[test]
fn transfer_identity_exact_on_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, g) in fixture_graphs() {
        for _ in 0..100 {
            let f: Vec<Rational> = (0..g.edge_count()).map(|_| random_rational(&mut rng)).collect();
            let gv: Vec<Rational> = (0..g.vertex_count()).map(|_| random_rational(&mut rng)).collect();
            assert!(transfer_identity_check(&g, &f, &gv).unwrap(), "{name}");
        }
    }
}

#[test]
fn transfer_of_ones_counts_incoming_edges() {
    for (name, g) in fixture_graphs() {
        let ones = vec![Rational::from_integer(1.into()); g.edge_count()];
        let counts = apply_transfer(&g, &ones).unwrap();
        for (v, c) in counts.iter().enumerate() {
            let expected = g.edges.iter().filter(|e| e.range == v).count();
            assert_eq!(*c, Rational::from_integer(expected.into()), "{name}");
        }
    }
}

fn irreducible_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0u8..3, n), n).prop_map(move |rows| {
            let mut m: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(f64::from).collect())
                .collect();
            // A cycle through every index keeps the matrix irreducible.
            for i in 0..n {
                m[i][(i + 1) % n] += 1.0;
            }
            m
        })
    })
}

fn lambda(m: &[Vec<f64>]) -> f64 {
    perron_data(m, 1e-12, DEFAULT_MAX_ITER).unwrap().lambda
}

/// Brute-force spectral radius from the growth of `‖M^k‖`.
fn growth_rate(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut p: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let mut logs = 0.0;
    let steps = 400;
    for _ in 0..steps {
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    q[i][j] += p[i][k] * m[k][j];
                }
            }
        }
        let norm: f64 = q.iter().flatten().sum();
        logs += norm.ln();
        p = q.into_iter().map(|r| r.into_iter().map(|x| x / norm).collect()).collect();
    }
    (logs / steps as f64).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perron_value_is_invariant(m in irreducible_matrix(), perm in Just(()).prop_perturb(|_, mut rng| {
        let mut p: Vec<usize> = (0..4).collect();
        for i in (1..4).rev() {
            p.swap(i, rng.random_range(0..=i));
        }
        p
    })) {
        let n = m.len();
        let perm: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        let permuted: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[perm[i]][perm[j]]).collect()).collect();
        let transposed: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();
        let l = lambda(&m);
        prop_assert!((l - lambda(&permuted)).abs() < 1e-9);
        prop_assert!((l - lambda(&transposed)).abs() < 1e-9);
        // The growth-rate estimate converges like 1/k.
        prop_assert!((l - growth_rate(&m)).abs() / l < 2e-2);
    }

    #[test]
    fn perron_value_is_monotone(m in irreducible_matrix(), i in 0usize..4, j in 0usize..4) {
        let n = m.len();
        let mut bigger = m.clone();
        bigger[i % n][j % n] += 1.0;
        prop_assert!(lambda(&m) <= lambda(&bigger) + 1e-9);
    }
}
