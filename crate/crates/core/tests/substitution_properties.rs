use coverforge::substitution::{PathEdge, Substitution};
use coverforge::transfer::{perron_data, DEFAULT_MAX_ITER};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_path(s: &Substitution, len: usize, rng: &mut ChaCha8Rng) -> Vec<PathEdge> {
    let mut a = rng.random_range(0..s.alphabet().size()) as u16;
    let mut path = Vec::with_capacity(len);
    for _ in 0..len {
        let i = rng.random_range(1..=s.image_len(a));
        path.push((a, i));
        a = s.image(a).symbols()[i - 1];
    }
    path
}

#[test]
fn intertwining_on_random_paths() {
    let zero = num_rational::BigRational::zero();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in [Substitution::fibonacci(), Substitution::thue_morse(), Substitution::doubling()] {
        for _ in 0..500 {
            let p = random_path(&s, 8, &mut rng);
            assert!(s.validate_path(&p).is_ok());
            assert!(s.intertwine_check(&p, &zero).unwrap(), "{p:?}");
        }
    }
}

#[test]
fn inadmissible_paths_are_rejected() {
    let s = Substitution::fibonacci();
    assert!(s.validate_path(&[(0, 3)]).is_err());
    assert!(s.validate_path(&[(1, 1), (1, 1)]).is_err());
    assert!(s.intertwine_check(&[(0, 1)], &num_rational::BigRational::zero()).is_err());
}

#[test]
fn matrix_counts_and_growth() {
    let s = Substitution::fibonacci();
    let m: Vec<Vec<f64>> = s
        .matrix()
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let pd = perron_data(&m, 1e-12, DEFAULT_MAX_ITER).unwrap();
    assert!((pd.lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
    // Image lengths of S^n grow like the Perron value.
    let mut w = s.image(0).clone();
    let mut lens = vec![w.len()];
    for _ in 0..15 {
        w = coverforge::Word(w.symbols().iter().flat_map(|&a| s.image(a).symbols().to_vec()).collect());
        lens.push(w.len());
    }
    let ratio = lens[15] as f64 / lens[14] as f64;
    assert!((ratio - pd.lambda).abs() < 1e-5);
}
