use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xychain::ed::{build_fermion_hamiltonian, build_spin_hamiltonian, Oracle};
use xychain::wick::Snapshot;
use xychain::{ChainSpec, ContractionTable, InputState, PropagatorPair};

fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> ChainSpec {
    ChainSpec::new(
        n,
        rng.random_range(0.1..=1.0),
        rng.random_range(0.0..=1.0),
        rng.random_range(0.1..=1.0),
    )
    .unwrap()
}

fn max_diff_propagator(a: &PropagatorPair, b: &PropagatorPair) -> f64 {
    (&a.a_tilde - &b.a_tilde)
        .camax()
        .max((&a.b_tilde - &b.b_tilde).camax())
}

fn max_diff_table(a: &ContractionTable, b: &ContractionTable) -> f64 {
    [
        (&a.ab - &b.ab).camax(),
        (&a.aa - &b.aa).camax(),
        (&a.bb - &b.bb).camax(),
        (&a.a_c1 - &b.a_c1).camax(),
        (&a.b_c1 - &b.b_c1).camax(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[test]
fn propagator_matches_heisenberg_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 3..=6 {
        for _ in 0..4 {
            let spec = random_spec(&mut rng, n);
            let spectrum = build_fermion_hamiltonian(&spec).unwrap().diagonalize();
            let t = rng.random_range(0.0..50.0);
            let closed = PropagatorPair::new(&spec, t);
            let exact = spectrum.propagator_pair(t);
            let d = max_diff_propagator(&closed, &exact);
            assert!(d < 1e-10, "N={n} t={t} spec={spec:?}: {d:e}");
        }
    }
}

#[test]
fn contraction_table_matches_vacuum_expectations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 3..=6 {
        for _ in 0..4 {
            let spec = random_spec(&mut rng, n);
            let spectrum = build_fermion_hamiltonian(&spec).unwrap().diagonalize();
            let t = rng.random_range(0.0..50.0);
            let d = max_diff_table(
                &ContractionTable::new(&spec, t),
                &spectrum.contraction_table(t),
            );
            assert!(d < 1e-10, "N={n} t={t}: {d:e}");
        }
    }
}

#[test]
fn bloch_vectors_match_on_every_site() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 3..=7 {
        let spec = random_spec(&mut rng, n);
        let oracle = Oracle::fermionic(&spec).unwrap();
        let input = InputState::from_alpha(rng.random_range(0.05..0.95)).unwrap();
        for _ in 0..5 {
            let t = rng.random_range(0.0..50.0);
            let snap = Snapshot::new(&spec, t);
            for r in 1..=n {
                let free = snap.bloch(r, input).unwrap();
                let exact = oracle.bloch(t, r, input).unwrap();
                let d = free.max_abs_diff(&exact);
                assert!(d < 1e-10, "N={n} r={r} t={t}: {d:e}");
            }
        }
    }
}

#[test]
fn degenerate_and_edge_specs() {
    // zero field with full anisotropy puts lambda_k = 0 at k = pi/2 for N = 4
    let specs = [
        ChainSpec::new(4, 1.0, 0.0, 0.0).unwrap(),
        ChainSpec::new(4, 1.0, 1.0, 0.0).unwrap(),
        ChainSpec::new(3, 0.0, 0.4, 0.8).unwrap(),
        ChainSpec::new(6, 1.0, 1.0, 1.0).unwrap(),
        ChainSpec::from_exchange(5, 0.3, 1.1, 0.2).unwrap(),
    ];
    let input = InputState::from_alpha(0.6).unwrap();
    for spec in specs {
        let oracle = Oracle::fermionic(&spec).unwrap();
        for t in [0.0, 0.7, 13.1, 49.9] {
            for r in 1..=spec.n_sites() {
                let d = Snapshot::new(&spec, t)
                    .bloch(r, input)
                    .unwrap()
                    .max_abs_diff(&oracle.bloch(t, r, input).unwrap());
                assert!(d < 1e-10, "{spec:?} t={t} r={r}: {d:e}");
            }
        }
    }
}

#[test]
fn spin_and_fermion_forms_agree_when_isotropic() {
    // With gamma = 0 the vacuum is an eigenstate of both forms and the
    // one-particle sector sees the same periodic hopping.
    let spec = ChainSpec::new(5, 0.8, 0.0, 0.3).unwrap();
    let f = Oracle::fermionic(&spec).unwrap();
    let s = Oracle::spin(&spec).unwrap();
    let input = InputState::from_alpha(0.7).unwrap();
    for t in [0.5, 4.0, 27.7] {
        let d = f
            .bloch(t, 3, input)
            .unwrap()
            .max_abs_diff(&s.bloch(t, 3, input).unwrap());
        assert!(d < 1e-10, "t={t}: {d:e}");
    }
}

#[test]
fn spin_form_differs_by_boundary_term_when_anisotropic() {
    let spec = ChainSpec::new(5, 1.0, 0.6, 0.1).unwrap();
    let f = build_fermion_hamiltonian(&spec).unwrap();
    let s = build_spin_hamiltonian(&spec).unwrap();
    // Same odd-parity block, different even-parity block.
    let dim = 1usize << 5;
    let mut odd = 0.0f64;
    let mut even = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let d = (f.matrix[(i, j)] - s.matrix[(i, j)]).abs();
            if i.count_ones() % 2 == 1 {
                odd = odd.max(d);
            } else {
                even = even.max(d);
            }
        }
    }
    assert!(odd < 1e-15);
    assert!(even > 0.1);
}
