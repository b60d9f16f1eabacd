// Invariants checked on random inputs.

use proptest::prelude::*;

use qgm::entropy::{marginal_entropy, von_neumann, EntropyOptions};
use qgm::graphs::Graph;
use qgm::implicit::{Monomial, Poly};
use qgm::matcore::scalar::rat;
use qgm::matcore::{partial_trace, Matrix, Rat, SubsystemShape};
use qgm::pauli::random_stabilizer;
use qgm::rng::{random_state, rng_for};
use qgm::toric::{hypercube_matrix, toric_ideal};

fn three_qubit_state() -> impl Strategy<Value = Matrix<f64>> {
    any::<u64>().prop_map(|seed| random_state(&mut rng_for(seed, 0), 8))
}

fn edges(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strong_subadditivity(rho in three_qubit_state()) {
        let shape = SubsystemShape::qubits(3);
        let s = |keep: &[usize]| marginal_entropy(&rho, &shape, keep).unwrap();
        let joint = von_neumann(&rho, EntropyOptions::default()).unwrap().value;
        prop_assert!(s(&[0, 1]) + s(&[1, 2]) - s(&[1]) - joint >= -1e-9);
    }

    #[test]
    fn partial_traces_compose_and_keep_the_trace(rho in three_qubit_state()) {
        let shape = SubsystemShape::qubits(3);
        let ab = partial_trace(&rho, &shape, &[0, 1]).unwrap();
        let a_direct = partial_trace(&rho, &shape, &[0]).unwrap();
        let a_nested = partial_trace(&ab, &SubsystemShape::qubits(2), &[0]).unwrap();
        prop_assert!(a_direct.distance(&a_nested) < 1e-12);
        prop_assert!((ab.trace() - rho.trace()).abs() < 1e-12);
        prop_assert!(ab.distance(&ab.transpose()) < 1e-14);
    }

    #[test]
    fn cliques_cover_every_edge((n, es) in (2usize..7).prop_flat_map(|n| (Just(n), edges(n)))) {
        let g = Graph::new(n, &es).unwrap();
        let cliques = g.cliques();
        for (u, v) in g.edges() {
            prop_assert!(cliques.iter().any(|c| c.contains(&u) && c.contains(&v)));
        }
        for c in &cliques {
            for (i, &u) in c.iter().enumerate() {
                for &v in &c[i + 1..] {
                    prop_assert!(g.has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn stabilised_dimension_halves_per_generator(seed in any::<u64>(), n in 1usize..=6, frac in 0.0f64..=1.0) {
        let m = ((n as f64) * frac).floor() as usize;
        let s = random_stabilizer(&mut rng_for(seed, 1), n, m).unwrap();
        prop_assert_eq!(s.stab_dimension().unwrap(), 1 << (n - m));
    }

    #[test]
    fn polynomial_json_round_trips(
        n_vars in 1usize..80,
        terms in prop::collection::vec((prop::collection::vec(0u32..4, 3), -20i64..20, 1i64..9), 0..6),
    ) {
        let mut p: Poly<Rat> = Poly::zero(n_vars);
        for (exps, num, den) in terms {
            let pairs: Vec<(usize, u32)> = exps.iter().enumerate().map(|(k, &e)| ((k * 31) % n_vars, e)).collect();
            let mut m = Monomial::one();
            for (v, e) in pairs {
                for _ in 0..e {
                    m = m.mul(&Monomial::var(v));
                }
            }
            p.add_term(m, rat(num, den));
        }
        let back = Poly::<Rat>::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn toric_ideal_ignores_zero_rows(n in 1usize..=3, at in 0usize..4) {
        let a = hypercube_matrix(n);
        let mut padded = a.clone();
        padded.insert(at.min(a.len()), vec![0; a[0].len()]);
        let plain = toric_ideal(&a, 2).unwrap().binomials;
        let with_zero = toric_ideal(&padded, 2).unwrap().binomials;
        prop_assert_eq!(plain, with_zero);
    }
}
