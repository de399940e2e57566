mod common;

use bellmono::bell::{
    correlation_table, eq3_upper_bound, family_coefficients, general_bell_value, maximize_bell,
    Budget, CorrelationTable, Direction, Functional, PartySettings, Plane, SettingPair,
};
use bellmono::monogamy::{
    clique_cover, exact_clique_cover, greedy_clique_cover, star_partition, tree_partition,
    triangle_partition, OverlapScenario,
};
use bellmono::pauli::{parse_label, PauliString};
use bellmono::qstate::{
    complementarity_norm, correlation_components, expectation, DensityMatrix, StateVector,
};
use bellmono::scenarios::{ghz, psi_mono};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn label(n: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect())
}

fn state(n: usize, seed: u64) -> StateVector {
    StateVector::new(n, common::random_amplitudes(n, seed)).unwrap()
}

fn direction(rng: &mut ChaCha8Rng) -> Direction {
    Direction::new(common::random_unit(rng)).unwrap()
}

/// Two random directions inside `plane`.
fn pair_in(plane: &Plane, rng: &mut ChaCha8Rng) -> SettingPair {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    SettingPair::new(Direction::in_plane(plane, a), Direction::in_plane(plane, b))
}

fn random_plane(rng: &mut ChaCha8Rng) -> Plane {
    loop {
        let (a, b) = (direction(rng), direction(rng));
        if a.dot(&b).abs() < 0.99 {
            return Plane::spanned_by(&a, &b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anticommutation_is_symmetric(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng| -> String {
            (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect()
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let (p, q) = (parse_label(&a).unwrap(), parse_label(&b).unwrap());
        prop_assert_eq!(p.anticommutes(&q).unwrap(), q.anticommutes(&p).unwrap());
        prop_assert_eq!(p.anticommutes(&q).unwrap(), common::anticommute_by_sites(&a, &b));
        prop_assert!(!p.anticommutes(&p).unwrap());
    }

    #[test]
    fn labels_round_trip(text in (1usize..20).prop_flat_map(label)) {
        let p: PauliString = text.parse().unwrap();
        prop_assert_eq!(p.to_string(), text);
    }

    #[test]
    fn correlation_components_lie_in_unit_interval(n in 1usize..6, seed in any::<u64>()) {
        let s = state(n, seed);
        let sites: Vec<usize> = (0..n).collect();
        let axes = bellmono::qstate::parse_axes("xyz").unwrap();
        let tensor = correlation_components(&s, &sites, &axes).unwrap();
        for v in tensor.entries().values() {
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn expectation_is_linear_in_mixtures(
        w in 0.0f64..1.0,
        seed in any::<u64>(),
        text in label(3),
    ) {
        let (a, b) = (state(3, seed), state(3, seed ^ 1));
        let (ra, rb) = (a.to_density_matrix().unwrap(), b.to_density_matrix().unwrap());
        let mix = DensityMatrix::mixture(&[(w, &ra), (1.0 - w, &rb)]).unwrap();
        let p: PauliString = text.parse().unwrap();
        let expected = w * expectation(&a, &p).unwrap() + (1.0 - w) * expectation(&b, &p).unwrap();
        prop_assert!((expectation(&mix, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn complementarity_norm_at_most_one(seed in any::<u64>()) {
        let s = state(5, seed);
        for set in star_partition(2).unwrap().sets() {
            prop_assert!(complementarity_norm(&s, set).unwrap() <= 1.0 + 1e-9);
        }
        let t = state(3, seed);
        for set in triangle_partition().sets() {
            prop_assert!(complementarity_norm(&t, set).unwrap() <= 1.0 + 1e-9);
        }
    }

    /// L at any settings inside the planes never exceeds the plane bound.
    #[test]
    fn coplanar_value_below_plane_bound(n in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = state(n, seed);
        let subset: Vec<usize> = (0..n).collect();
        let planes: Vec<Plane> = (0..n).map(|_| random_plane(&mut rng)).collect();
        let pairs = planes.iter().map(|p| pair_in(p, &mut rng)).collect();
        let settings = PartySettings::new(subset.clone(), pairs).unwrap();
        let l = general_bell_value(&correlation_table(&s, &subset, &settings).unwrap());
        prop_assert!(l <= eq3_upper_bound(&s, &subset, &planes).unwrap() + 1e-9);
    }

    /// L equals the best family member, each of which has classical bound 1.
    #[test]
    fn general_value_is_the_best_family_member(
        parties in 2usize..4,
        values in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let size = 1usize << parties;
        let table = CorrelationTable::new(parties, values[..size].to_vec()).unwrap();
        let mut best = f64::NEG_INFINITY;
        for signs in 0u32..1 << size {
            let s: Vec<f64> = (0..size).map(|j| if signs >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let c = family_coefficients(&s);
            let bound = common::lhv_by_enumeration(&c, parties);
            prop_assert!((bound - 1.0).abs() < 1e-12);
            let value: f64 = c.iter().zip(table.values()).map(|(c, e)| c * e).sum();
            best = best.max(value / bound);
        }
        prop_assert!((general_bell_value(&table) - best).abs() < 1e-12);
    }

    #[test]
    fn partition_sum_within_set_count(seed in any::<u64>()) {
        for partition in [triangle_partition(), star_partition(2).unwrap(), tree_partition(3).unwrap()] {
            let s = state(partition.n_qubits(), seed);
            let sum = partition.squared_expectation_sum(&s).unwrap();
            prop_assert!(sum <= partition.bound() as f64 + 1e-9);
        }
    }

    /// Any shared plane per party and any settings inside it obey the
    /// partition bound, also when settings differ between experiments.
    #[test]
    fn coplanar_squared_sums_within_set_count(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (scenario, partition) in [
            (OverlapScenario::triangle(), triangle_partition()),
            (OverlapScenario::star(2).unwrap(), star_partition(2).unwrap()),
        ] {
            let s = state(scenario.n_parties(), seed);
            let planes: Vec<Plane> = (0..scenario.n_parties()).map(|_| random_plane(&mut rng)).collect();
            let mut total = 0.0;
            for experiment in scenario.experiments() {
                let pairs = experiment.iter().map(|&p| pair_in(&planes[p], &mut rng)).collect();
                let settings = PartySettings::new(experiment.clone(), pairs).unwrap();
                total += general_bell_value(&correlation_table(&s, experiment, &settings).unwrap()).powi(2);
            }
            // A local rotation takes each plane to XY, so the partition
            // bound covers arbitrary planes too.
            let mut plane_total = 0.0;
            for experiment in scenario.experiments() {
                let ps: Vec<Plane> = experiment.iter().map(|&p| planes[p]).collect();
                plane_total += eq3_upper_bound(&s, experiment, &ps).unwrap().powi(2);
            }
            prop_assert!(total <= plane_total + 1e-9);
            prop_assert!(plane_total <= partition.bound() as f64 + 1e-9);
        }
    }

    #[test]
    fn greedy_never_beats_exact(n in 2usize..4, seed in any::<u64>(), count in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = BTreeSet::new();
        while terms.len() < count {
            let l: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
            if l.chars().any(|c| c != 'I') {
                terms.insert(parse_label(&l).unwrap());
            }
        }
        let exact = exact_clique_cover(&terms).unwrap();
        let greedy = greedy_clique_cover(&terms).unwrap();
        prop_assert!(greedy.sets().len() >= exact.sets().len());
        prop_assert_eq!(clique_cover(&terms).unwrap().sets().len(), exact.sets().len());
        for cover in [&exact, &greedy] {
            prop_assert_eq!(cover.covered_terms(), &terms);
            for set in cover.sets() {
                prop_assert!(set.len() <= 2 * n + 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimized_value_below_quantum_maximum(n in 2usize..5, seed in any::<u64>()) {
        let s = state(n, seed);
        let subset: Vec<usize> = (0..n).collect();
        let report = maximize_bell(&s, &subset, Functional::General, &Budget::sampling()).unwrap();
        prop_assert!(report.value <= ((1u64 << (n - 1)) as f64).sqrt() + 1e-6);
    }

    /// A local z-rotation of the state is the same as rotating that party's
    /// settings the opposite way; the optimized values do not move.
    #[test]
    fn z_rotations_leave_values_unchanged(
        party in 0usize..3,
        theta in -3.0f64..3.0,
        seed in any::<u64>(),
        use_ghz in any::<bool>(),
    ) {
        let base = if use_ghz { ghz(3, 0.0).unwrap() } else { psi_mono(1, 0.3).unwrap() };
        let mut amps = base.amplitudes().to_vec();
        common::rotate_z(&mut amps, party, theta);
        let rotated = StateVector::new(3, amps).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subset = [0usize, 1, 2];
        let pairs: Vec<SettingPair> = (0..3).map(|_| SettingPair::new(direction(&mut rng), direction(&mut rng))).collect();
        let mut turned = pairs.clone();
        turned[party] = pairs[party].rotate_z(-theta);
        let on_rotated = correlation_table(&rotated, &subset, &PartySettings::new(subset.to_vec(), pairs).unwrap()).unwrap();
        let on_base = correlation_table(&base, &subset, &PartySettings::new(subset.to_vec(), turned).unwrap()).unwrap();
        for (a, b) in on_rotated.values().iter().zip(on_base.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }

        let planes = [Plane::XY; 3];
        let e0 = eq3_upper_bound(&base, &subset, &planes).unwrap();
        let e1 = eq3_upper_bound(&rotated, &subset, &planes).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-9);
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let v0 = maximize_bell(&base, &pair, Functional::General, &Budget::default()).unwrap().value;
            let v1 = maximize_bell(&rotated, &pair, Functional::General, &Budget::default()).unwrap().value;
            prop_assert!((v0 - v1).abs() < 1e-9, "{pair:?}: {v0} vs {v1}");
        }
    }
}

#[test]
fn deterministic_tables_score_one() {
    for parties in 2..=3usize {
        for strategy in 0u32..1 << (2 * parties) {
            let outcomes: Vec<[i8; 2]> = (0..parties)
                .map(|i| {
                    let bit = |k: usize| {
                        if strategy >> (2 * i + k) & 1 == 1 {
                            -1
                        } else {
                            1
                        }
                    };
                    [bit(0), bit(1)]
                })
                .collect();
            let table = CorrelationTable::deterministic(&outcomes).unwrap();
            assert!((general_bell_value(&table) - 1.0).abs() < 1e-12);
            assert!(
                (common::general_value_by_definition(table.values(), parties) - 1.0).abs() < 1e-12
            );
        }
    }
}
