use cesaro_core::ergodic::{
    cauchy_verdict, correlation_matrix, disintegration_gap, perturb_on_index_set, perturbation_bound,
    statistical_density_gap, strong_correlation_verdict, weak_correlation_verdict, IndexSet,
};
use cesaro_core::euler::{reynolds_defect, reynolds_trace_from_energy, EulerParams};
use cesaro_core::field::{FieldSequence, Grid};
use cesaro_core::fixtures;
use cesaro_core::measures::{
    empirical_measure, moments, parametrized_distance, sliced_wasserstein, wasserstein, weighted_ergodic_mean,
};
use cesaro_core::{CompactObservable, EmpiricalMeasure, ObservableDictionary, ParametrizedMeasure, Profile, Weight};
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn measure_1d() -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec((-5.0..5.0f64, 0.05..1.0f64), 1..12).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let points = atoms.iter().map(|a| a.0).collect();
        let mut weights: Vec<f64> = atoms.iter().map(|a| a.1 / total).collect();
        let drift = 1.0 - weights.iter().sum::<f64>();
        weights[0] += drift;
        EmpiricalMeasure::new(1, points, weights).unwrap()
    })
}

fn sequence(len: usize) -> impl Strategy<Value = FieldSequence> {
    prop::collection::vec(-1.0..2.0f64, len * 3).prop_map(move |values| {
        FieldSequence::new(Grid::new(1, [3, 1], 1, 1.0, [1.0, 1.0]).unwrap(), 1, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wasserstein_is_a_metric(a in measure_1d(), b in measure_1d(), c in measure_1d()) {
        let ab = wasserstein(&a, &b, 1.0).unwrap();
        let ba = wasserstein(&b, &a, 1.0).unwrap();
        let bc = wasserstein(&b, &c, 1.0).unwrap();
        let ac = wasserstein(&a, &c, 1.0).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10);
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!(wasserstein(&a, &a, 1.0).unwrap() <= 1e-12);
    }

    #[test]
    fn sliced_equals_exact_in_one_dimension(a in measure_1d(), b in measure_1d(), k in 1usize..40, s in 1.0..3.0f64) {
        let exact = wasserstein(&a, &b, s).unwrap();
        let sliced = sliced_wasserstein(&a, &b, s, k).unwrap();
        prop_assert!((exact - sliced).abs() <= 1e-12, "{exact} vs {sliced}");
    }

    #[test]
    fn empirical_measures_have_unit_mass(seq in sequence(40), n in 10usize..=40) {
        for w in Weight::default_family() {
            for cell in 0..3 {
                let mu = empirical_measure(&seq, cell, &w, n).unwrap();
                prop_assert!((mu.total_mass() - 1.0).abs() <= 1e-12);
                prop_assert!(mu.len() <= n);
            }
        }
    }

    #[test]
    fn integrals_match_ergodic_means(seq in sequence(30), n in 8usize..=30) {
        let b = CompactObservable::new(vec![0.5], 0.7, Profile::Tent, 0).unwrap();
        for w in Weight::default_family() {
            let means = weighted_ergodic_mean(&seq, &b, &w, n).unwrap();
            for (cell, mean) in means.iter().enumerate() {
                let mu = empirical_measure(&seq, cell, &w, n).unwrap();
                prop_assert!((mu.integrate(|u| b.eval(u)) - mean).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn barycenter_is_in_the_hull_and_variance_nonnegative(mu in measure_1d()) {
        let m = moments(&mu, 2.0).unwrap();
        let lo = (0..mu.len()).map(|i| mu.point(i)[0]).fold(f64::INFINITY, f64::min);
        let hi = (0..mu.len()).map(|i| mu.point(i)[0]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m.barycenter[0] >= lo - 1e-12 && m.barycenter[0] <= hi + 1e-12);
        prop_assert!(m.variance.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn tent_observables_are_lipschitz(
        c in prop::collection::vec(-2.0..2.0f64, 2),
        r in 0.1..2.0f64,
        u in prop::collection::vec(-3.0..3.0f64, 2),
        v in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let b = CompactObservable::new(c, r, Profile::Tent, 0).unwrap();
        let l1: f64 = u.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!((b.eval(&u) - b.eval(&v)).abs() <= l1 / r + 1e-12);
        prop_assert!((b.eval(&u) - b.eval(&v)).abs() <= b.lipschitz() * l1 + 1e-12);
    }

    #[test]
    fn constant_weight_strong_verdict_is_the_weak_one(seq in sequence(64), m in 1usize..8) {
        let b = CompactObservable::new(vec![0.5], 1.0, Profile::Tent, 0).unwrap();
        let rec = correlation_matrix(&seq, &b, 64).unwrap();
        let weak = weak_correlation_verdict(&rec, m, &[16, 32, 64], 1e-2).unwrap();
        let strong = strong_correlation_verdict(&rec, m, &[Weight::constant()], &[16, 32, 64], 1e-2).unwrap();
        prop_assert_eq!(strong.per_weight.len(), 1);
        prop_assert_eq!(&strong.per_weight[0], &weak);
    }

    #[test]
    fn perturbation_respects_the_density_bound(seq in sequence(400), magnitude in 0.0..20.0f64, seed in any::<u64>()) {
        let b = CompactObservable::new(vec![0.5], 0.5, Profile::Tent, 0).unwrap();
        let n = 400;
        for set in [IndexSet::Squares, IndexSet::PowersOfTwo] {
            let perturbed = perturb_on_index_set(&seq, &set, magnitude, seed).unwrap();
            let delta = statistical_density_gap(&seq, &perturbed, 0.0, n).unwrap();
            prop_assert!(delta <= set.density(n).unwrap());
            let a = weighted_ergodic_mean(&seq, &b, &Weight::constant(), n).unwrap();
            let c = weighted_ergodic_mean(&perturbed, &b, &Weight::constant(), n).unwrap();
            let grid = seq.grid();
            let dist: f64 = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).sum::<f64>() * grid.cell_volume();
            prop_assert!(dist <= perturbation_bound(delta, grid.measure(), b.lipschitz(), 0.0));
        }
    }

    #[test]
    fn periodic_sequences_converge(values in prop::collection::vec(0.0..1.0f64, 1..6), n0 in 40usize..80) {
        let period = values.len();
        let len = 4 * n0;
        let seq = fixtures::periodic(Grid::unit(2), len, &values);
        let b = CompactObservable::new(vec![0.5], 0.5, Profile::Tent, 0).unwrap();
        let rec = correlation_matrix(&seq, &b, len).unwrap();
        for m_level in [n0, 2 * n0, len] {
            let gap = disintegration_gap(&rec, &Weight::constant(), len, m_level).unwrap();
            prop_assert!(gap <= period as f64 / len as f64 + 1e-12);
        }
        let schedule = [n0, 2 * n0, 4 * n0];
        let v = cauchy_verdict(&seq, &b, &Weight::constant(), &schedule, 1.0).unwrap();
        prop_assert!(v.tail_gap <= period as f64 / n0 as f64 + 1e-12);
    }

    #[test]
    fn defect_trace_matches_energy_path(values in prop::collection::vec(0.2..3.0f64, 48)) {
        let params = EulerParams::new(1.3, 1.6, 1, 0.0, 0.45).unwrap();
        let grid = Grid::line(2, 2, 1.0).unwrap();
        let mut data = values.clone();
        for chunk in data.chunks_exact_mut(2) {
            chunk[1] -= 1.5;
        }
        let seq = FieldSequence::new(grid, 2, data).unwrap();
        let defect = reynolds_defect(&seq, 6, &params).unwrap();
        let trace = reynolds_trace_from_energy(&seq, 6, &params).unwrap();
        for (cell, t) in trace.iter().enumerate() {
            prop_assert!((defect.trace(cell) - t).abs() <= 1e-10 * (1.0 + t.abs()));
            prop_assert!(defect.min_eigenvalue(cell) >= -1e-12);
        }
    }
}

#[test]
fn weight_normalizers_are_midpoint_accurate() {
    for w in Weight::default_family() {
        for n in [10, 100, 1000] {
            let ratio = w.partial_sum(n).unwrap() / n as f64;
            assert!((ratio - 1.0).abs() <= w.derivative_bound() / n as f64 + 1e-12, "{} at {n}", w.label());
        }
    }
}

#[test]
fn dictionary_covers_its_range() {
    for dim in 1..=3 {
        let lo = vec![-1.0; dim];
        let hi = vec![2.0; dim];
        let dict = ObservableDictionary::lattice(&lo, &hi, 5, Profile::Tent).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
        for _ in 0..1000 {
            let u: Vec<f64> =
                (0..dim).map(|_| -1.0 + 3.0 * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).collect();
            assert!(dict.max_eval(&u) >= 0.25);
        }
    }
}

#[test]
fn equivalent_sequences_share_the_limit() {
    let seq = fixtures::alternating(Grid::unit(3), 4096);
    let perturbed = perturb_on_index_set(&seq, &IndexSet::Squares, 5.0, 7).unwrap();
    let a = ParametrizedMeasure::from_sequence(&seq, &Weight::constant(), 4096).unwrap();
    let b = ParametrizedMeasure::from_sequence(&perturbed, &Weight::constant(), 4096).unwrap();
    let delta = IndexSet::Squares.density(4096).unwrap();
    // moved mass is at most delta per cell, transported at most |noise| <= 5
    let bound = seq.grid().measure() * delta * 5.0;
    assert!(parametrized_distance(&a, &b, 1.0).unwrap() <= bound);
}

#[test]
fn strongly_convergent_collapses_to_a_dirac() {
    let grid = Grid::unit(4);
    let seq = fixtures::strongly_convergent(grid.clone(), 1000, 1.0);
    let limit = fixtures::strongly_convergent_limit(grid, 1.0);
    for n in [10, 100, 1000] {
        let mu = ParametrizedMeasure::from_sequence(&seq, &Weight::constant(), n).unwrap();
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum::<f64>() / n as f64;
        let d = parametrized_distance(&mu, &limit, 1.0).unwrap();
        assert!(d <= harmonic * (1.0 + 1e-12), "{d} vs {harmonic}");
    }
}
