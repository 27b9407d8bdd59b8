mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use copeland_rmed::constraints::{check_feasible, ConstraintFamily, FamilyKind, RateVector};
use copeland_rmed::copeland::CopelandSummary;
use copeland_rmed::harness::checkpoints;
use copeland_rmed::kl::{kl_bernoulli, kl_from_half};
use copeland_rmed::matrix::{PreferenceMatrix, TieMode};
use copeland_rmed::solvers::{
    ecw_explicit_bound, ecw_optimal, ecw_worstcase_bound, solve_subproblem, SubproblemInstance,
};

use common::{brute_force_feasible, random_strict_matrix, subsets, winners};

fn strict_matrix() -> impl Strategy<Value = PreferenceMatrix> {
    (2usize..=6, any::<u64>()).prop_map(|(k, seed)| {
        random_strict_matrix(&mut ChaCha8Rng::seed_from_u64(seed), k, 0.01)
    })
}

proptest! {
    #[test]
    fn pinsker_inequality(p in 0.0f64..=1.0) {
        let d = kl_from_half(p);
        prop_assert!(d >= 2.0 * (p - 0.5).powi(2) - 1e-15);
        prop_assert!((d - kl_bernoulli(p, 0.5).unwrap()).abs() < 1e-12);
        prop_assert!((d - kl_from_half(1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip(m in strict_matrix()) {
        let back = PreferenceMatrix::parse_csv(&m.to_csv_string(), TieMode::Strict).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn losses_sum_to_pair_count(m in strict_matrix()) {
        let s = CopelandSummary::new(&m).unwrap();
        let k = m.k();
        prop_assert_eq!(s.losses.iter().sum::<usize>(), k * (k - 1) / 2);
        prop_assert_eq!(s.winners.clone(), winners(&m));
    }

    #[test]
    fn condorcet_winner_is_unique(m in strict_matrix()) {
        let s = CopelandSummary::new(&m).unwrap();
        if s.is_condorcet() {
            prop_assert_eq!(s.winner_count(), 1);
        }
    }

    #[test]
    fn pair_regret_is_a_fraction(m in strict_matrix()) {
        let s = CopelandSummary::new(&m).unwrap();
        for i in 0..m.k() {
            for j in 0..m.k() {
                let r = s.regret(i, j);
                prop_assert!((0.0..=1.0).contains(&r));
                prop_assert_eq!(r == 0.0, s.is_winner(i) && s.is_winner(j));
            }
        }
    }

    #[test]
    fn relaxed_rates_are_feasible_everywhere(m in strict_matrix()) {
        for w in winners(&m) {
            let rates = ecw_optimal(&m, w).unwrap().rates;
            prop_assert!(brute_force_feasible(&m, w, FamilyKind::Ecw, &rates));
            // relaxed feasibility implies exact feasibility
            prop_assert!(brute_force_feasible(&m, w, FamilyKind::Cw, &rates));
            let family = ConstraintFamily::new(&m, w, FamilyKind::Cw).unwrap();
            prop_assert!(check_feasible(&family, &rates));
        }
    }

    #[test]
    fn worstcase_bound_dominates_explicit_up_to_six_arms(m in strict_matrix()) {
        let worst = ecw_worstcase_bound(&m).unwrap();
        for w in winners(&m) {
            let explicit = ecw_explicit_bound(&m, w).unwrap();
            prop_assert!(worst >= explicit * (1.0 - 1e-12), "{} < {}", worst, explicit);
        }
    }

    #[test]
    fn descriptors_are_never_empty(m in strict_matrix()) {
        for w in winners(&m) {
            for kind in [FamilyKind::Cw, FamilyKind::Ecw] {
                let family = ConstraintFamily::new(&m, w, kind).unwrap();
                for d in family.descriptors() {
                    prop_assert!(!d.pairs(w).is_empty());
                }
            }
        }
    }

    #[test]
    fn subproblem_solution_covers_every_subset(
        costs in prop::collection::vec(0.0f64..10.0, 1..=7),
        slack_seed in any::<usize>(),
    ) {
        let n = costs.len();
        let slack = slack_seed % n;
        let sol = solve_subproblem(&SubproblemInstance { costs: costs.clone(), slack });
        let items: Vec<usize> = (0..n).collect();
        for s in subsets(&items, n - slack) {
            prop_assert!(s.iter().map(|&j| sol.weights[j]).sum::<f64>() >= 1.0 - 1e-12);
        }
        // uniform 1/(n-k) on everything is feasible, so it cannot beat the optimum
        let uniform = costs.iter().sum::<f64>() / (n - slack) as f64;
        prop_assert!(sol.objective <= uniform + 1e-12);
    }

    #[test]
    fn checkpoint_grid_is_increasing(horizon in 1u64..2_000_000) {
        let grid = checkpoints(horizon);
        prop_assert_eq!(grid[0], 1);
        prop_assert_eq!(*grid.last().unwrap(), horizon);
        prop_assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rate_vector_json_round_trip(k in 2usize..=6, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let packed: Vec<f64> = (0..k * (k - 1) / 2).map(|_| rng.gen_range(0.0..100.0)).collect();
        let q = RateVector::from_packed(k, packed).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<RateVector>(&text).unwrap(), q);
    }
}
