use isratio::markov::{gamma1, Direction, MarkovChain};
use isratio::{coupling_trial, depth_stats, estimate_gamma};
use proptest::prelude::*;

fn test_chains() -> Vec<MarkovChain> {
    vec![
        MarkovChain::uniform_iid(2),
        MarkovChain::uniform_iid(5),
        MarkovChain::iid(&[0.375, 0.25, 0.375]).unwrap(),
        MarkovChain::new(
            vec![0, 1],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            vec![0.5, 0.5],
        )
        .unwrap(),
        MarkovChain::new(
            vec![0, 1, 2],
            vec![
                vec![0.1, 0.6, 0.3],
                vec![0.5, 0.0, 0.5],
                vec![0.2, 0.7, 0.1],
            ],
            vec![1.0, 0.0, 0.0],
        )
        .unwrap(),
    ]
}

#[test]
fn level_one_agrees_with_the_analytic_ratio() {
    for (i, chain) in test_chains().iter().enumerate() {
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            let est = estimate_gamma(chain, direction, 1, 50_000, 40, i as u64).unwrap();
            let g = gamma1(chain, direction).unwrap();
            assert!(
                (est.mean - g).abs() <= 4.0 * est.std_error + 1e-4,
                "chain {i} {direction:?}: {} ± {} vs {g}",
                est.mean,
                est.std_error
            );
        }
    }
}

#[test]
fn binary_second_level_is_below_one_twelfth() {
    let est = estimate_gamma(
        &MarkovChain::uniform_iid(2),
        Direction::RightToLeft,
        2,
        100_000,
        30,
        5,
    )
    .unwrap();
    assert!(est.mean <= 1.0 / 12.0 + 4.0 * est.std_error, "{}", est.mean);
}

#[test]
fn reports_are_byte_identical() {
    let chain = &test_chains()[4];
    let run = || {
        serde_json::to_vec(&(
            estimate_gamma(chain, Direction::LeftToRight, 2, 4000, 12, 17).unwrap(),
            depth_stats(chain, Direction::RightToLeft, 4000, 12, 2.0, 17).unwrap(),
            coupling_trial(&[0.2, 0.8], 500, 12, 17).unwrap(),
        ))
        .unwrap()
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn per_trial_ratios_halve(chain_index in 0usize..5, k in 1usize..5, n in 64usize..3000, seed in any::<u64>()) {
        let chain = &test_chains()[chain_index];
        let est = estimate_gamma(chain, Direction::LeftToRight, k, n, 4, seed).unwrap();
        let cap = 0.5f64.powi(k as i32) * (1.0 + 4.0 / n as f64);
        prop_assert!(est.per_trial.iter().all(|&r| r <= cap));
        prop_assert!(est.interval.0 <= est.mean && est.mean <= est.interval.1);
    }

    #[test]
    fn depth_histogram_counts_every_trial(n in 16usize..2000, trials in 1usize..20, seed in any::<u64>()) {
        let r = depth_stats(&MarkovChain::uniform_iid(3), Direction::RightToLeft, n, trials, 2.0, seed).unwrap();
        prop_assert_eq!(r.histogram.iter().sum::<usize>(), trials);
        prop_assert_eq!(r.per_trial.len(), trials);
    }

    #[test]
    fn coupling_never_loses_minima(
        weights in prop::collection::vec(0.0f64..1.0, 1..8).prop_filter("mass", |w| w.iter().sum::<f64>() > 0.0),
        seed in any::<u64>(),
    ) {
        let s: f64 = weights.iter().sum();
        let law: Vec<f64> = weights.iter().map(|w| w / s).collect();
        let r = coupling_trial(&law, 300, 20, seed).unwrap();
        prop_assert_eq!(r.violations, 0);
        prop_assert!(r.mean_discrete_ratio <= r.mean_real_ratio);
    }
}
