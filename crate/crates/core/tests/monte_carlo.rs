use rwre_core::drift::{drift_closed_movavg, drift_closed_two_dep, drift_generic};
use rwre_core::env::{build_iid, build_markov, build_two_dep, MarkovParams, TwoDepParams};
use rwre_core::mc::{
    estimate_drift, sample_environment, sample_environment_with, simulate_walk, Environment,
    NegativeSide, SimConfig,
};
use rwre_core::Model;

fn config(steps: u64, replications: usize, seed: u64) -> SimConfig {
    SimConfig {
        steps,
        replications,
        seed,
        ..SimConfig::default()
    }
}

/// Frequency of `next` given the two preceding signs, with its binomial stderr.
fn conditional(signs: &[i8], prev2: i8, prev1: i8, next: i8) -> (f64, f64, usize) {
    let mut hits = 0usize;
    let mut total = 0usize;
    for w in signs.windows(3) {
        if w[0] == prev2 && w[1] == prev1 {
            total += 1;
            hits += usize::from(w[2] == next);
        }
    }
    let f = hits as f64 / total as f64;
    (f, (f * (1.0 - f) / total as f64).sqrt(), total)
}

#[test]
fn estimates_are_bit_reproducible() {
    let spec = build_two_dep(TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap()).unwrap();
    let a = estimate_drift(&spec, 0.6, &config(5_000, 40, 11)).unwrap();
    let b = estimate_drift(&spec, 0.6, &config(5_000, 40, 11)).unwrap();
    assert_eq!(a, b);
    let c = estimate_drift(&spec, 0.6, &config(5_000, 40, 12)).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn all_plus_environment_at_p_one() {
    let env = Environment::from_signs(100, vec![1; 201]).unwrap();
    assert_eq!(simulate_walk(&env, 1.0, 100, 3).unwrap(), 100);
    let spec = build_iid(0.999_999).unwrap();
    let env = sample_environment(&spec, 50, 1).unwrap();
    assert_eq!(env.signs().len(), 101);
}

#[test]
fn fair_steps_average_to_zero() {
    let spec = Model::MovingAverage { alpha: 0.7 }.spec().unwrap();
    let est = estimate_drift(&spec, 0.5, &config(20_000, 100, 2)).unwrap();
    assert!(est.mean.abs() <= 3.0 * est.stderr, "{est:?}");
}

#[test]
fn iid_estimate_matches_one_eleventh() {
    let spec = build_iid(0.8).unwrap();
    let est = estimate_drift(&spec, 0.6, &SimConfig::default()).unwrap();
    assert!((est.mean - 1.0 / 11.0).abs() <= 3.0 * est.stderr, "{est:?}");
}

#[test]
fn moving_average_estimate_matches_closed_form() {
    let spec = Model::MovingAverage { alpha: 0.95 }.spec().unwrap();
    let est = estimate_drift(&spec, 0.6, &config(100_000, 200, 4)).unwrap();
    let exact = drift_closed_movavg(0.95, 0.6).unwrap();
    assert!(
        (est.mean - exact).abs() <= 3.0 * est.stderr,
        "{est:?} vs {exact}"
    );
}

#[test]
fn two_dep_away_from_cutoff_matches_closed_form() {
    let params = TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap();
    let spec = build_two_dep(params).unwrap();
    let est = estimate_drift(&spec, 0.52, &config(100_000, 200, 8)).unwrap();
    let exact = drift_closed_two_dep(&params, 0.52).unwrap();
    assert!(
        (est.mean - exact).abs() <= 3.0 * est.stderr,
        "{est:?} vs {exact}"
    );
}

#[test]
fn negative_side_strategies_agree() {
    let spec = build_two_dep(TwoDepParams::new(0.7, 0.2, 0.1, 0.5).unwrap()).unwrap();
    let p = 0.52;
    let run = |strategy| {
        let cfg = SimConfig {
            strategy,
            ..config(50_000, 200, 21)
        };
        estimate_drift(&spec, p, &cfg).unwrap()
    };
    let (rev, refl) = (run(NegativeSide::Reversal), run(NegativeSide::Reflected));
    let spread = rev.stderr.hypot(refl.stderr);
    assert!(
        (rev.mean - refl.mean).abs() <= 3.0 * spread,
        "{rev:?} vs {refl:?}"
    );
    let exact = drift_generic(&spec, p).unwrap().value;
    assert!(
        (rev.mean - exact).abs() <= 3.0 * rev.stderr,
        "{rev:?} vs {exact}"
    );
}

#[test]
fn markov_environment_law() {
    let (a, b) = (0.665, 0.035);
    let spec = build_markov(MarkovParams::new(a, b).unwrap());
    let env = sample_environment(&spec, 100_000, 5).unwrap();
    let signs = env.signs();
    let plus = signs.iter().filter(|&&s| s == 1).count() as f64 / signs.len() as f64;
    let alpha = a / (a + b);
    // Long runs inflate the marginal's variance by (1 + rho) / (1 - rho).
    let rho = 1.0 - a - b;
    let stderr = (alpha * (1.0 - alpha) * (1.0 + rho) / (1.0 - rho) / signs.len() as f64).sqrt();
    assert!((plus - alpha).abs() <= 3.0 * stderr, "{plus} vs {alpha}");
    let mean: f64 = signs.iter().map(|&s| s as f64).sum::<f64>() / signs.len() as f64;
    let lag: f64 =
        signs.windows(2).map(|w| (w[0] * w[1]) as f64).sum::<f64>() / (signs.len() - 1) as f64;
    let corr = (lag - mean * mean) / (1.0 - mean * mean);
    assert!((corr - rho).abs() < 0.02, "{corr} vs {rho}");
}

#[test]
fn two_dep_transition_frequencies_on_both_sides() {
    let params = TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap();
    let spec = build_two_dep(params).unwrap();
    for strategy in [NegativeSide::Reversal, NegativeSide::Reflected] {
        let env = sample_environment_with(&spec, 200_000, 9, strategy).unwrap();
        let l = env.half_width() as usize;
        let right = &env.signs()[l..];
        let checks = [
            (-1, -1, 1, params.a_minus),
            (1, -1, 1, params.a_plus),
            (-1, 1, -1, params.b_minus),
            (1, 1, -1, params.b_plus),
        ];
        for (prev2, prev1, next, target) in checks {
            let (f, se, n) = conditional(right, prev2, prev1, next);
            assert!(n > 1000);
            assert!(
                (f - target).abs() <= 3.5 * se,
                "{strategy:?} right {prev2} {prev1}: {f} vs {target}"
            );
        }
    }
    let env = sample_environment_with(&spec, 200_000, 9, NegativeSide::Reversal).unwrap();
    let whole = env.signs();
    for (prev2, prev1, next, target) in [(-1, -1, 1, params.a_minus), (1, 1, -1, params.b_plus)] {
        let (f, se, _) = conditional(whole, prev2, prev1, next);
        assert!(
            (f - target).abs() <= 3.5 * se,
            "whole window {prev2} {prev1}: {f} vs {target}"
        );
    }
}

#[test]
fn zero_drift_regime_is_transient_with_vanishing_speed() {
    let spec = build_iid(0.8).unwrap();
    let mut means = Vec::new();
    for steps in [1_000, 10_000, 100_000] {
        let est = estimate_drift(&spec, 0.9, &config(steps, 200, 17)).unwrap();
        means.push(est.mean.abs());
        if steps == 100_000 {
            assert!(est.mean.abs() < 0.02_f64.max(3.0 * est.stderr), "{est:?}");
            assert!(est.positive_fraction > 0.95, "{est:?}");
        }
    }
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}

#[test]
fn invalid_configuration_is_rejected() {
    let spec = build_iid(0.8).unwrap();
    assert!(estimate_drift(&spec, 0.6, &config(0, 10, 0)).is_err());
    assert!(estimate_drift(&spec, 0.6, &config(10, 0, 0)).is_err());
    assert!(estimate_drift(&spec, 1.5, &config(10, 10, 0)).is_err());
    let narrow = Environment::from_signs(3, vec![1; 7]).unwrap();
    assert!(simulate_walk(&narrow, 1.0, 10, 0).is_err());
}
