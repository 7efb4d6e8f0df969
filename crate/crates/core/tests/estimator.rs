use bellpoly::decomp222::{decompose_222, estimator_second_moment, estimator_weights, variant_eberhard_values, violated_symmetry};
use bellpoly::rational::{q, to_f64};
use bellpoly::sampling::random_nonlocal_222;
use bellpoly::{catalog_222, mix, DistributionMatrix, Outcome, Q, Scenario, SettingsDistribution};
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-cell coefficients of each variant, read off by feeding unit matrices
/// through the (linear) variant evaluation.
fn coefficients(dm: &DistributionMatrix) -> Vec<[f64; 16]> {
    let sym = violated_symmetry(dm).unwrap().unwrap();
    let mut coef = vec![[0.0; 16]; 8];
    for cell in 0..16 {
        let mut unit = DistributionMatrix::zeros(Scenario::two_two_two());
        unit.set(cell / 4, Outcome::from_index(cell % 4), Q::one());
        for (i, v) in variant_eberhard_values(&unit, sym).unwrap().iter().enumerate() {
            coef[i][cell] = to_f64(v);
        }
    }
    coef
}

/// `E[X^2]` for one trial: a setting pair drawn from `pi`, an outcome from
/// `dm`, and the importance-weighted combination of the variants.
fn second_moment(c: &[f64], dm: &DistributionMatrix, pi: &[f64], coef: &[[f64; 16]]) -> f64 {
    let p: Vec<f64> = dm.flat().iter().map(to_f64).collect();
    (0..16)
        .map(|cell| {
            let r = cell / 4;
            let x: f64 = (0..8).map(|i| c[i] * coef[i][cell]).sum::<f64>() / pi[r];
            pi[r] * p[cell] * x * x
        })
        .sum()
}

fn grid_minimum(f: &dyn Fn(&[f64]) -> f64, steps: usize) -> f64 {
    fn rec(k: usize, left: usize, steps: usize, w: &mut [f64; 8], f: &dyn Fn(&[f64]) -> f64, best: &mut f64) {
        if k == 7 {
            w[7] = left as f64 / steps as f64;
            *best = best.min(f(w));
            return;
        }
        for c in 0..=left {
            w[k] = c as f64 / steps as f64;
            rec(k + 1, left - c, steps, w, f, best);
        }
    }
    let mut best = f64::INFINITY;
    rec(0, steps, steps, &mut [0.0; 8], f, &mut best);
    best
}

fn cases() -> Vec<(DistributionMatrix, SettingsDistribution)> {
    let cat = catalog_222();
    let sc = Scenario::two_two_two();
    let uniform = SettingsDistribution::uniform(sc);
    let skewed = SettingsDistribution::new(sc, vec![q(1, 2), q(1, 4), q(1, 8), q(1, 8)]).unwrap();
    let mixed = mix(&[
        (cat.pr(1).to_matrix(), q(1, 10)),
        (cat.ld(1).to_matrix(), q(6, 10)),
        (cat.ld(4).to_matrix(), q(3, 10)),
    ])
    .unwrap();
    let mut out = vec![(mixed.clone(), uniform.clone()), (mixed, skewed.clone())];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..4 {
        let s = if k % 2 == 0 { uniform.clone() } else { skewed.clone() };
        out.push((random_nonlocal_222(&mut rng), s));
    }
    out
}

#[test]
fn estimator_is_unbiased_for_half_the_pr_weight() {
    for (dm, _) in cases() {
        let half = to_f64(&decompose_222(&dm).unwrap().pr_weight()) / 2.0;
        let coef = coefficients(&dm);
        let p: Vec<f64> = dm.flat().iter().map(to_f64).collect();
        for i in 0..8 {
            let mean: f64 = (0..16).map(|cell| coef[i][cell] * p[cell]).sum();
            assert!((mean - half).abs() < 1e-12);
        }
    }
}

#[test]
fn second_moment_matches_the_trial_model() {
    for (dm, settings) in cases() {
        let coef = coefficients(&dm);
        let pi: Vec<f64> = settings.probs().iter().map(to_f64).collect();
        let c = [0.3, 0.1, 0.0, 0.2, 0.1, 0.1, 0.15, 0.05];
        let lib = estimator_second_moment(&c, &dm, &settings).unwrap();
        assert!((lib - second_moment(&c, &dm, &pi, &coef)).abs() < 1e-12);
    }
}

#[test]
fn weights_satisfy_optimality_conditions() {
    for (dm, settings) in cases() {
        let coef = coefficients(&dm);
        let pi: Vec<f64> = settings.probs().iter().map(to_f64).collect();
        let c = estimator_weights(&dm, &settings).unwrap();
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(c.iter().all(|w| *w >= 0.0));
        let f = |w: &[f64]| second_moment(w, &dm, &pi, &coef);
        let h = 1e-7;
        let grad: Vec<f64> = (0..8)
            .map(|i| {
                let mut up = c.to_vec();
                up[i] += h;
                (f(&up) - f(&c)) / h
            })
            .collect();
        let floor = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        for i in 0..8 {
            if c[i] > 1e-4 {
                assert!(grad[i] - floor < 1e-3, "active weight {i} has gradient {} above {floor}", grad[i]);
            }
        }
    }
}

#[test]
fn weights_beat_the_grid() {
    for (dm, settings) in cases().into_iter().take(3) {
        let coef = coefficients(&dm);
        let pi: Vec<f64> = settings.probs().iter().map(to_f64).collect();
        let c = estimator_weights(&dm, &settings).unwrap();
        let f = |w: &[f64]| second_moment(w, &dm, &pi, &coef);
        let grid = grid_minimum(&f, 12);
        assert!(f(&c) <= grid + 1e-9, "optimum {} above grid {grid}", f(&c));
    }
}

#[test]
fn empirical_table_prefers_low_variance_variants() {
    let text = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/empirical_weak_violation.json"));
    let loaded = bellpoly::io::parse_distribution(text).unwrap();
    let dm = bellpoly::matrix::project_nonsignaling(&loaded.matrix);
    let settings = SettingsDistribution::uniform(dm.scenario());
    let c = estimator_weights(&dm, &settings).unwrap();
    let uniform = [0.125; 8];
    let best = estimator_second_moment(&c, &dm, &settings).unwrap();
    let flat = estimator_second_moment(&uniform, &dm, &settings).unwrap();
    assert!(best <= flat);
}

#[test]
fn pr1_with_uniform_settings_spreads_weight_evenly() {
    let pr1 = catalog_222().pr(1).to_matrix();
    let settings = SettingsDistribution::uniform(pr1.scenario());
    let c = estimator_weights(&pr1, &settings).unwrap();
    assert!(c.iter().all(|w| (w - 0.125).abs() < 1e-6), "{c:?}");
    let coef = coefficients(&pr1);
    let pi = [0.25; 4];
    let f = |w: &[f64]| second_moment(w, &pr1, &pi, &coef);
    assert!(f(&c) <= grid_minimum(&f, 24) + 1e-9);
}

#[test]
fn variant_with_all_cells_empty_means_no_pr_weight() {
    // D4 puts nothing on any cell of the first variant
    let d4 = catalog_222().ld(4).to_matrix();
    let coef = coefficients(&mix(&[(catalog_222().pr(1).to_matrix(), q(1, 2)), (d4.clone(), q(1, 2))]).unwrap());
    let p: Vec<f64> = d4.flat().iter().map(to_f64).collect();
    assert!((0..16).all(|cell| coef[0][cell] == 0.0 || p[cell] == 0.0));
    let err = estimator_weights(&d4, &SettingsDistribution::uniform(d4.scenario())).unwrap_err();
    assert!(matches!(err, bellpoly::Error::NotApplicable(_)));
}
