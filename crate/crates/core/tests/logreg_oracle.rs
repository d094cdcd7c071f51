use clinrel_core::augment::{augmentation_experiment, LabeledFeatures};
use clinrel_core::linalg::Matrix;
use clinrel_core::logreg::{standardize_fit, train_logreg, LogRegConfig, LogisticObjective};
use clinrel_core::metrics::accuracy;
use clinrel_core::rng::Pcg32;
use clinrel_core::FeatureSet;

/// Noisy linear labels so the optimum is finite.
fn noisy_instance(seed: u64, n: usize, d: usize) -> (Matrix, Vec<u8>) {
    let mut rng = Pcg32::new(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| 3.0 * rng.next_gaussian() + 1.0).collect();
        let z: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() * 0.3;
        let p = 1.0 / (1.0 + (-z).exp());
        y.push(u8::from(rng.next_f64() < p));
        data.extend(row);
    }
    (Matrix::from_vec(n, d, data), y)
}

#[test]
fn converges_to_a_minimum_no_random_point_beats() {
    let (x, y) = noisy_instance(60, 60, 4);
    let cfg = LogRegConfig::default();
    let model = train_logreg(&x, &y, &cfg).unwrap();
    assert!(model.diagnostics.converged);
    assert!(model.diagnostics.final_grad_inf < 1e-6);

    let xs = standardize_fit(&x).unwrap().apply(&x).unwrap();
    let obj = LogisticObjective::new(&xs, &y, &cfg);
    let best = obj.loss(&model.weights, model.bias);
    let mut rng = Pcg32::new(500);
    for _ in 0..500 {
        // Uniform direction, radius <= 5.
        let mut w: Vec<f64> = (0..4).map(|_| rng.next_gaussian()).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = 5.0 * rng.next_f64();
        w.iter_mut().for_each(|v| *v *= r / norm);
        let b = 2.0 * rng.next_gaussian();
        assert!(obj.loss(&w, b) >= best, "random point beat the optimum");
    }
}

#[test]
fn loss_trace_is_non_increasing_and_training_is_deterministic() {
    let (x, y) = noisy_instance(7, 120, 6);
    let cfg = LogRegConfig::default();
    let a = train_logreg(&x, &y, &cfg).unwrap();
    let b = train_logreg(&x, &y, &cfg).unwrap();
    assert_eq!(a, b);
    for w in a.diagnostics.loss_trace.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn threshold_is_consistent_with_probability() {
    let (x, y) = noisy_instance(19, 80, 3);
    let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    let z = m.decision_function(&x).unwrap();
    let p = m.predict_proba(&x).unwrap();
    let labels = m.predict(&x).unwrap();
    for i in 0..80 {
        assert_eq!(labels[i] == 1, z[i] >= 0.0);
        assert_eq!(labels[i] == 1, p[i] >= 0.5);
    }
    assert!(accuracy(&y, &labels) > 0.6);
}

#[test]
fn empty_synthetic_set_gives_identical_reports() {
    let mut rng = Pcg32::new(1);
    let mut set = |n: usize, mu: f64| {
        let data = (0..n * 3).map(|_| (rng.next_gaussian() + mu) as f32).collect();
        FeatureSet::new("s", n, 3, data).unwrap()
    };
    let (tr_p, tr_n, te_p, te_n) = (set(30, 0.8), set(20, -0.8), set(15, 0.8), set(10, -0.8));
    let train = LabeledFeatures::from_classes(&[&tr_p], &[&tr_n]).unwrap();
    let test = LabeledFeatures::from_classes(&[&te_p], &[&te_n]).unwrap();
    let rep = augmentation_experiment(&train, &LabeledFeatures::empty(3), &test, &LogRegConfig::default()).unwrap();
    assert_eq!(rep.real_only, rep.real_plus_synth);
    assert_eq!((rep.test.positive, rep.test.negative), (15, 10));
    assert_eq!(rep.synthetic_train.positive + rep.synthetic_train.negative, 0);
}
