use hybrid_forecast::neural::{gradient_check, ModelKind, ModelSpec, NetworkParams};
use hybrid_forecast::{make_windows, EmbeddingSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;

fn random_batch(seed: u64, d: usize) -> hybrid_forecast::WindowSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let xs: Vec<f64> = (0..d + 6).map(|_| rng.random_range(0.0..1.0)).collect();
    make_windows(&xs, EmbeddingSpec::new(d, 1)).unwrap()
}

fn check(kind: ModelKind, hidden: Vec<usize>) {
    let d = 5;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let params = NetworkParams::init(ModelSpec::new(kind, d, hidden.clone(), seed)).unwrap();
        let report = gradient_check(&params, &random_batch(seed, d), STEP).unwrap();
        assert!(
            report.max_relative_error < TOLERANCE,
            "{kind:?} seed {seed}: {report:?}"
        );
        worst = worst.max(report.max_relative_error);
    }
    println!("{kind:?}: worst relative error {worst:.3e}");
}

#[test]
fn mlp_gradients_match_finite_differences() {
    check(ModelKind::Mlp, vec![6, 4]);
}

#[test]
fn rnn_gradients_match_finite_differences() {
    check(ModelKind::Rnn, vec![4]);
}

#[test]
fn gru_gradients_match_finite_differences() {
    check(ModelKind::Gru, vec![4]);
}

#[test]
fn atgru_gradients_match_finite_differences() {
    check(ModelKind::AtGru, vec![4]);
}
