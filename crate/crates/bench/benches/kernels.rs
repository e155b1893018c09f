use criterion::{criterion_group, criterion_main, Criterion};
use scf_ganlab_core::metrics::roc_and_auc;
use scf_ganlab_core::nn::{adam_step, AdamState, DenseLayer};
use scf_ganlab_core::{Matrix, Prng};

fn bench_dense(c: &mut Criterion) {
    let mut rng = Prng::new(1);
    let layer = DenseLayer::glorot(64, 64, &mut rng);
    let input = Matrix::from_vec(64, 64, (0..64 * 64).map(|_| rng.normal()).collect());
    let upstream = Matrix::from_vec(64, 64, (0..64 * 64).map(|_| rng.normal()).collect());
    c.bench_function("dense_forward_64x64", |b| {
        b.iter(|| layer.forward(&input).unwrap())
    });
    c.bench_function("dense_backward_64x64", |b| {
        b.iter(|| layer.backward(&input, &upstream).unwrap())
    });
}

fn bench_adam(c: &mut Criterion) {
    let mut rng = Prng::new(2);
    let mut params: Vec<f64> = (0..4096).map(|_| rng.normal()).collect();
    let grads: Vec<f64> = (0..4096).map(|_| rng.normal()).collect();
    let mut state = AdamState::new(4096, 0.0002);
    c.bench_function("adam_step_4096", |b| {
        b.iter(|| adam_step(&mut params, &grads, &mut state).unwrap())
    });
}

fn bench_roc(c: &mut Criterion) {
    let mut rng = Prng::new(3);
    let labels: Vec<u8> = (0..2000).map(|_| u8::from(rng.next_f64() < 0.3)).collect();
    let scores: Vec<f64> = (0..2000).map(|_| rng.next_f64()).collect();
    c.bench_function("roc_auc_2000", |b| {
        b.iter(|| roc_and_auc(&labels, &scores).unwrap())
    });
}

criterion_group!(benches, bench_dense, bench_adam, bench_roc);
criterion_main!(benches);
