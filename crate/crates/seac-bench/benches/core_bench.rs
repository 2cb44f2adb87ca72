//! Hot-path benchmarks: environment stepping, network passes, one full SAC
//! update, and action selection.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use seac_core::agent::{Algo, SacConfig, Trainer};
use seac_core::env::{ElasticAction, EnvConfig, PointMassEnv};
use seac_core::nn::{Activation, Mat, Mlp, TimeActivation};
use seac_core::reward::RewardWeights;
use seac_core::rng::{derive, Stream};
use seac_core::vec2::Vec2;

fn bench_env_step(c: &mut Criterion) {
    let mut env = PointMassEnv::new(
        EnvConfig::default(),
        RewardWeights::default(),
        derive(1, Stream::EnvPlacement),
    )
    .unwrap();
    env.reset();
    let action = ElasticAction::new(0.05, Vec2::new(90.0, 85.0));
    c.bench_function("env_step", |b| {
        b.iter(|| {
            if env.is_terminal() {
                env.reset();
            }
            black_box(env.step(black_box(&action)).unwrap())
        })
    });
}

fn bench_mlp_batch(c: &mut Criterion) {
    let mut rng = derive(2, Stream::WeightInit);
    let net = Mlp::<f32>::new(&[14, 256, 256, 1], Activation::Relu, &mut rng);
    let input = Mat::from_vec(256, 14, vec![0.3f32; 256 * 14]);
    c.bench_function("mlp_forward_batch256", |b| {
        b.iter(|| black_box(net.forward_batch(black_box(&input))))
    });
    let cache = net.forward_batch(&input);
    let d_out = Mat::from_vec(256, 1, vec![0.01f32; 256]);
    c.bench_function("mlp_backward_batch256", |b| {
        b.iter(|| black_box(net.backward_batch(black_box(&cache), black_box(&d_out))))
    });
}

fn trainer_past_warmup(algo: Algo) -> Trainer {
    let sac = SacConfig { start_steps: 300, ..Default::default() };
    let mut t = Trainer::new(
        3,
        algo,
        TimeActivation::TanhAffine,
        EnvConfig::default(),
        RewardWeights::default(),
        sac,
    )
    .unwrap();
    for _ in 0..301 {
        t.step_once().unwrap();
    }
    t
}

fn bench_training_step(c: &mut Criterion) {
    let mut t = trainer_past_warmup(Algo::Seac);
    c.bench_function("train_step_with_update_seac", |b| {
        b.iter(|| black_box(t.step_once().unwrap()))
    });
    let mut t = trainer_past_warmup(Algo::SacFixed);
    c.bench_function("train_step_with_update_fixed", |b| {
        b.iter(|| black_box(t.step_once().unwrap()))
    });
}

fn bench_select_action(c: &mut Criterion) {
    let t = trainer_past_warmup(Algo::Seac);
    let mut rng = derive(4, Stream::PolicyNoise);
    let obs = [0.5f64, 0.5, 1.2, 1.4, 1.8, 0.3, 0.0, 0.0, 0.1, 20.0, -30.0];
    c.bench_function("select_action_stochastic", |b| {
        b.iter(|| black_box(t.actor().select_action(black_box(&obs), true, &mut rng)))
    });
}

criterion_group!(
    benches,
    bench_env_step,
    bench_mlp_batch,
    bench_training_step,
    bench_select_action
);
criterion_main!(benches);
