//! SAC loss kernels with hand-derived gradients.
//!
//! Everything here is generic over the scalar type: training uses f32, the
//! gradient-check tests instantiate the identical code in f64 and compare
//! against central differences.

use crate::nn::{sample_dim, DimSample, Mat, Mlp, MlpGrads, Scalar, Squash};

/// Reparameterized squashed samples for a whole batch.
pub struct BatchSample<T> {
    /// Sampled actions, `batch x k`.
    pub actions: Mat<T>,
    /// Summed log-density per row.
    pub log_probs: Vec<T>,
    /// Per-dimension partials, row-major `batch * k`.
    pub dims: Vec<DimSample<T>>,
}

/// Sample every row of a policy head output (`batch x 2k`: means then
/// log-stds) through the per-dimension transforms.
pub fn sample_actions_batch<T: Scalar>(
    head_out: &Mat<T>,
    noise: &Mat<T>,
    transforms: &[Squash],
) -> BatchSample<T> {
    let b = head_out.rows();
    let k = transforms.len();
    assert_eq!(head_out.cols(), 2 * k, "head width must be 2 * action dims");
    assert_eq!(noise.rows(), b);
    assert_eq!(noise.cols(), k);
    let mut actions = Mat::zeros(b, k);
    let mut log_probs = vec![T::zero(); b];
    let mut dims = Vec::with_capacity(b * k);
    for r in 0..b {
        let raw = head_out.row(r);
        let mut lp = T::zero();
        for (j, tr) in transforms.iter().enumerate() {
            let s = sample_dim(*tr, raw[j], raw[k + j], noise.at(r, j));
            actions.set(r, j, s.action);
            lp = lp + s.log_prob;
            dims.push(s);
        }
        log_probs[r] = lp;
    }
    BatchSample { actions, log_probs, dims }
}

/// `[a | b]` columns side by side.
pub fn concat_cols<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    assert_eq!(a.rows(), b.rows());
    let mut out = Mat::zeros(a.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        let row = out.row_mut(r);
        row[..a.cols()].copy_from_slice(a.row(r));
        row[a.cols()..].copy_from_slice(b.row(r));
    }
    out
}

/// Soft Bellman targets:
/// `y = r + gamma * mask * (min_i Q'_i(s', a') - alpha * log pi(a'|s'))`
/// with `a' ~ pi(.|s')` via the provided noise.
#[allow(clippy::too_many_arguments)]
pub fn critic_targets<T: Scalar>(
    actor: &Mlp<T>,
    transforms: &[Squash],
    target_critics: [&Mlp<T>; 2],
    next_states: &Mat<T>,
    noise: &Mat<T>,
    rewards: &[T],
    bootstrap_mask: &[T],
    gamma: T,
    alpha: T,
) -> Vec<T> {
    let b = next_states.rows();
    assert_eq!(rewards.len(), b);
    assert_eq!(bootstrap_mask.len(), b);
    let head = actor.forward_batch(next_states);
    let sample = sample_actions_batch(head.output(), noise, transforms);
    let inputs = concat_cols(next_states, &sample.actions);
    let q1 = target_critics[0].forward_batch(&inputs);
    let q2 = target_critics[1].forward_batch(&inputs);
    (0..b)
        .map(|r| {
            let q = q1.output().at(r, 0).min(q2.output().at(r, 0));
            rewards[r] + gamma * bootstrap_mask[r] * (q - alpha * sample.log_probs[r])
        })
        .collect()
}

pub struct CriticUpdate<T> {
    pub loss: T,
    pub grads: MlpGrads<T>,
}

/// Mean squared error of one critic against fixed targets, with gradients.
pub fn critic_loss_and_grads<T: Scalar>(
    critic: &Mlp<T>,
    inputs: &Mat<T>,
    targets: &[T],
) -> CriticUpdate<T> {
    let b = inputs.rows();
    assert_eq!(targets.len(), b);
    let cache = critic.forward_batch(inputs);
    let inv_b = T::from64(1.0 / b as f64);
    let two = T::from64(2.0);
    let mut d_out = Mat::zeros(b, 1);
    let mut loss = T::zero();
    for r in 0..b {
        let diff = cache.output().at(r, 0) - targets[r];
        loss = loss + diff * diff * inv_b;
        d_out.set(r, 0, two * diff * inv_b);
    }
    let (grads, _) = critic.backward_batch(&cache, &d_out);
    CriticUpdate { loss, grads }
}

pub struct ActorUpdate<T> {
    pub loss: T,
    pub grads: MlpGrads<T>,
    /// Log-densities of the sampled actions, reused by the temperature step.
    pub log_probs: Vec<T>,
}

/// Reparameterized actor objective
/// `L = mean(alpha * log pi(a|s) - min_i Q_i(s, a))`, `a = squash(mean + sigma*noise)`.
/// The critics are held fixed; their input gradient routes the Q term back
/// into the sampled actions.
pub fn actor_loss_and_grads<T: Scalar>(
    actor: &Mlp<T>,
    transforms: &[Squash],
    critics: [&Mlp<T>; 2],
    states: &Mat<T>,
    noise: &Mat<T>,
    alpha: T,
) -> ActorUpdate<T> {
    let b = states.rows();
    let k = transforms.len();
    let obs_dim = states.cols();
    let actor_cache = actor.forward_batch(states);
    let sample = sample_actions_batch(actor_cache.output(), noise, transforms);
    let inputs = concat_cols(states, &sample.actions);
    let c1 = critics[0].forward_batch(&inputs);
    let c2 = critics[1].forward_batch(&inputs);

    let inv_b = T::from64(1.0 / b as f64);
    let mut loss = T::zero();
    let mut d1 = Mat::zeros(b, 1);
    let mut d2 = Mat::zeros(b, 1);
    for r in 0..b {
        let q1 = c1.output().at(r, 0);
        let q2 = c2.output().at(r, 0);
        let q_min = q1.min(q2);
        loss = loss + (alpha * sample.log_probs[r] - q_min) * inv_b;
        // Route dL/dq_min = -1/B into whichever critic produced the minimum.
        if q1 <= q2 {
            d1.set(r, 0, -inv_b);
        } else {
            d2.set(r, 0, -inv_b);
        }
    }
    let din1 = critics[0].backward_input_only(&c1, &d1);
    let din2 = critics[1].backward_input_only(&c2, &d2);

    let mut d_head = Mat::zeros(b, 2 * k);
    for r in 0..b {
        for j in 0..k {
            let s = &sample.dims[r * k + j];
            // Already carries the -1/B factor and the argmin routing.
            let dl_da = din1.at(r, obs_dim + j) + din2.at(r, obs_dim + j);
            let d_mean = alpha * inv_b * s.dlogp_dmean + dl_da * s.da_dmean;
            let d_log_std = alpha * inv_b * s.dlogp_dlogstd + dl_da * s.da_dlogstd;
            d_head.set(r, j, d_mean);
            d_head.set(r, k + j, d_log_std);
        }
    }
    let (grads, _) = actor.backward_batch(&actor_cache, &d_head);
    ActorUpdate { loss, grads, log_probs: sample.log_probs }
}

/// Temperature objective `mean(-log_alpha * (log pi + eta))`; returns
/// `(loss, d loss / d log_alpha)`. Stationary exactly when the batch entropy
/// sits at the target.
pub fn temperature_loss_and_grad(log_alpha: f64, log_probs_f64: &[f64], eta: f64) -> (f64, f64) {
    let mean_excess =
        log_probs_f64.iter().map(|lp| lp + eta).sum::<f64>() / log_probs_f64.len() as f64;
    (-log_alpha * mean_excess, -mean_excess)
}

/// `target <- (1 - tau) * target + tau * online`, elementwise.
pub fn polyak_update<T: Scalar>(target: &mut Mlp<T>, online: &Mlp<T>, tau: f64) {
    assert_eq!(target.layers.len(), online.layers.len());
    let t = T::from64(tau);
    let keep = T::one() - t;
    for (lt, lo) in target.layers.iter_mut().zip(&online.layers) {
        for (pt, po) in lt.weight.iter_mut().zip(&lo.weight) {
            *pt = keep * *pt + t * *po;
        }
        for (pt, po) in lt.bias.iter_mut().zip(&lo.bias) {
            *pt = keep * *pt + t * *po;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::{grad_check, DEFAULT_STEP};
    use crate::nn::{Activation, TimeActivation};
    use crate::rng::{derive, Stream};
    use rand::Rng;

    fn tanh_transforms() -> Vec<Squash> {
        vec![
            Squash::duration(0.01, 1.0, TimeActivation::TanhAffine),
            Squash::force(100.0),
            Squash::force(100.0),
        ]
    }

    fn rand_mat(rows: usize, cols: usize, lo: f64, hi: f64, seed: u64) -> Mat<f64> {
        let mut rng = derive(seed, Stream::PolicyNoise);
        let data = (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect();
        Mat::from_vec(rows, cols, data)
    }

    /// Hand-computed targets on a 2-transition batch with scripted 1-layer
    /// critics and a zeroed actor head.
    #[test]
    fn critic_targets_match_hand_computation() {
        let obs_dim = 4;
        let k = 2;
        let transforms = vec![Squash::force(100.0), Squash::force(100.0)];
        let mut seed_rng = derive(0, Stream::WeightInit);
        let mut actor = Mlp::<f64>::new(&[obs_dim, 2 * k], Activation::Relu, &mut seed_rng);
        for l in &mut actor.layers {
            l.weight.fill(0.0);
            l.bias.fill(0.0);
        }
        // Scripted linear critics over [state, action].
        let mut t1 = Mlp::<f64>::new(&[obs_dim + k, 1], Activation::Relu, &mut seed_rng);
        let mut t2 = t1.clone();
        for (i, w) in t1.layers[0].weight.iter_mut().enumerate() {
            *w = 0.01 * (i as f64 + 1.0);
        }
        t1.layers[0].bias[0] = 0.1;
        for (i, w) in t2.layers[0].weight.iter_mut().enumerate() {
            *w = -0.02 * (i as f64 + 1.0);
        }
        t2.layers[0].bias[0] = 0.3;

        let next_states = Mat::from_vec(2, obs_dim, vec![0.1, 0.2, 0.3, 0.4, -0.5, 0.6, -0.7, 0.8]);
        let noise = Mat::from_vec(2, k, vec![0.5, -0.3, 1.2, 0.0]);
        let rewards = vec![1.5, -2.0];
        let mask = vec![1.0, 0.0];
        let (gamma, alpha) = (0.99, 0.12);

        let y = critic_targets(
            &actor,
            &transforms,
            [&t1, &t2],
            &next_states,
            &noise,
            &rewards,
            &mask,
            gamma,
            alpha,
        );

        // Independent scalar recomputation.
        let ln_sqrt_tau = 0.5 * (2.0 * std::f64::consts::PI).ln();
        for r in 0..2 {
            let mut a = [0.0; 2];
            let mut logp = 0.0;
            for j in 0..k {
                // mean 0, log_std 0 -> u = noise
                let u: f64 = noise.at(r, j);
                let t = u.tanh();
                a[j] = 100.0 * t;
                logp += -0.5 * u * u - ln_sqrt_tau
                    - (100.0f64).ln()
                    - (1.0 - t * t + 1e-6f64).ln();
            }
            let mut q = [0.1, 0.3];
            for (ci, qv) in q.iter_mut().enumerate() {
                let sign = if ci == 0 { 0.01 } else { -0.02 };
                for i in 0..obs_dim {
                    *qv += sign * (i as f64 + 1.0) * next_states.at(r, i);
                }
                for j in 0..k {
                    *qv += sign * ((obs_dim + j) as f64 + 1.0) * a[j];
                }
            }
            let expected = rewards[r] + gamma * mask[r] * (q[0].min(q[1]) - alpha * logp);
            assert!((y[r] - expected).abs() < 1e-10, "row {r}: {} vs {expected}", y[r]);
        }
    }

    #[test]
    fn terminal_transition_target_is_reward() {
        let transforms = vec![Squash::force(100.0)];
        let mut rng = derive(5, Stream::WeightInit);
        let actor = Mlp::<f64>::new(&[3, 4, 2], Activation::Relu, &mut rng);
        let c = Mlp::<f64>::new(&[4, 4, 1], Activation::Relu, &mut rng);
        let y = critic_targets(
            &actor,
            &transforms,
            [&c, &c],
            &rand_mat(1, 3, -1.0, 1.0, 1),
            &rand_mat(1, 1, -1.0, 1.0, 2),
            &[98.8],
            &[0.0],
            0.99,
            0.12,
        );
        assert_eq!(y[0], 98.8);
    }

    #[test]
    fn gamma_zero_target_is_reward() {
        let transforms = vec![Squash::force(100.0)];
        let mut rng = derive(6, Stream::WeightInit);
        let actor = Mlp::<f64>::new(&[3, 4, 2], Activation::Relu, &mut rng);
        let c = Mlp::<f64>::new(&[4, 4, 1], Activation::Relu, &mut rng);
        let y = critic_targets(
            &actor,
            &transforms,
            [&c, &c],
            &rand_mat(1, 3, -1.0, 1.0, 3),
            &rand_mat(1, 1, -1.0, 1.0, 4),
            &[-3.25],
            &[1.0],
            0.0,
            0.12,
        );
        assert!((y[0] - -3.25).abs() < 1e-12);
    }

    #[test]
    fn critic_gradients_match_finite_differences() {
        let mut rng = derive(8, Stream::WeightInit);
        let critic = Mlp::<f64>::new(&[5, 6, 1], Activation::Relu, &mut rng);
        let inputs = rand_mat(4, 5, -1.0, 1.0, 10);
        let targets: Vec<f64> = vec![0.3, -0.8, 1.2, 0.0];
        let err = grad_check(
            &critic,
            |m| {
                let u = critic_loss_and_grads(m, &inputs, &targets);
                (u.loss, u.grads)
            },
            DEFAULT_STEP,
        );
        assert!(err < 1e-6, "max rel error {err}");
    }

    #[test]
    fn zero_error_batch_gives_zero_critic_gradient() {
        let mut rng = derive(9, Stream::WeightInit);
        let critic = Mlp::<f64>::new(&[3, 4, 1], Activation::Relu, &mut rng);
        let inputs = rand_mat(3, 3, -1.0, 1.0, 11);
        let cache = critic.forward_batch(&inputs);
        let targets: Vec<f64> = (0..3).map(|r| cache.output().at(r, 0)).collect();
        let u = critic_loss_and_grads(&critic, &inputs, &targets);
        assert_eq!(u.loss, 0.0);
        for i in 0..u.grads.param_count() {
            assert_eq!(u.grads.param(i), 0.0);
        }
    }

    #[test]
    fn critic_loss_is_nonnegative() {
        let mut rng = derive(10, Stream::WeightInit);
        let critic = Mlp::<f64>::new(&[3, 4, 1], Activation::Relu, &mut rng);
        for s in 0..20 {
            let inputs = rand_mat(4, 3, -2.0, 2.0, 100 + s);
            let targets: Vec<f64> = (0..4).map(|i| (i as f64) - 1.5).collect();
            assert!(critic_loss_and_grads(&critic, &inputs, &targets).loss >= 0.0);
        }
    }

    #[test]
    fn actor_gradients_match_finite_differences() {
        let mut rng = derive(21, Stream::WeightInit);
        let transforms = tanh_transforms();
        let k = transforms.len();
        let obs = 5;
        let actor = Mlp::<f64>::new(&[obs, 6, 2 * k], Activation::Relu, &mut rng);
        let c1 = Mlp::<f64>::new(&[obs + k, 6, 1], Activation::Relu, &mut rng);
        let c2 = Mlp::<f64>::new(&[obs + k, 6, 1], Activation::Relu, &mut rng);
        let states = rand_mat(4, obs, -1.0, 1.0, 30);
        let noise = rand_mat(4, k, -1.5, 1.5, 31);
        let err = grad_check(
            &actor,
            |m| {
                let u = actor_loss_and_grads(m, &transforms, [&c1, &c2], &states, &noise, 0.12);
                (u.loss, u.grads)
            },
            DEFAULT_STEP,
        );
        assert!(err < 1e-4, "max rel error {err}");
    }

    #[test]
    fn actor_alpha_zero_is_pure_q_ascent() {
        // With alpha = 0 the objective reduces to -mean(min Q); check the
        // gradient against finite differences of that reduced objective.
        let mut rng = derive(22, Stream::WeightInit);
        let transforms = vec![Squash::force(100.0), Squash::force(100.0)];
        let k = transforms.len();
        let obs = 4;
        let actor = Mlp::<f64>::new(&[obs, 5, 2 * k], Activation::Relu, &mut rng);
        let c1 = Mlp::<f64>::new(&[obs + k, 5, 1], Activation::Relu, &mut rng);
        let c2 = Mlp::<f64>::new(&[obs + k, 5, 1], Activation::Relu, &mut rng);
        let states = rand_mat(3, obs, -1.0, 1.0, 40);
        let noise = rand_mat(3, k, -1.0, 1.0, 41);
        let err = grad_check(
            &actor,
            |m| {
                let u = actor_loss_and_grads(m, &transforms, [&c1, &c2], &states, &noise, 0.0);
                (u.loss, u.grads)
            },
            DEFAULT_STEP,
        );
        assert!(err < 1e-4, "max rel error {err}");
    }

    #[test]
    fn scripted_single_state_actor_loss() {
        // Zeroed actor, scripted linear critics, one state: the loss value
        // is fully hand-computable.
        let obs = 2;
        let transforms = vec![Squash::force(100.0)];
        let mut rng = derive(23, Stream::WeightInit);
        let mut actor = Mlp::<f64>::new(&[obs, 2], Activation::Relu, &mut rng);
        for l in &mut actor.layers {
            l.weight.fill(0.0);
            l.bias.fill(0.0);
        }
        let mut c1 = Mlp::<f64>::new(&[obs + 1, 1], Activation::Relu, &mut rng);
        c1.layers[0].weight.copy_from_slice(&[0.5, -0.5, 0.01]);
        c1.layers[0].bias[0] = 2.0;
        let mut c2 = c1.clone();
        c2.layers[0].bias[0] = -1.0; // c2 is always the minimum
        let states = Mat::from_vec(1, obs, vec![1.0, 2.0]);
        let noise = Mat::from_vec(1, 1, vec![0.4]);
        let alpha = 0.12;
        let u = actor_loss_and_grads(&actor, &transforms, [&c1, &c2], &states, &noise, alpha);

        let t = 0.4f64.tanh();
        let a = 100.0 * t;
        let ln_sqrt_tau = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let logp = -0.5 * 0.4 * 0.4 - ln_sqrt_tau - 100.0f64.ln() - (1.0 - t * t + 1e-6f64).ln();
        let q2 = 0.5 * 1.0 - 0.5 * 2.0 + 0.01 * a - 1.0;
        let expected = alpha * logp - q2;
        assert!((u.loss - expected).abs() < 1e-12, "{} vs {expected}", u.loss);
    }

    #[test]
    fn temperature_gradient_is_stationary_at_target_entropy() {
        let eta = -3.0;
        let log_probs = vec![3.0; 8]; // log pi == -eta
        let (_, grad) = temperature_loss_and_grad(0.12f64.ln(), &log_probs, eta);
        assert_eq!(grad, 0.0);
    }

    #[test]
    fn temperature_scripted_step_matches_hand_arithmetic() {
        let log_probs = vec![-2.0, -4.0, -3.5];
        let eta = -3.0;
        let log_alpha = 0.5f64;
        let (loss, grad) = temperature_loss_and_grad(log_alpha, &log_probs, eta);
        let mean_excess = ((-2.0 - 3.0) + (-4.0 - 3.0) + (-3.5 - 3.0)) / 3.0_f64;
        assert!((loss - -log_alpha * mean_excess).abs() < 1e-15);
        assert!((grad - -mean_excess).abs() < 1e-15);
    }

    #[test]
    fn polyak_limits_and_elementwise_mix() {
        let mut rng = derive(31, Stream::WeightInit);
        let online = Mlp::<f64>::new(&[3, 4, 2], Activation::Relu, &mut rng);
        let base = Mlp::<f64>::new(&[3, 4, 2], Activation::Relu, &mut rng);

        let mut copy = base.clone();
        polyak_update(&mut copy, &online, 1.0);
        assert_eq!(copy, online);

        let mut frozen = base.clone();
        polyak_update(&mut frozen, &online, 0.0);
        assert_eq!(frozen, base);

        let mut mixed = base.clone();
        polyak_update(&mut mixed, &online, 0.005);
        for i in 0..mixed.param_count() {
            let expected = 0.995 * base.param(i) + 0.005 * online.param(i);
            assert!((mixed.param(i) - expected).abs() < 1e-15);
        }
    }
}
