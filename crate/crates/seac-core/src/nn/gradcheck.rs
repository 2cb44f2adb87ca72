//! Central-difference verification of analytic gradients, run in f64.

use super::mlp::{Mlp, MlpGrads};

/// Default perturbation for central differences.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Numerical gradient of `loss` w.r.t. every network parameter, flat in
/// declaration order.
pub fn finite_difference_grads(
    net: &Mlp<f64>,
    loss: impl Fn(&Mlp<f64>) -> f64,
    step: f64,
) -> Vec<f64> {
    let n = net.param_count();
    let mut work = net.clone();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let orig = work.param(i);
        *work.param_mut(i) = orig + step;
        let plus = loss(&work);
        *work.param_mut(i) = orig - step;
        let minus = loss(&work);
        *work.param_mut(i) = orig;
        out.push((plus - minus) / (2.0 * step));
    }
    out
}

/// Worst relative disagreement between the analytic gradients produced by
/// `loss_and_grad` and central differences of its loss value. The relative
/// error divides by the larger magnitude, floored at 1e-6 so that vanishing
/// components compare on an absolute scale.
pub fn grad_check(
    net: &Mlp<f64>,
    loss_and_grad: impl Fn(&Mlp<f64>) -> (f64, MlpGrads<f64>),
    step: f64,
) -> f64 {
    let (_, analytic) = loss_and_grad(net);
    let numeric = finite_difference_grads(net, |m| loss_and_grad(m).0, step);
    let mut worst = 0.0f64;
    for (i, n) in numeric.iter().enumerate() {
        let a = analytic.param(i);
        let denom = a.abs().max(n.abs()).max(1e-6);
        worst = worst.max((a - n).abs() / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::mat::Mat;
    use crate::nn::mlp::Activation;
    use crate::rng::{derive, Stream};

    #[test]
    fn quadratic_loss_on_linear_net() {
        let net = Mlp::<f64>::new(&[3, 2], Activation::Relu, &mut derive(2, Stream::WeightInit));
        let x = vec![0.4, -0.9, 1.3];
        let target = [0.2, -0.1];
        let err = grad_check(
            &net,
            |m| {
                let input = Mat::from_vec(1, 3, x.clone());
                let cache = m.forward_batch(&input);
                let out = cache.output();
                let mut loss = 0.0;
                let mut d = Mat::zeros(1, 2);
                for c in 0..2 {
                    let diff = out.at(0, c) - target[c];
                    loss += diff * diff;
                    d.set(0, c, 2.0 * diff);
                }
                let (grads, _) = m.backward_batch(&cache, &d);
                (loss, grads)
            },
            DEFAULT_STEP,
        );
        assert!(err < 1e-7, "max rel error {err}");
    }

    #[test]
    fn constant_loss_has_zero_gradient_both_ways() {
        let net = Mlp::<f64>::new(&[2, 3, 1], Activation::Relu, &mut derive(3, Stream::WeightInit));
        let err = grad_check(&net, |m| (42.0, m.zero_grads()), DEFAULT_STEP);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn relu_net_gradients_match() {
        let net =
            Mlp::<f64>::new(&[4, 6, 5, 2], Activation::Relu, &mut derive(11, Stream::WeightInit));
        let mut r = derive(12, Stream::WeightInit);
        use rand::Rng;
        let data: Vec<f64> = (0..12).map(|_| r.random_range(-1.5..1.5)).collect();
        let err = grad_check(
            &net,
            |m| {
                let input = Mat::from_vec(3, 4, data.clone());
                let cache = m.forward_batch(&input);
                let out = cache.output();
                let mut loss = 0.0;
                let mut d = Mat::zeros(3, 2);
                for rix in 0..3 {
                    for c in 0..2 {
                        loss += out.at(rix, c) * out.at(rix, c);
                        d.set(rix, c, 2.0 * out.at(rix, c));
                    }
                }
                let (grads, _) = m.backward_batch(&cache, &d);
                (loss, grads)
            },
            DEFAULT_STEP,
        );
        assert!(err < 1e-4, "max rel error {err}");
    }
}
