//! Bias-corrected Adam for [`Mlp`] parameters and for single scalars.

use serde::{Deserialize, Serialize};

use super::mat::Scalar;
use super::mlp::{Mlp, MlpGrads};

/// Optimizer hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams { lr: 2e-4, beta1: 0.9, beta2: 0.999, eps_hat: 1e-8 }
    }
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        AdamParams { lr, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
struct LayerMoments<T> {
    mw: Vec<T>,
    vw: Vec<T>,
    mb: Vec<T>,
    vb: Vec<T>,
}

/// First/second moment accumulators shaped like the network they update.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    layers: Vec<LayerMoments<T>>,
    step: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(net: &Mlp<T>) -> Self {
        let layers = net
            .layers
            .iter()
            .map(|l| LayerMoments {
                mw: vec![T::zero(); l.weight.len()],
                vw: vec![T::zero(); l.weight.len()],
                mb: vec![T::zero(); l.bias.len()],
                vb: vec![T::zero(); l.bias.len()],
            })
            .collect();
        AdamState { layers, step: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One Adam update of `net` along `grads`.
    pub fn step(&mut self, net: &mut Mlp<T>, grads: &MlpGrads<T>, hp: &AdamParams) {
        assert_eq!(net.layers.len(), self.layers.len());
        assert_eq!(net.layers.len(), grads.layers.len());
        self.step += 1;
        let b1 = T::from64(hp.beta1);
        let b2 = T::from64(hp.beta2);
        let one = T::one();
        let lr = T::from64(hp.lr);
        let bc1 = T::from64(1.0 / (1.0 - hp.beta1.powi(self.step as i32)));
        let bc2 = T::from64(1.0 / (1.0 - hp.beta2.powi(self.step as i32)));
        let eps = T::from64(hp.eps_hat);
        for ((l, g), m) in net.layers.iter_mut().zip(&grads.layers).zip(&mut self.layers) {
            update_slice(&mut l.weight, &g.weight, &mut m.mw, &mut m.vw, b1, b2, one, lr, bc1, bc2, eps);
            update_slice(&mut l.bias, &g.bias, &mut m.mb, &mut m.vb, b1, b2, one, lr, bc1, bc2, eps);
        }
    }

    /// Flat view of the moment buffers for checkpointing: per layer,
    /// `mw, vw, mb, vb` in declaration order.
    pub fn moments(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(l.mw.as_slice());
            out.push(l.vw.as_slice());
            out.push(l.mb.as_slice());
            out.push(l.vb.as_slice());
        }
        out
    }

    pub fn moments_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.push(l.mw.as_mut_slice());
            out.push(l.vw.as_mut_slice());
            out.push(l.mb.as_mut_slice());
            out.push(l.vb.as_mut_slice());
        }
        out
    }

    pub fn set_step_count(&mut self, step: u64) {
        self.step = step;
    }
}

#[allow(clippy::too_many_arguments)]
fn update_slice<T: Scalar>(
    params: &mut [T],
    grads: &[T],
    m: &mut [T],
    v: &mut [T],
    b1: T,
    b2: T,
    one: T,
    lr: T,
    bc1: T,
    bc2: T,
    eps: T,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = b1 * m[i] + (one - b1) * g;
        v[i] = b2 * v[i] + (one - b2) * g * g;
        let m_hat = m[i] * bc1;
        let v_hat = v[i] * bc2;
        params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// Adam for one scalar parameter (the entropy temperature).
#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarAdam {
    pub m: f64,
    pub v: f64,
    pub step: u64,
}

impl ScalarAdam {
    pub fn step(&mut self, param: &mut f64, grad: f64, hp: &AdamParams) {
        self.step += 1;
        self.m = hp.beta1 * self.m + (1.0 - hp.beta1) * grad;
        self.v = hp.beta2 * self.v + (1.0 - hp.beta2) * grad * grad;
        let m_hat = self.m / (1.0 - hp.beta1.powi(self.step as i32));
        let v_hat = self.v / (1.0 - hp.beta2.powi(self.step as i32));
        *param -= hp.lr * m_hat / (v_hat.sqrt() + hp.eps_hat);
    }
}
