//! Fully connected networks with exact reverse-mode gradients.
//!
//! The final layer is always linear; output heads apply their own transforms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::mat::{Mat, Scalar};

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
}

impl Activation {
    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Activation> {
        match tag {
            0 => Some(Activation::Relu),
            _ => None,
        }
    }
}

/// One affine layer: `y = W x + b`, `W` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear<T> {
    pub weight: Vec<T>,
    pub bias: Vec<T>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl<T: Scalar> Linear<T> {
    /// Uniform fan-in initialization: `U(-1/sqrt(in), 1/sqrt(in))` for both
    /// weights and biases.
    fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let mut draw = || T::from64(rng.random_range(-bound..bound));
        let weight = (0..out_dim * in_dim).map(|_| draw()).collect();
        let bias = (0..out_dim).map(|_| draw()).collect();
        Linear { weight, bias, in_dim, out_dim }
    }

    fn zeros_like(&self) -> Linear<T> {
        Linear {
            weight: vec![T::zero(); self.weight.len()],
            bias: vec![T::zero(); self.bias.len()],
            in_dim: self.in_dim,
            out_dim: self.out_dim,
        }
    }
}

/// A feed-forward network: affine layers with the hidden activation between
/// them and a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub layers: Vec<Linear<T>>,
    pub hidden_activation: Activation,
}

/// Per-layer gradients shaped exactly like [`Mlp::layers`].
#[derive(Debug, Clone)]
pub struct MlpGrads<T> {
    pub layers: Vec<Linear<T>>,
}

/// Layer-by-layer activations cached by [`Mlp::forward_batch`];
/// `acts[0]` is the input, `acts[i]` the output of layer `i-1` (after the
/// hidden activation, except for the final layer which stays linear).
pub struct ForwardCache<T> {
    pub acts: Vec<Mat<T>>,
}

impl<T: Scalar> ForwardCache<T> {
    pub fn output(&self) -> &Mat<T> {
        self.acts.last().expect("cache holds at least the input")
    }
}

impl<T: Scalar> Mlp<T> {
    /// Build a network with the given layer widths, e.g. `[11, 256, 256, 6]`.
    pub fn new(dims: &[usize], hidden_activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let layers = dims.windows(2).map(|w| Linear::init(w[0], w[1], rng)).collect();
        Mlp { layers, hidden_activation }
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().expect("non-empty").in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.in_dim()];
        d.extend(self.layers.iter().map(|l| l.out_dim));
        d
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    /// Read a parameter by its position in declaration order
    /// (per layer: weights row-major, then biases).
    pub fn param(&self, mut idx: usize) -> T {
        for l in &self.layers {
            if idx < l.weight.len() {
                return l.weight[idx];
            }
            idx -= l.weight.len();
            if idx < l.bias.len() {
                return l.bias[idx];
            }
            idx -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn param_mut(&mut self, mut idx: usize) -> &mut T {
        for l in &mut self.layers {
            if idx < l.weight.len() {
                return &mut l.weight[idx];
            }
            idx -= l.weight.len();
            if idx < l.bias.len() {
                return &mut l.bias[idx];
            }
            idx -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn zero_grads(&self) -> MlpGrads<T> {
        MlpGrads { layers: self.layers.iter().map(Linear::zeros_like).collect() }
    }

    /// Single-sample forward pass.
    pub fn forward(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.in_dim(), "input length mismatch");
        let last = self.layers.len() - 1;
        let mut x = input.to_vec();
        let mut y = Vec::new();
        for (i, l) in self.layers.iter().enumerate() {
            y.clear();
            y.reserve(l.out_dim);
            for o in 0..l.out_dim {
                let row = &l.weight[o * l.in_dim..(o + 1) * l.in_dim];
                let mut acc = l.bias[o];
                for (w, v) in row.iter().zip(x.iter()) {
                    acc = acc + *w * *v;
                }
                if i < last && acc < T::zero() {
                    acc = T::zero();
                }
                y.push(acc);
            }
            std::mem::swap(&mut x, &mut y);
        }
        x
    }

    /// Batched forward pass keeping every layer activation for backprop.
    pub fn forward_batch(&self, input: &Mat<T>) -> ForwardCache<T> {
        assert_eq!(input.cols(), self.in_dim(), "input width mismatch");
        let batch = input.rows();
        let last = self.layers.len() - 1;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.clone());
        for (i, l) in self.layers.iter().enumerate() {
            let mut y = Mat::zeros(batch, l.out_dim);
            // y = x @ W^T, viewing the row-major `out x in` weights transposed.
            unsafe {
                T::gemm_raw(
                    batch,
                    l.in_dim,
                    l.out_dim,
                    T::one(),
                    acts[i].data().as_ptr(),
                    l.in_dim as isize,
                    1,
                    l.weight.as_ptr(),
                    1,
                    l.in_dim as isize,
                    T::zero(),
                    y.data_mut().as_mut_ptr(),
                    l.out_dim as isize,
                    1,
                );
            }
            for r in 0..batch {
                let row = y.row_mut(r);
                for (o, v) in row.iter_mut().enumerate() {
                    *v = *v + l.bias[o];
                    if i < last && *v < T::zero() {
                        *v = T::zero();
                    }
                }
            }
            acts.push(y);
        }
        ForwardCache { acts }
    }

    /// Reverse-mode pass: parameter gradients plus the gradient w.r.t. the
    /// network input. `d_output` is the loss gradient at the linear output.
    pub fn backward_batch(&self, cache: &ForwardCache<T>, d_output: &Mat<T>) -> (MlpGrads<T>, Mat<T>) {
        self.backward_impl(cache, d_output, true)
    }

    /// Input gradient only; parameter gradients are skipped. Used when a
    /// frozen network sits inside another network's loss.
    pub fn backward_input_only(&self, cache: &ForwardCache<T>, d_output: &Mat<T>) -> Mat<T> {
        self.backward_impl(cache, d_output, false).1
    }

    fn backward_impl(
        &self,
        cache: &ForwardCache<T>,
        d_output: &Mat<T>,
        param_grads: bool,
    ) -> (MlpGrads<T>, Mat<T>) {
        let last = self.layers.len() - 1;
        assert_eq!(d_output.rows(), cache.acts[0].rows());
        assert_eq!(d_output.cols(), self.out_dim());
        let mut grads =
            if param_grads { self.zero_grads() } else { MlpGrads { layers: Vec::new() } };
        let mut dz = d_output.clone();
        for (i, l) in self.layers.iter().enumerate().rev() {
            if i < last {
                // Gradient through the rectifier: pass where the cached
                // post-activation is positive.
                let act = &cache.acts[i + 1];
                for r in 0..dz.rows() {
                    let mask = act.row(r);
                    for (v, m) in dz.row_mut(r).iter_mut().zip(mask.iter()) {
                        if *m <= T::zero() {
                            *v = T::zero();
                        }
                    }
                }
            }
            if param_grads {
                let g = &mut grads.layers[i];
                // dW = dz^T @ x
                unsafe {
                    T::gemm_raw(
                        l.out_dim,
                        dz.rows(),
                        l.in_dim,
                        T::one(),
                        dz.data().as_ptr(),
                        1,
                        l.out_dim as isize,
                        cache.acts[i].data().as_ptr(),
                        l.in_dim as isize,
                        1,
                        T::zero(),
                        g.weight.as_mut_ptr(),
                        l.in_dim as isize,
                        1,
                    );
                }
                for r in 0..dz.rows() {
                    for (o, v) in dz.row(r).iter().enumerate() {
                        g.bias[o] = g.bias[o] + *v;
                    }
                }
            }
            // dx = dz @ W
            let mut dx = Mat::zeros(dz.rows(), l.in_dim);
            unsafe {
                T::gemm_raw(
                    dz.rows(),
                    l.out_dim,
                    l.in_dim,
                    T::one(),
                    dz.data().as_ptr(),
                    l.out_dim as isize,
                    1,
                    l.weight.as_ptr(),
                    l.in_dim as isize,
                    1,
                    T::zero(),
                    dx.data_mut().as_mut_ptr(),
                    l.in_dim as isize,
                    1,
                );
            }
            dz = dx;
        }
        (grads, dz)
    }
}

impl<T: Scalar> MlpGrads<T> {
    pub fn param(&self, mut idx: usize) -> T {
        for l in &self.layers {
            if idx < l.weight.len() {
                return l.weight[idx];
            }
            idx -= l.weight.len();
            if idx < l.bias.len() {
                return l.bias[idx];
            }
            idx -= l.bias.len();
        }
        panic!("gradient index out of range");
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn scale(&mut self, s: T) {
        for l in &mut self.layers {
            for v in l.weight.iter_mut().chain(l.bias.iter_mut()) {
                *v = *v * s;
            }
        }
    }
}
