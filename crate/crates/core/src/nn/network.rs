//! Shared convolutional trunk with separate policy and value heads.
//!
//! ```text
//! input (H x W x m)
//!   -> conv 2x2 -> ReLU -> conv 2x2 -> ReLU -> conv 2x2 -> ReLU   (trunk)
//!   -> flatten -> dense -> H*W logits                               (policy)
//!   -> flatten -> dense -> 1                                        (value)
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::conv::Conv2x2;
use super::tensor::{NnError, Real, Tensor};
use crate::rng::rng_from_seed;

pub const DEFAULT_CONV_CHANNELS: [usize; 3] = [32, 64, 64];
pub const INIT_SCHEME: &str = "orthogonal-v1";

pub const PARAM_NAMES: [&str; 10] = [
    "conv1.weight",
    "conv1.bias",
    "conv2.weight",
    "conv2.bias",
    "conv3.weight",
    "conv3.bias",
    "policy.weight",
    "policy.bias",
    "value.weight",
    "value.bias",
];
const POLICY_W: usize = 6;
const POLICY_B: usize = 7;
const VALUE_W: usize = 8;
const VALUE_B: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub width: usize,
    pub height: usize,
    pub in_channels: usize,
    pub conv_channels: [usize; 3],
}

impl NetShape {
    pub fn new(width: usize, height: usize, in_channels: usize) -> Self {
        NetShape {
            width,
            height,
            in_channels,
            conv_channels: DEFAULT_CONV_CHANNELS,
        }
    }

    pub fn with_conv_channels(mut self, conv_channels: [usize; 3]) -> Self {
        self.conv_channels = conv_channels;
        self
    }

    #[inline]
    pub fn actions(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn input_len(&self) -> usize {
        self.actions() * self.in_channels
    }

    fn flat_len(&self) -> usize {
        self.actions() * self.conv_channels[2]
    }

    pub fn conv(&self, layer: usize) -> Conv2x2 {
        let cin = if layer == 0 {
            self.in_channels
        } else {
            self.conv_channels[layer - 1]
        };
        Conv2x2 {
            height: self.height,
            width: self.width,
            in_channels: cin,
            out_channels: self.conv_channels[layer],
        }
    }

    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let mut shapes = Vec::with_capacity(10);
        for layer in 0..3 {
            let c = self.conv(layer);
            shapes.push(vec![2, 2, c.in_channels, c.out_channels]);
            shapes.push(vec![c.out_channels]);
        }
        shapes.push(vec![self.flat_len(), self.actions()]);
        shapes.push(vec![self.actions()]);
        shapes.push(vec![self.flat_len(), 1]);
        shapes.push(vec![1]);
        shapes
    }
}

/// All learnable tensors, in [`PARAM_NAMES`] order. Also used to hold
/// gradients of the same shape.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams<T> {
    pub shape: NetShape,
    pub init: String,
    pub tensors: Vec<Tensor<T>>,
}

/// Per-caller buffers for a forward/backward pass.
#[derive(Clone, Debug)]
pub struct Workspace<T> {
    /// Input followed by the three post-ReLU trunk activations.
    pub acts: [Vec<T>; 4],
    pub logits: Vec<T>,
    pub value: T,
    grads: [Vec<T>; 3],
}

impl<T: Real> Workspace<T> {
    pub fn new(shape: &NetShape) -> Self {
        let cells = shape.actions();
        let c = shape.conv_channels;
        Workspace {
            acts: [
                vec![T::zero(); shape.input_len()],
                vec![T::zero(); cells * c[0]],
                vec![T::zero(); cells * c[1]],
                vec![T::zero(); cells * c[2]],
            ],
            logits: vec![T::zero(); cells],
            value: T::zero(),
            grads: [
                vec![T::zero(); cells * c[0]],
                vec![T::zero(); cells * c[1]],
                vec![T::zero(); cells * c[2]],
            ],
        }
    }
}

/// Orthonormalizes the smaller dimension of a `rows x cols` matrix, then scales.
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut impl Rng) -> Vec<f64> {
    let (count, len) = if rows < cols {
        (rows, cols)
    } else {
        (cols, rows)
    };
    let mut vecs: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            (0..len)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    for i in 0..count {
        let (done, rest) = vecs.split_at_mut(i);
        let v = &mut rest[0];
        for u in done.iter() {
            let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        v.iter_mut().for_each(|a| *a /= norm);
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = gain * if rows < cols { vecs[r][c] } else { vecs[c][r] };
        }
    }
    out
}

impl<T: Real> NetworkParams<T> {
    pub fn zeros(shape: NetShape) -> Self {
        NetworkParams {
            shape,
            init: "zeros".into(),
            tensors: shape
                .param_shapes()
                .iter()
                .map(|s| Tensor::zeros(s))
                .collect(),
        }
    }

    /// Orthogonal initialization: gain √2 for the trunk, 0.01 for the policy
    /// head and 1 for the value head; zero biases.
    pub fn init(shape: NetShape, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let mut params = Self::zeros(shape);
        params.init = INIT_SCHEME.into();
        let gains = [2f64.sqrt(), 2f64.sqrt(), 2f64.sqrt(), 0.01, 1.0];
        for (layer, gain) in gains.iter().enumerate() {
            let w = &mut params.tensors[layer * 2];
            let cols = *w.shape.last().unwrap();
            let rows = w.len() / cols;
            let values = orthogonal(rows, cols, *gain, &mut rng);
            w.data = values.into_iter().map(T::of).collect();
        }
        params
    }

    pub fn param_count(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.shape)
    }

    pub fn fill_zero(&mut self) {
        self.tensors.iter_mut().for_each(Tensor::fill_zero);
    }

    pub fn all_finite(&self) -> bool {
        self.tensors.iter().all(Tensor::all_finite)
    }

    pub fn cast<U: Real>(&self) -> NetworkParams<U> {
        NetworkParams {
            shape: self.shape,
            init: self.init.clone(),
            tensors: self.tensors.iter().map(Tensor::cast).collect(),
        }
    }

    /// Flat view of parameter `i` across all tensors.
    pub fn get_flat(&self, mut i: usize) -> T {
        for t in &self.tensors {
            if i < t.len() {
                return t.data[i];
            }
            i -= t.len();
        }
        panic!("parameter index out of range");
    }

    pub fn set_flat(&mut self, mut i: usize, v: T) {
        for t in &mut self.tensors {
            if i < t.len() {
                t.data[i] = v;
                return;
            }
            i -= t.len();
        }
        panic!("parameter index out of range");
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors
            .iter()
            .flat_map(|t| t.data.iter())
            .map(|v| v.as_f64() * v.as_f64())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: T) {
        for t in &mut self.tensors {
            t.data.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// Runs the network on `input` (length `shape.input_len()`), leaving raw
    /// logits and the value estimate in `ws`.
    pub fn forward(&self, input: &[T], ws: &mut Workspace<T>) -> Result<(), NnError> {
        if input.len() != self.shape.input_len() {
            return Err(NnError::Shape(format!(
                "input has {} values, network expects {}",
                input.len(),
                self.shape.input_len()
            )));
        }
        ws.acts[0].copy_from_slice(input);
        for layer in 0..3 {
            let conv = self.shape.conv(layer);
            let (before, after) = ws.acts.split_at_mut(layer + 1);
            let out = &mut after[0];
            conv.forward(
                &before[layer],
                &self.tensors[layer * 2].data,
                &self.tensors[layer * 2 + 1].data,
                out,
            )?;
            for v in out.iter_mut() {
                if *v < T::zero() {
                    *v = T::zero();
                }
            }
        }

        let flat = &ws.acts[3];
        let actions = self.shape.actions();
        let pw = &self.tensors[POLICY_W].data;
        let vw = &self.tensors[VALUE_W].data;
        ws.logits.copy_from_slice(&self.tensors[POLICY_B].data);
        let mut value = self.tensors[VALUE_B].data[0];
        for (i, &h) in flat.iter().enumerate() {
            if h == T::zero() {
                continue;
            }
            let row = &pw[i * actions..(i + 1) * actions];
            for (l, &w) in ws.logits.iter_mut().zip(row) {
                *l += h * w;
            }
            value += h * vw[i];
        }
        ws.value = value;
        if !value.is_finite() || ws.logits.iter().any(|l| !l.is_finite()) {
            return Err(NnError::NonFinite("network output".into()));
        }
        Ok(())
    }

    /// Accumulates into `grads` the gradient of a loss whose derivatives with
    /// respect to the logits and value of the last `forward` on `ws` are given.
    pub fn backward(
        &self,
        ws: &mut Workspace<T>,
        dlogits: &[T],
        dvalue: T,
        grads: &mut NetworkParams<T>,
    ) -> Result<(), NnError> {
        let actions = self.shape.actions();
        if dlogits.len() != actions {
            return Err(NnError::Shape("logit gradient length".into()));
        }
        let flat = &ws.acts[3];
        let pw = &self.tensors[POLICY_W].data;
        let vw = &self.tensors[VALUE_W].data;
        {
            let (gpw, rest) = grads.tensors[POLICY_W..].split_at_mut(1);
            let gpw = &mut gpw[0].data;
            for (gb, &d) in rest[0].data.iter_mut().zip(dlogits) {
                *gb += d;
            }
            let gh = &mut ws.grads[2];
            for (i, &h) in flat.iter().enumerate() {
                if h == T::zero() {
                    // ReLU is inactive; no gradient reaches the trunk here
                    gh[i] = T::zero();
                    continue;
                }
                let row = &pw[i * actions..(i + 1) * actions];
                let grow = &mut gpw[i * actions..(i + 1) * actions];
                let mut acc = dvalue * vw[i];
                for ((gw, &w), &d) in grow.iter_mut().zip(row).zip(dlogits) {
                    *gw += h * d;
                    acc += w * d;
                }
                gh[i] = acc;
            }
        }
        {
            let (gvw, gvb) = grads.tensors[VALUE_W..].split_at_mut(1);
            for (g, &h) in gvw[0].data.iter_mut().zip(flat) {
                *g += h * dvalue;
            }
            gvb[0].data[0] += dvalue;
        }

        for layer in (0..3).rev() {
            let conv = self.shape.conv(layer);
            let (gk, gb) = grads.tensors[layer * 2..].split_at_mut(1);
            let (lower, upper) = ws.grads.split_at_mut(layer);
            let grad_out = &upper[0];
            let grad_in = if layer > 0 {
                let gi = &mut lower[layer - 1];
                gi.iter_mut().for_each(|v| *v = T::zero());
                Some(gi.as_mut_slice())
            } else {
                None
            };
            conv.backward(
                true,
                &ws.acts[layer],
                &self.tensors[layer * 2].data,
                grad_out,
                grad_in,
                &mut gk[0].data,
                &mut gb[0].data,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_params_give_uniform_logits_and_zero_value() {
        let shape = NetShape::new(3, 2, 5).with_conv_channels([4, 4, 4]);
        let net = NetworkParams::<f64>::zeros(shape);
        let mut ws = Workspace::new(&shape);
        let input: Vec<f64> = (0..shape.input_len()).map(|i| i as f64 * 0.1).collect();
        net.forward(&input, &mut ws).unwrap();
        assert!(ws.logits.iter().all(|l| *l == ws.logits[0]));
        assert_eq!(ws.value, 0.0);
    }

    #[test]
    fn init_is_deterministic_and_orthogonal() {
        let shape = NetShape::new(4, 4, 3).with_conv_channels([8, 8, 8]);
        let a = NetworkParams::<f32>::init(shape, 7);
        let b = NetworkParams::<f32>::init(shape, 7);
        assert_eq!(a, b);
        assert_ne!(a, NetworkParams::<f32>::init(shape, 8));
        // conv2 weight is 32 x 8: its columns are orthogonal with norm √2
        let w = &a.tensors[2].data;
        for i in 0..8 {
            for j in 0..8 {
                let dot: f32 = (0..32).map(|r| w[r * 8 + i] * w[r * 8 + j]).sum();
                let want = if i == j { 2.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-4, "{i},{j}: {dot}");
            }
        }
    }

    #[test]
    fn wrong_input_length_is_a_shape_error() {
        let shape = NetShape::new(2, 2, 2).with_conv_channels([2, 2, 2]);
        let net = NetworkParams::<f32>::init(shape, 0);
        let mut ws = Workspace::new(&shape);
        assert!(matches!(
            net.forward(&[0.0; 3], &mut ws),
            Err(NnError::Shape(_))
        ));
    }
}
