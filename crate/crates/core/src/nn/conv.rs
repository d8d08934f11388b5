//! 2x2, stride 1 cross-correlation with "same" zero padding.
//!
//! Activations are `[row][col][channel]`; kernels are
//! `[dy][dx][in_channel][out_channel]`. The output keeps the input's spatial
//! size: output `(y, x)` reads inputs `(y..=y+1, x..=x+1)`, with out-of-range
//! positions treated as zero (padding on the bottom and right edges).

use super::tensor::{NnError, Real};

pub const KERNEL: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conv2x2 {
    pub height: usize,
    pub width: usize,
    pub in_channels: usize,
    pub out_channels: usize,
}

impl Conv2x2 {
    pub fn kernel_len(&self) -> usize {
        KERNEL * KERNEL * self.in_channels * self.out_channels
    }

    pub fn input_len(&self) -> usize {
        self.height * self.width * self.in_channels
    }

    pub fn output_len(&self) -> usize {
        self.height * self.width * self.out_channels
    }

    fn check(&self, what: &str, got: usize, want: usize) -> Result<(), NnError> {
        if got == want {
            Ok(())
        } else {
            Err(NnError::Shape(format!(
                "conv {what}: {got} values, expected {want}"
            )))
        }
    }

    /// `output = bias + input ⋆ kernel`.
    pub fn forward<T: Real>(
        &self,
        input: &[T],
        kernel: &[T],
        bias: &[T],
        output: &mut [T],
    ) -> Result<(), NnError> {
        self.check("input", input.len(), self.input_len())?;
        self.check("kernel", kernel.len(), self.kernel_len())?;
        self.check("bias", bias.len(), self.out_channels)?;
        self.check("output", output.len(), self.output_len())?;
        let (h, w, cin, cout) = (self.height, self.width, self.in_channels, self.out_channels);
        for y in 0..h {
            for x in 0..w {
                let out = &mut output[(y * w + x) * cout..][..cout];
                out.copy_from_slice(bias);
                for dy in 0..KERNEL {
                    let yy = y + dy;
                    if yy >= h {
                        continue;
                    }
                    for dx in 0..KERNEL {
                        let xx = x + dx;
                        if xx >= w {
                            continue;
                        }
                        let inp = &input[(yy * w + xx) * cin..][..cin];
                        let kbase = (dy * KERNEL + dx) * cin * cout;
                        for (ci, &v) in inp.iter().enumerate() {
                            if v == T::zero() {
                                continue;
                            }
                            let k = &kernel[kbase + ci * cout..][..cout];
                            for (o, &kv) in out.iter_mut().zip(k) {
                                *o += v * kv;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Accumulates gradients w.r.t. kernel, bias and (optionally) input.
    ///
    /// With `relu_input` set, the input is taken to be a ReLU output and the
    /// input gradient is left untouched where the input is zero.
    #[allow(clippy::too_many_arguments)]
    pub fn backward<T: Real>(
        &self,
        relu_input: bool,
        input: &[T],
        kernel: &[T],
        grad_out: &[T],
        grad_input: Option<&mut [T]>,
        grad_kernel: &mut [T],
        grad_bias: &mut [T],
    ) -> Result<(), NnError> {
        self.check("input", input.len(), self.input_len())?;
        self.check("kernel", kernel.len(), self.kernel_len())?;
        self.check("grad_out", grad_out.len(), self.output_len())?;
        self.check("grad_kernel", grad_kernel.len(), self.kernel_len())?;
        self.check("grad_bias", grad_bias.len(), self.out_channels)?;
        let (h, w, cin, cout) = (self.height, self.width, self.in_channels, self.out_channels);
        let mut grad_input = grad_input;
        if let Some(gi) = grad_input.as_deref() {
            self.check("grad_input", gi.len(), self.input_len())?;
        }
        for y in 0..h {
            for x in 0..w {
                let g = &grad_out[(y * w + x) * cout..][..cout];
                if g.iter().all(|v| *v == T::zero()) {
                    continue;
                }
                for (gb, &gv) in grad_bias.iter_mut().zip(g) {
                    *gb += gv;
                }
                for dy in 0..KERNEL {
                    let yy = y + dy;
                    if yy >= h {
                        continue;
                    }
                    for dx in 0..KERNEL {
                        let xx = x + dx;
                        if xx >= w {
                            continue;
                        }
                        let in_off = (yy * w + xx) * cin;
                        let kbase = (dy * KERNEL + dx) * cin * cout;
                        for ci in 0..cin {
                            let koff = kbase + ci * cout;
                            let v = input[in_off + ci];
                            if v == T::zero() {
                                if relu_input {
                                    continue;
                                }
                            } else {
                                let gk = &mut grad_kernel[koff..koff + cout];
                                for (gkv, &gv) in gk.iter_mut().zip(g) {
                                    *gkv += v * gv;
                                }
                            }
                            if let Some(gi) = grad_input.as_deref_mut() {
                                let k = &kernel[koff..koff + cout];
                                let mut acc = T::zero();
                                for (&kv, &gv) in k.iter().zip(g) {
                                    acc += kv * gv;
                                }
                                gi[in_off + ci] += acc;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn all_ones_kernel_sums_window() {
        let conv = Conv2x2 {
            height: 2,
            width: 2,
            in_channels: 1,
            out_channels: 1,
        };
        let input = [1.0f64, 2.0, 3.0, 4.0];
        let mut out = [0.0; 4];
        conv.forward(&input, &[1.0; 4], &[0.0], &mut out).unwrap();
        assert_eq!(out[0], 10.0);
        // padded positions see fewer inputs
        assert_eq!(out, [10.0, 6.0, 7.0, 4.0]);
    }

    #[test]
    fn delta_kernel_is_identity() {
        let conv = Conv2x2 {
            height: 3,
            width: 4,
            in_channels: 1,
            out_channels: 1,
        };
        let input: Vec<f64> = (0..12).map(f64::from).collect();
        let mut out = vec![0.0; 12];
        conv.forward(&input, &[1.0, 0.0, 0.0, 0.0], &[0.0], &mut out)
            .unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn shape_errors() {
        let conv = Conv2x2 {
            height: 2,
            width: 2,
            in_channels: 1,
            out_channels: 1,
        };
        let mut out = [0.0f32; 4];
        assert!(conv
            .forward(&[0.0; 3], &[0.0; 4], &[0.0], &mut out)
            .is_err());
        assert!(conv
            .forward(&[0.0; 4], &[0.0; 9], &[0.0], &mut out)
            .is_err());
    }

    /// Loss = Σ output ⊙ probe; checked against central differences.
    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let conv = Conv2x2 {
            height: 3,
            width: 4,
            in_channels: 2,
            out_channels: 3,
        };
        let mut rand_vec =
            |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let input = rand_vec(conv.input_len());
        let kernel = rand_vec(conv.kernel_len());
        let bias = rand_vec(3);
        let probe = rand_vec(conv.output_len());

        let loss = |input: &[f64], kernel: &[f64], bias: &[f64]| -> f64 {
            let mut out = vec![0.0; conv.output_len()];
            conv.forward(input, kernel, bias, &mut out).unwrap();
            out.iter().zip(&probe).map(|(a, b)| a * b).sum()
        };

        let mut gi = vec![0.0; conv.input_len()];
        let mut gk = vec![0.0; conv.kernel_len()];
        let mut gb = vec![0.0; 3];
        conv.backward(
            false,
            &input,
            &kernel,
            &probe,
            Some(&mut gi),
            &mut gk,
            &mut gb,
        )
        .unwrap();

        let eps = 1e-6;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-8);
        for i in 0..input.len() {
            let (mut p, mut m) = (input.clone(), input.clone());
            p[i] += eps;
            m[i] -= eps;
            let fd = (loss(&p, &kernel, &bias) - loss(&m, &kernel, &bias)) / (2.0 * eps);
            assert!(rel(fd, gi[i]) < 1e-4, "input {i}: {fd} vs {}", gi[i]);
        }
        for i in 0..kernel.len() {
            let (mut p, mut m) = (kernel.clone(), kernel.clone());
            p[i] += eps;
            m[i] -= eps;
            let fd = (loss(&input, &p, &bias) - loss(&input, &m, &bias)) / (2.0 * eps);
            assert!(rel(fd, gk[i]) < 1e-4, "kernel {i}: {fd} vs {}", gk[i]);
        }
        for i in 0..bias.len() {
            let (mut p, mut m) = (bias.clone(), bias.clone());
            p[i] += eps;
            m[i] -= eps;
            let fd = (loss(&input, &kernel, &p) - loss(&input, &kernel, &m)) / (2.0 * eps);
            assert!(rel(fd, gb[i]) < 1e-4, "bias {i}");
        }
    }
}
