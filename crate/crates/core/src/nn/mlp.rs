//! Fully-connected MLP with ReLU hidden layers and a linear output layer.
//!
//! Forward and backward operate on flat row-major batches and reuse caller
//! scratch buffers so the training loop is allocation-free.

use rand::Rng;

use super::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Layer<T> {
    /// Row-major `(out_dim, in_dim)` weights.
    pub w: Vec<T>,
    pub b: Vec<T>,
    pub in_dim: usize,
    pub out_dim: usize,
}

#[derive(Debug, Clone)]
pub struct Mlp<T> {
    pub layers: Vec<Layer<T>>,
    /// Layer widths `[input, hidden.., output]`.
    pub sizes: Vec<usize>,
}

/// Per-layer activations for one batch (outputs after the nonlinearity).
#[derive(Debug, Clone, Default)]
pub struct Scratch<T> {
    acts: Vec<Vec<T>>,
    /// Work buffers for backward passes.
    d_cur: Vec<T>,
    d_prev: Vec<T>,
    batch: usize,
}

/// Parameter gradients, mirroring the layer layout.
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub d_w: Vec<Vec<T>>,
    pub d_b: Vec<Vec<T>>,
}

impl<T: Scalar> Mlp<T> {
    /// Uniform fan-in initialization: `U(-1/sqrt(in), 1/sqrt(in))`.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for win in sizes.windows(2) {
            let (in_dim, out_dim) = (win[0], win[1]);
            let bound = 1.0 / (in_dim as f64).sqrt();
            let w = (0..in_dim * out_dim)
                .map(|_| T::from_f64(rng.gen_range(-bound..bound)))
                .collect();
            let b = (0..out_dim)
                .map(|_| T::from_f64(rng.gen_range(-bound..bound)))
                .collect();
            layers.push(Layer { w, b, in_dim, out_dim });
        }
        Mlp { layers, sizes: sizes.to_vec() }
    }

    /// Scale the final layer's parameters (small initial policy outputs).
    pub fn scale_last_layer(&mut self, factor: f64) {
        let layer = self.layers.last_mut().expect("mlp has layers");
        let f = T::from_f64(factor);
        for v in layer.w.iter_mut().chain(layer.b.iter_mut()) {
            *v = *v * f;
        }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// All parameters flattened in layer order (weights then biases).
    pub fn flat_params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.w);
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn load_flat_params(&mut self, params: &[T]) -> Result<(), String> {
        if params.len() != self.param_count() {
            return Err(format!(
                "parameter count mismatch: file has {}, architecture needs {}",
                params.len(),
                self.param_count()
            ));
        }
        let mut off = 0;
        for l in &mut self.layers {
            let wn = l.w.len();
            l.w.copy_from_slice(&params[off..off + wn]);
            off += wn;
            let bn = l.b.len();
            l.b.copy_from_slice(&params[off..off + bn]);
            off += bn;
        }
        Ok(())
    }

    pub fn params_are_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|v| v.is_finite()))
    }

    pub fn scratch(&self) -> Scratch<T> {
        Scratch { acts: Vec::new(), d_cur: Vec::new(), d_prev: Vec::new(), batch: 0 }
    }

    pub fn gradients(&self) -> Gradients<T> {
        Gradients {
            d_w: self.layers.iter().map(|l| vec![T::zero(); l.w.len()]).collect(),
            d_b: self.layers.iter().map(|l| vec![T::zero(); l.b.len()]).collect(),
        }
    }

    /// Batched forward pass; `x` is `(batch, in_dim)` row-major. Returns the
    /// output activations slice `(batch, out_dim)` living inside `scratch`.
    pub fn forward_batch<'s>(&self, x: &[T], batch: usize, scratch: &'s mut Scratch<T>) -> &'s [T] {
        assert_eq!(x.len(), batch * self.input_dim());
        scratch.batch = batch;
        scratch.acts.resize(self.layers.len(), Vec::new());
        let n_layers = self.layers.len();
        for (li, layer) in self.layers.iter().enumerate() {
            let (id, od) = (layer.in_dim, layer.out_dim);
            // split so the previous activation stays borrowable
            let (done, rest) = scratch.acts.split_at_mut(li);
            let input: &[T] = if li == 0 { x } else { &done[li - 1] };
            let out = &mut rest[0];
            out.clear();
            out.resize(batch * od, T::zero());
            // out = input (batch x id) * W^T (id x od)
            T::gemm(
                batch,
                id,
                od,
                T::one(),
                input,
                id as isize,
                1,
                &layer.w,
                1,
                id as isize,
                T::zero(),
                out,
                od as isize,
                1,
            );
            let hidden = li + 1 < n_layers;
            for r in 0..batch {
                let row = &mut out[r * od..(r + 1) * od];
                for (o, v) in row.iter_mut().enumerate() {
                    let z = *v + layer.b[o];
                    *v = if hidden && z < T::zero() { T::zero() } else { z };
                }
            }
        }
        scratch.acts.last().unwrap()
    }

    /// Convenience single-sample forward.
    pub fn forward1(&self, x: &[T], scratch: &mut Scratch<T>) -> Vec<T> {
        self.forward_batch(x, 1, scratch).to_vec()
    }

    /// Backward pass for the batch last run through `forward_batch`.
    ///
    /// `d_out` is dL/d(output), `(batch, out_dim)` row-major. Parameter
    /// gradients are *accumulated* into `grads`; when `d_input` is `Some` it
    /// receives dL/d(input).
    pub fn backward_batch(
        &self,
        x: &[T],
        scratch: &mut Scratch<T>,
        d_out: &[T],
        grads: &mut Gradients<T>,
        mut d_input: Option<&mut Vec<T>>,
    ) {
        let batch = scratch.batch;
        assert_eq!(d_out.len(), batch * self.output_dim());
        let n_layers = self.layers.len();

        scratch.d_cur.clear();
        scratch.d_cur.extend_from_slice(d_out);
        for li in (0..n_layers).rev() {
            let layer = &self.layers[li];
            let (id, od) = (layer.in_dim, layer.out_dim);
            let act = &scratch.acts[li];

            // dZ: ReLU mask on hidden layers (output layer is linear)
            if li + 1 < n_layers {
                for (dv, a) in scratch.d_cur.iter_mut().zip(act.iter()) {
                    if *a <= T::zero() {
                        *dv = T::zero();
                    }
                }
            }

            // bias grads: column sums of dZ
            let db = &mut grads.d_b[li];
            for r in 0..batch {
                let row = &scratch.d_cur[r * od..(r + 1) * od];
                for (o, v) in row.iter().enumerate() {
                    db[o] = db[o] + *v;
                }
            }

            // weight grads: dW (od x id) += dZ^T (od x batch) * input (batch x id)
            let input: &[T] = if li == 0 { x } else { &scratch.acts[li - 1] };
            T::gemm(
                od,
                batch,
                id,
                T::one(),
                &scratch.d_cur,
                1,
                od as isize,
                input,
                id as isize,
                1,
                T::one(),
                &mut grads.d_w[li],
                id as isize,
                1,
            );

            // dX = dZ (batch x od) * W (od x id)
            let need_dx = li > 0 || d_input.is_some();
            if need_dx {
                scratch.d_prev.clear();
                scratch.d_prev.resize(batch * id, T::zero());
                T::gemm(
                    batch,
                    od,
                    id,
                    T::one(),
                    &scratch.d_cur,
                    od as isize,
                    1,
                    &layer.w,
                    id as isize,
                    1,
                    T::zero(),
                    &mut scratch.d_prev,
                    id as isize,
                    1,
                );
                std::mem::swap(&mut scratch.d_cur, &mut scratch.d_prev);
            }
            if li == 0 {
                if let Some(out) = d_input.as_deref_mut() {
                    out.clear();
                    out.extend_from_slice(&scratch.d_cur);
                }
            }
        }
    }
}

impl<T: Scalar> Gradients<T> {
    pub fn zero(&mut self) {
        for g in self.d_w.iter_mut().chain(self.d_b.iter_mut()) {
            for v in g.iter_mut() {
                *v = T::zero();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_matches_manual_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mlp: Mlp<f64> = Mlp::new(&[2, 3, 1], &mut rng);
        let x = [0.3, -0.7];
        let mut scratch = mlp.scratch();
        let y = mlp.forward1(&x, &mut scratch);

        // manual: relu(W0 x + b0), then W1 h + b1
        let l0 = &mlp.layers[0];
        let mut h = [0.0; 3];
        for o in 0..3 {
            let mut z = l0.b[o];
            for i in 0..2 {
                z += l0.w[o * 2 + i] * x[i];
            }
            h[o] = z.max(0.0);
        }
        let l1 = &mlp.layers[1];
        let mut out = l1.b[0];
        for i in 0..3 {
            out += l1.w[i] * h[i];
        }
        assert!((y[0] - out).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut mlp: Mlp<f64> = Mlp::new(&[3, 4, 2], &mut rng);
        let batch = 5;
        let x: Vec<f64> = (0..batch * 3).map(|i| ((i as f64) * 0.713).sin()).collect();
        let target: Vec<f64> = (0..batch * 2).map(|i| ((i as f64) * 0.31).cos()).collect();

        let loss = |m: &Mlp<f64>, scratch: &mut Scratch<f64>| -> f64 {
            let y = m.forward_batch(&x, batch, scratch);
            y.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
                / (batch as f64)
        };

        let mut scratch = mlp.scratch();
        let base_out = mlp.forward_batch(&x, batch, &mut scratch).to_vec();
        let d_out: Vec<f64> = base_out
            .iter()
            .zip(&target)
            .map(|(a, b)| 2.0 * (a - b) / batch as f64)
            .collect();
        let mut grads = mlp.gradients();
        let mut d_in = Vec::new();
        mlp.backward_batch(&x, &mut scratch, &d_out, &mut grads, Some(&mut d_in));

        let eps = 1e-6;
        let mut tmp_scratch = mlp.scratch();
        for li in 0..mlp.layers.len() {
            for p in 0..mlp.layers[li].w.len() {
                let orig = mlp.layers[li].w[p];
                mlp.layers[li].w[p] = orig + eps;
                let lp = loss(&mlp, &mut tmp_scratch);
                mlp.layers[li].w[p] = orig - eps;
                let lm = loss(&mlp, &mut tmp_scratch);
                mlp.layers[li].w[p] = orig;
                let numeric = (lp - lm) / (2.0 * eps);
                let analytic = grads.d_w[li][p];
                assert!(
                    (numeric - analytic).abs() < 1e-7 * (1.0 + numeric.abs()),
                    "layer {li} w[{p}]: {analytic} vs {numeric}"
                );
            }
            for p in 0..mlp.layers[li].b.len() {
                let orig = mlp.layers[li].b[p];
                mlp.layers[li].b[p] = orig + eps;
                let lp = loss(&mlp, &mut tmp_scratch);
                mlp.layers[li].b[p] = orig - eps;
                let lm = loss(&mlp, &mut tmp_scratch);
                mlp.layers[li].b[p] = orig;
                let numeric = (lp - lm) / (2.0 * eps);
                let analytic = grads.d_b[li][p];
                assert!(
                    (numeric - analytic).abs() < 1e-7 * (1.0 + numeric.abs()),
                    "layer {li} b[{p}]: {analytic} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn flat_param_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mlp: Mlp<f32> = Mlp::new(&[4, 8, 3], &mut rng);
        let flat = mlp.flat_params();
        assert_eq!(flat.len(), mlp.param_count());
        let mut other: Mlp<f32> = Mlp::new(&[4, 8, 3], &mut rng);
        other.load_flat_params(&flat).unwrap();
        assert_eq!(other.flat_params(), flat);
        let mut wrong: Mlp<f32> = Mlp::new(&[4, 9, 3], &mut rng);
        assert!(wrong.load_flat_params(&flat).is_err());
    }
}
