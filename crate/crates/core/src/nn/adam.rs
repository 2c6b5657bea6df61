//! Adaptive moment estimation with the standard bias correction,
//! beta = (0.9, 0.999), eps = 1e-8.

use super::mlp::{Gradients, Mlp};
use super::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Adam<T> {
    m_w: Vec<Vec<T>>,
    v_w: Vec<Vec<T>>,
    m_b: Vec<Vec<T>>,
    v_b: Vec<Vec<T>>,
    t: u64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl<T: Scalar> Adam<T> {
    pub fn new(mlp: &Mlp<T>) -> Self {
        Adam {
            m_w: mlp.layers.iter().map(|l| vec![T::zero(); l.w.len()]).collect(),
            v_w: mlp.layers.iter().map(|l| vec![T::zero(); l.w.len()]).collect(),
            m_b: mlp.layers.iter().map(|l| vec![T::zero(); l.b.len()]).collect(),
            v_b: mlp.layers.iter().map(|l| vec![T::zero(); l.b.len()]).collect(),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&mut self, mlp: &mut Mlp<T>, grads: &Gradients<T>, lr: f64) {
        self.t += 1;
        let b1 = T::from_f64(self.beta1);
        let b2 = T::from_f64(self.beta2);
        let one = T::one();
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let alpha = T::from_f64(lr * bc2.sqrt() / bc1);
        let eps = T::from_f64(self.eps);

        for li in 0..mlp.layers.len() {
            let layer = &mut mlp.layers[li];
            update(&mut self.m_w[li], &mut self.v_w[li], &mut layer.w, &grads.d_w[li], b1, b2, one, alpha, eps);
            update(&mut self.m_b[li], &mut self.v_b[li], &mut layer.b, &grads.d_b[li], b1, b2, one, alpha, eps);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn update<T: Scalar>(
    m: &mut [T],
    v: &mut [T],
    p: &mut [T],
    g: &[T],
    b1: T,
    b2: T,
    one: T,
    alpha: T,
    eps: T,
) {
    for i in 0..p.len() {
        m[i] = b1 * m[i] + (one - b1) * g[i];
        v[i] = b2 * v[i] + (one - b2) * g[i] * g[i];
        p[i] = p[i] - alpha * m[i] / (v[i].sqrt() + eps);
    }
}

/// Scalar Adam for the entropy temperature.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdamScalar {
    m: f64,
    v: f64,
    t: u64,
}

impl AdamScalar {
    pub fn step(&mut self, param: &mut f64, grad: f64, lr: f64) {
        self.t += 1;
        self.m = 0.9 * self.m + 0.1 * grad;
        self.v = 0.999 * self.v + 0.001 * grad * grad;
        let bc1 = 1.0 - 0.9f64.powi(self.t as i32);
        let bc2 = 1.0 - 0.999f64.powi(self.t as i32);
        *param -= lr * (self.m / bc1) / ((self.v / bc2).sqrt() + 1e-8);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adam_drives_quadratic_to_minimum() {
        // minimize ||params||^2 on a tiny net: all parameters decay to ~0
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut mlp: Mlp<f64> = Mlp::new(&[2, 2], &mut rng);
        let mut adam = Adam::new(&mlp);
        let mut grads = mlp.gradients();
        for _ in 0..2000 {
            grads.zero();
            for li in 0..mlp.layers.len() {
                for (g, w) in grads.d_w[li].iter_mut().zip(&mlp.layers[li].w) {
                    *g = 2.0 * *w;
                }
                for (g, b) in grads.d_b[li].iter_mut().zip(&mlp.layers[li].b) {
                    *g = 2.0 * *b;
                }
            }
            adam.step(&mut mlp, &grads, 1e-2);
        }
        for l in &mlp.layers {
            for v in l.w.iter().chain(l.b.iter()) {
                assert!(v.abs() < 1e-3, "param {v} not at minimum");
            }
        }
    }
}
