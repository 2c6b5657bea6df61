//! Transition storage: a uniform-sampling ring buffer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::Observation;

/// Non-goal observation core: `[ee_world, object_world, ee_in_object]` as
/// three (x, z, pitch) triples.
pub const CORE_DIM: usize = 9;

pub fn obs_core(obs: &Observation) -> [f32; CORE_DIM] {
    [
        obs.ee_world.x as f32,
        obs.ee_world.z as f32,
        obs.ee_world.pitch as f32,
        obs.object_world.x as f32,
        obs.object_world.z as f32,
        obs.object_world.pitch as f32,
        obs.ee_in_object.x as f32,
        obs.ee_in_object.z as f32,
        obs.ee_in_object.pitch as f32,
    ]
}

/// Policy input: goal first, then the observation core.
pub fn policy_input(goal: &[f32; 3], core: &[f32; CORE_DIM]) -> [f32; 12] {
    let mut out = [0.0; 12];
    out[..3].copy_from_slice(goal);
    out[3..].copy_from_slice(core);
    out
}

/// Critic input: policy input plus the action.
pub fn critic_input(goal: &[f32; 3], core: &[f32; CORE_DIM], action: &[f32; 3]) -> [f32; 15] {
    let mut out = [0.0; 15];
    out[..3].copy_from_slice(goal);
    out[3..12].copy_from_slice(core);
    out[12..].copy_from_slice(action);
    out
}

/// One (s, a, r, s', done, goal) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub obs: [f32; CORE_DIM],
    pub action: [f32; 3],
    pub reward: f32,
    pub next_obs: [f32; CORE_DIM],
    pub done: bool,
    /// Goal grasp pose in the object frame (x, z, pitch).
    pub goal: [f32; 3],
    pub grasp_id: f32,
}

impl Transition {
    /// Achieved goal of this transition: the post-step `ee_in_object` pose.
    pub fn achieved_goal(&self) -> [f32; 3] {
        [self.next_obs[6], self.next_obs[7], self.next_obs[8]]
    }
}

/// Fixed-capacity ring buffer with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: Vec<Transition>,
    capacity: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer { data: Vec::with_capacity(capacity.min(1 << 20)), capacity, head: 0 }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn extend(&mut self, ts: impl IntoIterator<Item = Transition>) {
        for t in ts {
            self.push(t);
        }
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.data[idx]
    }

    /// Uniform indices with replacement.
    pub fn sample_indices(&self, n: usize, rng: &mut impl Rng) -> Vec<usize> {
        assert!(!self.data.is_empty());
        (0..n).map(|_| rng.gen_range(0..self.data.len())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(v: f32) -> Transition {
        Transition {
            obs: [v; CORE_DIM],
            action: [0.0; 3],
            reward: 0.0,
            next_obs: [v; CORE_DIM],
            done: false,
            goal: [0.0; 3],
            grasp_id: 0.0,
        }
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut buf = ReplayBuffer::new(3);
        for i in 0..5 {
            buf.push(t(i as f32));
        }
        assert_eq!(buf.len(), 3);
        let values: Vec<f32> = (0..3).map(|i| buf.get(i).obs[0]).collect();
        // slots 0 and 1 were overwritten by 3 and 4
        assert_eq!(values, vec![3.0, 4.0, 2.0]);
    }

    #[test]
    fn sampling_is_uniform_chi_square() {
        // 1e5 draws over a 100-item buffer; chi-square must not reject at
        // p = 0.001 (critical value for 99 dof is ~148.2)
        let mut buf = ReplayBuffer::new(100);
        for i in 0..100 {
            buf.push(t(i as f32));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = [0usize; 100];
        let n = 100_000;
        for idx in buf.sample_indices(n, &mut rng) {
            counts[idx] += 1;
        }
        let expected = n as f64 / 100.0;
        let chi2: f64 =
            counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 148.23, "chi-square {chi2} rejects uniformity");
    }
}
