//! Hindsight relabeling with the "future" strategy: a transition's goal is
//! replaced by the end-effector pose actually achieved at a uniformly drawn
//! later timestep of the same episode, and the reward is recomputed.

use rand::Rng;

use crate::env::{compute_reward, success, GraspGoal, RewardParams};
use crate::math::Pose2;

use super::replay::Transition;

/// Everything needed to recompute a transition's reward after relabeling.
#[derive(Debug, Clone)]
pub struct RewardCtx {
    pub params: RewardParams,
    pub table_z: f64,
    pub sparse: bool,
    pub include_occlusion: bool,
}

impl RewardCtx {
    pub fn reward_for(&self, goal: &[f32; 3], grasp_id: f32, next_obs: &[f32; 9]) -> f32 {
        let g = GraspGoal {
            pose_in_object: Pose2::new(goal[0] as f64, goal[1] as f64, goal[2] as f64),
            grasp_id: grasp_id as f64,
        };
        let ee_in_object =
            Pose2::new(next_obs[6] as f64, next_obs[7] as f64, next_obs[8] as f64);
        let object_world =
            Pose2::new(next_obs[3] as f64, next_obs[4] as f64, next_obs[5] as f64);
        if self.sparse {
            if success(&g, ee_in_object, &self.params) {
                0.0
            } else {
                -1.0
            }
        } else {
            compute_reward(
                &g,
                ee_in_object,
                object_world,
                self.table_z,
                &self.params,
                self.include_occlusion,
            )
            .reward as f32
        }
    }
}

/// Relabel each transition independently with probability `fraction`.
pub fn her_relabel(
    episode: &[Transition],
    fraction: f64,
    ctx: &RewardCtx,
    rng: &mut impl Rng,
) -> Vec<Transition> {
    assert!(!episode.is_empty(), "episode must be non-empty");
    assert!((0.0..=1.0).contains(&fraction));
    let n = episode.len();
    episode
        .iter()
        .enumerate()
        .map(|(t, tr)| {
            if fraction > 0.0 && rng.gen_bool(fraction) {
                let k = rng.gen_range(t..n);
                let achieved = episode[k].achieved_goal();
                let mut out = *tr;
                out.goal = achieved;
                out.reward = ctx.reward_for(&achieved, out.grasp_id, &out.next_obs);
                out
            } else {
                *tr
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sac::replay::CORE_DIM;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> RewardCtx {
        RewardCtx {
            params: RewardParams::default(),
            table_z: 0.0,
            sparse: false,
            include_occlusion: true,
        }
    }

    fn episode(n: usize) -> Vec<Transition> {
        (0..n)
            .map(|i| {
                let f = i as f32;
                let mut next = [0.0f32; CORE_DIM];
                // object high above the table so occlusion is zero
                next[3] = 0.1 * f;
                next[4] = 5.0;
                next[6] = 0.01 * f;
                next[7] = -0.02 * f;
                next[8] = 0.05 * f;
                Transition {
                    obs: [f; CORE_DIM],
                    action: [0.1; 3],
                    reward: -1.0,
                    next_obs: next,
                    done: i + 1 == n,
                    goal: [9.0, 9.0, 0.0],
                    grasp_id: 1.5,
                }
            })
            .collect()
    }

    #[test]
    fn fraction_zero_is_identity() {
        let ep = episode(10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = her_relabel(&ep, 0.0, &ctx(), &mut rng);
        assert_eq!(out, ep);
    }

    #[test]
    fn fraction_one_last_transition_self_relabels() {
        let ep = episode(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = her_relabel(&ep, 1.0, &ctx(), &mut rng);
        let last = &out[9];
        assert_eq!(last.goal, ep[9].achieved_goal());
        // the pose-distance part of the recomputed reward is exactly zero
        let r = ctx().reward_for(&last.goal, last.grasp_id, &last.next_obs);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn relabeled_goals_come_from_own_future() {
        let ep = episode(30);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = her_relabel(&ep, 1.0, &ctx(), &mut rng);
        for (t, tr) in out.iter().enumerate() {
            let from_future = (t..30).any(|k| ep[k].achieved_goal() == tr.goal);
            assert!(from_future, "transition {t} goal not from its future");
        }
    }

    #[test]
    fn relabel_share_concentrates_at_fraction() {
        // 1e4 transitions at fraction 0.4 -> share within +-0.02
        let ep = episode(10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = her_relabel(&ep, 0.4, &ctx(), &mut rng);
        let relabeled =
            out.iter().zip(&ep).filter(|(a, b)| a.goal != b.goal).count() as f64 / 10_000.0;
        assert!((relabeled - 0.4).abs() < 0.02, "share {relabeled}");
    }
}
