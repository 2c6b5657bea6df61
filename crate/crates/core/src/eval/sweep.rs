//! Sensitivity sweeps: one physical parameter at a time, or per-step
//! Gaussian noise on one dimension of the observed object pose.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand_distr::{Distribution, Normal};

use crate::env::{DomainParams, EnvConfig, EnvError, GraspGoal, Observation, OccludedGraspEnv};
use crate::rng::{mix_seed, stream_rng, Stream};
use crate::sac::{obs_core, policy_input, EvalNets};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_success: f64,
    /// Standard deviation of success across seeds.
    pub std_across_seeds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub param: String,
    pub points: Vec<SweepPoint>,
}

/// Observed-object-pose dimensions eligible for noise injection.
const NOISE_DIMS: [&str; 3] = ["noise_object_x", "noise_object_z", "noise_object_pitch"];

/// Sweep one named axis. Physical parameters fix everything else at the
/// defaults; `noise_object_*` axes interpret `values` as noise sigmas added
/// per step to that dimension of the observed object pose (the relative pose
/// is recomputed from the noisy estimate).
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    nets: &EvalNets,
    env_cfg: &EnvConfig,
    param: &str,
    values: &[f64],
    goal_id: f64,
    n_episodes: usize,
    seeds: &[u64],
    master_seed: u64,
) -> Result<SweepCurve, SweepError> {
    let noise_dim = NOISE_DIMS.iter().position(|n| *n == param);
    if noise_dim.is_none() && DomainParams::default().field(param).is_none() {
        return Err(SweepError::UnknownParameter(param.to_string()));
    }

    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let mut per_seed = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let successes: Result<Vec<bool>, SweepError> = (0..n_episodes)
                .into_par_iter()
                .map(|ep| {
                    let mut nets = nets.clone();
                    run_noisy_episode(
                        &mut nets,
                        env_cfg,
                        param,
                        value,
                        noise_dim,
                        goal_id,
                        mix_seed(master_seed, seed),
                        ep,
                    )
                })
                .collect();
            let successes = successes?;
            per_seed.push(
                successes.iter().filter(|&&s| s).count() as f64 / n_episodes.max(1) as f64,
            );
        }
        let mean = per_seed.iter().sum::<f64>() / per_seed.len().max(1) as f64;
        let var = per_seed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / per_seed.len().max(1) as f64;
        points.push(SweepPoint { value, mean_success: mean, std_across_seeds: var.sqrt() });
    }
    Ok(SweepCurve { param: param.to_string(), points })
}

#[allow(clippy::too_many_arguments)]
fn run_noisy_episode(
    nets: &mut EvalNets,
    env_cfg: &EnvConfig,
    param: &str,
    value: f64,
    noise_dim: Option<usize>,
    goal_id: f64,
    seed: u64,
    ep: usize,
) -> Result<bool, SweepError> {
    let mut domain = DomainParams::default();
    if noise_dim.is_none() {
        domain.set_field(param, value);
    }
    let goal = crate::env::grasp_from_id(&domain, goal_id).expect("valid goal id");
    let mut env = OccludedGraspEnv::new(env_cfg.clone());
    let env_seed = mix_seed(seed, ep as u64);
    let mut obs = env.reset(domain, goal, env_seed)?;
    let mut noise_rng = stream_rng(seed, Stream::Eval, ep as u64);
    let goal_arr = [
        goal.pose_in_object.x as f32,
        goal.pose_in_object.z as f32,
        goal.pose_in_object.pitch as f32,
    ];
    let mut act_rng = stream_rng(seed, Stream::Policy, ep as u64);
    let mut success = false;
    for _ in 0..env_cfg.max_steps {
        let observed = match noise_dim {
            Some(dim) if value > 0.0 => noisy_observation(&obs, dim, value, &mut noise_rng),
            _ => obs,
        };
        let core = obs_core(&observed);
        let input = policy_input(&goal_arr, &core);
        let action = nets.act(&input, true, &mut act_rng);
        match env.step(action) {
            Ok(step) => {
                success = step.info.success;
                obs = step.observation;
                if step.done {
                    break;
                }
            }
            Err(EnvError::NonFiniteState(_)) => return Ok(false),
            Err(other) => return Err(SweepError::Env(other)),
        }
    }
    Ok(success)
}

/// Add N(0, sigma) to one dimension of the observed object pose and
/// recompute the relative pose from the noisy estimate.
fn noisy_observation(
    obs: &Observation,
    dim: usize,
    sigma: f64,
    rng: &mut impl rand::Rng,
) -> Observation {
    let n: f64 = Normal::new(0.0, sigma).expect("valid sigma").sample(rng);
    let mut object = obs.object_world;
    match dim {
        0 => object.x += n,
        1 => object.z += n,
        _ => object.pitch += n,
    }
    Observation::assemble(obs.goal, obs.ee_world, object)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sac::SacNets;

    #[test]
    fn unknown_parameter_rejected() {
        let nets = SacNets::new(12, 3, &[8], 0).snapshot();
        let err = sensitivity_sweep(
            &nets,
            &EnvConfig::default(),
            "bogus_param",
            &[0.0],
            1.5,
            1,
            &[0],
            3,
        );
        assert!(matches!(err, Err(SweepError::UnknownParameter(_))));
    }

    #[test]
    fn zero_noise_matches_clean_eval() {
        let nets = SacNets::new(12, 3, &[8, 8], 1).snapshot();
        let curve = sensitivity_sweep(
            &nets,
            &EnvConfig::default(),
            "noise_object_x",
            &[0.0],
            1.5,
            4,
            &[0, 1],
            9,
        )
        .unwrap();
        let again = sensitivity_sweep(
            &nets,
            &EnvConfig::default(),
            "noise_object_x",
            &[0.0],
            1.5,
            4,
            &[0, 1],
            9,
        )
        .unwrap();
        assert_eq!(curve, again, "zero-noise sweep must be deterministic");
    }

    #[test]
    fn physical_sweep_at_default_point_runs() {
        let nets = SacNets::new(12, 3, &[8], 2).snapshot();
        let curve = sensitivity_sweep(
            &nets,
            &EnvConfig::default(),
            "table_friction",
            &[0.3],
            1.5,
            2,
            &[0],
            5,
        )
        .unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].value, 0.3);
    }
}
