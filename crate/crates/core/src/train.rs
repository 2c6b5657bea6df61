//! Rollout/update training loop.
//!
//! Episodes are collected in synchronous rounds: each round clones a policy
//! snapshot, rolls out `workers` episodes in parallel (one deterministic RNG
//! stream per episode index), inserts the hindsight-relabeled transitions
//! into the replay buffer in episode order, then runs the due number of
//! gradient updates. Curriculum and domain-randomization engines live on the
//! trainer thread and only ever see probe tags plus episode outcomes.

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curriculum::{DomainSampler, ExpansionEvent, GraspRange, ProbeTag, Side};
use crate::env::{
    grasp_from_id, DomainParams, EnvConfig, EnvError, GraspGoal, Observation, OccludedGraspEnv,
};
use crate::nn::Scratch;
use crate::rng::{mix_seed, stream_rng, Stream};
use crate::sac::{
    her_relabel, obs_core, policy_input, save_checkpoint, CheckpointMeta, GaussianPolicy,
    ReplayBuffer, RewardCtx, SacConfig, SacError, SacNets, Transition,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("sac update failed: {0}")]
    Sac(#[from] SacError),
    #[error("environment failed at reset: {0}")]
    Env(#[from] EnvError),
    #[error("checkpoint error: {0}")]
    Checkpoint(#[from] crate::sac::CheckpointError),
}

/// How goals are drawn during training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GoalStrategy {
    /// One fixed grasp ID for every episode.
    Single { id: f64 },
    /// Start from a single ID and expand the range on boundary success.
    Curriculum { start_id: f64 },
    /// Uniform over the whole ID range with no expansion (baseline).
    FullRangeUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub sac: SacConfig,
    pub env: EnvConfig,
    pub goal: GoalStrategy,
    /// Enable automatic domain randomization (otherwise fixed environment).
    pub adr: bool,
    pub episodes: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    pub workers: usize,
    /// Probability that an episode probes a grasp-range boundary.
    pub grasp_probe_probability: f64,
    /// Save a checkpoint every N episodes (0 = only final).
    pub checkpoint_every: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sac: SacConfig::default(),
            env: EnvConfig::default(),
            goal: GoalStrategy::Single { id: 1.5 },
            adr: false,
            episodes: 4000,
            eval_every: 100,
            eval_episodes: 10,
            seed: 0,
            workers: 1,
            grasp_probe_probability: crate::curriculum::DEFAULT_PROBE_PROBABILITY,
            checkpoint_every: 0,
            out_dir: None,
        }
    }
}

/// One row of the training-curve log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub episodes: usize,
    pub env_steps: u64,
    pub updates: u64,
    pub eval_success: f64,
    pub train_return_mean: f64,
    pub q1_loss: f64,
    pub policy_loss: f64,
    pub alpha: f64,
    pub entropy: f64,
    pub grasp_lo: f64,
    pub grasp_hi: f64,
    pub adr_expansions: usize,
}

pub struct TrainResult {
    pub nets: SacNets,
    pub metrics: Vec<MetricsRow>,
    pub expansions: Vec<ExpansionEvent>,
    pub sampler: DomainSampler,
    pub grasp_range: GraspRange,
    pub episodes_run: usize,
    pub env_steps: u64,
    pub updates: u64,
}

#[derive(Debug, Clone, Copy)]
enum Explore {
    Random,
    Stochastic,
    Deterministic,
}

struct EpisodeSpec {
    ep_index: u64,
    domain: DomainParams,
    goal: GraspGoal,
    adr_probe: Option<ProbeTag>,
    grasp_probe: Option<Side>,
    explore: Explore,
}

pub(crate) struct EpisodeResult {
    pub transitions: Vec<Transition>,
    pub final_success: bool,
    pub episode_return: f64,
    pub aborted_nonfinite: bool,
    adr_probe: Option<ProbeTag>,
    grasp_probe: Option<Side>,
}

/// Roll one episode with a frozen policy snapshot.
pub(crate) fn rollout_episode(
    env_cfg: &EnvConfig,
    policy: &GaussianPolicy<f32>,
    scratch: &mut Scratch<f32>,
    domain: DomainParams,
    goal: GraspGoal,
    master_seed: u64,
    ep_index: u64,
    explore: Explore,
) -> Result<EpisodeResult, EnvError> {
    let mut env = OccludedGraspEnv::new(env_cfg.clone());
    let env_seed = mix_seed(master_seed, ep_index);
    let mut obs = env.reset(domain, goal, env_seed)?;
    let mut act_rng = stream_rng(master_seed, Stream::Policy, ep_index);
    let goal_arr = [
        goal.pose_in_object.x as f32,
        goal.pose_in_object.z as f32,
        goal.pose_in_object.pitch as f32,
    ];
    let mut transitions = Vec::with_capacity(env_cfg.max_steps);
    let mut episode_return = 0.0;
    let mut final_success = false;
    let mut aborted = false;
    for _ in 0..env_cfg.max_steps {
        let core = obs_core(&obs);
        let input = policy_input(&goal_arr, &core);
        let action = match explore {
            Explore::Random => [
                act_rng.gen_range(-1.0..1.0),
                act_rng.gen_range(-1.0..1.0),
                act_rng.gen_range(-1.0..1.0),
            ],
            Explore::Stochastic => {
                let a = policy.act_stochastic(&input, scratch, &mut act_rng);
                [a[0] as f64, a[1] as f64, a[2] as f64]
            }
            Explore::Deterministic => {
                let a = policy.act_deterministic(&input, scratch);
                [a[0] as f64, a[1] as f64, a[2] as f64]
            }
        };
        match env.step(action) {
            Ok(step) => {
                let next_core = obs_core(&step.observation);
                transitions.push(Transition {
                    obs: core,
                    action: [action[0] as f32, action[1] as f32, action[2] as f32],
                    reward: step.reward as f32,
                    next_obs: next_core,
                    done: step.done,
                    goal: goal_arr,
                    grasp_id: goal.grasp_id as f32,
                });
                episode_return += step.reward;
                final_success = step.info.success;
                obs = step.observation;
                if step.done {
                    break;
                }
            }
            Err(EnvError::NonFiniteState(_)) => {
                // solver blow-up: terminate as a failed episode
                if let Some(last) = transitions.last_mut() {
                    last.done = true;
                }
                final_success = false;
                aborted = true;
                break;
            }
            Err(other) => return Err(other),
        }
    }
    Ok(EpisodeResult {
        transitions,
        final_success,
        episode_return,
        aborted_nonfinite: aborted,
        adr_probe: None,
        grasp_probe: None,
    })
}

/// Deterministic evaluation: fraction of successful episodes.
pub fn evaluate_policy(
    env_cfg: &EnvConfig,
    policy: &GaussianPolicy<f32>,
    domain: DomainParams,
    goals: &[GraspGoal],
    master_seed: u64,
    seed_offset: u64,
) -> f64 {
    if goals.is_empty() {
        return 0.0;
    }
    let successes: usize = goals
        .par_iter()
        .enumerate()
        .map(|(i, goal)| {
            let mut scratch = policy.net.scratch();
            match rollout_episode(
                env_cfg,
                policy,
                &mut scratch,
                domain,
                *goal,
                master_seed,
                seed_offset + i as u64,
                Explore::Deterministic,
            ) {
                Ok(r) => r.final_success as usize,
                Err(_) => 0,
            }
        })
        .sum();
    successes as f64 / goals.len() as f64
}

/// Run the full training loop.
pub fn train(cfg: &TrainConfig) -> Result<TrainResult, TrainError> {
    cfg.sac.validate().map_err(|e| TrainError::Sac(SacError::NonFiniteLoss {
        context: format!("invalid config: {e}"),
        q1: 0.0,
        q2: 0.0,
        policy: 0.0,
    }))?;
    let obs_dim = 12;
    let act_dim = 3;
    let mut nets = SacNets::new(obs_dim, act_dim, &cfg.sac.hidden_sizes, cfg.seed);
    let mut buffer = ReplayBuffer::new(cfg.sac.buffer_capacity);
    let mut sampler = DomainSampler::standard(cfg.adr);
    let mut grasp_range = match cfg.goal {
        GoalStrategy::Single { id } => GraspRange::single(id),
        GoalStrategy::Curriculum { start_id } => GraspRange::single(start_id),
        GoalStrategy::FullRangeUniform => GraspRange::full(),
    };
    let reward_ctx = RewardCtx {
        params: cfg.env.reward.clone(),
        table_z: 0.0, // replaced per episode batch below (table offset varies)
        sparse: cfg.env.ablation.sparse_reward,
        include_occlusion: !cfg.env.ablation.no_occlusion_penalty,
    };

    let mut her_rng = stream_rng(cfg.seed, Stream::Her, 0);
    let mut update_rng = stream_rng(cfg.seed, Stream::Trainer, 0);
    let mut sample_rng = stream_rng(cfg.seed, Stream::Domain, 0);

    let mut metrics = Vec::new();
    let mut expansions = Vec::new();
    let mut episodes_done: usize = 0;
    let mut env_steps: u64 = 0;
    let mut updates: u64 = 0;
    let mut updates_due: f64 = 0.0;
    let mut recent_returns: Vec<f64> = Vec::new();
    let mut last_losses = crate::sac::LossReport::default();
    let workers = cfg.workers.max(1);

    while episodes_done < cfg.episodes {
        let round = workers.min(cfg.episodes - episodes_done);
        // draw the round's episode specs on the trainer thread
        let mut specs = Vec::with_capacity(round);
        for k in 0..round {
            let ep_index = (episodes_done + k) as u64;
            let (domain, adr_probe) = sampler.sample(&mut sample_rng);
            let (goal_id, grasp_probe) = match cfg.goal {
                GoalStrategy::Single { id } => (id, None),
                GoalStrategy::Curriculum { .. } => {
                    grasp_range.sample(cfg.grasp_probe_probability, &mut sample_rng)
                }
                GoalStrategy::FullRangeUniform => {
                    let (id, _) = grasp_range.sample(0.0, &mut sample_rng);
                    (id, None)
                }
            };
            let goal = grasp_from_id(&domain, goal_id).expect("curriculum ids stay in range");
            let explore = if (episodes_done + k) < cfg.sac.start_random_episodes {
                Explore::Random
            } else {
                Explore::Stochastic
            };
            specs.push(EpisodeSpec { ep_index, domain, goal, adr_probe, grasp_probe, explore });
        }

        let snapshot = nets.policy.clone();
        let env_cfg = cfg.env.clone();
        let seed = cfg.seed;
        let results: Vec<Result<EpisodeResult, EnvError>> = specs
            .par_iter()
            .map(|s| {
                let mut scratch = snapshot.net.scratch();
                rollout_episode(
                    &env_cfg,
                    &snapshot,
                    &mut scratch,
                    s.domain,
                    s.goal,
                    seed,
                    s.ep_index,
                    s.explore,
                )
                .map(|mut r| {
                    r.adr_probe = s.adr_probe;
                    r.grasp_probe = s.grasp_probe;
                    r
                })
            })
            .collect();

        for (spec, result) in specs.iter().zip(results) {
            let r = result?;
            let step = spec.ep_index;
            if let Some(tag) = r.adr_probe {
                if let Some(ev) = sampler.record(tag, r.final_success, step) {
                    expansions.push(ev);
                }
            }
            if let Some(side) = r.grasp_probe {
                if let Some(ev) = grasp_range.record(side, r.final_success, step) {
                    expansions.push(ev);
                }
            }
            recent_returns.push(r.episode_return);
            if recent_returns.len() > 100 {
                recent_returns.remove(0);
            }
            let n = r.transitions.len() as u64;
            env_steps += n;
            updates_due += n as f64 * cfg.sac.updates_per_step;
            if !r.transitions.is_empty() {
                let ctx = RewardCtx { table_z: spec.domain.table_offset_z, ..reward_ctx.clone() };
                let relabeled = her_relabel(
                    &r.transitions,
                    cfg.sac.her_rollout_goal_fraction,
                    &ctx,
                    &mut her_rng,
                );
                buffer.extend(relabeled);
            }
        }

        while updates_due >= 1.0 && buffer.len() >= cfg.sac.batch_size {
            last_losses = nets.update(&buffer, &cfg.sac, &mut update_rng)?;
            updates += 1;
            updates_due -= 1.0;
        }

        let new_done = episodes_done + round;
        let crossed_eval =
            cfg.eval_every > 0 && (new_done / cfg.eval_every) > (episodes_done / cfg.eval_every);
        let finished = new_done >= cfg.episodes;
        episodes_done = new_done;

        if crossed_eval || finished {
            let eval_success = run_training_eval(cfg, &nets.policy, &grasp_range, episodes_done);
            let mean_return = if recent_returns.is_empty() {
                0.0
            } else {
                recent_returns.iter().sum::<f64>() / recent_returns.len() as f64
            };
            metrics.push(MetricsRow {
                episodes: episodes_done,
                env_steps,
                updates,
                eval_success,
                train_return_mean: mean_return,
                q1_loss: last_losses.q1_loss,
                policy_loss: last_losses.policy_loss,
                alpha: last_losses.alpha,
                entropy: last_losses.entropy,
                grasp_lo: grasp_range.lo,
                grasp_hi: grasp_range.hi,
                adr_expansions: expansions.len(),
            });
        }
        let crossed_ck = cfg.checkpoint_every > 0
            && (episodes_done / cfg.checkpoint_every) > ((episodes_done - round) / cfg.checkpoint_every);
        if crossed_ck || finished {
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir).ok();
                let meta = checkpoint_meta(cfg, &nets, &sampler, &grasp_range, episodes_done, env_steps, updates);
                save_checkpoint(&dir.join("latest.ckpt"), &nets, &meta)?;
                if finished {
                    save_checkpoint(&dir.join("final.ckpt"), &nets, &meta)?;
                }
            }
        }
    }

    Ok(TrainResult {
        nets,
        metrics,
        expansions,
        sampler,
        grasp_range,
        episodes_run: episodes_done,
        env_steps,
        updates,
    })
}

fn checkpoint_meta(
    cfg: &TrainConfig,
    nets: &SacNets,
    sampler: &DomainSampler,
    grasp_range: &GraspRange,
    episodes: usize,
    env_steps: u64,
    updates: u64,
) -> CheckpointMeta {
    CheckpointMeta {
        obs_dim: nets.obs_dim,
        act_dim: nets.act_dim,
        hidden: cfg.sac.hidden_sizes.clone(),
        log_alpha: nets.log_alpha,
        episodes: episodes as u64,
        env_steps,
        updates,
        extra: serde_json::json!({
            "adr": sampler,
            "grasp_range": grasp_range,
        }),
    }
}

/// Success rate of the deterministic policy on the training distribution's
/// default domain, goals drawn from the current range.
fn run_training_eval(
    cfg: &TrainConfig,
    policy: &GaussianPolicy<f32>,
    grasp_range: &GraspRange,
    episodes_done: usize,
) -> f64 {
    let mut eval_rng = stream_rng(cfg.seed, Stream::Eval, episodes_done as u64);
    let domain = DomainParams::default();
    let goals: Vec<GraspGoal> = (0..cfg.eval_episodes)
        .map(|_| {
            let id = if grasp_range.lo == grasp_range.hi {
                grasp_range.lo
            } else {
                eval_rng.gen_range(grasp_range.lo..grasp_range.hi)
            };
            grasp_from_id(&domain, id).expect("in range")
        })
        .collect();
    evaluate_policy(&cfg.env, policy, domain, &goals, cfg.seed, 1_000_000 + episodes_done as u64)
}

/// Roll out a deterministic episode and return per-step data (for traces).
pub fn rollout_trace(
    env_cfg: &EnvConfig,
    policy: &GaussianPolicy<f32>,
    domain: DomainParams,
    goal: GraspGoal,
    env_seed: u64,
    stochastic_seed: Option<u64>,
) -> Result<(Vec<TraceStep>, bool), EnvError> {
    let mut env = OccludedGraspEnv::new(env_cfg.clone());
    let mut obs = env.reset(domain, goal, env_seed)?;
    let goal_arr = [
        goal.pose_in_object.x as f32,
        goal.pose_in_object.z as f32,
        goal.pose_in_object.pitch as f32,
    ];
    let mut scratch = policy.net.scratch();
    let mut rng = stream_rng(stochastic_seed.unwrap_or(0), Stream::Policy, 0);
    let mut steps = Vec::new();
    let mut success = false;
    for t in 0..env_cfg.max_steps {
        let core = obs_core(&obs);
        let input = policy_input(&goal_arr, &core);
        let a = if stochastic_seed.is_some() {
            policy.act_stochastic(&input, &mut scratch, &mut rng)
        } else {
            policy.act_deterministic(&input, &mut scratch)
        };
        let action = [a[0] as f64, a[1] as f64, a[2] as f64];
        match env.step(action) {
            Ok(step) => {
                steps.push(TraceStep {
                    t,
                    obs,
                    action,
                    reward: step.reward,
                    info: step.info,
                });
                success = step.info.success;
                obs = step.observation;
                if step.done {
                    break;
                }
            }
            Err(EnvError::NonFiniteState(_)) => {
                success = false;
                break;
            }
            Err(other) => return Err(other),
        }
    }
    Ok((steps, success))
}

/// One recorded policy step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: usize,
    pub obs: Observation,
    pub action: [f64; 3],
    pub reward: f64,
    pub info: crate::env::Info,
}
