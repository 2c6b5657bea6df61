//! Batch evaluation with optional grasp selection from candidate sets.

use rayon::prelude::*;

use crate::curriculum::GraspRange;
use crate::env::{
    grasp_from_id, DomainParams, EnvConfig, EnvError, GraspGoal, OccludedGraspEnv,
};
use crate::math::Pose2;
use crate::rng::{mix_seed, stream_rng, Stream};
use crate::sac::{obs_core, policy_input, EvalNets};
use crate::select::{select, CandidateSet, SelectionStrategy};

use super::report::{EpisodeRecord, EvalReport, Outcome};

/// Where evaluation goals come from.
#[derive(Debug, Clone)]
pub enum GoalSource {
    /// A fixed grasp ID.
    Fixed(f64),
    /// Uniform IDs from a range.
    Range(GraspRange),
    /// Per-episode candidate sets drawn from a range, picked by a strategy.
    Candidates { range: GraspRange, count: usize, strategy: SelectionStrategy },
}

#[derive(Debug, Clone)]
pub struct EvalSettings {
    pub label: String,
    pub n_episodes: usize,
    /// Seeds are reported per "evaluation seed" for per-seed breakdowns.
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub deterministic: bool,
}

impl EvalSettings {
    pub fn simple(label: &str, n_episodes: usize, master_seed: u64) -> Self {
        EvalSettings {
            label: label.to_string(),
            n_episodes,
            seeds: vec![master_seed],
            master_seed,
            deterministic: true,
        }
    }
}

/// Sample a domain per episode from a fixed value or a sampler snapshot.
#[derive(Debug, Clone)]
pub enum DomainSource {
    Fixed(DomainParams),
    Sampler(crate::curriculum::DomainSampler),
    /// Pre-drawn list, one per episode (cycled).
    List(Vec<DomainParams>),
}

impl DomainSource {
    fn domain_for(&self, seed: u64, episode: usize) -> DomainParams {
        match self {
            DomainSource::Fixed(d) => *d,
            DomainSource::Sampler(s) => {
                let mut rng = stream_rng(seed, Stream::Domain, episode as u64);
                s.sample(&mut rng).0
            }
            DomainSource::List(list) => list[episode % list.len()],
        }
    }
}

/// Classify a finished episode.
fn classify(success: bool, had_contact: bool, obj_start: Pose2, obj_end: Pose2) -> Outcome {
    if success {
        return Outcome::Success;
    }
    if !had_contact {
        return Outcome::MissedContact;
    }
    let moved = (obj_end.pos() - obj_start.pos()).norm() > 0.05
        || crate::math::angle_diff(obj_end.pitch, obj_start.pitch) > 0.3;
    if moved {
        Outcome::Dropped
    } else {
        Outcome::Timeout
    }
}

/// Evaluate a policy snapshot. Deterministic for a fixed master seed.
pub fn run_eval(
    nets: &EvalNets,
    env_cfg: &EnvConfig,
    domains: &DomainSource,
    goals: &GoalSource,
    settings: &EvalSettings,
) -> Result<EvalReport, EnvError> {
    let t0 = std::time::Instant::now();
    let mut jobs = Vec::new();
    for &seed in &settings.seeds {
        for ep in 0..settings.n_episodes {
            jobs.push((seed, ep));
        }
    }
    let records: Result<Vec<EpisodeRecord>, EnvError> = jobs
        .par_iter()
        .map(|&(seed, ep)| {
            let mut nets = nets.clone();
            run_one(&mut nets, env_cfg, domains, goals, settings, seed, ep)
        })
        .collect();
    Ok(EvalReport::from_records(&settings.label, records?, t0.elapsed().as_secs_f64()))
}

fn run_one(
    nets: &mut EvalNets,
    env_cfg: &EnvConfig,
    domains: &DomainSource,
    goals: &GoalSource,
    settings: &EvalSettings,
    seed: u64,
    ep: usize,
) -> Result<EpisodeRecord, EnvError> {
    let domain = domains.domain_for(mix_seed(settings.master_seed, seed), ep);
    let mut goal_rng = stream_rng(mix_seed(settings.master_seed, seed), Stream::Select, ep as u64);
    use rand::Rng as _;

    let (mut goal, candidates, strategy): (GraspGoal, Option<CandidateSet>, Option<SelectionStrategy>) =
        match goals {
            GoalSource::Fixed(id) => (grasp_from_id(&domain, *id).expect("valid id"), None, None),
            GoalSource::Range(range) => {
                let id = if range.lo == range.hi {
                    range.lo
                } else {
                    goal_rng.gen_range(range.lo..range.hi)
                };
                (grasp_from_id(&domain, id).expect("valid id"), None, None)
            }
            GoalSource::Candidates { range, count, strategy } => {
                let set = CandidateSet::sample(range, &domain, *count, &mut goal_rng);
                (set.grasps[0], Some(set), Some(*strategy))
            }
        };

    let mut env = OccludedGraspEnv::new(env_cfg.clone());
    let env_seed = mix_seed(mix_seed(settings.master_seed, seed), ep as u64);
    let mut obs = env.reset(domain, goal, env_seed)?;
    let obj_start = obs.object_world;

    // initial selection for candidate strategies
    if let (Some(set), Some(strategy)) = (&candidates, strategy) {
        let core = obs_core(&obs);
        let (_, g) = select(strategy, set, &core, nets, &env_cfg.reward, &mut goal_rng)
            .expect("non-empty candidates");
        goal = g;
    }

    let mut act_rng = stream_rng(mix_seed(settings.master_seed, seed), Stream::Policy, ep as u64);
    let mut switches = 0usize;
    let mut episode_return = 0.0;
    let mut success = false;
    let mut had_contact = false;
    let mut final_obj = obj_start;
    for _t in 0..env_cfg.max_steps {
        // per-step re-selection
        if let (Some(set), Some(strategy)) = (&candidates, strategy) {
            if strategy.refresh_per_step() {
                let core = obs_core(&obs);
                let (_, g) = select(strategy, set, &core, nets, &env_cfg.reward, &mut goal_rng)
                    .expect("non-empty candidates");
                if g != goal {
                    switches += 1;
                    goal = g;
                }
            }
        }
        // evaluation measures success against the currently selected goal
        env_set_goal(&mut env, goal);
        let core = obs_core(&obs);
        let goal_arr = [
            goal.pose_in_object.x as f32,
            goal.pose_in_object.z as f32,
            goal.pose_in_object.pitch as f32,
        ];
        let input = policy_input(&goal_arr, &core);
        let action = nets.act(&input, settings.deterministic, &mut act_rng);
        match env.step(action) {
            Ok(step) => {
                episode_return += step.reward;
                success = step.info.success;
                had_contact |= step.info.ee_object_contact;
                final_obj = step.observation.object_world;
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

    Ok(EpisodeRecord {
        seed,
        episode: ep,
        grasp_id: goal.grasp_id,
        success,
        outcome: classify(success, had_contact, obj_start, final_obj),
        episode_return,
        goal_switches: switches,
    })
}

fn env_set_goal(env: &mut OccludedGraspEnv, goal: GraspGoal) {
    env.set_goal(goal);
}
