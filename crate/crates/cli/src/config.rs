//! Run configuration: one TOML file wiring every subsystem together.
//! Defaults reproduce the standard training setup.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use og_core::env::{AblationFlags, DomainParams, EnvConfig, RewardParams};
use og_core::sac::SacConfig;
use og_core::select::SelectionStrategy;
use og_core::train::{GoalStrategy, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvSection,
    pub rl: SacConfig,
    pub curriculum: CurriculumSection,
    pub eval: EvalSection,
    pub io: IoSection,
    pub train: TrainSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSection {
    pub domain: DomainParams,
    pub reward: RewardParams,
    pub ablation: AblationFlags,
    /// Gaussian joint-angle noise at reset (rad).
    pub joint_noise_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurriculumSection {
    /// "single", "curriculum", or "full-range".
    pub goal_mode: String,
    pub start_id: f64,
    pub adr: bool,
    pub grasp_probe_probability: f64,
}

impl Default for CurriculumSection {
    fn default() -> Self {
        CurriculumSection {
            goal_mode: "single".into(),
            start_id: 1.5,
            adr: false,
            grasp_probe_probability: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    /// Selection strategy over candidate sets; empty string = direct goal.
    pub strategy: String,
    pub episodes: usize,
    pub candidates: usize,
    pub seeds: Vec<u64>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection { strategy: String::new(), episodes: 10, candidates: 50, seeds: vec![0, 1, 2, 3, 4] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoSection {
    pub out_dir: PathBuf,
    pub checkpoint_dir: Option<PathBuf>,
    pub checkpoint_every: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for IoSection {
    fn default() -> Self {
        IoSection {
            out_dir: PathBuf::from("runs/default"),
            checkpoint_dir: None,
            checkpoint_every: 500,
            master_seed: 0,
            workers: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub episodes: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection { episodes: 4000, eval_every: 100, eval_episodes: 10 }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            env: EnvSection::default(),
            rl: SacConfig::default(),
            curriculum: CurriculumSection::default(),
            eval: EvalSection::default(),
            io: IoSection::default(),
            train: TrainSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.rl.validate().map_err(|e| anyhow::anyhow!("rl: {e}"))?;
        self.env.reward.validate().map_err(|e| anyhow::anyhow!("env.reward: {e}"))?;
        match self.curriculum.goal_mode.as_str() {
            "single" | "curriculum" | "full-range" => {}
            other => anyhow::bail!(
                "curriculum.goal_mode: '{other}' is not one of single|curriculum|full-range"
            ),
        }
        if !(0.0..=4.0).contains(&self.curriculum.start_id) {
            anyhow::bail!("curriculum.start_id: {} outside [0, 4]", self.curriculum.start_id);
        }
        if !self.eval.strategy.is_empty() && SelectionStrategy::parse(&self.eval.strategy).is_none()
        {
            anyhow::bail!(
                "eval.strategy: '{}' is not one of ArgmaxQ|ArgmaxQ-t0|PoseDiff|PoseDiff-t0|Uniform",
                self.eval.strategy
            );
        }
        if self.eval.seeds.is_empty() {
            anyhow::bail!("eval.seeds: need at least one seed");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn env_config(&self) -> EnvConfig {
        let mut env = EnvConfig {
            reward: self.env.reward.clone(),
            ablation: self.env.ablation,
            ..EnvConfig::default()
        };
        if let Some(noise) = self.env.joint_noise_std {
            env.joint_noise_std = noise;
        }
        env
    }

    pub fn goal_strategy(&self) -> GoalStrategy {
        match self.curriculum.goal_mode.as_str() {
            "curriculum" => GoalStrategy::Curriculum { start_id: self.curriculum.start_id },
            "full-range" => GoalStrategy::FullRangeUniform,
            _ => GoalStrategy::Single { id: self.curriculum.start_id },
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            sac: self.rl.clone(),
            env: self.env_config(),
            goal: self.goal_strategy(),
            adr: self.curriculum.adr,
            episodes: self.train.episodes,
            eval_every: self.train.eval_every,
            eval_episodes: self.train.eval_episodes,
            seed,
            workers: self.io.workers,
            grasp_probe_probability: self.curriculum.grasp_probe_probability,
            checkpoint_every: self.io.checkpoint_every,
            out_dir: Some(
                self.io.checkpoint_dir.clone().unwrap_or_else(|| self.io.out_dir.clone()),
            ),
        }
    }
}

/// The default configuration with a short comment per field group.
pub fn annotated_defaults() -> String {
    let body = RunConfig::default().to_toml();
    let header = "\
# Default run configuration.
#
# env.domain:      physical scene parameters (sizes in m, density in kg/m^3)
# env.reward:      shaped-reward weights and the strict success thresholds
# env.ablation:    wall / occlusion-penalty / sparse-reward / stiff-gain switches
# rl:              soft actor-critic hyperparameters (two critics, target nets,
#                  automatic entropy tuning, hindsight relabeling fraction)
# curriculum:      goal strategy (single grasp, expanding range, or full range)
#                  and automatic domain randomization on/off
# eval:            grasp-selection strategy, per-setting episode count, seeds
# io:              output locations, master seed, rollout workers
# train:           episode budget and evaluation cadence
";
    format!("{header}\n{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_is_identity() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        // and once more through serialization
        assert_eq!(text, back.to_toml());
    }

    #[test]
    fn defaults_match_published_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.rl.gamma, 0.99);
        assert_eq!(cfg.rl.tau, 0.005);
        assert_eq!(cfg.rl.lr_policy, 1e-3);
        assert_eq!(cfg.rl.lr_q, 5e-4);
        assert_eq!(cfg.rl.batch_size, 256);
        assert_eq!(cfg.rl.buffer_capacity, 1_000_000);
        assert_eq!(cfg.rl.her_rollout_goal_fraction, 0.40);
        assert_eq!(cfg.rl.hidden_sizes, vec![512, 512, 512]);
        assert_eq!(cfg.env.reward.alpha1, 50.0);
        assert_eq!(cfg.env.reward.alpha2, 2.0);
        assert_eq!(cfg.env.reward.beta, 200.0);
        assert_eq!(cfg.env.reward.eps_t, 0.03);
        assert!((cfg.env.reward.eps_theta - 10.0_f64.to_radians()).abs() < 1e-12);
        assert_eq!(cfg.env.domain.object_size_x, 0.15);
        assert_eq!(cfg.env.domain.object_density, 86.0);
        assert_eq!(cfg.curriculum.start_id, 1.5);
        assert_eq!(cfg.eval.seeds.len(), 5);
        assert_eq!(cfg.eval.episodes, 10);
        assert_eq!(cfg.eval.candidates, 50);
    }

    #[test]
    fn bad_goal_mode_rejected_with_field_path() {
        let mut cfg = RunConfig::default();
        cfg.curriculum.goal_mode = "bogus".into();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("curriculum.goal_mode"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "[rl]\nnot_a_field = 3\n";
        assert!(toml::from_str::<RunConfig>(text).is_err());
    }
}
