//! Episode traces as line-delimited JSON and open-loop replay.
//!
//! A trace file starts with one header line (version, domain, goal, env
//! seed, step count) followed by one record per policy step. Replaying a
//! trace re-executes the recorded action sequence while ignoring
//! observations; in the recording domain this reproduces the recorded
//! outcome exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{DomainParams, EnvConfig, EnvError, GraspGoal, OccludedGraspEnv};
use crate::train::TraceStep;

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace version {found} unsupported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("trace truncated: header promises {expected} steps, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("malformed trace: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("empty trace file")]
    Empty,
    #[error("environment error during replay: {0}")]
    Env(#[from] EnvError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TraceHeader {
    version: u32,
    domain: DomainParams,
    goal: GraspGoal,
    env_seed: u64,
    steps: usize,
    recorded_success: bool,
}

/// A recorded episode.
#[derive(Debug, Clone)]
pub struct EpisodeTrace {
    pub domain: DomainParams,
    pub goal: GraspGoal,
    pub env_seed: u64,
    pub steps: Vec<TraceStep>,
    pub recorded_success: bool,
}

/// Write a trace as JSON lines.
pub fn record_trace(path: &Path, trace: &EpisodeTrace) -> Result<(), TraceError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header = TraceHeader {
        version: TRACE_VERSION,
        domain: trace.domain,
        goal: trace.goal,
        env_seed: trace.env_seed,
        steps: trace.steps.len(),
        recorded_success: trace.recorded_success,
    };
    writeln!(f, "{}", serde_json::to_string(&header)?)?;
    for s in &trace.steps {
        writeln!(f, "{}", serde_json::to_string(s)?)?;
    }
    Ok(())
}

pub fn load_trace(path: &Path) -> Result<EpisodeTrace, TraceError> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = f.lines();
    let header_line = lines.next().ok_or(TraceError::Empty)??;
    let header: TraceHeader = serde_json::from_str(&header_line)?;
    if header.version != TRACE_VERSION {
        return Err(TraceError::VersionMismatch {
            found: header.version,
            expected: TRACE_VERSION,
        });
    }
    let mut steps = Vec::with_capacity(header.steps);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        steps.push(serde_json::from_str::<TraceStep>(&line)?);
    }
    if steps.len() != header.steps {
        return Err(TraceError::Truncated { expected: header.steps, found: steps.len() });
    }
    Ok(EpisodeTrace {
        domain: header.domain,
        goal: header.goal,
        env_seed: header.env_seed,
        steps,
        recorded_success: header.recorded_success,
    })
}

/// Outcome of replaying a recorded action sequence in some domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayOutcome {
    pub success: bool,
    pub episode_return: f64,
}

/// Re-execute the recorded actions (observations ignored) in `domain`.
pub fn replay_open_loop(
    trace: &EpisodeTrace,
    domain: DomainParams,
    env_cfg: &EnvConfig,
) -> Result<ReplayOutcome, TraceError> {
    if trace.steps.is_empty() {
        return Err(TraceError::Empty);
    }
    let mut env = OccludedGraspEnv::new(env_cfg.clone());
    env.reset(domain, trace.goal, trace.env_seed)?;
    let mut success = false;
    let mut episode_return = 0.0;
    for s in &trace.steps {
        match env.step(s.action) {
            Ok(step) => {
                success = step.info.success;
                episode_return += step.reward;
                if step.done {
                    break;
                }
            }
            Err(EnvError::NonFiniteState(_)) => {
                success = false;
                break;
            }
            Err(other) => return Err(TraceError::Env(other)),
        }
    }
    Ok(ReplayOutcome { success, episode_return })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::grasp_from_id;
    use crate::sac::SacNets;
    use crate::train::rollout_trace;

    fn recorded(seed: u64) -> EpisodeTrace {
        let env_cfg = EnvConfig::default();
        let domain = DomainParams::default();
        let goal = grasp_from_id(&domain, 1.5).unwrap();
        let nets = SacNets::new(12, 3, &[16], 5);
        let (steps, success) =
            rollout_trace(&env_cfg, &nets.policy, domain, goal, seed, None).unwrap();
        EpisodeTrace { domain, goal, env_seed: seed, steps, recorded_success: success }
    }

    #[test]
    fn trace_roundtrip_and_replay_in_recording_domain() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ep.trace");
        let tr = recorded(33);
        record_trace(&path, &tr).unwrap();
        let loaded = load_trace(&path).unwrap();
        assert_eq!(loaded.steps.len(), tr.steps.len());
        let replayed =
            replay_open_loop(&loaded, loaded.domain, &EnvConfig::default()).unwrap();
        assert_eq!(replayed.success, tr.recorded_success, "replay must reproduce the outcome");
    }

    #[test]
    fn truncated_trace_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ep.trace");
        record_trace(&path, &recorded(34)).unwrap();
        let contents = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = contents.lines().collect();
        lines.pop();
        std::fs::write(&path, lines.join("\n")).unwrap();
        assert!(matches!(load_trace(&path), Err(TraceError::Truncated { .. })));
    }

    #[test]
    fn version_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ep.trace");
        record_trace(&path, &recorded(35)).unwrap();
        let contents = std::fs::read_to_string(&path).unwrap();
        let patched = contents.replacen("\"version\":1", "\"version\":9", 1);
        std::fs::write(&path, patched).unwrap();
        assert!(matches!(load_trace(&path), Err(TraceError::VersionMismatch { found: 9, .. })));
    }
}
