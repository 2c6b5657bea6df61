//! Command implementations and artifact writers.

use std::path::{Path, PathBuf};

use og_core::curriculum::GraspRange;
use og_core::env::DomainParams;
use og_core::eval::{
    replay_open_loop, run_eval, sensitivity_sweep, svg_line_plot, write_summary_json,
    CurveSeries, EvalReport, EvalSettings,
};
use og_core::eval::GoalSource;
use og_core::sac::{load_checkpoint, CheckpointMeta, EvalNets};
use og_core::select::SelectionStrategy;
use og_core::train::{rollout_trace, train, MetricsRow, TrainError};

use crate::config::RunConfig;

pub enum CmdError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<TrainError> for CmdError {
    fn from(e: TrainError) -> Self {
        CmdError::Runtime(anyhow::anyhow!("{e}"))
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Runtime(anyhow::anyhow!("{e}"))
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(
        "episodes,env_steps,updates,eval_success,train_return_mean,q1_loss,policy_loss,alpha,entropy,grasp_lo,grasp_hi,adr_expansions\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.3},{:.6},{:.6},{:.6},{:.4},{:.3},{:.3},{}\n",
            r.episodes,
            r.env_steps,
            r.updates,
            r.eval_success,
            r.train_return_mean,
            r.q1_loss,
            r.policy_loss,
            r.alpha,
            r.entropy,
            r.grasp_lo,
            r.grasp_hi,
            r.adr_expansions
        ));
    }
    out
}

pub fn cmd_train(cfg: &RunConfig) -> Result<(), CmdError> {
    let out_dir = cfg.io.out_dir.clone();
    std::fs::create_dir_all(&out_dir).map_err(runtime)?;
    let tc = cfg.train_config(cfg.io.master_seed);
    let result = train(&tc)?;

    std::fs::write(out_dir.join("metrics.csv"), metrics_csv(&result.metrics)).map_err(runtime)?;
    let expansions: String = result
        .expansions
        .iter()
        .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
        .collect();
    std::fs::write(out_dir.join("expansions.jsonl"), expansions).map_err(runtime)?;

    let curve = CurveSeries {
        name: "eval success".into(),
        points: result.metrics.iter().map(|m| (m.episodes as f64, m.eval_success)).collect(),
    };
    std::fs::write(
        out_dir.join("training_curve.svg"),
        svg_line_plot("training curve", "episodes", "success rate", &[curve]),
    )
    .map_err(runtime)?;

    let last = result.metrics.last();
    println!(
        "trained {} episodes ({} env steps, {} updates); final eval success {:.2}; artifacts in {}",
        result.episodes_run,
        result.env_steps,
        result.updates,
        last.map(|m| m.eval_success).unwrap_or(0.0),
        out_dir.display()
    );
    Ok(())
}

fn open_checkpoint(
    cfg: &RunConfig,
    checkpoint: Option<PathBuf>,
) -> Result<(EvalNets, CheckpointMeta), CmdError> {
    let path = checkpoint.unwrap_or_else(|| cfg.io.out_dir.join("final.ckpt"));
    let (nets, meta) = load_checkpoint(&path)
        .map_err(|e| CmdError::Runtime(anyhow::anyhow!("checkpoint {}: {e}", path.display())))?;
    if meta.obs_dim != 12 || meta.act_dim != 3 {
        return Err(CmdError::Runtime(anyhow::anyhow!(
            "checkpoint dims ({}, {}) do not match this environment (12, 3)",
            meta.obs_dim,
            meta.act_dim
        )));
    }
    Ok((nets.snapshot(), meta))
}

fn grasp_range_from_meta(meta: &CheckpointMeta) -> GraspRange {
    meta.extra
        .get("grasp_range")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .unwrap_or_else(|| GraspRange::single(1.5))
}

pub fn cmd_eval(
    cfg: &RunConfig,
    checkpoint: Option<PathBuf>,
    record_traces: bool,
    grasp_grid: Option<usize>,
) -> Result<(), CmdError> {
    let out_dir = &cfg.io.out_dir;
    std::fs::create_dir_all(out_dir).map_err(runtime)?;
    let (nets, meta) = open_checkpoint(cfg, checkpoint)?;
    let env_cfg = cfg.env_config();
    let domains = og_core::eval::harness_domains_fixed(cfg.env.domain);
    let range = grasp_range_from_meta(&meta);

    let mut reports: Vec<EvalReport> = Vec::new();
    if let Some(grid) = grasp_grid {
        // success per grasp ID across the full parameterization
        let mut points = Vec::new();
        for k in 0..grid.max(2) {
            let id = 4.0 * k as f64 / (grid.max(2) - 1) as f64;
            let settings = EvalSettings {
                label: format!("id_{id:.2}"),
                n_episodes: cfg.eval.episodes,
                seeds: cfg.eval.seeds.clone(),
                master_seed: cfg.io.master_seed,
                deterministic: true,
            };
            let report = run_eval(&nets, &env_cfg, &domains, &GoalSource::Fixed(id), &settings)
                .map_err(runtime)?;
            points.push((id, report.success_rate));
            reports.push(report);
        }
        std::fs::write(
            out_dir.join("success_vs_grasp_id.svg"),
            svg_line_plot(
                "success vs grasp id",
                "grasp id",
                "success rate",
                &[CurveSeries { name: "policy".into(), points }],
            ),
        )
        .map_err(runtime)?;
    } else {
        let goals = if cfg.eval.strategy.is_empty() {
            GoalSource::Fixed(cfg.curriculum.start_id)
        } else {
            let strategy = SelectionStrategy::parse(&cfg.eval.strategy)
                .ok_or_else(|| CmdError::Config(anyhow::anyhow!("bad eval.strategy")))?;
            GoalSource::Candidates { range: range.clone(), count: cfg.eval.candidates, strategy }
        };
        let settings = EvalSettings {
            label: if cfg.eval.strategy.is_empty() { "eval".into() } else { cfg.eval.strategy.clone() },
            n_episodes: cfg.eval.episodes,
            seeds: cfg.eval.seeds.clone(),
            master_seed: cfg.io.master_seed,
            deterministic: true,
        };
        reports.push(run_eval(&nets, &env_cfg, &domains, &goals, &settings).map_err(runtime)?);
    }

    if record_traces {
        let tdir = out_dir.join("traces");
        std::fs::create_dir_all(&tdir).map_err(runtime)?;
        let domain = cfg.env.domain;
        for ep in 0..cfg.eval.episodes {
            let goal = og_core::env::grasp_from_id(&domain, cfg.curriculum.start_id)
                .map_err(runtime)?;
            let env_seed = og_core::rng::mix_seed(cfg.io.master_seed, 900_000 + ep as u64);
            let (steps, success) =
                rollout_trace(&env_cfg, &nets.policy, domain, goal, env_seed, None)
                    .map_err(runtime)?;
            let trace = og_core::eval::EpisodeTrace {
                domain,
                goal,
                env_seed,
                steps,
                recorded_success: success,
            };
            og_core::eval::record_trace(&tdir.join(format!("ep{ep:03}.trace")), &trace)
                .map_err(runtime)?;
        }
        println!("recorded {} traces in {}", cfg.eval.episodes, tdir.display());
    }

    let mut csv = String::from("label,seed,episodes,success_rate\n");
    for r in &reports {
        csv.push_str(&r.csv_rows());
    }
    std::fs::write(out_dir.join("eval_report.csv"), csv).map_err(runtime)?;
    std::fs::write(out_dir.join("eval_summary.json"), write_summary_json(&reports))
        .map_err(runtime)?;
    for r in &reports {
        println!(
            "{}: success {:.2} over {} episodes x {} seeds",
            r.label, r.success_rate, r.episode_count, r.seed_count
        );
    }
    Ok(())
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    checkpoint: Option<PathBuf>,
    param: &str,
    values: &[f64],
) -> Result<(), CmdError> {
    if values.is_empty() {
        return Err(CmdError::Config(anyhow::anyhow!("--values must be non-empty")));
    }
    let out_dir = &cfg.io.out_dir;
    std::fs::create_dir_all(out_dir).map_err(runtime)?;
    let (nets, _meta) = open_checkpoint(cfg, checkpoint)?;
    let env_cfg = cfg.env_config();
    let curve = sensitivity_sweep(
        &nets,
        &env_cfg,
        param,
        values,
        cfg.curriculum.start_id,
        cfg.eval.episodes,
        &cfg.eval.seeds,
        cfg.io.master_seed,
    )
    .map_err(|e| match e {
        og_core::eval::SweepError::UnknownParameter(p) => {
            CmdError::Config(anyhow::anyhow!("unknown sweep parameter '{p}'"))
        }
        other => runtime(other),
    })?;

    let mut csv = String::from("param,value,mean_success,std_across_seeds\n");
    for p in &curve.points {
        csv.push_str(&format!(
            "{},{},{:.4},{:.4}\n",
            curve.param, p.value, p.mean_success, p.std_across_seeds
        ));
    }
    std::fs::write(out_dir.join(format!("sweep_{param}.csv")), csv).map_err(runtime)?;
    std::fs::write(
        out_dir.join(format!("sweep_{param}.svg")),
        svg_line_plot(
            &format!("success vs {param}"),
            param,
            "success rate",
            &[CurveSeries {
                name: param.to_string(),
                points: curve.points.iter().map(|p| (p.value, p.mean_success)).collect(),
            }],
        ),
    )
    .map_err(runtime)?;
    for p in &curve.points {
        println!("{param}={}: success {:.2} (+-{:.2})", p.value, p.mean_success, p.std_across_seeds);
    }
    Ok(())
}

pub fn cmd_replay(
    cfg: &RunConfig,
    trace_path: &Path,
    overrides: &[(String, f64)],
) -> Result<(), CmdError> {
    let trace = og_core::eval::load_trace_file(trace_path).map_err(runtime)?;
    let mut domain: DomainParams = trace.domain;
    for (k, v) in overrides {
        if !domain.set_field(k, *v) {
            return Err(CmdError::Config(anyhow::anyhow!("unknown domain field '{k}'")));
        }
    }
    let outcome =
        replay_open_loop(&trace, domain, &cfg.env_config()).map_err(runtime)?;
    println!(
        "{}",
        serde_json::json!({
            "recorded_success": trace.recorded_success,
            "replayed_success": outcome.success,
            "replayed_return": outcome.episode_return,
            "domain_overridden": !overrides.is_empty(),
        })
    );
    Ok(())
}
