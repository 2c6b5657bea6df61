//! Evaluation protocols: batch evaluation with grasp selection, episode
//! traces with open-loop replay, single-parameter and pose-noise sensitivity
//! sweeps, lift verification, and report/plot emission.

mod harness;
mod lift;
mod report;
mod sweep;
mod trace;

pub use harness::{run_eval, DomainSource, EvalSettings, GoalSource};

/// Fixed-domain source shorthand used by the CLI.
pub fn harness_domains_fixed(d: crate::env::DomainParams) -> DomainSource {
    DomainSource::Fixed(d)
}

/// Load a trace file (re-exported loader).
pub fn load_trace_file(path: &std::path::Path) -> Result<EpisodeTrace, TraceError> {
    trace::load_trace(path)
}
pub use lift::verify_lift;
pub use report::{
    svg_line_plot, write_summary_json, CurveSeries, EpisodeRecord, EvalReport, Outcome,
};
pub use sweep::{sensitivity_sweep, SweepCurve, SweepError, SweepPoint};
pub use trace::{record_trace, replay_open_loop, EpisodeTrace, TraceError, TRACE_VERSION};
