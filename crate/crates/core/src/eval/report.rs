//! Evaluation reports and their CSV / JSON / SVG emitters.

use serde::{Deserialize, Serialize};

/// Coarse episode outcome tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    /// The gripper never touched the object.
    MissedContact,
    /// The object moved substantially but the grasp was not reached.
    Dropped,
    /// Contact happened but the object barely moved before time ran out.
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub episode: usize,
    pub grasp_id: f64,
    pub success: bool,
    pub outcome: Outcome,
    pub episode_return: f64,
    /// Goal switches under per-step selection strategies.
    pub goal_switches: usize,
}

/// Aggregated evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub episodes: Vec<EpisodeRecord>,
    pub success_rate: f64,
    /// (seed, success rate) pairs.
    pub per_seed: Vec<(u64, f64)>,
    pub episode_count: usize,
    pub seed_count: usize,
    pub wall_clock_secs: f64,
}

impl EvalReport {
    pub fn from_records(label: &str, episodes: Vec<EpisodeRecord>, wall_clock_secs: f64) -> Self {
        let episode_count = episodes.len();
        let success_rate = if episode_count == 0 {
            0.0
        } else {
            episodes.iter().filter(|e| e.success).count() as f64 / episode_count as f64
        };
        let mut seeds: Vec<u64> = episodes.iter().map(|e| e.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let per_seed = seeds
            .iter()
            .map(|&s| {
                let of_seed: Vec<&EpisodeRecord> =
                    episodes.iter().filter(|e| e.seed == s).collect();
                let rate =
                    of_seed.iter().filter(|e| e.success).count() as f64 / of_seed.len() as f64;
                (s, rate)
            })
            .collect();
        EvalReport {
            label: label.to_string(),
            seed_count: seeds.len(),
            episodes,
            success_rate,
            per_seed,
            episode_count,
            wall_clock_secs,
        }
    }

    pub fn outcome_count(&self, outcome: Outcome) -> usize {
        self.episodes.iter().filter(|e| e.outcome == outcome).count()
    }

    /// One row per (config, seed): `label,seed,episodes,success_rate`.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for (seed, rate) in &self.per_seed {
            let n = self.episodes.iter().filter(|e| e.seed == *seed).count();
            out.push_str(&format!("{},{},{},{:.4}\n", self.label, seed, n, rate));
        }
        out
    }
}

pub fn write_summary_json(reports: &[EvalReport]) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "reports": reports.iter().map(|r| serde_json::json!({
            "label": r.label,
            "success_rate": r.success_rate,
            "episodes": r.episode_count,
            "seeds": r.seed_count,
            "per_seed": r.per_seed,
            "outcomes": {
                "success": r.outcome_count(Outcome::Success),
                "missed_contact": r.outcome_count(Outcome::MissedContact),
                "dropped": r.outcome_count(Outcome::Dropped),
                "timeout": r.outcome_count(Outcome::Timeout),
            },
            "wall_clock_secs": r.wall_clock_secs,
        })).collect::<Vec<_>>(),
    }))
    .expect("report serialization")
}

/// A named line for the SVG plot.
#[derive(Debug, Clone)]
pub struct CurveSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal static SVG line plot (no external plotting dependency).
pub fn svg_line_plot(title: &str, x_label: &str, y_label: &str, series: &[CurveSeries]) -> String {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 40.0, 50.0);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 - x0).abs() < 1e-12 {
        x1 = x0 + 1.0;
    }
    if (y1 - y0).abs() < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<rect width="{w}" height="{h}" fill="white"/>
<text x="{tx}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>
<text x="{tx}" y="{bly}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>
<text x="16" y="{mly}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {mly})">{y_label}</text>
<line x1="{ml}" y1="{axy}" x2="{axx}" y2="{axy}" stroke="black"/>
<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{axy}" stroke="black"/>
"#,
        tx = w / 2.0,
        bly = h - 12.0,
        mly = h / 2.0,
        axy = h - mb,
        axx = w - mr,
    );
    // axis ticks: min and max
    svg.push_str(&format!(
        r#"<text x="{ml}" y="{ty}" font-family="sans-serif" font-size="10" text-anchor="middle">{x0:.3}</text>
<text x="{xr}" y="{ty}" font-family="sans-serif" font-size="10" text-anchor="middle">{x1:.3}</text>
<text x="{lx}" y="{by}" font-family="sans-serif" font-size="10" text-anchor="end">{y0:.2}</text>
<text x="{lx}" y="{uy}" font-family="sans-serif" font-size="10" text-anchor="end">{y1:.2}</text>
"#,
        ty = h - mb + 16.0,
        xr = w - mr,
        lx = ml - 6.0,
        by = h - mb + 4.0,
        uy = mt + 4.0,
    ));
    for (i, s) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let path: String = s
            .points
            .iter()
            .enumerate()
            .map(|(k, (x, y))| {
                format!("{}{:.2},{:.2}", if k == 0 { "M" } else { "L" }, sx(*x), sy(*y))
            })
            .collect::<Vec<_>>()
            .join(" ");
        svg.push_str(&format!(
            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="2"/>
"#
        ));
        for (x, y) in &s.points {
            svg.push_str(&format!(
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>
"#,
                sx(*x),
                sy(*y)
            ));
        }
        svg.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>
"#,
            w - mr - 150.0,
            mt + 16.0 * (i as f64 + 1.0),
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(seed: u64, success: bool) -> EpisodeRecord {
        EpisodeRecord {
            seed,
            episode: 0,
            grasp_id: 1.5,
            success,
            outcome: if success { Outcome::Success } else { Outcome::Timeout },
            episode_return: -10.0,
            goal_switches: 0,
        }
    }

    #[test]
    fn empty_report_has_no_rates() {
        let r = EvalReport::from_records("empty", vec![], 0.0);
        assert_eq!(r.success_rate, 0.0);
        assert_eq!(r.episode_count, 0);
        assert_eq!(r.seed_count, 0);
        assert!(r.csv_rows().is_empty());
    }

    #[test]
    fn per_seed_breakdown() {
        let records = vec![rec(1, true), rec(1, false), rec(2, true), rec(2, true)];
        let r = EvalReport::from_records("t", records, 1.0);
        assert_eq!(r.success_rate, 0.75);
        assert_eq!(r.per_seed, vec![(1, 0.5), (2, 1.0)]);
        let csv = r.csv_rows();
        assert!(csv.contains("t,1,2,0.5000"));
    }

    #[test]
    fn svg_plot_is_wellformed() {
        let svg = svg_line_plot(
            "success vs id",
            "grasp id",
            "success",
            &[CurveSeries { name: "run".into(), points: vec![(0.0, 0.1), (2.0, 0.9)] }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<path"));
        assert!(svg.matches("<circle").count() == 2);
    }
}
