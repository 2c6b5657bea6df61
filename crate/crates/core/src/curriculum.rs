//! Boundary-expansion engines: the grasp curriculum and automatic domain
//! randomization share one mechanism. Parameters are sampled uniformly from
//! per-parameter ranges; occasional probe episodes pin one parameter to a
//! range boundary, and when the trailing success rate at a boundary clears a
//! threshold that boundary expands by its increment (never contracting,
//! always capped).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::DomainParams;

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.8;
pub const DEFAULT_BUFFER_SIZE: usize = 10;
pub const DEFAULT_PROBE_PROBABILITY: f64 = 0.1;
pub const GRASP_EXPANSION_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lo,
    Hi,
}

/// One boundary expansion, for structured logging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionEvent {
    pub step: u64,
    pub param: String,
    pub boundary: Side,
    pub old: f64,
    pub new: f64,
}

/// Fixed-size success buffer for one boundary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBuffer {
    flags: Vec<bool>,
}

impl BoundaryBuffer {
    /// Push a flag; when the buffer reaches `size` it drains and returns the
    /// mean success rate.
    pub fn push(&mut self, success: bool, size: usize) -> Option<f64> {
        self.flags.push(success);
        if self.flags.len() >= size {
            let mean = self.flags.iter().filter(|&&s| s).count() as f64 / self.flags.len() as f64;
            self.flags.clear();
            Some(mean)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Per-parameter randomization state: current bounds, increments (an absent
/// increment freezes that side), hard caps, and the two boundary buffers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdrParamState {
    pub name: String,
    pub phi_lo: f64,
    pub phi_hi: f64,
    pub delta_up: Option<f64>,
    pub delta_down: Option<f64>,
    pub hard_lo: f64,
    pub hard_hi: f64,
    pub buf_lo: BoundaryBuffer,
    pub buf_hi: BoundaryBuffer,
    pub success_threshold: f64,
    pub buffer_size: usize,
}

impl AdrParamState {
    pub fn new(
        name: &str,
        initial: f64,
        delta_up: Option<f64>,
        delta_down: Option<f64>,
        hard_lo: f64,
        hard_hi: f64,
    ) -> Self {
        assert!(hard_lo <= initial && initial <= hard_hi);
        AdrParamState {
            name: name.to_string(),
            phi_lo: initial,
            phi_hi: initial,
            delta_up,
            delta_down,
            hard_lo,
            hard_hi,
            buf_lo: BoundaryBuffer::default(),
            buf_hi: BoundaryBuffer::default(),
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            buffer_size: DEFAULT_BUFFER_SIZE,
        }
    }

    /// Feed one probe-episode outcome; expansion fires only when the filled
    /// buffer's mean success exceeds the threshold strictly.
    pub fn record_and_expand(
        &mut self,
        side: Side,
        success: bool,
        step: u64,
    ) -> Option<ExpansionEvent> {
        let (buf, delta) = match side {
            Side::Lo => (&mut self.buf_lo, self.delta_down),
            Side::Hi => (&mut self.buf_hi, self.delta_up),
        };
        let mean = buf.push(success, self.buffer_size)?;
        if mean <= self.success_threshold {
            return None;
        }
        let delta = delta?;
        let (old, new) = match side {
            Side::Lo => {
                let old = self.phi_lo;
                self.phi_lo = (self.phi_lo - delta).max(self.hard_lo);
                (old, self.phi_lo)
            }
            Side::Hi => {
                let old = self.phi_hi;
                self.phi_hi = (self.phi_hi + delta).min(self.hard_hi);
                (old, self.phi_hi)
            }
        };
        if new == old {
            return None;
        }
        Some(ExpansionEvent { step, param: self.name.clone(), boundary: side, old, new })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.phi_lo == self.phi_hi {
            self.phi_lo
        } else {
            rng.gen_range(self.phi_lo..self.phi_hi)
        }
    }

    pub fn boundary_value(&self, side: Side) -> f64 {
        match side {
            Side::Lo => self.phi_lo,
            Side::Hi => self.phi_hi,
        }
    }
}

/// Marks an episode whose domain pinned one parameter at a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeTag {
    pub param_index: usize,
    pub side: Side,
}

/// Uniform sampler over all randomized parameters, with boundary probing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSampler {
    pub params: Vec<AdrParamState>,
    pub boundary_probe_probability: f64,
    /// When false every episode uses the initial (lo==hi) values and no
    /// probing happens (fixed-environment training).
    pub expansion_enabled: bool,
}

impl DomainSampler {
    /// The randomization table: initial value, +increment, -increment, caps.
    pub fn standard(expansion_enabled: bool) -> Self {
        let p = |name, init, up: Option<f64>, down: Option<f64>, lo, hi| {
            AdrParamState::new(name, init, up, down, lo, hi)
        };
        DomainSampler {
            params: vec![
                p("object_size_x", 0.15, Some(0.01), Some(0.01), 0.14, 0.16),
                p("object_size_z", 0.05, Some(0.01), Some(0.01), 0.04, 0.06),
                p("table_friction", 0.3, Some(0.1), Some(0.1), 0.1, 0.5),
                p("gripper_friction", 3.0, None, Some(1.0), 2.0, 3.0),
                p("object_density", 86.0, Some(86.0), Some(43.0), 43.0, 172.0),
                p("action_translation_scale", 0.03, None, Some(0.005), 0.02, 0.03),
                p("action_rotation_scale", 0.2, None, Some(0.05), 0.1, 0.2),
                p("initial_distance_to_wall", 0.0, Some(0.01), None, 0.0, 0.02),
                p("table_offset_x", 0.5, Some(0.01), Some(0.01), 0.48, 0.52),
                p("table_offset_z", 0.07, Some(0.01), Some(0.01), 0.055, 0.075),
            ],
            boundary_probe_probability: DEFAULT_PROBE_PROBABILITY,
            expansion_enabled,
        }
    }

    /// Sampler pinned to the final (cap) ranges, for generalization evals.
    pub fn at_final_ranges() -> Self {
        let mut s = Self::standard(false);
        for p in &mut s.params {
            p.phi_lo = p.hard_lo;
            p.phi_hi = p.hard_hi;
        }
        s
    }

    /// Draw one episode's domain; probe episodes pin exactly one uniformly
    /// chosen parameter at one of its current boundaries.
    pub fn sample(&self, rng: &mut impl Rng) -> (DomainParams, Option<ProbeTag>) {
        let mut domain = DomainParams::default();
        let probe = if self.expansion_enabled && rng.gen_bool(self.boundary_probe_probability) {
            let param_index = rng.gen_range(0..self.params.len());
            let side = if rng.gen_bool(0.5) { Side::Lo } else { Side::Hi };
            Some(ProbeTag { param_index, side })
        } else {
            None
        };
        for (i, p) in self.params.iter().enumerate() {
            let v = match probe {
                Some(tag) if tag.param_index == i => p.boundary_value(tag.side),
                _ => {
                    if self.expansion_enabled {
                        p.sample(rng)
                    } else {
                        p.phi_lo
                    }
                }
            };
            assert!(domain.set_field(&p.name, v), "unknown domain field {}", p.name);
        }
        (domain, probe)
    }

    /// Record a probe outcome; may expand a boundary.
    pub fn record(&mut self, tag: ProbeTag, success: bool, step: u64) -> Option<ExpansionEvent> {
        self.params[tag.param_index].record_and_expand(tag.side, success, step)
    }

    pub fn param(&self, name: &str) -> Option<&AdrParamState> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Grasp-ID training range with the same boundary-expansion mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspRange {
    pub lo: f64,
    pub hi: f64,
    pub expansion_step: f64,
    pub success_threshold: f64,
    pub buffer_size: usize,
    pub buf_lo: BoundaryBuffer,
    pub buf_hi: BoundaryBuffer,
}

impl GraspRange {
    pub fn single(id: f64) -> Self {
        GraspRange {
            lo: id,
            hi: id,
            expansion_step: GRASP_EXPANSION_STEP,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            buffer_size: DEFAULT_BUFFER_SIZE,
            buf_lo: BoundaryBuffer::default(),
            buf_hi: BoundaryBuffer::default(),
        }
    }

    pub fn full() -> Self {
        let mut r = Self::single(0.0);
        r.hi = crate::env::GRASP_ID_MAX;
        r
    }

    /// Pure boundary update: expand outward by the step when the measured
    /// success rate strictly exceeds the threshold.
    pub fn updated(&self, side: Side, success_rate: f64) -> GraspRange {
        assert!((0.0..=1.0).contains(&success_rate));
        let mut out = self.clone();
        if success_rate > self.success_threshold {
            match side {
                Side::Lo => out.lo = (self.lo - self.expansion_step).max(0.0),
                Side::Hi => out.hi = (self.hi + self.expansion_step).min(crate::env::GRASP_ID_MAX),
            }
        }
        out
    }

    /// Feed one probe outcome through the boundary buffer.
    pub fn record(&mut self, side: Side, success: bool, step: u64) -> Option<ExpansionEvent> {
        let buf = match side {
            Side::Lo => &mut self.buf_lo,
            Side::Hi => &mut self.buf_hi,
        };
        let mean = buf.push(success, self.buffer_size)?;
        let old = match side {
            Side::Lo => self.lo,
            Side::Hi => self.hi,
        };
        let updated = self.updated(side, mean);
        self.lo = updated.lo;
        self.hi = updated.hi;
        let new = match side {
            Side::Lo => self.lo,
            Side::Hi => self.hi,
        };
        if new == old {
            return None;
        }
        Some(ExpansionEvent { step, param: "grasp_id".into(), boundary: side, old, new })
    }

    /// Sample a goal ID: uniform over the range, with boundary probes. The
    /// degenerate single-grasp phase probes its only boundary every episode.
    pub fn sample(&self, probe_probability: f64, rng: &mut impl Rng) -> (f64, Option<Side>) {
        if self.lo == self.hi {
            return (self.lo, Some(Side::Hi));
        }
        if rng.gen_bool(probe_probability) {
            let side = if rng.gen_bool(0.5) { Side::Lo } else { Side::Hi };
            return (
                match side {
                    Side::Lo => self.lo,
                    Side::Hi => self.hi,
                },
                Some(side),
            );
        }
        (rng.gen_range(self.lo..self.hi), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_example_expansion() {
        // range [1, 2], lo boundary success 0.85 -> [0.75, 2]
        let mut r = GraspRange::single(1.0);
        r.hi = 2.0;
        let out = r.updated(Side::Lo, 0.85);
        assert_eq!(out.lo, 0.75);
        assert_eq!(out.hi, 2.0);
    }

    #[test]
    fn threshold_is_strict() {
        let mut r = GraspRange::single(1.0);
        r.hi = 2.0;
        let out = r.updated(Side::Lo, 0.8);
        assert_eq!(out.lo, 1.0);
    }

    #[test]
    fn range_saturates_at_caps() {
        let r = GraspRange::full();
        let out = r.updated(Side::Lo, 1.0);
        assert_eq!(out.lo, 0.0);
        let out = r.updated(Side::Hi, 1.0);
        assert_eq!(out.hi, 4.0);
    }

    #[test]
    fn adr_expands_after_full_successful_buffer() {
        let mut p = AdrParamState::new("object_size_x", 0.15, Some(0.01), Some(0.01), 0.14, 0.16);
        for i in 0..9 {
            assert!(p.record_and_expand(Side::Hi, true, i).is_none());
        }
        let ev = p.record_and_expand(Side::Hi, true, 9).expect("expansion");
        assert_eq!(ev.old, 0.15);
        assert_eq!(ev.new, 0.16);
        // a further expansion is clipped at the hard cap: no event
        for i in 0..9 {
            assert!(p.record_and_expand(Side::Hi, true, 10 + i).is_none());
        }
        assert!(p.record_and_expand(Side::Hi, true, 19).is_none());
        assert_eq!(p.phi_hi, 0.16);
    }

    #[test]
    fn frozen_side_never_moves() {
        let mut p = AdrParamState::new("gripper_friction", 3.0, None, Some(1.0), 2.0, 3.0);
        for i in 0..50 {
            p.record_and_expand(Side::Hi, true, i);
        }
        assert_eq!(p.phi_hi, 3.0, "upper bound without +increment stays put");
        for i in 0..10 {
            p.record_and_expand(Side::Lo, true, i);
        }
        assert_eq!(p.phi_lo, 2.0);
    }

    #[test]
    fn failure_buffer_clears_without_expanding() {
        let mut p = AdrParamState::new("table_friction", 0.3, Some(0.1), Some(0.1), 0.1, 0.5);
        for i in 0..10 {
            assert!(p.record_and_expand(Side::Hi, false, i).is_none());
        }
        assert!(p.buf_hi.is_empty(), "buffer cleared after evaluation");
        assert_eq!(p.phi_hi, 0.3);
    }

    #[test]
    fn initial_sampler_is_deterministic_table_values() {
        let s = DomainSampler::standard(true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let (d, _) = s.sample(&mut rng);
            // before any expansion even probe episodes use initial values
            assert_eq!(d, DomainParams::default());
        }
    }

    #[test]
    fn uniform_sampling_mean_concentrates() {
        let mut s = DomainSampler::standard(true);
        s.boundary_probe_probability = 0.0;
        let p = s.params.iter_mut().find(|p| p.name == "table_friction").unwrap();
        p.phi_lo = 0.1;
        p.phi_hi = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10_000;
        let mean: f64 =
            (0..n).map(|_| s.sample(&mut rng).0.table_friction).sum::<f64>() / n as f64;
        assert!((mean - 0.3).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn probe_pins_exactly_one_parameter() {
        let mut s = DomainSampler::standard(true);
        for p in &mut s.params {
            p.phi_lo = p.hard_lo;
            p.phi_hi = p.hard_hi;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut saw_probe = false;
        for _ in 0..300 {
            let (d, probe) = s.sample(&mut rng);
            if let Some(tag) = probe {
                saw_probe = true;
                let p = &s.params[tag.param_index];
                let v = d.field(&p.name).unwrap();
                assert_eq!(v, p.boundary_value(tag.side));
            }
        }
        assert!(saw_probe);
    }

    #[test]
    fn sampled_domains_respect_final_ranges() {
        let s = DomainSampler::at_final_ranges();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let (d, _) = s.sample(&mut rng);
            for p in &s.params {
                let v = d.field(&p.name).unwrap();
                assert!(v >= p.hard_lo - 1e-12 && v <= p.hard_hi + 1e-12);
            }
        }
    }

    #[test]
    fn monotone_bounds_under_replay() {
        // any stream of outcomes yields non-contracting, capped ranges
        let mut s = DomainSampler::standard(true);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut prev: Vec<(f64, f64)> = s.params.iter().map(|p| (p.phi_lo, p.phi_hi)).collect();
        for step in 0..5000u64 {
            use rand::Rng as _;
            let tag = ProbeTag {
                param_index: rng.gen_range(0..s.params.len()),
                side: if rng.gen_bool(0.5) { Side::Lo } else { Side::Hi },
            };
            s.record(tag, rng.gen_bool(0.85), step);
            for (i, p) in s.params.iter().enumerate() {
                assert!(p.phi_lo <= prev[i].0 + 1e-15, "{} lo contracted", p.name);
                assert!(p.phi_hi >= prev[i].1 - 1e-15, "{} hi contracted", p.name);
                assert!(p.phi_lo >= p.hard_lo && p.phi_hi <= p.hard_hi);
                prev[i] = (p.phi_lo, p.phi_hi);
            }
        }
    }
}
