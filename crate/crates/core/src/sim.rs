//! Synthetic detector streams with known ground truth.
//!
//! Primary dark counts arrive as a homogeneous Poisson process. Every
//! registered detection may trigger one afterpulse after a power-law delay,
//! and afterpulses may trigger further afterpulses. A non-paralyzable dead
//! time follows each registered detection. In gated mode event times are
//! pushed to the next gate boundary and each gate registers at most once.
//!
//! Random draws are consumed in a fixed order: all primary arrival gaps
//! first, then per registered detection (in time order) one Bernoulli draw
//! and, on success, one delay draw.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fs;
use std::path::Path;

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timestamps::{
    encode_timestamps, sidecar_path, AcquisitionMeta, AcquisitionMode, TickFormat,
    TimestampSeries,
};

/// How the afterpulse delay law behaves past the cutoff `t_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailCut {
    /// Delays beyond `t_c` are recorded at `t_c` (right-censoring).
    #[default]
    Clamp,
    /// Delays follow the power law conditioned on `[x_min, t_c]`.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Primary dark-count rate, events per ns.
    pub dark_rate: f64,
    pub afterpulse_prob: f64,
    pub ap_alpha: f64,
    pub ap_xmin_ns: f64,
    pub dead_time_ns: u64,
    pub mode: AcquisitionMode,
    #[serde(default)]
    pub gate_period_ns: Option<u64>,
    pub duration_ns: f64,
    pub seed: u64,
    #[serde(default)]
    pub tail_truncation_ns: Option<f64>,
    #[serde(default)]
    pub tail_cut: TailCut,
    /// When false only primaries can trigger afterpulses.
    #[serde(default = "default_true")]
    pub branching: bool,
    #[serde(default)]
    pub source_label: String,
}

fn default_true() -> bool {
    true
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dark_rate: 1e-3,
            afterpulse_prob: 0.0,
            ap_alpha: 1.2,
            ap_xmin_ns: 1000.0,
            dead_time_ns: 0,
            mode: AcquisitionMode::FreeRun,
            gate_period_ns: None,
            duration_ns: 1e8,
            seed: 0,
            tail_truncation_ns: None,
            tail_cut: TailCut::Clamp,
            branching: true,
            source_label: "sim".into(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dark_rate > 0.0 && self.dark_rate.is_finite()) {
            return bad(format!("dark_rate must be positive, got {}", self.dark_rate));
        }
        if !(0.0..1.0).contains(&self.afterpulse_prob) {
            return bad(format!(
                "afterpulse_prob must lie in [0, 1), got {}",
                self.afterpulse_prob
            ));
        }
        if !(self.ap_alpha > 1.0 && self.ap_alpha.is_finite()) {
            return bad(format!("ap_alpha must exceed 1, got {}", self.ap_alpha));
        }
        if !(self.ap_xmin_ns > 0.0 && self.ap_xmin_ns >= self.dead_time_ns as f64) {
            return bad(format!(
                "ap_xmin_ns must be positive and at least the dead time ({} < {})",
                self.ap_xmin_ns, self.dead_time_ns
            ));
        }
        if !(self.duration_ns > 0.0 && self.duration_ns.is_finite()) {
            return bad(format!("duration_ns must be positive, got {}", self.duration_ns));
        }
        if let Some(tc) = self.tail_truncation_ns {
            if !(tc > self.ap_xmin_ns) {
                return bad(format!("tail truncation {tc} must exceed ap_xmin_ns"));
            }
        }
        self.meta().validate()
    }

    pub fn meta(&self) -> AcquisitionMeta {
        AcquisitionMeta {
            mode: self.mode,
            gate_period_ns: self.gate_period_ns,
            dead_time_ns: self.dead_time_ns,
            source_label: self.source_label.clone(),
        }
    }

    /// Afterpulse delay for a uniform variate `u` in (0, 1), honoring the tail cut.
    pub fn afterpulse_delay(&self, u: f64) -> Result<f64> {
        match (self.tail_truncation_ns, self.tail_cut) {
            (None, _) => draw_pareto(self.ap_alpha, self.ap_xmin_ns, u),
            (Some(tc), TailCut::Clamp) => {
                Ok(draw_pareto(self.ap_alpha, self.ap_xmin_ns, u)?.min(tc))
            }
            (Some(tc), TailCut::Conditional) => {
                draw_pareto_conditional(self.ap_alpha, self.ap_xmin_ns, tc, u)
            }
        }
    }
}

/// Inverse-CDF draw from the tail law `P(X > x) = (x / x_min)^(-(α-1))`.
pub fn draw_pareto(alpha: f64, x_min: f64, u: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(x_min > 0.0) {
        return Err(Error::Parameter(format!("x_min must be positive, got {x_min}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Parameter(format!("u must lie in (0, 1), got {u}")));
    }
    Ok(x_min * u.powf(-1.0 / (alpha - 1.0)))
}

/// Same law conditioned on `X <= t_c`.
pub fn draw_pareto_conditional(alpha: f64, x_min: f64, t_c: f64, u: f64) -> Result<f64> {
    let k = alpha - 1.0;
    let s_c = (t_c / x_min).powf(-k);
    let x = draw_pareto(alpha, x_min, s_c + u * (1.0 - s_c))?;
    Ok(x.min(t_c))
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    can_spawn: bool,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    // Reversed: BinaryHeap pops the earliest time first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time)
    }
}

pub fn simulate(config: &SimConfig) -> Result<TimestampSeries> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gaps = Exp::new(config.dark_rate).map_err(|e| Error::Config(e.to_string()))?;

    let mut primaries = Vec::with_capacity((config.duration_ns * config.dark_rate * 1.05) as usize + 16);
    let mut t = 0.0;
    loop {
        t += gaps.sample(&mut rng);
        if t > config.duration_ns {
            break;
        }
        primaries.push(t);
    }

    let gate = match config.mode {
        AcquisitionMode::Gated => config.gate_period_ns,
        AcquisitionMode::FreeRun => None,
    };
    let limit = config.duration_ns;
    let mut pending: BinaryHeap<Pending> = BinaryHeap::new();
    let mut ticks: Vec<u64> = Vec::with_capacity(primaries.len() * 2);
    let mut last: Option<u64> = None;
    let mut next_primary = 0;

    loop {
        let take_primary = match (primaries.get(next_primary), pending.peek()) {
            (Some(&p), Some(q)) => p <= q.time,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let event = if take_primary {
            next_primary += 1;
            Pending {
                time: primaries[next_primary - 1],
                can_spawn: true,
            }
        } else {
            pending.pop().expect("peeked")
        };

        let tick = match gate {
            Some(g) => (event.time / g as f64).ceil() as u64 * g,
            None => event.time.floor() as u64,
        };
        if tick as f64 > limit {
            continue;
        }
        if let Some(prev) = last {
            if tick < prev + config.dead_time_ns || (gate.is_some() && tick == prev) {
                continue;
            }
        }
        ticks.push(tick);
        last = Some(tick);

        if config.afterpulse_prob > 0.0 && event.can_spawn && rng.random::<f64>() < config.afterpulse_prob {
            let u: f64 = Open01.sample(&mut rng);
            let child = tick as f64 + config.afterpulse_delay(u)?;
            if child <= limit {
                pending.push(Pending {
                    time: child,
                    can_spawn: config.branching,
                });
            }
        }
    }

    TimestampSeries::new(ticks, config.meta())
}

/// Concatenates independently simulated segments end to end, e.g. to build a
/// stream whose dark rate changes partway through.
pub fn simulate_segments(segments: &[SimConfig]) -> Result<TimestampSeries> {
    let first = segments
        .first()
        .ok_or_else(|| Error::Config("no segments".into()))?;
    let mut ticks = Vec::new();
    let mut offset = 0u64;
    for seg in segments {
        let s = simulate(seg)?;
        ticks.extend(s.ticks().iter().map(|t| t + offset));
        offset += seg.duration_ns.ceil() as u64 + 1;
    }
    TimestampSeries::new(ticks, first.meta())
}

/// Sidecar contents for a simulated file: the acquisition descriptor plus the
/// full generating configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(flatten)]
    pub meta: AcquisitionMeta,
    pub simulation: SimConfig,
}

pub fn write_simulation(
    path: &Path,
    series: &TimestampSeries,
    config: &SimConfig,
    format: TickFormat,
) -> Result<()> {
    fs::write(path, encode_timestamps(series.ticks(), format))?;
    let truth = GroundTruth {
        meta: config.meta(),
        simulation: config.clone(),
    };
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(&truth)?)?;
    Ok(())
}

pub fn read_ground_truth(data_path: &Path) -> Result<GroundTruth> {
    Ok(serde_json::from_slice(&fs::read(sidecar_path(data_path))?)?)
}
