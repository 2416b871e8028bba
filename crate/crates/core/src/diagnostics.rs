//! Nonparametric drift monitoring with relative SRA curves.
//!
//! A probe window is compared with a baseline by resampling both SRA curves
//! to a common length and taking the largest relative gap,
//! `max |probe_k - baseline_k| / (baseline_k + ε)`. Thresholds come from the
//! baseline itself: repeated comparisons of disjoint random halves give a
//! null distribution whose 95th percentile is the alarm level.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sra::{build_sra, relative_sra, RelativeSraCurve, DEFAULT_COMPARISON_LEN};
use crate::timestamps::{InterArrivalSeries, TimestampSeries};

pub const DEFAULT_EPSILON_NS: f64 = 1.0;
pub const DEFAULT_CALIBRATION_RUNS: usize = 100;
pub const CALIBRATION_QUANTILE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub window_size: usize,
    pub stride: usize,
    pub resample_len: usize,
    pub threshold: f64,
    pub epsilon: f64,
}

impl MonitorConfig {
    pub fn new(window_size: usize, stride: usize, threshold: f64) -> Result<Self> {
        let c = Self {
            window_size,
            stride,
            resample_len: DEFAULT_COMPARISON_LEN,
            threshold,
            epsilon: DEFAULT_EPSILON_NS,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_size < 2 {
            return Err(Error::Config("window_size must be at least 2".into()));
        }
        if self.stride == 0 || self.stride > self.window_size {
            return Err(Error::Config(format!(
                "stride must lie in 1..={}, got {}",
                self.window_size, self.stride
            )));
        }
        if self.resample_len < 2 {
            return Err(Error::Config("resample_len must be at least 2".into()));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::Config(format!("threshold must be positive, got {}", self.threshold)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Drift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub relative: RelativeSraCurve,
    pub distance: f64,
    pub verdict: Verdict,
    /// First and last tick of the probe window, when it came from a stream.
    pub window_span: Option<(u64, u64)>,
    pub baseline_id: String,
}

/// Sup-norm relative distance of a relative SRA curve.
pub fn relative_distance(curve: &RelativeSraCurve, epsilon: f64) -> f64 {
    curve
        .points()
        .map(|(b, d)| d.abs() / (b + epsilon))
        .fold(0.0, f64::max)
}

fn distance_between(probe: &[f64], baseline: &[f64], config: &MonitorConfig) -> Result<(RelativeSraCurve, f64)> {
    let rel = relative_sra(&build_sra(probe)?, &build_sra(baseline)?, config.resample_len)?;
    let d = relative_distance(&rel, config.epsilon);
    Ok((rel, d))
}

fn baseline_id(baseline: &InterArrivalSeries) -> String {
    let label = &baseline.meta().source_label;
    if label.is_empty() {
        "baseline".into()
    } else {
        label.clone()
    }
}

pub fn compare_windows(
    probe: &InterArrivalSeries,
    baseline: &InterArrivalSeries,
    config: &MonitorConfig,
) -> Result<DiagnosticReport> {
    config.validate()?;
    let (relative, distance) = distance_between(probe.intervals(), baseline.intervals(), config)?;
    let id = baseline_id(baseline);
    Ok(DiagnosticReport {
        relative: relative.with_labels(id.clone(), "probe"),
        distance,
        verdict: if distance > config.threshold {
            Verdict::Drift
        } else {
            Verdict::Stable
        },
        window_span: None,
        baseline_id: id,
    })
}

/// Null distances from `runs` comparisons of two disjoint random subsets of
/// the baseline, each `min(subset_size, N/2)` long.
pub fn null_distances(
    baseline: &InterArrivalSeries,
    subset_size: usize,
    runs: usize,
    seed: u64,
    config: &MonitorConfig,
) -> Result<Vec<f64>> {
    let xs = baseline.intervals();
    let size = subset_size.min(xs.len() / 2);
    if size < 2 || runs == 0 {
        return Err(Error::InsufficientData(format!(
            "calibration needs two subsets of at least 2 intervals (baseline has {})",
            xs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    let mut a = Vec::with_capacity(size);
    let mut b = Vec::with_capacity(size);
    let mut out = Vec::with_capacity(runs);
    for _ in 0..runs {
        idx.shuffle(&mut rng);
        a.clear();
        b.clear();
        a.extend(idx[..size].iter().map(|&i| xs[i]));
        b.extend(idx[size..2 * size].iter().map(|&i| xs[i]));
        out.push(distance_between(&a, &b, config)?.1);
    }
    Ok(out)
}

/// Nearest-rank quantile.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Drift threshold at the 95th percentile of the baseline null distribution.
pub fn calibrate_threshold(
    baseline: &InterArrivalSeries,
    subset_size: usize,
    runs: usize,
    seed: u64,
    config: &MonitorConfig,
) -> Result<f64> {
    let null = null_distances(baseline, subset_size, runs, seed, config)?;
    Ok(quantile(&null, CALIBRATION_QUANTILE))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RollingDiagnosis {
    pub reports: Vec<DiagnosticReport>,
    /// Set when the stream was too short for a single window.
    pub note: Option<String>,
}

/// Slides a window of `window_size` inter-arrivals along the stream by
/// `stride`, one report per position in order. Zero gaps are dropped.
pub fn rolling_diagnose(
    stream: &TimestampSeries,
    baseline: &InterArrivalSeries,
    config: &MonitorConfig,
) -> Result<RollingDiagnosis> {
    config.validate()?;
    let ticks = stream.ticks();
    let mut gaps = Vec::with_capacity(ticks.len().saturating_sub(1));
    let mut ends = Vec::with_capacity(gaps.capacity());
    for w in ticks.windows(2) {
        if w[1] > w[0] {
            gaps.push((w[1] - w[0]) as f64);
            ends.push((w[0], w[1]));
        }
    }
    let w = config.window_size;
    if gaps.len() < w {
        return Ok(RollingDiagnosis {
            reports: Vec::new(),
            note: Some(format!(
                "stream has {} usable intervals, window needs {w}",
                gaps.len()
            )),
        });
    }
    let baseline_sra = build_sra(baseline.intervals())?;
    let id = baseline_id(baseline);
    let mut reports = Vec::new();
    let mut start = 0;
    while start + w <= gaps.len() {
        let probe = build_sra(&gaps[start..start + w])?;
        let relative = relative_sra(&probe, &baseline_sra, config.resample_len)?
            .with_labels(id.clone(), format!("window@{}", ends[start].0));
        let distance = relative_distance(&relative, config.epsilon);
        reports.push(DiagnosticReport {
            relative,
            distance,
            verdict: if distance > config.threshold {
                Verdict::Drift
            } else {
                Verdict::Stable
            },
            window_span: Some((ends[start].0, ends[start + w - 1].1)),
            baseline_id: id.clone(),
        });
        start += config.stride;
    }
    Ok(RollingDiagnosis { reports, note: None })
}

pub fn write_reports_jsonl<W: Write>(reports: &[DiagnosticReport], mut out: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_reports_jsonl<R: BufRead>(input: R) -> Result<Vec<DiagnosticReport>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
