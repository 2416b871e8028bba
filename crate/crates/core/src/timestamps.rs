//! Detector time-tag ingestion.
//!
//! Two headerless on-disk layouts are supported: UTF-8 text with one decimal
//! tick per line (LF or CRLF), and packed little-endian `u64`. Ticks are
//! integer nanoseconds. Acquisition metadata lives in a JSON sidecar next to
//! the data file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionMode {
    #[default]
    FreeRun,
    Gated,
}

/// Acquisition settings carried alongside a tick stream.
///
/// Serialized form is the sidecar descriptor:
/// `{"mode","gate_period_ns","dead_time_ns","source_label"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AcquisitionMeta {
    pub mode: AcquisitionMode,
    #[serde(default)]
    pub gate_period_ns: Option<u64>,
    #[serde(default)]
    pub dead_time_ns: u64,
    #[serde(default)]
    pub source_label: String,
}

impl AcquisitionMeta {
    pub fn free_run(dead_time_ns: u64, source_label: impl Into<String>) -> Self {
        Self {
            mode: AcquisitionMode::FreeRun,
            gate_period_ns: None,
            dead_time_ns,
            source_label: source_label.into(),
        }
    }

    pub fn gated(gate_period_ns: u64, dead_time_ns: u64, source_label: impl Into<String>) -> Self {
        Self {
            mode: AcquisitionMode::Gated,
            gate_period_ns: Some(gate_period_ns),
            dead_time_ns,
            source_label: source_label.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, self.gate_period_ns) {
            (AcquisitionMode::Gated, Some(p)) if p > 0 => Ok(()),
            (AcquisitionMode::Gated, _) => Err(Error::Config(
                "gated mode requires gate_period_ns > 0".into(),
            )),
            (AcquisitionMode::FreeRun, Some(_)) => Err(Error::Config(
                "gate_period_ns is only meaningful in gated mode".into(),
            )),
            (AcquisitionMode::FreeRun, None) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TickFormat {
    TextLines,
    BinaryLe64,
}

impl TickFormat {
    /// `.bin` selects the packed binary layout; anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => TickFormat::BinaryLe64,
            _ => TickFormat::TextLines,
        }
    }
}

/// Non-decreasing detector event times in integer nanoseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimestampSeries {
    ticks: Vec<u64>,
    meta: AcquisitionMeta,
}

impl TimestampSeries {
    pub fn new(ticks: Vec<u64>, meta: AcquisitionMeta) -> Result<Self> {
        if let Some(index) = first_decrease(&ticks) {
            return Err(Error::Ordering { index });
        }
        Ok(Self { ticks, meta })
    }

    pub fn ticks(&self) -> &[u64] {
        &self.ticks
    }

    pub fn meta(&self) -> &AcquisitionMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn with_meta(mut self, meta: AcquisitionMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn into_ticks(self) -> Vec<u64> {
        self.ticks
    }
}

fn first_decrease(ticks: &[u64]) -> Option<usize> {
    ticks.windows(2).position(|w| w[1] < w[0]).map(|i| i + 1)
}

/// Positive gaps between consecutive detections, in nanoseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct InterArrivalSeries {
    intervals: Vec<f64>,
    source_meta: AcquisitionMeta,
}

impl InterArrivalSeries {
    pub fn new(intervals: Vec<f64>, source_meta: AcquisitionMeta) -> Result<Self> {
        if let Some(i) = intervals.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Domain(format!(
                "interval {i} = {} is not a positive finite duration",
                intervals[i]
            )));
        }
        Ok(Self {
            intervals,
            source_meta,
        })
    }

    /// Wraps raw samples (e.g. synthetic draws) with default metadata.
    pub fn from_samples(intervals: Vec<f64>) -> Result<Self> {
        Self::new(intervals, AcquisitionMeta::default())
    }

    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    pub fn meta(&self) -> &AcquisitionMeta {
        &self.source_meta
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.intervals.iter().sum::<f64>() / self.intervals.len() as f64
    }
}

pub fn parse_timestamps(raw: &[u8], format: TickFormat) -> Result<TimestampSeries> {
    let ticks = match format {
        TickFormat::TextLines => parse_text(raw)?,
        TickFormat::BinaryLe64 => parse_binary(raw)?,
    };
    TimestampSeries::new(ticks, AcquisitionMeta::default())
}

fn parse_text(raw: &[u8]) -> Result<Vec<u64>> {
    let text = std::str::from_utf8(raw).map_err(|e| Error::Parse {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    let mut ticks = Vec::with_capacity(raw.len() / 8);
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let token = line.trim_end_matches('\n').trim_end_matches('\r');
        if !token.is_empty() {
            let tick = token.parse::<u64>().map_err(|e| Error::Parse {
                offset,
                message: format!("{token:?}: {e}"),
            })?;
            ticks.push(tick);
        }
        offset += line.len();
    }
    Ok(ticks)
}

fn parse_binary(raw: &[u8]) -> Result<Vec<u64>> {
    let chunks = raw.chunks_exact(8);
    if !chunks.remainder().is_empty() {
        return Err(Error::Parse {
            offset: raw.len() - chunks.remainder().len(),
            message: format!("truncated record ({} trailing bytes)", chunks.remainder().len()),
        });
    }
    Ok(chunks
        .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

pub fn encode_timestamps(ticks: &[u64], format: TickFormat) -> Vec<u8> {
    match format {
        TickFormat::TextLines => {
            let mut out = Vec::with_capacity(ticks.len() * 12);
            for t in ticks {
                writeln!(out, "{t}").expect("write to Vec");
            }
            out
        }
        TickFormat::BinaryLe64 => ticks.iter().flat_map(|t| t.to_le_bytes()).collect(),
    }
}

/// Sidecar path for a data file: `<file>.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Reads ticks from `path`, picking up the sidecar descriptor when present.
pub fn read_series(path: &Path, format: TickFormat) -> Result<TimestampSeries> {
    let raw = fs::read(path)?;
    let series = parse_timestamps(&raw, format)?;
    let side = sidecar_path(path);
    if side.exists() {
        let meta: AcquisitionMeta = serde_json::from_slice(&fs::read(side)?)?;
        meta.validate()?;
        Ok(series.with_meta(meta))
    } else {
        Ok(series)
    }
}

pub fn write_series(path: &Path, series: &TimestampSeries, format: TickFormat) -> Result<()> {
    fs::write(path, encode_timestamps(series.ticks(), format))?;
    Ok(())
}

pub fn inter_arrivals(series: &TimestampSeries, dedup: bool) -> Result<InterArrivalSeries> {
    let ticks = series.ticks();
    if ticks.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} tick(s); need at least 2",
            ticks.len()
        )));
    }
    let mut intervals = Vec::with_capacity(ticks.len() - 1);
    for (k, w) in ticks.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap == 0 {
            if dedup {
                continue;
            }
            return Err(Error::DuplicateTick { index: k + 1 });
        }
        intervals.push(gap as f64);
    }
    if intervals.is_empty() {
        return Err(Error::InsufficientData(
            "fewer than 2 distinct ticks after dedup".into(),
        ));
    }
    InterArrivalSeries::new(intervals, series.meta().clone())
}
