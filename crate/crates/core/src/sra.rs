//! Sequences of ranged amplitudes.
//!
//! An [`SraCurve`] is a sample sorted in descending order, indexed
//! `n = 1..=N` with `n = 1` the largest value. Nothing is binned away, so the
//! curve carries every sample value. Its link to the empirical distribution
//! function is `F(x_n) = (N + 1 - n) / N`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default resample length for curve comparison.
pub const DEFAULT_COMPARISON_LEN: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SraCurve {
    values: Vec<f64>,
    unit_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcdfPoint {
    pub x: f64,
    pub f: f64,
}

impl SraCurve {
    /// Wraps values that are already in descending order.
    pub fn from_descending(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("empty SRA curve".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("value at rank {} is not finite", i + 1)));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Domain(format!(
                "values increase between ranks {} and {}",
                i + 1,
                i + 2
            )));
        }
        Ok(Self {
            values,
            unit_label: "ns".into(),
        })
    }

    pub fn with_unit(mut self, unit_label: impl Into<String>) -> Self {
        self.unit_label = unit_label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a curve holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    /// Value at 1-based rank `n`.
    pub fn at(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.len() {
            return Err(Error::Bounds {
                index: n,
                len: self.len(),
            });
        }
        Ok(self.values[n - 1])
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Ascending view of the same curve.
    pub fn ascending(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().rev().copied()
    }

    /// `(n, x_n)` pairs, `n` starting at 1.
    pub fn ranked(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &x)| (i + 1, x))
    }
}

pub fn build_sra(samples: &[f64]) -> Result<SraCurve> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("sample {i} is not finite")));
    }
    let mut values = samples.to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SraCurve {
        values,
        unit_label: "ns".into(),
    })
}

/// Empirical CDF at rank `n`: `(x_n, (N + 1 - n) / N)`.
///
/// With tied values this reports the probability for the given rank, not the
/// largest rank sharing the value.
pub fn ecdf_from_sra(curve: &SraCurve, n: usize) -> Result<EcdfPoint> {
    let x = curve.at(n)?;
    let big_n = curve.len() as f64;
    Ok(EcdfPoint {
        x,
        f: (big_n + 1.0 - n as f64) / big_n,
    })
}

/// Resamples to `m` points by linear interpolation against the rank fraction
/// `(n - 1) / (N - 1)`. Both endpoints are kept exactly and `m == N` returns
/// the input unchanged.
pub fn resample_sra(curve: &SraCurve, m: usize) -> Result<SraCurve> {
    let n = curve.len();
    if m < 2 || n < 2 {
        return Err(Error::InsufficientData(format!(
            "resampling needs m >= 2 and N >= 2 (m = {m}, N = {n})"
        )));
    }
    let xs = &curve.values;
    let span = (n - 1) as f64;
    let denom = (m - 1) as f64;
    let mut values = Vec::with_capacity(m);
    for k in 0..m {
        if k == m - 1 {
            values.push(xs[n - 1]);
            continue;
        }
        let pos = k as f64 * span / denom;
        let i = (pos.floor() as usize).min(n - 2);
        let w = pos - i as f64;
        let v = if w == 0.0 {
            xs[i]
        } else {
            xs[i] * (1.0 - w) + xs[i + 1] * w
        };
        values.push(v);
    }
    // Rounding in the convex combination can break ties by one ulp.
    for i in 1..m {
        if values[i] > values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    Ok(SraCurve {
        values,
        unit_label: curve.unit_label.clone(),
    })
}

/// Pointwise difference of two SRA curves against the baseline curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeSraCurve {
    pub baseline: Vec<f64>,
    pub delta: Vec<f64>,
    pub baseline_label: String,
    pub probe_label: String,
}

impl RelativeSraCurve {
    pub fn len(&self) -> usize {
        self.baseline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.baseline.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.baseline.iter().copied().zip(self.delta.iter().copied())
    }

    pub fn with_labels(mut self, baseline: impl Into<String>, probe: impl Into<String>) -> Self {
        self.baseline_label = baseline.into();
        self.probe_label = probe.into();
        self
    }
}

pub fn relative_sra(probe: &SraCurve, baseline: &SraCurve, m: usize) -> Result<RelativeSraCurve> {
    let p = resample_sra(probe, m)?;
    let b = resample_sra(baseline, m)?;
    let delta = p.values.iter().zip(&b.values).map(|(p, b)| p - b).collect();
    Ok(RelativeSraCurve {
        baseline: b.values,
        delta,
        baseline_label: "baseline".into(),
        probe_label: "probe".into(),
    })
}

pub fn write_sra_csv<W: Write>(curve: &SraCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "x"])?;
    for (n, x) in curve.ranked() {
        w.write_record([n.to_string(), x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sra_csv<R: Read>(input: R) -> Result<SraCurve> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::new();
    for (i, rec) in r.deserialize::<(usize, f64)>().enumerate() {
        let (n, x) = rec?;
        if n != i + 1 {
            return Err(Error::Parse {
                offset: i,
                message: format!("expected rank {}, found {n}", i + 1),
            });
        }
        values.push(x);
    }
    SraCurve::from_descending(values)
}

pub fn write_relative_csv<W: Write>(curve: &RelativeSraCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["baseline", "delta"])?;
    for (b, d) in curve.points() {
        w.write_record([b.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_relative_csv<R: Read>(input: R) -> Result<RelativeSraCurve> {
    let mut r = csv::Reader::from_reader(input);
    let mut baseline = Vec::new();
    let mut delta = Vec::new();
    for rec in r.deserialize::<(f64, f64)>() {
        let (b, d) = rec?;
        baseline.push(b);
        delta.push(d);
    }
    Ok(RelativeSraCurve {
        baseline,
        delta,
        baseline_label: "baseline".into(),
        probe_label: "probe".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(v: &[f64]) -> SraCurve {
        build_sra(v).unwrap()
    }

    #[test]
    fn sorts_descending() {
        assert_eq!(curve(&[3.0, 1.0, 2.0]).values(), &[3.0, 2.0, 1.0]);
        assert_eq!(curve(&[5.0, 5.0, 5.0]).values(), &[5.0, 5.0, 5.0]);
        assert!(matches!(build_sra(&[]), Err(Error::InsufficientData(_))));
        assert!(build_sra(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn ecdf_examples() {
        let c = curve(&(1..=100).map(f64::from).collect::<Vec<_>>());
        assert_eq!(ecdf_from_sra(&c, 1).unwrap().f, 1.0);
        assert_eq!(ecdf_from_sra(&c, 100).unwrap().f, 0.01);
        assert!(matches!(ecdf_from_sra(&c, 0), Err(Error::Bounds { .. })));
        assert!(matches!(ecdf_from_sra(&c, 101), Err(Error::Bounds { .. })));

        let c = curve(&[8.0, 6.0, 6.0, 2.0]);
        assert_eq!(ecdf_from_sra(&c, 2).unwrap(), EcdfPoint { x: 6.0, f: 0.75 });
    }

    #[test]
    fn resample_examples() {
        let c = curve(&[4.0, 2.0]);
        assert_eq!(resample_sra(&c, 3).unwrap().values(), &[4.0, 3.0, 2.0]);

        let c = curve(&[9.0, 7.5, 7.5, 3.25, 1.0, 0.5]);
        assert_eq!(resample_sra(&c, c.len()).unwrap(), c);

        assert!(resample_sra(&c, 1).is_err());
        assert!(resample_sra(&curve(&[1.0]), 5).is_err());
    }

    #[test]
    fn relative_identity_and_shift() {
        let a = curve(&[10.0, 7.0, 3.0, 1.0, 0.1]);
        let r = relative_sra(&a, &a, 9).unwrap();
        assert!(r.delta.iter().all(|&d| d == 0.0));

        let shifted = curve(&a.values().iter().map(|x| x + 2.5).collect::<Vec<_>>());
        let r = relative_sra(&shifted, &a, 9).unwrap();
        assert_eq!(r.len(), 9);
        for d in &r.delta {
            approx::assert_relative_eq!(*d, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let c = curve(&[0.1, 1e-7, 123456789.125, 2.0 / 3.0]);
        let mut buf = Vec::new();
        write_sra_csv(&c, &mut buf).unwrap();
        assert!(buf.starts_with(b"n,x\n"));
        assert_eq!(read_sra_csv(buf.as_slice()).unwrap(), c);

        let r = relative_sra(&c, &c, 5).unwrap();
        let mut buf = Vec::new();
        write_relative_csv(&r, &mut buf).unwrap();
        assert!(buf.starts_with(b"baseline,delta\n"));
        assert_eq!(read_relative_csv(buf.as_slice()).unwrap(), r);
    }
}
