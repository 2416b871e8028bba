//! Parameter estimation for the noise models.
//!
//! Two routes are available. The histogram route bins inter-arrival times,
//! then fits a model density by least squares on log-density. The SRA route
//! regresses the log of ranked values against the log of the closed-form rank
//! term, using every sample value. Both carry a multiplicative scale factor.
//!
//! [`applicability_range`] finds the point where data stops following a model
//! curve: the first run of consecutive points exceeding a relative tolerance.

mod lm;

use serde::{Deserialize, Serialize};

pub use lm::{MAX_ITERATIONS, PARAM_TOLERANCE};

use crate::error::{Error, Result};
use crate::models::{
    ModelKind, NoiseModel, PoissonParams, PowerLawParams, SaturatingParams, ScaledModel,
};
use crate::sra::SraCurve;
use crate::timestamps::InterArrivalSeries;

pub const DEFAULT_REL_TOL: f64 = 0.25;
pub const DEFAULT_RUN_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDensity {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_count: usize,
    pub binning: Binning,
    /// Mean of the raw samples, when the histogram was built from samples.
    pub sample_mean: Option<f64>,
}

impl HistogramDensity {
    /// Builds a histogram from precomputed densities, e.g. exact model values.
    pub fn from_densities(bin_edges: Vec<f64>, densities: Vec<f64>, binning: Binning) -> Result<Self> {
        if bin_edges.len() != densities.len() + 1 {
            return Err(Error::Shape {
                left: bin_edges.len(),
                right: densities.len() + 1,
            });
        }
        if bin_edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("bin edges must be strictly increasing".into()));
        }
        if densities.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::Domain("densities must be non-negative".into()));
        }
        Ok(Self {
            counts: vec![0; densities.len()],
            bin_edges,
            densities,
            total_count: 0,
            binning,
            sample_mean: None,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.densities.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        let (lo, hi) = (self.bin_edges[i], self.bin_edges[i + 1]);
        match self.binning {
            Binning::Linear => 0.5 * (lo + hi),
            Binning::Log => (lo * hi).sqrt(),
        }
    }

    pub fn width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    /// `(center, density)` for bins with positive density.
    pub fn occupied(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.bin_count())
            .filter(|&i| self.densities[i] > 0.0)
            .map(|i| (self.center(i), self.densities[i]))
    }

    /// Probability mass covered by the bins (1 for sample histograms).
    pub fn mass(&self) -> f64 {
        (0..self.bin_count()).map(|i| self.densities[i] * self.width(i)).sum()
    }

    fn mean_estimate(&self) -> f64 {
        self.sample_mean.unwrap_or_else(|| {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..self.bin_count() {
                let w = self.densities[i] * self.width(i);
                num += w * self.center(i);
                den += w;
            }
            num / den
        })
    }
}

pub fn histogram_density(
    samples: &InterArrivalSeries,
    bin_count: usize,
    binning: Binning,
) -> Result<HistogramDensity> {
    let xs = samples.intervals();
    if bin_count < 4 {
        return Err(Error::InsufficientData(format!("bin_count {bin_count} < 4")));
    }
    if xs.len() < bin_count {
        return Err(Error::InsufficientData(format!(
            "{} samples for {bin_count} bins",
            xs.len()
        )));
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !(hi > lo) {
        return Err(Error::InsufficientData("all samples are equal".into()));
    }
    let k = bin_count as f64;
    let (bin_edges, locate): (Vec<f64>, Box<dyn Fn(f64) -> f64>) = match binning {
        Binning::Linear => {
            let w = (hi - lo) / k;
            let mut e: Vec<f64> = (0..=bin_count).map(|i| lo + w * i as f64).collect();
            e[bin_count] = hi;
            (e, Box::new(move |x| (x - lo) / w))
        }
        Binning::Log => {
            let step = (hi / lo).ln() / k;
            let mut e: Vec<f64> = (0..=bin_count).map(|i| lo * (step * i as f64).exp()).collect();
            e[0] = lo;
            e[bin_count] = hi;
            (e, Box::new(move |x| (x / lo).ln() / step))
        }
    };
    let mut counts = vec![0u64; bin_count];
    let mut sum = 0.0;
    for &x in xs {
        let mut i = (locate(x).floor().max(0.0) as usize).min(bin_count - 1);
        // Float rounding at an edge: settle on the bin that actually holds x.
        while i > 0 && x < bin_edges[i] {
            i -= 1;
        }
        while i + 1 < bin_count && x >= bin_edges[i + 1] {
            i += 1;
        }
        counts[i] += 1;
        sum += x;
    }
    let total = xs.len();
    let densities = (0..bin_count)
        .map(|i| counts[i] as f64 / (total as f64 * (bin_edges[i + 1] - bin_edges[i])))
        .collect();
    Ok(HistogramDensity {
        bin_edges,
        densities,
        counts,
        total_count: total,
        binning,
        sample_mean: Some(sum / total as f64),
    })
}

/// Maximum-likelihood exponential rate, `1 / mean`.
pub fn estimate_lambda(samples: &InterArrivalSeries) -> Result<PoissonParams> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} interval(s); need at least 2",
            samples.len()
        )));
    }
    PoissonParams::new(1.0 / samples.mean())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApplicabilityRange {
    pub t_lo_ns: f64,
    pub t_hi_ns: f64,
    pub break_detected: bool,
    pub break_point_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(flatten)]
    pub model: ScaledModel,
    pub residual_rms_log: f64,
    pub max_rel_dev: f64,
    pub applicability: ApplicabilityRange,
    pub n_points_used: usize,
}

impl FitResult {
    pub fn kind(&self) -> ModelKind {
        self.model.model.kind()
    }

    /// Fitted power-law exponent, if this is a power-law fit.
    pub fn alpha(&self) -> Option<f64> {
        match self.model.model {
            NoiseModel::PowerLaw(p) => Some(p.alpha),
            _ => None,
        }
    }
}

/// Scans `(x, data, model)` points in increasing `x` and reports the first
/// run of `run_len` consecutive relative deviations above `rel_tol`.
fn scan_compliance<I>(points: I, rel_tol: f64, run_len: usize) -> Result<ApplicabilityRange>
where
    I: IntoIterator<Item = (f64, f64, f64)>,
{
    let mut t_lo = None;
    let mut t_max = f64::NEG_INFINITY;
    let mut run = 0usize;
    let mut run_start = 0.0;
    for (x, data, model) in points {
        if !(model.is_finite() && model > 0.0) {
            continue;
        }
        t_lo.get_or_insert(x);
        t_max = t_max.max(x);
        if ((data - model) / model).abs() > rel_tol {
            if run == 0 {
                run_start = x;
            }
            run += 1;
            if run == run_len {
                return Ok(ApplicabilityRange {
                    t_lo_ns: t_lo.unwrap_or(x),
                    t_hi_ns: run_start,
                    break_detected: true,
                    break_point_ns: Some(run_start),
                });
            }
        } else {
            run = 0;
        }
    }
    let t_lo = t_lo.ok_or_else(|| Error::InsufficientData("no finite model points".into()))?;
    Ok(ApplicabilityRange {
        t_lo_ns: t_lo,
        t_hi_ns: t_max,
        break_detected: false,
        break_point_ns: None,
    })
}

/// Compares an SRA curve with per-rank model values, scanning from the
/// smallest values (rank `N`) towards the largest. Ranks where the model is
/// not finite (rank 1 of a closed-form curve) are skipped.
pub fn applicability_range(
    curve: &SraCurve,
    model_curve: &[f64],
    rel_tol: f64,
    run_len: usize,
) -> Result<ApplicabilityRange> {
    if curve.len() != model_curve.len() {
        return Err(Error::Shape {
            left: curve.len(),
            right: model_curve.len(),
        });
    }
    check_scan_params(rel_tol, run_len)?;
    let xs = curve.values();
    scan_compliance(
        (0..xs.len()).rev().map(|i| (xs[i], xs[i], model_curve[i])),
        rel_tol,
        run_len,
    )
}

fn check_scan_params(rel_tol: f64, run_len: usize) -> Result<()> {
    if !(rel_tol > 0.0) {
        return Err(Error::Parameter(format!("rel_tol must be positive, got {rel_tol}")));
    }
    if run_len < 3 {
        return Err(Error::Parameter(format!("run_len must be at least 3, got {run_len}")));
    }
    Ok(())
}

/// Same scan over histogram bins in increasing time.
pub fn density_applicability(
    hist: &HistogramDensity,
    model: &ScaledModel,
    rel_tol: f64,
    run_len: usize,
) -> Result<ApplicabilityRange> {
    check_scan_params(rel_tol, run_len)?;
    scan_compliance(
        hist.occupied()
            .map(|(t, d)| (t, d, model.density(t).unwrap_or(f64::NAN))),
        rel_tol,
        run_len,
    )
}

/// Least-squares fit of `ln x_n = ln(scale·x_min) + s·ln(N/(n-1))` over ranks
/// `2..=N` with `x_n >= x_min`; the exponent is `α = 1 + 1/s`.
pub fn fit_powerlaw_sra(curve: &SraCurve, x_min: f64) -> Result<FitResult> {
    let big_n = curve.len();
    if big_n < 10 {
        return Err(Error::InsufficientData(format!("SRA fit needs N >= 10, got {big_n}")));
    }
    if !(x_min > 0.0 && x_min.is_finite()) {
        return Err(Error::Parameter(format!("x_min must be positive, got {x_min}")));
    }
    let nf = big_n as f64;
    let xs = curve.values();
    let pts: Vec<(f64, f64)> = (2..=big_n)
        .filter(|&n| xs[n - 1] >= x_min)
        .map(|n| ((nf / (n - 1) as f64).ln(), xs[n - 1].ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} ranks at or above x_min = {x_min}",
            pts.len()
        )));
    }
    let (slope, intercept) = ols(&pts);
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(Error::ModelMismatch(format!(
            "log-log SRA slope {slope} is not positive; data is not heavy-tailed"
        )));
    }
    let alpha = 1.0 + 1.0 / slope;
    let params = PowerLawParams::normalized(alpha, x_min)
        .map_err(|e| Error::ModelMismatch(e.to_string()))?;
    let model = ScaledModel::new(NoiseModel::PowerLaw(params), intercept.exp() / x_min)
        .map_err(|e| Error::ModelMismatch(e.to_string()))?;

    let mut ss = 0.0;
    let mut max_rel: f64 = 0.0;
    for &(lx, ly) in &pts {
        let pred = intercept + slope * lx;
        ss += (ly - pred).powi(2);
        max_rel = max_rel.max((ly - pred).exp_m1().abs());
    }
    let model_curve = model.sra_curve(big_n)?;
    let applicability = applicability_range(curve, &model_curve, DEFAULT_REL_TOL, DEFAULT_RUN_LEN)?;
    Ok(FitResult {
        model,
        residual_rms_log: (ss / pts.len() as f64).sqrt(),
        max_rel_dev: max_rel,
        applicability,
        n_points_used: pts.len(),
    })
}

/// Ordinary least squares `y = intercept + slope·x`, centered for accuracy.
fn ols(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-density shape (without amplitude) and its derivative with respect to
/// the single shape parameter used by the solver.
struct Shape {
    kind: ModelKind,
    x_min: f64,
    sat_amplitude: f64,
}

impl Shape {
    /// Returns `(ln f(t), d ln f / d shape_param)`, amplitude excluded.
    fn eval(&self, shape: f64, t: f64) -> Option<(f64, f64)> {
        match self.kind {
            // shape = ln λ; ln f = ln λ - λ t
            ModelKind::Poisson => {
                let lam = shape.exp();
                Some((shape - lam * t, 1.0 - lam * t))
            }
            // shape = α; ln f = -α ln t
            ModelKind::PowerLaw => Some((-shape * t.ln(), -t.ln())),
            // shape = ln B; ln f = -ln(1 - e^{-Bt})
            ModelKind::Saturating => {
                let b = shape.exp();
                let e = (-b * t).exp();
                let one_minus = -(-b * t).exp_m1();
                if !(one_minus > 0.0) {
                    return None;
                }
                Some((-one_minus.ln(), -(b * t) * e / one_minus))
            }
        }
    }

    fn into_model(self, amp: f64, shape: f64) -> Result<ScaledModel> {
        match self.kind {
            ModelKind::Poisson => {
                ScaledModel::new(NoiseModel::Poisson(PoissonParams::new(shape.exp())?), amp.exp())
            }
            ModelKind::PowerLaw => {
                let p = PowerLawParams::normalized(shape, self.x_min).map_err(|_| {
                    Error::ModelMismatch(format!("fitted power-law exponent {shape} <= 1"))
                })?;
                ScaledModel::new(NoiseModel::PowerLaw(p), amp.exp() / p.c)
            }
            ModelKind::Saturating => {
                let p = SaturatingParams::new(self.sat_amplitude, shape.exp())?;
                ScaledModel::new(NoiseModel::Saturating(p), amp.exp() / self.sat_amplitude)
            }
        }
    }
}

/// Fits `kind` to the occupied bins of `hist` by least squares on
/// log-density. Empty bins are ignored. `init` overrides the data-driven
/// starting point.
pub fn fit_density(
    hist: &HistogramDensity,
    kind: ModelKind,
    init: Option<&ScaledModel>,
) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = hist.occupied().map(|(t, d)| (t, d.ln())).collect();
    if pts.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "{} non-empty bins; need at least 6",
            pts.len()
        )));
    }
    let x_min = hist.bin_edges[0];
    let tail = &pts[pts.len() - (pts.len() / 4).max(1)..];
    let tail_mean = tail.iter().map(|p| p.1.exp()).sum::<f64>() / tail.len() as f64;

    let sat_amplitude = match init.map(|m| m.model) {
        Some(NoiseModel::Saturating(p)) => p.a,
        _ => tail_mean,
    };
    let shape = Shape {
        kind,
        x_min,
        sat_amplitude,
    };
    let shape0 = match (kind, init.map(|m| m.model)) {
        (ModelKind::Poisson, Some(NoiseModel::Poisson(p))) => p.lambda.ln(),
        (ModelKind::PowerLaw, Some(NoiseModel::PowerLaw(p))) => p.alpha,
        (ModelKind::Saturating, Some(NoiseModel::Saturating(p))) => p.b.ln(),
        (ModelKind::Poisson, _) => (1.0 / hist.mean_estimate()).ln(),
        (ModelKind::PowerLaw, _) => {
            let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, y)| (t.ln(), y)).collect();
            -ols(&logs).0
        }
        (ModelKind::Saturating, _) => (1.0 / pts[0].0).ln(),
    };
    // Best amplitude for a fixed shape is the mean log offset.
    let amp0 = pts
        .iter()
        .filter_map(|&(t, y)| shape.eval(shape0, t).map(|(f, _)| y - f))
        .sum::<f64>()
        / pts.len() as f64;

    let out = lm::minimize(
        |th| {
            let mut r = Vec::with_capacity(pts.len());
            let mut j = Vec::with_capacity(pts.len());
            for &(t, y) in &pts {
                let (f, df) = shape.eval(th[1], t)?;
                r.push(th[0] + f - y);
                j.push(vec![1.0, df]);
            }
            Some((r, j))
        },
        &[amp0, shape0],
        MAX_ITERATIONS,
        PARAM_TOLERANCE,
    );

    if !out.cost.is_finite() {
        return Err(Error::Divergence);
    }
    let iterations = out.iterations;
    let converged = out.converged;
    let model = shape.into_model(out.params[0], out.params[1])?;
    let result = summarize_density_fit(hist, model, &pts)?;
    if !converged {
        return Err(Error::Convergence {
            iterations,
            best: Box::new(result),
        });
    }
    Ok(result)
}

fn summarize_density_fit(
    hist: &HistogramDensity,
    model: ScaledModel,
    pts: &[(f64, f64)],
) -> Result<FitResult> {
    let mut ss = 0.0;
    let mut max_rel: f64 = 0.0;
    for &(t, y) in pts {
        let m = model.density(t)?;
        ss += (y - m.ln()).powi(2);
        max_rel = max_rel.max(((y.exp() - m) / m).abs());
    }
    Ok(FitResult {
        model,
        residual_rms_log: (ss / pts.len() as f64).sqrt(),
        max_rel_dev: max_rel,
        applicability: density_applicability(hist, &model, DEFAULT_REL_TOL, DEFAULT_RUN_LEN)?,
        n_points_used: pts.len(),
    })
}

/// RMS of log-density residuals over occupied bins with centers in
/// `[t_lo, t_hi)`. `None` when no bin qualifies.
pub fn region_rms_log(hist: &HistogramDensity, model: &ScaledModel, t_lo: f64, t_hi: f64) -> Option<f64> {
    let mut ss = 0.0;
    let mut n = 0usize;
    for (t, d) in hist.occupied().filter(|(t, _)| *t >= t_lo && *t < t_hi) {
        let m = model.density(t).ok()?;
        ss += (d.ln() - m.ln()).powi(2);
        n += 1;
    }
    (n > 0).then(|| (ss / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{poisson_density, powerlaw_sra};
    use crate::sra::build_sra;
    use approx::assert_relative_eq;

    fn series(v: Vec<f64>) -> InterArrivalSeries {
        InterArrivalSeries::from_samples(v).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(estimate_lambda(&series(vec![2.0; 10])).unwrap().lambda, 0.5);
        assert!(matches!(
            estimate_lambda(&series(vec![3.0])),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn histogram_preconditions() {
        assert!(matches!(
            histogram_density(&series(vec![1.0, 2.0, 3.0]), 4, Binning::Linear),
            Err(Error::InsufficientData(_))
        ));
        assert!(histogram_density(&series(vec![1.0; 10]), 3, Binning::Linear).is_err());
    }

    #[test]
    fn histogram_counts_every_sample() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.37).collect();
        for binning in [Binning::Linear, Binning::Log] {
            let h = histogram_density(&series(xs.clone()), 17, binning).unwrap();
            assert_eq!(h.counts.iter().sum::<u64>(), 1000);
            assert_relative_eq!(h.mass(), 1.0, epsilon = 1e-12);
            assert_eq!(h.bin_edges[0], 0.37);
            assert_eq!(h.bin_edges[17], 370.0);
        }
    }

    #[test]
    fn exact_curve_recovers_alpha() {
        let p = PowerLawParams::new(1.0, 2.0, 1.0).unwrap();
        let n = 500;
        let mut v: Vec<f64> = (2..=n).map(|k| powerlaw_sra(&p, n, k).unwrap()).collect();
        v.insert(0, 2.0 * v[0]);
        let curve = SraCurve::from_descending(v).unwrap();
        let fit = fit_powerlaw_sra(&curve, 1.0).unwrap();
        assert!((fit.alpha().unwrap() - 2.0).abs() < 1e-9);
        assert_relative_eq!(fit.model.scale, 1.0, epsilon = 1e-9);
        assert!(fit.residual_rms_log < 1e-9);
        assert!(!fit.applicability.break_detected);
    }

    #[test]
    fn sra_fit_rejects_light_or_short_data() {
        let short = build_sra(&[1.0; 5]).unwrap();
        assert!(matches!(fit_powerlaw_sra(&short, 1.0), Err(Error::InsufficientData(_))));
        let flat = build_sra(&[3.0; 50]).unwrap();
        assert!(matches!(fit_powerlaw_sra(&flat, 1.0), Err(Error::ModelMismatch(_))));
    }

    #[test]
    fn exact_poisson_density_recovered() {
        let lam = 2.5e-3;
        let p = PoissonParams::new(lam).unwrap();
        let edges: Vec<f64> = (0..=60).map(|i| 10.0 * 1.08f64.powi(i)).collect();
        let centers: Vec<f64> = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
        let dens = centers.iter().map(|&t| poisson_density(&p, t).unwrap()).collect();
        let h = HistogramDensity::from_densities(edges, dens, Binning::Log).unwrap();
        let fit = fit_density(&h, ModelKind::Poisson, None).unwrap();
        match fit.model.model {
            NoiseModel::Poisson(q) => assert!(((q.lambda - lam) / lam).abs() < 1e-6),
            _ => unreachable!(),
        }
        assert!((fit.model.scale - 1.0).abs() < 1e-6);
        assert!(fit.residual_rms_log < 1e-8);
    }

    #[test]
    fn empty_histogram_rejected() {
        let h = HistogramDensity::from_densities(
            (0..=10).map(f64::from).collect(),
            vec![0.0; 10],
            Binning::Linear,
        )
        .unwrap();
        for kind in ModelKind::ALL {
            assert!(matches!(fit_density(&h, kind, None), Err(Error::InsufficientData(_))));
        }
    }

    #[test]
    fn applicability_rules() {
        let curve = build_sra(&(1..=50).map(f64::from).collect::<Vec<_>>()).unwrap();
        let exact = curve.values().to_vec();
        let r = applicability_range(&curve, &exact, 0.25, 5).unwrap();
        assert!(!r.break_detected);
        assert_eq!((r.t_lo_ns, r.t_hi_ns), (1.0, 50.0));

        // data = model·(1 + 2·tol) everywhere -> break at the first scanned rank
        let model: Vec<f64> = exact.iter().map(|x| x / 1.5).collect();
        let r = applicability_range(&curve, &model, 0.25, 5).unwrap();
        assert!(r.break_detected);
        assert_eq!(r.break_point_ns, Some(1.0));

        assert!(matches!(
            applicability_range(&curve, &exact[1..], 0.25, 5),
            Err(Error::Shape { .. })
        ));
        assert!(applicability_range(&curve, &exact, 0.0, 5).is_err());
        assert!(applicability_range(&curve, &exact, 0.25, 2).is_err());
    }

    #[test]
    fn fit_result_json_shape() {
        let p = PowerLawParams::new(1.0, 2.0, 1.0).unwrap();
        let mut v: Vec<f64> = (2..=100).map(|k| powerlaw_sra(&p, 100, k).unwrap()).collect();
        v.insert(0, 2.0 * v[0]);
        let fit = fit_powerlaw_sra(&SraCurve::from_descending(v).unwrap(), 1.0).unwrap();
        let j = serde_json::to_value(&fit).unwrap();
        for key in ["model", "params", "scale", "residual_rms_log", "max_rel_dev", "applicability", "n_points_used"] {
            assert!(j.get(key).is_some(), "missing {key}");
        }
        for key in ["t_lo_ns", "t_hi_ns", "break_detected", "break_point_ns"] {
            assert!(j["applicability"].get(key).is_some(), "missing {key}");
        }
        let back: FitResult = serde_json::from_value(j).unwrap();
        assert_eq!(back, fit);
    }
}
