//! Noise-model hypotheses for detector inter-arrival times.
//!
//! * Poisson dark counts: density `λ·exp(-λx)`, SRA `x_n = ln(N/(n-1)) / λ`.
//! * Power-law afterpulses: density `C·t^(-α)` on `[x_min, ∞)`,
//!   SRA `x_n = x_min·(N/(n-1))^(1/(α-1))`.
//! * Saturating: `A / (1 - exp(-B·t))`, which solves
//!   `dP/dt = a·P + b·P²` with `a = B`, `b = -B/A`.
//!
//! Closed-form SRA values diverge at `n = 1`; those evaluations are errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    /// Events per nanosecond.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
    pub x_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturatingParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_rank(big_n: usize, n: usize) -> Result<()> {
    if n == 0 || n > big_n {
        return Err(Error::Bounds { index: n, len: big_n });
    }
    if n == 1 {
        return Err(Error::Divergence);
    }
    Ok(())
}

impl PoissonParams {
    pub fn new(lambda: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        Ok(Self { lambda })
    }
}

impl PowerLawParams {
    pub fn new(c: f64, alpha: f64, x_min: f64) -> Result<Self> {
        positive("C", c)?;
        positive("x_min", x_min)?;
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
        }
        Ok(Self { c, alpha, x_min })
    }

    /// Amplitude making the density integrate to one over `[x_min, ∞)`.
    pub fn normalized(alpha: f64, x_min: f64) -> Result<Self> {
        Self::new(1.0, alpha, x_min)
            .map(|p| Self { c: (alpha - 1.0) * x_min.powf(alpha - 1.0), ..p })
    }

    /// `∫_{x_min}^∞ C t^(-α) dt`.
    pub fn tail_mass(&self) -> f64 {
        self.c * self.x_min.powf(1.0 - self.alpha) / (self.alpha - 1.0)
    }
}

impl SaturatingParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        positive("A", a)?;
        positive("B", b)?;
        Ok(Self { a, b })
    }

    /// Coefficients `(a, b)` of `dP/dt = a·P + b·P²`.
    pub fn ode_coefficients(&self) -> (f64, f64) {
        (self.b, -self.b / self.a)
    }
}

pub fn poisson_density(p: &PoissonParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("poisson density needs x >= 0, got {x}")));
    }
    Ok(p.lambda * (-p.lambda * x).exp())
}

pub fn poisson_sra(p: &PoissonParams, big_n: usize, n: usize) -> Result<f64> {
    check_rank(big_n, n)?;
    Ok((big_n as f64 / (n - 1) as f64).ln() / p.lambda)
}

pub fn powerlaw_density(p: &PowerLawParams, t: f64) -> Result<f64> {
    if !(t >= p.x_min) {
        return Err(Error::Domain(format!(
            "power-law density needs t >= x_min = {}, got {t}",
            p.x_min
        )));
    }
    Ok(p.c * t.powf(-p.alpha))
}

pub fn powerlaw_sra(p: &PowerLawParams, big_n: usize, n: usize) -> Result<f64> {
    if !(p.alpha > 1.0) {
        return Err(Error::Parameter(format!("alpha must exceed 1, got {}", p.alpha)));
    }
    check_rank(big_n, n)?;
    Ok(p.x_min * (big_n as f64 / (n - 1) as f64).powf(1.0 / (p.alpha - 1.0)))
}

pub fn saturating_density(p: &SaturatingParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("saturating density needs t > 0, got {t}")));
    }
    Ok(p.a / -(-p.b * t).exp_m1())
}

/// Central-difference `dP/dt` at `t` minus `a·P + b·P²`.
pub fn saturating_ode_residual(p: &SaturatingParams, t: f64, h: f64) -> Result<f64> {
    Ok(saturating_ode_terms(p, t, h)?.residual())
}

/// The three terms of the saturating ODE evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub struct OdeTerms {
    pub derivative: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl OdeTerms {
    pub fn residual(&self) -> f64 {
        self.derivative - (self.linear + self.quadratic)
    }

    /// Residual scaled by the largest term magnitude.
    pub fn relative_residual(&self) -> f64 {
        let scale = self
            .derivative
            .abs()
            .max(self.linear.abs())
            .max(self.quadratic.abs());
        self.residual().abs() / scale
    }
}

pub fn saturating_ode_terms(p: &SaturatingParams, t: f64, h: f64) -> Result<OdeTerms> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if !(t - h > 0.0) {
        return Err(Error::Domain(format!("need t - h > 0 (t = {t}, h = {h})")));
    }
    let fwd = saturating_density(p, t + h)?;
    let back = saturating_density(p, t - h)?;
    let mid = saturating_density(p, t)?;
    let (a, b) = p.ode_coefficients();
    Ok(OdeTerms {
        derivative: (fwd - back) / (2.0 * h),
        linear: a * mid,
        quadratic: b * mid * mid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Poisson,
    PowerLaw,
    Saturating,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Poisson, ModelKind::PowerLaw, ModelKind::Saturating];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Poisson => "poisson",
            ModelKind::PowerLaw => "powerlaw",
            ModelKind::Saturating => "saturating",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(ModelKind::Poisson),
            "powerlaw" => Ok(ModelKind::PowerLaw),
            "saturating" => Ok(ModelKind::Saturating),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// One of the three hypotheses with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "lowercase")]
pub enum NoiseModel {
    Poisson(PoissonParams),
    PowerLaw(PowerLawParams),
    Saturating(SaturatingParams),
}

impl NoiseModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            NoiseModel::Poisson(_) => ModelKind::Poisson,
            NoiseModel::PowerLaw(_) => ModelKind::PowerLaw,
            NoiseModel::Saturating(_) => ModelKind::Saturating,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Poisson(p) => PoissonParams::new(p.lambda).map(drop),
            NoiseModel::PowerLaw(p) => PowerLawParams::new(p.c, p.alpha, p.x_min).map(drop),
            NoiseModel::Saturating(p) => SaturatingParams::new(p.a, p.b).map(drop),
        }
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        match self {
            NoiseModel::Poisson(p) => poisson_density(p, t),
            NoiseModel::PowerLaw(p) => powerlaw_density(p, t),
            NoiseModel::Saturating(p) => saturating_density(p, t),
        }
    }

    /// Closed-form expected SRA value at rank `n` of `big_n`.
    pub fn sra(&self, big_n: usize, n: usize) -> Result<f64> {
        match self {
            NoiseModel::Poisson(p) => poisson_sra(p, big_n, n),
            NoiseModel::PowerLaw(p) => powerlaw_sra(p, big_n, n),
            NoiseModel::Saturating(_) => Err(Error::ModelMismatch(
                "saturating model has no closed-form SRA".into(),
            )),
        }
    }
}

/// A model together with the multiplicative flexibility factor used in fits.
///
/// JSON form: `{"model": "...", "params": {...}, "scale": s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledModel {
    #[serde(flatten)]
    pub model: NoiseModel,
    pub scale: f64,
}

impl ScaledModel {
    pub fn new(model: NoiseModel, scale: f64) -> Result<Self> {
        model.validate()?;
        positive("scale", scale)?;
        Ok(Self { model, scale })
    }

    pub fn unscaled(model: NoiseModel) -> Self {
        Self { model, scale: 1.0 }
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        Ok(self.scale * self.model.density(t)?)
    }

    pub fn sra(&self, big_n: usize, n: usize) -> Result<f64> {
        Ok(self.scale * self.model.sra(big_n, n)?)
    }

    /// Expected SRA at every rank `1..=big_n`; rank 1 is `+∞`.
    pub fn sra_curve(&self, big_n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(big_n);
        out.push(f64::INFINITY);
        for n in 2..=big_n {
            out.push(self.sra(big_n, n)?);
        }
        Ok(out)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ScaledModel = serde_json::from_str(s)?;
        Self::new(m.model, m.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_examples() {
        let one = PoissonParams::new(1.0).unwrap();
        assert_eq!(poisson_density(&one, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_density(&PoissonParams::new(2.0).unwrap(), 0.0).unwrap(), 2.0);
        assert_relative_eq!(poisson_density(&one, 1.0).unwrap(), 0.367879, epsilon = 1e-6);
        assert!(poisson_density(&one, -1.0).is_err());

        assert_relative_eq!(poisson_sra(&one, 100, 2).unwrap(), 4.60517, epsilon = 1e-5);
        assert!(matches!(poisson_sra(&one, 100, 101), Err(Error::Bounds { .. })));
        assert!(matches!(poisson_sra(&one, 100, 1), Err(Error::Divergence)));
        let last = poisson_sra(&one, 100, 100).unwrap();
        assert_relative_eq!(last, (100.0f64 / 99.0).ln());
        assert!(last > 0.0);
    }

    #[test]
    fn powerlaw_examples() {
        let p = PowerLawParams::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(powerlaw_density(&p, 1.0).unwrap(), 1.0);
        assert_relative_eq!(powerlaw_density(&p, 10.0).unwrap(), 0.01);
        let q = PowerLawParams::new(3.0, 1.2, 1.0).unwrap();
        assert_relative_eq!(powerlaw_density(&q, 2.0).unwrap(), 1.30583, epsilon = 1e-5);
        assert!(powerlaw_density(&p, 0.5).is_err());

        assert_relative_eq!(powerlaw_sra(&p, 100, 2).unwrap(), 100.0, epsilon = 1e-12);
        assert_relative_eq!(powerlaw_sra(&p, 100, 100).unwrap(), 100.0 / 99.0);
        let r = PowerLawParams::new(1.0, 1.2, 2.0).unwrap();
        assert_relative_eq!(powerlaw_sra(&r, 1000, 11).unwrap(), 2e10, max_relative = 1e-12);
        assert!(matches!(powerlaw_sra(&p, 100, 1), Err(Error::Divergence)));
        assert!(PowerLawParams::new(1.0, 1.0, 1.0).is_err());
        let bad = PowerLawParams { c: 1.0, alpha: 0.9, x_min: 1.0 };
        assert!(matches!(powerlaw_sra(&bad, 10, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn saturating_examples() {
        let p = SaturatingParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(saturating_density(&p, 60.0).unwrap(), 1.0);
        let q = SaturatingParams::new(2.0, 1.0).unwrap();
        assert_relative_eq!(saturating_density(&q, 2f64.ln()).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(saturating_density(&p, 1.0).unwrap(), 1.58198, epsilon = 1e-5);
        assert!(saturating_density(&p, 0.0).is_err());
        let a = saturating_density(&p, 0.5).unwrap();
        let b = saturating_density(&p, 0.6).unwrap();
        assert!(b < a);
    }

    #[test]
    fn ode_residual_examples() {
        let p = SaturatingParams::new(1.0, 1.0).unwrap();
        assert!(saturating_ode_residual(&p, 1.0, 1e-4).unwrap().abs() < 1e-6);
        let q = SaturatingParams::new(3.0, 0.5).unwrap();
        assert!(saturating_ode_residual(&q, 2.0, 1e-4).unwrap().abs() < 1e-6);
        assert!(saturating_ode_residual(&p, 1e-5, 1e-4).is_err());
        assert!(saturating_ode_residual(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn ode_residual_quadratic_in_step() {
        let p = SaturatingParams::new(2.0, 0.7).unwrap();
        let r1 = saturating_ode_residual(&p, 1.3, 1e-2).unwrap().abs();
        let r2 = saturating_ode_residual(&p, 1.3, 5e-3).unwrap().abs();
        let ratio = r1 / r2;
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn model_json_shape() {
        let m = ScaledModel::new(
            NoiseModel::PowerLaw(PowerLawParams::new(2.0, 1.2, 50.0).unwrap()),
            1.5,
        )
        .unwrap();
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["model"], "powerlaw");
        assert_eq!(v["params"]["C"], 2.0);
        assert_eq!(v["params"]["alpha"], 1.2);
        assert_eq!(v["params"]["x_min"], 50.0);
        assert_eq!(v["scale"], 1.5);
        assert_eq!(ScaledModel::from_json(&v.to_string()).unwrap(), m);

        let sat = r#"{"model":"saturating","params":{"A":1.0,"B":0.25},"scale":1.0}"#;
        let parsed = ScaledModel::from_json(sat).unwrap();
        assert_eq!(parsed.model.kind(), ModelKind::Saturating);

        let bad = r#"{"model":"poisson","params":{"lambda":-1.0},"scale":1.0}"#;
        assert!(ScaledModel::from_json(bad).is_err());
    }
}
