//! Recovers the afterpulse exponent from an afterpulse-dominated stream by
//! fitting the power-law SRA, then reports where the fit holds.
//!
//!     cargo run --release --example afterpulse_fit

use sra_diag::fit::fit_powerlaw_sra;
use sra_diag::sim::{simulate, SimConfig};
use sra_diag::sra::build_sra;
use sra_diag::timestamps::inter_arrivals;

fn main() -> sra_diag::Result<()> {
    let cfg = SimConfig {
        dark_rate: 1e-7,
        afterpulse_prob: 0.999,
        ap_alpha: 2.0,
        ap_xmin_ns: 1000.0,
        dead_time_ns: 1000,
        duration_ns: 1e9,
        seed: 11,
        ..Default::default()
    };
    let ia = inter_arrivals(&simulate(&cfg)?, true)?;
    let curve = build_sra(ia.intervals())?;
    let fit = fit_powerlaw_sra(&curve, cfg.ap_xmin_ns)?;

    println!("intervals:      {}", curve.len());
    println!("true alpha:     {}", cfg.ap_alpha);
    println!("fitted alpha:   {:.4}", fit.alpha().unwrap_or(f64::NAN));
    println!("rms log resid:  {:.4}", fit.residual_rms_log);
    let r = &fit.applicability;
    println!("holds on:       {:.0} ns .. {:.0} ns", r.t_lo_ns, r.t_hi_ns);
    if let Some(b) = r.break_point_ns {
        println!("breaks near:    {b:.0} ns");
    }
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}
