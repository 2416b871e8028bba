//! Shows the fitted power law breaking down where the afterpulse delay law
//! is cut off.
//!
//!     cargo run --release --example applicability_limit

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sra_diag::fit::{applicability_range, DEFAULT_REL_TOL, DEFAULT_RUN_LEN};
use sra_diag::models::{NoiseModel, PowerLawParams, ScaledModel};
use sra_diag::sim::{SimConfig, TailCut};
use sra_diag::sra::build_sra;

fn main() -> sra_diag::Result<()> {
    let cfg = SimConfig {
        ap_alpha: 1.2,
        ap_xmin_ns: 1000.0,
        tail_truncation_ns: Some(24_000.0),
        tail_cut: TailCut::Clamp,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let delays = (0..10_000)
        .map(|_| cfg.afterpulse_delay(Open01.sample(&mut rng)))
        .collect::<sra_diag::Result<Vec<f64>>>()?;
    let curve = build_sra(&delays)?;

    let model = ScaledModel::unscaled(NoiseModel::PowerLaw(PowerLawParams::normalized(
        cfg.ap_alpha,
        cfg.ap_xmin_ns,
    )?));
    let range = applicability_range(&curve, &model.sra_curve(curve.len())?, DEFAULT_REL_TOL, DEFAULT_RUN_LEN)?;
    println!("delay law cut at   {:.0} ns", cfg.tail_truncation_ns.unwrap_or(f64::NAN));
    println!("model holds from   {:.0} ns to {:.0} ns", range.t_lo_ns, range.t_hi_ns);
    match range.break_point_ns {
        Some(b) => println!("break detected at  {b:.0} ns"),
        None => println!("no break detected"),
    }
    Ok(())
}
