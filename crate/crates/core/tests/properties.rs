use proptest::prelude::*;

use sra_diag::diagnostics::{relative_distance, DEFAULT_EPSILON_NS};
use sra_diag::fit::{applicability_range, estimate_lambda, fit_powerlaw_sra};
use sra_diag::sra::{build_sra, ecdf_from_sra, relative_sra, resample_sra};
use sra_diag::timestamps::{
    encode_timestamps, inter_arrivals, parse_timestamps, AcquisitionMeta, InterArrivalSeries, TickFormat,
    TimestampSeries,
};

fn positive_samples(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e6, 2..max_len)
}

fn ticks() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..10_000, 2..200).prop_map(|gaps| {
        gaps.iter()
            .scan(0u64, |t, g| {
                *t += g;
                Some(*t)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn sra_ignores_input_order(mut xs in positive_samples(300), seed in any::<u64>()) {
        let a = build_sra(&xs).unwrap();
        // Deterministic shuffle driven by the seed.
        let mut s = seed | 1;
        for i in (1..xs.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            xs.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let b = build_sra(&xs).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn ecdf_is_monotone_in_value(xs in positive_samples(300)) {
        let c = build_sra(&xs).unwrap();
        let pts: Vec<_> = (1..=c.len()).map(|n| ecdf_from_sra(&c, n).unwrap()).collect();
        prop_assert_eq!(pts[0].f, 1.0);
        for w in pts.windows(2) {
            prop_assert!(w[0].x >= w[1].x && w[0].f >= w[1].f);
        }
    }

    #[test]
    fn resampling_keeps_order_and_endpoints(xs in positive_samples(500), m in 2usize..1500) {
        let c = build_sra(&xs).unwrap();
        let r = resample_sra(&c, m).unwrap();
        prop_assert_eq!(r.len(), m);
        prop_assert_eq!(r.max(), c.max());
        prop_assert_eq!(r.min(), c.min());
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn self_comparison_is_zero(xs in positive_samples(300), m in 2usize..500) {
        let c = build_sra(&xs).unwrap();
        let rel = relative_sra(&c, &c, m).unwrap();
        prop_assert!(rel.delta.iter().all(|d| *d == 0.0));
        prop_assert_eq!(relative_distance(&rel, DEFAULT_EPSILON_NS), 0.0);
    }

    #[test]
    fn distance_is_unit_free(xs in positive_samples(200), ys in positive_samples(200), k in 1e-3f64..1e3) {
        let eps = 1e-12;
        let d = |p: &[f64], b: &[f64], e: f64| {
            let rel = relative_sra(&build_sra(p).unwrap(), &build_sra(b).unwrap(), 100).unwrap();
            relative_distance(&rel, e)
        };
        let scale = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
        let a = d(&xs, &ys, eps);
        let b = d(&scale(&xs), &scale(&ys), eps * k);
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn tick_formats_round_trip(ts in ticks()) {
        for fmt in [TickFormat::TextLines, TickFormat::BinaryLe64] {
            let s = parse_timestamps(&encode_timestamps(&ts, fmt), fmt).unwrap();
            prop_assert_eq!(s.ticks(), &ts[..]);
        }
    }

    #[test]
    fn intervals_ignore_offset_and_sum_to_span(ts in ticks(), offset in 0u64..1 << 40) {
        let meta = AcquisitionMeta::free_run(0, "p");
        let a = inter_arrivals(&TimestampSeries::new(ts.clone(), meta.clone()).unwrap(), false).unwrap();
        let shifted: Vec<u64> = ts.iter().map(|t| t + offset).collect();
        let b = inter_arrivals(&TimestampSeries::new(shifted, meta).unwrap(), false).unwrap();
        prop_assert_eq!(a.intervals(), b.intervals());
        let span = (ts[ts.len() - 1] - ts[0]) as f64;
        prop_assert_eq!(a.intervals().iter().sum::<f64>(), span);
    }

    #[test]
    fn lambda_scales_inversely(xs in positive_samples(300), k in 1e-3f64..1e3) {
        let l1 = estimate_lambda(&InterArrivalSeries::from_samples(xs.clone()).unwrap()).unwrap().lambda;
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        let l2 = estimate_lambda(&InterArrivalSeries::from_samples(scaled).unwrap()).unwrap().lambda;
        prop_assert!((l1 / k - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn alpha_hat_is_scale_invariant(us in prop::collection::vec(1e-6f64..1.0, 50..300), k in 1e-2f64..1e2) {
        let xs: Vec<f64> = us.iter().map(|u| u.powf(-1.0 / 0.5)).collect();
        let a1 = fit_powerlaw_sra(&build_sra(&xs).unwrap(), 1.0).unwrap().alpha().unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        let a2 = fit_powerlaw_sra(&build_sra(&scaled).unwrap(), k).unwrap().alpha().unwrap();
        prop_assert!((a1 - a2).abs() <= 1e-9 * a1);
    }

    #[test]
    fn looser_tolerance_never_shrinks_range(
        xs in positive_samples(200),
        noise in prop::collection::vec(0.5f64..2.0, 200),
        tol in 0.01f64..0.5,
        extra in 0.0f64..1.0,
    ) {
        let c = build_sra(&xs).unwrap();
        let model: Vec<f64> = c.values().iter().zip(&noise).map(|(x, f)| x * f).collect();
        let tight = applicability_range(&c, &model, tol, 5).unwrap();
        let loose = applicability_range(&c, &model, tol + extra, 5).unwrap();
        prop_assert!(loose.t_hi_ns >= tight.t_hi_ns);
        prop_assert!(loose.t_lo_ns <= tight.t_lo_ns);
    }
}
