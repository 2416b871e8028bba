//! Small dense Levenberg-Marquardt solver for the two- and three-parameter
//! log-space fits.

use nalgebra::{DMatrix, DVector};

pub const MAX_ITERATIONS: usize = 500;
pub const PARAM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `model` returns residuals and the Jacobian rows (one row per residual)
/// at the given parameters, or `None` where the parameters are infeasible.
pub fn minimize<F>(mut model: F, start: &[f64], max_iter: usize, tol: f64) -> LmOutcome
where
    F: FnMut(&[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)>,
{
    let p = start.len();
    let mut theta = DVector::from_column_slice(start);
    let Some((mut r, mut jac)) = model(theta.as_slice()) else {
        return LmOutcome {
            params: start.to_vec(),
            cost: f64::INFINITY,
            iterations: 0,
            converged: false,
        };
    };
    let mut cost = half_sq(&r);
    let mut mu = 1e-3;

    for iter in 1..=max_iter {
        let j = DMatrix::from_fn(r.len(), p, |i, k| jac[i][k]);
        let rv = DVector::from_column_slice(&r);
        let jtj = j.transpose() * &j;
        let grad = j.transpose() * rv;
        if grad.amax() <= f64::EPSILON * (1.0 + cost) || cost == 0.0 {
            return done(theta, cost, iter, true);
        }

        let mut stepped = false;
        while mu < 1e16 {
            let mut a = jtj.clone();
            for k in 0..p {
                a[(k, k)] += mu * jtj[(k, k)].max(1e-12);
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&(-&grad))) else {
                mu *= 10.0;
                continue;
            };
            let trial = &theta + &delta;
            match model(trial.as_slice()) {
                Some((tr, tj)) if half_sq(&tr) <= cost => {
                    let small = delta.norm() <= tol * (theta.norm() + tol);
                    theta = trial;
                    cost = half_sq(&tr);
                    r = tr;
                    jac = tj;
                    mu = (mu / 3.0).max(1e-12);
                    stepped = true;
                    if small {
                        return done(theta, cost, iter, true);
                    }
                    break;
                }
                _ => mu *= 10.0,
            }
        }
        if !stepped {
            // No descent direction left at any damping: a stationary point.
            return done(theta, cost, iter, true);
        }
    }
    done(theta, cost, max_iter, false)
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|x| x * x).sum::<f64>()
}

fn done(theta: DVector<f64>, cost: f64, iterations: usize, converged: bool) -> LmOutcome {
    LmOutcome {
        params: theta.as_slice().to_vec(),
        cost,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay_in_log_space() {
        // y = ln(3) - 0.5 t, parametrized as (ln s, ln k).
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3f64.ln() - 0.5 * t).collect();
        let out = minimize(
            |th| {
                let k = th[1].exp();
                let r = ts.iter().zip(&ys).map(|(t, y)| th[0] - k * t - y).collect();
                let j = ts.iter().map(|t| vec![1.0, -k * t]).collect();
                Some((r, j))
            },
            &[0.0, 0.0],
            MAX_ITERATIONS,
            PARAM_TOLERANCE,
        );
        assert!(out.converged);
        assert!(out.cost < 1e-20);
        assert!((out.params[0] - 3f64.ln()).abs() < 1e-9);
        assert!((out.params[1].exp() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence_at_cap() {
        let out = minimize(
            |th| Some((vec![(th[0] - 100.0).powi(2) + 1.0], vec![vec![2.0 * (th[0] - 100.0)]])),
            &[0.0],
            2,
            1e-30,
        );
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}
