//! Damped Gauss–Newton for small nonlinear least-squares problems.
//!
//! Steps are minimum-norm pseudo-inverse solutions of the linearized system,
//! so under- and over-determined problems are handled alike. Each step is
//! halved until the residual norm decreases.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::family::constraint_jacobian;
use crate::linalg::pseudo_solve;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussNewtonConfig {
    /// Convergence threshold on the Euclidean residual norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra iterations after reaching `tol`, kept only while they improve.
    pub polish_iter: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
    pub max_halvings: usize,
    /// Relative singular-value cutoff of the pseudo-inverse.
    pub rcond: f64,
}

impl Default for GaussNewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            polish_iter: 3,
            fd_step: 1e-6,
            max_halvings: 20,
            rcond: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussNewtonResult {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Minimizes `‖f(x)‖₂` from `x0` with finite-difference Jacobians.
///
/// Errors from `f` at the starting point are returned; errors at trial points
/// during the line search count as rejected steps.
pub fn gauss_newton<F>(f: F, x0: &[f64], cfg: &GaussNewtonConfig) -> Result<GaussNewtonResult>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let mut rn = norm(&r);
    let mut iterations = 0;
    let mut polish_left = cfg.polish_iter;
    while iterations < cfg.max_iter {
        if rn <= cfg.tol {
            if polish_left == 0 || rn == 0.0 {
                break;
            }
            polish_left -= 1;
        }
        let Ok(jac) = constraint_jacobian(&f, &x, cfg.fd_step) else {
            break;
        };
        let step = pseudo_solve(&jac, &-DVector::from_column_slice(&r), cfg.rcond);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if let Ok(rt) = f(&trial) {
                let nt = norm(&rt);
                if nt.is_finite() && nt < rn {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            t *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                rn = nt;
            }
            None => break,
        }
    }
    Ok(GaussNewtonResult {
        converged: rn <= cfg.tol,
        x,
        residual_norm: rn,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_two() {
        let res = gauss_newton(
            |x| Ok(vec![x[0] * x[0] - 2.0]),
            &[1.0],
            &GaussNewtonConfig::default(),
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.x[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rosenbrock_residuals() {
        let f = |x: &[f64]| Ok(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]);
        let res = gauss_newton(f, &[-1.2, 1.0], &GaussNewtonConfig::default()).unwrap();
        assert!(res.converged, "{res:?}");
        assert!((res.x[0] - 1.0).abs() < 1e-8 && (res.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn underdetermined_lands_on_manifold() {
        // one equation, two unknowns: the unit circle
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 1.0]);
        let res = gauss_newton(f, &[2.0, 0.5], &GaussNewtonConfig::default()).unwrap();
        assert!(res.converged);
        assert!((res.x[0].hypot(res.x[1]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_root_stops_without_convergence() {
        let res = gauss_newton(
            |x| Ok(vec![x[0] * x[0] + 1.0]),
            &[0.3],
            &GaussNewtonConfig::default(),
        )
        .unwrap();
        assert!(!res.converged);
        assert!((res.residual_norm - 1.0).abs() < 1e-6);
    }
}
