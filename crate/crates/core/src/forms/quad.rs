//! Adaptive composite Gauss–Legendre quadrature on real intervals.

use std::sync::OnceLock;

use crate::holoalg::C64;
use crate::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Panel limit of the adaptive rule.
pub const MAX_PANELS: usize = 1 << 14;
const PANEL_POINTS: usize = 15;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

fn panel<F: Fn(f64) -> Result<C64>>(f: &F, a: f64, b: f64) -> Result<C64> {
    let (x, w) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = C64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        acc += f(mid + half * xi)? * *wi;
    }
    Ok(acc * half)
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    pub error_estimate: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: C64,
    right: C64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> Result<C64>>(f: &F, a: f64, b: f64, whole: C64) -> Result<Self> {
        let m = 0.5 * (a + b);
        let left = panel(f, a, m)?;
        let right = panel(f, m, b)?;
        let err = (whole - left - right).norm();
        Ok(Panel {
            a,
            b,
            left,
            right,
            err,
        })
    }
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`.
///
/// Each panel is estimated by comparing the 15-point rule on the panel with
/// the rule on its two halves; the panel with the largest estimate is
/// bisected until the summed estimate drops below `tol`.
pub fn integrate<F: Fn(f64) -> Result<C64>>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: C64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let whole = panel(&f, a, b)?;
    let mut panels = vec![Panel::new(&f, a, b, whole)?];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        // roundoff floor relative to the magnitude of the integral
        let scale: f64 = panels.iter().map(|p| (p.left + p.right).norm()).sum();
        if !total_err.is_finite() || !scale.is_finite() {
            return Err(Error::QuadratureNotConverged {
                panels: panels.len(),
                estimate: total_err,
            });
        }
        if total_err <= tol.max(scale * 4.0 * f64::EPSILON) {
            break;
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                panels: panels.len(),
                estimate: total_err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::QuadratureNotConverged {
                panels: panels.len() + 1,
                estimate: total_err,
            });
        }
        panels.push(Panel::new(&f, p.a, m, p.left)?);
        panels.push(Panel::new(&f, m, p.b, p.right)?);
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(|p| p.left + p.right).sum();
    Ok(Quadrature {
        value,
        error_estimate: panels.iter().map(|p| p.err).sum(),
        panels: panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 28 monomial: integral over [-1,1] is 2/29
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // integral of 1/(1e-4 + t^2) over [-1, 1] = 2 atan(100) / 1e-2
        let q = integrate(|t| Ok(C64::new(1.0 / (1e-4 + t * t), 0.0)), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (100.0f64).atan() / 1e-2;
        assert!((q.value.re - exact).abs() < 1e-8, "{} vs {exact}", q.value.re);
        assert!(q.panels > 1);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(|t| if t > 0.5 { Err(Error::DegenerateInput("x".into())) } else { Ok(C64::new(t, 0.0)) }, 0.0, 1.0, 1e-10);
        assert!(r.is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        // 1/t is not integrable on (0, 1]; the estimate never settles
        let r = integrate(|t| Ok(C64::new(t.recip(), 0.0)), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })), "{r:?}");
    }
}
