//! Central-difference curvature, the independent cross-check for the jet pipeline.

use std::collections::HashMap;

use super::{invert_metric, metric_at, MetricChart, MetricDerivs};
use crate::error::Result;
use crate::jet::observed_order;
use crate::tensor::Tensor;

fn shifted(chart: &dyn MetricChart, p: &[f64], shifts: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut q = p.to_vec();
    for &(c, s) in shifts {
        q[c] += s;
    }
    Ok(metric_at(chart, &q)?.transpose().as_slice().to_vec())
}

fn fd_derivs(chart: &dyn MetricChart, p: &[f64], h: f64) -> Result<MetricDerivs> {
    let n = chart.dim();
    let g = metric_at(chart, p)?;
    let ginv = invert_metric(&g)?;
    let g0 = g.transpose().as_slice().to_vec();
    let mut dg = vec![0.0; n * n * n];
    let mut ddg = HashMap::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for c in 0..n {
        let gp = shifted(chart, p, &[(c, h)])?;
        let gm = shifted(chart, p, &[(c, -h)])?;
        for k in 0..n * n {
            dg[c * n * n + k] = (gp[k] - gm[k]) / (2.0 * h);
        }
        ddg.insert((c, c), (0..n * n).map(|k| (gp[k] - 2.0 * g0[k] + gm[k]) / (h * h)).collect::<Vec<_>>());
        plus.push(gp);
        minus.push(gm);
    }
    for c in 0..n {
        for d in c + 1..n {
            let pp = shifted(chart, p, &[(c, h), (d, h)])?;
            let pm = shifted(chart, p, &[(c, h), (d, -h)])?;
            let mp = shifted(chart, p, &[(c, -h), (d, h)])?;
            let mm = shifted(chart, p, &[(c, -h), (d, -h)])?;
            ddg.insert((c, d), (0..n * n).map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h)).collect());
        }
    }
    Ok(MetricDerivs { n, g, ginv, dg, ddg })
}

pub fn christoffel_fd(chart: &dyn MetricChart, p: &[f64], h: f64) -> Result<Tensor> {
    Ok(fd_derivs(chart, p, h)?.christoffel())
}

pub fn riemann_fd(chart: &dyn MetricChart, p: &[f64], h: f64) -> Result<Tensor> {
    Ok(fd_derivs(chart, p, h)?.riemann())
}

/// Jet curvature against central differences over a decreasing step list.
#[derive(Clone, Debug)]
pub struct FdCurvatureCheck {
    pub steps: Vec<f64>,
    pub gamma_discrepancy: Vec<f64>,
    pub riemann_discrepancy: Vec<f64>,
    pub gamma_order: f64,
    pub riemann_order: f64,
    /// Discrepancy of the Richardson combination `(4F(h/2) − F(h))/3` of the last two steps.
    pub gamma_richardson: f64,
    pub riemann_richardson: f64,
    /// Observed order of the Richardson combinations over consecutive step
    /// pairs; needs three steps, otherwise NaN.
    pub gamma_richardson_order: f64,
    pub riemann_richardson_order: f64,
}

impl FdCurvatureCheck {
    /// `steps` must halve from one entry to the next for the Richardson combination.
    pub fn run(chart: &dyn MetricChart, p: &[f64], steps: &[f64]) -> Result<Self> {
        let gamma = super::christoffel(chart, p)?;
        let riem = super::riemann(chart, p)?;
        let mut gd = Vec::new();
        let mut rd = Vec::new();
        let mut last = Vec::new();
        for &h in steps {
            let md = fd_derivs(chart, p, h)?;
            let (g, r) = (md.christoffel(), md.riemann());
            gd.push(g.max_abs_diff(&gamma));
            rd.push(r.max_abs_diff(&riem));
            last.push((g, r));
        }
        let k = last.len();
        let rich = |a: &Tensor, b: &Tensor| b.scaled(4.0 / 3.0).sub(&a.scaled(1.0 / 3.0));
        let gamma_richardson = rich(&last[k - 2].0, &last[k - 1].0).max_abs_diff(&gamma);
        let riemann_richardson = rich(&last[k - 2].1, &last[k - 1].1).max_abs_diff(&riem);
        let (mut gamma_richardson_order, mut riemann_richardson_order) = (f64::NAN, f64::NAN);
        if k >= 3 {
            let g0 = rich(&last[0].0, &last[1].0).max_abs_diff(&gamma);
            let r0 = rich(&last[0].1, &last[1].1).max_abs_diff(&riem);
            gamma_richardson_order = observed_order(&[g0, gamma_richardson], &steps[1..3]);
            riemann_richardson_order = observed_order(&[r0, riemann_richardson], &steps[1..3]);
        }
        Ok(FdCurvatureCheck {
            steps: steps.to_vec(),
            gamma_order: observed_order(&gd[..2], &steps[..2]),
            riemann_order: observed_order(&rd[..2], &steps[..2]),
            gamma_discrepancy: gd,
            riemann_discrepancy: rd,
            gamma_richardson,
            riemann_richardson,
            gamma_richardson_order,
            riemann_richardson_order,
        })
    }
}
