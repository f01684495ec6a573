//! Harnack tensors of a fixed metric at a given time parameter, the
//! divergence form of `M`, and the gradient expanding soliton test.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{m_values, p_jets, HarnackTriple};
use crate::chart::{JetGeometry, MetricChart};
use crate::error::{GeomError, Result};
use crate::flow::ricci_quadratic;
use crate::jet::{seed_point, Jet};
use crate::tensor::Tensor;

/// Soliton equation residual below which the input counts as a soliton.
pub const SOLITON_TOL: f64 = 1e-8;

/// Coordinate-frame Harnack data of a metric at one point.
pub struct StaticHarnack {
    pub triple: HarnackTriple,
    pub ricci: Tensor,
    pub inverse: DMatrix<f64>,
    /// `∇_e P_ijk`.
    pub nabla_p: Tensor,
    geo: JetGeometry,
    point: Vec<f64>,
}

pub fn static_harnack(chart: &dyn MetricChart, x: &[f64], t: f64) -> Result<StaticHarnack> {
    if !(t > 0.0) {
        return Err(GeomError::Domain(format!("M needs t > 0, got {t}")));
    }
    let geo = JetGeometry::from_chart(chart, x, 4)?;
    let p = p_jets(&geo);
    let n = geo.n;
    let triple = HarnackTriple {
        riemann: geo.riemann.values(),
        p: p.values(),
        m: m_values(&geo, t),
        t,
        metric: DMatrix::from_fn(n, n, |a, b| geo.g.get(&[a, b]).value()),
    };
    Ok(StaticHarnack {
        triple,
        ricci: geo.ricci.values(),
        inverse: geo.inverse_values(),
        nabla_p: geo.nabla(&p).values(),
        geo,
        point: x.to_vec(),
    })
}

/// Max-abs of `M_ij − (∇^p P_pij + R_ikjl R^kl + R_ij / 2t)`.
pub fn m_decomposition_residual(chart: &dyn MetricChart, x: &[f64], t: f64) -> Result<f64> {
    let sh = static_harnack(chart, x, t)?;
    let n = sh.triple.dim();
    let g = &sh.inverse;
    let quad = ricci_quadratic(&sh.triple.riemann, &sh.ricci, g);
    let rhs = Tensor::from_fn(n, 2, |ij| {
        let mut div = 0.0;
        for a in 0..n {
            for b in 0..n {
                div += g[(a, b)] * sh.nabla_p.at(&[a, b, ij[0], ij[1]]);
            }
        }
        div + quad.rm_ric.at(ij) + sh.ricci.at(ij) / (2.0 * t)
    });
    Ok(sh.triple.m.max_abs_diff(&rhs))
}

#[derive(Clone, Debug, Serialize)]
pub struct SolitonReport {
    /// Max-abs of `∇_i∇_j f − R_ij − g_ij / 2t`.
    pub soliton_residual: f64,
    /// Max over sampled unit `W` of `|P_kij W^i W^j X^k + M_ij W^i W^j|`, `X = ∇f`.
    pub vanishing_residual: f64,
    pub is_soliton: bool,
}

/// Tests whether `(g, f)` is a gradient expanding soliton at time `t` and
/// evaluates the Harnack combination that vanishes on solitons.
pub fn soliton_check(
    t: f64,
    chart: &dyn MetricChart,
    potential: &dyn Fn(&[Jet]) -> Result<Jet>,
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<SolitonReport> {
    let sh = static_harnack(chart, x, t)?;
    let n = sh.triple.dim();
    let jets = seed_point(&sh.point, &(0..n).collect::<Vec<_>>(), 4);
    let f = potential(&jets)?;
    let ft = Tensor::from_vec(n, 0, vec![f.clone()]);
    let hess = sh.geo.nabla(&sh.geo.nabla(&ft)).values();
    let g = &sh.triple.metric;
    let soliton_residual = Tensor::from_fn(n, 2, |i| {
        hess.at(i) - sh.ricci.at(i) - g[(i[0], i[1])] / (2.0 * t)
    })
    .max_abs();
    let df: Vec<f64> = (0..n).map(|a| f.partial(&[a])).collect();
    let grad: Vec<f64> = (0..n).map(|k| (0..n).map(|l| sh.inverse[(k, l)] * df[l]).sum()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vanishing_residual = 0.0f64;
    for _ in 0..samples {
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] * w[i] * w[j]).sum();
        w.iter_mut().for_each(|v| *v /= norm.sqrt());
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += sh.triple.m.at(&[i, j]) * w[i] * w[j];
                for k in 0..n {
                    s += sh.triple.p.at(&[k, i, j]) * w[i] * w[j] * grad[k];
                }
            }
        }
        vanishing_residual = vanishing_residual.max(s.abs());
    }
    Ok(SolitonReport { soliton_residual, vanishing_residual, is_soliton: soliton_residual <= SOLITON_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::models::{Euclidean, RandomMetric, RoundSphere};

    fn gaussian(scale: f64, t: f64) -> impl Fn(&[Jet]) -> Result<Jet> {
        move |x: &[Jet]| {
            let mut s = x[0].zero_like();
            for v in x {
                s = &s + &(v * v);
            }
            Ok(s.scale(scale / (4.0 * t)))
        }
    }

    #[test]
    fn gaussian_soliton() {
        let e = Euclidean::new(3);
        let r = soliton_check(1.0, &e, &gaussian(1.0, 1.0), &[0.3, -0.2, 1.0], 50, 1).unwrap();
        assert!(r.is_soliton && r.soliton_residual < 1e-12 && r.vanishing_residual < 1e-12);
        let r = soliton_check(1.0, &e, &gaussian(1.1, 1.0), &[0.3, -0.2, 1.0], 50, 1).unwrap();
        assert!(!r.is_soliton && (r.soliton_residual - 0.05).abs() < 1e-12);
    }

    #[test]
    fn sphere_is_not_an_expanding_soliton() {
        let s = RoundSphere::new(2, 1.0);
        let r = soliton_check(1.0, &s, &|x: &[Jet]| Ok(x[0].zero_like()), &[1.0, 0.5], 10, 1).unwrap();
        assert!(!r.is_soliton);
    }

    #[test]
    fn m_decomposition_on_random_metrics() {
        for (n, seed) in [(2, 1), (3, 2), (4, 3)] {
            let m = RandomMetric::new(n, seed);
            let x: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 - 0.2).collect();
            assert!(m_decomposition_residual(&m, &x, 0.7).unwrap() < 1e-9);
        }
    }
}
