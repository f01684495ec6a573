//! Thermostat metrics built from a Ricci flow: the hyperbolic product
//! `g ⊕ t·h_{H^N} ⊕ (R − N/2t) dt²`, Perelman's spherical one with
//! `(R + N/2τ) dτ²` over a backward flow, and the restriction to space-time.
//!
//! Coordinates are ordered `[x (base), y (fiber), t]`, so the time index is
//! last. The fiber carries curvature `∓1/(2N)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::models::{half_space_factor, stereo_factor, HalfSpace, StereoSphere};
use crate::chart::{metric_at, riemann_sampled, MetricChart};
use crate::error::{GeomError, Result};
use crate::flow::{FlowFamily, FlowPoint, SurfaceGrid};
use crate::harnack::surface_triple;
use crate::jet::Jet;
use crate::tensor::Tensor;

mod checks;
mod closed;

pub use checks::{
    closed_limit_gaps, harnack_limit_check, limit_spread, restricted_min_eig, restricted_triple, restricted_triple_closed, ricci_decay_fit, spacetime_residuals, surface_limit_check,
    DecayFit, LimitRow, SpacetimeEquation, SpacetimeResiduals,
};
pub use closed::{
    autodiff_tables, closed_form_christoffel, closed_form_curvature, closed_form_ricci, compare_christoffel,
    compare_curvature, compare_ricci, ClosedTable, FamilyCheck,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermostatVariant {
    Hyperbolic,
    Spherical,
    Restricted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermostatSpec {
    pub variant: ThermostatVariant,
    /// Fiber dimension; for the restricted variant it only enters `ḡ_00`.
    pub n_fiber: usize,
    pub base: FlowFamily,
}

impl ThermostatSpec {
    pub fn new(variant: ThermostatVariant, n_fiber: usize, base: FlowFamily) -> Result<Self> {
        if n_fiber < 2 {
            return Err(GeomError::Domain(format!("fiber dimension {n_fiber} < 2")));
        }
        if !base.closed_form() {
            return Err(GeomError::Unsupported(format!("thermostat charts need a closed-form base, got {}", base.label())));
        }
        Ok(ThermostatSpec { variant, n_fiber, base })
    }

    pub fn hyperbolic(n_fiber: usize, base: FlowFamily) -> Result<Self> {
        Self::new(ThermostatVariant::Hyperbolic, n_fiber, base)
    }

    pub fn restricted(n_fiber: usize, base: FlowFamily) -> Result<Self> {
        Self::new(ThermostatVariant::Restricted, n_fiber, base)
    }

    pub fn spherical(n_fiber: usize, base: FlowFamily) -> Result<Self> {
        Self::new(ThermostatVariant::Spherical, n_fiber, base)
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Number of fiber coordinates in the chart.
    pub fn fiber_dim(&self) -> usize {
        match self.variant {
            ThermostatVariant::Restricted => 0,
            _ => self.n_fiber,
        }
    }

    pub fn dim(&self) -> usize {
        self.base_dim() + self.fiber_dim() + 1
    }

    pub fn time_index(&self) -> usize {
        self.dim() - 1
    }

    /// `N/2t` with the sign it enters `g_00`: `−N/2t` or `+N/2τ`.
    pub fn time_shift(&self, t: f64) -> f64 {
        let s = self.n_fiber as f64 / (2.0 * t);
        match self.variant {
            ThermostatVariant::Spherical => s,
            _ => -s,
        }
    }

    /// The fiber chart, unscaled by `t`.
    pub fn fiber_chart(&self) -> Option<Arc<dyn MetricChart>> {
        match self.variant {
            ThermostatVariant::Hyperbolic => Some(Arc::new(HalfSpace::thermostat_fiber(self.n_fiber))),
            ThermostatVariant::Spherical => Some(Arc::new(StereoSphere::thermostat_fiber(self.n_fiber))),
            ThermostatVariant::Restricted => None,
        }
    }

    /// Base metric time: `t` forward, `−τ` for the spherical backward flow.
    fn base_time(&self, t: &Jet) -> Jet {
        match self.variant {
            ThermostatVariant::Spherical => -t,
            _ => t.clone(),
        }
    }

    /// `g_00` at a space-time point.
    pub fn g00(&self, x: &[f64], t: f64) -> Result<f64> {
        let n = self.base_dim();
        let jets: Vec<Jet> = x.iter().chain(std::iter::once(&t)).map(|&v| Jet::constant(0, 0, v)).collect();
        let r = self.base.scalar_jet(&jets[..n], &self.base_time(&jets[n]))?.value();
        Ok(r + self.time_shift(t))
    }
}

/// The thermostat metric as a chart.
#[derive(Clone)]
pub struct ThermostatChart {
    pub spec: ThermostatSpec,
    fiber: Option<Arc<dyn MetricChart>>,
}

/// Build the chart of a thermostat metric.
pub fn build_metric(spec: &ThermostatSpec) -> Result<ThermostatChart> {
    Ok(ThermostatChart { spec: spec.clone(), fiber: spec.fiber_chart() })
}

impl ThermostatChart {
    /// A point `[x, y, t]` after domain checks, including `g_00 ≠ 0`.
    pub fn point(&self, x: &[f64], y: &[f64], t: f64) -> Result<Vec<f64>> {
        let spec = &self.spec;
        if !(t > 0.0) {
            return Err(GeomError::Domain(format!("thermostat time {t} must be positive")));
        }
        if spec.variant != ThermostatVariant::Spherical {
            spec.base.check_time(t)?;
        }
        if x.len() != spec.base_dim() || y.len() != spec.fiber_dim() {
            return Err(GeomError::Domain("point has the wrong number of base or fiber coordinates".into()));
        }
        let a = spec.g00(x, t)?;
        if a.abs() <= 1e-12 * spec.time_shift(t).abs() {
            return Err(GeomError::Degenerate(format!("g_00 = R ∓ N/2t vanishes at t = {t}")));
        }
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        p.push(t);
        if !self.contains(&p) {
            return Err(GeomError::Domain(format!("{p:?} outside {}", self.label())));
        }
        Ok(p)
    }

    /// A random admissible point with `t` in `[t_lo, t_hi]`.
    pub fn sample_point(&self, rng: &mut impl Rng, t_lo: f64, t_hi: f64) -> Result<Vec<f64>> {
        for _ in 0..100 {
            let x = self.spec.base.sample_point(rng);
            let y: Vec<f64> = (0..self.spec.fiber_dim()).map(|_| rng.random_range(0.5..1.5)).collect();
            let t = rng.random_range(t_lo..=t_hi);
            match self.point(&x, &y, t) {
                Ok(p) => return Ok(p),
                Err(GeomError::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(GeomError::Degenerate("no admissible sample point".into()))
    }

    pub fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], &'a [f64], f64) {
        let n = self.spec.base_dim();
        let nf = self.spec.fiber_dim();
        (&p[..n], &p[n..n + nf], p[n + nf])
    }

    /// Fiber metric `h_αβ` (unscaled) at the fiber part of a point.
    pub fn fiber_metric(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        match &self.fiber {
            Some(f) => metric_at(f.as_ref(), y),
            None => Ok(DMatrix::zeros(0, 0)),
        }
    }

    pub fn fiber(&self) -> Option<&Arc<dyn MetricChart>> {
        self.fiber.as_ref()
    }
}

impl MetricChart for ThermostatChart {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let spec = &self.spec;
        let (n, nf, d) = (spec.base_dim(), spec.fiber_dim(), spec.dim());
        let t = &p[d - 1];
        let tb = spec.base_time(t);
        let gb = spec.base.metric_jets(&p[..n], &tb)?;
        let r = spec.base.scalar_jet(&p[..n], &tb)?;
        let shift = t.recip().scale(spec.time_shift(1.0));
        let mut g = vec![t.zero_like(); d * d];
        for i in 0..n {
            for j in 0..n {
                g[i * d + j] = gb[i * n + j].clone();
            }
        }
        if nf > 0 {
            let y = &p[n..n + nf];
            let f = match spec.variant {
                ThermostatVariant::Hyperbolic => half_space_factor(y, 2.0 * nf as f64),
                _ => stereo_factor(y, 2.0 * nf as f64),
            };
            let ft = &f * t;
            for a in 0..nf {
                g[(n + a) * d + n + a] = ft.clone();
            }
        }
        g[d * d - 1] = &r + &shift;
        Ok(g)
    }

    fn time_dependent(&self) -> bool {
        true
    }

    fn contains(&self, p: &[f64]) -> bool {
        let (x, y, t) = self.split(p);
        t > 0.0 && self.spec.base.contains(x) && self.fiber.as_ref().is_none_or(|f| f.contains(y))
    }

    fn label(&self) -> String {
        let s = &self.spec;
        match s.variant {
            ThermostatVariant::Hyperbolic => format!("hyperbolic thermostat N = {} over {}", s.n_fiber, s.base.label()),
            ThermostatVariant::Spherical => format!("spherical thermostat N = {} over {}", s.n_fiber, s.base.label()),
            ThermostatVariant::Restricted => format!("restricted thermostat N = {} over {}", s.n_fiber, s.base.label()),
        }
    }
}

/// Base-flow quantities entering the closed forms, all at one `(x, t)`.
#[derive(Clone, Debug)]
pub struct BaseData {
    pub t: f64,
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// `Γ^i_jk`; absent for grid flows, which only feed the limit check.
    pub gamma: Option<Tensor>,
    pub riemann: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
    pub d_scalar: Vec<f64>,
    pub dt_scalar: f64,
    pub p: Tensor,
    pub m: Tensor,
}

impl BaseData {
    pub fn from_flow_point(fp: &FlowPoint) -> Self {
        BaseData {
            t: fp.t,
            metric: fp.metric.clone(),
            inverse: fp.inverse.clone(),
            gamma: Some(fp.gamma.clone()),
            riemann: fp.riemann.clone(),
            ricci: fp.ricci.clone(),
            scalar: fp.scalar,
            d_scalar: fp.d_scalar.clone(),
            dt_scalar: fp.dt_scalar,
            p: fp.p.clone(),
            m: fp.m.clone(),
        }
    }

    pub fn at(family: &FlowFamily, x: &[f64], t: f64) -> Result<Self> {
        Ok(Self::from_flow_point(&FlowPoint::new(family, x, t)?))
    }

    /// Surface grid node `j`, orthonormal frame; `∂_t R = ΔR + R²`.
    pub fn from_surface(grid: &SurfaceGrid, j: usize) -> Result<Self> {
        let tri = surface_triple(grid, j)?;
        let sp = grid.point(j);
        let r = sp.scalar;
        Ok(BaseData {
            t: grid.t,
            metric: DMatrix::identity(2, 2),
            inverse: DMatrix::identity(2, 2),
            gamma: None,
            riemann: tri.riemann,
            ricci: Tensor::from_fn(2, 2, |i| if i[0] == i[1] { 0.5 * r } else { 0.0 }),
            scalar: r,
            d_scalar: sp.d_scalar.to_vec(),
            dt_scalar: sp.lap_scalar + r * r,
            p: tri.p,
            m: tri.m,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// `A = R − N/2t`.
    pub fn a(&self, n_fiber: usize) -> f64 {
        self.scalar - n_fiber as f64 / (2.0 * self.t)
    }

    /// `R^i_j = g^ik R_kj` as a matrix `[i][j]`.
    pub fn ricci_mixed(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| self.inverse[(i, k)] * self.ricci.at(&[k, j])).sum())
    }

    /// `g^ij ∂_j R`.
    pub fn grad_scalar(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.inverse[(i, j)] * self.d_scalar[j]).sum()).collect()
    }
}

/// Orthonormal sectional curvature `R_αβαβ / (h_αα h_ββ)` of the scaled
/// fiber at sampled points and planes.
pub fn fiber_curvature(variant: ThermostatVariant, n_fiber: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let chart: Box<dyn MetricChart> = match variant {
        ThermostatVariant::Hyperbolic => Box::new(HalfSpace::thermostat_fiber(n_fiber)),
        ThermostatVariant::Spherical => Box::new(StereoSphere::thermostat_fiber(n_fiber)),
        ThermostatVariant::Restricted => return Err(GeomError::Unsupported("the restricted thermostat has no fiber".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let y: Vec<f64> = (0..n_fiber).map(|_| rng.random_range(0.3..1.5)).collect();
        let a = rng.random_range(0..n_fiber);
        let b = (a + rng.random_range(1..n_fiber)) % n_fiber;
        let r = riemann_sampled(chart.as_ref(), &y, &[[a, b, a, b]])?[0];
        let h = metric_at(chart.as_ref(), &y)?;
        out.push(r / (h[(a, a)] * h[(b, b)]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g00_examples() {
        let flat = ThermostatSpec::hyperbolic(8, FlowFamily::StaticFlat { n: 2 }).unwrap();
        assert_eq!(flat.g00(&[1.0, 1.0], 1.0).unwrap(), -4.0);
        // S² of radius² 1 at t = 1 has R = 2
        let s2 = ThermostatSpec::hyperbolic(16, FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }).unwrap();
        assert!((s2.g00(&[1.0, 0.3], 1.0).unwrap() + 6.0).abs() < 1e-14);
        let r = ThermostatSpec::restricted(16, FlowFamily::ConstantCurvature { n: 3, c0: 3.0 }).unwrap();
        assert_eq!(r.dim(), 4);
    }

    #[test]
    fn chart_blocks() {
        let spec = ThermostatSpec::hyperbolic(4, FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }).unwrap();
        let ch = build_metric(&spec).unwrap();
        let p = ch.point(&[1.0, 0.3], &[0.2, 0.1, -0.4, 0.8], 0.5).unwrap();
        let g = metric_at(&ch, &p).unwrap();
        let d = spec.dim();
        assert_eq!(g[(0, 2)], 0.0);
        assert_eq!(g[(1, d - 1)], 0.0);
        assert_eq!(g[(3, d - 1)], 0.0);
        // t·h with h = 2N / y_N²
        assert!((g[(2, 2)] - 0.5 * 8.0 / 0.64).abs() < 1e-13);
        assert!(g[(d - 1, d - 1)] < 0.0);
    }

    #[test]
    fn degenerate_time_rejected() {
        // flat base: g_00 = −N/2t never vanishes; S² with R(t) = 2/(3 − 2t) does for N = 2 at t ≈ 0.75
        let spec = ThermostatSpec::hyperbolic(2, FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }).unwrap();
        let ch = build_metric(&spec).unwrap();
        assert!(matches!(ch.point(&[1.0, 0.3], &[0.0, 1.0], 0.75), Err(GeomError::Degenerate(_))));
        assert!(matches!(ch.point(&[1.0, 0.3], &[0.0, 1.0], 0.0), Err(GeomError::Domain(_))));
    }

    #[test]
    fn fiber_curvature_values() {
        for n in [4, 8] {
            for k in fiber_curvature(ThermostatVariant::Hyperbolic, n, 5, 1).unwrap() {
                assert!((k + 1.0 / (2.0 * n as f64)).abs() < 1e-12);
            }
            for k in fiber_curvature(ThermostatVariant::Spherical, n, 5, 1).unwrap() {
                assert!((k - 1.0 / (2.0 * n as f64)).abs() < 1e-12);
            }
        }
    }
}
