//! Explicit Ricci flows `∂g/∂t = −2 Ric` and the evolution equations of
//! curvature along them.
//!
//! Closed-form families are evaluated as jets in space and time together,
//! so time derivatives of curvature are exact. The rotationally symmetric
//! surface flow lives on a grid (see [`surface`]).

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chart::models::round_sphere_diagonal;
use crate::chart::{curvature_bundle, curvature_operator_eigs, JetGeometry, MetricChart};
use crate::error::{GeomError, Result};
use crate::jet::{seed_point, Jet};
use crate::tensor::Tensor;

pub mod heat;
pub mod surface;

pub use heat::{heat_residuals, HeatResiduals, PTermPlacement};
use heat::homogeneity_defect;
pub use surface::{flow_surface_rotsym, surface_convergence, SurfaceConvergence, SurfaceGrid, SurfacePoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowFamily {
    /// The static flat torus.
    StaticFlat { n: usize },
    /// `c(t) g_{S^n}` with `c(t) = c0 − 2(n−1)t`.
    ConstantCurvature { n: usize, c0: f64 },
    /// `c1(t) g_{S²} + c2(t) g_{S²}` with `c_i(t) = c_i − 2t`.
    ProductSpheres { c1: f64, c2: f64 },
    /// Hamilton's cigar `δ / (e^{4t} + |x|²)` on the plane: a steady soliton
    /// whose scalar curvature is not constant in space.
    Cigar,
    /// `e^{2u(θ,t)} g_{S²}` on a grid of `grid` intervals in θ, starting from
    /// `u = amplitude · cos θ`.
    SurfaceRotsym { grid: usize, amplitude: f64 },
}

impl FlowFamily {
    pub fn dim(&self) -> usize {
        match *self {
            FlowFamily::StaticFlat { n } | FlowFamily::ConstantCurvature { n, .. } => n,
            FlowFamily::ProductSpheres { .. } => 4,
            FlowFamily::Cigar | FlowFamily::SurfaceRotsym { .. } => 2,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FlowFamily::StaticFlat { n } => format!("static flat T^{n}"),
            FlowFamily::ConstantCurvature { n, c0 } => format!("shrinking S^{n} (c0 = {c0})"),
            FlowFamily::ProductSpheres { c1, c2 } => format!("shrinking S^2 x S^2 (c = {c1}, {c2})"),
            FlowFamily::Cigar => "cigar soliton".into(),
            FlowFamily::SurfaceRotsym { grid, amplitude } => {
                format!("rotationally symmetric S^2 (u0 = {amplitude} cos θ, {grid} intervals)")
            }
        }
    }

    /// Closed-form families can be evaluated as jets.
    pub fn closed_form(&self) -> bool {
        !matches!(self, FlowFamily::SurfaceRotsym { .. })
    }

    /// Curvature is parallel, so every covariant derivative of it vanishes.
    pub fn homogeneous(&self) -> bool {
        matches!(
            self,
            FlowFamily::StaticFlat { .. } | FlowFamily::ConstantCurvature { .. } | FlowFamily::ProductSpheres { .. }
        )
    }

    /// Scale factors of the sphere factors at time `t`.
    pub fn scales(&self, t: f64) -> Vec<f64> {
        match *self {
            FlowFamily::ConstantCurvature { n, c0 } => vec![c0 - 2.0 * (n as f64 - 1.0) * t],
            FlowFamily::ProductSpheres { c1, c2 } => vec![c1 - 2.0 * t, c2 - 2.0 * t],
            _ => vec![],
        }
    }

    /// First time at which the flow stops existing.
    pub fn extinction_time(&self) -> f64 {
        match *self {
            FlowFamily::StaticFlat { .. } | FlowFamily::Cigar => f64::INFINITY,
            FlowFamily::ConstantCurvature { n, c0 } => c0 / (2.0 * (n as f64 - 1.0)),
            FlowFamily::ProductSpheres { c1, c2 } => c1.min(c2) / 2.0,
            // Gauss–Bonnet: dA/dt = −8π
            FlowFamily::SurfaceRotsym { grid, amplitude } => SurfaceGrid::initial(grid, amplitude).area() / (8.0 * PI),
        }
    }

    /// A time inside the existence interval of the closed form.
    pub fn check_time(&self, t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(GeomError::Domain(format!("flow time {t} outside (0, T]")));
        }
        let ext = self.extinction_time();
        if t >= ext {
            return Err(GeomError::Extinction { extinction: ext, msg: format!("{} at t = {t}", self.label()) });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            FlowFamily::ConstantCurvature { n, .. } => x[..n - 1].iter().all(|&a| a > 0.0 && a < PI),
            FlowFamily::ProductSpheres { .. } => [x[0], x[2]].iter().all(|&a| a > 0.0 && a < PI),
            FlowFamily::StaticFlat { .. } => x.iter().all(|v| (0.0..2.0 * PI).contains(v)),
            _ => true,
        }
    }

    /// A point away from coordinate singularities.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vec<f64> {
        let angle = |rng: &mut dyn rand::RngCore| rng.random_range(0.5..PI - 0.5);
        match *self {
            FlowFamily::StaticFlat { n } => (0..n).map(|_| rng.random_range(0.5..5.5)).collect(),
            FlowFamily::ConstantCurvature { n, .. } => {
                let mut x: Vec<f64> = (0..n - 1).map(|_| angle(rng)).collect();
                x.push(rng.random_range(0.0..2.0 * PI));
                x
            }
            FlowFamily::ProductSpheres { .. } => {
                vec![angle(rng), rng.random_range(0.0..2.0 * PI), angle(rng), rng.random_range(0.0..2.0 * PI)]
            }
            FlowFamily::Cigar => (0..2).map(|_| rng.random_range(-1.5..1.5)).collect(),
            FlowFamily::SurfaceRotsym { .. } => vec![angle(rng), rng.random_range(0.0..2.0 * PI)],
        }
    }

    /// Metric components at a jet-valued point and time.
    pub fn metric_jets(&self, x: &[Jet], t: &Jet) -> Result<Vec<Jet>> {
        let n = self.dim();
        let zero = x[0].constant_like(0.0);
        let mut g = vec![zero; n * n];
        let positive = |c: &Jet| -> Result<()> {
            if c.value() <= 0.0 {
                Err(GeomError::Extinction { extinction: self.extinction_time(), msg: self.label() })
            } else {
                Ok(())
            }
        };
        match *self {
            FlowFamily::StaticFlat { .. } => {
                for i in 0..n {
                    g[i * n + i] = x[0].constant_like(1.0);
                }
            }
            FlowFamily::ConstantCurvature { n, c0 } => {
                let c = (t * (-2.0 * (n as f64 - 1.0))) + c0;
                positive(&c)?;
                for (i, d) in round_sphere_diagonal(x).into_iter().enumerate() {
                    g[i * n + i] = &d * &c;
                }
            }
            FlowFamily::ProductSpheres { c1, c2 } => {
                for (k, c0) in [c1, c2].into_iter().enumerate() {
                    let c = (t * -2.0) + c0;
                    positive(&c)?;
                    for (i, d) in round_sphere_diagonal(&x[2 * k..2 * k + 2]).into_iter().enumerate() {
                        let a = 2 * k + i;
                        g[a * n + a] = &d * &c;
                    }
                }
            }
            FlowFamily::Cigar => {
                let f = cigar_denominator(x, t).recip();
                g[0] = f.clone();
                g[3] = f;
            }
            FlowFamily::SurfaceRotsym { .. } => {
                return Err(GeomError::Unsupported("surface flow has no closed form; use its grid".into()));
            }
        }
        Ok(g)
    }

    /// Scalar curvature from the closed form, as a jet.
    pub fn scalar_jet(&self, x: &[Jet], t: &Jet) -> Result<Jet> {
        Ok(match *self {
            FlowFamily::StaticFlat { .. } => x[0].constant_like(0.0),
            FlowFamily::ConstantCurvature { n, c0 } => {
                let c = (t * (-2.0 * (n as f64 - 1.0))) + c0;
                c.recip().scale((n * (n - 1)) as f64)
            }
            FlowFamily::ProductSpheres { c1, c2 } => {
                ((t * -2.0) + c1).recip().scale(2.0) + ((t * -2.0) + c2).recip().scale(2.0)
            }
            FlowFamily::Cigar => {
                let e = (t * 4.0).exp();
                (&e * &cigar_denominator(x, t).recip()).scale(4.0)
            }
            FlowFamily::SurfaceRotsym { .. } => {
                return Err(GeomError::Unsupported("surface flow has no closed form; use its grid".into()));
            }
        })
    }
}

fn cigar_denominator(x: &[Jet], t: &Jet) -> Jet {
    &(&(t * 4.0).exp() + &(&x[0] * &x[0])) + &(&x[1] * &x[1])
}

/// The metric of a closed-form family frozen at one time.
#[derive(Clone, Debug)]
pub struct SnapshotChart {
    pub family: FlowFamily,
    pub t: f64,
}

impl MetricChart for SnapshotChart {
    fn dim(&self) -> usize {
        self.family.dim()
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        self.family.metric_jets(p, &p[0].constant_like(self.t))
    }
    fn contains(&self, p: &[f64]) -> bool {
        self.family.contains(p)
    }
    fn label(&self) -> String {
        format!("{} at t = {}", self.family.label(), self.t)
    }
}

#[derive(Clone)]
pub struct FlowSnapshot {
    pub family: FlowFamily,
    pub t: f64,
    pub chart: Arc<dyn MetricChart>,
}

impl FlowSnapshot {
    /// `∂g/∂t` at a point, exact.
    pub fn time_derivative(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.family.dim();
        let mut p = x.to_vec();
        p.push(self.t);
        let jets = seed_point(&p, &[n], 1);
        let g = self.family.metric_jets(&jets[..n], &jets[n])?;
        Ok(DMatrix::from_fn(n, n, |a, b| g[a * n + b].partial(&[0])))
    }

    /// JSON record of the snapshot parameters.
    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({ "family": self.family, "t": self.t, "scales": self.family.scales(self.t) })
    }
}

pub fn flow_closed_form(family: &FlowFamily, t: f64) -> Result<FlowSnapshot> {
    if !family.closed_form() {
        return Err(GeomError::Unsupported(format!("{} has no closed form", family.label())));
    }
    family.check_time(t)?;
    Ok(FlowSnapshot { family: family.clone(), t, chart: Arc::new(SnapshotChart { family: family.clone(), t }) })
}

/// Geometry of a closed-form flow at one space-time point, from order-4 jets
/// in `(x, t)`. All tensors are coordinate components.
pub struct FlowPoint {
    pub family: FlowFamily,
    pub x: Vec<f64>,
    pub t: f64,
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub dt_metric: Tensor,
    pub gamma: Tensor,
    pub riemann: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
    /// Scalar curvature from the family's closed form.
    pub scalar_closed: f64,
    pub d_scalar: Vec<f64>,
    pub dt_scalar: f64,
    pub dt_ricci: Tensor,
    pub dt_riemann: Tensor,
    /// `∇_e R_abcd`, derivative index first.
    pub nabla_riemann: Tensor,
    /// `∇_e R_ab`.
    pub nabla_ricci: Tensor,
    pub hess_scalar: Tensor,
    pub lap_scalar: f64,
    pub lap_ricci: Tensor,
    pub lap_riemann: Tensor,
    /// `P_ijk = ∇_i R_jk − ∇_j R_ik`.
    pub p: Tensor,
    /// `∇_e P_ijk`.
    pub nabla_p: Tensor,
    pub dt_p: Tensor,
    pub m: Tensor,
    pub(crate) geo: JetGeometry,
    pub(crate) time_var: Jet,
}

impl FlowPoint {
    pub fn new(family: &FlowFamily, x: &[f64], t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(GeomError::Domain(format!("Harnack tensors need t > 0, got {t}")));
        }
        let n = family.dim();
        if x.len() != n || !family.contains(x) {
            return Err(GeomError::Domain(format!("{x:?} outside the chart of {}", family.label())));
        }
        let mut p = x.to_vec();
        p.push(t);
        let jets = seed_point(&p, &(0..=n).collect::<Vec<_>>(), 4);
        let geo = JetGeometry::from_metric(n, family.metric_jets(&jets[..n], &jets[n])?)?;
        let scalar_closed = family.scalar_jet(&jets[..n], &jets[n])?.value();
        let time_var = jets[n].clone();

        let ginv = geo.inverse_values();
        let scalar_t = Tensor::from_vec(n, 0, vec![geo.scalar.clone()]);
        let nr = geo.nabla(&geo.ricci);
        let p_jet = Tensor::from_fn(n, 3, |i| nr.get(&[i[0], i[1], i[2]]) - nr.get(&[i[1], i[0], i[2]]));
        let ricci = geo.ricci.values();
        let riemann = geo.riemann.values();
        let hess_scalar = geo.nabla(&geo.nabla(&scalar_t)).values();
        let lap_ricci = geo.laplacian(&geo.ricci).values();
        let quad = ricci_quadratic(&riemann, &ricci, &ginv);
        let m = Tensor::from_fn(n, 2, |i| {
            let (a, b) = (i[0], i[1]);
            lap_ricci.at(&[a, b]) - 0.5 * hess_scalar.at(&[a, b]) + 2.0 * quad.rm_ric.at(&[a, b])
                - quad.ric_ric.at(&[a, b])
                + ricci.at(&[a, b]) / (2.0 * t)
        });
        Ok(FlowPoint {
            family: family.clone(),
            x: x.to_vec(),
            t,
            metric: DMatrix::from_fn(n, n, |a, b| geo.g.get(&[a, b]).value()),
            dt_metric: geo.g.partial(n).values(),
            gamma: geo.gamma.values(),
            scalar: geo.scalar.value(),
            scalar_closed,
            d_scalar: (0..n).map(|i| geo.scalar.partial(&[i])).collect(),
            dt_scalar: geo.scalar.partial(&[n]),
            dt_ricci: geo.ricci.partial(n).values(),
            dt_riemann: geo.riemann.partial(n).values(),
            nabla_riemann: geo.nabla(&geo.riemann).values(),
            nabla_ricci: nr.values(),
            lap_scalar: lap_trace(&hess_scalar, &ginv),
            hess_scalar,
            lap_riemann: geo.laplacian(&geo.riemann).values(),
            nabla_p: geo.nabla(&p_jet).values(),
            dt_p: p_jet.partial(n).values(),
            p: p_jet.values(),
            lap_ricci,
            m,
            riemann,
            ricci,
            inverse: ginv,
            geo,
            time_var,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// `R^m_i = g^mp R_pi`, as a matrix `[m][i]`.
    pub fn ricci_mixed(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |m, i| (0..n).map(|p| self.inverse[(m, p)] * self.ricci.at(&[p, i])).sum())
    }

    /// Largest `|∇Rm|` component: zero on homogeneous flows.
    pub fn gradient_size(&self) -> f64 {
        self.nabla_riemann.max_abs()
    }

    /// Minimum eigenvalue of the curvature operator.
    pub fn operator_min_eig(&self) -> f64 {
        curvature_operator_eigs(&self.riemann, &self.metric).min()
    }
}

fn lap_trace(h: &Tensor, ginv: &DMatrix<f64>) -> f64 {
    let n = h.dim();
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| ginv[(a, b)] * h.at(&[a, b])).sum()
}

/// `R_ikjl R^kl` and `R_ik R^k_j`.
pub(crate) struct RicciQuadratic {
    pub rm_ric: Tensor,
    pub ric_ric: Tensor,
}

pub(crate) fn ricci_quadratic(rm: &Tensor, ric: &Tensor, ginv: &DMatrix<f64>) -> RicciQuadratic {
    let n = rm.dim();
    let up = raise_two(ric, ginv);
    let rm_ric = Tensor::from_fn(n, 2, |i| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += rm.at(&[i[0], k, i[1], l]) * up.at(&[k, l]);
            }
        }
        s
    });
    let ric_ric = Tensor::from_fn(n, 2, |i| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += ric.at(&[i[0], k]) * ginv[(k, l)] * ric.at(&[l, i[1]]);
            }
        }
        s
    });
    RicciQuadratic { rm_ric, ric_ric }
}

/// `T^ab = g^ac g^bd T_cd`.
pub(crate) fn raise_two(t: &Tensor, ginv: &DMatrix<f64>) -> Tensor {
    let n = t.dim();
    Tensor::from_fn(n, 2, |i| {
        let mut s = 0.0;
        for c in 0..n {
            for d in 0..n {
                s += ginv[(i[0], c)] * ginv[(i[1], d)] * t.at(&[c, d]);
            }
        }
        s
    })
}

/// `B_ijkl = R_imjn R_k^m_l^n = g^mp g^nq R_imjn R_kplq`.
pub(crate) fn b_tensor(rm: &Tensor, ginv: &DMatrix<f64>) -> Tensor {
    let n = rm.dim();
    // T[k][m][l][n] = g^mp g^nq R_kplq
    let t = Tensor::from_fn(n, 4, |i| {
        let (k, m, l, nn) = (i[0], i[1], i[2], i[3]);
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += ginv[(m, p)] * ginv[(nn, q)] * rm.at(&[k, p, l, q]);
            }
        }
        s
    });
    Tensor::from_fn(n, 4, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut s = 0.0;
        for m in 0..n {
            for nn in 0..n {
                s += rm.at(&[a, m, b, nn]) * t.at(&[c, m, d, nn]);
            }
        }
        s
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionEquation {
    Metric,
    Riemann,
    Ricci,
    Scalar,
    HeatP,
    HeatM,
}

/// Max-abs residuals of the evolution equations at one point.
#[derive(Clone, Debug, Serialize)]
pub struct EvolutionResiduals {
    /// `∂g/∂t + 2 Ric`.
    pub metric: f64,
    pub riemann: f64,
    pub ricci: f64,
    pub scalar: f64,
    /// Residuals of the P and M heat equations, with the variants that
    /// settle their sign and index conventions.
    pub heat: HeatResiduals,
    /// `|M − M_algebraic|` and `|∇Rm|`, only on homogeneous flows.
    pub homogeneity: Option<f64>,
}

impl EvolutionResiduals {
    pub fn get(&self, which: EvolutionEquation) -> f64 {
        match which {
            EvolutionEquation::Metric => self.metric,
            EvolutionEquation::Riemann => self.riemann,
            EvolutionEquation::Ricci => self.ricci,
            EvolutionEquation::Scalar => self.scalar,
            EvolutionEquation::HeatP => self.heat.p,
            EvolutionEquation::HeatM => self.heat.m,
        }
    }
}

pub fn evolution_residuals(snapshot: &FlowSnapshot, x: &[f64]) -> Result<EvolutionResiduals> {
    FlowPoint::new(&snapshot.family, x, snapshot.t)?.evolution_residuals()
}

impl FlowPoint {
    pub fn evolution_residuals(&self) -> Result<EvolutionResiduals> {
        let n = self.dim();
        let ginv = &self.inverse;
        let rm = &self.riemann;
        let ric = &self.ricci;
        let rmix = self.ricci_mixed();

        let metric = self.dt_metric.add(&ric.scaled(2.0)).max_abs();

        let b = b_tensor(rm, ginv);
        let riemann = Tensor::from_fn(n, 4, |idx| {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let mut rhs = self.lap_riemann.at(idx)
                + 2.0 * (b.at(&[i, j, k, l]) - b.at(&[i, j, l, k]) + b.at(&[i, k, j, l]) - b.at(&[i, l, j, k]));
            for m in 0..n {
                rhs += -rmix[(m, l)] * rm.at(&[i, j, k, m]) + rmix[(m, k)] * rm.at(&[i, j, l, m])
                    - rmix[(m, j)] * rm.at(&[k, l, i, m])
                    + rmix[(m, i)] * rm.at(&[k, l, j, m]);
            }
            self.dt_riemann.at(idx) - rhs
        })
        .max_abs();

        let quad = ricci_quadratic(rm, ric, ginv);
        let ricci = Tensor::from_fn(n, 2, |i| {
            self.dt_ricci.at(i) - (self.lap_ricci.at(i) - 2.0 * quad.ric_ric.at(i) + 2.0 * quad.rm_ric.at(i))
        })
        .max_abs();

        let ric_up = raise_two(ric, ginv);
        let ric_sq: f64 = (0..n * n).map(|f| ric.data()[f] * ric_up.data()[f]).sum();
        let scalar = (self.dt_scalar - self.lap_scalar - 2.0 * ric_sq).abs();

        Ok(EvolutionResiduals {
            metric,
            riemann,
            ricci,
            scalar,
            heat: heat_residuals(self)?,
            homogeneity: self.family.homogeneous().then(|| homogeneity_defect(self)),
        })
    }
}

/// Scalar diagnostics of a flow at one time.
#[derive(Clone, Debug, Serialize)]
pub struct FlowDiagnostics {
    pub t: f64,
    pub scalar_min: f64,
    pub scalar_max: f64,
    pub operator_min_eig: f64,
}

/// Diagnostics over sample points of a closed-form family.
pub fn closed_form_diagnostics(family: &FlowFamily, t: f64, points: &[Vec<f64>]) -> Result<FlowDiagnostics> {
    let snap = flow_closed_form(family, t)?;
    let mut d = FlowDiagnostics { t, scalar_min: f64::INFINITY, scalar_max: f64::NEG_INFINITY, operator_min_eig: f64::INFINITY };
    for x in points {
        let b = curvature_bundle(snap.chart.as_ref(), x)?;
        d.scalar_min = d.scalar_min.min(b.scalar);
        d.scalar_max = d.scalar_max.max(b.scalar);
        d.operator_min_eig = d.operator_min_eig.min(curvature_operator_eigs(&b.riemann, &b.metric).min());
    }
    Ok(d)
}

pub fn diagnostics_csv(rows: &[FlowDiagnostics]) -> String {
    let mut s = String::from("t,scalar_min,scalar_max,operator_min_eig\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.t, r.scalar_min, r.scalar_max, r.operator_min_eig));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinking_sphere_closed_form() {
        let f = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        let s = flow_closed_form(&f, 1.0).unwrap();
        let b = curvature_bundle(s.chart.as_ref(), &[1.0, 0.3]).unwrap();
        assert!((b.scalar - 2.0).abs() < 1e-12);
        assert!(matches!(flow_closed_form(&f, 1.6), Err(GeomError::Extinction { .. })));
    }

    #[test]
    fn product_scales() {
        let f = FlowFamily::ProductSpheres { c1: 4.0, c2: 2.0 };
        assert_eq!(f.scales(0.5), vec![3.0, 1.0]);
        let s = flow_closed_form(&f, 0.5).unwrap();
        let b = curvature_bundle(s.chart.as_ref(), &[1.0, 0.3, 1.2, 2.0]).unwrap();
        // mixed plane (θ1, θ2) is flat
        assert!(b.riemann.at(&[0, 2, 0, 2]).abs() < 1e-12);
    }

    #[test]
    fn evolution_equations_on_closed_forms() {
        for (f, x, t) in [
            (FlowFamily::ConstantCurvature { n: 3, c0: 2.0 }, vec![1.0, 1.3, 0.4], 0.1),
            (FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }, vec![1.0, 0.4], 1.0),
            (FlowFamily::Cigar, vec![0.3, -0.7], 0.2),
        ] {
            let fp = FlowPoint::new(&f, &x, t).unwrap();
            let r = fp.evolution_residuals().unwrap();
            assert!((fp.scalar - fp.scalar_closed).abs() < 1e-10, "{f:?}");
            assert!(r.metric < 1e-10 && r.riemann < 1e-8 && r.ricci < 1e-8 && r.scalar < 1e-8, "{f:?} {r:?}");
            let tol = if f.homogeneous() { 1e-8 } else { 1e-6 };
            assert!(r.heat.m < tol && r.heat.p < tol, "{f:?} {r:?}");
        }
    }
}
