//! Coordinate charts, Christoffel symbols and curvature.
//!
//! Conventions: `Γ^a_bc = ½ g^ad (∂_b g_cd + ∂_c g_bd − ∂_d g_bc)`,
//! `R_abcd = g_df (∂_b Γ^f_ac − ∂_a Γ^f_bc + Γ^e_ac Γ^f_be − Γ^e_bc Γ^f_ae)`,
//! `R_ij = g^kl R_ikjl`. Round spheres have `R_ijij > 0`.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::jet::{seed_point, Jet};
use crate::tensor::Tensor;

mod fd;
mod jetgeom;
pub mod models;

pub use fd::{christoffel_fd, riemann_fd, FdCurvatureCheck};
pub use jetgeom::{bianchi_residuals, covariant_derivative, BianchiResiduals, JetGeometry};

/// Dense curvature is computed up to this chart dimension; larger charts
/// only support sampled components.
pub const DENSE_DIM_CAP: usize = 32;

/// A metric in one coordinate chart.
pub trait MetricChart: Send + Sync {
    fn dim(&self) -> usize;
    /// Row-major `dim × dim` components at a jet-valued point.
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>>;
    fn time_dependent(&self) -> bool {
        false
    }
    fn contains(&self, _p: &[f64]) -> bool {
        true
    }
    fn label(&self) -> String;
}

/// Evaluate the components as jets in the `active` coordinates.
pub fn eval_components(chart: &dyn MetricChart, p: &[f64], active: &[usize], order: usize) -> Result<Vec<Jet>> {
    let n = chart.dim();
    if p.len() != n {
        return Err(GeomError::Domain(format!("point has {} coordinates, chart has {n}", p.len())));
    }
    if !chart.contains(p) {
        return Err(GeomError::Domain(format!("{p:?} outside {}", chart.label())));
    }
    let x = seed_point(p, active, order);
    let g = chart.components(&x)?;
    if g.len() != n * n {
        return Err(GeomError::Unsupported(format!("{} returned {} components", chart.label(), g.len())));
    }
    if g.iter().any(|j| !j.is_finite()) {
        return Err(GeomError::Domain(format!("non-finite metric of {} at {p:?}", chart.label())));
    }
    for a in 0..n {
        for b in 0..a {
            let (x, y) = (g[a * n + b].value(), g[b * n + a].value());
            if (x - y).abs() > 1e-14 * x.abs().max(y.abs()).max(1.0) {
                return Err(GeomError::Domain(format!("asymmetric metric component ({a},{b})")));
            }
        }
    }
    Ok(g)
}

pub fn metric_at(chart: &dyn MetricChart, p: &[f64]) -> Result<DMatrix<f64>> {
    let n = chart.dim();
    let x: Vec<Jet> = p.iter().map(|&v| Jet::constant(0, 0, v)).collect();
    if p.len() != n || !chart.contains(p) {
        return Err(GeomError::Domain(format!("{p:?} outside {}", chart.label())));
    }
    let g = chart.components(&x)?;
    if g.iter().any(|j| !j.value().is_finite()) {
        return Err(GeomError::Domain(format!("non-finite metric of {} at {p:?}", chart.label())));
    }
    Ok(DMatrix::from_fn(n, n, |a, b| g[a * n + b].value()))
}

/// Inverse with a conditioning guard; indefinite matrices are fine.
pub fn invert_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sv = g.clone().singular_values();
    let (mx, mn) = (sv.max(), sv.min());
    if !(mn > 1e-13 * mx) {
        return Err(GeomError::Degenerate(format!("singular values span [{mn:e}, {mx:e}]")));
    }
    g.clone().try_inverse().ok_or_else(|| GeomError::Degenerate("inverse failed".into()))
}

/// Metric, inverse, first derivatives and (some) second derivatives at a point.
pub struct MetricDerivs {
    pub n: usize,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    dg: Vec<f64>,
    ddg: HashMap<(usize, usize), Vec<f64>>,
}

impl MetricDerivs {
    /// All first and second derivatives, from two-coordinate jets.
    pub fn dense(chart: &dyn MetricChart, p: &[f64]) -> Result<Self> {
        let n = chart.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|c| (c..n).map(move |d| (c, d))).collect();
        Self::for_pairs(chart, p, &pairs)
    }

    /// First derivatives everywhere, second derivatives only along `pairs`.
    pub fn for_pairs(chart: &dyn MetricChart, p: &[f64], pairs: &[(usize, usize)]) -> Result<Self> {
        let n = chart.dim();
        let g0 = metric_at(chart, p)?;
        let ginv = invert_metric(&g0)?;
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = HashMap::new();
        let mut have_first = vec![false; n];
        for &(c0, d0) in pairs {
            let (c, d) = (c0.min(d0), c0.max(d0));
            if ddg.contains_key(&(c, d)) {
                continue;
            }
            if c == d {
                let g = eval_components(chart, p, &[c], 2)?;
                ddg.insert((c, c), g.iter().map(|j| j.partial(&[0, 0])).collect());
                for (k, j) in g.iter().enumerate() {
                    dg[c * n * n + k] = j.partial(&[0]);
                }
                have_first[c] = true;
            } else {
                let g = eval_components(chart, p, &[c, d], 2)?;
                ddg.insert((c, d), g.iter().map(|j| j.partial(&[0, 1])).collect());
                ddg.entry((c, c)).or_insert_with(|| g.iter().map(|j| j.partial(&[0, 0])).collect());
                ddg.entry((d, d)).or_insert_with(|| g.iter().map(|j| j.partial(&[1, 1])).collect());
                for (k, j) in g.iter().enumerate() {
                    dg[c * n * n + k] = j.partial(&[0]);
                    dg[d * n * n + k] = j.partial(&[1]);
                }
                have_first[c] = true;
                have_first[d] = true;
            }
        }
        for c in (0..n).filter(|&c| !have_first[c]) {
            let g = eval_components(chart, p, &[c], 1)?;
            for (k, j) in g.iter().enumerate() {
                dg[c * n * n + k] = j.partial(&[0]);
            }
        }
        Ok(MetricDerivs { n, g: g0, ginv, dg, ddg })
    }

    /// `∂_c g_ab`
    pub fn dg(&self, c: usize, a: usize, b: usize) -> f64 {
        self.dg[(c * self.n + a) * self.n + b]
    }

    /// `∂_c ∂_d g_ab`; panics when the pair was not requested.
    pub fn ddg(&self, c: usize, d: usize, a: usize, b: usize) -> f64 {
        let key = (c.min(d), c.max(d));
        let block = self.ddg.get(&key).unwrap_or_else(|| panic!("second derivative pair {key:?} not evaluated"));
        block[a * self.n + b]
    }

    /// Christoffel symbols of the first kind `Γ_dbc = g_da Γ^a_bc`, indexed `[d][b][c]`.
    pub fn christoffel_first(&self) -> Tensor {
        Tensor::from_fn(self.n, 3, |i| {
            let (d, b, c) = (i[0], i[1], i[2]);
            0.5 * (self.dg(b, c, d) + self.dg(c, b, d) - self.dg(d, b, c))
        })
    }

    /// `Γ^a_bc`, indexed `[a][b][c]`.
    pub fn christoffel(&self) -> Tensor {
        let g1 = self.christoffel_first();
        let n = self.n;
        Tensor::from_fn(n, 3, |i| (0..n).map(|d| self.ginv[(i[0], d)] * g1.at(&[d, i[1], i[2]])).sum())
    }

    /// One component `R_abcd` given both kinds of Christoffel symbols.
    pub fn riemann_component(&self, g1: &Tensor, g2: &Tensor, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let second =
            0.5 * (self.ddg(b, c, a, d) - self.ddg(b, d, a, c) - self.ddg(a, c, b, d) + self.ddg(a, d, b, c));
        let quad: f64 = (0..self.n).map(|f| g1.at(&[f, a, d]) * g2.at(&[f, b, c]) - g1.at(&[f, b, d]) * g2.at(&[f, a, c])).sum();
        second + quad
    }

    pub fn riemann(&self) -> Tensor {
        let g1 = self.christoffel_first();
        let g2 = self.christoffel();
        let n = self.n;
        let mut r = Tensor::zeros(n, 4);
        // fill a<b, c<d and use the pair antisymmetries
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    for d in c + 1..n {
                        let v = self.riemann_component(&g1, &g2, a, b, c, d);
                        r.set(&[a, b, c, d], v);
                        r.set(&[b, a, c, d], -v);
                        r.set(&[a, b, d, c], -v);
                        r.set(&[b, a, d, c], v);
                    }
                }
            }
        }
        r
    }
}

/// Γ, Rm, Ric and R at one point.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub inverse_metric: DMatrix<f64>,
    pub gamma: Tensor,
    pub riemann: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
}

fn dense_guard(chart: &dyn MetricChart) -> Result<()> {
    if chart.dim() > DENSE_DIM_CAP {
        return Err(GeomError::Unsupported(format!(
            "dense curvature of a {}-dimensional chart (cap {DENSE_DIM_CAP}); use sampled components",
            chart.dim()
        )));
    }
    Ok(())
}

pub fn christoffel(chart: &dyn MetricChart, point: &[f64]) -> Result<Tensor> {
    Ok(MetricDerivs::for_pairs(chart, point, &[])?.christoffel())
}

pub fn riemann(chart: &dyn MetricChart, point: &[f64]) -> Result<Tensor> {
    dense_guard(chart)?;
    Ok(MetricDerivs::dense(chart, point)?.riemann())
}

/// Selected Riemann components `R_abcd` without forming the dense tensor.
pub fn riemann_sampled(chart: &dyn MetricChart, point: &[f64], tuples: &[[usize; 4]]) -> Result<Vec<f64>> {
    let mut pairs = Vec::new();
    for t in tuples {
        for &(x, y) in &[(t[1], t[2]), (t[1], t[3]), (t[0], t[2]), (t[0], t[3])] {
            pairs.push((x.min(y), x.max(y)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let md = MetricDerivs::for_pairs(chart, point, &pairs)?;
    let g1 = md.christoffel_first();
    let g2 = md.christoffel();
    Ok(tuples.iter().map(|t| md.riemann_component(&g1, &g2, t[0], t[1], t[2], t[3])).collect())
}

/// `R_ij = g^kl R_ikjl` and `R = g^ij R_ij`.
pub fn contract_curvature(riemann: &Tensor, inverse_metric: &DMatrix<f64>) -> (Tensor, f64) {
    let n = riemann.dim();
    let ric = Tensor::from_fn(n, 2, |i| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += inverse_metric[(k, l)] * riemann.at(&[i[0], k, i[1], l]);
            }
        }
        s
    });
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            r += inverse_metric[(i, j)] * ric.at(&[i, j]);
        }
    }
    (ric, r)
}

pub fn curvature_bundle(chart: &dyn MetricChart, point: &[f64]) -> Result<CurvatureBundle> {
    dense_guard(chart)?;
    let md = MetricDerivs::dense(chart, point)?;
    let gamma = md.christoffel();
    let riemann = md.riemann();
    let (ricci, scalar) = contract_curvature(&riemann, &md.ginv);
    Ok(CurvatureBundle {
        point: point.to_vec(),
        metric: md.g.clone(),
        inverse_metric: md.ginv.clone(),
        gamma,
        riemann,
        ricci,
        scalar,
    })
}

impl CurvatureBundle {
    /// Largest violation of the pair symmetries and the first Bianchi identity.
    pub fn symmetry_residuals(&self) -> (f64, f64) {
        let r = &self.riemann;
        let n = r.dim();
        let (mut sym, mut bianchi) = (0.0_f64, 0.0_f64);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = r.at(&[a, b, c, d]);
                        sym = sym
                            .max((v + r.at(&[b, a, c, d])).abs())
                            .max((v + r.at(&[a, b, d, c])).abs())
                            .max((v - r.at(&[c, d, a, b])).abs());
                        bianchi = bianchi.max((v + r.at(&[b, c, a, d]) + r.at(&[c, a, b, d])).abs());
                    }
                }
            }
        }
        (sym, bianchi)
    }
}

/// Eigenvalues of the curvature operator on 2-forms, ascending.
#[derive(Clone, Debug)]
pub struct OperatorEigs {
    pub values: Vec<f64>,
    /// The metric was not positive definite, so the raw coordinate 2-form
    /// basis was used with the identity as auxiliary inner product.
    pub indefinite: bool,
}

impl OperatorEigs {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn weakly_positive(&self, tol: f64) -> bool {
        self.min() >= -tol
    }
}

/// Index pairs `a < b` spanning 2-forms.
pub fn two_form_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Symmetric eigenvalues in ascending order.
pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of `Z[(ab),(cd)] = R(e_a, e_b, e_c, e_d)` for a g-orthonormal frame.
pub fn curvature_operator_eigs(riemann: &Tensor, metric_at_point: &DMatrix<f64>) -> OperatorEigs {
    let n = riemann.dim();
    let pairs = two_form_pairs(n);
    let (frame, indefinite) = match orthonormal_frame(metric_at_point) {
        Some(f) => (f, false),
        None => (DMatrix::identity(n, n), true),
    };
    let rf = frame_transform(riemann, &frame);
    let m = DMatrix::from_fn(pairs.len(), pairs.len(), |p, q| {
        let ((a, b), (c, d)) = (pairs[p], pairs[q]);
        rf.at(&[a, b, c, d])
    });
    OperatorEigs { values: sorted_eigenvalues(m), indefinite }
}

/// Columns form a g-orthonormal frame; `None` unless g is positive definite.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    // g = L Lᵀ, so the columns of L^{-T} are orthonormal
    let l = g.clone().cholesky()?.l();
    Some(l.try_inverse()?.transpose())
}

/// Components `T(e_a, e_b, ...)` for frame vectors `e_a = Σ_i frame[(i, a)] ∂_i`.
pub fn frame_transform(t: &Tensor, frame: &DMatrix<f64>) -> Tensor {
    let n = t.dim();
    let mut cur = t.clone();
    for slot in 0..t.rank() {
        cur = Tensor::from_fn(n, t.rank(), |idx| {
            let mut j = idx.to_vec();
            (0..n)
                .map(|i| {
                    j[slot] = i;
                    frame[(i, idx[slot])] * cur.at(&j)
                })
                .sum()
        });
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::models::{Euclidean, RoundSphere};
    use super::*;

    #[test]
    fn flat_chart_has_no_curvature() {
        let b = curvature_bundle(&Euclidean::new(3), &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(b.gamma.max_abs(), 0.0);
        assert_eq!(b.riemann.max_abs(), 0.0);
        assert_eq!(b.scalar, 0.0);
    }

    #[test]
    fn unit_two_sphere() {
        let s2 = RoundSphere::new(2, 1.0);
        let th = std::f64::consts::FRAC_PI_4;
        let gam = christoffel(&s2, &[th, 0.2]).unwrap();
        assert!((gam.at(&[0, 1, 1]) + 0.5).abs() < 1e-14);
        let b = curvature_bundle(&s2, &[th, 0.2]).unwrap();
        // orthonormal R_1212 = R_θφθφ / (g_θθ g_φφ)
        let k = b.riemann.at(&[0, 1, 0, 1]) / (b.metric[(0, 0)] * b.metric[(1, 1)]);
        assert!((k - 1.0).abs() < 1e-13);
        assert!((b.scalar - 2.0).abs() < 1e-13);
        assert!(b.ricci.max_abs_diff(&Tensor::from_fn(2, 2, |i| b.metric[(i[0], i[1])])) < 1e-13);
    }

    #[test]
    fn unit_three_sphere_operator() {
        let s3 = RoundSphere::new(3, 1.0);
        let b = curvature_bundle(&s3, &[1.0, 0.8, 0.1]).unwrap();
        assert!((b.scalar - 6.0).abs() < 1e-12);
        let eig = curvature_operator_eigs(&b.riemann, &b.metric);
        assert!(!eig.indefinite);
        assert!(eig.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn degenerate_metric_rejected() {
        struct Flat0;
        impl MetricChart for Flat0 {
            fn dim(&self) -> usize {
                2
            }
            fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
                let one = p[0].constant_like(1.0);
                Ok(vec![one.clone(), one.clone(), one.clone(), one])
            }
            fn label(&self) -> String {
                "rank one".into()
            }
        }
        assert!(matches!(christoffel(&Flat0, &[0.0, 0.0]), Err(GeomError::Degenerate(_))));
    }
}
