//! Hamilton's Harnack tensors and the quadratic form
//! `Z = R_ijkl U^ij U^kl + 2 P_ijk U^ij X^k + M_ij X^i X^j`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::chart::{frame_transform, orthonormal_frame, two_form_pairs, JetGeometry};
use crate::error::{GeomError, Result};
use crate::flow::{ricci_quadratic, FlowPoint, FlowSnapshot, SurfaceGrid};
use crate::tensor::{JetTensor, Tensor};

pub mod algebra;
pub mod soliton;

pub use algebra::{
    algebraic_identities, factorize, spacetime_curvature, sum_of_squares_check, AlgebraicReport, SumOfSquares,
};
pub use soliton::{m_decomposition_residual, soliton_check, static_harnack, SolitonReport, StaticHarnack, SOLITON_TOL};

/// `P_ijk = ∇_i R_jk − ∇_j R_ik` as jets, one order below the Ricci jets.
pub(crate) fn p_jets(geo: &JetGeometry) -> JetTensor {
    let nr = geo.nabla(&geo.ricci);
    Tensor::from_fn(geo.n, 3, |i| nr.get(&[i[0], i[1], i[2]]) - nr.get(&[i[1], i[0], i[2]]))
}

/// `M_ij = ΔR_ij − ½∇_i∇_j R + 2R_ikjl R^kl − R_ik R^k_j + R_ij / 2t` at the
/// jet base point. Needs metric jets of order 4.
pub(crate) fn m_values(geo: &JetGeometry, t: f64) -> Tensor {
    let n = geo.n;
    let scalar = Tensor::from_vec(n, 0, vec![geo.scalar.clone()]);
    let hess = geo.nabla(&geo.nabla(&scalar)).values();
    let lap = geo.laplacian(&geo.ricci).values();
    let ricci = geo.ricci.values();
    let quad = ricci_quadratic(&geo.riemann.values(), &ricci, &geo.inverse_values());
    Tensor::from_fn(n, 2, |i| {
        lap.at(i) - 0.5 * hess.at(i) + 2.0 * quad.rm_ric.at(i) - quad.ric_ric.at(i) + ricci.at(i) / (2.0 * t)
    })
}

#[derive(Clone, Debug)]
pub struct HarnackTriple {
    pub riemann: Tensor,
    pub p: Tensor,
    pub m: Tensor,
    pub t: f64,
    /// Metric the components are written in; the identity for an orthonormal frame.
    pub metric: DMatrix<f64>,
}

/// A 2-form `U^ij` and a vector `X^k`.
#[derive(Clone, Debug)]
pub struct HarnackInput {
    pub u: Tensor,
    pub x: Vec<f64>,
}

impl HarnackInput {
    pub fn new(u: Tensor, x: Vec<f64>) -> Result<Self> {
        let n = u.dim();
        if u.rank() != 2 || x.len() != n {
            return Err(GeomError::Domain("HarnackInput needs a rank-2 U and a vector of the same dimension".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if u.at(&[i, j]) != -u.at(&[j, i]) {
                    return Err(GeomError::Domain(format!("U is not antisymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(HarnackInput { u, x })
    }

    /// From block coordinates `(w_(ij), X)` with `w_ij = √2 U^ij` for `i < j`,
    /// so that unit vectors are unit inputs `Σ U² + |X|² = 1`.
    pub fn from_block_vector(n: usize, v: &[f64]) -> Self {
        let pairs = two_form_pairs(n);
        let mut u = Tensor::zeros(n, 2);
        for (q, &(i, j)) in pairs.iter().enumerate() {
            let w = v[q] / std::f64::consts::SQRT_2;
            u.set(&[i, j], w);
            u.set(&[j, i], -w);
        }
        HarnackInput { u, x: v[pairs.len()..].to_vec() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        HarnackInput { u: self.u.scaled(s), x: self.x.iter().map(|v| v * s).collect() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleInvariants {
    pub p_antisymmetry: f64,
    pub p_cyclic: f64,
    pub m_symmetry: f64,
}

impl HarnackTriple {
    pub fn dim(&self) -> usize {
        self.riemann.dim()
    }

    pub fn from_flow_point(fp: &FlowPoint) -> Self {
        HarnackTriple { riemann: fp.riemann.clone(), p: fp.p.clone(), m: fp.m.clone(), t: fp.t, metric: fp.metric.clone() }
    }

    /// Components in a g-orthonormal frame.
    pub fn orthonormal(&self) -> Result<Self> {
        let e = orthonormal_frame(&self.metric)
            .ok_or_else(|| GeomError::Degenerate("metric is not positive definite".into()))?;
        let n = self.dim();
        Ok(HarnackTriple {
            riemann: frame_transform(&self.riemann, &e),
            p: frame_transform(&self.p, &e),
            m: frame_transform(&self.m, &e),
            t: self.t,
            metric: DMatrix::identity(n, n),
        })
    }

    pub fn invariants(&self) -> TripleInvariants {
        let n = self.dim();
        let mut inv = TripleInvariants { p_antisymmetry: 0.0, p_cyclic: 0.0, m_symmetry: 0.0 };
        for i in 0..n {
            for j in 0..n {
                inv.m_symmetry = inv.m_symmetry.max((self.m.at(&[i, j]) - self.m.at(&[j, i])).abs());
                for k in 0..n {
                    let p = |a, b, c| self.p.at(&[a, b, c]);
                    inv.p_antisymmetry = inv.p_antisymmetry.max((p(i, j, k) + p(j, i, k)).abs());
                    inv.p_cyclic = inv.p_cyclic.max((p(i, j, k) + p(j, k, i) + p(k, i, j)).abs());
                }
            }
        }
        inv
    }

    /// `[[2R_(ij)(kl), √2 P_(ij)k], [√2 Pᵀ, M]]` over pairs `i < j`, in the
    /// frame the components are written in.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let pairs = two_form_pairs(n);
        let np = pairs.len();
        let s2 = std::f64::consts::SQRT_2;
        DMatrix::from_fn(np + n, np + n, |r, c| match (r < np, c < np) {
            (true, true) => {
                let ((i, j), (k, l)) = (pairs[r], pairs[c]);
                2.0 * self.riemann.at(&[i, j, k, l])
            }
            (true, false) => s2 * self.p.at(&[pairs[r].0, pairs[r].1, c - np]),
            (false, true) => s2 * self.p.at(&[pairs[c].0, pairs[c].1, r - np]),
            (false, false) => self.m.at(&[r - np, c - np]),
        })
    }
}

/// `P` of a closed-form flow at a point.
pub fn compute_p(snapshot: &FlowSnapshot, x: &[f64]) -> Result<Tensor> {
    Ok(FlowPoint::new(&snapshot.family, x, snapshot.t)?.p)
}

/// `M` of a closed-form flow at a point, with `t` in the `R_ij / 2t` term.
pub fn compute_m(snapshot: &FlowSnapshot, x: &[f64], t: f64) -> Result<Tensor> {
    if !(t > 0.0) {
        return Err(GeomError::Domain(format!("M needs t > 0, got {t}")));
    }
    let fp = FlowPoint::new(&snapshot.family, x, snapshot.t)?;
    let shift = 1.0 / (2.0 * t) - 1.0 / (2.0 * snapshot.t);
    Ok(fp.m.add(&fp.ricci.scaled(shift)))
}

pub fn harnack_value(triple: &HarnackTriple, input: &HarnackInput) -> f64 {
    let n = triple.dim();
    let (u, x) = (&input.u, &input.x);
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            let uij = u.at(&[i, j]);
            if uij != 0.0 {
                for k in 0..n {
                    for l in 0..n {
                        z += triple.riemann.at(&[i, j, k, l]) * uij * u.at(&[k, l]);
                    }
                    z += 2.0 * triple.p.at(&[i, j, k]) * uij * x[k];
                }
            }
            z += triple.m.at(&[i, j]) * x[i] * x[j];
        }
    }
    z
}

/// Minimum of Z over unit inputs, by a dense eigensolve in an orthonormal frame.
pub fn harnack_min_eig(triple: &HarnackTriple) -> Result<f64> {
    let b = triple.orthonormal()?.block_matrix();
    Ok(SymmetricEigen::new(b).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloMin {
    pub samples: usize,
    /// Best Z over the random unit samples.
    pub sampled_min: f64,
    /// After projected gradient descent from the best sample.
    pub polished_min: f64,
    pub iterations: usize,
}

/// Minimum of Z over unit inputs using only evaluations of Z: random unit
/// samples, then projected gradient descent on the sphere from the best one.
/// Gradients are central differences of Z, exact for a quadratic form.
pub fn monte_carlo_min(triple: &HarnackTriple, samples: usize, seed: u64) -> Result<MonteCarloMin> {
    let tri = triple.orthonormal()?;
    let n = tri.dim();
    let d = n * (n - 1) / 2 + n;
    let z = |v: &[f64]| harnack_value(&tri, &HarnackInput::from_block_vector(n, v));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, vec![0.0; d]);
    for _ in 0..samples {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize(&mut v);
        let zv = z(&v);
        if zv < best.0 {
            best = (zv, v);
        }
    }
    let sampled_min = best.0;
    let (mut zv, mut v) = best;
    let mut eta = 0.25;
    let mut iterations = 0;
    while iterations < 20_000 {
        iterations += 1;
        let grad: Vec<f64> = (0..d)
            .map(|k| {
                let mut a = v.clone();
                let mut b = v.clone();
                a[k] += 1.0;
                b[k] -= 1.0;
                (z(&a) - z(&b)) / 2.0
            })
            .collect();
        let radial: f64 = grad.iter().zip(&v).map(|(g, v)| g * v).sum();
        let tangent: Vec<f64> = grad.iter().zip(&v).map(|(g, v)| g - radial * v).collect();
        if tangent.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-10 {
            break;
        }
        loop {
            let mut w: Vec<f64> = v.iter().zip(&tangent).map(|(v, g)| v - eta * g).collect();
            normalize(&mut w);
            let zw = z(&w);
            if zw <= zv {
                (zv, v) = (zw, w);
                eta *= 2.0;
                break;
            }
            eta /= 2.0;
            if eta < 1e-14 {
                break;
            }
        }
        if eta < 1e-14 {
            break;
        }
    }
    Ok(MonteCarloMin { samples, sampled_min, polished_min: zv, iterations })
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

/// The triple of the surface flow at grid node `j`, in the orthonormal frame:
/// `R_1212 = R/2`, `P_ijk = ½(∂_iR δ_jk − ∂_jR δ_ik)` and
/// `M = ½ΔR δ − ½∇∇R + (R²/4 + R/4t) δ`.
pub fn surface_triple(grid: &SurfaceGrid, j: usize) -> Result<HarnackTriple> {
    let t = grid.t;
    if !(t > 0.0) {
        return Err(GeomError::Domain(format!("M needs t > 0, got {t}")));
    }
    let sp = grid.point(j);
    let r = sp.scalar;
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let riemann = Tensor::from_fn(2, 4, |i| 0.5 * r * (d(i[0], i[2]) * d(i[1], i[3]) - d(i[0], i[3]) * d(i[1], i[2])));
    let p = Tensor::from_fn(2, 3, |i| 0.5 * (sp.d_scalar[i[0]] * d(i[1], i[2]) - sp.d_scalar[i[1]] * d(i[0], i[2])));
    let m = Tensor::from_fn(2, 2, |i| {
        let hess = if i[0] == i[1] { sp.hessian[i[0]] } else { 0.0 };
        (0.5 * sp.lap_scalar + 0.25 * r * r + r / (4.0 * t)) * d(i[0], i[1]) - 0.5 * hess
    });
    Ok(HarnackTriple { riemann, p, m, t, metric: DMatrix::identity(2, 2) })
}

/// Positivity tolerance on a grid flow of spacing `h`.
pub fn grid_tolerance(h: f64) -> f64 {
    10.0 * h * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{flow_closed_form, FlowFamily};

    #[test]
    fn sphere_m_and_min_eig() {
        let s = flow_closed_form(&FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }, 1.0).unwrap();
        let x = [1.1, 0.4];
        let fp = FlowPoint::new(&s.family, &x, 1.0).unwrap();
        let m = compute_m(&s, &x, 1.0).unwrap();
        // M = 1.5 g
        assert!(m.sub(&Tensor::from_fn(2, 2, |i| 1.5 * fp.metric[(i[0], i[1])])).max_abs() < 1e-10);
        let tri = HarnackTriple::from_flow_point(&fp);
        assert!((harnack_min_eig(&tri).unwrap() - 1.5).abs() < 1e-10);
        let unit_x = HarnackInput::from_block_vector(2, &[0.0, 1.0, 0.0]);
        assert!((harnack_value(&tri.orthonormal().unwrap(), &unit_x) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_agrees() {
        let fp = FlowPoint::new(&FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 }, &[1.0, 0.2, 2.0, 1.0], 0.3).unwrap();
        let tri = HarnackTriple::from_flow_point(&fp);
        let mc = monte_carlo_min(&tri, 10_000, 7).unwrap();
        let eig = harnack_min_eig(&tri).unwrap();
        assert!((mc.polished_min - eig).abs() < 1e-6, "{mc:?} vs {eig}");
    }

    #[test]
    fn surface_triple_invariants() {
        let mut g = SurfaceGrid::initial(64, 0.05);
        g.advance_to(0.1, crate::flow::surface::DEFAULT_CFL).unwrap();
        for j in [0, 10, 32, 50, 64] {
            let tri = surface_triple(&g, j).unwrap();
            let inv = tri.invariants();
            assert!(inv.p_cyclic < 1e-12 && inv.p_antisymmetry == 0.0);
            assert!(harnack_min_eig(&tri).unwrap() > -grid_tolerance(g.spacing()));
        }
    }
}
