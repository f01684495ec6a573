//! Curvature as jet-valued tensor fields, for covariant derivatives.
//!
//! The metric is expanded to order K in every chart coordinate (plus
//! optional passenger variables such as time). Christoffel symbols then
//! carry order K−1 and curvature order K−2, so ∇Rm needs K = 3 and ∇∇Ric
//! needs K = 4.

use super::{eval_components, MetricChart};
use crate::error::{GeomError, Result};
use crate::jet::{Jet, MAX_ACTIVE};
use crate::tensor::{JetTensor, Tensor};

pub struct JetGeometry {
    /// Chart dimension; jet variables `0..n` are the chart coordinates.
    pub n: usize,
    pub g: JetTensor,
    pub ginv: JetTensor,
    /// `Γ^a_bc` indexed `[a][b][c]`.
    pub gamma: JetTensor,
    pub riemann: JetTensor,
    pub ricci: JetTensor,
    pub scalar: Jet,
}

fn jet_inverse(m: &[Jet], n: usize) -> Result<Vec<Jet>> {
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<Jet>> =
        (0..n).map(|i| (0..n).map(|j| m[0].constant_like(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].value().abs().total_cmp(&a[y][col].value().abs()))
            .unwrap();
        if a[piv][col].value().abs() < 1e-300 {
            return Err(GeomError::Degenerate("singular metric jet".into()));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let r = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            for j in 0..n {
                a[row][j] = &a[row][j] - &(&f * &a[col][j]);
                inv[row][j] = &inv[row][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Ok(inv.into_iter().flatten().collect())
}

fn dot(terms: impl Iterator<Item = Jet>) -> Option<Jet> {
    terms.reduce(|a, b| &a + &b)
}

impl JetGeometry {
    /// From row-major metric jets whose first `n` variables are the chart coordinates.
    pub fn from_metric(n: usize, metric: Vec<Jet>) -> Result<Self> {
        let order = metric[0].order();
        if order < 2 {
            return Err(GeomError::Unsupported("jet geometry needs metric order ≥ 2".into()));
        }
        if metric[0].nvars() < n {
            return Err(GeomError::Unsupported("every chart coordinate must be an active jet variable".into()));
        }
        let ginv = Tensor::from_vec(n, 2, jet_inverse(&metric, n)?);
        let g = Tensor::from_vec(n, 2, metric);
        let dg: Vec<JetTensor> = (0..n).map(|c| g.partial(c)).collect();
        // first kind Γ_dbc, then raise
        let g1 = Tensor::from_fn(n, 3, |i| {
            let (d, b, c) = (i[0], i[1], i[2]);
            (&(dg[b].get(&[c, d]) + dg[c].get(&[b, d])) - dg[d].get(&[b, c])).scale(0.5)
        });
        let gamma = Tensor::from_fn(n, 3, |i| {
            dot((0..n).map(|d| ginv.get(&[i[0], d]) * g1.get(&[d, i[1], i[2]]))).unwrap()
        });
        let dg1: Vec<JetTensor> = (0..n).map(|c| g1.partial(c)).collect();
        let riemann = Tensor::from_fn(n, 4, |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            let lin = dg1[b].get(&[d, a, c]) - dg1[a].get(&[d, b, c]);
            let quad = dot((0..n).map(|f| {
                &(g1.get(&[f, a, d]) * gamma.get(&[f, b, c])) - &(g1.get(&[f, b, d]) * gamma.get(&[f, a, c]))
            }))
            .unwrap();
            &lin + &quad
        });
        let ricci = Tensor::from_fn(n, 2, |i| {
            dot((0..n).flat_map(|k| (0..n).map(move |l| (k, l))).map(|(k, l)| {
                ginv.get(&[k, l]) * riemann.get(&[i[0], k, i[1], l])
            }))
            .unwrap()
        });
        let scalar = dot((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| ginv.get(&[i, j]) * ricci.get(&[i, j])))
            .unwrap();
        Ok(JetGeometry { n, g, ginv, gamma, riemann, ricci, scalar })
    }

    /// Expand a chart at `point` to the given order in all coordinates.
    pub fn from_chart(chart: &dyn MetricChart, point: &[f64], order: usize) -> Result<Self> {
        let n = chart.dim();
        if n > MAX_ACTIVE {
            return Err(GeomError::Unsupported(format!("jet geometry in dimension {n} (cap {MAX_ACTIVE})")));
        }
        let active: Vec<usize> = (0..n).collect();
        Self::from_metric(n, eval_components(chart, point, &active, order)?)
    }

    /// `(∇T)[e, a1, …] = ∂_e T[a1, …] − Σ Γ^p_{e a_i} T[…p…]`, derivative index first.
    pub fn nabla(&self, t: &JetTensor) -> JetTensor {
        let n = self.n;
        let r = t.rank();
        let parts: Vec<JetTensor> = (0..n).map(|e| t.partial(e)).collect();
        Tensor::from_fn(n, r + 1, |idx| {
            let e = idx[0];
            let rest = &idx[1..];
            let mut acc = parts[e].get(rest).clone();
            let mut j = rest.to_vec();
            for slot in 0..r {
                for p in 0..n {
                    j[slot] = p;
                    acc = &acc - &(self.gamma.get(&[p, e, rest[slot]]) * t.get(&j));
                }
                j[slot] = rest[slot];
            }
            acc
        })
    }

    /// `g^ab ∇_a ∇_b T`.
    pub fn laplacian(&self, t: &JetTensor) -> JetTensor {
        let hh = self.nabla(&self.nabla(t));
        let n = self.n;
        Tensor::from_fn(n, t.rank(), |idx| {
            let mut j = vec![0; idx.len() + 2];
            j[2..].copy_from_slice(idx);
            dot((0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| {
                j[0] = a;
                j[1] = b;
                self.ginv.get(&[a, b]) * hh.get(&j)
            }))
            .unwrap()
        })
    }

    pub fn inverse_values(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |a, b| self.ginv.get(&[a, b]).value())
    }
}

/// Covariant derivative of order 1 or 2 of a covariant tensor field of rank ≤ 4.
/// The field receives the point as jets and must return rank-`r` jet components.
pub fn covariant_derivative(
    field: &dyn Fn(&[Jet]) -> Result<JetTensor>,
    chart: &dyn MetricChart,
    point: &[f64],
    order: usize,
) -> Result<Tensor> {
    if !(1..=2).contains(&order) {
        return Err(GeomError::Unsupported(format!("covariant derivative of order {order}")));
    }
    let n = chart.dim();
    let geo = JetGeometry::from_chart(chart, point, 2.max(order))?;
    let active: Vec<usize> = (0..n).collect();
    let x = crate::jet::seed_point(point, &active, order);
    let t = field(&x)?;
    if t.rank() > 4 {
        return Err(GeomError::Unsupported(format!("tensor rank {}", t.rank())));
    }
    let mut d = geo.nabla(&t);
    if order == 2 {
        d = geo.nabla(&d);
    }
    Ok(d.values())
}

/// Max-abs residuals of the curvature identities at a point.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct BianchiResiduals {
    pub first: f64,
    pub second: f64,
    pub contracted: f64,
    pub twice_contracted: f64,
    pub ricci_commutator: f64,
    /// Commutator of second covariant derivatives on a rank-3 test field.
    pub ricci_identity_rank3: f64,
}

impl BianchiResiduals {
    pub fn max(&self) -> f64 {
        [self.first, self.second, self.contracted, self.twice_contracted, self.ricci_commutator, self.ricci_identity_rank3]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `R_mni^p = g^pq R_mniq`
fn raise_last(r: &Tensor, ginv: &nalgebra::DMatrix<f64>) -> Tensor {
    let n = r.dim();
    Tensor::from_fn(n, 4, |i| (0..n).map(|q| ginv[(i[3], q)] * r.at(&[i[0], i[1], i[2], q])).sum())
}

/// The rank-3 test field used for the commutator identity: smooth, no symmetries.
fn test_field(x: &[Jet]) -> JetTensor {
    let n = x.len();
    Tensor::from_fn(n, 3, |i| {
        let w = 1.0 + i[0] as f64 + 0.5 * i[1] as f64 - 0.3 * i[2] as f64;
        (&x[i[0]] * &x[i[1]]).scale(w) + x[i[2]].scale(0.7).sin()
    })
}

pub fn bianchi_residuals(chart: &dyn MetricChart, point: &[f64]) -> Result<BianchiResiduals> {
    let n = chart.dim();
    let geo = JetGeometry::from_chart(chart, point, 4)?;
    let ginv = geo.inverse_values();
    let rm = geo.riemann.values();
    let ric = geo.ricci.values();
    let d_rm = geo.nabla(&geo.riemann.map(|j| j.truncate(1))).values();
    let d_ric_j = geo.nabla(&geo.ricci);
    let d_ric = d_ric_j.values();
    let dd_ric = geo.nabla(&d_ric_j).values();
    let d_r = geo.nabla(&Tensor::from_vec(n, 0, vec![geo.scalar.clone()])).values();
    let rm_up = raise_last(&rm, &ginv);

    let mut out = BianchiResiduals::default();
    let quads = (0..n.pow(4)).map(|f| {
        let mut i = [0; 4];
        crate::tensor::multi_index(f, n, &mut i);
        i
    });
    for [a, b, c, d] in quads {
        out.first = out.first.max((rm.at(&[a, b, c, d]) + rm.at(&[b, c, a, d]) + rm.at(&[c, a, b, d])).abs());
        for e in 0..n {
            let s = d_rm.at(&[e, a, b, c, d]) + d_rm.at(&[a, b, e, c, d]) + d_rm.at(&[b, e, a, c, d]);
            out.second = out.second.max(s.abs());
        }
        // ∇_m∇_n R_ij − ∇_n∇_m R_ij = R_mni^p R_pj + R_mnj^p R_ip  with (m,n,i,j) = (a,b,c,d)
        let lhs = dd_ric.at(&[a, b, c, d]) - dd_ric.at(&[b, a, c, d]);
        let rhs: f64 = (0..n).map(|p| rm_up.at(&[a, b, c, p]) * ric.at(&[p, d]) + rm_up.at(&[a, b, d, p]) * ric.at(&[c, p])).sum();
        out.ricci_commutator = out.ricci_commutator.max((lhs - rhs).abs());
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // ∇^l R_lijk = ∇_j R_ki − ∇_k R_ji
                let lhs: f64 = (0..n)
                    .flat_map(|l| (0..n).map(move |m| (l, m)))
                    .map(|(l, m)| ginv[(l, m)] * d_rm.at(&[m, l, i, j, k]))
                    .sum();
                let rhs = d_ric.at(&[j, k, i]) - d_ric.at(&[k, j, i]);
                out.contracted = out.contracted.max((lhs - rhs).abs());
            }
        }
        let div: f64 = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| ginv[(a, b)] * d_ric.at(&[b, a, i]))
            .sum();
        out.twice_contracted = out.twice_contracted.max((div - 0.5 * d_r.at(&[i])).abs());
    }

    let geo3 = JetGeometry::from_chart(chart, point, 3)?;
    let x = crate::jet::seed_point(point, &(0..n).collect::<Vec<_>>(), 2);
    let a = test_field(&x);
    let dda = geo3.nabla(&geo3.nabla(&a)).values();
    let av = a.values();
    for idx in 0..n.pow(5) {
        let mut q = [0; 5];
        crate::tensor::multi_index(idx, n, &mut q);
        let [m, nn, p, i, j] = q;
        let lhs = dda.at(&[m, nn, p, i, j]) - dda.at(&[nn, m, p, i, j]);
        let rhs: f64 = (0..n)
            .map(|s| {
                rm_up.at(&[m, nn, p, s]) * av.at(&[s, i, j])
                    + rm_up.at(&[m, nn, i, s]) * av.at(&[p, s, j])
                    + rm_up.at(&[m, nn, j, s]) * av.at(&[p, i, s])
            })
            .sum();
        out.ricci_identity_rank3 = out.ricci_identity_rank3.max((lhs - rhs).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::models::{Euclidean, RandomMetric, RoundSphere};
    use super::*;

    #[test]
    fn jet_curvature_matches_dense_path() {
        let m = RandomMetric::new(3, 7);
        let p = [0.3, -0.4, 0.9];
        let geo = JetGeometry::from_chart(&m, &p, 2).unwrap();
        let dense = crate::chart::curvature_bundle(&m, &p).unwrap();
        assert!(geo.riemann.values().max_abs_diff(&dense.riemann) < 1e-12);
        assert!((geo.scalar.value() - dense.scalar).abs() < 1e-12);
    }

    #[test]
    fn metric_is_parallel() {
        let m = RandomMetric::new(3, 3);
        let p = [0.1, 0.2, -0.5];
        let geo = JetGeometry::from_chart(&m, &p, 2).unwrap();
        assert!(geo.nabla(&geo.g).values().max_abs() < 1e-12);
    }

    #[test]
    fn flat_hessian_of_gaussian_potential() {
        let t = 1.0;
        let f = |x: &[Jet]| -> Result<JetTensor> {
            let r2 = x.iter().fold(x[0].constant_like(0.0), |s, v| &s + &(v * v));
            Ok(Tensor::from_vec(x.len(), 0, vec![r2.scale(1.0 / (4.0 * t))]))
        };
        let h = covariant_derivative(&f, &Euclidean::new(3), &[0.3, 1.0, -2.0], 2).unwrap();
        let expect = Tensor::from_fn(3, 2, |i| if i[0] == i[1] { 0.5 } else { 0.0 });
        assert!(h.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn identities_on_sphere_and_random_metric() {
        let r = bianchi_residuals(&RoundSphere::new(3, 1.0), &[1.1, 0.7, 0.3]).unwrap();
        assert!(r.max() < 1e-10, "{r:?}");
        let r = bianchi_residuals(&RandomMetric::new(3, 11), &[0.2, 0.1, -0.3]).unwrap();
        assert!(r.max() < 1e-8, "{r:?}");
    }
}
