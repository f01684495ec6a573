//! Large-N behaviour of the thermostat: Ricci decay, convergence of the
//! space-time curvature to Hamilton's tensors, the restricted Harnack
//! quadratic form and the space-time evolution equations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{autodiff_tables, build_metric, closed_form_ricci, BaseData, ThermostatChart, ThermostatSpec};
use crate::chart::{
    christoffel, curvature_operator_eigs, frame_transform, metric_at, orthonormal_frame, riemann, riemann_sampled,
    JetGeometry, DENSE_DIM_CAP,
};
use crate::error::{GeomError, Result};
use crate::flow::heat::heat_lhs_homogeneous;
use crate::flow::{b_tensor, ricci_quadratic, FlowFamily, FlowPoint, SurfaceGrid};
use crate::harnack::{harnack_min_eig, HarnackTriple};
use crate::tensor::Tensor;

/// Ricci size of the hyperbolic thermostat against `N`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub base: String,
    /// `(N, max over samples of |R̃ic|)` in a block-orthonormal frame.
    pub rows: Vec<(usize, f64)>,
    /// Least-squares slope of `log |R̃ic|` against `log N`; absent when flat.
    pub slope: Option<f64>,
    pub exactly_flat: bool,
}

impl DecayFit {
    pub fn csv(&self) -> String {
        let mut s = String::from("N,ricci_norm\n");
        for (n, v) in &self.rows {
            s.push_str(&format!("{n},{v:.12e}\n"));
        }
        s
    }
}

/// Frobenius norm of a symmetric 2-tensor in a frame orthonormal for `|g|`.
fn block_norm(t: &Tensor, g: &DMatrix<f64>) -> Result<f64> {
    let mut abs_g = g.clone();
    let last = g.nrows() - 1;
    abs_g[(last, last)] = g[(last, last)].abs();
    let e = orthonormal_frame(&abs_g).ok_or_else(|| GeomError::Degenerate("no orthonormal frame".into()))?;
    Ok(frame_transform(t, &e).data().iter().map(|v| v * v).sum::<f64>().sqrt())
}

fn ricci_at(chart: &ThermostatChart, p: &[f64]) -> Result<Tensor> {
    if chart.spec.dim() <= DENSE_DIM_CAP {
        return Ok(autodiff_tables(chart, p)?.2);
    }
    // the closed forms agree with autodiff wherever both are available
    let table = closed_form_ricci(chart, p)?;
    let mut out = Tensor::zeros(table.dim, 2);
    for (i, e) in &table.entries {
        out.set(&[i[0], i[1]], e.value);
        out.set(&[i[1], i[0]], e.value);
    }
    Ok(out)
}

pub fn ricci_decay_fit(base: &FlowFamily, ns: &[usize], samples: usize, t_range: (f64, f64), seed: u64) -> Result<DecayFit> {
    let mut rows = Vec::with_capacity(ns.len());
    for &nf in ns {
        let chart = build_metric(&ThermostatSpec::hyperbolic(nf, base.clone())?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = vec![1.0; nf];
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = base.sample_point(&mut rng);
            let t = rng.random_range(t_range.0..=t_range.1);
            let p = match chart.point(&x, &y, t) {
                Ok(p) => p,
                Err(GeomError::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            };
            let ric = ricci_at(&chart, &p)?;
            worst = worst.max(block_norm(&ric, &metric_at(&chart, &p)?)?);
        }
        rows.push((nf, worst));
    }
    let exactly_flat = rows.iter().all(|r| r.1 < 1e-12);
    let slope = (!exactly_flat).then(|| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, v)| ((n as f64).ln(), v.ln())).collect();
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(DecayFit { base: base.label(), rows, slope, exactly_flat })
}

/// Gaps between the thermostat curvature and Hamilton's tensors at one `N`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub n_fiber: usize,
    /// Max-abs of `R̃_ijkl − R_ijkl`, `R̃_ij0k − P_ijk`, `R̃_i0j0 − M_ij`.
    pub gaps: [f64; 3],
    /// `N` times the gaps.
    pub constants: [f64; 3],
}

impl LimitRow {
    fn new(n_fiber: usize, gaps: [f64; 3]) -> Self {
        LimitRow { n_fiber, gaps, constants: gaps.map(|g| g * n_fiber as f64) }
    }
}

/// Largest relative deviation of `N · gap` from its value at the largest `N`,
/// per block. Blocks whose gap vanishes identically report 0.
pub fn limit_spread(rows: &[LimitRow]) -> [f64; 3] {
    let mut out = [0.0; 3];
    let Some(last) = rows.last() else { return out };
    for (b, o) in out.iter_mut().enumerate() {
        let c = last.constants[b];
        if rows.iter().all(|r| r.gaps[b] < 1e-13) {
            continue;
        }
        *o = rows.iter().map(|r| (r.constants[b] / c - 1.0).abs()).fold(0.0, f64::max);
    }
    out
}

/// All 4-tuples over `ix`, last slot fastest.
fn base_time_tuples(ix: &[usize]) -> Vec<[usize; 4]> {
    let k = ix.len();
    (0..k.pow(4)).map(|f| [f / (k * k * k), (f / (k * k)) % k, (f / k) % k, f % k].map(|i| ix[i])).collect()
}

/// Gaps from autodiff curvature of the full hyperbolic thermostat.
pub fn harnack_limit_check(base: &FlowFamily, ns: &[usize], x: &[f64], t: f64) -> Result<Vec<LimitRow>> {
    let fp = FlowPoint::new(base, x, t)?;
    let n = base.dim();
    let mut rows = Vec::with_capacity(ns.len());
    for &nf in ns {
        let chart = build_metric(&ThermostatSpec::hyperbolic(nf, base.clone())?)?;
        let p = chart.point(x, &vec![1.0; nf], t)?;
        let tt = chart.spec.time_index();
        let ix: Vec<usize> = (0..n).chain([tt]).collect();
        let tuples = base_time_tuples(&ix);
        let vals = riemann_sampled(&chart, &p, &tuples)?;
        let r = |idx: [usize; 4]| vals[tuples.iter().position(|u| *u == idx).expect("sampled tuple")];
        let mut gaps = [0.0f64; 3];
        for i in 0..n {
            for j in 0..n {
                gaps[2] = gaps[2].max((r([i, tt, j, tt]) - fp.m.at(&[i, j])).abs());
                for k in 0..n {
                    gaps[1] = gaps[1].max((r([i, j, tt, k]) - fp.p.at(&[i, j, k])).abs());
                    for l in 0..n {
                        gaps[0] = gaps[0].max((r([i, j, k, l]) - fp.riemann.at(&[i, j, k, l])).abs());
                    }
                }
            }
        }
        rows.push(LimitRow::new(nf, gaps));
    }
    Ok(rows)
}

/// The same gaps from the closed forms; needs no chart, so it also serves
/// grid flows.
pub fn closed_limit_gaps(base: &BaseData, n_fiber: usize) -> [f64; 3] {
    let n = base.dim();
    let ai = 1.0 / base.a(n_fiber);
    let ric = |i: usize, j: usize| base.ricci.at(&[i, j]);
    let dr = &base.d_scalar;
    let mut gaps = [0.0f64; 3];
    for i in 0..n {
        for j in 0..n {
            let d3 = -0.5 * ai * (base.dt_scalar + base.scalar / base.t) * ric(i, j) + 0.25 * ai * dr[i] * dr[j];
            gaps[2] = gaps[2].max(d3.abs());
            for k in 0..n {
                gaps[1] = gaps[1].max((0.5 * ai * (dr[j] * ric(i, k) - dr[i] * ric(j, k))).abs());
                for l in 0..n {
                    gaps[0] = gaps[0].max((ai * (ric(i, k) * ric(j, l) - ric(j, k) * ric(i, l))).abs());
                }
            }
        }
    }
    gaps
}

/// Limit gaps at node `j` of a rotationally symmetric surface flow.
pub fn surface_limit_check(grid: &SurfaceGrid, j: usize, ns: &[usize]) -> Result<Vec<LimitRow>> {
    let base = BaseData::from_surface(grid, j)?;
    Ok(ns.iter().map(|&nf| LimitRow::new(nf, closed_limit_gaps(&base, nf))).collect())
}

fn restricted_chart(base: &FlowFamily, n_fiber: usize) -> Result<ThermostatChart> {
    build_metric(&ThermostatSpec::restricted(n_fiber, base.clone())?)
}

/// Hamilton-type triple read off the restricted space-time curvature:
/// `R̄_ijkl`, `R̄_ij0k` and `R̄_0i0j`, with `∂_t` left unnormalised so that
/// `Ū^{0k} = X^k / 2` reproduces `Z`.
pub fn restricted_triple(base: &FlowFamily, n_fiber: usize, x: &[f64], t: f64) -> Result<HarnackTriple> {
    let chart = restricted_chart(base, n_fiber)?;
    let p = chart.point(x, &[], t)?;
    let rm = riemann(&chart, &p)?;
    let n = base.dim();
    let g = metric_at(&chart, &p)?;
    Ok(HarnackTriple {
        riemann: Tensor::from_fn(n, 4, |i| rm.at(i)),
        p: Tensor::from_fn(n, 3, |i| rm.at(&[i[0], i[1], n, i[2]])),
        m: Tensor::from_fn(n, 2, |i| rm.at(&[n, i[0], n, i[1]])),
        t,
        metric: g.view((0, 0), (n, n)).into_owned(),
    })
}

/// The restricted triple from the closed forms, in the frame of `base`.
pub fn restricted_triple_closed(base: &BaseData, n_fiber: usize) -> HarnackTriple {
    let n = base.dim();
    let ai = 1.0 / base.a(n_fiber);
    let ric = |i: usize, j: usize| base.ricci.at(&[i, j]);
    let dr = &base.d_scalar;
    HarnackTriple {
        riemann: Tensor::from_fn(n, 4, |q| {
            let [i, j, k, l] = [q[0], q[1], q[2], q[3]];
            base.riemann.at(q) - ai * (ric(i, k) * ric(j, l) - ric(j, k) * ric(i, l))
        }),
        p: Tensor::from_fn(n, 3, |q| {
            let [i, j, k] = [q[0], q[1], q[2]];
            base.p.at(q) + 0.5 * ai * (dr[j] * ric(i, k) - dr[i] * ric(j, k))
        }),
        m: Tensor::from_fn(n, 2, |q| {
            let [i, j] = [q[0], q[1]];
            base.m.at(q) - 0.5 * ai * (base.dt_scalar + base.scalar / base.t) * ric(i, j) + 0.25 * ai * dr[i] * dr[j]
        }),
        t: base.t,
        metric: base.metric.clone(),
    }
}

/// Minimum of `R̄(Ū, Ū)` over unit inputs. Requires a base with weakly
/// positive curvature operator.
pub fn restricted_min_eig(base: &FlowFamily, n_fiber: usize, x: &[f64], t: f64, tol: f64) -> Result<f64> {
    let fp = FlowPoint::new(base, x, t)?;
    let eig = curvature_operator_eigs(&fp.riemann, &fp.metric).min();
    if eig < -tol {
        return Err(GeomError::Precondition(format!("base curvature operator has eigenvalue {eig:.3e} < 0")));
    }
    harnack_min_eig(&restricted_triple(base, n_fiber, x, t)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacetimeEquation {
    /// `∇̄_0 R̄` on the restricted space-time.
    TimeCov,
    /// `Δ̄ R̄` on the restricted space-time.
    Laplacian,
    /// `(∇̄_0 − Δ̄) R̄` against the quadratic right-hand sides.
    Heat,
    /// `∇̃_0 R̃` on the full thermostat, by finite differences in `t`.
    TimeCovFull,
}

/// Max-abs residuals per block `(ijkl, ij0k, i0j0)`.
#[derive(Clone, Debug, Serialize)]
pub struct SpacetimeResiduals {
    pub n_fiber: usize,
    pub time_cov: [f64; 3],
    pub laplacian: [f64; 3],
    pub heat: [f64; 3],
    /// `i0j0` heat residual with the extra `−2 R^m_k R^kn R_injm` term.
    pub heat_i0j0_with_ricci_square: f64,
    pub time_cov_full: [f64; 3],
    pub tolerance: f64,
}

impl SpacetimeResiduals {
    pub fn get(&self, eq: SpacetimeEquation) -> f64 {
        let b = match eq {
            SpacetimeEquation::TimeCov => self.time_cov,
            SpacetimeEquation::Laplacian => self.laplacian,
            SpacetimeEquation::Heat => self.heat,
            SpacetimeEquation::TimeCovFull => self.time_cov_full,
        };
        b.iter().cloned().fold(0.0, f64::max)
    }

    pub fn passes(&self, eq: SpacetimeEquation) -> bool {
        self.get(eq) <= self.tolerance
    }
}

/// Base-side right-hand sides, valid where `∇Rm = 0`.
struct Rhs {
    time_cov: (Tensor, Tensor, Tensor),
    lap_m: Tensor,
    heat: (Tensor, Tensor),
    ric_sq_rm: Tensor,
}

fn homogeneous_rhs(fp: &FlowPoint) -> Rhs {
    let n = fp.dim();
    let g = &fp.inverse;
    let rm = &fp.riemann;
    let mixed = fp.ricci_mixed();
    let m = &fp.m;
    let t = fp.t;
    // R^m_a T_..m..
    let act = |i: &[usize], slot: usize, at: &dyn Fn(&[usize]) -> f64| {
        let mut s = 0.0;
        let mut j = i.to_vec();
        for mm in 0..n {
            j[slot] = mm;
            s += mixed[(mm, i[slot])] * at(&j);
        }
        s
    };
    let tc_r = Tensor::from_fn(n, 4, |i| {
        fp.dt_riemann.at(i) + (0..4).map(|s| act(i, s, &|j| rm.at(j))).sum::<f64>()
    });
    let tc_p = Tensor::from_fn(n, 3, |i| {
        fp.dt_p.at(i) + (0..3).map(|s| act(i, s, &|j| fp.p.at(j))).sum::<f64>() + fp.p.at(i) / (2.0 * t)
    });
    let dt_m = heat_lhs_homogeneous(fp).m;
    let tc_m = Tensor::from_fn(n, 2, |i| {
        dt_m.at(i) + (0..2).map(|s| act(i, s, &|j| m.at(j))).sum::<f64>() + m.at(i) / t
    });
    let quad = ricci_quadratic(rm, &fp.ricci, g);
    let ric_sq_rm = ricci_quadratic(rm, &quad.ric_ric, g).rm_ric.scaled(2.0);
    let b = b_tensor(rm, g);
    let q = Tensor::from_fn(n, 4, |i| {
        let (a, bb, c, d) = (i[0], i[1], i[2], i[3]);
        2.0 * (b.at(&[a, bb, c, d]) - b.at(&[a, bb, d, c]) + b.at(&[a, c, bb, d]) - b.at(&[a, d, bb, c]))
    });
    let rm_m = ricci_quadratic(rm, m, g).rm_ric;
    let heat_m = Tensor::from_fn(n, 2, |i| 2.0 * rm_m.at(i) - fp.ricci.at(i) / (2.0 * t * t) + m.at(i) / t);
    Rhs { time_cov: (tc_r, tc_p, tc_m), lap_m: Tensor::zeros(n, 2), heat: (q, heat_m), ric_sq_rm }
}

/// Max-abs per block of `f − rhs` with base slots in the orthonormal `frame`
/// and the time slot (index `n`) left as `∂_t`.
fn block_residuals(f: &dyn Fn(&[usize]) -> f64, r: &Tensor, p: &Tensor, m: &Tensor, frame: &DMatrix<f64>) -> [f64; 3] {
    let n = r.dim();
    let diff = Tensor::from_fn(n + 1, 4, |q| {
        let times: Vec<usize> = (0..4).filter(|&s| q[s] == n).collect();
        match times.as_slice() {
            [] => f(q) - r.at(q),
            [2] => f(q) - p.at(&[q[0], q[1], q[3]]),
            [1, 3] => f(q) - m.at(&[q[0], q[2]]),
            _ => 0.0,
        }
    });
    let mut full = DMatrix::identity(n + 1, n + 1);
    full.view_mut((0, 0), (n, n)).copy_from(frame);
    let d = frame_transform(&diff, &full);
    let mut out = [0.0f64; 3];
    for i in 0..n {
        for j in 0..n {
            out[2] = out[2].max(d.at(&[i, n, j, n]).abs());
            for k in 0..n {
                out[1] = out[1].max(d.at(&[i, j, n, k]).abs());
                for l in 0..n {
                    out[0] = out[0].max(d.at(&[i, j, k, l]).abs());
                }
            }
        }
    }
    out
}

/// Residuals of the space-time equations at `(x, t)` on a homogeneous base.
pub fn spacetime_residuals(base: &FlowFamily, n_fiber: usize, x: &[f64], t: f64) -> Result<SpacetimeResiduals> {
    if !base.homogeneous() {
        return Err(GeomError::Unsupported(format!("space-time equations need a homogeneous base, got {}", base.label())));
    }
    let fp = FlowPoint::new(base, x, t)?;
    let rhs = homogeneous_rhs(&fp);
    let n = fp.dim();
    let tt = n;

    let chart = restricted_chart(base, n_fiber)?;
    let p = chart.point(x, &[], t)?;
    let geo = JetGeometry::from_chart(&chart, &p, 4)?;
    let nab = geo.nabla(&geo.riemann).values();
    let lap = geo.laplacian(&geo.riemann).values();

    let frame = orthonormal_frame(&fp.metric).ok_or_else(|| GeomError::Degenerate("base metric".into()))?;
    let blocks = |f: &dyn Fn(&[usize]) -> f64, r: &Tensor, pp: &Tensor, m: &Tensor| block_residuals(f, r, pp, m, &frame);
    let dt_bar = |i: &[usize]| nab.at(&[tt, i[0], i[1], i[2], i[3]]);
    let zero_p = Tensor::zeros(n, 3);
    let time_cov = blocks(&dt_bar, &rhs.time_cov.0, &rhs.time_cov.1, &rhs.time_cov.2);
    let lap_m = rhs.lap_m.add(&rhs.ric_sq_rm);
    let laplacian = blocks(&|i| lap.at(i), &fp.lap_riemann, &zero_p, &lap_m);
    let heat_lhs = |i: &[usize]| dt_bar(i) - lap.at(i);
    let heat = blocks(&heat_lhs, &rhs.heat.0, &zero_p, &rhs.heat.1);
    let with_sq = rhs.heat.1.sub(&rhs.ric_sq_rm);
    let heat_i0j0_with_ricci_square = blocks(&heat_lhs, &rhs.heat.0, &zero_p, &with_sq)[2];
    let time_cov_full = time_cov_full_blocks(base, n_fiber, x, t, &rhs, &frame)?;
    Ok(SpacetimeResiduals {
        n_fiber,
        time_cov,
        laplacian,
        heat,
        heat_i0j0_with_ricci_square,
        time_cov_full,
        tolerance: 10.0 / n_fiber as f64,
    })
}

/// `∇̃_0 R̃ = ∂_t R̃ − Σ Γ̃^e_{0a} R̃_{..e..}` on base and time slots of the
/// full thermostat. `Γ̃^α_{0a}` vanishes there, so `e` runs over base and time.
fn time_cov_full_blocks(base: &FlowFamily, n_fiber: usize, x: &[f64], t: f64, rhs: &Rhs, frame: &DMatrix<f64>) -> Result<[f64; 3]> {
    let chart = build_metric(&ThermostatSpec::hyperbolic(n_fiber, base.clone())?)?;
    let n = base.dim();
    let y = vec![1.0; n_fiber];
    let tt = chart.spec.time_index();
    let ix: Vec<usize> = (0..n).chain([tt]).collect();
    let k = ix.len();
    let tuples = base_time_tuples(&ix);
    let sample = |s: f64| -> Result<Vec<f64>> { riemann_sampled(&chart, &chart.point(x, &y, s)?, &tuples) };
    let h = 1e-3 * t;
    let (m2, m1, p1, p2) = (sample(t - 2.0 * h)?, sample(t - h)?, sample(t + h)?, sample(t + 2.0 * h)?);
    let p0 = chart.point(x, &y, t)?;
    let r0 = riemann_sampled(&chart, &p0, &tuples)?;
    let gamma = christoffel(&chart, &p0)?;
    let local = |a: usize| ix.iter().position(|&v| v == a).expect("base or time index");
    let flat = |q: [usize; 4]| q.iter().fold(0, |acc, &a| acc * k + local(a));
    let cov = |q: [usize; 4]| -> f64 {
        let f = flat(q);
        let mut v = (m2[f] - 8.0 * m1[f] + 8.0 * p1[f] - p2[f]) / (12.0 * h);
        for slot in 0..4 {
            for &e in &ix {
                let mut r = q;
                r[slot] = e;
                v -= gamma.at(&[e, tt, q[slot]]) * r0[flat(r)];
            }
        }
        v
    };
    let (r, p, m) = &rhs.time_cov;
    let global = |q: &[usize]| q.iter().map(|&a| if a == n { tt } else { a }).collect::<Vec<_>>();
    let out = block_residuals(&|q| { let g = global(q); cov([g[0], g[1], g[2], g[3]]) }, r, p, m, frame);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::FlowFamily;

    #[test]
    fn closed_gaps_match_autodiff_on_cigar() {
        let x = [0.6, -0.3];
        for row in harnack_limit_check(&FlowFamily::Cigar, &[8, 16], &x, 0.3).unwrap() {
            let base = BaseData::at(&FlowFamily::Cigar, &x, 0.3).unwrap();
            let closed = closed_limit_gaps(&base, row.n_fiber);
            for b in 0..3 {
                assert!((closed[b] - row.gaps[b]).abs() < 1e-9, "{b}: {closed:?} {:?}", row.gaps);
            }
        }
    }

    #[test]
    fn restricted_closed_matches_autodiff() {
        let x = [0.6, -0.3];
        let auto = restricted_triple(&FlowFamily::Cigar, 12, &x, 0.3).unwrap();
        let closed = restricted_triple_closed(&BaseData::at(&FlowFamily::Cigar, &x, 0.3).unwrap(), 12);
        assert!(auto.riemann.max_abs_diff(&closed.riemann) < 1e-10);
        assert!(auto.p.max_abs_diff(&closed.p) < 1e-10);
        assert!(auto.m.max_abs_diff(&closed.m) < 1e-10);
    }

    #[test]
    fn flat_base_is_exactly_flat() {
        let fit = ricci_decay_fit(&FlowFamily::StaticFlat { n: 2 }, &[4, 8], 3, (0.1, 0.5), 1).unwrap();
        assert!(fit.exactly_flat && fit.slope.is_none());
        assert!(fit.csv().starts_with("N,ricci_norm\n4,"));
    }

    #[test]
    fn spacetime_examples() {
        let s3 = FlowFamily::ConstantCurvature { n: 3, c0: 3.0 };
        let x = s3.sample_point(&mut ChaCha8Rng::seed_from_u64(1));
        let r = spacetime_residuals(&s3, 16, &x, 0.1).unwrap();
        assert!(r.time_cov[0] <= r.tolerance && r.time_cov_full[0] <= r.tolerance, "{r:?}");
        let s2 = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        let x = s2.sample_point(&mut ChaCha8Rng::seed_from_u64(1));
        let r16 = spacetime_residuals(&s2, 16, &x, 0.2).unwrap();
        assert!(r16.heat[2] <= r16.tolerance, "{r16:?}");
        // O(1/N): N · residual roughly constant
        let r64 = spacetime_residuals(&s2, 64, &x, 0.2).unwrap();
        for eq in [SpacetimeEquation::TimeCov, SpacetimeEquation::Laplacian, SpacetimeEquation::Heat] {
            let (a, b) = (16.0 * r16.get(eq), 64.0 * r64.get(eq));
            assert!((a / b - 1.0).abs() < 0.3, "{eq:?} {a} {b}");
        }
        let flat = spacetime_residuals(&FlowFamily::StaticFlat { n: 2 }, 16, &[0.3, 0.2], 0.5).unwrap();
        assert!([SpacetimeEquation::TimeCov, SpacetimeEquation::Laplacian, SpacetimeEquation::Heat, SpacetimeEquation::TimeCovFull]
            .iter()
            .all(|&e| flat.get(e) < 1e-10));
        assert!(matches!(spacetime_residuals(&FlowFamily::Cigar, 16, &[0.3, 0.2], 0.5), Err(GeomError::Unsupported(_))));
    }

    #[test]
    fn restricted_precondition() {
        // a product of spheres has weakly positive curvature operator
        let b = FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 };
        let x = b.sample_point(&mut ChaCha8Rng::seed_from_u64(2));
        assert!(restricted_min_eig(&b, 100, &x, 0.3, 1e-9).is_ok());
    }
}
