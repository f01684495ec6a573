//! The heat-type evolution of the Harnack tensors `P` and `M` along a flow.
//!
//! Right-hand sides are built from the tensors at one point. The left-hand
//! side `(∂_t − Δ)` comes from jets on homogeneous flows, where every
//! derivative of curvature vanishes, and otherwise from central differences
//! of exactly computed `P` and `M` with one Richardson step.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{raise_two, FlowFamily, FlowPoint};
use crate::chart::JetGeometry;
use crate::error::Result;
use crate::jet::{seed_point, Jet};
use crate::tensor::{multi_index, JetTensor, Tensor};

/// Index placement of the third curvature–P term in the P equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PTermPlacement {
    /// `2 R_jmkn P_i^mn`.
    Direct,
    /// `2 R_imkn P_j^mn`, with `i` and `j` exchanged.
    Swapped,
}

/// Right-hand side split into the part without Ricci multiplications and
/// the Ricci-multiplication terms `R^m_i T_m.. + …`, whose sign depends on
/// whether the time derivative is taken in coordinates or along `D_t`.
pub struct HeatRhs {
    pub core: Tensor,
    pub ricci_terms: Tensor,
}

impl HeatRhs {
    /// Max-abs of `lhs − (core + sign · ricci_terms)`.
    pub fn residual(&self, lhs: &Tensor, sign: f64) -> f64 {
        lhs.sub(&self.core).sub(&self.ricci_terms.scaled(sign)).max_abs()
    }
}

pub fn heat_p_rhs(fp: &FlowPoint, placement: PTermPlacement) -> HeatRhs {
    let n = fp.dim();
    let g = &fp.inverse;
    let (rm, p) = (&fp.riemann, &fp.p);
    let rmix = fp.ricci_mixed();
    let mut core = Tensor::zeros(n, 3);
    let mut ricci_terms = Tensor::zeros(n, 3);
    let mut ix = [0; 3];
    for f in 0..n * n * n {
        multi_index(f, n, &mut ix);
        let [i, j, k] = ix;
        let mut c = 0.0;
        let mut r = 0.0;
        for m in 0..n {
            for nn in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let w = g[(m, a)] * g[(nn, b)];
                        let third = match placement {
                            PTermPlacement::Direct => rm.at(&[j, m, k, nn]) * p.at(&[i, a, b]),
                            PTermPlacement::Swapped => rm.at(&[i, m, k, nn]) * p.at(&[j, a, b]),
                        };
                        c += 2.0 * w * (rm.at(&[i, m, j, nn]) * p.at(&[a, b, k]) + rm.at(&[i, m, k, nn]) * p.at(&[a, j, b]) + third);
                    }
                }
                for q in 0..n {
                    c -= 2.0 * rmix[(m, nn)] * g[(nn, q)] * fp.nabla_riemann.at(&[m, i, j, k, q]);
                }
            }
            r += rmix[(m, i)] * p.at(&[m, j, k]) + rmix[(m, j)] * p.at(&[i, m, k]) + rmix[(m, k)] * p.at(&[i, j, m]);
        }
        core.set(&ix, c);
        ricci_terms.set(&ix, r);
    }
    HeatRhs { core, ricci_terms }
}

pub fn heat_m_rhs(fp: &FlowPoint) -> HeatRhs {
    let n = fp.dim();
    let g = &fp.inverse;
    let (rm, ric, p, m) = (&fp.riemann, &fp.ricci, &fp.p, &fp.m);
    let rmix = fp.ricci_mixed();
    let m_up = raise_two(m, g);
    let ric_up = raise_two(ric, g);
    let t = fp.t;
    let core = Tensor::from_fn(n, 2, |ij| {
        let (i, j) = (ij[0], ij[1]);
        let mut c = -ric.at(&[i, j]) / (2.0 * t * t);
        for mm in 0..n {
            for nn in 0..n {
                c += 2.0 * rm.at(&[i, mm, j, nn]) * m_up.at(&[mm, nn]);
                c += 2.0 * ric_up.at(&[mm, nn]) * (fp.nabla_p.at(&[mm, nn, i, j]) + fp.nabla_p.at(&[mm, nn, j, i]));
                for a in 0..n {
                    for b in 0..n {
                        let w = g[(mm, a)] * g[(nn, b)];
                        // 2 P_imn P_j^mn − 4 P_imn P_j^nm
                        c += w * (2.0 * p.at(&[i, mm, nn]) * p.at(&[j, a, b]) - 4.0 * p.at(&[i, mm, nn]) * p.at(&[j, b, a]));
                    }
                    // 2 R^mn R_m^l R_injl, R_m^l = R_ma g^al
                    for l in 0..n {
                        c += 2.0 * ric_up.at(&[mm, nn]) * ric.at(&[mm, a]) * g[(a, l)] * rm.at(&[i, nn, j, l]);
                    }
                }
            }
        }
        c
    });
    let ricci_terms = Tensor::from_fn(n, 2, |ij| {
        let (i, j) = (ij[0], ij[1]);
        (0..n).map(|mm| rmix[(mm, i)] * m.at(&[mm, j]) + rmix[(mm, j)] * m.at(&[i, mm])).sum()
    });
    HeatRhs { core, ricci_terms }
}

/// `(∂_t − Δ)P` and `(∂_t − Δ)M`.
pub struct HeatLhs {
    pub p: Tensor,
    pub m: Tensor,
}

/// On a homogeneous flow the derivative terms of M vanish identically, so
/// `M = 2 R_ikjl R^kl − R_ik R^k_j + R_ij / 2t` as a space-time field and its
/// jets give `(∂_t − Δ)M`. `P ≡ 0` there, so only `∂_t P` is kept.
pub(crate) fn heat_lhs_homogeneous(fp: &FlowPoint) -> HeatLhs {
    let n = fp.dim();
    let geo = &fp.geo;
    let two_t = fp.time_var.scale(2.0);
    let m_alg: JetTensor = Tensor::from_fn(n, 2, |i| {
        let (a, b) = (i[0], i[1]);
        let mut acc = geo.ricci.get(&[a, b]) / &two_t;
        for k in 0..n {
            for l in 0..n {
                let up = raise_jet(&geo.ginv, &geo.ricci, k, l);
                acc = &acc + &(&(geo.riemann.get(&[a, k, b, l]) * &up) * 2.0);
                acc = &acc - &(&(geo.ricci.get(&[a, k]) * geo.ginv.get(&[k, l])) * geo.ricci.get(&[l, b]));
            }
        }
        acc
    });
    let dt_m = m_alg.partial(n).values();
    let lap_m = geo.laplacian(&m_alg).values();
    HeatLhs { p: fp.dt_p.clone(), m: dt_m.sub(&lap_m) }
}

fn raise_jet(ginv: &JetTensor, t: &JetTensor, k: usize, l: usize) -> Jet {
    let n = t.dim();
    let mut acc = t.get(&[0, 0]).zero_like();
    for c in 0..n {
        for d in 0..n {
            acc = &acc + &(&(ginv.get(&[k, c]) * ginv.get(&[l, d])) * t.get(&[c, d]));
        }
    }
    acc
}

/// Order-2 jets of a tensor field from its values on the central-difference
/// stencil of step `h`.
fn fd_jet_tensor(n: usize, h: f64, at: &dyn Fn(&[(usize, f64)]) -> Result<Tensor>) -> Result<JetTensor> {
    let x: Vec<Jet> = (0..n).map(|a| Jet::variable(n, 2, a, 0.0)).collect();
    let c = at(&[])?;
    let mut acc = c.map(|v| Jet::constant(n, 2, *v));
    let add = |acc: &mut JetTensor, d: &Tensor, mono: &Jet| {
        for f in 0..d.data().len() {
            let v = &acc.data()[f] + &mono.scale(d.data()[f]);
            let mut ix = vec![0; d.rank()];
            multi_index(f, n, &mut ix);
            acc.set(&ix, v);
        }
    };
    for a in 0..n {
        let (pl, mi) = (at(&[(a, h)])?, at(&[(a, -h)])?);
        add(&mut acc, &pl.sub(&mi).scaled(0.5 / h), &x[a]);
        add(&mut acc, &pl.add(&mi).sub(&c.scaled(2.0)).scaled(0.5 / (h * h)), &(&x[a] * &x[a]));
        for b in a + 1..n {
            let pp = at(&[(a, h), (b, h)])?;
            let pm = at(&[(a, h), (b, -h)])?;
            let mp = at(&[(a, -h), (b, h)])?;
            let mm = at(&[(a, -h), (b, -h)])?;
            add(&mut acc, &pp.sub(&pm).sub(&mp).add(&mm).scaled(0.25 / (h * h)), &(&x[a] * &x[b]));
        }
    }
    Ok(acc)
}

fn heat_lhs_fd_step(family: &FlowFamily, x: &[f64], t: f64, h: f64) -> Result<HeatLhs> {
    let n = family.dim();
    let shifted = |s: &[(usize, f64)], dt: f64| -> Result<FlowPoint> {
        let mut y = x.to_vec();
        for &(a, d) in s {
            y[a] += d;
        }
        FlowPoint::new(family, &y, t + dt)
    };
    let jets = seed_point(x, &(0..n).collect::<Vec<_>>(), 3);
    let geo = JetGeometry::from_metric(n, family.metric_jets(&jets, &jets[0].constant_like(t))?)?;
    let p_jet = fd_jet_tensor(n, h, &|s| Ok(shifted(s, 0.0)?.p))?;
    let m_jet = fd_jet_tensor(n, h, &|s| Ok(shifted(s, 0.0)?.m))?;
    let (later, earlier, now) = (shifted(&[], h)?, shifted(&[], -h)?, shifted(&[], 0.0)?);
    let dt_p = later.p.sub(&earlier.p).scaled(0.5 / h);
    // the explicit R_ij / 2t term is differentiated exactly, the rest by differences
    let core = |fp: &FlowPoint| fp.m.sub(&fp.ricci.scaled(0.5 / fp.t));
    let dt_m = core(&later)
        .sub(&core(&earlier))
        .scaled(0.5 / h)
        .add(&now.dt_ricci.scaled(0.5 / t))
        .sub(&now.ricci.scaled(0.5 / (t * t)));
    Ok(HeatLhs { p: dt_p.sub(&geo.laplacian(&p_jet).values()), m: dt_m.sub(&geo.laplacian(&m_jet).values()) })
}

/// Finite-difference `(∂_t − Δ)` of P and M with Richardson extrapolation
/// over steps `h` and `h/2`.
pub fn heat_lhs_fd(family: &FlowFamily, x: &[f64], t: f64, h: f64) -> Result<HeatLhs> {
    let coarse = heat_lhs_fd_step(family, x, t, h)?;
    let fine = heat_lhs_fd_step(family, x, t, h / 2.0)?;
    let rich = |c: &Tensor, f: &Tensor| f.scaled(4.0 / 3.0).sub(&c.scaled(1.0 / 3.0));
    Ok(HeatLhs { p: rich(&coarse.p, &fine.p), m: rich(&coarse.m, &fine.m) })
}

/// Step used for the finite-difference left-hand side.
pub const HEAT_FD_STEP: f64 = 2.5e-3;

#[derive(Clone, Debug, Serialize)]
pub struct HeatResiduals {
    /// P equation with the direct placement and Ricci terms of sign −.
    pub p: f64,
    /// Same with Ricci terms of sign +.
    pub p_plus: f64,
    /// Swapped placement, sign −.
    pub p_swapped: f64,
    /// M equation with Ricci terms of sign −.
    pub m: f64,
    pub m_plus: f64,
    /// Largest P component: the placement test only has power when P ≠ 0.
    pub p_size: f64,
    pub exact: bool,
}

pub fn heat_residuals(fp: &FlowPoint) -> Result<HeatResiduals> {
    let exact = fp.family.homogeneous();
    let lhs = if exact { heat_lhs_homogeneous(fp) } else { heat_lhs_fd(&fp.family, &fp.x, fp.t, HEAT_FD_STEP)? };
    let p_rhs = heat_p_rhs(fp, PTermPlacement::Direct);
    let p_swapped = heat_p_rhs(fp, PTermPlacement::Swapped);
    let m_rhs = heat_m_rhs(fp);
    Ok(HeatResiduals {
        p: p_rhs.residual(&lhs.p, -1.0),
        p_plus: p_rhs.residual(&lhs.p, 1.0),
        p_swapped: p_swapped.residual(&lhs.p, -1.0),
        m: m_rhs.residual(&lhs.m, -1.0),
        m_plus: m_rhs.residual(&lhs.m, 1.0),
        p_size: fp.p.max_abs(),
        exact,
    })
}

/// `|M − M_algebraic|` on a homogeneous flow, which justifies the algebraic
/// form used for the jet left-hand side.
pub fn homogeneity_defect(fp: &FlowPoint) -> f64 {
    let n = fp.dim();
    let g: &DMatrix<f64> = &fp.inverse;
    let quad = super::ricci_quadratic(&fp.riemann, &fp.ricci, g);
    let alg = Tensor::from_fn(n, 2, |i| 2.0 * quad.rm_ric.at(i) - quad.ric_ric.at(i) + fp.ricci.at(i) / (2.0 * fp.t));
    alg.max_abs_diff(&fp.m).max(fp.gradient_size())
}
