//! Closed-form Christoffel symbols, curvature and Ricci components of the
//! hyperbolic and restricted thermostats, checked against the generic
//! autodiff pipeline family by family.
//!
//! With `A = R − N/2t` and `S = ∂_t R + N/2t²`:
//! `R̃_ijkl = R_ijkl − A⁻¹(R_ik R_jl − R_jk R_il)` (printed with `+`),
//! `R̃_ij0k = P_ijk + ½A⁻¹(∂_jR R_ik − ∂_iR R_jk)`,
//! `R̃_i0j0 = M_ij − R_ij/2t − ½A⁻¹S R_ij + ¼A⁻¹ ∂_iR ∂_jR`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{BaseData, ThermostatChart, ThermostatVariant};
use crate::chart::{christoffel, contract_curvature, riemann_sampled, MetricDerivs, DENSE_DIM_CAP};
use crate::error::{GeomError, Result};
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Base,
    Fiber,
    Time,
}

/// One closed-form component. `printed` is the value of the formula as
/// typeset when that differs from the derivation.
#[derive(Clone, Debug)]
pub struct Entry {
    pub family: &'static str,
    pub vanishing: bool,
    pub value: f64,
    pub printed: Option<f64>,
}

/// Closed-form values over a list of index tuples.
#[derive(Clone, Debug)]
pub struct ClosedTable {
    pub dim: usize,
    pub entries: Vec<(Vec<usize>, Entry)>,
}

/// Agreement of one component family with autodiff.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub family: String,
    pub vanishing: bool,
    pub components: usize,
    pub residual: f64,
    /// Residual of the typeset variant, where one exists.
    pub printed_residual: Option<f64>,
    pub max_abs: f64,
}

struct Forms<'a> {
    chart: &'a ThermostatChart,
    base: BaseData,
    n: usize,
    nf: usize,
    h: DMatrix<f64>,
    fiber_gamma: Option<Tensor>,
    a: f64,
}

impl<'a> Forms<'a> {
    fn new(chart: &'a ThermostatChart, point: &[f64]) -> Result<Self> {
        let spec = &chart.spec;
        if spec.variant == ThermostatVariant::Spherical {
            return Err(GeomError::Unsupported("closed forms are tabulated for the hyperbolic and restricted variants".into()));
        }
        let (x, y, t) = chart.split(point);
        let p = chart.point(x, y, t)?;
        let base = BaseData::at(&spec.base, x, t)?;
        let h = chart.fiber_metric(y)?;
        let fiber_gamma = match chart.fiber() {
            Some(f) => Some(christoffel(f.as_ref(), y)?),
            None => None,
        };
        debug_assert_eq!(p.len(), spec.dim());
        let a = base.a(spec.n_fiber);
        Ok(Forms { chart, base, n: spec.base_dim(), nf: spec.fiber_dim(), h, fiber_gamma, a, })
    }

    fn kind(&self, a: usize) -> Kind {
        if a < self.n {
            Kind::Base
        } else if a < self.n + self.nf {
            Kind::Fiber
        } else {
            Kind::Time
        }
    }

    fn t(&self) -> f64 {
        self.base.t
    }

    fn s(&self) -> f64 {
        self.base.dt_scalar + self.chart.spec.n_fiber as f64 / (2.0 * self.t() * self.t())
    }

    fn christoffel(&self, a: usize, b: usize, c: usize) -> Entry {
        use Kind::*;
        let (ka, mut kb, mut kc) = (self.kind(a), self.kind(b), self.kind(c));
        let (mut b, mut c) = (b, c);
        if kb > kc {
            std::mem::swap(&mut b, &mut c);
            std::mem::swap(&mut kb, &mut kc);
        }
        let ai = 1.0 / self.a;
        let base = &self.base;
        let f = self.n;
        let (family, value): (&'static str, Option<f64>) = match (ka, kb, kc) {
            (Time, Time, Time) => ("Γ^0_00", Some(0.5 * ai * self.s())),
            (Time, Base, Time) => ("Γ^0_i0", Some(0.5 * ai * base.d_scalar[b])),
            (Base, Time, Time) => ("Γ^i_00", Some(-0.5 * base.grad_scalar()[a])),
            (Base, Base, Time) => ("Γ^i_j0", Some(-base.ricci_mixed()[(a, b)])),
            (Time, Base, Base) => ("Γ^0_ij", Some(ai * base.ricci.at(&[b, c]))),
            (Base, Base, Base) => ("Γ^i_jk", Some(base.gamma.as_ref().map_or(f64::NAN, |g| g.at(&[a, b, c])))),
            (Fiber, Fiber, Time) => ("Γ^α_β0", Some(if a == b { 0.5 / self.t() } else { 0.0 })),
            (Time, Fiber, Fiber) => ("Γ^0_αβ", Some(-0.5 * ai * self.h[(b - f, c - f)])),
            (Fiber, Fiber, Fiber) => {
                ("Γ^α_βγ", Some(self.fiber_gamma.as_ref().map_or(f64::NAN, |g| g.at(&[a - f, b - f, c - f]))))
            }
            (Fiber, Time, Time) => ("Γ^α_00", None),
            (Time, Fiber, Time) => ("Γ^0_α0", None),
            (Base, Fiber, Time) => ("Γ^i_α0", None),
            (Fiber, Base, Time) => ("Γ^α_i0", None),
            (Time, Base, Fiber) => ("Γ^0_iα", None),
            (Base, Fiber, Fiber) => ("Γ^i_αβ", None),
            (Fiber, Base, Base) => ("Γ^α_ij", None),
            (Base, Base, Fiber) => ("Γ^i_jα", None),
            (Fiber, Base, Fiber) => ("Γ^α_βi", None),
            _ => unreachable!("lower indices are sorted"),
        };
        Entry { family, vanishing: value.is_none(), value: value.unwrap_or(0.0), printed: None }
    }

    fn riemann(&self, idx: &[usize]) -> Option<Entry> {
        use Kind::*;
        let k: Vec<Kind> = idx.iter().map(|&a| self.kind(a)).collect();
        let pair = |x: Kind, y: Kind| if x <= y { (x, y) } else { (y, x) };
        let (p1, p2) = (pair(k[0], k[1]), pair(k[2], k[3]));
        if idx[0] == idx[1] || idx[2] == idx[3] || p1 == (Time, Time) || p2 == (Time, Time) {
            return None;
        }
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let zero = |family| Some(Entry { family, vanishing: true, value: 0.0, printed: None });
        let b = &self.base;
        let ai = 1.0 / self.a;
        let f = self.n;
        let ric = |i: usize, j: usize| b.ricci.at(&[i, j]);
        match (lo, hi) {
            ((Base, Base), (Base, Base)) => {
                let [i, j, kk, l] = [idx[0], idx[1], idx[2], idx[3]];
                let rr = b.riemann.at(idx);
                let value = rr - ai * (ric(i, kk) * ric(j, l) - ric(j, kk) * ric(i, l));
                let printed = rr - ai * (ric(i, kk) * ric(j, l) + ric(j, kk) * ric(i, l));
                Some(Entry { family: "R_ijkl", vanishing: false, value, printed: Some(printed) })
            }
            ((Base, Base), (Base, Time)) => self.oriented(idx, [Base, Base, Time, Base], "R_ij0k", |v| {
                let [i, j, _, kk] = v;
                b.p.at(&[i, j, kk]) + 0.5 * ai * (b.d_scalar[j] * ric(i, kk) - b.d_scalar[i] * ric(j, kk))
            }),
            ((Base, Time), (Base, Time)) => {
                let t = self.t();
                let mut e = self.oriented(idx, [Base, Time, Base, Time], "R_i0j0", |v| {
                    let [i, _, j, _] = v;
                    b.m.at(&[i, j]) - ric(i, j) / (2.0 * t) - 0.5 * ai * self.s() * ric(i, j)
                        + 0.25 * ai * b.d_scalar[i] * b.d_scalar[j]
                })?;
                // the last step of the derivation drops the inverse on the gradient term
                let (sign, v) = self.orientation(idx, [Base, Time, Base, Time])?;
                let [i, _, j, _] = v;
                let printed = b.m.at(&[i, j]) - ric(i, j) / (2.0 * t) - 0.5 * ai * self.s() * ric(i, j)
                    + 0.25 * self.a * b.d_scalar[i] * b.d_scalar[j];
                e.printed = Some(sign * printed);
                Some(e)
            }
            ((Fiber, Fiber), (Fiber, Fiber)) => {
                let [al, be, ga, de] = [idx[0] - f, idx[1] - f, idx[2] - f, idx[3] - f];
                let h = &self.h;
                let coef = -0.25 * (2.0 * self.t() / self.nf as f64 + ai);
                let value = coef * (h[(al, ga)] * h[(be, de)] - h[(be, ga)] * h[(al, de)]);
                Some(Entry { family: "R_αβγδ", vanishing: false, value, printed: None })
            }
            ((Base, Fiber), (Base, Fiber)) => self.oriented(idx, [Fiber, Base, Fiber, Base], "R_αiβj", |v| {
                let [al, i, be, j] = v;
                0.5 * ai * self.h[(al - f, be - f)] * ric(i, j)
            }),
            ((Base, Fiber), (Fiber, Time)) => self.oriented(idx, [Fiber, Time, Fiber, Base], "R_α0βi", |v| {
                let [al, _, be, i] = v;
                0.25 * ai * self.h[(al - f, be - f)] * b.d_scalar[i]
            }),
            ((Fiber, Time), (Fiber, Time)) => self.oriented(idx, [Fiber, Time, Fiber, Time], "R_α0β0", |v| {
                let [al, _, be, _] = v;
                0.25 * ai * (b.dt_scalar + b.scalar / self.t()) * self.h[(al - f, be - f)]
            }),
            ((Base, Fiber), (Fiber, Fiber)) => zero("R_αβγi"),
            ((Fiber, Fiber), (Fiber, Time)) => zero("R_αβγ0"),
            ((Base, Base), (Fiber, Fiber)) => zero("R_αβij"),
            ((Base, Time), (Fiber, Fiber)) => zero("R_αβ0i"),
            ((Base, Base), (Base, Fiber)) => zero("R_αijk"),
            ((Base, Fiber), (Base, Time)) => zero("R_αij0"),
            ((Base, Base), (Fiber, Time)) => zero("R_α0jk"),
            ((Base, Time), (Fiber, Time)) => zero("R_α0j0"),
            _ => None,
        }
    }

    /// The symmetry variant of `idx` whose kinds match `want`, with its sign.
    fn orientation(&self, idx: &[usize], want: [Kind; 4]) -> Option<(f64, [usize; 4])> {
        let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]];
        let variants = [
            (1.0, [a, b, c, d]),
            (-1.0, [b, a, c, d]),
            (-1.0, [a, b, d, c]),
            (1.0, [b, a, d, c]),
            (1.0, [c, d, a, b]),
            (-1.0, [d, c, a, b]),
            (-1.0, [c, d, b, a]),
            (1.0, [d, c, b, a]),
        ];
        variants.into_iter().find(|(_, v)| v.iter().zip(want).all(|(&x, k)| self.kind(x) == k))
    }

    fn oriented(&self, idx: &[usize], want: [Kind; 4], family: &'static str, f: impl Fn([usize; 4]) -> f64) -> Option<Entry> {
        let (sign, v) = self.orientation(idx, want)?;
        Some(Entry { family, vanishing: false, value: sign * f(v), printed: None })
    }

    fn ricci(&self, a: usize, b: usize) -> Entry {
        use Kind::*;
        let (mut a, mut b) = (a, b);
        if self.kind(a) > self.kind(b) {
            std::mem::swap(&mut a, &mut b);
        }
        let base = &self.base;
        let ai = 1.0 / self.a;
        let f = self.n;
        let grad = base.grad_scalar();
        match (self.kind(a), self.kind(b)) {
            (Time, Time) => {
                let sq: f64 = grad.iter().zip(&base.d_scalar).map(|(u, v)| u * v).sum();
                Entry { family: "R_00", vanishing: false, value: 0.25 * ai * sq, printed: Some(0.25 * ai * sq.sqrt()) }
            }
            (Base, Time) => {
                let v: f64 = (0..f).map(|j| base.d_scalar[j] * base.ricci_mixed()[(j, a)]).sum();
                Entry { family: "R_0i", vanishing: false, value: 0.5 * ai * v, printed: None }
            }
            (Fiber, Time) => Entry { family: "R_0α", vanishing: true, value: 0.0, printed: None },
            (Base, Fiber) => Entry { family: "R_iα", vanishing: true, value: 0.0, printed: None },
            (Fiber, Fiber) => {
                let nn = self.chart.spec.n_fiber as f64;
                let r = base.scalar;
                let value = 0.25 * ai * ai * (base.dt_scalar + 2.0 * r * r / nn) * self.h[(a - f, b - f)];
                Entry { family: "R_αβ", vanishing: false, value, printed: None }
            }
            (Base, Base) => {
                let rr = |i: usize, j: usize| base.ricci.at(&[i, j]);
                let rm = base.ricci_mixed();
                let ric2: f64 = (0..f).map(|m| rr(a, m) * rm[(m, b)]).sum();
                // ΔR_ij + 2R_ikjl R^kl − ½∇_i∇_j R = M_ij + R_im R^m_j − R_ij/2t
                let core = base.m.at(&[a, b]) + ric2 - rr(a, b) / (2.0 * self.t());
                let value = ai * core
                    + 0.5 * ai * ai * (0.5 * base.d_scalar[a] * base.d_scalar[b] - self.s() * rr(a, b));
                Entry { family: "R_ij", vanishing: false, value, printed: None }
            }
            _ => unreachable!("sorted by kind"),
        }
    }
}

/// Index tuples examined: every index when the chart is small enough for
/// dense curvature, otherwise all base and time indices and four fiber indices.
fn index_set(chart: &ThermostatChart) -> Vec<usize> {
    let d = chart.spec.dim();
    if d <= DENSE_DIM_CAP {
        return (0..d).collect();
    }
    let (n, nf) = (chart.spec.base_dim(), chart.spec.fiber_dim());
    let mut v: Vec<usize> = (0..n).collect();
    v.extend([n, n + 1, n + 2, n + nf - 1]);
    v.push(d - 1);
    v
}

pub fn closed_form_christoffel(chart: &ThermostatChart, point: &[f64]) -> Result<ClosedTable> {
    let forms = Forms::new(chart, point)?;
    let ix = index_set(chart);
    let mut entries = Vec::new();
    for &a in &ix {
        for &b in &ix {
            for &c in ix.iter().filter(|&&c| c >= b) {
                entries.push((vec![a, b, c], forms.christoffel(a, b, c)));
            }
        }
    }
    Ok(ClosedTable { dim: chart.spec.dim(), entries })
}

pub fn closed_form_curvature(chart: &ThermostatChart, point: &[f64]) -> Result<ClosedTable> {
    let forms = Forms::new(chart, point)?;
    let ix = index_set(chart);
    let mut entries = Vec::new();
    let n = chart.spec.base_dim();
    for &a in &ix {
        for &b in &ix {
            for &c in &ix {
                for &d in &ix {
                    // every ordering of base tuples, so that the typeset sign shows up
                    let base = [a, b, c, d].iter().all(|&i| i < n);
                    if !base && (b <= a || d <= c) {
                        continue;
                    }
                    let idx = vec![a, b, c, d];
                    if let Some(e) = forms.riemann(&idx) {
                        entries.push((idx, e));
                    }
                }
            }
        }
    }
    Ok(ClosedTable { dim: chart.spec.dim(), entries })
}

pub fn closed_form_ricci(chart: &ThermostatChart, point: &[f64]) -> Result<ClosedTable> {
    if chart.spec.variant != ThermostatVariant::Hyperbolic {
        return Err(GeomError::Unsupported("Ricci closed forms are tabulated for the hyperbolic thermostat".into()));
    }
    let forms = Forms::new(chart, point)?;
    let d = chart.spec.dim();
    let mut entries = Vec::new();
    for a in 0..d {
        for b in a..d {
            entries.push((vec![a, b], forms.ricci(a, b)));
        }
    }
    Ok(ClosedTable { dim: d, entries })
}

/// Autodiff Christoffel symbols, Riemann and Ricci tensors of a dense chart.
pub fn autodiff_tables(chart: &ThermostatChart, point: &[f64]) -> Result<(Tensor, Tensor, Tensor)> {
    if chart.spec.dim() > DENSE_DIM_CAP {
        return Err(GeomError::Unsupported(format!("dense tables of a {}-dimensional chart", chart.spec.dim())));
    }
    let md = MetricDerivs::dense(chart, point)?;
    let rm = md.riemann();
    let (ric, _) = contract_curvature(&rm, &md.ginv);
    Ok((md.christoffel(), rm, ric))
}

fn compare(table: &ClosedTable, actual: impl Fn(&[usize]) -> f64) -> Vec<FamilyCheck> {
    let mut out: BTreeMap<&str, FamilyCheck> = BTreeMap::new();
    for (idx, e) in &table.entries {
        let v = actual(idx);
        let c = out.entry(e.family).or_insert_with(|| FamilyCheck {
            family: e.family.to_string(),
            vanishing: e.vanishing,
            components: 0,
            residual: 0.0,
            printed_residual: e.printed.map(|_| 0.0),
            max_abs: 0.0,
        });
        c.components += 1;
        c.residual = c.residual.max((e.value - v).abs());
        if let (Some(p), Some(r)) = (e.printed, c.printed_residual.as_mut()) {
            *r = r.max((p - v).abs());
        }
        c.max_abs = c.max_abs.max(v.abs());
    }
    out.into_values().collect()
}

pub fn compare_christoffel(chart: &ThermostatChart, point: &[f64]) -> Result<Vec<FamilyCheck>> {
    let table = closed_form_christoffel(chart, point)?;
    let gamma = christoffel(chart, point)?;
    Ok(compare(&table, |i| gamma.at(i)))
}

pub fn compare_curvature(chart: &ThermostatChart, point: &[f64]) -> Result<Vec<FamilyCheck>> {
    let table = closed_form_curvature(chart, point)?;
    if chart.spec.dim() <= DENSE_DIM_CAP {
        let rm = MetricDerivs::dense(chart, point)?.riemann();
        return Ok(compare(&table, |i| rm.at(i)));
    }
    let tuples: Vec<[usize; 4]> = table.entries.iter().map(|(i, _)| [i[0], i[1], i[2], i[3]]).collect();
    let vals = riemann_sampled(chart, point, &tuples)?;
    let lookup: BTreeMap<[usize; 4], f64> = tuples.into_iter().zip(vals).collect();
    Ok(compare(&table, |i| lookup[&[i[0], i[1], i[2], i[3]]]))
}

pub fn compare_ricci(chart: &ThermostatChart, point: &[f64]) -> Result<Vec<FamilyCheck>> {
    let table = closed_form_ricci(chart, point)?;
    let (_, _, ric) = autodiff_tables(chart, point)?;
    Ok(compare(&table, |i| ric.at(i)))
}

#[cfg(test)]
mod tests {
    use super::super::{build_metric, ThermostatSpec};
    use super::*;
    use crate::flow::FlowFamily;

    fn worst(checks: &[FamilyCheck]) -> f64 {
        checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    #[test]
    fn sphere_base_matches_autodiff() {
        let spec = ThermostatSpec::hyperbolic(4, FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }).unwrap();
        let ch = build_metric(&spec).unwrap();
        let p = ch.point(&[1.1, 0.4], &[0.3, -0.2, 0.5, 0.9], 0.4).unwrap();
        for checks in [compare_christoffel(&ch, &p).unwrap(), compare_curvature(&ch, &p).unwrap(), compare_ricci(&ch, &p).unwrap()] {
            assert!(worst(&checks) < 1e-9, "{checks:#?}");
        }
    }

    #[test]
    fn spherical_fiber_coefficient_is_the_hyperbolic_one_with_flipped_shift() {
        // coefficient of h_αγ h_βδ − h_βγ h_αδ in R̃_αβγδ, as a function of R and s = ∓N/2t
        let coef = |r: f64, s: f64| -0.25 * (1.0 / s + 1.0 / (r - s));
        let base = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        let nf = 4;
        let y = [0.3, -0.2, 0.5, 0.1];
        for (variant, time) in [(ThermostatVariant::Hyperbolic, 0.4), (ThermostatVariant::Spherical, 0.4)] {
            let spec = ThermostatSpec::new(variant, nf, base.clone()).unwrap();
            let ch = build_metric(&spec).unwrap();
            let p = ch.point(&[1.1, 0.4], &y, time).unwrap();
            let h = ch.fiber_metric(&y).unwrap();
            let (a, b) = (2, 3);
            let rm = riemann_sampled(&ch, &p, &[[a, b, a, b]]).unwrap()[0];
            let r = spec.g00(&[1.1, 0.4], time).unwrap() - spec.time_shift(time);
            let s = -spec.time_shift(time);
            let want = coef(r, s) * h[(0, 0)] * h[(1, 1)];
            assert!((rm - want).abs() < 1e-9, "{variant:?}: {rm} vs {want}");
        }
    }

    #[test]
    fn worked_examples() {
        // S² with R = 2 at t = 1, N = 16: Γ^0_ij = g_ij / (−6)
        let spec = ThermostatSpec::hyperbolic(16, FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }).unwrap();
        let ch = build_metric(&spec).unwrap();
        let y: Vec<f64> = (0..16).map(|a| 0.1 * a as f64 + 0.5).collect();
        let p = ch.point(&[1.1, 0.4], &y, 1.0).unwrap();
        let g = christoffel(&ch, &p).unwrap();
        let gm = crate::chart::metric_at(&ch, &p).unwrap();
        let t = spec.time_index();
        assert!((g.at(&[t, 0, 0]) - gm[(0, 0)] / -6.0).abs() < 1e-12);
        // t = 2: Γ^α_β0 = δ/4
        let p2 = ch.point(&[1.1, 0.4], &y, 1.2).unwrap();
        let mut p2 = p2;
        p2[t] = 1.4;
        let g2 = christoffel(&ch, &p2).unwrap();
        assert!((g2.at(&[3, 3, t]) - 1.0 / 2.8).abs() < 1e-12);
    }
}
