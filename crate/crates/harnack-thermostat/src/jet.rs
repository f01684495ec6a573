//! Truncated Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f / α!` of a scalar
//! over a small set of active variables, up to total degree 4. Arithmetic is
//! exact truncated polynomial algebra, so mixed partials share one storage
//! slot and the product rule holds coefficient-wise.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{GeomError, Result};

pub const MAX_ORDER: usize = 4;
pub const MAX_ACTIVE: usize = 6;

/// Divisors smaller than this in magnitude poison the result.
pub const DIV_FLOOR: f64 = 1e-300;

type Exps = [u8; MAX_ACTIVE];

struct Layout {
    exps: Vec<Exps>,
    index: HashMap<Exps, usize>,
    count: [usize; MAX_ORDER + 1],
    mul: Vec<(u16, u16, u16)>,
    mul_count: [usize; MAX_ORDER + 1],
    // up[v][i]: index of exps[i] + e_v, or u16::MAX past the top degree
    up: Vec<Vec<u16>>,
}

fn degree(e: &Exps) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

fn monomials(nvars: usize, deg: usize, out: &mut Vec<Exps>) {
    fn rec(v: usize, nvars: usize, left: usize, cur: &mut Exps, out: &mut Vec<Exps>) {
        if v + 1 == nvars {
            cur[v] = left as u8;
            out.push(*cur);
            cur[v] = 0;
            return;
        }
        for k in (0..=left).rev() {
            cur[v] = k as u8;
            rec(v + 1, nvars, left - k, cur, out);
        }
        cur[v] = 0;
    }
    if nvars == 0 {
        if deg == 0 {
            out.push([0; MAX_ACTIVE]);
        }
        return;
    }
    rec(0, nvars, deg, &mut [0; MAX_ACTIVE], out);
}

impl Layout {
    fn build(nvars: usize) -> Layout {
        let mut exps = Vec::new();
        let mut count = [0; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER {
            monomials(nvars, d, &mut exps);
            count[d] = exps.len();
        }
        let index: HashMap<Exps, usize> = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut mul = Vec::new();
        let mut mul_count = [0; MAX_ORDER + 1];
        let mut d_prev = 0;
        for (k, ek) in exps.iter().enumerate() {
            let dk = degree(ek);
            while d_prev < dk {
                mul_count[d_prev] = mul.len();
                d_prev += 1;
            }
            for (i, ei) in exps[..=k].iter().enumerate() {
                if (0..nvars).all(|v| ei[v] <= ek[v]) {
                    let mut ej = *ek;
                    for v in 0..nvars {
                        ej[v] -= ei[v];
                    }
                    mul.push((i as u16, index[&ej] as u16, k as u16));
                }
            }
        }
        while d_prev <= MAX_ORDER {
            mul_count[d_prev] = mul.len();
            d_prev += 1;
        }
        let up = (0..nvars)
            .map(|v| {
                exps.iter()
                    .map(|e| {
                        let mut f = *e;
                        f[v] += 1;
                        index.get(&f).map_or(u16::MAX, |&i| i as u16)
                    })
                    .collect()
            })
            .collect();
        Layout { exps, index, count, mul, mul_count, up }
    }
}

fn layout(nvars: usize) -> &'static Layout {
    static LAYOUTS: [OnceLock<Layout>; MAX_ACTIVE + 1] = [const { OnceLock::new() }; MAX_ACTIVE + 1];
    LAYOUTS[nvars].get_or_init(|| Layout::build(nvars))
}

/// Number of Taylor coefficients for `nvars` variables up to `order`.
pub fn coefficient_count(nvars: usize, order: usize) -> usize {
    layout(nvars).count[order]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: u8,
    order: u8,
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        assert!(nvars <= MAX_ACTIVE && order <= MAX_ORDER, "jet shape out of range");
        let mut c = vec![0.0; layout(nvars).count[order]];
        c[0] = value;
        Jet { nvars: nvars as u8, order: order as u8, c }
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < nvars);
        let mut j = Jet::constant(nvars, order, value);
        if order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Taylor coefficient for an exponent vector.
    pub fn coefficient(&self, exps: &[u8]) -> f64 {
        let mut e = [0u8; MAX_ACTIVE];
        e[..exps.len()].copy_from_slice(exps);
        if degree(&e) > self.order() {
            return 0.0;
        }
        layout(self.nvars()).index.get(&e).map_or(0.0, |&i| self.c[i])
    }

    /// Partial derivative along a list of variables, e.g. `[0, 0, 1]` for ∂₀²∂₁.
    pub fn partial(&self, vars: &[usize]) -> f64 {
        let mut e = [0u8; MAX_ACTIVE];
        for &v in vars {
            assert!(v < self.nvars(), "variable {v} not active");
            e[v] += 1;
        }
        let fact: f64 = e.iter().map(|&k| factorial(k as usize)).product();
        self.coefficient(&e[..self.nvars()]) * fact
    }

    /// All exponent vectors carried by this jet, in storage order.
    pub fn exponents(&self) -> impl Iterator<Item = &[u8]> + '_ {
        let n = self.nvars();
        layout(n).exps[..self.c.len()].iter().map(move |e| &e[..n])
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        Jet {
            nvars: self.nvars,
            order: order as u8,
            c: self.c[..layout(self.nvars()).count[order]].to_vec(),
        }
    }

    /// ∂/∂x_var, one order lower.
    pub fn deriv(&self, var: usize) -> Jet {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let lay = layout(self.nvars());
        let ord = self.order() - 1;
        let n = lay.count[ord];
        let mut c = vec![0.0; n];
        for (i, ci) in c.iter_mut().enumerate() {
            let u = lay.up[var][i] as usize;
            *ci = (lay.exps[i][var] as f64 + 1.0) * self.c[u];
        }
        Jet { nvars: self.nvars, order: ord as u8, c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { nvars: self.nvars, order: self.order, c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn zero_like(&self) -> Jet {
        Jet::constant(self.nvars(), self.order(), 0.0)
    }

    pub fn constant_like(&self, v: f64) -> Jet {
        Jet::constant(self.nvars(), self.order(), v)
    }

    fn poisoned(&self) -> Jet {
        Jet { nvars: self.nvars, order: self.order, c: vec![f64::NAN; self.c.len()] }
    }

    /// `Σ_k d[k] hᵏ` where `h = self − value`; `d[k]` is the k-th Taylor
    /// coefficient of the outer function at the value.
    fn compose(&self, d: &[f64]) -> Jet {
        let ord = self.order();
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut r = self.constant_like(d[ord]);
        for k in (0..ord).rev() {
            r = &r * &h;
            r.c[0] += d[k];
        }
        r
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let d: Vec<f64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        self.compose(&d)
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        if a <= 0.0 {
            return self.poisoned();
        }
        let mut d = vec![a.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&d)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let a = self.value();
        if a <= 0.0 && p.fract() != 0.0 {
            return self.poisoned();
        }
        if a.abs() < DIV_FLOOR && p < 0.0 {
            return self.poisoned();
        }
        // generalized binomial coefficients C(p, k) a^(p-k)
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            d.push(binom * a.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&d)
    }

    pub fn powi(&self, p: i32) -> Jet {
        if p >= 0 {
            let mut r = self.constant_like(1.0);
            for _ in 0..p {
                r = &r * self;
            }
            r
        } else {
            self.recip().powi(-p)
        }
    }

    pub fn sqrt(&self) -> Jet {
        if self.value() <= 0.0 {
            return self.poisoned();
        }
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        if a.abs() < DIV_FLOOR {
            return self.poisoned();
        }
        let d: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1))
            .collect();
        self.compose(&d)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose(&d)
    }

    /// Checked quotient: the divisor must be bounded away from zero.
    pub fn checked_div(&self, rhs: &Jet) -> Result<Jet> {
        if rhs.value().abs() < DIV_FLOOR {
            return Err(GeomError::Domain(format!("division by {:e}", rhs.value())));
        }
        Ok(self * &rhs.recip())
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn check_shapes(a: &Jet, b: &Jet) -> usize {
    assert_eq!(a.nvars, b.nvars, "jets over different variable sets");
    a.order.min(b.order) as usize
}

fn add_impl(a: &Jet, b: &Jet, sb: f64) -> Jet {
    let ord = check_shapes(a, b);
    let n = layout(a.nvars()).count[ord];
    let c = (0..n).map(|i| a.c[i] + sb * b.c[i]).collect();
    Jet { nvars: a.nvars, order: ord as u8, c }
}

fn mul_impl(a: &Jet, b: &Jet) -> Jet {
    let ord = check_shapes(a, b);
    let lay = layout(a.nvars());
    let mut c = vec![0.0; lay.count[ord]];
    for &(i, j, k) in &lay.mul[..lay.mul_count[ord]] {
        c[k as usize] += a.c[i as usize] * b.c[j as usize];
    }
    Jet { nvars: a.nvars, order: ord as u8, c }
}

macro_rules! jet_binops {
    ($($tr:ident $m:ident $body:expr;)*) => {$(
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { (&self).$m(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet { self.$m(&self.constant_like(rhs)) }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { rhs.constant_like(self).$m(rhs) }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
    )*};
}

jet_binops! {
    Add add |a, b| add_impl(a, b, 1.0);
    Sub sub |a, b| add_impl(a, b, -1.0);
    Mul mul mul_impl;
    Div div |a, b| if b.value().abs() < DIV_FLOOR { a.poisoned() } else { mul_impl(a, &b.recip()) };
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Lift a coordinate point to jets: coordinate `active[k]` becomes variable `k`.
pub fn seed_point(point: &[f64], active: &[usize], order: usize) -> Vec<Jet> {
    let nv = active.len();
    point
        .iter()
        .enumerate()
        .map(|(i, &x)| match active.iter().position(|&a| a == i) {
            Some(k) => Jet::variable(nv, order, k, x),
            None => Jet::constant(nv, order, x),
        })
        .collect()
}

/// Evaluate a scalar field as a jet in the `active` coordinates.
pub fn jet_eval<F>(field: F, point: &[f64], active: &[usize], order: usize) -> Result<Jet>
where
    F: Fn(&[Jet]) -> Result<Jet>,
{
    if order == 0 || order > MAX_ORDER {
        return Err(GeomError::Unsupported(format!("jet order {order} (allowed 1..={MAX_ORDER})")));
    }
    if active.is_empty() || active.len() > MAX_ACTIVE {
        return Err(GeomError::Unsupported(format!(
            "{} active coordinates (allowed 1..={MAX_ACTIVE})",
            active.len()
        )));
    }
    if let Some(&a) = active.iter().find(|&&a| a >= point.len()) {
        return Err(GeomError::Unsupported(format!("active coordinate {a} out of range")));
    }
    let x = seed_point(point, active, order);
    let j = field(&x)?;
    if !j.is_finite() {
        return Err(GeomError::Domain(format!("non-finite jet at {point:?}")));
    }
    Ok(j)
}

/// One row of [`jet_fd_crosscheck`]: a derivative multi-index and its
/// discrepancy against central differences at each step.
#[derive(Clone, Debug)]
pub struct FdRow {
    pub vars: Vec<usize>,
    pub jet: f64,
    pub discrepancy: Vec<f64>,
    /// Observed convergence order between the first two steps.
    pub observed_order: f64,
    /// Discrepancy grew between consecutive steps above the round-off floor.
    pub non_monotone: bool,
}

#[derive(Clone, Debug)]
pub struct FdReport {
    pub steps: Vec<f64>,
    pub rows: Vec<FdRow>,
}

impl FdReport {
    pub fn min_order(&self) -> f64 {
        self.rows.iter().map(|r| r.observed_order).fold(f64::INFINITY, f64::min)
    }

    pub fn max_final_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| *r.discrepancy.last().unwrap()).fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.non_monotone).count()
    }
}

/// Central-difference estimate of the partial along `vars` (one or two entries).
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: &F, point: &[f64], vars: &[usize], h: f64) -> f64 {
    let shifted = |shifts: &[(usize, f64)]| {
        let mut p = point.to_vec();
        for &(v, s) in shifts {
            p[v] += s;
        }
        f(&p)
    };
    match vars {
        [a] => (shifted(&[(*a, h)]) - shifted(&[(*a, -h)])) / (2.0 * h),
        [a, b] if a == b => (shifted(&[(*a, h)]) - 2.0 * f(point) + shifted(&[(*a, -h)])) / (h * h),
        [a, b] => {
            (shifted(&[(*a, h), (*b, h)]) - shifted(&[(*a, h), (*b, -h)]) - shifted(&[(*a, -h), (*b, h)])
                + shifted(&[(*a, -h), (*b, -h)]))
                / (4.0 * h * h)
        }
        _ => panic!("central differences are provided for orders 1 and 2"),
    }
}

/// Compare every jet partial up to `order` (1 or 2) with central differences.
pub fn jet_fd_crosscheck<F>(field: F, point: &[f64], order: usize, steps: &[f64]) -> Result<FdReport>
where
    F: Fn(&[Jet]) -> Result<Jet>,
{
    if !(1..=2).contains(&order) {
        return Err(GeomError::Unsupported(format!("finite-difference order {order}")));
    }
    if steps.len() < 3 || steps.windows(2).any(|w| !(w[1] < w[0]) || w[1] <= 0.0) {
        return Err(GeomError::Precondition("need at least 3 strictly decreasing positive steps".into()));
    }
    let n = point.len();
    let active: Vec<usize> = (0..n.min(MAX_ACTIVE)).collect();
    let jet = jet_eval(&field, point, &active, order)?;
    let scalar = |p: &[f64]| {
        let x: Vec<Jet> = p.iter().map(|&v| Jet::constant(0, 0, v)).collect();
        field(&x).map(|j| j.value()).unwrap_or(f64::NAN)
    };
    let mut index_sets: Vec<Vec<usize>> = active.iter().map(|&a| vec![a]).collect();
    if order == 2 {
        for a in 0..active.len() {
            for b in a..active.len() {
                index_sets.push(vec![a, b]);
            }
        }
    }
    let scale = jet.value().abs().max(1.0);
    let rows = index_sets
        .into_iter()
        .map(|vars| {
            let exact = jet.partial(&vars);
            let discrepancy: Vec<f64> =
                steps.iter().map(|&h| (central_difference(&scalar, point, &vars, h) - exact).abs()).collect();
            let observed_order = observed_order(&discrepancy[..2], &steps[..2]);
            let floor = 1e3 * f64::EPSILON * scale / steps.last().unwrap().powi(vars.len() as i32);
            let non_monotone = discrepancy.windows(2).any(|w| w[1] > w[0] && w[1] > floor);
            FdRow { vars, jet: exact, discrepancy, observed_order, non_monotone }
        })
        .collect();
    Ok(FdReport { steps: steps.to_vec(), rows })
}

/// `log(d0/d1) / log(h0/h1)`; infinite when the coarse discrepancy is already at round-off.
pub fn observed_order(d: &[f64], h: &[f64]) -> f64 {
    if d[0] < 1e-13 || d[1] <= 0.0 {
        return f64::INFINITY;
    }
    (d[0] / d[1]).ln() / (h[0] / h[1]).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constant_field() {
        let j = jet_eval(|x: &[Jet]| Ok(x[0].constant_like(5.0)), &[1.0, 2.0], &[0, 1], 2).unwrap();
        assert_eq!(j.value(), 5.0);
        assert!(j.coefficients()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bilinear_field() {
        let j = jet_eval(|x: &[Jet]| Ok(&x[0] * &x[1]), &[3.0, 2.0], &[0, 1], 2).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.partial(&[0]), 2.0);
        assert_eq!(j.partial(&[1]), 3.0);
        assert_eq!(j.partial(&[0, 1]), 1.0);
        assert_eq!(j.partial(&[1, 0]), 1.0);
        assert_eq!(j.partial(&[0, 0]), 0.0);
    }

    #[test]
    fn reciprocal_field() {
        let j = jet_eval(|x: &[Jet]| Ok(1.0 / &x[0]), &[2.0], &[0], 2).unwrap();
        assert!(close(j.value(), 0.5, 1e-15));
        assert!(close(j.partial(&[0]), -0.25, 1e-15));
        assert!(close(j.partial(&[0, 0]), 0.25, 1e-15));
    }

    #[test]
    fn order_and_domain_errors() {
        assert!(matches!(
            jet_eval(|x: &[Jet]| Ok(x[0].clone()), &[1.0], &[0], 5),
            Err(GeomError::Unsupported(_))
        ));
        assert!(matches!(
            jet_eval(|x: &[Jet]| Ok(1.0 / &(&x[0] - 1.0)), &[1.0], &[0], 2),
            Err(GeomError::Domain(_))
        ));
        let z = Jet::constant(1, 2, 1e-301);
        assert!(Jet::constant(1, 2, 1.0).checked_div(&z).is_err());
    }

    #[test]
    fn elementary_functions_order_four() {
        // d^k/dx^k at x = 0.3 against hand-known closed forms
        let x = 0.3_f64;
        let j = jet_eval(|v: &[Jet]| Ok(v[0].sin()), &[x], &[0], 4).unwrap();
        assert!(close(j.partial(&[0, 0, 0]), -x.cos(), 1e-14));
        assert!(close(j.partial(&[0, 0, 0, 0]), x.sin(), 1e-14));
        let j = jet_eval(|v: &[Jet]| Ok(v[0].ln()), &[x], &[0], 4).unwrap();
        assert!(close(j.partial(&[0, 0, 0, 0]), -6.0 / x.powi(4), 1e-10));
        let j = jet_eval(|v: &[Jet]| Ok(v[0].sqrt()), &[x], &[0], 3).unwrap();
        assert!(close(j.partial(&[0, 0, 0]), 0.375 * x.powf(-2.5), 1e-12));
        let j = jet_eval(|v: &[Jet]| Ok((&v[0] * 2.0).exp()), &[x], &[0], 4).unwrap();
        assert!(close(j.partial(&[0, 0, 0, 0]), 16.0 * (2.0 * x).exp(), 1e-12));
    }

    #[test]
    fn deriv_shifts_coefficients() {
        let j = jet_eval(|v: &[Jet]| Ok(&v[0] * &v[0] * &v[1]), &[1.5, -2.0], &[0, 1], 4).unwrap();
        let d = j.deriv(0);
        assert_eq!(d.order(), 3);
        assert!(close(d.value(), 2.0 * 1.5 * -2.0, 1e-14));
        assert!(close(d.partial(&[1]), j.partial(&[0, 1]), 1e-14));
        assert!(close(d.partial(&[0, 1]), 2.0, 1e-14));
    }

    #[test]
    fn fd_sin_converges_second_order() {
        let r = jet_fd_crosscheck(|x: &[Jet]| Ok(x[0].sin()), &[0.0], 1, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(r.rows[0].jet, 1.0);
        assert!(r.min_order() > 1.9);
    }

    #[test]
    fn fd_exp_mixed_partial() {
        let r =
            jet_fd_crosscheck(|x: &[Jet]| Ok((&x[0] + &x[1]).exp()), &[0.0, 0.0], 2, &[0.1, 0.05, 0.025]).unwrap();
        let mixed = r.rows.iter().find(|row| row.vars == vec![0, 1]).unwrap();
        assert_eq!(mixed.jet, 1.0);
        assert!(mixed.observed_order > 1.9);
        assert_eq!(r.flagged(), 0);
    }

    #[test]
    fn fd_rejects_bad_steps() {
        assert!(jet_fd_crosscheck(|x: &[Jet]| Ok(x[0].clone()), &[0.0], 1, &[0.1, 0.2, 0.05]).is_err());
        assert!(jet_fd_crosscheck(|x: &[Jet]| Ok(x[0].clone()), &[0.0], 1, &[0.1, 0.05]).is_err());
    }
}
