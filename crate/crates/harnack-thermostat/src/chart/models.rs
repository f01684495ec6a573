//! Concrete charts: flat space, round spheres, the scaled fiber models,
//! block products and seeded random metrics.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MetricChart;
use crate::error::Result;
use crate::jet::Jet;

fn zeros_like(p: &[Jet], n: usize) -> Vec<Jet> {
    vec![p[0].constant_like(0.0); n * n]
}

#[derive(Clone, Debug)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Euclidean { n }
    }
}

impl MetricChart for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let mut g = zeros_like(p, self.n);
        for i in 0..self.n {
            g[i * self.n + i] = p[0].constant_like(1.0);
        }
        Ok(g)
    }
    fn label(&self) -> String {
        format!("R^{}", self.n)
    }
}

/// Flat torus `R^n / (2π Z)^n` in its periodic chart.
#[derive(Clone, Debug)]
pub struct FlatTorus {
    n: usize,
}

impl FlatTorus {
    pub fn new(n: usize) -> Self {
        FlatTorus { n }
    }
}

impl MetricChart for FlatTorus {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        Euclidean::new(self.n).components(p)
    }
    fn contains(&self, p: &[f64]) -> bool {
        p.iter().all(|x| (0.0..2.0 * PI).contains(x))
    }
    fn label(&self) -> String {
        format!("T^{}", self.n)
    }
}

/// Diagonal of the unit round metric in hyperspherical coordinates
/// `(θ_1, …, θ_{n−1}, φ)`: `1, sin²θ_1, sin²θ_1 sin²θ_2, …`.
pub fn round_sphere_diagonal(p: &[Jet]) -> Vec<Jet> {
    let mut diag = Vec::with_capacity(p.len());
    let mut w = p[0].constant_like(1.0);
    for (k, x) in p.iter().enumerate() {
        diag.push(w.clone());
        if k + 1 < p.len() {
            let s = x.sin();
            w = &w * &(&s * &s);
        }
    }
    diag
}

/// `scale · g_round` on `S^n`; sectional curvature `1/scale`.
#[derive(Clone, Debug)]
pub struct RoundSphere {
    n: usize,
    scale: f64,
}

impl RoundSphere {
    pub fn new(n: usize, scale: f64) -> Self {
        RoundSphere { n, scale }
    }
}

impl MetricChart for RoundSphere {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let mut g = zeros_like(p, self.n);
        for (i, d) in round_sphere_diagonal(p).into_iter().enumerate() {
            g[i * self.n + i] = d.scale(self.scale);
        }
        Ok(g)
    }
    fn contains(&self, p: &[f64]) -> bool {
        p[..self.n - 1].iter().all(|&t| t > 0.0 && t < PI)
    }
    fn label(&self) -> String {
        format!("{}·S^{}", self.scale, self.n)
    }
}

/// Upper half-space `H^N` with metric `scale · δ / y_N²`; sectional curvature `−1/scale`.
#[derive(Clone, Debug)]
pub struct HalfSpace {
    n: usize,
    scale: f64,
}

impl HalfSpace {
    pub fn new(n: usize, scale: f64) -> Self {
        HalfSpace { n, scale }
    }

    /// Curvature `−1/(2N)`.
    pub fn thermostat_fiber(n: usize) -> Self {
        HalfSpace::new(n, 2.0 * n as f64)
    }
}

/// Conformal factor `scale / y_N²` of [`HalfSpace`].
pub fn half_space_factor(y: &[Jet], scale: f64) -> Jet {
    let yn = &y[y.len() - 1];
    (yn * yn).recip().scale(scale)
}

/// Conformal factor `4 scale / (1 + |y|²)²` of [`StereoSphere`].
pub fn stereo_factor(y: &[Jet], scale: f64) -> Jet {
    let mut s = y[0].constant_like(1.0);
    for x in y {
        s = &s + &(x * x);
    }
    (&s * &s).recip().scale(4.0 * scale)
}

impl MetricChart for HalfSpace {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let f = half_space_factor(p, self.scale);
        let mut g = zeros_like(p, self.n);
        for i in 0..self.n {
            g[i * self.n + i] = f.clone();
        }
        Ok(g)
    }
    fn contains(&self, p: &[f64]) -> bool {
        p[self.n - 1] > 0.0
    }
    fn label(&self) -> String {
        format!("{}·H^{}", self.scale, self.n)
    }
}

/// Stereographic `S^N` with metric `4 scale δ / (1 + |y|²)²`; sectional curvature `1/scale`.
#[derive(Clone, Debug)]
pub struct StereoSphere {
    n: usize,
    scale: f64,
}

impl StereoSphere {
    pub fn new(n: usize, scale: f64) -> Self {
        StereoSphere { n, scale }
    }

    /// Curvature `+1/(2N)`.
    pub fn thermostat_fiber(n: usize) -> Self {
        StereoSphere::new(n, 2.0 * n as f64)
    }
}

impl MetricChart for StereoSphere {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let f = stereo_factor(p, self.scale);
        let mut g = zeros_like(p, self.n);
        for i in 0..self.n {
            g[i * self.n + i] = f.clone();
        }
        Ok(g)
    }
    fn label(&self) -> String {
        format!("{}·S^{} (stereographic)", self.scale, self.n)
    }
}

/// Riemannian product, block diagonal.
#[derive(Clone)]
pub struct Product {
    a: Arc<dyn MetricChart>,
    b: Arc<dyn MetricChart>,
}

impl Product {
    pub fn new(a: Arc<dyn MetricChart>, b: Arc<dyn MetricChart>) -> Self {
        Product { a, b }
    }
}

impl MetricChart for Product {
    fn dim(&self) -> usize {
        self.a.dim() + self.b.dim()
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let (na, nb) = (self.a.dim(), self.b.dim());
        let n = na + nb;
        let ga = self.a.components(&p[..na])?;
        let gb = self.b.components(&p[na..])?;
        let mut g = zeros_like(p, n);
        for i in 0..na {
            for j in 0..na {
                g[i * n + j] = ga[i * na + j].clone();
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                g[(na + i) * n + na + j] = gb[i * nb + j].clone();
            }
        }
        Ok(g)
    }
    fn contains(&self, p: &[f64]) -> bool {
        self.a.contains(&p[..self.a.dim()]) && self.b.contains(&p[self.a.dim()..])
    }
    fn label(&self) -> String {
        format!("{} × {}", self.a.label(), self.b.label())
    }
}

/// A seeded smooth positive-definite metric
/// `g_ab = 1.5 δ_ab + 0.25 h_ab(x)` with `|h_ab| ≤ 1` built from
/// products of sines and a quadratic bump.
#[derive(Clone, Debug)]
pub struct RandomMetric {
    n: usize,
    // per (a ≤ b): frequency vector, phase, quadratic weight
    terms: Vec<(Vec<f64>, f64, f64)>,
}

impl RandomMetric {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for _a in 0..n {
            for _b in 0..n {
                let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let phase = rng.random_range(0.0..2.0 * PI);
                let q = rng.random_range(-0.3..0.3);
                terms.push((w, phase, q));
            }
        }
        RandomMetric { n, terms }
    }
}

impl MetricChart for RandomMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.n;
        let mut g = zeros_like(p, n);
        let mut r2 = p[0].constant_like(0.0);
        for x in p {
            r2 = &r2 + &(x * x);
        }
        // 1/(1+r²) keeps the quadratic part bounded by 1
        let bump = (&r2 + 1.0).recip();
        for a in 0..n {
            for b in a..n {
                let (w, phase, q) = &self.terms[a * n + b];
                let mut arg = p[0].constant_like(*phase);
                for (k, x) in p.iter().enumerate() {
                    arg = &arg + &x.scale(w[k]);
                }
                // |0.7 sin + 0.3 bump·r²| stays below 1
                let h = &arg.sin().scale(0.7) + &(&r2 * &bump).scale(*q);
                let mut v = h.scale(0.25);
                if a == b {
                    v = &v + 1.5;
                }
                g[a * n + b] = v.clone();
                g[b * n + a] = v;
            }
        }
        Ok(g)
    }
    fn label(&self) -> String {
        format!("random metric on R^{}", self.n)
    }
}

/// A chart given by a closure.
pub struct FnChart<F> {
    n: usize,
    label: String,
    f: F,
}

impl<F> FnChart<F>
where
    F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync,
{
    pub fn new(n: usize, label: impl Into<String>, f: F) -> Self {
        FnChart { n, label: label.into(), f }
    }
}

impl<F> MetricChart for FnChart<F>
where
    F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn components(&self, p: &[Jet]) -> Result<Vec<Jet>> {
        (self.f)(p)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{curvature_bundle, riemann_sampled};
    use super::*;

    #[test]
    fn half_space_curvature() {
        // orthonormal sectional curvature = R_1212 / (g_11 g_22)
        for n in [2usize, 4] {
            let h = HalfSpace::new(n, 3.0);
            let mut p = vec![0.2; n];
            p[n - 1] = 1.7;
            let b = curvature_bundle(&h, &p).unwrap();
            let k = b.riemann.at(&[0, 1, 0, 1]) / (b.metric[(0, 0)] * b.metric[(1, 1)]);
            assert!((k + 1.0 / 3.0).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn stereo_curvature_sampled() {
        let s = StereoSphere::new(5, 2.0);
        let p = [0.3, -0.2, 0.5, 0.1, 0.7];
        let r = riemann_sampled(&s, &p, &[[1, 3, 1, 3]]).unwrap();
        let f = crate::chart::metric_at(&s, &p).unwrap()[(0, 0)];
        assert!((r[0] / (f * f) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_metric_positive() {
        for seed in 0..5 {
            let m = RandomMetric::new(4, seed);
            let g = crate::chart::metric_at(&m, &[0.4, -1.2, 2.0, 0.1]).unwrap();
            assert!(g.cholesky().is_some());
        }
    }
}
