//! Perelman's W-entropy on homogeneous flows and on the flat Gaussian, the
//! conjugate evolution of the potential, and the pullback-metric components
//! of the spherical thermostat.
//!
//! Backward time is `τ = T − t` for a horizon `T`, so `∂g/∂τ = 2 Ric` and the
//! potential obeys `∂f/∂τ = Δf − |∇f|² + R − n/2τ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::flow::FlowFamily;

/// Normalisation defect above which the entropy is not evaluated.
pub const NORMALIZATION_GUARD: f64 = 1e-4;
/// Finite differences smaller than this count as zero.
pub const SIGN_TOL: f64 = 1e-8;
const MAX_SUBSTEP: f64 = 1e-3;

/// The potential `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// Spatially constant `f₀` on a homogeneous compact flow.
    Constant(f64),
    /// `a|x|² + b` on flat `Rⁿ`.
    Gaussian { a: f64, b: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyState {
    pub family: FlowFamily,
    pub horizon: f64,
    pub tau: f64,
    pub potential: Potential,
}

/// Volume of the unit `n`-sphere.
fn sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * sphere_volume(n - 2),
    }
}

/// Scalar curvature and volume of a homogeneous compact family at flow time `t`.
fn homogeneous_data(family: &FlowFamily, t: f64) -> Result<(f64, f64)> {
    let scales = family.scales(t);
    if scales.iter().any(|&c| !(c > 0.0)) {
        return Err(GeomError::Extinction { extinction: family.extinction_time(), msg: format!("{} at t = {t}", family.label()) });
    }
    match *family {
        FlowFamily::StaticFlat { n } => Ok((0.0, (2.0 * PI).powi(n as i32))),
        FlowFamily::ConstantCurvature { n, .. } => {
            let c = scales[0];
            Ok((n as f64 * (n as f64 - 1.0) / c, c.powf(n as f64 / 2.0) * sphere_volume(n)))
        }
        FlowFamily::ProductSpheres { .. } => {
            let (c1, c2) = (scales[0], scales[1]);
            Ok((2.0 / c1 + 2.0 / c2, c1 * c2 * sphere_volume(2).powi(2)))
        }
        _ => Err(GeomError::Unsupported(format!("entropy states on {}", family.label()))),
    }
}

impl EntropyState {
    /// The normalised constant potential of a homogeneous family at `τ`.
    pub fn normalized(family: &FlowFamily, horizon: f64, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let n = family.dim() as f64;
        let (_, vol) = homogeneous_data(family, horizon - tau)?;
        let f0 = vol.ln() - 0.5 * n * (4.0 * PI * tau).ln();
        Ok(EntropyState { family: family.clone(), horizon, tau, potential: Potential::Constant(f0) })
    }

    /// `|x|²/4τ` on flat `Rⁿ`, a fixed point of the conjugate equation.
    pub fn gaussian(n: usize, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(EntropyState {
            family: FlowFamily::StaticFlat { n },
            horizon: f64::INFINITY,
            tau,
            potential: Potential::Gaussian { a: 1.0 / (4.0 * tau), b: 0.0 },
        })
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn flow_time(&self) -> f64 {
        self.horizon - self.tau
    }

    /// `∫ (4πτ)^{−n/2} e^{−f} dV`.
    pub fn normalization(&self) -> Result<f64> {
        let n = self.dim() as f64;
        let heat = (4.0 * PI * self.tau).powf(-0.5 * n);
        match self.potential {
            Potential::Constant(f0) => Ok(heat * (-f0).exp() * homogeneous_data(&self.family, self.flow_time())?.1),
            Potential::Gaussian { a, b } => Ok(heat * (-b).exp() * (PI / a).powf(0.5 * n)),
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("backward time τ = {tau} must be positive")))
    }
}

/// `W = ∫ [τ(R + |∇f|²) + f − n] (4πτ)^{−n/2} e^{−f} dV`.
pub fn w_entropy(state: &EntropyState) -> Result<f64> {
    let mass = state.normalization()?;
    if (mass - 1.0).abs() > NORMALIZATION_GUARD {
        return Err(GeomError::Precondition(format!("normalisation integral is {mass}, not 1")));
    }
    let n = state.dim() as f64;
    let tau = state.tau;
    match state.potential {
        Potential::Constant(f0) => {
            let (r, _) = homogeneous_data(&state.family, state.flow_time())?;
            Ok((tau * r + f0 - n) * mass)
        }
        // under the density ∝ e^{−a|x|²}, the mean of |x|² is n/2a
        Potential::Gaussian { a, b } => Ok(((4.0 * tau * a * a + a) * n / (2.0 * a) + b - n) * mass),
    }
}

/// `W` of the Gaussian by midpoint quadrature on `[−L, L]²`; tends to the
/// exact value as `L` grows.
pub fn gaussian_box_quadrature(state: &EntropyState, half_width: f64, cells: usize) -> Result<(f64, f64)> {
    let Potential::Gaussian { a, b } = state.potential else {
        return Err(GeomError::Unsupported("box quadrature is for the Gaussian potential".into()));
    };
    if state.dim() != 2 {
        return Err(GeomError::Unsupported("box quadrature is two-dimensional".into()));
    }
    let tau = state.tau;
    let h = 2.0 * half_width / cells as f64;
    let (mut mass, mut w) = (0.0, 0.0);
    for i in 0..cells {
        for j in 0..cells {
            let (x, y) = (-half_width + (i as f64 + 0.5) * h, -half_width + (j as f64 + 0.5) * h);
            let r2 = x * x + y * y;
            let f = a * r2 + b;
            let dens = (-f).exp() / (4.0 * PI * tau) * h * h;
            mass += dens;
            w += (tau * 4.0 * a * a * r2 + f - 2.0) * dens;
        }
    }
    Ok((mass, w))
}

fn rhs(state: &EntropyState, tau: f64, p: Potential) -> Result<Potential> {
    let n = state.dim() as f64;
    match p {
        Potential::Constant(_) => {
            let (r, _) = homogeneous_data(&state.family, state.horizon - tau)?;
            Ok(Potential::Constant(r - 0.5 * n / tau))
        }
        Potential::Gaussian { a, .. } => Ok(Potential::Gaussian { a: -4.0 * a * a, b: 2.0 * n * a - 0.5 * n / tau }),
    }
}

fn axpy(p: Potential, s: f64, d: Potential) -> Potential {
    match (p, d) {
        (Potential::Constant(f), Potential::Constant(df)) => Potential::Constant(f + s * df),
        (Potential::Gaussian { a, b }, Potential::Gaussian { a: da, b: db }) => {
            Potential::Gaussian { a: a + s * da, b: b + s * db }
        }
        _ => unreachable!("derivative has the shape of the potential"),
    }
}

/// Advances `f` by `d_tau` in backward time with RK4.
pub fn evolve_conjugate_f(state: &EntropyState, d_tau: f64) -> Result<EntropyState> {
    let target = state.tau + d_tau;
    check_tau(target)?;
    if d_tau == 0.0 {
        return Ok(state.clone());
    }
    let steps = (d_tau.abs() / MAX_SUBSTEP).ceil() as usize;
    let h = d_tau / steps as f64;
    let (mut tau, mut p) = (state.tau, state.potential);
    for _ in 0..steps {
        let k1 = rhs(state, tau, p)?;
        let k2 = rhs(state, tau + 0.5 * h, axpy(p, 0.5 * h, k1))?;
        let k3 = rhs(state, tau + 0.5 * h, axpy(p, 0.5 * h, k2))?;
        let k4 = rhs(state, tau + h, axpy(p, h, k3))?;
        p = axpy(p, h / 6.0, k1);
        p = axpy(p, h / 3.0, k2);
        p = axpy(p, h / 3.0, k3);
        p = axpy(p, h / 6.0, k4);
        tau += h;
    }
    Ok(EntropyState { tau: target, potential: p, ..state.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub family: String,
    /// `(τ, W)` with `f` evolved along the grid from its first point.
    pub series: Vec<(f64, f64)>,
    /// `W` from the potential fixed by normalisation at each `τ`.
    pub closed_form: Vec<f64>,
    pub max_closed_gap: f64,
    pub max_normalization_drift: f64,
    /// Direction in `τ`.
    pub measured: Direction,
    pub claimed: Direction,
    pub monotone: bool,
}

impl MonotonicityReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("tau,W,dW_sign\n");
        for (i, (tau, w)) in self.series.iter().enumerate() {
            let sign = match self.series.get(i + 1) {
                Some((_, next)) if next - w > SIGN_TOL => "+",
                Some((_, next)) if w - next > SIGN_TOL => "-",
                Some(_) => "0",
                None => "",
            };
            s.push_str(&format!("{tau:.12e},{w:.12e},{sign}\n"));
        }
        s
    }
}

pub fn direction(values: &[f64]) -> Direction {
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        up |= d > SIGN_TOL;
        down |= d < -SIGN_TOL;
    }
    match (up, down) {
        (true, true) => Direction::Mixed,
        (true, false) => Direction::Increasing,
        (false, true) => Direction::Decreasing,
        (false, false) => Direction::Constant,
    }
}

/// W along an increasing `τ` grid on a homogeneous family with horizon `T`.
pub fn monotonicity_report(family: &FlowFamily, horizon: f64, tau_grid: &[f64]) -> Result<MonotonicityReport> {
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GeomError::Domain("τ grid must be strictly increasing".into()));
    }
    let Some(&first) = tau_grid.first() else {
        return Err(GeomError::Domain("empty τ grid".into()));
    };
    let mut state = EntropyState::normalized(family, horizon, first)?;
    let mut series = Vec::with_capacity(tau_grid.len());
    let mut closed_form = Vec::with_capacity(tau_grid.len());
    let mut drift = 0.0f64;
    for &tau in tau_grid {
        state = evolve_conjugate_f(&state, tau - state.tau)?;
        drift = drift.max((state.normalization()? - 1.0).abs());
        series.push((tau, w_entropy(&state)?));
        closed_form.push(w_entropy(&EntropyState::normalized(family, horizon, tau)?)?);
    }
    let max_closed_gap = series.iter().zip(&closed_form).map(|(s, c)| (s.1 - c).abs()).fold(0.0, f64::max);
    let measured = direction(&series.iter().map(|s| s.1).collect::<Vec<_>>());
    Ok(MonotonicityReport {
        family: family.label(),
        series,
        closed_form,
        max_closed_gap,
        max_normalization_drift: drift,
        measured,
        claimed: Direction::Increasing,
        monotone: measured != Direction::Mixed,
    })
}

/// Metric, scalar curvature and volume factor of the pulled-back spherical
/// thermostat, as functions of base data at one point.
#[derive(Clone, Debug, Serialize)]
pub struct PullbackComponents {
    pub g_m_00: f64,
    /// `g^m_αβ / g̃_αβ = 1 − 2f/N`.
    pub g_m_alphabeta_factor: f64,
    pub scalar_m: f64,
    /// `τ^{N/2} e^{−f}`.
    pub volume_factor: f64,
    /// `(1 − 2f/N)^{N/2} τ^{N/2}`, which the volume factor approximates.
    pub volume_binomial: f64,
}

pub fn pullback_components(
    f: f64,
    grad_f_sq: f64,
    laplacian_f: f64,
    r: f64,
    tau: f64,
    n_fiber: usize,
    n: usize,
) -> Result<PullbackComponents> {
    check_tau(tau)?;
    let big = n_fiber as f64;
    let integrand = tau * (2.0 * laplacian_f - grad_f_sq + r) + f;
    Ok(PullbackComponents {
        g_m_00: (0.5 * big - (integrand - n as f64)) / tau,
        g_m_alphabeta_factor: 1.0 - 2.0 * f / big,
        scalar_m: 0.5 * big / tau + integrand / tau,
        volume_factor: tau.powf(0.5 * big) * (-f).exp(),
        volume_binomial: ((1.0 - 2.0 * f / big) * tau).powf(0.5 * big),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::FlowPoint;

    #[test]
    fn homogeneous_scalar_matches_flow() {
        for fam in [FlowFamily::ConstantCurvature { n: 3, c0: 3.0 }, FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 }] {
            let x = fam.sample_point(&mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1));
            let fp = FlowPoint::new(&fam, &x, 0.2).unwrap();
            assert!((homogeneous_data(&fam, 0.2).unwrap().0 - fp.scalar).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_examples() {
        let s2 = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        // horizon 1, τ = 0.5: c = 2, R = 1, f₀ = ln(8π) − ln(2π)
        let st = EntropyState::normalized(&s2, 1.0, 0.5).unwrap();
        let Potential::Constant(f0) = st.potential else { panic!() };
        assert!((f0 - 4f64.ln()).abs() < 1e-14);
        assert!((w_entropy(&st).unwrap() - (0.5 + f0 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn conjugate_ode_preserves_normalization() {
        let s2 = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        let st = EntropyState::normalized(&s2, 1.0, 0.2).unwrap();
        let later = evolve_conjugate_f(&st, 0.6).unwrap();
        assert!((later.normalization().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(evolve_conjugate_f(&st, 0.0).unwrap().potential, st.potential);
        assert!(matches!(evolve_conjugate_f(&st, -0.3), Err(GeomError::Domain(_))));
    }

    #[test]
    fn gaussian_is_self_similar() {
        let g = EntropyState::gaussian(2, 0.5).unwrap();
        let later = evolve_conjugate_f(&g, 0.7).unwrap();
        let Potential::Gaussian { a, b } = later.potential else { panic!() };
        assert!((a - 1.0 / 4.8).abs() < 1e-12 && b.abs() < 1e-12);
        assert!(w_entropy(&later).unwrap().abs() < 1e-12);
        let (m1, w1) = gaussian_box_quadrature(&g, 4.0, 200).unwrap();
        let (m2, w2) = gaussian_box_quadrature(&g, 8.0, 400).unwrap();
        assert!(w2.abs() < w1.abs() && w2.abs() < 1e-6 && (m2 - 1.0).abs() < 1e-6 && m1 < m2);
    }

    #[test]
    fn pullback_g00_from_its_pieces() {
        // (φ*g̃)_00 = g̃_00 − f/τ − 2∂f/∂τ, then g^m_00 = (φ*g̃)_00 − |∇f|²
        let (f, gsq, lap, r, tau, big, n) = (0.4, 0.3, -0.2, 1.5, 0.7, 40usize, 3usize);
        let df = lap - gsq + r - n as f64 / (2.0 * tau);
        let g00 = big as f64 / (2.0 * tau) + r;
        let want = g00 - f / tau - 2.0 * df - gsq;
        let pc = pullback_components(f, gsq, lap, r, tau, big, n).unwrap();
        assert!((pc.g_m_00 - want).abs() < 1e-12);
    }

    #[test]
    fn pullback_examples() {
        let pc = pullback_components(0.0, 0.0, 0.0, 0.0, 1.0, 8, 2).unwrap();
        assert_eq!(pc.g_m_00, 6.0);
        assert_eq!(pc.volume_factor, 1.0);
        let f0 = 0.3;
        let pc = pullback_components(f0, 0.0, 0.0, 2.0, 1.0, 8, 2).unwrap();
        assert!((pc.scalar_m - (4.0 + 2.0 + f0)).abs() < 1e-14);
    }
}
