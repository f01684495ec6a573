//! The verification batteries behind each suite.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{RunConfig, Suite};
use super::report::{CheckResult, CsvSeries, Finding, RunReport};
use crate::chart::models::{Euclidean, HalfSpace, Product, RandomMetric, RoundSphere, StereoSphere};
use crate::chart::{bianchi_residuals, riemann, BianchiResiduals, FdCurvatureCheck, MetricChart};
use crate::entropy::{direction, monotonicity_report, Direction};
use crate::error::{GeomError, Result};
use crate::flow::{
    closed_form_diagnostics, diagnostics_csv, flow_closed_form, flow_surface_rotsym, surface_convergence, FlowFamily,
    FlowPoint, SurfaceGrid,
};
use crate::harnack::{
    algebraic_identities, harnack_min_eig, m_decomposition_residual, monte_carlo_min, soliton_check, surface_triple,
    HarnackTriple,
};
use crate::jet::Jet;
use crate::thermostat::{
    build_metric, compare_christoffel, compare_curvature, compare_ricci, fiber_curvature, harnack_limit_check,
    limit_spread, restricted_min_eig, restricted_triple_closed, ricci_decay_fit, spacetime_residuals,
    surface_limit_check, BaseData, FamilyCheck, LimitRow, ThermostatSpec, ThermostatVariant,
};

const FD_METRICS: usize = 20;
const FD_STEPS: [f64; 3] = [8e-2, 4e-2, 2e-2];
const ALGEBRA_TRIALS: usize = 100;
const MC_SAMPLES: usize = 10_000;
const CLOSED_FORM_SAMPLES: usize = 10;
const DECAY_SAMPLES: usize = 5;
const EVOLUTION_POINTS: usize = 3;

/// Accumulates the results of one suite.
struct Battery<'a> {
    config: &'a RunConfig,
    suite: &'static str,
    checks: Vec<CheckResult>,
    findings: Vec<Finding>,
    series: Vec<CsvSeries>,
}

impl<'a> Battery<'a> {
    fn new(config: &'a RunConfig, suite: Suite) -> Self {
        Battery { config, suite: suite.name(), checks: vec![], findings: vec![], series: vec![] }
    }

    fn check(&mut self, name: impl Into<String>, tol: &'static str, value: Result<f64>) {
        self.checks.push(CheckResult::new(self.config, self.suite, name.into(), tol, value));
    }

    fn csv(&mut self, file: String, content: String) {
        self.series.push(CsvSeries { file, content });
    }

    /// A generator that depends only on the seed and a per-check label.
    fn rng(&self, label: &str) -> ChaCha8Rng {
        let salt = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt)
    }
}

pub fn slug(family: &FlowFamily) -> &'static str {
    match family {
        FlowFamily::StaticFlat { .. } => "flat",
        FlowFamily::ConstantCurvature { n: 2, .. } => "s2",
        FlowFamily::ConstantCurvature { n: 3, .. } => "s3",
        FlowFamily::ConstantCurvature { .. } => "sphere",
        FlowFamily::ProductSpheres { .. } => "s2xs2",
        FlowFamily::Cigar => "cigar",
        FlowFamily::SurfaceRotsym { .. } => "surface",
    }
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn min_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(f64::INFINITY, |m, v| Ok(m.min(v?)))
}

/// Runs every member suite of `config.suite` in order.
pub fn run_suite(config: &RunConfig) -> RunReport {
    let (mut checks, mut findings, mut series) = (vec![], vec![], vec![]);
    for suite in config.suite.members() {
        let mut b = Battery::new(config, suite);
        match suite {
            Suite::Identities => identities(&mut b),
            Suite::Flow => flow(&mut b),
            Suite::Harnack => harnack(&mut b),
            Suite::Thermostat => thermostat(&mut b),
            Suite::Entropy => entropy(&mut b),
            Suite::All => unreachable!("expanded by members"),
        }
        checks.extend(b.checks);
        findings.extend(b.findings);
        series.extend(b.series);
    }
    RunReport::new(config.clone(), checks, findings, series)
}

// Identities

/// Metrics and points for the identity battery.
pub fn identity_corpus(config: &RunConfig) -> Result<Vec<(String, Arc<dyn MetricChart>, Vec<f64>)>> {
    let mut out: Vec<(String, Arc<dyn MetricChart>, Vec<f64>)> = vec![
        ("euclidean R^3".into(), Arc::new(Euclidean::new(3)), vec![0.3, -0.2, 0.5]),
        ("round S^2".into(), Arc::new(RoundSphere::new(2, 1.0)), vec![1.0, 0.3]),
        ("round S^3".into(), Arc::new(RoundSphere::new(3, 2.0)), vec![1.0, 1.3, 0.4]),
        ("stereographic S^3".into(), Arc::new(StereoSphere::new(3, 1.0)), vec![0.3, -0.2, 0.5]),
        ("half-space H^3".into(), Arc::new(HalfSpace::new(3, 1.0)), vec![0.2, -0.4, 0.8]),
        (
            "S^2 x S^2".into(),
            Arc::new(Product::new(Arc::new(RoundSphere::new(2, 1.0)), Arc::new(RoundSphere::new(2, 2.0)))),
            vec![1.0, 0.3, 1.2, 2.0],
        ),
    ];
    let cigar = flow_closed_form(&FlowFamily::Cigar, 0.2)?;
    out.push(("cigar at t = 0.2".into(), cigar.chart.clone(), vec![0.3, -0.7]));
    let restricted = build_metric(&ThermostatSpec::restricted(8, config.sphere(3))?)?;
    let p = restricted.point(&[1.0, 1.3, 0.4], &[], 0.1)?;
    out.push(("restricted thermostat over S^3".into(), Arc::new(restricted), p));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for n in 2..=4 {
        for k in 0..2 {
            let seed = config.seed.wrapping_add(10 * n as u64 + k);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            out.push((format!("random metric dim {n} seed {seed}"), Arc::new(RandomMetric::new(n, seed)), x));
        }
    }
    Ok(out)
}

fn identities(b: &mut Battery) {
    let residuals: Result<Vec<BianchiResiduals>> = identity_corpus(b.config)
        .and_then(|c| c.iter().map(|(_, chart, p)| bianchi_residuals(chart.as_ref(), p)).collect());
    let pick = |f: fn(&BianchiResiduals) -> f64| match &residuals {
        Ok(rs) => Ok(rs.iter().map(f).fold(0.0, f64::max)),
        Err(e) => Err(e.clone()),
    };
    b.check("bianchi_first", "bianchi", pick(|r| r.first));
    b.check("bianchi_second", "bianchi", pick(|r| r.second));
    b.check("bianchi_contracted", "bianchi", pick(|r| r.contracted));
    b.check("bianchi_twice_contracted", "bianchi", pick(|r| r.twice_contracted));
    b.check("ricci_identity_commutator", "ricci_identity", pick(|r| r.ricci_commutator.max(r.ricci_identity_rank3)));

    let mut rng = b.rng("fd");
    let fd: Result<Vec<FdCurvatureCheck>> = (0..FD_METRICS)
        .map(|i| {
            let n = 2 + i % 3;
            let m = RandomMetric::new(n, b.config.seed.wrapping_add(1000 + i as u64));
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            FdCurvatureCheck::run(&m, &x, &FD_STEPS)
        })
        .collect();
    let fold = |f: fn(&FdCurvatureCheck) -> f64, min: bool| match &fd {
        Ok(rs) => Ok(rs.iter().map(f).fold(if min { f64::INFINITY } else { 0.0 }, if min { f64::min } else { f64::max })),
        Err(e) => Err(e.clone()),
    };
    b.check("autodiff_fd_richardson_order_christoffel", "fd_order", fold(|r| r.gamma_richardson_order, true));
    b.check("autodiff_fd_richardson_order_riemann", "fd_order", fold(|r| r.riemann_richardson_order, true));
    b.check("autodiff_fd_christoffel", "fd_discrepancy", fold(|r| r.gamma_richardson, false));
    b.check("autodiff_fd_riemann", "fd_discrepancy", fold(|r| r.riemann_richardson, false));
}

// Flow

fn sample_points(family: &FlowFamily, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count).map(|_| family.sample_point(rng)).collect()
}

fn flow(b: &mut Battery) {
    let cfg = b.config;
    let families = [cfg.sphere(2), cfg.sphere(3), cfg.product(), FlowFamily::Cigar, FlowFamily::StaticFlat { n: 3 }];
    for fam in &families {
        let mut rng = b.rng(&format!("evolution {}", slug(fam)));
        let pts = sample_points(fam, EVOLUTION_POINTS, &mut rng);
        let res: Result<Vec<_>> = cfg
            .t_grid
            .iter()
            .flat_map(|&t| pts.iter().map(move |x| (x, t)))
            .map(|(x, t)| FlowPoint::new(fam, x, t)?.evolution_residuals())
            .collect();
        let s = slug(fam);
        let pick = |f: &dyn Fn(&crate::flow::EvolutionResiduals) -> f64| match &res {
            Ok(rs) => Ok(rs.iter().map(f).fold(0.0, f64::max)),
            Err(e) => Err(e.clone()),
        };
        b.check(format!("evolution_metric_{s}"), "evolution", pick(&|r| r.metric));
        b.check(format!("evolution_riemann_{s}"), "evolution", pick(&|r| r.riemann));
        b.check(format!("evolution_ricci_{s}"), "evolution", pick(&|r| r.ricci));
        b.check(format!("evolution_scalar_{s}"), "evolution", pick(&|r| r.scalar));
        let heat_tol = if fam.homogeneous() { "evolution" } else { "evolution_fd" };
        b.check(format!("heat_equation_p_{s}"), heat_tol, pick(&|r| r.heat.p));
        b.check(format!("heat_equation_m_{s}"), heat_tol, pick(&|r| r.heat.m));
    }

    let flat = FlowFamily::StaticFlat { n: 3 };
    let mut rng = b.rng("flat");
    let pts = sample_points(&flat, cfg.samples, &mut rng);
    b.check(
        "flat_flow_curvature",
        "flat_vanishing",
        max_of(cfg.t_grid.iter().flat_map(|&t| pts.iter().map(move |x| (x, t))).map(|(x, t)| {
            let fp = FlowPoint::new(&flat, x, t)?;
            Ok([fp.riemann.max_abs(), fp.ricci.max_abs(), fp.scalar.abs(), fp.dt_metric.max_abs()].into_iter().fold(0.0, f64::max))
        })),
    );

    let grids = [cfg.surface_intervals, 2 * cfg.surface_intervals, 4 * cfg.surface_intervals];
    let t_end = cfg.t_grid.iter().cloned().fold(0.0, f64::max);
    if t_end > 0.0 {
        let conv = surface_convergence(cfg.surface_amplitude, t_end, &grids);
        b.check("surface_order_conformal_factor", "surface_order", conv.as_ref().map(|c| c.u_order).map_err(Clone::clone));
        b.check("surface_order_scalar_equation", "surface_order", conv.map(|c| c.residual_order));
    }

    for fam in [cfg.sphere(2), cfg.sphere(3), cfg.product()] {
        let mut rng = b.rng(&format!("diagnostics {}", slug(&fam)));
        let pts = sample_points(&fam, cfg.samples, &mut rng);
        let rows: Result<Vec<_>> = cfg.t_grid.iter().map(|&t| closed_form_diagnostics(&fam, t, &pts)).collect();
        if let Ok(rows) = &rows {
            b.csv(format!("flow_diagnostics_{}.csv", slug(&fam)), diagnostics_csv(rows));
        }
        b.check(
            format!("operator_positivity_{}", slug(&fam)),
            "operator_positivity",
            rows.map(|rs| rs.iter().map(|r| r.operator_min_eig).fold(f64::INFINITY, f64::min)),
        );
    }
}

// Harnack

/// Harnack triples of a corpus family at `samples` (point, time) pairs, the
/// times cycling through the grid.
pub fn corpus_triples(family: &FlowFamily, t_grid: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<HarnackTriple>> {
    if t_grid.is_empty() {
        return Ok(vec![]);
    }
    if let FlowFamily::SurfaceRotsym { grid, amplitude } = *family {
        let snaps = flow_surface_rotsym(&SurfaceGrid::initial(grid, amplitude), t_grid, None)?;
        return (0..samples).map(|i| surface_triple(&snaps[i % snaps.len()], rng.random_range(0..=grid))).collect();
    }
    (0..samples)
        .map(|i| {
            let x = family.sample_point(rng);
            Ok(HarnackTriple::from_flow_point(&FlowPoint::new(family, &x, t_grid[i % t_grid.len()])?))
        })
        .collect()
}

fn harnack(b: &mut Battery) {
    let cfg = b.config;
    for fam in cfg.flow_corpus() {
        let s = slug(&fam);
        let mut rng = b.rng(&format!("harnack {s}"));
        let triples = corpus_triples(&fam, &cfg.t_grid, cfg.samples, &mut rng);
        let eigs: Result<Vec<f64>> = triples.as_ref().map_err(Clone::clone).and_then(|ts| ts.iter().map(harnack_min_eig).collect());
        b.check(
            format!("harnack_min_eig_{s}"),
            "harnack_positivity",
            eigs.as_ref().map(|e| e.iter().cloned().fold(f64::INFINITY, f64::min)).map_err(Clone::clone),
        );
        let mc = triples.and_then(|ts| {
            let tri = ts.first().ok_or_else(|| GeomError::Domain("empty t grid".into()))?;
            let mc = monte_carlo_min(tri, MC_SAMPLES, cfg.seed)?;
            Ok((mc.polished_min - harnack_min_eig(tri)?).abs())
        });
        b.check(format!("harnack_monte_carlo_{s}"), "monte_carlo", mc);
    }

    let flat = FlowFamily::StaticFlat { n: 3 };
    let mut rng = b.rng("harnack flat");
    b.check(
        "flat_harnack_tensors",
        "flat_vanishing",
        corpus_triples(&flat, &cfg.t_grid, cfg.samples, &mut rng)
            .and_then(|ts| max_of(ts.iter().map(|t| Ok(t.riemann.max_abs().max(t.p.max_abs()).max(t.m.max_abs()))))),
    );

    b.check(
        "algebraic_identities",
        "algebraic",
        Ok((2..=4).map(|d| algebraic_identities(d, ALGEBRA_TRIALS, cfg.seed).max()).fold(0.0, f64::max)),
    );
    let mut rng = b.rng("m decomposition");
    b.check(
        "m_divergence_form",
        "m_decomposition",
        max_of((2..=4).map(|n| {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            m_decomposition_residual(&RandomMetric::new(n, cfg.seed.wrapping_add(n as u64)), &x, 0.7)
        })),
    );

    let e = Euclidean::new(3);
    let x = [0.3, -0.2, 1.0];
    let gaussian = |x: &[Jet]| -> Result<Jet> {
        let mut s = x[0].zero_like();
        for v in x {
            s = &s + &(v * v);
        }
        Ok(s.scale(0.25))
    };
    b.check(
        "soliton_gaussian",
        "soliton",
        soliton_check(1.0, &e, &gaussian, &x, 50, cfg.seed).map(|r| r.soliton_residual.max(r.vanishing_residual)),
    );
    let scaled = |x: &[Jet]| Ok(gaussian(x)?.scale(1.1));
    let bumped = |x: &[Jet]| Ok(&gaussian(x)? + &x[0].sin().scale(0.01));
    b.check(
        "soliton_perturbed_detected",
        "soliton_detection",
        min_of([
            soliton_check(1.0, &e, &scaled, &x, 50, cfg.seed).map(|r| r.soliton_residual),
            soliton_check(1.0, &e, &bumped, &x, 50, cfg.seed).map(|r| r.soliton_residual),
        ]),
    );
}

// Thermostat

fn limit_csv(rows: &[LimitRow]) -> String {
    let mut s = String::from("N,gap_riemann,gap_p,gap_m\n");
    for r in rows {
        s.push_str(&format!("{},{:.12e},{:.12e},{:.12e}\n", r.n_fiber, r.gaps[0], r.gaps[1], r.gaps[2]));
    }
    s
}

fn thermostat(b: &mut Battery) {
    let cfg = b.config;
    for (variant, sign, name) in [(ThermostatVariant::Hyperbolic, -1.0, "hyperbolic"), (ThermostatVariant::Spherical, 1.0, "spherical")] {
        b.check(
            format!("fiber_curvature_{name}"),
            "fiber_curvature",
            max_of(cfg.n_list.iter().map(|&n| {
                let ks = fiber_curvature(variant, n, cfg.samples, cfg.seed)?;
                Ok(ks.iter().map(|k| (k - sign / (2.0 * n as f64)).abs()).fold(0.0, f64::max))
            })),
        );
    }

    if let (Some(&n0), false) = (cfg.n_list.first(), cfg.t_grid.is_empty()) {
        closed_forms(b, n0);
    }

    if cfg.n_list.len() >= 2 {
        for fam in [cfg.sphere(2), cfg.sphere(3)] {
            let fit = ricci_decay_fit(&fam, &cfg.n_list, DECAY_SAMPLES, cfg.decay_t, cfg.seed);
            if let Ok(f) = &fit {
                b.csv(format!("thermostat_decay_{}.csv", slug(&fam)), f.csv());
            }
            let v = fit.and_then(|f| f.slope.map(|s| (s + 1.0).abs()).ok_or_else(|| GeomError::Degenerate("flat thermostat has no decay slope".into())));
            b.check(format!("ricci_decay_slope_{}", slug(&fam)), "decay_slope", v);
        }
    }

    flat_thermostat(b);
    limits(b);
    restricted(b);
    spacetime(b);
}

/// Closed forms against autodiff at `CLOSED_FORM_SAMPLES` space-time points.
/// The cigar is the one base with `∇R ≠ 0`, where the typeset variants differ.
fn closed_forms(b: &mut Battery, n_fiber: usize) {
    let cfg = b.config;
    let mut printed: Vec<(String, f64)> = vec![];
    for fam in [FlowFamily::StaticFlat { n: 2 }, cfg.sphere(2), cfg.sphere(3), FlowFamily::Cigar] {
        let s = slug(&fam);
        let mut rng = b.rng(&format!("closed {s}"));
        let mut worst = [0.0f64; 3];
        let run = (|| -> Result<()> {
            let chart = build_metric(&ThermostatSpec::hyperbolic(n_fiber, fam.clone())?)?;
            let mut done = 0;
            for i in 0.. {
                if done == CLOSED_FORM_SAMPLES {
                    break;
                }
                if i > 10 * CLOSED_FORM_SAMPLES {
                    return Err(GeomError::Degenerate(format!("too few regular points on {}", fam.label())));
                }
                let x = fam.sample_point(&mut rng);
                let y: Vec<f64> = (0..n_fiber).map(|_| rng.random_range(0.3..1.5)).collect();
                let t = cfg.t_grid[i % cfg.t_grid.len()];
                let p = match chart.point(&x, &y, t) {
                    Err(GeomError::Degenerate(_)) => continue,
                    p => p?,
                };
                let tables: [Vec<FamilyCheck>; 3] =
                    [compare_christoffel(&chart, &p)?, compare_curvature(&chart, &p)?, compare_ricci(&chart, &p)?];
                for (w, table) in worst.iter_mut().zip(&tables) {
                    for fc in table {
                        *w = w.max(fc.residual);
                        if let Some(r) = fc.printed_residual {
                            match printed.iter_mut().find(|e| e.0 == fc.family) {
                                Some(e) => e.1 = e.1.max(r),
                                None => printed.push((fc.family.clone(), r)),
                            }
                        }
                    }
                }
                done += 1;
            }
            Ok(())
        })();
        for (k, what) in ["christoffel", "curvature", "ricci"].into_iter().enumerate() {
            b.check(format!("closed_form_{what}_{s}"), "closed_forms", run.clone().map(|_| worst[k]));
        }
    }
    let tol = cfg.tolerance("closed_forms");
    for (family, r) in printed {
        b.findings.push(Finding {
            name: format!("typeset_{family}"),
            reference: "thermostat closed forms as typeset",
            measured: format!("typeset variant residual {r:.3e} against autodiff"),
            claimed: "typeset form matches the metric".into(),
            agrees: r <= tol,
        });
    }
}

fn flat_thermostat(b: &mut Battery) {
    let cfg = b.config;
    let flat = FlowFamily::StaticFlat { n: 2 };
    let mut rng = b.rng("flat thermostat");
    let pts = sample_points(&flat, cfg.samples.min(5), &mut rng);
    b.check(
        "flat_thermostat_blocks",
        "flat_vanishing",
        max_of(cfg.t_grid.iter().flat_map(|&t| pts.iter().map(move |x| (x, t))).map(|(x, t)| {
            let gaps = harnack_limit_check(&flat, &cfg.n_list, x, t)?;
            let restricted = build_metric(&ThermostatSpec::restricted(cfg.n_list.first().copied().unwrap_or(2), flat.clone())?)?;
            let rm = riemann(&restricted, &restricted.point(x, &[], t)?)?;
            Ok(gaps.iter().flat_map(|r| r.gaps).fold(rm.max_abs(), f64::max))
        })),
    );
}

fn limits(b: &mut Battery) {
    let cfg = b.config;
    let Some(&t) = cfg.t_grid.iter().max_by(|a, c| a.total_cmp(c)) else { return };
    if cfg.limit_n.is_empty() {
        return;
    }
    let mut rng = b.rng("limit cigar");
    let x = FlowFamily::Cigar.sample_point(&mut rng);
    let cigar = harnack_limit_check(&FlowFamily::Cigar, &cfg.limit_n, &x, t);
    let surface = flow_surface_rotsym(&SurfaceGrid::initial(cfg.surface_intervals, cfg.surface_amplitude), &[t], None)
        .and_then(|g| surface_limit_check(&g[0], cfg.surface_intervals * 5 / 16, &cfg.limit_n));
    for (name, rows) in [("cigar", cigar), ("surface", surface)] {
        if let Ok(rows) = &rows {
            b.csv(format!("thermostat_limit_{name}.csv"), limit_csv(rows));
        }
        b.check(
            format!("harnack_limit_{name}"),
            "limit_spread",
            rows.map(|r| limit_spread(&r).into_iter().fold(0.0, f64::max)),
        );
    }
}

/// Minimum eigenvalue of the restricted form for every corpus sample.
fn restricted_eigs(b: &Battery, n_fiber: usize) -> Result<Vec<f64>> {
    let cfg = b.config;
    let mut out = vec![];
    for fam in cfg.flow_corpus() {
        let mut rng = b.rng(&format!("restricted {}", slug(&fam)));
        if let FlowFamily::SurfaceRotsym { grid, amplitude } = fam {
            let snaps = flow_surface_rotsym(&SurfaceGrid::initial(grid, amplitude), &cfg.t_grid, None)?;
            for i in 0..cfg.samples {
                let base = BaseData::from_surface(&snaps[i % snaps.len()], rng.random_range(0..=grid))?;
                out.push(harnack_min_eig(&restricted_triple_closed(&base, n_fiber))?);
            }
            continue;
        }
        for i in 0..cfg.samples {
            let x = fam.sample_point(&mut rng);
            out.push(restricted_min_eig(&fam, n_fiber, &x, cfg.t_grid[i % cfg.t_grid.len()], 1e-8)?);
        }
    }
    Ok(out)
}

fn restricted(b: &mut Battery) {
    let cfg = b.config;
    if cfg.t_grid.is_empty() {
        return;
    }
    for &n in &cfg.n_list {
        let v = restricted_eigs(b, n).map(|e| -(n as f64) * e.into_iter().fold(f64::INFINITY, f64::min));
        b.check(format!("restricted_min_eig_n{n}"), "restricted_positivity", v);
    }
    if cfg.limit_n.len() < 2 {
        return;
    }
    for fam in [cfg.sphere(2), cfg.sphere(3)] {
        let mut rng = b.rng(&format!("restricted rate {}", slug(&fam)));
        let x = fam.sample_point(&mut rng);
        let t = cfg.t_grid[0];
        let v = (|| -> Result<f64> {
            let base = harnack_min_eig(&HarnackTriple::from_flow_point(&FlowPoint::new(&fam, &x, t)?))?;
            let gaps: Vec<f64> = cfg
                .limit_n
                .iter()
                .map(|&n| Ok((restricted_min_eig(&fam, n, &x, t, 1e-8)? - base).abs()))
                .collect::<Result<_>>()?;
            if gaps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(GeomError::Precondition(format!("restricted gap not decreasing in N: {gaps:?}")));
            }
            let c: Vec<f64> = gaps.iter().zip(&cfg.limit_n).map(|(g, &n)| g * n as f64).collect();
            let last = c[c.len() - 1];
            Ok(c.iter().map(|v| (v / last - 1.0).abs()).fold(0.0, f64::max))
        })();
        b.check(format!("restricted_gap_rate_{}", slug(&fam)), "restricted_rate", v);
    }
}

/// The space-time curvature equations at their two reference points.
fn spacetime(b: &mut Battery) {
    let cfg = b.config;
    let n = 16;
    for (fam, t, block, name) in [(cfg.sphere(3), 0.1, 0, "spacetime_time_derivative_s3"), (cfg.sphere(2), 0.2, 2, "spacetime_heat_s2")] {
        let mut rng = b.rng(name);
        let x = fam.sample_point(&mut rng);
        let v = spacetime_residuals(&fam, n, &x, t)
            .map(|r| n as f64 * if block == 0 { r.time_cov[0] } else { r.heat[2] });
        b.check(name, "spacetime", v);
    }
}

// Entropy

/// `τ` grid with the midpoints inserted.
pub fn refine(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(grid.last());
    out
}

fn entropy(b: &mut Battery) {
    let cfg = b.config;
    if cfg.tau_grid.len() < 2 {
        return;
    }
    for fam in cfg.entropy_corpus() {
        let s = slug(&fam);
        let coarse = monotonicity_report(&fam, cfg.horizon, &cfg.tau_grid);
        let fine = monotonicity_report(&fam, cfg.horizon, &refine(&cfg.tau_grid));
        if let Ok(r) = &coarse {
            b.csv(format!("entropy_{s}.csv"), r.csv());
            b.findings.push(Finding {
                name: format!("entropy_direction_{s}"),
                reference: "W-entropy monotone in backward time",
                measured: format!("{:?}", r.measured).to_lowercase(),
                claimed: format!("{:?}", r.claimed).to_lowercase(),
                agrees: r.measured == r.claimed,
            });
        }
        let err = |r: &Result<crate::entropy::MonotonicityReport>| r.as_ref().map_err(Clone::clone).map(|_| ());
        b.check(
            format!("entropy_normalization_{s}"),
            "entropy_normalization",
            err(&coarse).and(err(&fine)).map(|_| {
                let (c, f) = (coarse.as_ref().unwrap(), fine.as_ref().unwrap());
                c.max_normalization_drift.max(f.max_normalization_drift)
            }),
        );
        b.check(format!("entropy_closed_form_{s}"), "entropy_closed_form", coarse.as_ref().map(|r| r.max_closed_gap).map_err(Clone::clone));
        b.check(
            format!("entropy_single_signed_{s}"),
            "entropy_monotone",
            coarse.as_ref().map(|r| if r.monotone { 0.0 } else { 1.0 }).map_err(Clone::clone),
        );
        let stable = err(&coarse).and(err(&fine)).map(|_| {
            let (c, f) = (coarse.as_ref().unwrap(), fine.as_ref().unwrap());
            let fw: Vec<f64> = f.series.iter().map(|p| p.1).collect();
            let same = c.measured == direction(&fw) && c.measured != Direction::Mixed;
            if same { 0.0 } else { 1.0 }
        });
        b.check(format!("entropy_refinement_stable_{s}"), "entropy_monotone", stable);
    }
}
