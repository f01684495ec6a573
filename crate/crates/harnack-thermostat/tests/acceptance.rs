//! Acceptance battery: one line per criterion, then a single assertion.

use std::time::Instant;

use harnack_thermostat::chart::models::RandomMetric;
use harnack_thermostat::chart::{bianchi_residuals, riemann, FdCurvatureCheck};
use harnack_thermostat::cli::suites::{corpus_triples, identity_corpus, refine};
use harnack_thermostat::cli::{emit_report, run_suite, RunConfig, Suite};
use harnack_thermostat::entropy::{direction, monotonicity_report};
use harnack_thermostat::flow::{flow_surface_rotsym, surface_convergence, FlowFamily, FlowPoint, SurfaceGrid};
use harnack_thermostat::harnack::{
    algebraic_identities, harnack_min_eig, m_decomposition_residual, monte_carlo_min, soliton_check, HarnackTriple,
    SOLITON_TOL,
};
use harnack_thermostat::jet::Jet;
use harnack_thermostat::thermostat::{
    build_metric, compare_christoffel, compare_curvature, compare_ricci, fiber_curvature, harnack_limit_check,
    limit_spread, restricted_min_eig, restricted_triple_closed, ricci_decay_fit, surface_limit_check, BaseData,
    ThermostatSpec, ThermostatVariant,
};
use harnack_thermostat::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T_GRID: [f64; 3] = [0.05, 0.1, 0.2];
const SEED: u64 = 0;

fn s2() -> FlowFamily {
    FlowFamily::ConstantCurvature { n: 2, c0: 3.0 }
}

fn s3() -> FlowFamily {
    FlowFamily::ConstantCurvature { n: 3, c0: 3.0 }
}

fn product() -> FlowFamily {
    FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 }
}

fn surface() -> FlowFamily {
    FlowFamily::SurfaceRotsym { grid: 64, amplitude: 0.3 }
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

type Outcome = Result<(bool, String)>;

fn flat_suite() -> Outcome {
    let flat = FlowFamily::StaticFlat { n: 3 };
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for &t in &T_GRID {
        let x = flat.sample_point(&mut r);
        let fp = FlowPoint::new(&flat, &x, t)?;
        for v in [
            fp.riemann.max_abs(),
            fp.ricci.max_abs(),
            fp.scalar.abs(),
            fp.dt_metric.max_abs(),
            fp.nabla_riemann.max_abs(),
            fp.p.max_abs(),
            fp.m.max_abs(),
        ] {
            worst = worst.max(v);
        }
        let flat2 = FlowFamily::StaticFlat { n: 2 };
        let x2 = flat2.sample_point(&mut r);
        for row in harnack_limit_check(&flat2, &[4, 8, 16], &x2, t)? {
            worst = row.gaps.into_iter().fold(worst, f64::max);
        }
        let restricted = build_metric(&ThermostatSpec::restricted(8, flat2.clone())?)?;
        worst = worst.max(riemann(&restricted, &restricted.point(&x2, &[], t)?)?.max_abs());
    }
    Ok((worst <= 1e-10, format!("max |component| {worst:.2e} <= 1e-10")))
}

fn autodiff_correctness() -> Outcome {
    let mut r = rng(2);
    let (mut order, mut disc) = (f64::INFINITY, 0.0f64);
    for i in 0..20 {
        let n = 2 + i % 3;
        let m = RandomMetric::new(n, 500 + i as u64);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let c = FdCurvatureCheck::run(&m, &x, &[8e-2, 4e-2, 2e-2])?;
        order = order.min(c.gamma_richardson_order).min(c.riemann_richardson_order);
        disc = disc.max(c.gamma_richardson).max(c.riemann_richardson);
    }
    Ok((order >= 2.0 && disc <= 1e-6, format!("min Richardson order {order:.2} >= 2, discrepancy {disc:.2e} <= 1e-6")))
}

fn identity_battery() -> Outcome {
    let corpus = identity_corpus(&RunConfig::default())?;
    let mut worst = 0.0f64;
    for (_, chart, p) in &corpus {
        worst = worst.max(bianchi_residuals(chart.as_ref(), p)?.max());
    }
    Ok((worst <= 1e-8, format!("{} metrics, max residual {worst:.2e} <= 1e-8", corpus.len())))
}

fn fiber_curvature_check() -> Outcome {
    let mut worst = 0.0f64;
    for n in [4, 8, 16] {
        for (variant, sign) in [(ThermostatVariant::Hyperbolic, -1.0), (ThermostatVariant::Spherical, 1.0)] {
            for k in fiber_curvature(variant, n, 20, SEED)? {
                worst = worst.max((k - sign / (2.0 * n as f64)).abs());
            }
        }
    }
    Ok((worst <= 1e-9, format!("max |K ∓ 1/2N| {worst:.2e} <= 1e-9")))
}

fn closed_forms() -> Outcome {
    let n_fiber = 4;
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, fam) in [FlowFamily::StaticFlat { n: 2 }, s2(), s3()].into_iter().enumerate() {
        let chart = build_metric(&ThermostatSpec::hyperbolic(n_fiber, fam.clone())?)?;
        let mut r = rng(50 + k as u64);
        for i in 0..10 {
            let x = fam.sample_point(&mut r);
            let y: Vec<f64> = (0..n_fiber).map(|_| r.random_range(0.3..1.5)).collect();
            let p = chart.point(&x, &y, T_GRID[i % 3])?;
            for fc in compare_christoffel(&chart, &p)?.iter().chain(&compare_curvature(&chart, &p)?).chain(&compare_ricci(&chart, &p)?) {
                worst = worst.max(fc.residual);
                count += 1;
            }
        }
    }
    Ok((worst <= 1e-7, format!("{count} family comparisons, max residual {worst:.2e} <= 1e-7")))
}

fn ricci_decay() -> Outcome {
    let mut ok = true;
    let mut detail = vec![];
    for fam in [s2(), s3()] {
        let fit = ricci_decay_fit(&fam, &[8, 12, 16, 24], 5, (0.02, 0.1), SEED)?;
        let slope = fit.slope.unwrap_or(f64::NAN);
        ok &= (slope + 1.0).abs() <= 0.15;
        detail.push(format!("{} slope {slope:.3}", fam.label()));
    }
    Ok((ok, format!("{}; band -1 ± 0.15", detail.join(", "))))
}

fn harnack_limit() -> Outcome {
    let ns = [16, 32, 64];
    let mut r = rng(7);
    let cigar = harnack_limit_check(&FlowFamily::Cigar, &ns, &FlowFamily::Cigar.sample_point(&mut r), 0.2)?;
    let sphere = harnack_limit_check(&s2(), &ns, &s2().sample_point(&mut r), 0.2)?;
    let grid = flow_surface_rotsym(&SurfaceGrid::initial(64, 0.3), &[0.1], None)?;
    let surf = surface_limit_check(&grid[0], 20, &ns)?;
    let spreads: Vec<f64> = [&cigar, &sphere, &surf].iter().map(|rows| limit_spread(rows).into_iter().fold(0.0, f64::max)).collect();
    let worst = spreads.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 0.25, format!("N·gap spread cigar {:.3}, S^2 {:.3}, surface {:.3} <= 0.25", spreads[0], spreads[1], spreads[2])))
}

fn evolution() -> Outcome {
    let mut worst = 0.0f64;
    let mut r = rng(8);
    for fam in [s2(), s3(), product(), FlowFamily::StaticFlat { n: 3 }] {
        for &t in &T_GRID {
            let x = fam.sample_point(&mut r);
            let e = FlowPoint::new(&fam, &x, t)?.evolution_residuals()?;
            worst = [e.metric, e.riemann, e.ricci, e.scalar, e.heat.p, e.heat.m].into_iter().fold(worst, f64::max);
        }
    }
    let x = FlowFamily::Cigar.sample_point(&mut r);
    let cigar = FlowPoint::new(&FlowFamily::Cigar, &x, 0.1)?.evolution_residuals()?;
    let conv = surface_convergence(0.3, 0.2, &[64, 128, 256])?;
    let order = conv.u_order.min(conv.residual_order);
    Ok((
        worst <= 1e-8 && order >= 1.8,
        format!(
            "max residual {worst:.2e} <= 1e-8, surface order {order:.2} >= 1.8; cigar heat P/M {:.1e}/{:.1e} (difference quotients)",
            cigar.heat.p, cigar.heat.m
        ),
    ))
}

fn harnack_positivity() -> Outcome {
    let mut min = f64::INFINITY;
    let mut mc_gap = 0.0f64;
    for (k, fam) in [s2(), s3(), product(), surface()].into_iter().enumerate() {
        let triples = corpus_triples(&fam, &T_GRID, 20, &mut rng(90 + k as u64))?;
        for tri in &triples {
            min = min.min(harnack_min_eig(tri)?);
        }
        let mc = monte_carlo_min(&triples[0], 10_000, SEED)?;
        mc_gap = mc_gap.max((mc.polished_min - harnack_min_eig(&triples[0])?).abs());
    }
    Ok((min >= -1e-6 && mc_gap <= 1e-6, format!("min eigenvalue {min:.3e} >= -1e-6, Monte Carlo gap {mc_gap:.1e} <= 1e-6")))
}

fn main_theorem() -> Outcome {
    let mut ok = true;
    let mut worst_scaled = f64::NEG_INFINITY;
    for n in [8, 16, 32] {
        for (k, fam) in [s2(), s3(), product()].into_iter().enumerate() {
            let mut r = rng(110 + k as u64);
            for i in 0..20 {
                let x = fam.sample_point(&mut r);
                let e = restricted_min_eig(&fam, n, &x, T_GRID[i % 3], 1e-8)?;
                ok &= e >= -10.0 / n as f64;
                worst_scaled = worst_scaled.max(-e * n as f64);
            }
        }
        let grid = flow_surface_rotsym(&SurfaceGrid::initial(64, 0.3), &T_GRID, None)?;
        for g in &grid {
            for j in (0..=64).step_by(4) {
                let e = harnack_min_eig(&restricted_triple_closed(&BaseData::from_surface(g, j)?, n))?;
                ok &= e >= -10.0 / n as f64;
                worst_scaled = worst_scaled.max(-e * n as f64);
            }
        }
    }
    let mut rates = vec![];
    for fam in [s2(), s3()] {
        let x = fam.sample_point(&mut rng(120));
        let base = harnack_min_eig(&HarnackTriple::from_flow_point(&FlowPoint::new(&fam, &x, 0.1)?))?;
        let gaps: Vec<f64> =
            [16, 32, 64].iter().map(|&n| Ok((restricted_min_eig(&fam, n, &x, 0.1, 1e-8)? - base).abs())).collect::<Result<_>>()?;
        ok &= gaps.windows(2).all(|w| w[1] < w[0]);
        let c: Vec<f64> = gaps.iter().zip([16.0, 32.0, 64.0]).map(|(g, n)| g * n).collect();
        let spread = c.iter().map(|v| (v / c[2] - 1.0).abs()).fold(0.0, f64::max);
        ok &= spread <= 0.25;
        rates.push(format!("{:.3}", spread));
    }
    Ok((ok, format!("max -N·min_eig {worst_scaled:.3} <= 10, N·gap spread {} <= 0.25 with gaps decreasing", rates.join("/"))))
}

fn algebraic() -> Outcome {
    let alg = (2..=4).map(|d| algebraic_identities(d, 100, SEED).max()).fold(0.0, f64::max);
    let mut r = rng(11);
    let mut m = 0.0f64;
    for n in 2..=4 {
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        m = m.max(m_decomposition_residual(&RandomMetric::new(n, 40 + n as u64), &x, 0.7)?);
    }
    Ok((alg <= 1e-9 && m <= 1e-9, format!("identities {alg:.2e}, M decomposition {m:.2e} <= 1e-9")))
}

fn soliton() -> Outcome {
    let e = harnack_thermostat::chart::models::Euclidean::new(3);
    let x = [0.3, -0.2, 1.0];
    let gaussian = |x: &[Jet]| -> Result<Jet> {
        let mut s = x[0].zero_like();
        for v in x {
            s = &s + &(v * v);
        }
        Ok(s.scale(0.25))
    };
    let exact = soliton_check(1.0, &e, &gaussian, &x, 100, SEED)?;
    let scaled = soliton_check(1.0, &e, &|x: &[Jet]| Ok(gaussian(x)?.scale(1.1)), &x, 100, SEED)?;
    let bumped = soliton_check(1.0, &e, &|x: &[Jet]| Ok(&gaussian(x)? + &x[1].cos().scale(0.01)), &x, 100, SEED)?;
    let ok = exact.is_soliton
        && exact.soliton_residual.max(exact.vanishing_residual) <= 1e-10
        && !scaled.is_soliton
        && !bumped.is_soliton;
    Ok((
        ok,
        format!(
            "Gaussian {:.1e}/{:.1e} <= 1e-10; perturbed residuals {:.1e}, {:.1e} > {SOLITON_TOL:e}",
            exact.soliton_residual, exact.vanishing_residual, scaled.soliton_residual, bumped.soliton_residual
        ),
    ))
}

fn entropy() -> Outcome {
    let grid: Vec<f64> = (1..=8).map(|i| 0.05 * i as f64).collect();
    let mut ok = true;
    let mut dirs = vec![];
    let mut drift = 0.0f64;
    for fam in [s2(), s3(), product()] {
        let coarse = monotonicity_report(&fam, 0.5, &grid)?;
        let fine = monotonicity_report(&fam, 0.5, &refine(&grid))?;
        drift = drift.max(coarse.max_normalization_drift).max(fine.max_normalization_drift);
        let fine_dir = direction(&fine.series.iter().map(|s| s.1).collect::<Vec<_>>());
        ok &= coarse.monotone && coarse.measured == fine_dir && coarse.max_closed_gap <= 1e-6;
        dirs.push(format!("{:?}", coarse.measured).to_lowercase());
    }
    ok &= drift <= 1e-6;
    let all_dec = dirs.iter().all(|d| d == "decreasing");
    let claim = if all_dec { "claim 'increasing' not reproduced" } else { "see report" };
    Ok((ok, format!("drift {drift:.1e} <= 1e-6, single-signed and refinement-stable, measured {} in τ ({claim})", dirs.join("/"))))
}

fn determinism() -> Outcome {
    let cfg = RunConfig { suite: Suite::All, ..RunConfig::default() };
    let dir = std::env::temp_dir().join("harnack-thermostat-acceptance");
    let (a, b) = (dir.join("first"), dir.join("second"));
    emit_report(&run_suite(&cfg), &a)?;
    emit_report(&run_suite(&cfg), &b)?;
    let (ja, jb) = (std::fs::read(a.join("summary.json"))?, std::fs::read(b.join("summary.json"))?);
    Ok((ja == jb && !ja.is_empty(), format!("two runs of suite all, {} bytes, identical: {}", ja.len(), ja == jb)))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("flat suite vanishes", flat_suite),
        ("autodiff against finite differences", autodiff_correctness),
        ("Bianchi and Ricci identity battery", identity_battery),
        ("fiber curvature ∓1/2N", fiber_curvature_check),
        ("thermostat closed forms", closed_forms),
        ("thermostat Ricci decay slope", ricci_decay),
        ("Harnack limit constants", harnack_limit),
        ("evolution residuals", evolution),
        ("Harnack positivity", harnack_positivity),
        ("restricted positivity and rate", main_theorem),
        ("algebraic identities", algebraic),
        ("expanding soliton", soliton),
        ("W-entropy", entropy),
        ("determinism", determinism),
    ];
    let mut failed = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {:2} {}: {} ({detail}) [{secs:.1}s]", i + 1, name, if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
