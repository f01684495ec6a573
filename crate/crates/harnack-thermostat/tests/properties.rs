//! Property tests for jets, curvature, Harnack quadratic forms, thermostat
//! block structure, entropy normalisation and configuration parsing.

use harnack_thermostat::chart::models::RoundSphere;
use harnack_thermostat::chart::{christoffel, metric_at, riemann};
use harnack_thermostat::cli::{parse_config, tolerance_flag};
use harnack_thermostat::entropy::{evolve_conjugate_f, EntropyState};
use harnack_thermostat::flow::FlowFamily;
use harnack_thermostat::harnack::algebra::{random_p, random_riemann};
use harnack_thermostat::harnack::{harnack_value, HarnackInput, HarnackTriple};
use harnack_thermostat::jet::{jet_eval, Jet};
use harnack_thermostat::tensor::Tensor;
use harnack_thermostat::thermostat::{build_metric, ThermostatSpec};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORDER: usize = 4;

/// Dense bivariate polynomial of total degree ≤ 2 from six coefficients.
fn poly(c: &[f64], x: &[Jet]) -> Jet {
    let (a, b) = (&x[0], &x[1]);
    c[0] + a * c[1] + b * c[2] + &(a * a) * c[3] + &(a * b) * c[4] + &(b * b) * c[5]
}

fn exponents_up_to(order: usize) -> Vec<[u8; 2]> {
    let mut out = vec![];
    for i in 0..=order as u8 {
        for j in 0..=(order as u8 - i) {
            out.push([i, j]);
        }
    }
    out
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 6)
}

fn fiber_block(g: &DMatrix<f64>, base: usize, fiber: usize) -> DMatrix<f64> {
    g.view((base, base), (fiber, fiber)).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_rule_matches_cauchy_product(f in coeffs(), g in coeffs(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let p = [x, y];
        let jf = jet_eval(|v| Ok(poly(&f, v)), &p, &[0, 1], ORDER).unwrap();
        let jg = jet_eval(|v| Ok(poly(&g, v)), &p, &[0, 1], ORDER).unwrap();
        let jfg = jet_eval(|v| Ok(poly(&f, v) * poly(&g, v)), &p, &[0, 1], ORDER).unwrap();
        for e in exponents_up_to(ORDER) {
            let mut cauchy = 0.0;
            for i in 0..=e[0] {
                for j in 0..=e[1] {
                    cauchy += jf.coefficient(&[i, j]) * jg.coefficient(&[e[0] - i, e[1] - j]);
                }
            }
            let got = jfg.coefficient(&e);
            prop_assert!((got - cauchy).abs() <= 1e-12 * cauchy.abs().max(1.0), "{e:?}: {got} vs {cauchy}");
            prop_assert_eq!(got, (&jf * &jg).coefficient(&e));
        }
    }

    #[test]
    fn mixed_partials_share_storage(f in coeffs(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let j = jet_eval(|v| Ok((poly(&f, v) * &v[0]).sin()), &[x, y], &[0, 1], ORDER).unwrap();
        prop_assert_eq!(j.partial(&[0, 1]).to_bits(), j.partial(&[1, 0]).to_bits());
        prop_assert_eq!(j.partial(&[0, 1, 1, 0]).to_bits(), j.partial(&[1, 1, 0, 0]).to_bits());
    }

    #[test]
    fn constant_rescaling_fixes_christoffel_and_scales_riemann(c in 0.2..5.0f64, theta in 0.3..2.8f64, phi in 0.0..6.0f64) {
        let p = [theta, phi];
        let (one, scaled) = (RoundSphere::new(2, 1.0), RoundSphere::new(2, c));
        let dg = christoffel(&scaled, &p).unwrap().max_abs_diff(&christoffel(&one, &p).unwrap());
        prop_assert!(dg <= 1e-12, "Γ moved by {dg}");
        let dr = riemann(&scaled, &p).unwrap().max_abs_diff(&riemann(&one, &p).unwrap().scaled(c));
        prop_assert!(dr <= 1e-12 * c, "Rm off by {dr}");
    }

    #[test]
    fn harnack_form_is_quadratic(seed in any::<u64>(), lambda in -3.0..3.0f64, n in 2usize..5, v in prop::collection::vec(-1.0..1.0f64, 10)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::<f64>::from_fn(n, n, |i, j| ((i + 2 * j) as f64).sin() + ((j + 2 * i) as f64).sin());
        let triple = HarnackTriple {
            riemann: random_riemann(n, &mut rng),
            p: random_p(n, &mut rng),
            m: Tensor::from_fn(n, 2, |ix| m[(ix[0], ix[1])]),
            t: 1.0,
            metric: DMatrix::identity(n, n),
        };
        let input = HarnackInput::from_block_vector(n, &v[..n * (n - 1) / 2 + n]);
        let z = harnack_value(&triple, &input);
        let zl = harnack_value(&triple, &input.scaled(lambda));
        prop_assert!((zl - lambda * lambda * z).abs() <= 1e-12 * (z.abs() * lambda * lambda).max(1.0));
    }

    #[test]
    fn thermostat_blocks_decouple(n_fiber in 2usize..7, t1 in 0.05..0.3f64, t2 in 0.05..0.3f64, y in 0.5..1.5f64) {
        let base = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
        let chart = build_metric(&ThermostatSpec::hyperbolic(n_fiber, base).unwrap()).unwrap();
        let x = [1.1, 0.4];
        let fiber = vec![y; n_fiber];
        let [g1, g2] = [t1, t2].map(|t| metric_at(&chart, &chart.point(&x, &fiber, t).unwrap()).unwrap());
        let dim = 2 + n_fiber + 1;
        for i in 0..dim {
            for j in 0..dim {
                let block = |k: usize| if k < 2 { 0 } else if k < 2 + n_fiber { 1 } else { 2 };
                if block(i) != block(j) {
                    prop_assert_eq!(g1[(i, j)], 0.0);
                }
            }
        }
        let d = (fiber_block(&g1, 2, n_fiber) / t1 - fiber_block(&g2, 2, n_fiber) / t2).abs().max();
        prop_assert!(d <= 1e-12 * fiber_block(&g1, 2, n_fiber).abs().max() / t1);
    }

    #[test]
    fn conjugate_flow_keeps_unit_mass(tau in 0.05..0.3f64, d_tau in 0.01..0.15f64, product in any::<bool>()) {
        let family = if product {
            FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 }
        } else {
            FlowFamily::ConstantCurvature { n: 3, c0: 3.0 }
        };
        let state = EntropyState::normalized(&family, 0.5, tau).unwrap();
        prop_assert!((state.normalization().unwrap() - 1.0).abs() <= 1e-12);
        let later = evolve_conjugate_f(&state, d_tau).unwrap();
        prop_assert!((later.normalization().unwrap() - 1.0).abs() <= 1e-6 * d_tau);
    }

    #[test]
    fn flags_round_trip_through_config(seed in any::<u64>(), ns in prop::collection::vec(2usize..64, 1..5), tol in 1e-12..1.0f64) {
        let list = ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        let mut flags = vec![
            ("suite".to_string(), "identities".to_string()),
            ("seed".to_string(), seed.to_string()),
            ("N".to_string(), list),
        ];
        flags.push(tolerance_flag(&format!("bianchi={tol:e}")).unwrap());
        let config = parse_config(None, &flags).unwrap();
        prop_assert_eq!(config.seed, seed);
        prop_assert_eq!(&config.n_list, &ns);
        prop_assert_eq!(config.tolerance("bianchi"), tol);
    }
}
