//! Thermostat metrics over a shrinking sphere: closed forms against autodiff,
//! 1/N decay of the Ricci tensor and convergence to the Harnack tensors.

use harnack_thermostat::flow::FlowFamily;
use harnack_thermostat::thermostat::{
    build_metric, compare_curvature, harnack_limit_check, limit_spread, ricci_decay_fit, ThermostatSpec,
};
use harnack_thermostat::Result;

fn main() -> Result<()> {
    let base = FlowFamily::ConstantCurvature { n: 2, c0: 3.0 };
    let chart = build_metric(&ThermostatSpec::hyperbolic(4, base.clone())?)?;
    let p = chart.point(&[1.1, 0.4], &[0.8, 1.2, 0.9, 1.1], 0.1)?;
    for c in compare_curvature(&chart, &p)? {
        println!("{:<28} {:>4} components, residual {:.1e}", c.family, c.components, c.residual);
    }

    let fit = ricci_decay_fit(&base, &[8, 16, 32], 5, (0.02, 0.1), 0)?;
    println!("\nRicci size against N");
    for (n, v) in &fit.rows {
        println!("  N = {n:>3}: {v:.4e}");
    }
    println!("  slope {:.3}", fit.slope.unwrap_or(f64::NAN));

    let rows = harnack_limit_check(&base, &[16, 32, 64], &[1.1, 0.4], 0.1)?;
    println!("\nN·gap to Rm, P, M");
    for r in &rows {
        println!("  N = {:>3}: {:.4} {:.4} {:.4}", r.n_fiber, r.constants[0], r.constants[1], r.constants[2]);
    }
    let [a, b, c] = limit_spread(&rows);
    println!("  spread {a:.4} {b:.4} {c:.4}");
    Ok(())
}
