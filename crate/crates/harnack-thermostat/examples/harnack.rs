//! Harnack quadratic form along shrinking spheres: eigensolve minimum,
//! sampled minimum and the expanding Gaussian soliton.

use harnack_thermostat::chart::models::Euclidean;
use harnack_thermostat::flow::{FlowFamily, FlowPoint};
use harnack_thermostat::harnack::{harnack_min_eig, monte_carlo_min, soliton_check, HarnackTriple};
use harnack_thermostat::jet::Jet;
use harnack_thermostat::Result;

fn main() -> Result<()> {
    let fam = FlowFamily::ProductSpheres { c1: 2.0, c2: 3.0 };
    for t in [0.05, 0.1, 0.2] {
        let triple = HarnackTriple::from_flow_point(&FlowPoint::new(&fam, &[1.0, 0.2, 1.4, 0.5], t)?);
        let mc = monte_carlo_min(&triple, 2000, 0)?;
        println!(
            "t = {t:.2}: eigensolve {:+.3e}, best sample {:+.3e}, polished {:+.3e}",
            harnack_min_eig(&triple)?,
            mc.sampled_min,
            mc.polished_min
        );
    }

    // |x|²/4t on flat space is an expanding soliton
    let gaussian = |x: &[Jet]| -> Result<Jet> {
        let mut s = x[0].zero_like();
        for v in x {
            s = &s + &(v * v);
        }
        Ok(s.scale(0.25))
    };
    let r = soliton_check(1.0, &Euclidean::new(3), &gaussian, &[0.3, -0.2, 1.0], 50, 0)?;
    println!("\ngaussian soliton residual {:.1e}, Harnack combination {:.1e}", r.soliton_residual, r.vanishing_residual);
    Ok(())
}
