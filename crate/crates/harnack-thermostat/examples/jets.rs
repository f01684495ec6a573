//! Fourth-order jets of a scalar field, checked against central differences.

use harnack_thermostat::jet::{jet_eval, jet_fd_crosscheck, Jet};
use harnack_thermostat::Result;

fn field(x: &[Jet]) -> Result<Jet> {
    Ok((&x[0] * &x[1]).sin() + (&x[0] * &x[0]).exp().scale(0.5))
}

fn main() -> Result<()> {
    let p = [0.4, -0.7];
    let j = jet_eval(field, &p, &[0, 1], 4)?;
    println!("f = {:.6}", j.value());
    for vars in [&[0][..], &[0, 1], &[1, 0], &[0, 0, 1, 1]] {
        println!("d{vars:?} f = {:.9}", j.partial(vars));
    }

    let report = jet_fd_crosscheck(field, &p, 2, &[1e-2, 5e-3, 2.5e-3])?;
    println!("\nvars      jet            |fd - jet| at each step        order");
    for r in &report.rows {
        let d: Vec<String> = r.discrepancy.iter().map(|d| format!("{d:.1e}")).collect();
        println!("{:<9} {:<14.9} {:<30} {:.2}", format!("{:?}", r.vars), r.jet, d.join(" "), r.observed_order);
    }
    println!("min order {:.2}, flagged rows {}", report.min_order(), report.flagged());
    Ok(())
}
