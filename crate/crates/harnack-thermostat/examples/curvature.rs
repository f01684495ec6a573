//! Curvature of a few model charts: Bianchi residuals, Ricci, scalar
//! curvature and the smallest eigenvalue of the curvature operator.

use std::sync::Arc;

use harnack_thermostat::chart::models::{HalfSpace, Product, RandomMetric, RoundSphere};
use harnack_thermostat::chart::{bianchi_residuals, curvature_bundle, curvature_operator_eigs, MetricChart};
use harnack_thermostat::Result;

fn main() -> Result<()> {
    let charts: Vec<(Box<dyn MetricChart>, Vec<f64>)> = vec![
        (Box::new(RoundSphere::new(2, 1.0)), vec![1.0, 0.3]),
        (Box::new(HalfSpace::new(3, 1.0)), vec![0.2, -0.4, 0.8]),
        (
            Box::new(Product::new(Arc::new(RoundSphere::new(2, 2.0)), Arc::new(RoundSphere::new(2, 3.0)))),
            vec![1.0, 0.2, 1.4, 0.5],
        ),
        (Box::new(RandomMetric::new(3, 7)), vec![0.1, 0.2, -0.3]),
    ];
    println!("{:<22} {:>10} {:>10} {:>12}", "chart", "R", "min eig", "bianchi");
    for (chart, p) in &charts {
        let b = curvature_bundle(chart.as_ref(), p)?;
        let eigs = curvature_operator_eigs(&b.riemann, &b.metric);
        let res = bianchi_residuals(chart.as_ref(), p)?;
        println!("{:<22} {:>10.5} {:>10.5} {:>12.2e}", chart.label(), b.scalar, eigs.min(), res.max());
    }
    Ok(())
}
