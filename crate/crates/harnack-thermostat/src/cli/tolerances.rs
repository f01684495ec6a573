//! Named tolerances. Each check uses one; `--tol NAME=VALUE` overrides it.

use serde::Serialize;

use crate::harnack::SOLITON_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        })
    }
}

pub struct ToleranceSpec {
    pub name: &'static str,
    pub default: f64,
    pub bound: Bound,
    pub reference: &'static str,
}

const fn spec(name: &'static str, default: f64, bound: Bound, reference: &'static str) -> ToleranceSpec {
    ToleranceSpec { name, default, bound, reference }
}

use Bound::{AtLeast, AtMost};

pub const TOLERANCES: &[ToleranceSpec] = &[
    spec("bianchi", 1e-8, AtMost, "Bianchi identities and their contractions"),
    spec("ricci_identity", 1e-8, AtMost, "Ricci identity for commuted covariant derivatives"),
    spec("fd_order", 2.0, AtLeast, "autodiff curvature against central differences, observed order"),
    spec("fd_discrepancy", 1e-6, AtMost, "autodiff curvature against Richardson-extrapolated differences"),
    spec("flat_vanishing", 1e-10, AtMost, "all curvature vanishes on the static flat flow"),
    spec("evolution", 1e-8, AtMost, "evolution of metric and curvature under Ricci flow"),
    spec("evolution_fd", 1e-6, AtMost, "heat equations of P and M with difference-quotient left side"),
    spec("surface_order", 1.8, AtLeast, "rotationally symmetric surface flow self-convergence order"),
    spec("operator_positivity", -1e-8, AtLeast, "positive curvature operator preserved along the flow"),
    spec("harnack_positivity", -1e-6, AtLeast, "Harnack quadratic form is weakly positive"),
    spec("monte_carlo", 1e-6, AtMost, "Harnack minimum by eigensolve against sampled minimum"),
    spec("algebraic", 1e-9, AtMost, "quadratic rearrangements, cyclic identity of P, sum of squares"),
    spec("m_decomposition", 1e-9, AtMost, "divergence form of the Harnack tensor M"),
    spec("soliton", 1e-10, AtMost, "expanding soliton equation and vanishing Harnack combination"),
    spec("soliton_detection", SOLITON_TOL, AtLeast, "perturbed potentials fail the expanding soliton equation"),
    spec("fiber_curvature", 1e-9, AtMost, "scaled fiber has constant curvature of size 1/2N"),
    spec("closed_forms", 1e-7, AtMost, "thermostat Christoffel, curvature and Ricci closed forms"),
    spec("decay_slope", 0.15, AtMost, "thermostat Ricci tensor decays like 1/N"),
    spec("limit_spread", 0.25, AtMost, "thermostat curvature tends to Hamilton's tensors like C/N"),
    spec("restricted_positivity", 10.0, AtMost, "restricted space-time curvature positive up to C/N"),
    spec("restricted_rate", 0.25, AtMost, "restricted minimum tends to the Harnack minimum like C/N"),
    spec("spacetime", 10.0, AtMost, "space-time curvature equations hold up to C/N"),
    spec("entropy_normalization", 1e-6, AtMost, "conjugate heat flow preserves the unit normalisation"),
    spec("entropy_closed_form", 1e-6, AtMost, "evolved W-entropy against its closed form"),
    spec("entropy_monotone", 0.0, AtMost, "W-entropy differences have a single sign"),
];

pub fn tolerance_spec(name: &str) -> Option<&'static ToleranceSpec> {
    TOLERANCES.iter().find(|t| t.name == name)
}

pub fn default_tolerance(name: &str) -> Option<f64> {
    tolerance_spec(name).map(|t| t.default)
}
