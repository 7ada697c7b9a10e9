//! Ready-made charts, metrics and fields in Shander form `(x^a, t, τ)`.

use std::sync::Arc;

use crate::grassmann::{parse_superfunction, Chart, SuperFunction};
use crate::metric::SuperMetric;
use crate::scalar::FunctionSymbol;
use crate::superdomain::VectorField;

/// Even coordinates `spatial..., t` and one odd coordinate `tau`.
pub fn shander_chart(spatial: &[&str], functions: Vec<FunctionSymbol>) -> Arc<Chart> {
    let mut even: Vec<&str> = spatial.to_vec();
    even.push("t");
    Chart::new(&even, &["tau"], functions).expect("valid Shander chart")
}

fn sf(c: &Arc<Chart>, s: &str) -> SuperFunction {
    parse_superfunction(s, c).unwrap_or_else(|e| panic!("bad expression `{s}`: {e}"))
}

/// The metric in local form determined by its reduced data: spatial block
/// `g_ab`, mixed entries `g_ta` and `g_tt`, with `g_τa = -τ g_ta`,
/// `g_τt = -τ g_tt`.
pub fn shander_metric(
    c: &Arc<Chart>,
    spatial_block: &[(&str, &str, &str)],
    time_mixed: &[(&str, &str)],
    g_tt: &str,
) -> SuperMetric {
    let mut entries: Vec<(&str, &str, SuperFunction)> = Vec::new();
    for (a, b, e) in spatial_block {
        entries.push((a, b, sf(c, e)));
    }
    for (a, e) in time_mixed {
        entries.push(("t", a, sf(c, e)));
        entries.push(("tau", a, sf(c, &format!("-tau*({e})"))));
    }
    entries.push(("t", "t", sf(c, g_tt)));
    entries.push(("tau", "t", sf(c, &format!("-tau*({g_tt})"))));
    SuperMetric::from_entries(c, &entries).expect("local-form metric is graded symmetric")
}

/// `Q = ∂_τ + τ∂_t`.
pub fn standard_q(c: &Arc<Chart>) -> VectorField {
    VectorField::from_pairs(c, &[("tau", sf(c, "1")), ("t", sf(c, "tau"))]).expect("Shander chart")
}

/// `P = ∂_t`.
pub fn standard_p(c: &Arc<Chart>) -> VectorField {
    VectorField::basis_named(c, "t").expect("Shander chart")
}

/// `D = ∂_τ - τ∂_t`.
pub fn standard_d(c: &Arc<Chart>) -> VectorField {
    VectorField::from_pairs(c, &[("tau", sf(c, "1")), ("t", sf(c, "-tau"))]).expect("Shander chart")
}

/// `R^{4|1}` with `dx^i⊗dx^j δ_ji + 2 dt⊗dτ τ - dt⊗dt`.
pub fn flat_r41() -> SuperMetric {
    let c = shander_chart(&["x1", "x2", "x3"], vec![]);
    shander_metric(&c, &[("x1", "x1", "1"), ("x2", "x2", "1"), ("x3", "x3", "1")], &[], "-1")
}

/// `R^{1|1}` with `-2 dt⊗dτ τ g_tt + dt⊗dt g_tt`.
pub fn r11(g_tt: &str) -> SuperMetric {
    let c = shander_chart(&[], vec![]);
    shander_metric(&c, &[], &[], g_tt)
}

/// `R^{1|1}` with an opaque nonvanishing `g_tt(t)`.
pub fn r11_opaque() -> SuperMetric {
    let c = shander_chart(&[], vec![FunctionSymbol::new("g", &["t"], true)]);
    shander_metric(&c, &[], &[], "g(t)")
}

/// `dx⊗dx - 2 dt⊗dτ τ + dt⊗dt`.
pub fn r21_nondegenerate() -> SuperMetric {
    let c = shander_chart(&["x"], vec![]);
    shander_metric(&c, &[("x", "x", "1")], &[], "1")
}

/// `dx⊗dx + 2 dx⊗dt - 2 dx⊗dτ τ - 2 dt⊗dτ τ + dt⊗dt`.
pub fn r21_degenerate() -> SuperMetric {
    let c = shander_chart(&["x"], vec![]);
    shander_metric(&c, &[("x", "x", "1")], &[("x", "1")], "1")
}

/// Warped product over Euclidean `R^2` with an opaque nonvanishing `f(x, y)`.
pub fn warped_product() -> SuperMetric {
    let c = shander_chart(&["x", "y"], vec![FunctionSymbol::new("f", &["x", "y"], true)]);
    shander_metric(&c, &[("x", "x", "1"), ("y", "y", "1")], &[], "f(x, y)^2")
}

/// Warped product over Euclidean `R^2` with `f = 1`.
pub fn warped_flat() -> SuperMetric {
    let c = shander_chart(&["x", "y"], vec![]);
    shander_metric(&c, &[("x", "x", "1"), ("y", "y", "1")], &[], "1")
}

/// `R^{1|1}` with `g_tt = 1 + t^2`: not static.
pub fn non_static_n1() -> SuperMetric {
    r11("1 + t^2")
}
