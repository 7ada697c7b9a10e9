//! Axiom checks for super-Carrollian structures and the Q-not-Killing witness.

use supercarroll::carrollian::{is_static, verify_structure};
use supercarroll::models::*;

fn main() {
    let cases = [
        ("flat R^{4|1}", flat_r41()),
        ("R^{1|1}, g_tt = g(t)", r11_opaque()),
        ("warped product", warped_product()),
        ("g_tt = 1 + t^2", non_static_n1()),
        ("2|1 degenerate", r21_degenerate()),
    ];
    for (name, g) in cases {
        let c = g.chart().clone();
        match verify_structure(&g, &standard_q(&c), &standard_p(&c)) {
            Ok(s) => {
                let w = s.witness();
                println!("{name}: verified, static {}; (L_Q g)(Q, d({})) = {}", is_static(&s), w.coordinate, w.lie_derivative);
            }
            Err(report) => {
                println!("{name}: rejected");
                for f in report.failures() {
                    println!("  {}: {}", f.axiom, f.detail);
                }
            }
        }
    }
}
