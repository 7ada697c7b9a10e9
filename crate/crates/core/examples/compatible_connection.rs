//! A connection that keeps both Q and g parallel, and what a kernel-valued
//! modification does to its torsion.

use supercarroll::connections::{check_compatibility, make_compatible, AffineConnection};
use supercarroll::grassmann::{parse_superfunction, SuperFunction};
use supercarroll::models::{r21_nondegenerate, standard_p, standard_q};
use supercarroll::superdomain::OneForm;

fn main() {
    let g = r21_nondegenerate();
    let c = g.chart().clone();
    let (q, p) = (standard_q(&c), standard_p(&c));
    let omega = OneForm::coordinate(&c, c.n_even());
    let solve = make_compatible(&AffineConnection::trivial(&c), &g, &q, &omega).unwrap();
    let conn = solve.connection().expect("a solution exists").clone();
    println!("{conn}");
    let report = check_compatibility(&conn, &g, &q).unwrap();
    println!("susy compatible {}, metric compatible {}", report.susy_compatible, report.metric_compatible);
    println!("T(Q, Q) = {}  (-2P = {})", conn.torsion(&q, &q), p.scale(&supercarroll::scalar::ScalarExpr::from_int(-2)));

    // K(d_a, d_b) = k_ab Q, with k_ab of parity a + b + 1
    let n = c.dim();
    let mut k = vec![vec![SuperFunction::zero(&c); n]; n];
    k[c.n_even()][c.n_even()] = parse_superfunction("x*tau", &c).unwrap();
    k[0][c.n_even()] = parse_superfunction("t", &c).unwrap();
    let modified = conn.modified_along(&q, &k).unwrap();
    println!("modified: metric compatible {}, T(Q, Q) = {}", modified.is_metric_compatible(&g), modified.torsion(&q, &q));
}
