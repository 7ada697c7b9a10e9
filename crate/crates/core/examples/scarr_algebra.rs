//! Killing fields of the reduced metric and the automorphism superalgebra
//! of flat R^{4|1}.

use supercarroll::carrollian::{analyze_even_part, killing_solver_poly, scarr_algebra, verify_structure};
use supercarroll::models::{flat_r41, non_static_n1, standard_p, standard_q};

fn main() {
    let g = flat_r41();
    let c = g.chart().clone();
    let k = killing_solver_poly(&g.reduced(), 1, None).unwrap();
    println!("Killing fields of Minkowski space at degree 1: {}", k.dimension());

    let s = verify_structure(&g, &standard_q(&c), &standard_p(&c)).unwrap();
    let alg = scarr_algebra(&s, 1).unwrap();
    println!("scarr: even {} | odd {}", alg.dim_even(), alg.dim_odd());
    print!("{alg}");
    let a = analyze_even_part(&alg, s.p()).unwrap();
    println!("even part is e(3) + u(1): {}", a.is_e3_plus_u1());

    let g = non_static_n1();
    let c = g.chart().clone();
    let s = verify_structure(&g, &standard_q(&c), &standard_p(&c)).unwrap();
    let alg = scarr_algebra(&s, 1).unwrap();
    println!("non-static case: even {} | odd {}", alg.dim_even(), alg.dim_odd());
}
