//! Kernel of the flat R^{4|1} metric and the reduced-metric determinants.

use supercarroll::metric::schur_analysis;
use supercarroll::models::{flat_r41, r21_degenerate, r21_nondegenerate, standard_q};
use supercarroll::superdomain::VectorField;

fn main() {
    let g = flat_r41();
    let c = g.chart().clone();
    let q = standard_q(&c);
    let k = g.kernel_basis().unwrap();
    println!("kernel solution dimension {}, span of Q: {}", k.dimension(), k.is_span_of(&q));
    for i in 0..c.dim() {
        println!("<Q|d({})> = {}", c.coord(i).name, g.ip(&q, &VectorField::basis(&c, i)));
    }

    for (name, g) in [("flat R^{4|1}", flat_r41()), ("2|1 nondegenerate", r21_nondegenerate()), ("2|1 degenerate", r21_degenerate())] {
        let s = schur_analysis(&g.reduced());
        let schur = s.schur_scalar.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into());
        println!("{name}: det(g_red) = {}, det(g_ab) = {}, S = {schur}", s.det_total, s.det_spatial);
    }

    let k = r21_degenerate().kernel_basis().unwrap();
    println!("2|1 degenerate kernel dimension {}:", k.dimension());
    for x in &k.generators {
        println!("  {x}");
    }
}
