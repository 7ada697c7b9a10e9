//! The odd generator Q, its square, and a change of coordinates.

use supercarroll::grassmann::parse_superfunction;
use supercarroll::models::{r11, shander_chart, standard_d, standard_p, standard_q};
use supercarroll::superdomain::CoordinateMap;

fn main() {
    let c = shander_chart(&["x"], vec![]);
    let (q, p, d) = (standard_q(&c), standard_p(&c), standard_d(&c));
    println!("Q = {q}");
    println!("[Q, Q] = {}", q.bracket(&q));
    println!("[P, Q] = {}", p.bracket(&q));
    println!("[D, D] = {}", d.bracket(&d));
    println!("[D, Q] = {}", d.bracket(&q));
    println!("Q(x*t*tau) = {}", q.apply(&parse_superfunction("x*t*tau", &c).unwrap()));

    // t' = 2t on R^{1|1}
    let g = r11("1");
    let src = g.chart().clone();
    let dst = supercarroll::grassmann::Chart::new(&["s"], &["sigma"], vec![]).unwrap();
    let map = CoordinateMap::parse(&src, &dst, &["2*t", "tau"], &["s/2", "sigma"]).unwrap();
    let h = map.transform_tensor2(g.tensor()).unwrap();
    println!("g in (s, sigma): g_ss = {}, g_s sigma = {}", h.entry(0, 0), h.entry(0, 1));
}
