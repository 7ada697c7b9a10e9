//! Contracting the R^{4|4} superspace generators down to the supertranslations
//! generated by Q = d(tau) + tau*d(t) and P = d(t).

use std::collections::BTreeMap;

use supercarroll::contraction::{contracted_bracket_table, rescale, sample_gamma, superspace_generators, Fate};
use supercarroll::grassmann::Chart;

fn main() {
    let c = Chart::new(&["x1", "x2", "x3", "t"], &["theta1", "theta2", "theta3", "tau"], vec![]).unwrap();
    let fields = superspace_generators(&c, &sample_gamma(), &["Q1", "Q2", "Q3", "Q"], &["P1", "P2", "P3", "P"]).unwrap();
    let w = |pairs: &[(&str, i32)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>();
    let coords = w(&[("x1", -2), ("x2", -2), ("x3", -2), ("theta1", 1), ("theta2", 1), ("theta3", 1)]);
    let gens = w(&[("Q1", 1), ("Q2", 1), ("Q3", 1), ("P1", 2), ("P2", 2), ("P3", 2)]);
    let families = rescale(&fields, &coords, &gens).unwrap();
    let target = Chart::new(&["x1", "x2", "x3", "t"], &["tau"], vec![]).unwrap();
    let report = contracted_bracket_table(&families, Some(&target)).unwrap();
    for (name, fate) in &report.fates {
        match fate {
            Fate::Survives(v) => println!("{name} -> {v}"),
            Fate::Vanishes => println!("{name} -> 0"),
            Fate::Decoupled(v) => println!("{name} -> {v} (decoupled)"),
        }
    }
    print!("{}", report.algebra);
    println!("bracket and limit commute: {}", report.consistent());
}
