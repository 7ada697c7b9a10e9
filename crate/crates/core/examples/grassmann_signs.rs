//! Superfunctions on a chart with three odd coordinates.

use supercarroll::grassmann::{parse_superfunction, Chart};

fn main() {
    let c = Chart::new(&["x", "t"], &["theta1", "theta2", "tau"], vec![]).unwrap();
    let f = |s: &str| parse_superfunction(s, &c).unwrap();

    println!("tau*tau = {}", f("tau*tau"));
    println!("theta2*theta1 = {}", f("theta2*theta1"));
    println!("(1 + tau)*(1 - tau) = {}", f("(1 + tau)*(1 - tau)"));

    let h = f("x*theta2*theta1 + t*tau");
    println!("h = {h}");
    println!("d/dtheta1 h = {}", h.odd_partial("theta1").unwrap());
    println!("d/dtau h = {}", h.odd_partial("tau").unwrap());
    println!("body of 5 + x*tau = {}", f("5 + x*tau").reduce_eps());
    println!("parity of theta1*theta2*tau: {:?}", f("theta1*theta2*tau").parity());
}
