//! Parsing a spec file, printing it back, and running commands on it.

use supercarroll::workbench::{parse_spec, run, Command, Flags};

const SPEC: &str = "
# R^{2|1} with a Euclidean spatial line
MANIFOLD plane
EVEN x t
ODD tau
METRIC {
  (x, x) = 1
  (t, t) = 1
  (tau, t) = -tau
}
";

fn main() {
    let spec = parse_spec(SPEC).unwrap();
    print!("{spec}");
    for cmd in [Command::Check, Command::Reduce, Command::Scarr, Command::Connect] {
        let report = run(cmd, SPEC, &Flags::default());
        print!("{}", report.human());
        println!("exit {}\n", report.exit_code());
    }
    println!("{}", run(Command::Kernel, SPEC, &Flags::default()).machine_text());
}
