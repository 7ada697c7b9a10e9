use super::*;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

const MINIMAL: &str = "MANIFOLD toy\nEVEN t\nODD tau\nMETRIC {\n  (t, t) = 1;\n  (tau, t) = -tau;\n}\n";

#[test]
fn minimal_spec_gets_default_structure() {
    let spec = parse_spec(MINIMAL).unwrap();
    assert_eq!((spec.even.len(), spec.odd.len()), (1, 1));
    let m = spec.model().unwrap();
    let (q, p) = m.structure.unwrap();
    assert_eq!(q.to_string(), "tau*d(t) + d(tau)");
    assert_eq!(p.to_string(), "d(t)");
}

#[test]
fn mirror_entries_must_agree() {
    let ok = "MANIFOLD m\nEVEN t\nODD tau\nMETRIC { (t, tau) = tau; (tau, t) = tau; }";
    assert!(parse_spec(ok).is_ok());
    let bad = "MANIFOLD m\nEVEN t\nODD tau\nMETRIC { (t, tau) = tau; (tau, t) = -tau; }";
    assert!(matches!(parse_spec(bad), Err(SpecError::SymmetryConflict { .. })));
    let dup = "MANIFOLD m\nEVEN t\nODD tau\nMETRIC { (t, t) = 1; (t, t) = 1; }";
    assert!(matches!(parse_spec(dup), Err(SpecError::SymmetryConflict { .. })));
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_spec("MANIFOLD m\nEVEN t\nMETRIC { (t = 1 }").unwrap_err();
    match err {
        SpecError::Syntax(e) => {
            assert_eq!((e.line, e.col), (3, 13));
            assert_eq!(e.expected, vec!["`,`"]);
        }
        other => panic!("{other:?}"),
    }
    let err = parse_spec("EVEN t").unwrap_err();
    assert!(matches!(err, SpecError::Syntax(ref e) if e.expected == vec!["`MANIFOLD`"]));
}

#[test]
fn names_and_parities_are_checked() {
    let unknown = "MANIFOLD m\nEVEN t\nODD tau\nVF X = d(s)";
    assert!(matches!(parse_spec(unknown), Err(SpecError::UnknownIdentifier { ref name, line: 4, .. }) if name == "s"));
    let unknown_sym = "MANIFOLD m\nEVEN t\nMETRIC { (t, t) = u; }";
    assert!(matches!(parse_spec(unknown_sym), Err(SpecError::UnknownIdentifier { ref name, .. }) if name == "u"));
    let odd_entry = "MANIFOLD m\nEVEN x t\nODD tau\nMETRIC { (x, t) = tau; }";
    assert!(matches!(parse_spec(odd_entry), Err(SpecError::ParityViolation { .. })));
    let mixed = "MANIFOLD m\nEVEN t\nODD tau\nVF X = d(t) + d(tau)";
    assert!(matches!(parse_spec(mixed), Err(SpecError::ParityViolation { .. })));
    let gamma = "MANIFOLD m\nEVEN t\nODD tau\nCONNECTION { Gamma(t; t, tau) = 1; }";
    assert!(matches!(parse_spec(gamma), Err(SpecError::ParityViolation { .. })));
    let func = "MANIFOLD m\nEVEN t\nODD tau\nFUNC f(tau)";
    assert!(matches!(parse_spec(func), Err(SpecError::ParityViolation { .. })));
    let weight = "MANIFOLD m\nEVEN t\nVF P = d(t)\nCONTRACTION { weights: t => c^(1/3); }";
    assert!(matches!(parse_spec(weight), Err(SpecError::Invalid { .. })));
}

#[test]
fn shipped_fixtures_round_trip() {
    for name in [
        "r41.manifold",
        "n1.manifold",
        "r21_nondegenerate.manifold",
        "r21_degenerate.manifold",
        "warped_product.manifold",
        "warped_flat.manifold",
        "non_static_n1.manifold",
        "superspace44.manifold",
        "counterexamples/homological_q.manifold",
        "counterexamples/local_form.manifold",
    ] {
        let a = parse_spec(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = a.to_string();
        let b = parse_spec(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(a, b, "{name}");
        assert_eq!(printed, b.to_string(), "{name}");
    }
}

#[test]
fn vector_field_coefficients_round_trip() {
    let src = "MANIFOLD m\nEVEN x t\nODD tau\nVF X = -(1 + x)*d(x) + (-x)*tau*d(tau) - x/2*d(t)\nVF Z = 0\n";
    let a = parse_spec(src).unwrap();
    let b = parse_spec(&a.to_string()).unwrap();
    assert_eq!(a, b);
    let m = a.model().unwrap();
    assert!(m.field("Z").unwrap().is_zero());
}

#[test]
fn fixture_generators_match_the_gamma_construction() {
    use crate::contraction::{sample_gamma, superspace_generators};
    let m = parse_spec(&fixture("superspace44.manifold")).unwrap().model().unwrap();
    let built = superspace_generators(&m.chart, &sample_gamma(), &["Q1", "Q2", "Q3", "Q"], &["P1", "P2", "P3", "P"]).unwrap();
    for (name, x) in built {
        assert_eq!(m.field(&name).unwrap(), &x, "{name}");
    }
}

#[test]
fn check_verdicts_and_exit_codes() {
    let r = run(Command::Check, &fixture("r41.manifold"), &Flags::default());
    assert_eq!(r.exit_code(), 0, "{}", r.human());
    assert!(r.human().contains("super-Carrollian: verified, static: true"));
    let r = run(Command::Check, &fixture("r21_degenerate.manifold"), &Flags::default());
    assert_eq!(r.exit_code(), 1);
    assert!(!r.verdict_named("ker(g) = span{Q}").unwrap().passed);
    let r = run(Command::Check, "MANIFOLD m\nEVEN t\nMETRIC { (t = 1 }", &Flags::default());
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn machine_block_is_sorted_and_stable() {
    let a = run(Command::Reduce, &fixture("r21_degenerate.manifold"), &Flags::default());
    let b = run(Command::Reduce, &fixture("r21_degenerate.manifold"), &Flags::default());
    assert_eq!(a.machine_text(), b.machine_text());
    let text = a.machine_text();
    let keys: Vec<usize> = ["\"command\"", "\"data\"", "\"error\"", "\"exit_code\"", "\"manifold\"", "\"verdicts\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert!(a.human().contains("det(g_red) = 0, degenerate"));
}

#[test]
fn seed_text_and_modes() {
    let seed = Seed::Text(fixture("r41_tau_tau.connection"));
    let r = run(Command::VerifyConnection, &fixture("r41.manifold"), &Flags { seed, ..Flags::default() });
    assert_eq!(r.exit_code(), 1);
    assert!(!r.verdict_named("susy-compatible").unwrap().passed);
    assert!(!r.verdict_named("metric-compatible").unwrap().passed);
    assert!(r.human().contains("nabla_d(tau) Q = 2*d(t)"), "{}", r.human());
    let r = run(Command::Connect, MINIMAL, &Flags { mode: Mode::Susy, ..Flags::default() });
    assert_eq!(r.exit_code(), 0, "{}", r.human());
    assert!(r.verdict_named("metric-compatible").is_none());
    let r = run(Command::VerifyConnection, MINIMAL, &Flags::default());
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn printed_connection_reparses() {
    let r = run(Command::Connect, &fixture("r21_nondegenerate.manifold"), &Flags::default());
    assert_eq!(r.exit_code(), 0, "{}", r.human());
    let model = parse_spec(&fixture("r21_nondegenerate.manifold")).unwrap().model().unwrap();
    let seed = crate::connections::make_susy_compatible(
        &crate::connections::AffineConnection::trivial(&model.chart),
        &model.structure.as_ref().unwrap().0,
        &crate::superdomain::OneForm::coordinate(&model.chart, 2),
    )
    .unwrap();
    let text = connection_block(&seed);
    assert_eq!(parse_connection_block(&text, &model.chart).unwrap(), seed);
}

#[test]
fn commands_parse_from_names() {
    for c in Command::ALL {
        assert_eq!(c.name().parse::<Command>().unwrap(), c);
    }
    assert!("frobnicate".parse::<Command>().is_err());
}

#[test]
fn newline_separates_entries_ending_in_identifiers() {
    let src = "MANIFOLD m\nEVEN x t\nODD tau\nFUNC f(x)\nMETRIC {\n  (x, x) = x\n  (t, t) = -f(x)\n  (tau, t) = tau*f(x)\n}\n";
    let spec = parse_spec(src).unwrap();
    assert_eq!(spec.metric.as_ref().unwrap().len(), 3);
}

#[test]
fn negative_coefficients_keep_their_sign() {
    let src = "MANIFOLD m\nEVEN x t\nODD tau\nVF X = (-2)*d(x) + (-x)*d(t) - (-1)*tau*d(tau)\n";
    let a = parse_spec(src).unwrap();
    let printed = a.to_string();
    let b = parse_spec(&printed).unwrap();
    assert_eq!(a.model().unwrap().field("X"), b.model().unwrap().field("X"), "{printed}");
    assert_eq!(printed, b.to_string());
}
