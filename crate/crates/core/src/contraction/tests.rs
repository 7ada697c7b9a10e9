use super::*;
use crate::grassmann::parse_superfunction;
use crate::models::{standard_p, standard_q};

fn weights(pairs: &[(&str, i32)]) -> BTreeMap<String, i32> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn superspace() -> Arc<Chart> {
    Chart::new(&["x1", "x2", "x3", "t"], &["theta1", "theta2", "theta3", "tau"], vec![]).unwrap()
}

fn generators(c: &Arc<Chart>) -> Vec<(String, VectorField)> {
    superspace_generators(c, &sample_gamma(), &["Q1", "Q2", "Q3", "Q"], &["P1", "P2", "P3", "P"]).unwrap()
}

fn contraction_weights() -> (BTreeMap<String, i32>, BTreeMap<String, i32>) {
    (
        weights(&[("x1", -2), ("x2", -2), ("x3", -2), ("theta1", 1), ("theta2", 1), ("theta3", 1)]),
        weights(&[("Q1", 1), ("Q2", 1), ("Q3", 1), ("P1", 2), ("P2", 2), ("P3", 2)]),
    )
}

#[test]
fn c_powers_become_s_powers() {
    assert_eq!(s_power_from_c(&Rational::new(1.into(), 2.into())).unwrap(), 1);
    assert_eq!(s_power_from_c(&Rational::from_integer((-1).into())).unwrap(), -2);
    assert!(matches!(s_power_from_c(&Rational::new(1.into(), 3.into())), Err(ContractionError::NonIntegerWeight(_))));
}

#[test]
fn identity_weights_leave_families_unchanged() {
    let c = superspace();
    let fams = rescale(&generators(&c), &BTreeMap::new(), &BTreeMap::new()).unwrap();
    for ((_, x), f) in generators(&c).iter().zip(&fams) {
        assert_eq!(f.terms().len(), 1);
        assert_eq!(&f.coefficient(0), x);
    }
}

#[test]
fn simple_limits() {
    let c = Chart::new(&["x"], &[], vec![]).unwrap();
    let dx = VectorField::basis(&c, 0);
    let up = rescale(&[("A".into(), dx.clone())], &BTreeMap::new(), &weights(&[("A", 1)])).unwrap();
    assert_eq!(limit_c_to_zero(&up[0]), Limit::Finite(VectorField::zero(&c)));
    let down = rescale(&[("A".into(), dx)], &BTreeMap::new(), &weights(&[("A", -1)])).unwrap();
    assert_eq!(limit_c_to_zero(&down[0]), Limit::Diverges(-1));
}

#[test]
fn generator_weight_on_translations() {
    let c = superspace();
    let (cw, gw) = contraction_weights();
    let fams = rescale(&generators(&c), &cw, &gw).unwrap();
    let p1 = fams.iter().find(|f| f.name == "P1").unwrap();
    // ∂_{x1} gains s^2 from the substitution and s^2 from the generator weight.
    assert_eq!(p1.terms().keys().copied().collect::<Vec<_>>(), vec![4]);
    let q1 = fams.iter().find(|f| f.name == "Q1").unwrap();
    assert_eq!(q1.coefficient(0), VectorField::basis_named(&c, "theta1").unwrap());
}

#[test]
fn opposite_weights_invert() {
    let c = superspace();
    let (cw, gw) = contraction_weights();
    let neg = |m: &BTreeMap<String, i32>| m.iter().map(|(k, v)| (k.clone(), -v)).collect::<BTreeMap<_, _>>();
    let fams = rescale(&generators(&c), &cw, &gw).unwrap();
    for (f, (name, x)) in fams.iter().zip(generators(&c)) {
        let own = neg(&gw).into_iter().filter(|(k, _)| *k == name).collect();
        let mut back = VectorField::zero(&c);
        for (k, v) in f.terms() {
            let r = rescale(&[(name.clone(), v.clone())], &neg(&cw), &own).unwrap().remove(0);
            assert_eq!(r.terms().keys().copied().collect::<Vec<_>>(), vec![-k]);
            back = &back + &r.coefficient(-k);
        }
        assert_eq!(back, x);
    }
}

#[test]
fn superspace_contracts_to_supertranslations() {
    let c = superspace();
    let (cw, gw) = contraction_weights();
    let fams = rescale(&generators(&c), &cw, &gw).unwrap();
    let target = Chart::new(&["x1", "x2", "x3", "t"], &["tau"], vec![]).unwrap();
    let report = contracted_bracket_table(&fams, Some(&target)).unwrap();
    assert_eq!(report.survivors(), vec!["Q", "P"]);
    for (name, fate) in &report.fates {
        match name.as_str() {
            "Q1" | "Q2" | "Q3" => assert!(matches!(fate, Fate::Decoupled(_))),
            "P1" | "P2" | "P3" => assert_eq!(fate, &Fate::Vanishes),
            "Q" => assert_eq!(fate, &Fate::Survives(standard_q(&target))),
            "P" => assert_eq!(fate, &Fate::Survives(standard_p(&target))),
            _ => unreachable!(),
        }
    }
    assert!(report.consistent());
    assert_eq!(report.algebra.to_string(), "[Q, Q] = 2*P\n");
}

#[test]
fn uncontracted_superalgebra_brackets() {
    let c = superspace();
    let g = generators(&c);
    let find = |n: &str| g.iter().find(|(m, _)| m == n).unwrap().1.clone();
    let q = find("Q");
    let two_p3_p = (&find("P3") + &find("P")).scale(&ScalarExpr::from_int(2));
    assert_eq!(q.bracket(&q), two_p3_p);
    let q1 = find("Q1");
    // Only M_3 and M_t have nonzero diagonal entries.
    assert_eq!(q1.bracket(&q1), two_p3_p);
}

#[test]
fn toy_input_is_already_contracted() {
    let c = Chart::new(&["t"], &["tau"], vec![]).unwrap();
    let fams = rescale(&[("Q".into(), standard_q(&c)), ("P".into(), standard_p(&c))], &BTreeMap::new(), &BTreeMap::new()).unwrap();
    let report = contracted_bracket_table(&fams, None).unwrap();
    assert_eq!(report.algebra.to_string(), "[Q, Q] = 2*P\n");
}

#[test]
fn commuting_translations_stay_abelian() {
    let c = Chart::new(&["x", "y"], &[], vec![]).unwrap();
    let fields = vec![("A".to_string(), VectorField::basis(&c, 0)), ("B".to_string(), VectorField::basis(&c, 1))];
    let fams = rescale(&fields, &weights(&[("x", 3)]), &weights(&[("A", 3), ("B", 0)])).unwrap();
    let report = contracted_bracket_table(&fams, None).unwrap();
    assert_eq!(report.algebra.to_string(), "");
    assert_eq!(report.survivors(), vec!["A", "B"]);
}

#[test]
fn asymmetric_gamma_is_rejected() {
    let mut g = sample_gamma();
    g[0][0][1] = Rational::from_integer(5.into());
    assert!(matches!(superspace_generators(&superspace(), &g, &["a", "b", "c", "d"], &["e", "f", "g", "h"]), Err(ContractionError::InvalidGamma(_))));
}

#[test]
fn rational_coefficients_with_rescaled_denominators_are_rejected() {
    let c = Chart::with_nonvanishing(&["x"], &[], vec![], &["x"]).unwrap();
    let v = VectorField::from_pairs(&c, &[("x", parse_superfunction("1/x", &c).unwrap())]).unwrap();
    assert!(matches!(rescale(&[("A".into(), v)], &weights(&[("x", 1)]), &BTreeMap::new()), Err(ContractionError::NotLaurent(_))));
}
