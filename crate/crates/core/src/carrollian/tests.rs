use std::sync::Arc;

use super::*;
use crate::grassmann::{parse_superfunction, Chart};
use crate::metric::ReducedMetric;
use crate::models::*;

fn structure(g: SuperMetric) -> SuperCarrollStructure {
    let c = g.chart().clone();
    verify_structure(&g, &standard_q(&c), &standard_p(&c)).unwrap_or_else(|r| panic!("{r}"))
}

fn diag(names: &[&str], d: &[i64]) -> ReducedMetric {
    let n = names.len();
    ReducedMetric {
        names: names.iter().map(|s| Arc::from(*s)).collect(),
        entries: (0..n).map(|i| (0..n).map(|j| if i == j { ScalarExpr::from_int(d[i]) } else { ScalarExpr::zero() }).collect()).collect(),
    }
}

#[test]
fn example_structures_verify() {
    for g in [flat_r41(), r11("1"), r11_opaque(), r21_nondegenerate(), warped_product(), warped_flat(), non_static_n1()] {
        let s = structure(g);
        let w = s.witness();
        assert!(!w.lie_derivative.is_zero());
        assert_eq!(w.lie_derivative, w.minus_two_p);
    }
}

#[test]
fn degenerate_reduction_is_rejected() {
    let g = r21_degenerate();
    let c = g.chart().clone();
    let report = verify_structure(&g, &standard_q(&c), &standard_p(&c)).unwrap_err();
    let failed: Vec<_> = report.failures().map(|f| f.axiom).collect();
    assert_eq!(failed, vec!["ker(g) = span{Q}"]);
    assert_eq!(report.kernel_dimension, Some(4));
}

#[test]
fn homological_q_is_rejected() {
    let g = flat_r41();
    let c = g.chart().clone();
    let q = VectorField::basis_named(&c, "tau").unwrap();
    let p = VectorField::zero(&c);
    let report = verify_structure(&g, &q, &p).unwrap_err();
    let failed: Vec<_> = report.failures().map(|f| f.axiom).collect();
    assert!(failed.contains(&"P nowhere vanishing"));
    assert!(failed.contains(&"Shander normal form of Q"));
}

#[test]
fn static_classification() {
    assert!(is_static(&structure(flat_r41())));
    assert!(is_static(&structure(warped_product())));
    assert!(!is_static(&structure(non_static_n1())));
}

#[test]
fn killing_dimensions() {
    assert_eq!(killing_solver_poly(&diag(&["x", "y"], &[1, 1]), 1, None).unwrap().dimension(), 3);
    let mink = diag(&["x1", "x2", "x3", "t"], &[1, 1, 1, -1]);
    assert_eq!(killing_solver_poly(&mink, 1, None).unwrap().dimension(), 10);
    let dt = [ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::one()];
    assert_eq!(killing_solver_poly(&mink, 1, Some(&dt)).unwrap().dimension(), 7);
    // Degree 2 adds nothing for flat metrics.
    assert_eq!(killing_solver_poly(&mink, 2, None).unwrap().dimension(), 10);
}

#[test]
fn killing_fields_satisfy_the_equations() {
    let mink = diag(&["x", "t"], &[1, -1]);
    let c = Chart::new(&["x", "t"], &[], vec![]).unwrap();
    let one = crate::grassmann::SuperFunction::one(&c);
    let g = SuperMetric::from_entries(&c, &[("x", "x", one.clone()), ("t", "t", one.neg_ref())]).unwrap();
    for x in killing_solver_poly(&mink, 1, None).unwrap().lift(&c).unwrap() {
        assert!(g.is_killing(&x));
    }
}

#[test]
fn degenerate_reduced_metric_still_solves() {
    let gr = r21_degenerate().reduced();
    let k = killing_solver_poly(&gr, 1, None).unwrap();
    assert!(k.dimension() > 3);
}

#[test]
fn opaque_coefficients_are_unsupported() {
    let gr = warped_product().reduced();
    assert!(matches!(killing_solver_poly(&gr, 1, None), Err(CarrollError::UnsupportedCoefficients(_))));
}

#[test]
fn scarr_of_flat_superspace() {
    let s = structure(flat_r41());
    let alg = scarr_algebra(&s, 1).unwrap();
    assert_eq!((alg.dim_even(), alg.dim_odd()), (7, 1));
    assert!(alg.verify_closure());
    assert!(alg.graded_antisymmetric());
    let (d, p) = (alg.index_of("D").unwrap(), alg.index_of("P").unwrap());
    let mut expected = vec![Rational::zero(); alg.dim()];
    expected[p] = Rational::from_integer((-2).into());
    assert_eq!(alg.constants[d][d], expected);
    let analysis = analyze_even_part(&alg, s.p()).unwrap();
    assert!(analysis.is_e3_plus_u1(), "{analysis:?}");
    assert_eq!(analysis.constant_dimension, 4);
    assert!(supertranslation_check(&s).unwrap());
}

#[test]
fn scarr_of_non_static_has_no_odd_part() {
    let s = structure(non_static_n1());
    let alg = scarr_algebra(&s, 1).unwrap();
    assert_eq!(alg.dim_odd(), 0);
    assert!(matches!(supertranslation_check(&s), Err(CarrollError::NotStatic(_))));
}

#[test]
fn scarr_of_warped_flat_product() {
    let s = structure(warped_flat());
    let alg = scarr_algebra(&s, 1).unwrap();
    assert_eq!((alg.dim_even(), alg.dim_odd()), (4, 1));
    for x in &alg.basis {
        let pq = x.bracket(s.q()).bracket(s.q());
        assert!(pq.is_zero());
        assert!(x.bracket(s.p()).is_zero());
    }
}

#[test]
fn r11_supertranslations() {
    let s = structure(r11("1"));
    assert!(supertranslation_check(&s).unwrap());
    let alg = scarr_algebra(&s, 1).unwrap();
    assert_eq!((alg.dim_even(), alg.dim_odd()), (1, 1));
    assert_eq!(alg.to_string(), "[D, D] = -2*P\n");
}

#[test]
fn closure_failure_is_reported() {
    let c = Chart::new(&["x"], &[], vec![]).unwrap();
    let f = |s: &str| parse_superfunction(s, &c).unwrap();
    let a = VectorField::from_pairs(&c, &[("x", f("1"))]).unwrap();
    let b = VectorField::from_pairs(&c, &[("x", f("x^2"))]).unwrap();
    let err = LieSuperAlgebraPresentation::from_fields(vec![("A".into(), a), ("B".into(), b)]).unwrap_err();
    assert!(matches!(err, CarrollError::ClosureFailure { .. }));
}
