//! Exact rational functions: canonical forms, formal derivatives and a
//! linear solve over the function field.

use supercarroll::scalar::{normalize, solve_linear_system, FunctionSymbol, RawExpr, ScalarContext, ScalarExpr};

fn main() {
    let ctx = ScalarContext::new(&["x", "t"]).with_function(FunctionSymbol::new("f", &["x"], true));
    let parse = |s: &str| normalize(&RawExpr::parse(s).unwrap(), &ctx).unwrap();

    let a = parse("(x^2*f(x) + x*f(x))/f(x)");
    println!("(x^2*f(x) + x*f(x))/f(x) = {a}");
    let rejected = normalize(&RawExpr::parse("1/(x - t)").unwrap(), &ctx);
    println!("1/(x - t): {rejected:?}");
    println!("is zero: {}", parse("(x + t)^2 - x^2 - 2*x*t - t^2").is_zero());

    let g = parse("f(x)^2*t");
    println!("D(f(x)^2*t, x) = {}", g.diff("x"));
    println!("1/f(x) is allowed: {}", parse("1/f(x)"));

    // x*u0 + u1 = 1, u0 - t*u1 = 0
    let u = |i| ScalarExpr::unknown(i);
    let one = ScalarExpr::one();
    let eqs = vec![
        ScalarExpr::coord("x").mul_ref(&u(0)).add_ref(&u(1)).sub_ref(&one),
        u(0).sub_ref(&ScalarExpr::coord("t").mul_ref(&u(1))),
    ];
    let sol = solve_linear_system(&eqs, 2).unwrap();
    for (i, v) in sol.particular().unwrap().iter().enumerate() {
        println!("u{i} = {v}");
    }
}
