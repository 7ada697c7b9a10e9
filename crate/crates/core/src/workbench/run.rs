use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::carrollian::{analyze_even_part, is_static, killing_solver_poly, scarr_algebra, verify_structure, CarrollError};
use crate::connections::{check_compatibility, make_compatible, make_metric_compatible, make_susy_compatible, AffineConnection, MetricSolve};
use crate::contraction::{contracted_bracket_table, rescale, ContractionError, Fate};
use crate::grassmann::{Chart, SuperFunction};
use crate::metric::{schur_analysis, SuperMetric};
use crate::scalar::{FunctionSymbol, ScalarExpr};
use crate::superdomain::{OneForm, VectorField};

use super::report::Report;
use super::spec::{connection_block, parse_connection_block, parse_spec, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Kernel,
    Reduce,
    Killing,
    Scarr,
    Connect,
    VerifyConnection,
    Contract,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Check,
        Command::Kernel,
        Command::Reduce,
        Command::Killing,
        Command::Scarr,
        Command::Connect,
        Command::VerifyConnection,
        Command::Contract,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Kernel => "kernel",
            Command::Reduce => "reduce",
            Command::Killing => "killing",
            Command::Scarr => "scarr",
            Command::Connect => "connect",
            Command::VerifyConnection => "verify-connection",
            Command::Contract => "contract",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Susy,
    Metric,
    #[default]
    Compatible,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "susy" => Ok(Mode::Susy),
            "metric" => Ok(Mode::Metric),
            "compatible" => Ok(Mode::Compatible),
            _ => Err(format!("unknown mode `{s}` (expected susy, metric or compatible)")),
        }
    }
}

/// Where the starting connection comes from.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Seed {
    /// The spec's `CONNECTION` block, or the trivial connection without one.
    #[default]
    Spec,
    Trivial,
    /// Text of a `CONNECTION { ... }` block.
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flags {
    pub degree: u32,
    pub mode: Mode,
    pub seed: Seed,
    pub commute_with: Option<String>,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { degree: 1, mode: Mode::Compatible, seed: Seed::Spec, commute_with: None }
    }
}

/// Parses the spec, runs one command and collects the report. Input
/// errors end up in the report with exit code 2.
pub fn run(command: Command, spec_text: &str, flags: &Flags) -> Report {
    let report = Report::new(command.name());
    let spec = match parse_spec(spec_text) {
        Ok(s) => s,
        Err(e) => return report.fail_input(e.to_string()),
    };
    let model = match spec.model() {
        Ok(m) => m,
        Err(e) => return report.fail_input(e.to_string()),
    };
    let mut report = report;
    report.manifold = Some(spec.name.clone());
    report.line(format!("{command}: {} ({})", spec.name, model.chart.dimension_label()));
    let outcome = match command {
        Command::Check => check(&model, &mut report),
        Command::Kernel => kernel(&model, &mut report),
        Command::Reduce => reduce(&model, &mut report),
        Command::Killing => killing(&model, flags, &mut report),
        Command::Scarr => scarr(&model, flags, &mut report),
        Command::Connect => connect(&model, flags, &mut report),
        Command::VerifyConnection => verify_connection(&model, flags, &mut report),
        Command::Contract => contract(&model, &mut report),
    };
    match outcome {
        Ok(()) => report,
        Err(e) => report.fail_input(e),
    }
}

type Outcome = Result<(), String>;

fn metric(m: &Model) -> Result<&SuperMetric, String> {
    m.metric.as_ref().ok_or_else(|| "the spec has no METRIC block".to_string())
}

fn structure(m: &Model) -> Result<(&VectorField, &VectorField), String> {
    m.structure.as_ref().map(|(q, p)| (q, p)).ok_or_else(|| "the spec has no STRUCTURE block and the chart has no default Q, P".to_string())
}

fn check(m: &Model, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let (q, p) = structure(m)?;
    r.line(format!("Q = {q}"));
    r.line(format!("P = {p}"));
    match verify_structure(g, q, p) {
        Ok(s) => {
            for c in &s.report().checks {
                r.verdict(c.axiom, c.passed, c.detail.clone());
            }
            let w = s.witness();
            r.line(format!("witness: (L_Q g)(Q, d({})) = {} = -2<P|d({})>", w.coordinate, w.lie_derivative, w.coordinate));
            let stat = is_static(&s);
            r.line(format!("super-Carrollian: verified, static: {stat}"));
            r.set("super_carrollian", true);
            r.set("static", stat);
            r.set("witness", json!({ "coordinate": w.coordinate, "value": w.lie_derivative.to_string() }));
        }
        Err(rep) => {
            for c in &rep.checks {
                r.verdict(c.axiom, c.passed, c.detail.clone());
            }
            let failed: Vec<&str> = rep.failures().map(|c| c.axiom).collect();
            r.line(format!("super-Carrollian: not verified (failed: {})", failed.join(", ")));
            r.set("super_carrollian", false);
            r.set("failed_axioms", failed);
            if let Some(k) = rep.kernel_dimension {
                r.set("kernel_dimension", k);
            }
        }
    }
    Ok(())
}

fn kernel(m: &Model, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let k = g.kernel_basis().map_err(|e| e.to_string())?;
    r.line(format!("scalar solution dimension: {}", k.dimension()));
    for (i, x) in k.generators.iter().enumerate() {
        r.line(format!("  K{} = {x}", i + 1));
    }
    r.set("dimension", k.dimension());
    r.set("generators", k.generators.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    if let Some((q, _)) = &m.structure {
        let mut products = serde_json::Map::new();
        for i in 0..m.chart.dim() {
            let name = &m.chart.coord(i).name;
            let v = g.ip(q, &VectorField::basis(&m.chart, i));
            r.line(format!("<Q|d({name})> = {v}"));
            products.insert(name.to_string(), Value::String(v.to_string()));
        }
        r.set("q_inner_products", products);
        let span = k.is_span_of(q);
        r.verdict("ker(g) = span{Q}", span, if span { format!("spanned by Q = {q} over functions") } else { format!("dimension {} is not span{{Q}}", k.dimension()) });
    }
    Ok(())
}

fn reduce(m: &Model, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let gr = g.reduced();
    let s = schur_analysis(&gr);
    r.line(format!("g_red = {gr}"));
    let word = if s.degenerate { "degenerate" } else { "nondegenerate" };
    r.line(format!("det(g_red) = {}, {word}", s.det_total));
    r.line(format!("det(g_ab) = {}", s.det_spatial));
    match &s.schur_scalar {
        Some(sc) => r.line(format!("S = {sc}")),
        None => r.line("S undefined: spatial block is singular"),
    }
    r.verdict("Schur factorization", s.factorization_consistent, format!("det(g_ab)*S = det(g_red) = {}", s.det_total));
    r.set("det", s.det_total.to_string());
    r.set("det_spatial", s.det_spatial.to_string());
    r.set("schur_scalar", s.schur_scalar.as_ref().map(|x| x.to_string()));
    r.set("degenerate", s.degenerate);
    Ok(())
}

/// The even-only chart carrying the reduced metric.
fn reduced_chart(c: &Chart) -> Result<Arc<Chart>, String> {
    let even: Vec<&str> = c.even().iter().map(|s| &*s.name).collect();
    let functions: Vec<FunctionSymbol> = c.functions().iter().map(|f| (**f).clone()).collect();
    Chart::new(&even, &[], functions).map_err(|e| e.to_string())
}

fn reduced_field(m: &Model, name: &str) -> Result<Vec<ScalarExpr>, String> {
    let x = match (m.field(name), &m.structure) {
        (Some(x), _) => x,
        (None, Some((q, p))) if name == "P" || name == "Q" => {
            if name == "P" {
                p
            } else {
                q
            }
        }
        _ => return Err(format!("unknown vector field `{name}`")),
    };
    let n = m.chart.n_even();
    if (n..m.chart.dim()).any(|i| !x.component(i).is_zero()) {
        return Err(format!("`{name}` has odd components and does not live on the reduced manifold"));
    }
    Ok((0..n).map(|i| x.component(i).reduce_eps()).collect())
}

fn killing(m: &Model, flags: &Flags, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let gr = g.reduced();
    let commute = flags.commute_with.as_deref().map(|n| reduced_field(m, n)).transpose()?;
    let basis = killing_solver_poly(&gr, flags.degree, commute.as_deref()).map_err(|e| e.to_string())?;
    let rc = reduced_chart(&m.chart)?;
    let lifted = basis.lift(&rc).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for a in 0..gr.dim() {
        for b in a..gr.dim() {
            entries.push((&*gr.names[a], &*gr.names[b], SuperFunction::scalar(&rc, gr.entries[a][b].clone())));
        }
    }
    let g_red = SuperMetric::from_entries(&rc, &entries).map_err(|e| e.to_string())?;
    let constraint = flags.commute_with.as_ref().map(|n| format!(", commuting with {n}")).unwrap_or_default();
    r.line(format!("polynomial ansatz of degree <= {}{constraint}: dimension {}", flags.degree, basis.dimension()));
    r.line("(complete for flat reduced metrics at degree 1, a lower bound otherwise)");
    for (i, x) in lifted.iter().enumerate() {
        r.line(format!("  K{} = {x}", i + 1));
    }
    let bad: Vec<String> = lifted.iter().enumerate().filter(|(_, x)| !g_red.is_killing(x)).map(|(i, _)| format!("K{}", i + 1)).collect();
    r.verdict("Killing equations", bad.is_empty(), if bad.is_empty() { "L_K g_red = 0 for every basis field".into() } else { format!("fails for {}", bad.join(", ")) });
    r.set("degree", flags.degree);
    r.set("dimension", basis.dimension());
    r.set("fields", lifted.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    Ok(())
}

fn scarr(m: &Model, flags: &Flags, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let (q, p) = structure(m)?;
    let s = match verify_structure(g, q, p) {
        Ok(s) => s,
        Err(rep) => {
            for c in rep.failures() {
                r.verdict(c.axiom, false, c.detail.clone());
            }
            r.line("scarr needs a verified super-Carrollian structure");
            return Ok(());
        }
    };
    let alg = match scarr_algebra(&s, flags.degree) {
        Ok(a) => a,
        Err(e @ CarrollError::ClosureFailure { .. }) | Err(e @ CarrollError::LiftVerificationFailure(_)) => {
            r.verdict("closure", false, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e.to_string()),
    };
    r.line(format!("even dim {}, odd dim {}", alg.dim_even(), alg.dim_odd()));
    r.line(format!("(polynomial Killing ansatz of degree <= {}; complete for flat reduced metrics at degree 1)", flags.degree));
    for (name, x) in alg.names.iter().zip(&alg.basis) {
        r.line(format!("  {name} = {x}"));
    }
    let table = alg.to_string();
    for l in table.lines() {
        r.line(format!("  {l}"));
    }
    r.verdict("closure", alg.verify_closure(), "every bracket lies in the span of the basis");
    r.verdict("graded antisymmetry", alg.graded_antisymmetric(), "[A, B] = -(-1)^{|A||B|} [B, A]");
    let analysis = analyze_even_part(&alg, s.p()).map_err(|e| e.to_string())?;
    r.line(format!(
        "even part: center dim {}{}, derived dim {}{}, constant fields dim {}{}",
        analysis.center_dimension,
        if analysis.center_is_p { " (span{P})" } else { "" },
        analysis.derived_dimension,
        if analysis.derived_is_perfect { " (perfect)" } else { "" },
        analysis.constant_dimension,
        if analysis.constant_is_abelian_ideal { " (abelian ideal)" } else { "" },
    ));
    if analysis.is_e3_plus_u1() {
        r.line("even part is isomorphic to e(3) + u(1)");
    }
    r.set("even_dim", alg.dim_even());
    r.set("odd_dim", alg.dim_odd());
    r.set("static", is_static(&s));
    r.set("basis", alg.names.iter().zip(&alg.basis).map(|(n, x)| json!({ "name": n, "field": x.to_string() })).collect::<Vec<_>>());
    r.set("brackets", table.lines().map(str::to_string).collect::<Vec<_>>());
    r.set(
        "even_part",
        json!({
            "center_dimension": analysis.center_dimension,
            "center_is_p": analysis.center_is_p,
            "derived_dimension": analysis.derived_dimension,
            "derived_is_perfect": analysis.derived_is_perfect,
            "constant_dimension": analysis.constant_dimension,
            "e3_plus_u1": analysis.is_e3_plus_u1(),
        }),
    );
    Ok(())
}

fn seed_connection(m: &Model, seed: &Seed) -> Result<AffineConnection, String> {
    match seed {
        Seed::Spec => Ok(m.connection.clone().unwrap_or_else(|| AffineConnection::trivial(&m.chart))),
        Seed::Trivial => Ok(AffineConnection::trivial(&m.chart)),
        Seed::Text(t) => parse_connection_block(t, &m.chart).map_err(|e| format!("seed: {e}")),
    }
}

/// `ω = dτ` on the sole odd coordinate.
fn odd_form(m: &Model) -> Result<OneForm, String> {
    if m.chart.n_odd() != 1 {
        return Err("connection synthesis needs exactly one odd coordinate".into());
    }
    Ok(OneForm::coordinate(&m.chart, m.chart.n_even()))
}

fn describe_connection(conn: &AffineConnection, g: &SuperMetric, q: &VectorField, p: &VectorField, r: &mut Report) -> Result<(bool, bool), String> {
    let c = conn.chart();
    let block = connection_block(conn);
    for l in block.lines() {
        r.line(l);
    }
    let rep = check_compatibility(conn, g, q).map_err(|e| e.to_string())?;
    let tqq = conn.torsion(q, q);
    let minus_two_p = p.scale(&ScalarExpr::from_int(-2));
    r.line(format!("T(Q, Q) = {}{}", if tqq.is_zero() { "0".to_string() } else { tqq.to_string() }, if tqq == minus_two_p { " = -2P" } else { "" }));
    let mut curvature_on_q = true;
    for a in 0..c.dim() {
        for b in 0..c.dim() {
            let rq = conn.curvature(&VectorField::basis(c, a), &VectorField::basis(c, b), q);
            if !rq.is_zero() {
                curvature_on_q = false;
                r.line(format!("R(d({}), d({}))Q = {rq}", c.coord(a).name, c.coord(b).name));
            }
        }
    }
    if curvature_on_q {
        r.line("R(d(a), d(b))Q = 0 for all a, b");
    }
    for (a, v) in &rep.susy_failures {
        r.line(format!("nabla_d({a}) Q = {v}"));
    }
    for (a, b, k, v) in &rep.metric_failures {
        r.line(format!("(nabla_d({a}) g)(d({b}), d({k})) = {v}"));
    }
    if let Some(ef) = &rep.eigenfunctions {
        let all_zero = ef.iter().all(|(_, f)| f.is_zero());
        if all_zero {
            r.line("f_a = 0 for every coordinate direction");
        } else {
            for (a, f) in ef {
                r.line(format!("f_{a} = {f}"));
            }
        }
        r.set("eigenfunctions", ef.iter().map(|(a, f)| (a.clone(), Value::String(f.to_string()))).collect::<serde_json::Map<_, _>>());
    }
    r.set("connection", block.lines().skip(1).filter(|l| *l != "}").map(|l| l.trim().to_string()).collect::<Vec<_>>());
    r.set("torsion_qq", tqq.to_string());
    r.set("torsion_qq_is_minus_2p", tqq == minus_two_p);
    r.set("curvature_on_q_vanishes", curvature_on_q);
    r.set("susy_compatible", rep.susy_compatible);
    r.set("metric_compatible", rep.metric_compatible);
    Ok((rep.susy_compatible, rep.metric_compatible))
}

fn connect(m: &Model, flags: &Flags, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let (q, p) = structure(m)?;
    let seed = seed_connection(m, &flags.seed)?;
    let omega = odd_form(m)?;
    let solved = |s: MetricSolve, r: &mut Report| -> Option<AffineConnection> {
        match s {
            MetricSolve::Solved { connection, unknowns, equations, free_parameters, .. } => {
                r.line(format!("linear solve: {unknowns} unknowns, {equations} equations, {free_parameters} free parameters set to 0"));
                r.set("free_parameters", free_parameters);
                Some(connection)
            }
            MetricSolve::NoSolution { equations } => {
                r.verdict("metric-compatible", false, format!("no even correction solves the {equations} equations"));
                None
            }
        }
    };
    let conn = match flags.mode {
        Mode::Susy => Some(make_susy_compatible(&seed, q, &omega).map_err(|e| e.to_string())?),
        Mode::Metric => solved(make_metric_compatible(&seed, g, None).map_err(|e| e.to_string())?, r),
        Mode::Compatible => solved(make_compatible(&seed, g, q, &omega).map_err(|e| e.to_string())?, r),
    };
    let Some(conn) = conn else { return Ok(()) };
    let (susy, metric_ok) = describe_connection(&conn, g, q, p, r)?;
    if flags.mode != Mode::Metric {
        r.verdict("susy-compatible", susy, if susy { "nabla Q = 0" } else { "nabla Q != 0" });
    }
    if flags.mode != Mode::Susy {
        r.verdict("metric-compatible", metric_ok, if metric_ok { "nabla g = 0" } else { "nabla g != 0" });
    }
    Ok(())
}

fn verify_connection(m: &Model, flags: &Flags, r: &mut Report) -> Outcome {
    let g = metric(m)?;
    let (q, p) = structure(m)?;
    if flags.seed == Seed::Spec && m.connection.is_none() {
        return Err("no connection given: add a CONNECTION block or pass --seed".into());
    }
    let conn = seed_connection(m, &flags.seed)?;
    let (susy, metric_ok) = describe_connection(&conn, g, q, p, r)?;
    r.verdict("susy-compatible", susy, if susy { "nabla Q = 0" } else { "nabla Q != 0" });
    r.verdict("metric-compatible", metric_ok, if metric_ok { "nabla g = 0" } else { "nabla g != 0" });
    Ok(())
}

fn contract(m: &Model, r: &mut Report) -> Outcome {
    let w = m.contraction.as_ref().ok_or("the spec has no CONTRACTION block")?;
    if m.fields.is_empty() {
        return Err("the spec declares no VF generators".into());
    }
    let families = rescale(&m.fields, &w.coordinates, &w.generators).map_err(|e| e.to_string())?;
    for f in &families {
        r.line(format!("{}(s) = {f}", f.name));
    }
    let c = &m.chart;
    let kept_odd: Vec<&str> = c.odd().iter().map(|s| &*s.name).filter(|n| w.coordinates.get(*n).copied().unwrap_or(0) == 0).collect();
    let dropped: Vec<&str> = c.odd().iter().map(|s| &*s.name).filter(|n| !kept_odd.contains(n)).collect();
    let target = if dropped.is_empty() {
        None
    } else {
        let even: Vec<&str> = c.even().iter().map(|s| &*s.name).collect();
        let functions: Vec<FunctionSymbol> = c.functions().iter().map(|f| (**f).clone()).collect();
        r.line(format!("projection: {} = 0", dropped.join(" = ")));
        Some(Chart::new(&even, &kept_odd, functions).map_err(|e| e.to_string())?)
    };
    let report = match contracted_bracket_table(&families, target.as_ref()) {
        Ok(rep) => rep,
        Err(ContractionError::Diverges { name, power }) => {
            r.verdict("limits exist", false, format!("{name} has a term s^{power}"));
            return Ok(());
        }
        Err(ContractionError::Algebra(e)) => {
            r.verdict("limits exist", true, "no negative powers of s");
            r.verdict("closure", false, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e.to_string()),
    };
    r.verdict("limits exist", true, "no negative powers of s");
    let mut fates = serde_json::Map::new();
    for (name, fate) in &report.fates {
        let (text, value) = match fate {
            Fate::Survives(v) => (format!("survives, {v}"), json!({ "fate": "survives", "limit": v.to_string() })),
            Fate::Vanishes => ("vanishes".to_string(), json!({ "fate": "vanishes" })),
            Fate::Decoupled(v) => (format!("decoupled, limit {v} is zero after projection"), json!({ "fate": "decoupled", "limit": v.to_string() })),
        };
        r.line(format!("{name}: {text}"));
        fates.insert(name.clone(), value);
    }
    let table = report.algebra.to_string();
    r.line("contracted brackets:");
    let names = &report.algebra.names;
    for i in 0..names.len() {
        for j in i..names.len() {
            let c = &report.algebra.constants[i][j];
            r.line(format!("  [{}, {}] = {}", names[i], names[j], {
                let s = crate::carrollian::format_combination(c, names);
                if s.is_empty() {
                    "0".to_string()
                } else {
                    s
                }
            }));
        }
    }
    let unchecked: Vec<String> = report.consistency.iter().filter(|(_, _, checked, _)| !checked).map(|(a, b, _, _)| format!("[{a}, {b}]")).collect();
    let broken: Vec<String> = report.consistency.iter().filter(|(_, _, checked, holds)| *checked && !holds).map(|(a, b, _, _)| format!("[{a}, {b}]")).collect();
    r.verdict(
        "bracket-limit consistency",
        broken.is_empty(),
        if broken.is_empty() { format!("lim [X(s), Y(s)] = [lim X, lim Y] on {} pairs", report.consistency.len() - unchecked.len()) } else { format!("fails for {}", broken.join(", ")) },
    );
    if !unchecked.is_empty() {
        r.line(format!("brackets with negative powers (not compared): {}", unchecked.join(", ")));
    }
    r.verdict("closure", report.algebra.verify_closure(), "survivor brackets lie in their span");
    r.set("fates", fates);
    r.set("survivors", report.survivors());
    r.set("brackets", table.lines().map(str::to_string).collect::<Vec<_>>());
    Ok(())
}
