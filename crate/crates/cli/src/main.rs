//! `liegeo`: solve, reduce and classify systems of Lie equations from the command line.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liegeo_core::carrier::DEFAULT_BUDGET;
use liegeo_core::geometry::{self, Dimension, DEFAULT_DECOMPOSE_CAP};
use liegeo_core::logic;
use liegeo_core::reduction::{self, PointSet};
use liegeo_core::terms::Document;
use liegeo_core::{
    parse_document, AlgebraKind, AlgebraicSet, BaseElem, CarrierSpec, CoeffAlgebra, Error, FieldSpec, ModulePresentation, Parallelepipedon, Poly,
    PolyRing, PolySystem, Setting,
};
use report::Report;

#[derive(Parser)]
#[command(name = "liegeo", version, about = "Equational algebraic geometry over free and free metabelian Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the solutions of a system in a window or a parallelepipedon.
    Solve(Common),
    /// Radical of the solution set inside a polynomial window.
    Radical(Common),
    /// Irreducible components of the solution set.
    Decompose(Common),
    /// Reduce a system on a parallelepipedon to polynomials over the ground field.
    Reduce(Common),
    /// Lift polynomials over the ground field to a Lie system on a parallelepipedon.
    Lift(Common),
    /// Whole, bounded or empty, for a one-variable system.
    Classify1(Common),
    /// Check the metabelian axioms on a carrier window.
    Axioms(Common),
    /// Compare radicals over two carriers across a corpus of systems.
    Geoeq(Common),
    /// Dimension of a solution set or of a module extension.
    Dims(Common),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Machine,
}

#[derive(Args, Clone)]
struct Common {
    /// System file; repeat for `geoeq`.
    #[arg(long)]
    system: Vec<PathBuf>,
    /// Field override, e.g. GF(3).
    #[arg(long)]
    field: Option<String>,
    /// Window degree (search degree for classify1).
    #[arg(long)]
    trunc: Option<usize>,
    /// Degree bound of the polynomial window.
    #[arg(long)]
    bound: Option<usize>,
    /// Point budget; defaults to $LIEGEO_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// free | mb | nonqw:<pairs> | abelian:<dim>:<constants> | ext
    #[arg(long)]
    carrier: Option<String>,
    /// Second carrier for `geoeq`.
    #[arg(long)]
    carrier2: Option<String>,
    /// Carrier rank; defaults to the algebra's rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Largest anchor degree tried by `lift`.
    #[arg(long)]
    anchor_cap: Option<usize>,
    /// Polynomial system file: read by `lift`, written by `reduce`.
    #[arg(long)]
    polys: Option<PathBuf>,
    /// Polynomial f(x1..xr) for the Φ'5 family; repeatable.
    #[arg(long)]
    poly: Vec<String>,
}

struct Failure {
    err: Error,
    file: Option<String>,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        Failure { err, file: None }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapacityExceeded { .. } | Error::WindowTooSmall(_) | Error::AnchorDegenerate { .. } | Error::TruncationRequired => 2,
        Error::InvariantViolation(_) => 3,
        _ => 1,
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { err: Error::Unsupported(msg.into()), file: None }
}

fn with_field(text: &str, field: &Option<String>) -> String {
    let Some(f) = field else { return text.to_string() };
    text.lines()
        .map(|l| {
            if l.trim_start().starts_with("algebra") {
                let mut words: Vec<String> =
                    l.split_whitespace().filter(|w| !w.starts_with("field=")).map(str::to_string).collect();
                words.push(format!("field={f}"));
                words.join(" ")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn load(path: &Path, c: &Common) -> Run<Document> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {shown}: {e}")))?;
    parse_document(&with_field(&text, &c.field)).map_err(|err| Failure { err, file: Some(shown) })
}

fn first_doc(c: &Common) -> Run<Document> {
    match c.system.first() {
        Some(p) => load(p, c),
        None => Err(input_error("--system is required")),
    }
}

fn budget(c: &Common) -> Run<u64> {
    if let Some(b) = c.budget {
        return if b == 0 { Err(input_error("--budget must be at least 1")) } else { Ok(b) };
    }
    match std::env::var("LIEGEO_BUDGET") {
        Ok(s) => s.trim().parse::<u64>().ok().filter(|&b| b > 0).ok_or_else(|| input_error(format!("bad LIEGEO_BUDGET `{s}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn module_ring(rank: usize, field: &FieldSpec) -> PolyRing {
    PolyRing::numbered("x", rank, field.base())
}

fn doc_module(doc: &Document, rank: usize) -> Run<Option<ModulePresentation>> {
    let Some((g, cols)) = &doc.module else { return Ok(None) };
    let ring = module_ring(rank, &doc.system.algebra.field);
    let cols: Vec<Vec<&str>> = cols.iter().map(|c| c.iter().map(String::as_str).collect()).collect();
    Ok(Some(ModulePresentation::parse(&ring, *g, &cols)?))
}

fn carrier_spec(text: Option<&str>, algebra: &CoeffAlgebra, rank: Option<usize>, doc: Option<&Document>) -> Run<CarrierSpec> {
    let r = rank.unwrap_or(if algebra.rank > 0 { algebra.rank } else { 2 });
    let text = text.unwrap_or(match algebra.kind {
        AlgebraKind::Metabelian => "mb",
        _ => "free",
    });
    let bad = || input_error(format!("unknown carrier `{text}`"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    Ok(match parts.as_slice() {
        ["free"] => CarrierSpec::Free { rank: r },
        ["mb"] | ["metabelian"] => CarrierSpec::Metabelian { rank: r },
        ["nonqw", p] => CarrierSpec::NonQwComp { pairs: num(p)? },
        ["abelian", d, k] => CarrierSpec::Abelian { dim: num(d)?, constants: num(k)? },
        ["ext"] => {
            let module = doc
                .map(|d| doc_module(d, r))
                .transpose()?
                .flatten()
                .ok_or_else(|| input_error("carrier `ext` needs a module block in the system file"))?;
            CarrierSpec::Extension { rank: r, module }
        }
        _ => return Err(bad()),
    })
}

fn setting_for(doc: &Document, c: &Common, term_degree: usize) -> Run<Setting> {
    let spec = carrier_spec(c.carrier.as_deref(), &doc.system.algebra, c.rank, Some(doc))?;
    Ok(Setting::new(doc.system.algebra.clone(), spec, c.trunc.unwrap_or(3), term_degree.max(1), budget(c)?)?)
}

fn header(r: &mut Report, c: &Common, doc: Option<&Document>) {
    let inputs: Vec<String> = c.system.iter().map(|p| p.display().to_string()).collect();
    r.set("input", inputs);
    if let Some(d) = doc {
        r.set("algebra", d.system.algebra.to_string());
        r.set("variables", d.system.variables.clone());
    }
}

fn bounds(r: &mut Report, setting: &Setting, bound: Option<usize>) {
    let mut m = serde_json::Map::new();
    m.insert("window".into(), setting.window().into());
    m.insert("table_degree".into(), setting.carrier().table_degree().into());
    if let Some(b) = bound {
        m.insert("bound".into(), b.into());
    }
    m.insert("budget".into(), setting.budget().into());
    r.set("bounds", serde_json::Value::Object(m));
    r.set("carrier", setting.describe());
    r.set("regime", setting.regime());
}

fn points_json(setting: &Setting, pts: &[Vec<liegeo_core::FElem>]) -> Vec<String> {
    pts.iter().map(|p| setting.render_point(p)).collect()
}

fn radical_bound(doc: &Document, c: &Common) -> usize {
    c.bound.unwrap_or(doc.system.max_degree().max(2))
}

fn window_solve(doc: &Document, c: &Common) -> Run<AlgebraicSet> {
    let setting = setting_for(doc, c, doc.system.max_degree())?;
    Ok(geometry::solve(&doc.system, &setting)?)
}

fn fmt_coords(a: &[BaseElem]) -> String {
    format!("({})", a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn fmt_lie_point(p: &[liegeo_core::FreeLieElement]) -> String {
    format!("({})", p.iter().map(reduction::render).collect::<Vec<_>>().join(", "))
}

fn cmd_solve(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let mut r = Report::new("solve");
    header(&mut r, c, Some(&doc));
    if !doc.polytope.is_empty() {
        let pp = Parallelepipedon::from_document(&doc)?;
        let b = budget(c)?;
        let sols = reduction::solve_in_polytope(&doc.system, &pp, b)?;
        r.set("regime", "exact: parallelepipedon");
        r.set("parallelepipedon", pp.render());
        r.set("bounds", serde_json::json!({ "budget": b }));
        r.set("count", sols.len());
        let rows: Vec<String> =
            sols.iter().map(|p| Ok(format!("{} <-> {}", fmt_lie_point(p), fmt_coords(&pp.coordinates(p)?)))).collect::<Run<_>>()?;
        r.set("points", rows);
        return Ok(r);
    }
    let y = window_solve(&doc, c)?;
    bounds(&mut r, &y.setting, None);
    r.set("count", y.len());
    r.set("points", points_json(&y.setting, &y.points));
    Ok(r)
}

fn cmd_radical(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let bound = radical_bound(&doc, c);
    let y = window_solve(&doc, c)?;
    let rad = y.radical(bound)?;
    let mut r = Report::new("radical");
    header(&mut r, c, Some(&doc));
    bounds(&mut r, &y.setting, Some(bound));
    r.set("points", y.len());
    r.set("window_dim", rad.window().len());
    r.set("radical_dim", rad.dim());
    r.set("basis", rad.render(&doc.system.variables));
    Ok(r)
}

fn cmd_decompose(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let bound = radical_bound(&doc, c);
    let y = window_solve(&doc, c)?;
    let comps = geometry::decompose(&y, bound, DEFAULT_DECOMPOSE_CAP)?;
    let mut r = Report::new("decompose");
    header(&mut r, c, Some(&doc));
    bounds(&mut r, &y.setting, Some(bound));
    r.set("points", y.len());
    r.set("count", comps.len());
    let items: Vec<serde_json::Value> = comps.iter().map(|k| points_json(&y.setting, k).into()).collect();
    r.set("components", items);
    Ok(r)
}

fn cmd_dims(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let mut r = Report::new("dims");
    header(&mut r, c, Some(&doc));
    let rank = c.rank.unwrap_or(doc.system.algebra.rank.max(1));
    if let Some(m) = doc_module(&doc, rank)? {
        r.set("method", "module rank over the fraction field");
        r.set("module", format!("{} generators, {} relations over {}", m.generators, m.relations.cols(), m.ring));
        r.set("dimension", geometry::dimension_from_module(&m)?.to_string());
        return Ok(r);
    }
    let bound = radical_bound(&doc, c);
    let y = window_solve(&doc, c)?;
    let d = geometry::dimension(&y, bound, DEFAULT_DECOMPOSE_CAP)?;
    bounds(&mut r, &y.setting, Some(bound));
    r.set("method", "longest chain of irreducible algebraic subsets in the window");
    r.set("points", y.len());
    r.set("dimension", match d {
        Dimension::Empty => "empty".to_string(),
        Dimension::Finite(n) => n.to_string(),
    });
    Ok(r)
}

fn polytope(doc: &Document) -> Run<Parallelepipedon> {
    if doc.polytope.is_empty() {
        return Err(input_error("the system file declares no `polytope factor` lines"));
    }
    Ok(Parallelepipedon::from_document(doc)?)
}

fn cmd_reduce(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let pp = polytope(&doc)?;
    let sk = reduction::reduce_system(&doc.system, &pp)?;
    let mut r = Report::new("reduce");
    header(&mut r, c, Some(&doc));
    r.set("parallelepipedon", pp.render());
    r.set("polysystem", sk.render());
    if let Some(p) = &c.polys {
        std::fs::write(p, sk.render()).map_err(|e| input_error(format!("cannot write {}: {e}", p.display())))?;
    }
    if doc.system.field().is_finite() {
        let b = budget(c)?;
        let check = reduction::verify_reduction(&doc.system, &sk, &pp, b)?;
        r.set("verification", serde_json::json!({
            "budget": b,
            "points": check.points,
            "solutions": check.solutions,
            "agree": check.first_mismatch.is_none(),
            "first_mismatch": check.first_mismatch.as_ref().map(|a| fmt_coords(a)),
        }));
        if let Some(a) = check.first_mismatch {
            return Err(Error::InvariantViolation(format!("reduction disagrees at {}", fmt_coords(&a))).into());
        }
    }
    Ok(r)
}

fn cmd_lift(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let pp = polytope(&doc)?;
    let sk = match &c.polys {
        Some(p) => {
            let shown = p.display().to_string();
            let text = std::fs::read_to_string(p).map_err(|e| input_error(format!("cannot read {shown}: {e}")))?;
            PolySystem::parse(&text).map_err(|err| Failure { err, file: Some(shown) })?
        }
        None => {
            let mut s = PolySystem::empty(&pp);
            for (line, text) in &doc.polys {
                let g = Poly::parse(&pp.poly_ring(), text).map_err(|err| Failure {
                    err: match err {
                        Error::SyntaxError { col, expected, .. } => Error::SyntaxError { line: *line, col, expected },
                        e => e,
                    },
                    file: c.system.first().map(|p| p.display().to_string()),
                })?;
                s.push(g);
            }
            s
        }
    };
    let sf = reduction::lift_system(&sk, &pp, c.anchor_cap)?;
    let mut r = Report::new("lift");
    header(&mut r, c, Some(&doc));
    r.set("parallelepipedon", pp.render());
    r.set("anchor_cap", c.anchor_cap);
    r.set("polysystem", sk.render());
    r.set("system", sf.render());
    if doc.system.field().is_finite() {
        let b = budget(c)?;
        let yf = reduction::solve_in_polytope(&sf, &pp, b)?;
        let yk = sk.solve(&pp, b)?;
        let PointSet::Ground(back) = reduction::correspond(&pp, &PointSet::Lie(yf))? else { unreachable!() };
        let agree = back == yk;
        r.set("verification", serde_json::json!({ "budget": b, "ground_solutions": yk.len(), "lie_solutions": back.len(), "agree": agree }));
        if !agree {
            return Err(Error::InvariantViolation("V_F(S_F) does not correspond to V_k(S_k)".into()).into());
        }
    }
    Ok(r)
}

fn cmd_classify(c: &Common) -> Run<Report> {
    let doc = first_doc(c)?;
    let degree = c.trunc.unwrap_or(4);
    let b = budget(c)?;
    let v = reduction::classify_one_variable(&doc.system, degree, b)?;
    let mut r = Report::new("classify1");
    header(&mut r, c, Some(&doc));
    r.set("bounds", serde_json::json!({ "search_degree": degree, "budget": b }));
    r.set("verdict", v.to_string());
    Ok(r)
}

fn axioms_algebra(spec: &CarrierSpec, field: FieldSpec) -> CoeffAlgebra {
    match spec {
        CarrierSpec::Metabelian { rank } | CarrierSpec::Extension { rank, .. } => CoeffAlgebra::new(AlgebraKind::Metabelian, *rank, field),
        CarrierSpec::Free { rank } => CoeffAlgebra::new(AlgebraKind::Free, *rank, field),
        CarrierSpec::NonQwComp { .. } => CoeffAlgebra::new(AlgebraKind::Zero, 0, field),
        CarrierSpec::Abelian { constants, .. } => CoeffAlgebra::new(AlgebraKind::Free, *constants, field),
    }
}

fn cmd_axioms(c: &Common) -> Run<Report> {
    let doc = c.system.first().map(|p| load(p, c)).transpose()?;
    let field: FieldSpec = match (&c.field, &doc) {
        (Some(f), _) => f.parse()?,
        (None, Some(d)) => d.system.algebra.field.clone(),
        (None, None) => FieldSpec::Prime(2),
    };
    let probe = doc.as_ref().map(|d| d.system.algebra.clone()).unwrap_or_else(|| CoeffAlgebra::new(AlgebraKind::Metabelian, c.rank.unwrap_or(2), field.clone()));
    let spec = carrier_spec(Some(c.carrier.as_deref().unwrap_or("mb")), &probe, c.rank, doc.as_ref())?;
    let algebra = match &doc {
        Some(d) => d.system.algebra.clone(),
        None => axioms_algebra(&spec, field.clone()),
    };
    let trunc = c.trunc.unwrap_or(3);
    let setting = Setting::new(algebra.clone(), spec.clone(), trunc, 4, budget(c)?)?;
    let r_dim = c.rank.unwrap_or(algebra.rank.max(1));
    let ring = module_ring(algebra.rank.max(1), &field);
    let mut texts: Vec<String> = c.poly.clone();
    if let Some(d) = &doc {
        texts.extend(d.polys.iter().map(|(_, t)| t.clone()));
    }
    let polys = texts.iter().map(|t| Poly::parse(&ring, t)).collect::<liegeo_core::Result<Vec<_>>>()?;
    let suite = logic::phi_suite(&setting, r_dim, &polys)?;
    let mut r = Report::new("axioms");
    header(&mut r, c, doc.as_ref());
    r.set("algebra", algebra.to_string());
    bounds(&mut r, &setting, None);
    r.set("phi4_r", r_dim);
    let items: Vec<serde_json::Value> = suite
        .iter()
        .map(|a| {
            serde_json::json!({
                "axiom": a.id.to_string(),
                "sentence": a.sentence,
                "holds": a.verdict.holds,
                "witness": a.verdict.witness.as_ref().map(|w| setting.render_point(w)),
                "checked": a.verdict.checked.to_string(),
                "method": a.verdict.method,
                "proviso": a.proviso,
            })
        })
        .collect();
    r.set("all_hold", suite.iter().all(|a| a.verdict.holds));
    r.set("axioms", items);
    Ok(r)
}

fn cmd_geoeq(c: &Common) -> Run<Report> {
    if c.system.is_empty() {
        return Err(input_error("geoeq needs at least one --system"));
    }
    let docs = c.system.iter().map(|p| load(p, c)).collect::<Run<Vec<_>>>()?;
    let algebra = docs[0].system.algebra.clone();
    if docs.iter().any(|d| d.system.algebra != algebra) {
        return Err(Error::AlgebraMismatch("corpus systems use different coefficient algebras".into()).into());
    }
    let term = docs.iter().map(|d| d.system.max_degree()).max().unwrap_or(1).max(1);
    let bound = c.bound.unwrap_or(term.max(2));
    let b = budget(c)?;
    let trunc = c.trunc.unwrap_or(3);
    let s1 = Setting::new(algebra.clone(), carrier_spec(c.carrier.as_deref(), &algebra, c.rank, Some(&docs[0]))?, trunc, term, b)?;
    let second = c.carrier2.as_deref().ok_or_else(|| input_error("geoeq needs --carrier2"))?;
    let s2 = Setting::new(algebra.clone(), carrier_spec(Some(second), &algebra, c.rank, Some(&docs[0]))?, trunc, term, b)?;
    let corpus: Vec<_> = docs.iter().map(|d| d.system.clone()).collect();
    let v = logic::geo_equiv_probe(&s1, &s2, &corpus, bound)?;
    let mut r = Report::new("geoeq");
    header(&mut r, c, Some(&docs[0]));
    r.set("carrier_b", s1.describe());
    r.set("carrier_c", s2.describe());
    r.set("bounds", serde_json::json!({ "window": trunc, "bound": bound, "budget": b }));
    r.set("compared", v.compared);
    r.set("equivalent_on_corpus", v.equivalent);
    r.set("first_divergence", v.first_divergence.map(|i| c.system[i].display().to_string()));
    Ok(r)
}

fn run(cli: &Cli) -> Run<(Report, Common)> {
    let (r, c) = match &cli.command {
        Command::Solve(c) => (cmd_solve(c)?, c),
        Command::Radical(c) => (cmd_radical(c)?, c),
        Command::Decompose(c) => (cmd_decompose(c)?, c),
        Command::Reduce(c) => (cmd_reduce(c)?, c),
        Command::Lift(c) => (cmd_lift(c)?, c),
        Command::Classify1(c) => (cmd_classify(c)?, c),
        Command::Axioms(c) => (cmd_axioms(c)?, c),
        Command::Geoeq(c) => (cmd_geoeq(c)?, c),
        Command::Dims(c) => (cmd_dims(c)?, c),
    };
    Ok((r, c.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((r, c)) => {
            let text = r.render(c.format == Format::Machine);
            match &c.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let anchor = match (&f.file, &f.err) {
                (Some(file), Error::SyntaxError { line, col, .. })
                | (Some(file), Error::UnknownSymbol { line, col, .. })
                | (Some(file), Error::FieldLiteralOutOfRange { line, col, .. }) => format!("{file}:{line}:{col}: "),
                (Some(file), _) => format!("{file}: "),
                _ => String::new(),
            };
            let mut msg = f.err.to_string();
            if let Error::SyntaxError { line, col, .. } | Error::UnknownSymbol { line, col, .. } | Error::FieldLiteralOutOfRange { line, col, .. } = &f.err {
                if f.file.is_some() {
                    let tail = format!(" at line {line}, column {col}");
                    msg = msg.replacen(tail.as_str(), "", 1);
                }
            }
            eprintln!("error: {anchor}{msg}");
            ExitCode::from(exit_code(&f.err))
        }
    }
}
