//! Command-line workbench: build models and algebras, run decision
//! queries, execute verification suites, emit JSON reports on standard
//! output (human-readable notes go to standard error).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use treeba_core::algebra::{realize_with_budget, CanonicalAlgebra, Element};
use treeba_core::builders::{
    build_ba, build_ptr, build_tr, build_tr_h, build_tr_h_e, build_tr_h_g, build_trr,
};
use treeba_core::chains::longest_chain_in_algebra;
use treeba_core::closed_form::{closed_form_zero_ptr, closed_form_zero_tr};
use treeba_core::combine::{run_schedule, BuilderTag, ElementSelector, ScheduleStep};
use treeba_core::index_model::{
    format_model, parse_model, EquivProfile, IndexModel, IndexNode, Level,
};
use treeba_core::perfect_tree::{build_family, verify_family};
use treeba_core::rigidity::{trr_quotient_index, Ideal};
use treeba_core::suites::{point_algebra, run_suite, SUITE_NAMES};
use treeba_core::term::{parse_term, GeneratorId, Presentation, Term};

#[derive(Parser)]
#[command(name = "treeba", about = "Workbench for finitely presented Boolean algebras over tree index models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Generator budget for realizing presentations.
    #[arg(long, global = true, default_value_t = 24)]
    budget_generators: usize,
    /// Seed for the randomized parts of the batteries.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report to a file as well as standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuilderArgs {
    /// Which presentation builder to apply: tr, ptr, trh, trr, trhg, trhe, ba.
    #[arg(long, default_value = "tr")]
    builder: String,
    /// Cover bounds for the trhg builder, comma separated per level.
    #[arg(long)]
    g: Option<String>,
    /// Equivalence profile for the trhe builder: e0, e1 or e2.
    #[arg(long, default_value = "e1")]
    e: String,
    /// Atom count of the base algebra for the ba builder.
    #[arg(long, default_value_t = 1)]
    base_atoms: usize,
    /// Disjoint-sequence selectors for the ba builder (repeatable).
    #[arg(long = "a")]
    a_selectors: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a presentation from a model file and realize it.
    Build {
        model: PathBuf,
        #[command(flatten)]
        builder: BuilderArgs,
        /// Also dump the presentation text.
        #[arg(long)]
        dump: bool,
    },
    /// Decide a query against the realized algebra of a model.
    Check {
        model: PathBuf,
        #[command(flatten)]
        builder: BuilderArgs,
        /// zero, leq, eq or independence.
        #[arg(long)]
        query: String,
        /// Terms in prefix syntax (repeatable; zero takes one, leq/eq two).
        #[arg(long = "term")]
        terms: Vec<String>,
        /// Generators checked for independence, `;`-separated atoms.
        #[arg(long)]
        x: Option<String>,
        /// Generators spanning the side conditions, `;`-separated atoms.
        #[arg(long)]
        over: Option<String>,
        /// Exception relations (terms equal to zero, repeatable).
        #[arg(long = "exception")]
        exceptions: Vec<String>,
        /// Also evaluate the applicable closed form and insist it agrees.
        #[arg(long)]
        oracle_and_closed_form: bool,
    },
    /// Report structural statistics of a model file.
    Stats { model: PathBuf },
    /// One surgery step on atom-partition algebras.
    Surgery {
        #[arg(long, default_value_t = 2)]
        b1_atoms: usize,
        #[arg(long)]
        a_star: String,
        #[arg(long, default_value_t = 2)]
        b_atoms: usize,
    },
    /// Fold a schedule file of surgeries.
    Schedule {
        schedule: PathBuf,
        #[arg(long, default_value_t = 1)]
        b0_atoms: usize,
    },
    /// Quotient normal form of a sequence-tree presentation.
    Quotient {
        model: PathBuf,
        /// Ideal generator selectors (repeatable).
        #[arg(long = "ideal")]
        ideals: Vec<String>,
    },
    /// Build and verify a perfect-tree family.
    Trees {
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Run a named verification battery.
    Suite { name: String },
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((report, ok)) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable report");
            println!("{}", text);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("could not write report: {}", e);
                    return ExitCode::from(2);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("report contains failures");
                ExitCode::FAILURE
            }
        }
        Err(CliError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Value, bool), CliError> {
    match &cli.command {
        Command::Build { model, builder, dump } => cmd_build(cli, model, builder, *dump),
        Command::Check {
            model,
            builder,
            query,
            terms,
            x,
            over,
            exceptions,
            oracle_and_closed_form,
        } => cmd_check(cli, model, builder, query, terms, x, over, exceptions, *oracle_and_closed_form),
        Command::Stats { model } => cmd_stats(cli, model),
        Command::Surgery { b1_atoms, a_star, b_atoms } => cmd_surgery(cli, *b1_atoms, a_star, *b_atoms),
        Command::Schedule { schedule, b0_atoms } => cmd_schedule(cli, schedule, *b0_atoms),
        Command::Quotient { model, ideals } => cmd_quotient(cli, model, ideals),
        Command::Trees { depth } => cmd_trees(cli, *depth),
        Command::Suite { name } => cmd_suite(cli, name),
    }
}

fn load_model(path: &Path) -> Result<IndexModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
    Ok(parse_model(&text)?)
}

fn parse_selector(alg: &CanonicalAlgebra, text: &str) -> Result<Element, CliError> {
    if let Some(k) = text.strip_prefix("atom:") {
        let k: usize = k.parse().map_err(|_| CliError(format!("bad atom index {:?}", k)))?;
        if k >= alg.n_points() {
            return Err(CliError(format!("atom {} out of range", k)));
        }
        return Ok(alg.element_from_points(&[k]));
    }
    if let Some(body) = text.strip_prefix("elem:") {
        let body = body.trim_start_matches('{').trim_end_matches('}');
        let mut idx = Vec::new();
        for part in body.split(',').filter(|s| !s.trim().is_empty()) {
            let i: usize =
                part.trim().parse().map_err(|_| CliError(format!("bad point index {:?}", part)))?;
            if i >= alg.n_points() {
                return Err(CliError(format!("point {} out of range", i)));
            }
            idx.push(i);
        }
        return Ok(alg.element_from_points(&idx));
    }
    Err(CliError(format!("unknown selector {:?}; use atom:<k> or elem:{{..}}", text)))
}

fn build_presentation(
    model: &IndexModel,
    args: &BuilderArgs,
) -> Result<Presentation, CliError> {
    Ok(match args.builder.as_str() {
        "tr" => build_tr(model)?,
        "ptr" => build_ptr(model)?,
        "trh" => build_tr_h(model)?,
        "trr" => build_trr(model)?,
        "trhg" => {
            let g: Vec<u32> = match &args.g {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError("bad --g list".into()))?,
                None => model.profile().arities().to_vec(),
            };
            build_tr_h_g(model, &g)?
        }
        "trhe" => {
            let e = match args.e.as_str() {
                "e0" => EquivProfile::singletons(model.profile()),
                "e1" => EquivProfile::windows(model.profile()),
                "e2" => EquivProfile::halves(model.profile()),
                other => return Err(CliError(format!("unknown profile {:?}", other))),
            };
            build_tr_h_e(model, &e)?
        }
        "ba" => {
            let base = point_algebra(args.base_atoms);
            let seq: Vec<Element> = args
                .a_selectors
                .iter()
                .map(|s| parse_selector(&base, s))
                .collect::<Result<_, _>>()?;
            build_ba(&base, &seq, model)?
        }
        other => return Err(CliError(format!("unknown builder {:?}", other))),
    })
}

fn cardinality_string(alg: &CanonicalAlgebra) -> String {
    if alg.n_points() < 127 {
        alg.cardinality().to_string()
    } else {
        format!("2^{}", alg.n_points())
    }
}

fn cmd_build(
    cli: &Cli,
    model_path: &Path,
    args: &BuilderArgs,
    dump: bool,
) -> Result<(Value, bool), CliError> {
    let model = load_model(model_path)?;
    let pres = build_presentation(&model, args)?;
    let alg = realize_with_budget(&pres, cli.budget_generators)?;
    eprintln!(
        "built {} over {} nodes: {} points",
        args.builder,
        model.len(),
        alg.n_points()
    );
    let mut report = json!({
        "seed": cli.seed,
        "builder": args.builder,
        "model_nodes": model.len(),
        "generators": pres.generators().len(),
        "relations": pres.relations().len(),
        "points": alg.n_points(),
        "cardinality": cardinality_string(&alg),
        "atoms": alg.atoms().len(),
        "length": longest_chain_in_algebra(&alg),
    });
    if dump {
        report["presentation"] = Value::String(pres.dump());
    }
    Ok((report, true))
}

/// A meet of signed node generators, when the term has that shape.
fn literal_pattern(term: &Term) -> Option<(Vec<IndexNode>, Vec<IndexNode>)> {
    fn walk(t: &Term, pos: &mut Vec<IndexNode>, neg: &mut Vec<IndexNode>) -> bool {
        match t {
            Term::Meet(a, b) => walk(a, pos, neg) && walk(b, pos, neg),
            Term::Gen(GeneratorId::Node(n)) => {
                pos.push(n.clone());
                true
            }
            Term::Not(inner) => match inner.as_ref() {
                Term::Gen(GeneratorId::Node(n)) => {
                    neg.push(n.clone());
                    true
                }
                _ => false,
            },
            _ => false,
        }
    }
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    walk(term, &mut pos, &mut neg).then_some((pos, neg))
}

fn parse_generator_list(text: &str) -> Result<Vec<GeneratorId>, CliError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match parse_term(s.trim())? {
            Term::Gen(g) => Ok(g),
            other => Err(CliError(format!("expected a generator atom, got {}", other))),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    cli: &Cli,
    model_path: &Path,
    args: &BuilderArgs,
    query: &str,
    terms: &[String],
    x: &Option<String>,
    over: &Option<String>,
    exceptions: &[String],
    oracle_and_closed_form: bool,
) -> Result<(Value, bool), CliError> {
    let model = load_model(model_path)?;
    let pres = build_presentation(&model, args)?;
    let alg = realize_with_budget(&pres, cli.budget_generators)?;
    let parsed: Vec<Term> =
        terms.iter().map(|t| parse_term(t)).collect::<Result<_, _>>()?;
    let witness_json = |witness: &[(GeneratorId, bool)]| {
        Value::Array(
            witness
                .iter()
                .map(|(g, v)| json!({ "generator": g.to_string(), "value": v }))
                .collect(),
        )
    };
    let mut report = json!({ "seed": cli.seed, "query": query });
    match query {
        "zero" => {
            let [term] = parsed.as_slice() else {
                return Err(CliError("zero takes exactly one --term".into()));
            };
            let verdict = alg.is_zero(term)?;
            report["zero"] = Value::Bool(verdict);
            if !verdict {
                let witness = alg.witness(term)?.expect("non-zero terms have witnesses");
                report["witness"] = witness_json(&witness);
            }
            if oracle_and_closed_form {
                let Some((pos, neg)) = literal_pattern(term) else {
                    return Err(CliError(
                        "closed forms apply to meets of signed node generators only".into(),
                    ));
                };
                let closed = match args.builder.as_str() {
                    "tr" => closed_form_zero_tr(&model, &pos, &neg)?,
                    "ptr" => closed_form_zero_ptr(&model, &pos, &neg)?,
                    other => {
                        return Err(CliError(format!("no closed form for builder {:?}", other)))
                    }
                };
                report["closed_form"] = Value::Bool(closed);
                report["agreement"] = Value::Bool(closed == verdict);
                if closed != verdict {
                    eprintln!("closed form and point oracle disagree");
                    return Ok((report, false));
                }
            }
        }
        "leq" | "eq" => {
            let [s, t] = parsed.as_slice() else {
                return Err(CliError(format!("{} takes exactly two --term flags", query)));
            };
            let verdict = if query == "leq" { alg.leq(s, t)? } else { alg.eq(s, t)? };
            report[query] = Value::Bool(verdict);
            if !verdict {
                let gap = if query == "leq" {
                    Term::meet(s.clone(), Term::not(t.clone()))
                } else {
                    Term::join(
                        Term::meet(s.clone(), Term::not(t.clone())),
                        Term::meet(t.clone(), Term::not(s.clone())),
                    )
                };
                if let Some(witness) = alg.witness(&gap)? {
                    report["witness"] = witness_json(&witness);
                }
            }
        }
        "independence" => {
            let x = parse_generator_list(x.as_deref().unwrap_or(""))?;
            let over = parse_generator_list(over.as_deref().unwrap_or(""))?;
            let exc: Vec<Term> =
                exceptions.iter().map(|t| parse_term(t)).collect::<Result<_, _>>()?;
            let verdict = treeba_core::algebra::independence_check(&alg, &x, &over, &exc, 20)?;
            report["independent"] = Value::Bool(verdict);
        }
        other => return Err(CliError(format!("unknown query {:?}", other))),
    }
    Ok((report, true))
}

fn cmd_stats(cli: &Cli, model_path: &Path) -> Result<(Value, bool), CliError> {
    let model = load_model(model_path)?;
    let mut level_counts: Vec<usize> = vec![0; model.profile().depth() + 1];
    let mut branches = 0usize;
    for node in model.nodes() {
        match node.level() {
            Level::Finite(n) => level_counts[n] += 1,
            Level::Top => branches += 1,
        }
    }
    let report = json!({
        "seed": cli.seed,
        "nodes": model.len(),
        "branches": branches,
        "per_level": level_counts,
        "profile": model.profile().arities(),
        "universe": model.j_size(),
        "text": format_model(&model),
    });
    Ok((report, true))
}

fn cmd_surgery(
    cli: &Cli,
    b1_atoms: usize,
    a_star: &str,
    b_atoms: usize,
) -> Result<(Value, bool), CliError> {
    let b1 = point_algebra(b1_atoms);
    let b = point_algebra(b_atoms);
    let a = parse_selector(&b1, a_star)?;
    let (b2, emb) = treeba_core::combine::surgery(&b1, &a, &b)?;
    let expected = (b1.n_points() - a.count()) + a.count() * b.n_points();
    let report = json!({
        "seed": cli.seed,
        "carved": a.to_string(),
        "carved_points": a.count(),
        "result_points": b2.n_points(),
        "expected_points": expected,
        "embedding_injective": emb.is_injective(),
    });
    let ok = emb.is_injective() && b2.n_points() == expected;
    Ok((report, ok))
}

fn cmd_schedule(cli: &Cli, schedule_path: &Path, b0_atoms: usize) -> Result<(Value, bool), CliError> {
    let text = std::fs::read_to_string(schedule_path)
        .map_err(|e| CliError(format!("{}: {}", schedule_path.display(), e)))?;
    let dir = schedule_path.parent().unwrap_or(Path::new("."));
    let mut steps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [model_file, selector, tag] = parts.as_slice() else {
            return Err(CliError(format!(
                "line {}: expected `<model-file> <selector> <builder>`",
                lineno + 1
            )));
        };
        let model = load_model(&dir.join(model_file))?;
        let selector = parse_schedule_selector(selector)?;
        let builder = parse_builder_tag(tag, &model)?;
        steps.push(ScheduleStep { model, selector, builder });
    }
    let seed_alg = point_algebra(b0_atoms);
    let run = run_schedule(&seed_alg, &steps)?;
    let stages: Vec<Value> = run
        .stages
        .iter()
        .map(|s| json!({ "points": s.n_points(), "cardinality": cardinality_string(s) }))
        .collect();
    let ok = run.embeddings.iter().all(|m| m.is_injective());
    let report = json!({
        "seed": cli.seed,
        "steps": steps.len(),
        "stages": stages,
        "embeddings_injective": ok,
    });
    Ok((report, ok))
}

fn parse_schedule_selector(text: &str) -> Result<ElementSelector, CliError> {
    if let Some(k) = text.strip_prefix("atom:") {
        return Ok(ElementSelector::Atom(
            k.parse().map_err(|_| CliError(format!("bad atom index {:?}", k)))?,
        ));
    }
    if let Some(body) = text.strip_prefix("elem:") {
        let body = body.trim_start_matches('{').trim_end_matches('}');
        let idx: Result<Vec<usize>, _> = body
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse())
            .collect();
        return Ok(ElementSelector::Points(
            idx.map_err(|_| CliError("bad point list".into()))?,
        ));
    }
    if let Some(i) = text.strip_prefix("complement-of-stage:") {
        return Ok(ElementSelector::ComplementOfStage(
            i.parse().map_err(|_| CliError(format!("bad stage index {:?}", i)))?,
        ));
    }
    Err(CliError(format!("unknown selector {:?}", text)))
}

fn parse_builder_tag(tag: &str, model: &IndexModel) -> Result<BuilderTag, CliError> {
    Ok(match tag {
        "tr" => BuilderTag::Tr,
        "ptr" => BuilderTag::Ptr,
        "trh" => BuilderTag::TrH,
        "trr" => BuilderTag::Trr,
        "ba" => BuilderTag::Ba,
        "trhg" => BuilderTag::TrHG(model.profile().arities().to_vec()),
        "trhe" => BuilderTag::TrHE(EquivProfile::windows(model.profile())),
        other => {
            if let Some(list) = other.strip_prefix("trhg:") {
                let g: Vec<u32> = list
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError("bad trhg bounds".into()))?;
                BuilderTag::TrHG(g)
            } else if let Some(name) = other.strip_prefix("trhe:") {
                let e = match name {
                    "e0" => EquivProfile::singletons(model.profile()),
                    "e1" => EquivProfile::windows(model.profile()),
                    "e2" => EquivProfile::halves(model.profile()),
                    _ => return Err(CliError(format!("unknown profile {:?}", name))),
                };
                BuilderTag::TrHE(e)
            } else {
                return Err(CliError(format!("unknown builder tag {:?}", other)));
            }
        }
    })
}

fn cmd_quotient(cli: &Cli, model_path: &Path, ideals: &[String]) -> Result<(Value, bool), CliError> {
    let model = load_model(model_path)?;
    let pres = build_trr(&model)?;
    let alg = realize_with_budget(&pres, cli.budget_generators)?;
    let generators: Vec<Element> = ideals
        .iter()
        .map(|s| parse_selector(&alg, s))
        .collect::<Result<_, _>>()?;
    let ideal = Ideal::new(&alg, generators);
    let support = ideal.support().to_string();
    let out = trr_quotient_index(&model, &alg, &ideal)?;
    let report = json!({
        "seed": cli.seed,
        "ideal_support": support,
        "improper": out.improper,
        "surviving_index": out
            .index_seqs
            .iter()
            .map(|s| IndexNode::from_seq(s).to_string())
            .collect::<Vec<_>>(),
        "index_model": out.model.as_ref().map(format_model),
        "companion_points": out.companion.as_ref().map(CanonicalAlgebra::n_points),
        "isomorphism_found": out.iso.is_some() || out.improper,
    });
    Ok((report, true))
}

fn cmd_trees(cli: &Cli, depth: usize) -> Result<(Value, bool), CliError> {
    let fam = build_family(depth)?;
    let verdict = verify_family(&fam);
    for p in &verdict.properties {
        eprintln!("{}: {}", p.name, if p.pass { "pass" } else { "FAIL" });
    }
    let ok = verdict.all_pass();
    let report = json!({
        "seed": cli.seed,
        "family": fam.to_json(),
        "verdict": serde_json::to_value(&verdict).expect("serializable verdict"),
    });
    Ok((report, ok))
}

fn cmd_suite(cli: &Cli, name: &str) -> Result<(Value, bool), CliError> {
    if !SUITE_NAMES.contains(&name) {
        return Err(CliError(format!(
            "unknown suite {:?}; available: {}",
            name,
            SUITE_NAMES.join(", ")
        )));
    }
    let report = run_suite(name, cli.seed).expect("name checked above");
    for c in &report.criteria {
        eprintln!(
            "{}: {} [{} ms] {}",
            c.name,
            if c.pass { "pass" } else { "FAIL" },
            c.millis,
            c.detail
        );
    }
    let ok = report.all_pass();
    Ok((serde_json::to_value(&report).expect("serializable report"), ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_parsing() {
        let alg = point_algebra(3);
        assert_eq!(parse_selector(&alg, "atom:1").unwrap().count(), 1);
        assert_eq!(parse_selector(&alg, "elem:{0,2}").unwrap().count(), 2);
        assert!(parse_selector(&alg, "atom:9").is_err());
        assert!(parse_selector(&alg, "wat").is_err());
    }

    #[test]
    fn literal_pattern_extraction() {
        let t = parse_term("(and x:0 (not x:1))").unwrap();
        let (pos, neg) = literal_pattern(&t).unwrap();
        assert_eq!(pos.len(), 1);
        assert_eq!(neg.len(), 1);
        assert!(literal_pattern(&parse_term("(or x:0 x:1)").unwrap()).is_none());
    }

    #[test]
    fn generator_lists() {
        let gens = parse_generator_list("x:0; a:2").unwrap();
        assert_eq!(gens.len(), 2);
        assert!(parse_generator_list("(and x:0 x:1)").is_err());
    }
}
