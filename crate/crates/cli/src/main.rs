//! `gpcheck`: batch front end over a workspace file.
//!
//! Exit codes: 0 for a positive answer (satisfied, applicable, accepted,
//! holds), 1 for a negative one, 2 for errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gpcheck::condition::Condition;
use gpcheck::hoare::{check_proof_with, verify_triple_on, ImplicationVerdict, Oracle, ProofReport, TripleVerdict};
use gpcheck::interpreter::{Interpreter, Program};
use gpcheck::mso::{mso_satisfies, normalize, to_condition, to_formula, Formula};
use gpcheck::rewrite::derive_all;
use gpcheck::satisfy::{explain, graph_satisfies, Witness};
use gpcheck::text::{print_condition, Workspace};
use gpcheck::wlp::{applicability, precondition_traced, TraceEvent, TraceKind};
use gpcheck::{Error, Graph};

#[derive(Parser)]
#[command(name = "gpcheck", version, about = "Check graph programs against nested graph conditions")]
struct Cli {
    /// Largest number of nodes of the graphs implications and triples are checked on.
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Largest number of configurations an interpreter run may explore.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Show witnesses for satisfied conditions and provenance of generated disjuncts.
    #[arg(long, global = true)]
    witness: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    MsoToCond,
    CondToMso,
}

#[derive(Subcommand)]
enum Command {
    /// Does a graph satisfy a constraint?
    Sat { workspace: PathBuf, graph: String, condition: String },
    /// All graphs obtained by one application of a rule, up to isomorphism.
    Apply { workspace: PathBuf, rule: String, graph: String },
    /// Run a program on a graph.
    Run { workspace: PathBuf, program: String, graph: String },
    /// Weakest liberal precondition of a rule for a constraint.
    Wlp { workspace: PathBuf, rule: String, condition: String },
    /// Applicability constraint of a rule set.
    App {
        workspace: PathBuf,
        #[arg(required = true)]
        rules: Vec<String>,
    },
    /// Check a proof script.
    Prove { workspace: PathBuf, proof: String },
    /// Translate between formulas and constraints.
    Translate {
        workspace: PathBuf,
        #[arg(value_enum)]
        direction: Direction,
        name: String,
    },
    /// Normal form of a constraint.
    Normalize { workspace: PathBuf, condition: String },
    /// Test a triple on all small graphs satisfying its precondition.
    CheckTriple { workspace: PathBuf, pre: String, program: String, post: String },
}

/// What a command produced: a verdict, text lines and a structured record.
struct Outcome {
    positive: bool,
    text: String,
    data: Value,
}

const DEFAULT_BOUND: usize = 4;
const DEFAULT_BUDGET: usize = 10_000;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let mut stdout = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => write!(stdout, "{}", out.text),
                Format::Structured => writeln!(stdout, "{}", serde_json::to_string_pretty(&out.data).expect("json")),
            };
            if out.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Structured => {
                    let _ = writeln!(std::io::stdout(), "{}", json!({ "error": e.to_string() }));
                }
            }
            ExitCode::from(2)
        }
    }
}

struct Ctx {
    ws: Workspace,
    bound: usize,
    budget: usize,
    witness: bool,
}

impl Ctx {
    fn graph(&self, arg: &str) -> Result<Arc<Graph>, Error> {
        if arg.trim_start().starts_with('{') {
            self.ws.parse_graph(arg)
        } else {
            self.ws.graph(arg).cloned()
        }
    }

    /// A named constraint or an inline one.
    fn constraint(&self, arg: &str) -> Result<Condition, Error> {
        match self.ws.condition(arg) {
            Ok(r) if r.context.is_empty() => Ok(r.condition.clone()),
            Ok(_) => Err(Error::InvalidCondition(format!("`{arg}` is not a constraint"))),
            Err(e) if is_identifier(arg) => Err(e),
            Err(_) => self.ws.parse_condition(arg, &Arc::new(Graph::empty())),
        }
    }

    fn program(&self, arg: &str) -> Result<Arc<Program>, Error> {
        match self.ws.program(arg) {
            Ok(p) => Ok(p),
            Err(e) if is_identifier(arg) => Err(e),
            Err(_) => self.ws.parse_program(arg),
        }
    }

    fn oracle(&self) -> Oracle {
        Oracle::new(self.bound, &self.ws.alphabet)
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let path = match &cli.command {
        Command::Sat { workspace, .. }
        | Command::Apply { workspace, .. }
        | Command::Run { workspace, .. }
        | Command::Wlp { workspace, .. }
        | Command::App { workspace, .. }
        | Command::Prove { workspace, .. }
        | Command::Translate { workspace, .. }
        | Command::Normalize { workspace, .. }
        | Command::CheckTriple { workspace, .. } => workspace,
    };
    let ws = Workspace::load(path)?;
    let ctx = Ctx {
        bound: cli.bound.or(ws.bound).unwrap_or(DEFAULT_BOUND),
        budget: cli.budget.or(ws.budget).unwrap_or(DEFAULT_BUDGET),
        witness: cli.witness,
        ws,
    };
    match &cli.command {
        Command::Sat { graph, condition, .. } => sat(&ctx, graph, condition),
        Command::Apply { rule, graph, .. } => apply(&ctx, rule, graph),
        Command::Run { program, graph, .. } => run(&ctx, program, graph),
        Command::Wlp { rule, condition, .. } => wlp(&ctx, rule, condition),
        Command::App { rules, .. } => app(&ctx, rules),
        Command::Prove { proof, .. } => prove(&ctx, proof),
        Command::Translate { direction, name, .. } => translate(&ctx, *direction, name),
        Command::Normalize { condition, .. } => normal_form(&ctx, condition),
        Command::CheckTriple { pre, program, post, .. } => check_triple(&ctx, pre, program, post),
    }
}

fn graph_json(g: &Graph) -> Value {
    let node = |i: usize| g.node(i).id.to_string();
    let mut source = Map::new();
    let mut target = Map::new();
    let mut labels = Map::new();
    for n in g.nodes() {
        labels.insert(n.id.to_string(), json!(n.label.to_string()));
    }
    for e in g.edges() {
        source.insert(e.id.to_string(), json!(node(e.source)));
        target.insert(e.id.to_string(), json!(node(e.target)));
        labels.insert(e.id.to_string(), json!(e.label.to_string()));
    }
    json!({
        "nodes": g.nodes().iter().map(|n| n.id.to_string()).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| e.id.to_string()).collect::<Vec<_>>(),
        "source": source,
        "target": target,
        "labels": labels,
    })
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Holds => json!({ "holds": true }),
        Witness::Set { var, members, then } => json!({
            "set": var.to_string(),
            "members": members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "then": witness_json(then),
        }),
        Witness::Match { assignment, then } => json!({
            "match": assignment.iter().map(|(a, b)| (a.to_string(), json!(b.to_string()))).collect::<Map<_, _>>(),
            "then": witness_json(then),
        }),
        Witness::All(ws) => json!({ "all": ws.iter().map(witness_json).collect::<Vec<_>>() }),
        Witness::Branch { index, then } => json!({ "branch": index, "then": witness_json(then) }),
    }
}

fn witness_text(w: &Witness, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    match w {
        Witness::Holds => {}
        Witness::Set { var, members, then } => {
            let ms: Vec<String> = members.iter().map(|m| m.to_string()).collect();
            out.push_str(&format!("{pad}{var} = {{{}}}\n", ms.join(", ")));
            witness_text(then, depth + 1, out);
        }
        Witness::Match { assignment, then } => {
            let ms: Vec<String> = assignment.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
            out.push_str(&format!("{pad}match {}\n", ms.join(", ")));
            witness_text(then, depth + 1, out);
        }
        Witness::All(ws) => {
            for w in ws {
                witness_text(w, depth, out);
            }
        }
        Witness::Branch { index, then } => {
            out.push_str(&format!("{pad}disjunct {index}\n"));
            witness_text(then, depth + 1, out);
        }
    }
}

fn sat(ctx: &Ctx, graph: &str, condition: &str) -> Result<Outcome, Error> {
    let g = ctx.graph(graph)?;
    let c = ctx.constraint(condition)?;
    let holds = graph_satisfies(&g, &c)?;
    let mut text = format!("{holds}\n");
    let mut data = json!({ "command": "sat", "satisfied": holds });
    if ctx.witness && holds {
        if let Some(w) = explain(&g, &c)? {
            witness_text(&w, 0, &mut text);
            data["witness"] = witness_json(&w);
        }
    }
    Ok(Outcome { positive: holds, text, data })
}

fn graphs_text(gs: &[Arc<Graph>]) -> String {
    gs.iter().map(|g| format!("{g}\n")).collect()
}

fn apply(ctx: &Ctx, rule: &str, graph: &str) -> Result<Outcome, Error> {
    let r = ctx.ws.rule(rule)?.clone();
    let g = ctx.graph(graph)?;
    let results = derive_all(&[r], &g)?;
    let text = if results.is_empty() { "not applicable\n".to_string() } else { graphs_text(&results) };
    Ok(Outcome {
        positive: !results.is_empty(),
        text,
        data: json!({ "command": "apply", "results": results.iter().map(|h| graph_json(h)).collect::<Vec<_>>() }),
    })
}

fn run(ctx: &Ctx, program: &str, graph: &str) -> Result<Outcome, Error> {
    let p = ctx.program(program)?;
    let g = ctx.graph(graph)?;
    let mut it = Interpreter::new(ctx.budget);
    let rs = it.run(&p, &g)?;
    let results: Vec<Arc<Graph>> = rs.graphs().cloned().collect();
    let mut text = graphs_text(&results);
    if rs.fail {
        text.push_str("fail\n");
    }
    if rs.diverges {
        text.push_str("diverges\n");
    }
    if it.exhausted() {
        text.push_str(&format!("budget of {} exhausted, results may be incomplete\n", ctx.budget));
    }
    Ok(Outcome {
        positive: !results.is_empty(),
        text,
        data: json!({
            "command": "run",
            "results": results.iter().map(|h| graph_json(h)).collect::<Vec<_>>(),
            "fail": rs.fail,
            "diverges": rs.diverges,
            "budget_exhausted": it.exhausted(),
        }),
    })
}

fn trace_json(ev: &TraceEvent) -> Value {
    match &ev.kind {
        TraceKind::Overlap { index, count, object } => json!({ "depth": ev.depth, "overlap": index + 1, "of": count, "graph": graph_json(object) }),
        TraceKind::Membership { var, members } => json!({
            "depth": ev.depth,
            "set": var.to_string(),
            "gains": members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        }),
        TraceKind::NoComplement { object } => json!({ "depth": ev.depth, "no_complement": graph_json(object) }),
    }
}

fn wlp(ctx: &Ctx, rule: &str, condition: &str) -> Result<Outcome, Error> {
    let r = ctx.ws.rule(rule)?.clone();
    let c = ctx.constraint(condition)?;
    let traced = precondition_traced(&r, &c, &ctx.ws.alphabet)?;
    let app = applicability(std::slice::from_ref(&r), &ctx.ws.alphabet)?;
    let w = gpcheck::simplify::simplify(&Condition::Or(vec![traced.condition.clone(), Condition::not(app.clone())]));
    let (pre_s, app_s, wlp_s) = (print_condition(&traced.condition)?, print_condition(&app)?, print_condition(&w)?);
    let mut text = format!("Pre: {pre_s}\nApp: {app_s}\nwlp: {wlp_s}\n");
    if ctx.witness {
        text.push_str("provenance:\n");
        for ev in &traced.trace {
            text.push_str(&format!("  {ev}\n"));
        }
    }
    Ok(Outcome {
        positive: true,
        text,
        data: json!({
            "command": "wlp",
            "pre": pre_s,
            "app": app_s,
            "wlp": wlp_s,
            "provenance": traced.trace.iter().map(trace_json).collect::<Vec<_>>(),
        }),
    })
}

fn app(ctx: &Ctx, rules: &[String]) -> Result<Outcome, Error> {
    let rs = rules.iter().map(|n| ctx.ws.rule(n).cloned()).collect::<Result<Vec<_>, _>>()?;
    let s = print_condition(&applicability(&rs, &ctx.ws.alphabet)?)?;
    Ok(Outcome {
        positive: true,
        text: format!("{s}\n"),
        data: json!({ "command": "app", "app": s }),
    })
}

fn verdict_json(v: &ImplicationVerdict) -> Value {
    match v {
        ImplicationVerdict::BoundedValid { bound, graphs } => json!({ "verdict": "bounded-valid", "bound": bound, "graphs": graphs }),
        ImplicationVerdict::Counterexample(g) => json!({ "verdict": "counterexample", "graph": graph_json(g) }),
        ImplicationVerdict::Assumed(a) => json!({ "verdict": "assumed", "axiom": a }),
    }
}

fn report_json(r: &ProofReport) -> Value {
    json!({
        "command": "prove",
        "accepted": r.accepted,
        "bound": r.bound,
        "assumed": r.assumed,
        "nodes": r.nodes.iter().map(|n| json!({
            "path": n.path,
            "rule": n.kind,
            "program": n.program,
            "error": n.error,
            "implications": n.implications.iter().map(|(what, v)| {
                let mut o = verdict_json(v);
                o["obligation"] = json!(what);
                o
            }).collect::<Vec<_>>(),
            "notes": n.notes,
        })).collect::<Vec<_>>(),
    })
}

fn prove(ctx: &Ctx, proof: &str) -> Result<Outcome, Error> {
    let t = ctx.ws.proof(proof)?;
    let report = check_proof_with(t, &ctx.oracle(), &ctx.ws.axioms)?;
    Ok(Outcome {
        positive: report.accepted,
        text: report.to_string(),
        data: report_json(&report),
    })
}

/// Compares a formula and a constraint on every graph of the oracle universe.
fn agreement(oracle: &Oracle, f: &Formula, c: &Condition) -> Result<Option<Arc<Graph>>, Error> {
    for g in oracle.graphs() {
        if mso_satisfies(g, f)? != graph_satisfies(g, c)? {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

fn translate(ctx: &Ctx, direction: Direction, name: &str) -> Result<Outcome, Error> {
    let oracle = ctx.oracle();
    let (kind, output, disagreement) = match direction {
        Direction::MsoToCond => {
            let f = ctx.ws.formula(name)?;
            let c = gpcheck::simplify::simplify(&to_condition(f, &ctx.ws.alphabet)?);
            ("condition", print_condition(&c)?, agreement(&oracle, f, &c)?)
        }
        Direction::CondToMso => {
            let c = ctx.constraint(name)?;
            let f = to_formula(&c, &ctx.ws.alphabet)?;
            ("formula", f.to_string(), agreement(&oracle, &f, &c)?)
        }
    };
    let mut text = format!("{output}\n");
    match &disagreement {
        None => text.push_str(&format!("agrees with the source on {} graphs with at most {} nodes\n", oracle.graphs().len(), ctx.bound)),
        Some(g) => text.push_str(&format!("disagrees with the source on {g}\n")),
    }
    Ok(Outcome {
        positive: disagreement.is_none(),
        text,
        data: json!({
            "command": "translate",
            kind: output,
            "checked_graphs": oracle.graphs().len(),
            "bound": ctx.bound,
            "disagreement": disagreement.as_deref().map(graph_json),
        }),
    })
}

fn normal_form(ctx: &Ctx, condition: &str) -> Result<Outcome, Error> {
    let c = ctx.constraint(condition)?;
    let s = print_condition(&normalize(&c, &ctx.ws.alphabet)?)?;
    Ok(Outcome {
        positive: true,
        text: format!("{s}\n"),
        data: json!({ "command": "normalize", "normal_form": s }),
    })
}

fn check_triple(ctx: &Ctx, pre: &str, program: &str, post: &str) -> Result<Outcome, Error> {
    let (c, p, d) = (ctx.constraint(pre)?, ctx.program(program)?, ctx.constraint(post)?);
    let v = verify_triple_on(&c, &p, &d, &ctx.oracle(), ctx.budget)?;
    let data = match &v {
        TripleVerdict::Holds { inputs, budget_exhausted } => json!({
            "command": "check-triple",
            "holds": true,
            "inputs": inputs,
            "budget_exhausted": budget_exhausted,
            "bound": ctx.bound,
        }),
        TripleVerdict::Counterexample { input, output } => json!({
            "command": "check-triple",
            "holds": false,
            "input": graph_json(input),
            "output": graph_json(output),
            "bound": ctx.bound,
        }),
    };
    Ok(Outcome {
        positive: v.holds(),
        text: format!("{v}\n"),
        data,
    })
}
