//! Proof trees for partial-correctness triples `{c} P {d}`.
//!
//! Trees are supplied by the user and checked rule by rule. Side conditions
//! of `[cons]` are implications between constraints; they are discharged by
//! searching all small graphs for a counterexample, or taken from trusted
//! axioms.

use std::fmt;
use std::sync::Arc;

use crate::condition::Condition;
use crate::error::Result;
use crate::graph::{Alphabet, Graph};
use crate::interpreter::{Interpreter, Program};
use crate::par::{self, Strategy};
use crate::rewrite::Rule;
use crate::satisfy::graph_satisfies;
use crate::simplify::simplify;
use crate::universe::{enumerate_with, UniverseSpec};
use crate::wlp::{applicability, precondition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub pre: Condition,
    pub program: Arc<Program>,
    pub post: Condition,
}

/// The inference rule concluding a node, with its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// `{Pre(r,c) ∨ ¬App({r})} r {c}`, or one of its two disjuncts alone.
    RuleApp,
    /// One premise per rule of the set, in order.
    RuleSet(Vec<ProofTree>),
    /// `{c} P {e}` and `{e} Q {d}`.
    Comp(Box<ProofTree>, Box<ProofTree>),
    /// `{inv} ℛ {inv}` concluding `{inv} ℛ! {inv ∧ ¬App(ℛ)}`.
    Bang(Box<ProofTree>),
    /// `{c′} P {d′}` with side conditions `c ⇒ c′` and `d′ ⇒ d`.
    Cons(Box<ProofTree>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub triple: Triple,
    pub step: Step,
}

impl ProofTree {
    pub fn new(pre: Condition, program: Arc<Program>, post: Condition, step: Step) -> Self {
        ProofTree {
            triple: Triple { pre, program, post },
            step,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.step {
            Step::RuleApp => "ruleapp",
            Step::RuleSet(_) => "ruleset",
            Step::Comp(..) => "comp",
            Step::Bang(_) => "bang",
            Step::Cons(_) => "cons",
        }
    }

    pub fn children(&self) -> Vec<&ProofTree> {
        match &self.step {
            Step::RuleApp => Vec::new(),
            Step::RuleSet(ts) => ts.iter().collect(),
            Step::Comp(a, b) => vec![a, b],
            Step::Bang(t) | Step::Cons(t) => vec![t],
        }
    }
}

/// A trusted implication `antecedent ⇒ consequent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub antecedent: Condition,
    pub consequent: Condition,
}

/// How an implication between constraints was settled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImplicationVerdict {
    /// No counterexample among all graphs with at most `bound` nodes.
    BoundedValid { bound: usize, graphs: usize },
    /// A graph satisfying the antecedent but not the consequent.
    Counterexample(Arc<Graph>),
    /// Taken from the named axiom.
    Assumed(String),
}

impl ImplicationVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, ImplicationVerdict::Counterexample(_))
    }
}

impl fmt::Display for ImplicationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImplicationVerdict::BoundedValid { bound, graphs } => write!(f, "bounded-valid (up to {bound} nodes, {graphs} graphs)"),
            ImplicationVerdict::Counterexample(g) => write!(f, "counterexample {g}"),
            ImplicationVerdict::Assumed(name) => write!(f, "assumed (axiom {name})"),
        }
    }
}

/// The graphs implications are checked on: every graph over the alphabet with
/// at most `bound` nodes and at most one edge per source, target and label,
/// loops included, one per isomorphism class.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub bound: usize,
    pub alphabet: Alphabet,
    graphs: Vec<Arc<Graph>>,
    strategy: Strategy,
}

impl Oracle {
    pub fn new(bound: usize, alphabet: &Alphabet) -> Self {
        Oracle::with_strategy(bound, alphabet, Strategy::default())
    }

    pub fn with_strategy(bound: usize, alphabet: &Alphabet, strategy: Strategy) -> Self {
        let spec = UniverseSpec::simple(bound, true).with_alphabet(alphabet.clone());
        Oracle {
            bound,
            alphabet: alphabet.clone(),
            graphs: enumerate_with(&spec, strategy),
            strategy,
        }
    }

    pub fn graphs(&self) -> &[Arc<Graph>] {
        &self.graphs
    }

    /// Searches for a graph satisfying `c` but not `d`; the smallest is reported.
    pub fn implication(&self, c: &Condition, d: &Condition) -> Result<ImplicationVerdict> {
        let fails = par::try_map(self.strategy, &self.graphs, |g| Ok::<bool, crate::Error>(graph_satisfies(g, c)? && !graph_satisfies(g, d)?))?;
        Ok(match fails.iter().position(|&x| x) {
            Some(i) => ImplicationVerdict::Counterexample(self.graphs[i].clone()),
            None => ImplicationVerdict::BoundedValid {
                bound: self.bound,
                graphs: self.graphs.len(),
            },
        })
    }
}

/// Bounded check of `c ⇒ d` over all graphs with at most `bound` nodes.
pub fn check_implication(c: &Condition, d: &Condition, bound: usize, alphabet: &Alphabet) -> Result<ImplicationVerdict> {
    Oracle::new(bound, alphabet).implication(c, d)
}

/// Outcome of checking one node of a proof tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeReport {
    /// Position in the tree: `root`, `root.0`, `root.0.1`, …
    pub path: String,
    pub kind: &'static str,
    pub program: String,
    /// Reason for rejection, if any.
    pub error: Option<String>,
    /// Side conditions with their verdicts (`[cons]` only).
    pub implications: Vec<(String, ImplicationVerdict)>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofReport {
    pub accepted: bool,
    pub bound: usize,
    pub nodes: Vec<NodeReport>,
    /// Axioms some side condition relied on.
    pub assumed: Vec<String>,
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "proof {} (implication bound {})", if self.accepted { "accepted" } else { "rejected" }, self.bound)?;
        for n in &self.nodes {
            writeln!(f, "  {} [{}] {}: {}", n.path, n.kind, n.program, n.error.as_deref().unwrap_or("ok"))?;
            for (what, v) in &n.implications {
                writeln!(f, "    {what}: {v}")?;
            }
            for note in &n.notes {
                writeln!(f, "    note: {note}")?;
            }
        }
        if !self.assumed.is_empty() {
            writeln!(f, "  assumed axioms: {}", self.assumed.join(", "))?;
        }
        Ok(())
    }
}

fn same(a: &Condition, b: &Condition) -> bool {
    a == b || simplify(a).alpha_equivalent(&simplify(b))
}

struct Checker<'a> {
    oracle: &'a Oracle,
    axioms: &'a [Axiom],
    nodes: Vec<NodeReport>,
    assumed: Vec<String>,
}

impl Checker<'_> {
    fn node(&mut self, t: &ProofTree, path: String) -> Result<()> {
        let mut report = NodeReport {
            path: path.clone(),
            kind: t.kind(),
            program: t.triple.program.to_string(),
            error: None,
            implications: Vec::new(),
            notes: Vec::new(),
        };
        report.error = self.schema(t, &mut report)?;
        self.nodes.push(report);
        for (i, child) in t.children().into_iter().enumerate() {
            self.node(child, format!("{path}.{i}"))?;
        }
        Ok(())
    }

    fn implication(&mut self, c: &Condition, d: &Condition) -> Result<ImplicationVerdict> {
        if let Some(ax) = self.axioms.iter().find(|ax| same(&ax.antecedent, c) && same(&ax.consequent, d)) {
            if !self.assumed.contains(&ax.name) {
                self.assumed.push(ax.name.clone());
            }
            return Ok(ImplicationVerdict::Assumed(ax.name.clone()));
        }
        self.oracle.implication(c, d)
    }

    // the reason `t` does not instantiate its rule, if any
    fn schema(&mut self, t: &ProofTree, report: &mut NodeReport) -> Result<Option<String>> {
        let Triple { pre, program, post } = &t.triple;
        let alphabet = &self.oracle.alphabet;
        Ok(match &t.step {
            Step::RuleApp => {
                let Program::Call(rules) = &**program else {
                    return Ok(Some("[ruleapp] needs a single rule".into()));
                };
                if rules.len() != 1 {
                    return Ok(Some("[ruleapp] needs a single rule".into()));
                }
                let pre_r = precondition(&rules[0], post, alphabet)?;
                let not_app = simplify(&Condition::not(applicability(rules, alphabet)?));
                let both = simplify(&Condition::Or(vec![pre_r.clone(), not_app.clone()]));
                if same(pre, &pre_r) || same(pre, &not_app) || same(pre, &both) {
                    None
                } else {
                    Some(format!("precondition is neither Pre({0}, post), ¬App({{{0}}}) nor their disjunction", rules[0].name))
                }
            }
            Step::RuleSet(children) => {
                let Program::Call(rules) = &**program else {
                    return Ok(Some("[ruleset] needs a rule set".into()));
                };
                if rules.is_empty() {
                    report.notes.push("empty rule set accepted vacuously".into());
                }
                if children.len() != rules.len() {
                    return Ok(Some(format!("{} premises for {} rules", children.len(), rules.len())));
                }
                for (r, child) in rules.iter().zip(children) {
                    let want = Program::Call(vec![r.clone()]);
                    if *child.triple.program != want {
                        return Ok(Some(format!("premise for `{}` proves `{}`", r.name, child.triple.program)));
                    }
                    if !same(&child.triple.pre, pre) || !same(&child.triple.post, post) {
                        return Ok(Some(format!("premise for `{}` has a different pre- or postcondition", r.name)));
                    }
                }
                None
            }
            Step::Comp(left, right) => {
                let Program::Seq(p, q) = &**program else {
                    return Ok(Some("[comp] needs a sequence".into()));
                };
                if left.triple.program != *p || right.triple.program != *q {
                    Some("premises do not prove the two parts of the sequence".into())
                } else if !same(&left.triple.pre, pre) {
                    Some("left premise has a different precondition".into())
                } else if !same(&right.triple.post, post) {
                    Some("right premise has a different postcondition".into())
                } else if !same(&left.triple.post, &right.triple.pre) {
                    Some("premises do not meet at a common midpoint".into())
                } else {
                    None
                }
            }
            Step::Bang(child) => {
                let Program::Alap(body) = &**program else {
                    return Ok(Some("[!] needs a program of the form ℛ!".into()));
                };
                let Program::Call(rules) = &**body else {
                    return Ok(Some("[!] applies only to rule sets".into()));
                };
                let expected = Condition::And(vec![pre.clone(), Condition::not(applicability(rules, alphabet)?)]);
                if child.triple.program != *body {
                    Some("premise does not prove the iterated rule set".into())
                } else if !same(&child.triple.pre, pre) || !same(&child.triple.post, pre) {
                    Some("premise is not of the form {inv} ℛ {inv}".into())
                } else if !same(post, &expected) {
                    Some("postcondition is not inv ∧ ¬App(ℛ)".into())
                } else {
                    None
                }
            }
            Step::Cons(child) => {
                if child.triple.program != *program {
                    return Ok(Some("premise proves a different program".into()));
                }
                let mut failed = None;
                for (what, c, d) in [("pre ⇒ premise pre", pre, &child.triple.pre), ("premise post ⇒ post", &child.triple.post, post)] {
                    if same(c, d) {
                        continue;
                    }
                    let v = self.implication(c, d)?;
                    if !v.holds() && failed.is_none() {
                        failed = Some(format!("side condition {what} fails"));
                    }
                    report.implications.push((what.to_string(), v));
                }
                failed
            }
        })
    }
}

/// Checks every node of `t` against its rule. Implications are decided by
/// `axioms` where one matches, and otherwise on all graphs with at most
/// `bound` nodes.
pub fn check_proof(t: &ProofTree, bound: usize, axioms: &[Axiom], alphabet: &Alphabet) -> Result<ProofReport> {
    check_proof_with(t, &Oracle::new(bound, alphabet), axioms)
}

pub fn check_proof_with(t: &ProofTree, oracle: &Oracle, axioms: &[Axiom]) -> Result<ProofReport> {
    let mut checker = Checker {
        oracle,
        axioms,
        nodes: Vec::new(),
        assumed: Vec::new(),
    };
    checker.node(t, "root".into())?;
    Ok(ProofReport {
        accepted: checker.nodes.iter().all(|n| n.error.is_none()),
        bound: oracle.bound,
        nodes: checker.nodes,
        assumed: checker.assumed,
    })
}

/// Outcome of testing `⊨ {c} P {d}` on small graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripleVerdict {
    /// Every result from every graph satisfying `c` satisfies `d`.
    Holds { inputs: usize, budget_exhausted: bool },
    Counterexample { input: Arc<Graph>, output: Arc<Graph> },
}

impl TripleVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, TripleVerdict::Holds { .. })
    }
}

impl fmt::Display for TripleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleVerdict::Holds { inputs, budget_exhausted } => {
                write!(f, "holds on {inputs} input graphs")?;
                if *budget_exhausted {
                    f.write_str(" (some runs hit the step budget)")?;
                }
                Ok(())
            }
            TripleVerdict::Counterexample { input, output } => write!(f, "fails: {input} leads to {output}"),
        }
    }
}

/// Runs `program` on every graph with at most `graph_bound` nodes that
/// satisfies `pre` and checks every result against `post`. Failure and
/// divergence are ignored.
pub fn verify_triple_semantics(pre: &Condition, program: &Arc<Program>, post: &Condition, graph_bound: usize, step_budget: usize, alphabet: &Alphabet) -> Result<TripleVerdict> {
    verify_triple_on(pre, program, post, &Oracle::new(graph_bound, alphabet), step_budget)
}

pub fn verify_triple_on(pre: &Condition, program: &Arc<Program>, post: &Condition, oracle: &Oracle, step_budget: usize) -> Result<TripleVerdict> {
    type Found = Option<(Arc<Graph>, Arc<Graph>)>;
    let per_graph = par::try_map(oracle.strategy, oracle.graphs(), |g| -> Result<(bool, bool, Found)> {
        if !graph_satisfies(g, pre)? {
            return Ok((false, false, None));
        }
        let mut it = Interpreter::new(step_budget);
        let rs = it.run(program, g)?;
        for h in rs.graphs() {
            if !graph_satisfies(h, post)? {
                return Ok((true, it.exhausted(), Some((g.clone(), h.clone()))));
            }
        }
        Ok((true, it.exhausted(), None))
    })?;
    let mut inputs = 0;
    let mut exhausted = false;
    for (used, ex, found) in per_graph {
        if let Some((input, output)) = found {
            return Ok(TripleVerdict::Counterexample { input, output });
        }
        inputs += used as usize;
        exhausted |= ex;
    }
    Ok(TripleVerdict::Holds {
        inputs,
        budget_exhausted: exhausted,
    })
}

/// Rules of a program, for callers building trees by hand.
pub fn rule_set(rules: &[Arc<Rule>]) -> Arc<Program> {
    Arc::new(Program::Call(rules.to_vec()))
}
