//! Small-step semantics of graph programs.
//!
//! A run explores the whole configuration graph reachable from `⟨P, G⟩`.
//! Graphs are identified up to isomorphism, so a configuration that revisits
//! an isomorphic graph under the same program closes a cycle, which counts as
//! divergence. Guards of `if`, `try` and the body of `!` are evaluated by
//! nested runs whose results feed the enclosing step.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::canonical::{canonical_key, CanonicalKey};
use crate::error::Result;
use crate::graph::Graph;
use crate::rewrite::{derive_all, Rule};

/// Default bound on the number of configurations a run may expand.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Debug)]
pub enum Program {
    /// Nondeterministic application of one rule from a set.
    Call(Vec<Arc<Rule>>),
    Skip,
    Seq(Arc<Program>, Arc<Program>),
    /// `P!`: apply as long as possible.
    Alap(Arc<Program>),
    /// `if C then P else Q`.
    If(Arc<Program>, Arc<Program>, Arc<Program>),
    /// `try C then P else Q`.
    Try(Arc<Program>, Arc<Program>, Arc<Program>),
}

// Rules are compared by name; a program never holds two different rules of one name.
impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        use Program::*;
        match (self, other) {
            (Call(a), Call(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.name == y.name),
            (Skip, Skip) => true,
            (Seq(a, b), Seq(c, d)) => a == c && b == d,
            (Alap(a), Alap(b)) => a == b,
            (If(a, b, c), If(d, e, f)) | (Try(a, b, c), Try(d, e, f)) => a == d && b == e && c == f,
            _ => false,
        }
    }
}

impl Eq for Program {}

impl Hash for Program {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Program::Call(rs) => rs.iter().for_each(|r| r.name.hash(state)),
            Program::Skip => {}
            Program::Seq(a, b) => {
                a.hash(state);
                b.hash(state);
            }
            Program::Alap(a) => a.hash(state),
            Program::If(a, b, c) | Program::Try(a, b, c) => {
                a.hash(state);
                b.hash(state);
                c.hash(state);
            }
        }
    }
}

impl Program {
    pub fn call(rule: Arc<Rule>) -> Arc<Program> {
        Arc::new(Program::Call(vec![rule]))
    }

    pub fn seq(p: Arc<Program>, q: Arc<Program>) -> Arc<Program> {
        Arc::new(Program::Seq(p, q))
    }

    pub fn alap(p: Arc<Program>) -> Arc<Program> {
        Arc::new(Program::Alap(p))
    }

    /// Rules called anywhere in the program, in first-occurrence order.
    pub fn rules(&self) -> Vec<Arc<Rule>> {
        fn go(p: &Program, out: &mut Vec<Arc<Rule>>) {
            match p {
                Program::Call(rs) => {
                    for r in rs {
                        if !out.iter().any(|x| x.name == r.name) {
                            out.push(r.clone());
                        }
                    }
                }
                Program::Skip => {}
                Program::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Program::Alap(a) => go(a, out),
                Program::If(a, b, c) | Program::Try(a, b, c) => {
                    go(a, out);
                    go(b, out);
                    go(c, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(p: &Program) -> u8 {
            match p {
                Program::If(..) | Program::Try(..) => 0,
                Program::Seq(..) => 1,
                _ => 2,
            }
        }
        fn go(p: &Program, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
            let paren = prec(p) < min;
            if paren {
                f.write_str("(")?;
            }
            match p {
                Program::Call(rs) if rs.len() == 1 => write!(f, "{}", rs[0].name)?,
                Program::Call(rs) => {
                    f.write_str("{")?;
                    for (i, r) in rs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", r.name)?;
                    }
                    f.write_str("}")?;
                }
                Program::Skip => f.write_str("skip")?,
                Program::Seq(a, b) => {
                    go(a, f, 2)?;
                    f.write_str("; ")?;
                    go(b, f, 1)?;
                }
                Program::Alap(a) => {
                    go(a, f, 2)?;
                    f.write_str("!")?;
                }
                Program::If(c, t, e) | Program::Try(c, t, e) => {
                    f.write_str(if matches!(p, Program::If(..)) { "if " } else { "try " })?;
                    go(c, f, 1)?;
                    f.write_str(" then ")?;
                    go(t, f, 1)?;
                    f.write_str(" else ")?;
                    go(e, f, 1)?;
                }
            }
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}

/// Outcomes of a run: result graphs up to isomorphism, failure, and divergence (`⊥`).
#[derive(Clone, Debug, Default)]
pub struct ResultSet {
    graphs: BTreeMap<CanonicalKey, Arc<Graph>>,
    pub fail: bool,
    pub diverges: bool,
}

impl ResultSet {
    pub fn graphs(&self) -> impl Iterator<Item = &Arc<Graph>> {
        self.graphs.values()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    /// No outcome at all: no graph, no failure and no divergence.
    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty() && !self.fail && !self.diverges
    }

    pub fn contains_isomorphic(&self, g: &Graph) -> bool {
        self.graphs.contains_key(&canonical_key(g))
    }

    fn add(&mut self, g: Arc<Graph>) {
        self.graphs.entry(canonical_key(&g)).or_insert(g);
    }
}

/// One-step successor of a configuration.
#[derive(Clone, Debug)]
pub enum Successor {
    Config(Arc<Program>, Arc<Graph>),
    Graph(Arc<Graph>),
    Fail,
}

type Key = (Arc<Program>, CanonicalKey);

/// Runs programs with a shared expansion budget and memoised nested runs.
pub struct Interpreter {
    budget: usize,
    spent: usize,
    exhausted: bool,
    memo: HashMap<Key, ResultSet>,
}

impl Interpreter {
    pub fn new(budget: usize) -> Self {
        Interpreter {
            budget,
            spent: 0,
            exhausted: false,
            memo: HashMap::new(),
        }
    }

    /// Whether some run hit the budget.
    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    /// Successors of `⟨P, G⟩`.
    pub fn step(&mut self, p: &Arc<Program>, g: &Arc<Graph>) -> Result<Vec<Successor>> {
        Ok(match &**p {
            Program::Call(rules) => {
                let hs = derive_all(rules, g)?;
                if hs.is_empty() {
                    vec![Successor::Fail]
                } else {
                    hs.into_iter().map(Successor::Graph).collect()
                }
            }
            Program::Skip => vec![Successor::Graph(g.clone())],
            Program::Seq(first, second) => self
                .step(first, g)?
                .into_iter()
                .map(|s| match s {
                    Successor::Config(p2, h) => Successor::Config(Program::seq(p2, second.clone()), h),
                    Successor::Graph(h) => Successor::Config(second.clone(), h),
                    Successor::Fail => Successor::Fail,
                })
                .collect(),
            Program::If(c, then, other) => {
                let rs = self.run_nested(c, g)?;
                let mut out = Vec::new();
                if rs.graphs().next().is_some() {
                    out.push(Successor::Config(then.clone(), g.clone()));
                }
                if rs.fail {
                    out.push(Successor::Config(other.clone(), g.clone()));
                }
                out
            }
            Program::Try(c, then, other) => {
                let rs = self.run_nested(c, g)?;
                let mut out: Vec<Successor> = rs.graphs().map(|h| Successor::Config(then.clone(), h.clone())).collect();
                if rs.fail {
                    out.push(Successor::Config(other.clone(), g.clone()));
                }
                out
            }
            Program::Alap(body) => {
                let rs = self.run_nested(body, g)?;
                let mut out: Vec<Successor> = rs.graphs().map(|h| Successor::Config(p.clone(), h.clone())).collect();
                if rs.fail {
                    out.push(Successor::Graph(g.clone()));
                }
                out
            }
        })
    }

    fn run_nested(&mut self, p: &Arc<Program>, g: &Arc<Graph>) -> Result<ResultSet> {
        let key = (p.clone(), canonical_key(g));
        if let Some(rs) = self.memo.get(&key) {
            return Ok(rs.clone());
        }
        let rs = self.run(p, g)?;
        if !self.exhausted {
            self.memo.insert(key, rs.clone());
        }
        Ok(rs)
    }

    /// All outcomes of `⟨P, G⟩`.
    pub fn run(&mut self, p: &Arc<Program>, g: &Arc<Graph>) -> Result<ResultSet> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut result = ResultSet::default();
        let mut marks: HashMap<Key, Mark> = HashMap::new();
        // explicit DFS stack: configuration key, pending successors
        let mut stack: Vec<(Key, Vec<Successor>)> = Vec::new();

        let enter = |this: &mut Self, p: Arc<Program>, g: Arc<Graph>, marks: &mut HashMap<Key, Mark>, stack: &mut Vec<(Key, Vec<Successor>)>, result: &mut ResultSet| -> Result<()> {
            let key = (p.clone(), canonical_key(&g));
            match marks.get(&key) {
                Some(Mark::Open) => {
                    result.diverges = true;
                    return Ok(());
                }
                Some(Mark::Done) => return Ok(()),
                None => {}
            }
            if this.spent >= this.budget {
                this.exhausted = true;
                result.diverges = true;
                return Ok(());
            }
            this.spent += 1;
            let mut succ = this.step(&p, &g)?;
            if succ.is_empty() {
                // stuck
                result.diverges = true;
                marks.insert(key, Mark::Done);
                return Ok(());
            }
            succ.reverse();
            marks.insert(key.clone(), Mark::Open);
            stack.push((key, succ));
            Ok(())
        };

        enter(self, p.clone(), g.clone(), &mut marks, &mut stack, &mut result)?;
        while let Some((_, pending)) = stack.last_mut() {
            match pending.pop() {
                None => {
                    let (key, _) = stack.pop().unwrap();
                    marks.insert(key, Mark::Done);
                }
                Some(Successor::Graph(h)) => result.add(h),
                Some(Successor::Fail) => result.fail = true,
                Some(Successor::Config(p2, h)) => {
                    enter(self, p2, h, &mut marks, &mut stack, &mut result)?;
                }
            }
            if self.exhausted {
                break;
            }
        }
        Ok(result)
    }
}

/// Runs `P` on `G` with a fresh interpreter.
pub fn run(p: &Arc<Program>, g: &Arc<Graph>, budget: usize) -> Result<ResultSet> {
    Interpreter::new(budget).run(p, g)
}
