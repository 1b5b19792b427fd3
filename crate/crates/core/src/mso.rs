//! Many-sorted monadic second-order logic on graphs.
//!
//! Formulas quantify over nodes (`V`), edges (`E`), node sets (`VS`) and edge
//! sets (`ES`). [`to_condition`] and [`to_formula`] translate between
//! formulas and constraints; [`normalize`] brings a condition into the shape
//! [`to_formula`] works on.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::condition::{Condition, Constraint, SetSort};
use crate::error::{Error, Result};
use crate::graph::{fresh_id, Alphabet, Graph, Id, Label};
use crate::morphism::Morphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Vertex,
    Edge,
    VertexSet,
    EdgeSet,
}

impl Sort {
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Vertex => "V",
            Sort::Edge => "E",
            Sort::VertexSet => "VS",
            Sort::EdgeSet => "ES",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Sort> {
        Some(match s {
            "V" => Sort::Vertex,
            "E" => Sort::Edge,
            "VS" => Sort::VertexSet,
            "ES" => Sort::EdgeSet,
            _ => return None,
        })
    }
}

/// A vertex-valued expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VTerm {
    Var(Id),
    /// `s(e)`
    Source(Id),
    /// `t(e)`
    Target(Id),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    VertexEq(VTerm, VTerm),
    EdgeEq(Id, Id),
    VertexLabel(VTerm, Label),
    EdgeLabel(Id, Label),
    VertexIn(VTerm, Id),
    EdgeIn(Id, Id),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Id, Sort, Box<Formula>),
    Forall(Id, Sort, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: impl Into<Id>, sort: Sort, body: Formula) -> Formula {
        Formula::Exists(var.into(), sort, Box::new(body))
    }

    pub fn forall(var: impl Into<Id>, sort: Sort, body: Formula) -> Formula {
        Formula::Forall(var.into(), sort, Box::new(body))
    }

    /// Left-nested conjunction; `true` if empty.
    pub fn conj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` if empty.
    pub fn disj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Free variables with the sorts they are used at. Fails on a variable
    /// used at two sorts or bound at one sort and used at another.
    pub fn free_vars(&self) -> Result<Vec<(Id, Sort)>> {
        let mut out = Vec::new();
        self.scan(&mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Checks that the formula is a well-sorted sentence.
    pub fn check_sentence(&self) -> Result<()> {
        let free = self.free_vars()?;
        match free.first() {
            None => Ok(()),
            Some((x, _)) => Err(Error::InvalidFormula(format!("free variable `{x}`"))),
        }
    }

    fn scan(&self, bound: &mut Vec<(Id, Sort)>, free: &mut Vec<(Id, Sort)>) -> Result<()> {
        let mut use_var = |x: &Id, s: Sort, bound: &Vec<(Id, Sort)>| -> Result<()> {
            let known = bound.iter().rev().find(|(y, _)| y == x).or_else(|| free.iter().find(|(y, _)| y == x));
            match known {
                Some((_, t)) if *t == s => Ok(()),
                Some((_, t)) => Err(Error::InvalidFormula(format!("`{x}` has sort {} but is used at sort {}", t.keyword(), s.keyword()))),
                None => {
                    free.push((x.clone(), s));
                    Ok(())
                }
            }
        };
        let term = |t: &VTerm, bound: &Vec<(Id, Sort)>, use_var: &mut dyn FnMut(&Id, Sort, &Vec<(Id, Sort)>) -> Result<()>| match t {
            VTerm::Var(x) => use_var(x, Sort::Vertex, bound),
            VTerm::Source(e) | VTerm::Target(e) => use_var(e, Sort::Edge, bound),
        };
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::VertexEq(a, b) => {
                term(a, bound, &mut use_var)?;
                term(b, bound, &mut use_var)
            }
            Formula::EdgeEq(a, b) => {
                use_var(a, Sort::Edge, bound)?;
                use_var(b, Sort::Edge, bound)
            }
            Formula::VertexLabel(t, _) => term(t, bound, &mut use_var),
            Formula::EdgeLabel(e, _) => use_var(e, Sort::Edge, bound),
            Formula::VertexIn(t, s) => {
                term(t, bound, &mut use_var)?;
                use_var(s, Sort::VertexSet, bound)
            }
            Formula::EdgeIn(e, s) => {
                use_var(e, Sort::Edge, bound)?;
                use_var(s, Sort::EdgeSet, bound)
            }
            Formula::Not(f) => f.scan(bound, free),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.scan(bound, free)?;
                b.scan(bound, free)
            }
            Formula::Exists(x, s, f) | Formula::Forall(x, s, f) => {
                bound.push((x.clone(), *s));
                let r = f.scan(bound, free);
                bound.pop();
                r
            }
        }
    }

    /// Renames bound variables so that every quantifier binds a distinct name
    /// that is also distinct from the free variables and from `avoid`.
    pub fn rename_apart(&self, avoid: &BTreeSet<Id>) -> Formula {
        let mut taken: BTreeSet<Id> = avoid.clone();
        if let Ok(free) = self.free_vars() {
            taken.extend(free.into_iter().map(|(x, _)| x));
        }
        self.rename(&mut Vec::new(), &mut taken)
    }

    fn rename(&self, env: &mut Vec<(Id, Id)>, taken: &mut BTreeSet<Id>) -> Formula {
        let r = |x: &Id, env: &Vec<(Id, Id)>| env.iter().rev().find(|(y, _)| y == x).map(|(_, z)| z.clone()).unwrap_or_else(|| x.clone());
        let rt = |t: &VTerm, env: &Vec<(Id, Id)>| match t {
            VTerm::Var(x) => VTerm::Var(r(x, env)),
            VTerm::Source(e) => VTerm::Source(r(e, env)),
            VTerm::Target(e) => VTerm::Target(r(e, env)),
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::VertexEq(a, b) => Formula::VertexEq(rt(a, env), rt(b, env)),
            Formula::EdgeEq(a, b) => Formula::EdgeEq(r(a, env), r(b, env)),
            Formula::VertexLabel(t, l) => Formula::VertexLabel(rt(t, env), l.clone()),
            Formula::EdgeLabel(e, l) => Formula::EdgeLabel(r(e, env), l.clone()),
            Formula::VertexIn(t, s) => Formula::VertexIn(rt(t, env), r(s, env)),
            Formula::EdgeIn(e, s) => Formula::EdgeIn(r(e, env), r(s, env)),
            Formula::Not(f) => Formula::not(f.rename(env, taken)),
            Formula::And(a, b) => Formula::and(a.rename(env, taken), b.rename(env, taken)),
            Formula::Or(a, b) => Formula::or(a.rename(env, taken), b.rename(env, taken)),
            Formula::Implies(a, b) => Formula::implies(a.rename(env, taken), b.rename(env, taken)),
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.rename(env, taken)), Box::new(b.rename(env, taken))),
            Formula::Exists(x, s, f) | Formula::Forall(x, s, f) => {
                let y = fresh_id(x, taken);
                taken.insert(y.clone());
                env.push((x.clone(), y.clone()));
                let body = f.rename(env, taken);
                env.pop();
                match self {
                    Formula::Exists(..) => Formula::exists(y, *s, body),
                    _ => Formula::forall(y, *s, body),
                }
            }
        }
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Formula::Not(f) | Formula::Exists(_, _, f) | Formula::Forall(_, _, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }
}

fn label_name(l: &Label) -> &str {
    if l.is_blank() {
        "blank"
    } else {
        l.as_str()
    }
}

impl fmt::Display for VTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VTerm::Var(x) => write!(f, "{x}"),
            VTerm::Source(e) => write!(f, "s({e})"),
            VTerm::Target(e) => write!(f, "t({e})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // binding strength: quantifiers 0, <=> 1, => 2, or 3, and 4, not and atoms 5
        fn prec(x: &Formula) -> u8 {
            match x {
                Formula::Exists(..) | Formula::Forall(..) => 0,
                Formula::Iff(..) => 1,
                Formula::Implies(..) => 2,
                Formula::Or(..) => 3,
                Formula::And(..) => 4,
                _ => 5,
            }
        }
        fn go(x: &Formula, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
            let paren = prec(x) < min;
            if paren {
                f.write_str("(")?;
            }
            match x {
                Formula::True => f.write_str("true")?,
                Formula::False => f.write_str("false")?,
                Formula::VertexEq(a, b) => write!(f, "{a} = {b}")?,
                Formula::EdgeEq(a, b) => write!(f, "{a} = {b}")?,
                Formula::VertexLabel(t, l) => write!(f, "lab_{}({t})", label_name(l))?,
                Formula::EdgeLabel(e, l) => write!(f, "lab_{}({e})", label_name(l))?,
                Formula::VertexIn(t, s) => write!(f, "{t} in {s}")?,
                Formula::EdgeIn(e, s) => write!(f, "{e} in {s}")?,
                Formula::Not(a) => {
                    f.write_str("not ")?;
                    go(a, f, 5)?;
                }
                Formula::And(a, b) => {
                    go(a, f, 4)?;
                    f.write_str(" and ")?;
                    go(b, f, 5)?;
                }
                Formula::Or(a, b) => {
                    go(a, f, 3)?;
                    f.write_str(" or ")?;
                    go(b, f, 4)?;
                }
                Formula::Implies(a, b) => {
                    go(a, f, 3)?;
                    f.write_str(" => ")?;
                    go(b, f, 2)?;
                }
                Formula::Iff(a, b) => {
                    go(a, f, 1)?;
                    f.write_str(" <=> ")?;
                    go(b, f, 2)?;
                }
                Formula::Exists(v, s, a) | Formula::Forall(v, s, a) => {
                    let q = if matches!(x, Formula::Exists(..)) { "exists" } else { "forall" };
                    write!(f, "{q} {v}:{}. ", s.keyword())?;
                    go(a, f, 0)?;
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

// ---------------------------------------------------------------------------
// satisfaction

#[derive(Clone, Copy)]
enum Value {
    Vertex(usize),
    Edge(usize),
    Set(u64),
}

struct Eval<'a> {
    g: &'a Graph,
    env: Vec<(Id, Value)>,
}

impl Eval<'_> {
    fn lookup(&self, x: &Id) -> Result<Value> {
        self.env
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::InvalidFormula(format!("free variable `{x}`")))
    }

    fn vertex(&self, t: &VTerm) -> Result<usize> {
        let bad = |x: &Id| Error::InvalidFormula(format!("`{x}` is used at the wrong sort"));
        match t {
            VTerm::Var(x) => match self.lookup(x)? {
                Value::Vertex(v) => Ok(v),
                _ => Err(bad(x)),
            },
            VTerm::Source(e) | VTerm::Target(e) => match self.lookup(e)? {
                Value::Edge(i) => {
                    let edge = self.g.edge(i);
                    Ok(if matches!(t, VTerm::Source(_)) { edge.source } else { edge.target })
                }
                _ => Err(bad(e)),
            },
        }
    }

    fn edge(&self, x: &Id) -> Result<usize> {
        match self.lookup(x)? {
            Value::Edge(i) => Ok(i),
            _ => Err(Error::InvalidFormula(format!("`{x}` is not an edge variable"))),
        }
    }

    fn set(&self, x: &Id) -> Result<u64> {
        match self.lookup(x)? {
            Value::Set(s) => Ok(s),
            _ => Err(Error::InvalidFormula(format!("`{x}` is not a set variable"))),
        }
    }

    fn holds(&mut self, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::VertexEq(a, b) => self.vertex(a)? == self.vertex(b)?,
            Formula::EdgeEq(a, b) => self.edge(a)? == self.edge(b)?,
            Formula::VertexLabel(t, l) => self.g.node(self.vertex(t)?).label == *l,
            Formula::EdgeLabel(e, l) => self.g.edge(self.edge(e)?).label == *l,
            Formula::VertexIn(t, s) => self.set(s)? >> self.vertex(t)? & 1 == 1,
            Formula::EdgeIn(e, s) => self.set(s)? >> self.edge(e)? & 1 == 1,
            Formula::Not(a) => !self.holds(a)?,
            Formula::And(a, b) => self.holds(a)? && self.holds(b)?,
            Formula::Or(a, b) => self.holds(a)? || self.holds(b)?,
            Formula::Implies(a, b) => !self.holds(a)? || self.holds(b)?,
            Formula::Iff(a, b) => self.holds(a)? == self.holds(b)?,
            Formula::Exists(x, s, body) => self.quantify(x, *s, body, true)?,
            Formula::Forall(x, s, body) => self.quantify(x, *s, body, false)?,
        })
    }

    // `exists` looks for a witness, otherwise for a counterexample
    fn quantify(&mut self, x: &Id, sort: Sort, body: &Formula, exists: bool) -> Result<bool> {
        let count = match sort {
            Sort::Vertex | Sort::VertexSet => self.g.node_count(),
            Sort::Edge | Sort::EdgeSet => self.g.edge_count(),
        };
        let values: Box<dyn Iterator<Item = Value>> = match sort {
            Sort::Vertex => Box::new((0..count).map(Value::Vertex)),
            Sort::Edge => Box::new((0..count).map(Value::Edge)),
            Sort::VertexSet | Sort::EdgeSet => {
                if count >= 64 {
                    return Err(Error::TooManyItems(count));
                }
                Box::new((0..1u64 << count).map(Value::Set))
            }
        };
        for v in values {
            self.env.push((x.clone(), v));
            let r = self.holds(body);
            self.env.pop();
            if r? == exists {
                return Ok(exists);
            }
        }
        Ok(!exists)
    }
}

/// `G ⊨ φ` for a sentence `φ`.
pub fn mso_satisfies(g: &Graph, f: &Formula) -> Result<bool> {
    f.check_sentence()?;
    Eval { g, env: Vec::new() }.holds(f)
}

// ---------------------------------------------------------------------------
// formulas to conditions

/// A context graph for the translation, with the node or edge of the graph
/// each first-order variable stands for.
#[derive(Clone, Debug)]
struct Context {
    graph: Arc<Graph>,
    vars: Vec<(Id, Id)>,
}

impl Context {
    fn item(&self, x: &Id) -> Result<&Id> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, i)| i)
            .ok_or_else(|| Error::InvalidFormula(format!("free variable `{x}`")))
    }

    fn bind(&self, var: &Id, item: Id, graph: Arc<Graph>) -> Context {
        let mut vars = self.vars.clone();
        vars.push((var.clone(), item));
        Context { graph, vars }
    }

    // the node a vertex expression denotes
    fn vertex(&self, t: &VTerm) -> Result<Id> {
        match t {
            VTerm::Var(x) => Ok(self.item(x)?.clone()),
            VTerm::Source(e) | VTerm::Target(e) => {
                let id = self.item(e)?;
                let i = self.graph.edge_index(id).ok_or_else(|| Error::InvalidFormula(format!("`{e}` is not an edge variable")))?;
                let edge = self.graph.edge(i);
                let v = if matches!(t, VTerm::Source(_)) { edge.source } else { edge.target };
                Ok(self.graph.node(v).id.clone())
            }
        }
    }
}

fn truth(b: bool) -> Condition {
    if b {
        Condition::True
    } else {
        Condition::falsity()
    }
}

fn with_node(g: &Graph, id: &Id, label: &Label) -> Result<Arc<Graph>> {
    let mut nodes: Vec<_> = g.nodes().iter().map(|n| (n.id.clone(), n.label.clone())).collect();
    nodes.push((id.clone(), label.clone()));
    let edges = g.edges().iter().map(|e| (e.id.clone(), g.node(e.source).id.clone(), g.node(e.target).id.clone(), e.label.clone())).collect();
    Ok(Arc::new(Graph::from_parts(nodes, edges)?))
}

fn with_edge(g: &Graph, id: &Id, s: &Id, t: &Id, label: &Label) -> Result<Arc<Graph>> {
    let nodes = g.nodes().iter().map(|n| (n.id.clone(), n.label.clone())).collect();
    let mut edges: Vec<_> = g.edges().iter().map(|e| (e.id.clone(), g.node(e.source).id.clone(), g.node(e.target).id.clone(), e.label.clone())).collect();
    edges.push((id.clone(), s.clone(), t.clone(), label.clone()));
    Ok(Arc::new(Graph::from_parts(nodes, edges)?))
}

fn cond_prime(f: &Formula, x: &Context, alphabet: &Alphabet) -> Result<Condition> {
    Ok(match f {
        Formula::True => Condition::True,
        Formula::False => Condition::falsity(),
        Formula::VertexEq(a, b) => truth(x.vertex(a)? == x.vertex(b)?),
        Formula::EdgeEq(a, b) => truth(x.item(a)? == x.item(b)?),
        Formula::VertexLabel(t, l) => {
            let v = x.vertex(t)?;
            truth(x.graph.node(x.graph.node_index(&v).unwrap()).label == *l)
        }
        Formula::EdgeLabel(e, l) => {
            let id = x.item(e)?;
            let i = x.graph.edge_index(id).ok_or_else(|| Error::InvalidFormula(format!("`{e}` is not an edge variable")))?;
            truth(x.graph.edge(i).label == *l)
        }
        Formula::VertexIn(t, s) => Condition::exists(Morphism::identity(x.graph.clone()), Constraint::member(x.vertex(t)?, s.clone()), Condition::True),
        Formula::EdgeIn(e, s) => Condition::exists(Morphism::identity(x.graph.clone()), Constraint::member(x.item(e)?.clone(), s.clone()), Condition::True),
        Formula::Not(a) => Condition::not(cond_prime(a, x, alphabet)?),
        Formula::And(a, b) => Condition::And(vec![cond_prime(a, x, alphabet)?, cond_prime(b, x, alphabet)?]),
        Formula::Or(a, b) => Condition::Or(vec![cond_prime(a, x, alphabet)?, cond_prime(b, x, alphabet)?]),
        Formula::Implies(a, b) => Condition::implies(cond_prime(a, x, alphabet)?, cond_prime(b, x, alphabet)?),
        Formula::Iff(a, b) => Condition::iff(cond_prime(a, x, alphabet)?, cond_prime(b, x, alphabet)?),
        Formula::Forall(v, s, body) => cond_prime(&Formula::not(Formula::exists(v.clone(), *s, Formula::not((**body).clone()))), x, alphabet)?,
        Formula::Exists(v, Sort::VertexSet, body) => Condition::exists_set(SetSort::Nodes, v.clone(), cond_prime(body, x, alphabet)?),
        Formula::Exists(v, Sort::EdgeSet, body) => Condition::exists_set(SetSort::Edges, v.clone(), cond_prime(body, x, alphabet)?),
        Formula::Exists(v, Sort::Vertex, body) => {
            let g = &x.graph;
            let mut options = Vec::new();
            // v is one of the nodes already present
            for n in g.nodes() {
                options.push(cond_prime(body, &x.bind(v, n.id.clone(), g.clone()), alphabet)?);
            }
            let id = fresh_id(v, &g.ids());
            for l in &alphabet.node_labels {
                let grown = with_node(g, &id, l)?;
                let inner = cond_prime(body, &x.bind(v, id.clone(), grown.clone()), alphabet)?;
                options.push(Condition::exists(Morphism::inclusion(g.clone(), grown)?, Constraint::True, inner));
            }
            Condition::Or(options)
        }
        Formula::Exists(e, Sort::Edge, body) => {
            let g = &x.graph;
            let mut options = Vec::new();
            for edge in g.edges() {
                options.push(cond_prime(body, &x.bind(e, edge.id.clone(), g.clone()), alphabet)?);
            }
            let mut taken = g.ids();
            let eid = fresh_id(e, &taken);
            taken.insert(eid.clone());
            let sid = fresh_id(&format!("s_{e}"), &taken);
            taken.insert(sid.clone());
            let tid = fresh_id(&format!("t_{e}"), &taken);
            // endpoints: an existing node, or a new one with some label
            #[derive(Clone)]
            enum End {
                Old(Id),
                New(Label),
                SameAsSource,
            }
            let mut sources: Vec<End> = g.nodes().iter().map(|n| End::Old(n.id.clone())).collect();
            sources.extend(alphabet.node_labels.iter().cloned().map(End::New));
            for s in &sources {
                let mut targets: Vec<End> = g.nodes().iter().map(|n| End::Old(n.id.clone())).collect();
                targets.extend(alphabet.node_labels.iter().cloned().map(End::New));
                if matches!(s, End::New(_)) {
                    targets.push(End::SameAsSource);
                }
                for t in &targets {
                    for l in &alphabet.edge_labels {
                        let mut grown: Arc<Graph> = g.clone();
                        let src = match s {
                            End::Old(n) => n.clone(),
                            End::New(nl) => {
                                grown = with_node(&grown, &sid, nl)?;
                                sid.clone()
                            }
                            End::SameAsSource => unreachable!(),
                        };
                        let tgt = match t {
                            End::Old(n) => n.clone(),
                            End::New(nl) => {
                                grown = with_node(&grown, &tid, nl)?;
                                tid.clone()
                            }
                            End::SameAsSource => src.clone(),
                        };
                        grown = with_edge(&grown, &eid, &src, &tgt, l)?;
                        let inner = cond_prime(body, &x.bind(e, eid.clone(), grown.clone()), alphabet)?;
                        options.push(Condition::exists(Morphism::inclusion(g.clone(), grown)?, Constraint::True, inner));
                    }
                }
            }
            Condition::Or(options)
        }
    })
}

/// The constraint a sentence translates to.
pub fn to_condition(f: &Formula, alphabet: &Alphabet) -> Result<Condition> {
    f.check_sentence()?;
    let f = f.rename_apart(&BTreeSet::new());
    cond_prime(
        &f,
        &Context {
            graph: Arc::new(Graph::empty()),
            vars: Vec::new(),
        },
        alphabet,
    )
}

/// The formula expressing `path(v, w, not avoid)` for distinct `v`, `w`: every
/// node set that contains the successors of `v` and is closed under
/// successors contains `w`. Successor steps never use an excluded edge.
/// `fresh` supplies names for the bound variables.
pub fn path_formula(v: &Id, w: &Id, avoid: &[Id], fresh: &mut dyn FnMut(&str) -> Id) -> Formula {
    let set = fresh("X");
    let y = fresh("y");
    let z = fresh("z");
    let e1 = fresh("e");
    let e2 = fresh("e");
    let step = |e: &Id, from: VTerm, to: VTerm| {
        let mut parts = vec![Formula::VertexEq(VTerm::Source(e.clone()), from), Formula::VertexEq(VTerm::Target(e.clone()), to)];
        parts.extend(avoid.iter().map(|x| Formula::not(Formula::EdgeEq(e.clone(), x.clone()))));
        Formula::exists(e.clone(), Sort::Edge, Formula::conj(parts))
    };
    let closed = Formula::forall(
        y.clone(),
        Sort::Vertex,
        Formula::forall(
            z.clone(),
            Sort::Vertex,
            Formula::implies(
                Formula::and(Formula::VertexIn(VTerm::Var(y.clone()), set.clone()), step(&e1, VTerm::Var(y.clone()), VTerm::Var(z.clone()))),
                Formula::VertexIn(VTerm::Var(z.clone()), set.clone()),
            ),
        ),
    );
    let y2 = fresh("y");
    let start = Formula::forall(
        y2.clone(),
        Sort::Vertex,
        Formula::implies(step(&e2, VTerm::Var(v.clone()), VTerm::Var(y2.clone())), Formula::VertexIn(VTerm::Var(y2), set.clone())),
    );
    Formula::forall(set.clone(), Sort::VertexSet, Formula::implies(Formula::and(closed, start), Formula::VertexIn(VTerm::Var(w.clone()), set)))
}

// ---------------------------------------------------------------------------
// normal form

/// Whether all morphisms are inclusions adding at most one item and no
/// constraint mentions a path.
pub fn is_normal(c: &Condition) -> bool {
    match c {
        Condition::True => true,
        Condition::ExistsSet { body, .. } => is_normal(body),
        Condition::Not(x) => is_normal(x),
        Condition::And(xs) | Condition::Or(xs) => xs.iter().all(is_normal),
        Condition::Exists(e) => {
            let (p, q) = (e.morphism.domain(), e.morphism.codomain());
            e.morphism.is_inclusion() && q.item_count() <= p.item_count() + 1 && !e.constraint.has_path() && is_normal(&e.body)
        }
    }
}

/// An equivalent condition in normal form: morphisms are inclusions, each
/// adds one node or one edge (or nothing), and path predicates are replaced by
/// their set-quantified definition. `alphabet` bounds the labels of nodes the
/// path definitions quantify over.
pub fn normalize(c: &Condition, alphabet: &Alphabet) -> Result<Condition> {
    let c = c.uniquify_set_vars().with_inclusions()?;
    let mut names = BTreeSet::new();
    collect_names(&c, &mut names);
    normal(&c, alphabet, &mut names)
}

fn collect_names(c: &Condition, out: &mut BTreeSet<Id>) {
    match c {
        Condition::True => {}
        Condition::ExistsSet { var, body, .. } => {
            out.insert(var.clone());
            collect_names(body, out);
        }
        Condition::Not(x) => collect_names(x, out),
        Condition::And(xs) | Condition::Or(xs) => xs.iter().for_each(|x| collect_names(x, out)),
        Condition::Exists(e) => {
            out.extend(e.morphism.codomain().ids());
            e.constraint.set_vars(out);
            collect_names(&e.body, out);
        }
    }
}

fn normal(c: &Condition, alphabet: &Alphabet, names: &mut BTreeSet<Id>) -> Result<Condition> {
    Ok(match c {
        Condition::True => Condition::True,
        Condition::ExistsSet { sort, var, body } => Condition::exists_set(*sort, var.clone(), normal(body, alphabet, names)?),
        Condition::Not(x) => Condition::not(normal(x, alphabet, names)?),
        Condition::And(xs) => Condition::And(xs.iter().map(|x| normal(x, alphabet, names)).collect::<Result<_>>()?),
        Condition::Or(xs) => Condition::Or(xs.iter().map(|x| normal(x, alphabet, names)).collect::<Result<_>>()?),
        Condition::Exists(e) => {
            let c_graph = e.morphism.codomain().clone();
            let mut body = normal(&e.body, alphabet, names)?;
            let mut gamma = e.constraint.clone();
            if gamma.has_path() {
                let moved = constraint_condition(&gamma, &c_graph, alphabet, names)?;
                let moved = normal(&moved, alphabet, names)?;
                body = if body.is_true() { moved } else { Condition::And(vec![moved, body]) };
                gamma = Constraint::True;
            }
            chain(e.morphism.domain(), &c_graph, gamma, body)?
        }
    })
}

// a constraint over `c` as an equivalent condition over `c`
fn constraint_condition(g: &Constraint, c: &Arc<Graph>, alphabet: &Alphabet, names: &mut BTreeSet<Id>) -> Result<Condition> {
    Ok(match g {
        Constraint::True => Condition::True,
        Constraint::Member { .. } => Condition::exists(Morphism::identity(c.clone()), g.clone(), Condition::True),
        Constraint::Path { from, to, .. } if from == to => Condition::True,
        Constraint::Path { from, to, avoid } => {
            let mut fresh = |base: &str| {
                let id = fresh_id(base, names);
                names.insert(id.clone());
                id
            };
            let f = path_formula(from, to, avoid, &mut fresh);
            let mut vars = vec![(from.clone(), from.clone()), (to.clone(), to.clone())];
            vars.extend(avoid.iter().map(|e| (e.clone(), e.clone())));
            cond_prime(&f, &Context { graph: c.clone(), vars }, alphabet)?
        }
        Constraint::Not(x) => Condition::not(constraint_condition(x, c, alphabet, names)?),
        Constraint::And(xs) => Condition::And(xs.iter().map(|x| constraint_condition(x, c, alphabet, names)).collect::<Result<_>>()?),
        Constraint::Or(xs) => Condition::Or(xs.iter().map(|x| constraint_condition(x, c, alphabet, names)).collect::<Result<_>>()?),
    })
}

// `∃(p ↪ c | γ, body)` as a chain of inclusions adding one item each
fn chain(p: &Arc<Graph>, c: &Arc<Graph>, gamma: Constraint, body: Condition) -> Result<Condition> {
    let new_nodes: Vec<usize> = (0..c.node_count()).filter(|&i| p.node_index(&c.node(i).id).is_none()).collect();
    let new_edges: Vec<usize> = (0..c.edge_count()).filter(|&i| p.edge_index(&c.edge(i).id).is_none()).collect();
    // stages[k] = p plus the first k new items, nodes before edges
    let total = new_nodes.len() + new_edges.len();
    let mut stages: Vec<Arc<Graph>> = Vec::with_capacity(total + 1);
    for k in 0..=total {
        if k == total {
            stages.push(c.clone());
            break;
        }
        let mut drop_nodes = vec![false; c.node_count()];
        let mut drop_edges = vec![false; c.edge_count()];
        for (j, &i) in new_nodes.iter().enumerate() {
            drop_nodes[i] = j >= k;
        }
        for (j, &i) in new_edges.iter().enumerate() {
            drop_edges[i] = new_nodes.len() + j >= k;
        }
        stages.push(Arc::new(c.remove_items(&drop_nodes, &drop_edges)?));
    }
    if total == 0 {
        return Ok(Condition::exists(Morphism::inclusion(p.clone(), c.clone())?, gamma, body));
    }
    let mut out = Condition::exists(Morphism::inclusion(stages[total - 1].clone(), c.clone())?, gamma, body);
    for k in (0..total - 1).rev() {
        out = Condition::exists(Morphism::inclusion(stages[k].clone(), stages[k + 1].clone())?, Constraint::True, out);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// conditions to formulas

/// The formula a constraint translates to. The constraint is normalized
/// first if needed.
pub fn to_formula(c: &Condition, alphabet: &Alphabet) -> Result<Formula> {
    let c = if is_normal(c) { c.clone() } else { normalize(c, alphabet)? };
    // set variables must not share a name with any item variable
    let mut items = BTreeSet::new();
    collect_items(&c, &mut items);
    let c = rename_sets(&c, &mut Vec::new(), &mut items.clone());
    form_prime(&c, &Graph::empty())
}

fn collect_items(c: &Condition, out: &mut BTreeSet<Id>) {
    match c {
        Condition::True => {}
        Condition::ExistsSet { body, .. } => collect_items(body, out),
        Condition::Not(x) => collect_items(x, out),
        Condition::And(xs) | Condition::Or(xs) => xs.iter().for_each(|x| collect_items(x, out)),
        Condition::Exists(e) => {
            out.extend(e.morphism.codomain().ids());
            collect_items(&e.body, out);
        }
    }
}

fn rename_sets(c: &Condition, env: &mut Vec<(Id, Id)>, taken: &mut BTreeSet<Id>) -> Condition {
    match c {
        Condition::True => Condition::True,
        Condition::ExistsSet { sort, var, body } => {
            let fresh = fresh_id(var, taken);
            taken.insert(fresh.clone());
            env.push((var.clone(), fresh.clone()));
            let body = rename_sets(body, env, taken);
            env.pop();
            Condition::exists_set(*sort, fresh, body)
        }
        Condition::Not(x) => Condition::not(rename_sets(x, env, taken)),
        Condition::And(xs) => Condition::And(xs.iter().map(|x| rename_sets(x, env, taken)).collect()),
        Condition::Or(xs) => Condition::Or(xs.iter().map(|x| rename_sets(x, env, taken)).collect()),
        Condition::Exists(e) => {
            let r = |x: &Id| env.iter().rev().find(|(y, _)| y == x).map(|(_, z)| z.clone()).unwrap_or_else(|| x.clone());
            let gamma = e.constraint.map_sets(&r);
            Condition::exists(e.morphism.clone(), gamma, rename_sets(&e.body, env, taken))
        }
    }
}

fn gamma_star(g: &Constraint, c: &Graph) -> Result<Formula> {
    Ok(match g {
        Constraint::True => Formula::True,
        Constraint::Member { item, set } => match c.item(item) {
            Some(crate::graph::Item::Node(_)) => Formula::VertexIn(VTerm::Var(item.clone()), set.clone()),
            Some(crate::graph::Item::Edge(_)) => Formula::EdgeIn(item.clone(), set.clone()),
            None => return Err(Error::UnknownItem(item.to_string())),
        },
        Constraint::Path { .. } => return Err(Error::NotNormalForm("path predicate".into())),
        Constraint::Not(x) => Formula::not(gamma_star(x, c)?),
        Constraint::And(xs) => Formula::conj(xs.iter().map(|x| gamma_star(x, c)).collect::<Result<Vec<_>>>()?),
        Constraint::Or(xs) => Formula::disj(xs.iter().map(|x| gamma_star(x, c)).collect::<Result<Vec<_>>>()?),
    })
}

fn form_prime(c: &Condition, p: &Graph) -> Result<Formula> {
    Ok(match c {
        Condition::True => Formula::True,
        Condition::Not(x) => Formula::not(form_prime(x, p)?),
        Condition::And(xs) => Formula::conj(xs.iter().map(|x| form_prime(x, p)).collect::<Result<Vec<_>>>()?),
        Condition::Or(xs) => Formula::disj(xs.iter().map(|x| form_prime(x, p)).collect::<Result<Vec<_>>>()?),
        Condition::ExistsSet { sort, var, body } => {
            let s = if *sort == SetSort::Nodes { Sort::VertexSet } else { Sort::EdgeSet };
            Formula::exists(var.clone(), s, form_prime(body, p)?)
        }
        Condition::Exists(e) => {
            let a = &e.morphism;
            let q = a.codomain();
            if !a.is_inclusion() || e.constraint.has_path() {
                return Err(Error::NotNormalForm("non-inclusion morphism or path predicate".into()));
            }
            let gamma = gamma_star(&e.constraint, q)?;
            let rest = form_prime(&e.body, q)?;
            let new_node = (0..q.node_count()).find(|&i| p.node_index(&q.node(i).id).is_none());
            let new_edge = (0..q.edge_count()).find(|&i| p.edge_index(&q.edge(i).id).is_none());
            match (q.item_count() - p.item_count(), new_node, new_edge) {
                (0, _, _) => Formula::conj([gamma, rest]),
                (1, Some(i), None) => {
                    let n = q.node(i);
                    let mut parts: Vec<Formula> = p.nodes().iter().map(|u| Formula::not(Formula::VertexEq(VTerm::Var(n.id.clone()), VTerm::Var(u.id.clone())))).collect();
                    parts.extend([Formula::VertexLabel(VTerm::Var(n.id.clone()), n.label.clone()), gamma, rest]);
                    Formula::exists(n.id.clone(), Sort::Vertex, Formula::conj(parts))
                }
                (1, None, Some(i)) => {
                    let x = q.edge(i);
                    let mut parts: Vec<Formula> = p.edges().iter().map(|f| Formula::not(Formula::EdgeEq(x.id.clone(), f.id.clone()))).collect();
                    parts.extend([
                        Formula::EdgeLabel(x.id.clone(), x.label.clone()),
                        Formula::VertexEq(VTerm::Source(x.id.clone()), VTerm::Var(q.node(x.source).id.clone())),
                        Formula::VertexEq(VTerm::Target(x.id.clone()), VTerm::Var(q.node(x.target).id.clone())),
                        gamma,
                        rest,
                    ]);
                    Formula::exists(x.id.clone(), Sort::Edge, Formula::conj(parts))
                }
                _ => return Err(Error::NotNormalForm("a morphism adds more than one item".into())),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satisfy::graph_satisfies;
    use crate::testkit::*;
    use crate::universe::{enumerate, UniverseSpec};

    fn v(x: &str) -> VTerm {
        VTerm::Var(x.into())
    }

    fn universe() -> Vec<Arc<Graph>> {
        enumerate(&UniverseSpec::simple(3, true))
    }

    #[test]
    fn edge_existence() {
        let f = Formula::exists("e", Sort::Edge, Formula::True);
        assert!(mso_satisfies(&g(&["a", "b"], &[("x", "a", "b")]), &f).unwrap());
        assert!(!mso_satisfies(&g(&["a", "b"], &[]), &f).unwrap());
        // an edge between new nodes, or a loop on a new node
        let c = to_condition(&f, &Alphabet::default()).unwrap();
        let Condition::Or(options) = &c else { panic!("{c:?}") };
        assert_eq!(options.len(), 2);
    }

    #[test]
    fn free_variables_are_rejected() {
        let f = Formula::VertexEq(v("x"), v("x"));
        assert!(mso_satisfies(&Graph::empty(), &f).is_err());
        let bad = Formula::exists("x", Sort::Edge, Formula::VertexEq(v("x"), v("x")));
        assert!(bad.check_sentence().is_err());
    }

    #[test]
    fn path_formula_matches_paths() {
        for g in universe() {
            let ids: Vec<Id> = g.nodes().iter().map(|n| n.id.clone()).collect();
            for a in &ids {
                for b in &ids {
                    if a == b {
                        continue;
                    }
                    let mut k = 0;
                    let mut fresh = |base: &str| {
                        k += 1;
                        Id::from(format!("{base}{k}"))
                    };
                    let phi = path_formula(&Id::new("p"), &Id::new("q"), &[], &mut fresh);
                    let mut ev = Eval { g: &g, env: Vec::new() };
                    ev.env.push(("p".into(), Value::Vertex(g.node_index(a).unwrap())));
                    ev.env.push(("q".into(), Value::Vertex(g.node_index(b).unwrap())));
                    assert_eq!(ev.holds(&phi).unwrap(), g.path_exists(a, b, &[]).unwrap(), "{g} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn normal_form_and_back() {
        let alpha = Alphabet::default();
        for c in [emp(), col(), cyc(), edgeless(), separated()] {
            let n = normalize(&c, &alpha).unwrap();
            assert!(is_normal(&n));
            let f = to_formula(&n, &alpha).unwrap();
            f.check_sentence().unwrap();
            for g in universe() {
                let want = graph_satisfies(&g, &c).unwrap();
                assert_eq!(graph_satisfies(&g, &n).unwrap(), want, "normalize {g}");
                assert_eq!(mso_satisfies(&g, &f).unwrap(), want, "form {g}");
            }
        }
    }

    #[test]
    fn bipartite_formula_agrees_with_col() {
        let (x, y) = (Id::new("X"), Id::new("Y"));
        let inx = |t: VTerm| Formula::VertexIn(t, x.clone());
        let iny = |t: VTerm| Formula::VertexIn(t, y.clone());
        let partition = Formula::forall(
            "v",
            Sort::Vertex,
            Formula::and(Formula::or(inx(v("v")), iny(v("v"))), Formula::not(Formula::and(inx(v("v")), iny(v("v"))))),
        );
        let s = || VTerm::Source("e".into());
        let t = || VTerm::Target("e".into());
        let proper = Formula::forall(
            "e",
            Sort::Edge,
            Formula::implies(
                Formula::not(Formula::VertexEq(s(), t())),
                Formula::and(Formula::not(Formula::and(inx(s()), inx(t()))), Formula::not(Formula::and(iny(s()), iny(t())))),
            ),
        );
        let f = Formula::exists("X", Sort::VertexSet, Formula::exists("Y", Sort::VertexSet, Formula::and(partition, proper)));
        let c = to_condition(&f, &Alphabet::default()).unwrap();
        let col = col();
        for g in universe() {
            let want = graph_satisfies(&g, &col).unwrap();
            assert_eq!(mso_satisfies(&g, &f).unwrap(), want, "{g}");
            assert_eq!(graph_satisfies(&g, &c).unwrap(), want, "{g}");
        }
    }

    #[test]
    fn rename_apart_separates_binders() {
        let f = Formula::and(Formula::exists("x", Sort::Vertex, Formula::True), Formula::exists("x", Sort::Vertex, Formula::True));
        let r = f.rename_apart(&BTreeSet::new());
        let Formula::And(a, b) = &r else { panic!() };
        let (Formula::Exists(p, ..), Formula::Exists(q, ..)) = (&**a, &**b) else { panic!() };
        assert_ne!(p, q);
    }
}
