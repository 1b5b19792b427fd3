//! Satisfaction of conditions by graph morphisms.

use std::ops::ControlFlow;

use crate::condition::{Condition, Constraint, SetSort};
use crate::error::{Error, Result};
use crate::graph::{Graph, Id, Item};
use crate::morphism::{for_each_injective, Morphism};

/// Largest number of nodes or edges a host graph may have when set variables are in play.
pub const MAX_SET_ITEMS: usize = 63;

/// A set of host nodes or edges, as a bitset over their indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SetValue {
    pub sort: SetSort,
    pub bits: u64,
}

impl SetValue {
    pub fn contains(&self, item: Item) -> bool {
        match (self.sort, item) {
            (SetSort::Nodes, Item::Node(i)) | (SetSort::Edges, Item::Edge(i)) => self.bits >> i & 1 == 1,
            _ => false,
        }
    }

    /// Members as identifiers of `g`.
    pub fn members(&self, g: &Graph) -> Vec<Id> {
        let n = match self.sort {
            SetSort::Nodes => g.node_count(),
            SetSort::Edges => g.edge_count(),
        };
        (0..n)
            .filter(|&i| self.bits >> i & 1 == 1)
            .map(|i| match self.sort {
                SetSort::Nodes => g.node(i).id.clone(),
                SetSort::Edges => g.edge(i).id.clone(),
            })
            .collect()
    }

    pub fn from_ids(g: &Graph, sort: SetSort, ids: &[Id]) -> Result<SetValue> {
        let mut bits = 0u64;
        for id in ids {
            let i = match sort {
                SetSort::Nodes => g.node_index(id).ok_or_else(|| Error::UnknownNode(id.to_string()))?,
                SetSort::Edges => g.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string()))?,
            };
            if i >= 64 {
                return Err(Error::TooManyItems(i + 1));
            }
            bits |= 1 << i;
        }
        Ok(SetValue { sort, bits })
    }
}

/// Partial assignment of set variables to host sets; later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    bindings: Vec<(Id, SetValue)>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<Id>, value: SetValue) -> Self {
        self.bindings.push((var.into(), value));
        self
    }

    pub fn bind(&mut self, var: Id, value: SetValue) {
        self.bindings.push((var, value));
    }

    pub fn get(&self, var: &str) -> Option<&SetValue> {
        self.bindings.iter().rev().find(|(v, _)| v.as_str() == var).map(|(_, s)| s)
    }

    pub fn bindings(&self) -> &[(Id, SetValue)] {
        &self.bindings
    }

    fn push(&mut self, var: Id, value: SetValue) {
        self.bindings.push((var, value));
    }

    fn pop(&mut self) {
        self.bindings.pop();
    }
}

/// Value of `γ` under morphism `q: C → G` and interpretation `I`.
///
/// The constraint is false outright when it mentions a variable that `I` leaves undefined.
pub fn eval_constraint(gamma: &Constraint, q: &Morphism, interp: &Interpretation) -> Result<bool> {
    let mut vars = Default::default();
    gamma.set_vars(&mut vars);
    if vars.iter().any(|v: &Id| interp.get(v).is_none()) {
        return Ok(false);
    }
    let view = View {
        c: q.domain(),
        g: q.codomain(),
        nodes: q.node_map(),
        edges: q.edge_map(),
    };
    eval_defined(gamma, &view, interp)
}

struct View<'a> {
    c: &'a Graph,
    g: &'a Graph,
    nodes: &'a [usize],
    edges: &'a [usize],
}

impl View<'_> {
    fn image(&self, id: &Id) -> Result<Item> {
        match self.c.item(id) {
            Some(Item::Node(i)) => Ok(Item::Node(self.nodes[i])),
            Some(Item::Edge(i)) => Ok(Item::Edge(self.edges[i])),
            None => Err(Error::UnknownItem(id.to_string())),
        }
    }

    fn node_image(&self, id: &Id) -> Result<usize> {
        self.c
            .node_index(id)
            .map(|i| self.nodes[i])
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }
}

fn eval_defined(gamma: &Constraint, view: &View<'_>, interp: &Interpretation) -> Result<bool> {
    Ok(match gamma {
        Constraint::True => true,
        Constraint::Member { item, set } => {
            let value = interp.get(set).expect("checked by caller");
            value.contains(view.image(item)?)
        }
        Constraint::Path { from, to, avoid } => {
            let mut mask = vec![false; view.g.edge_count()];
            for e in avoid {
                match view.image(e)? {
                    Item::Edge(j) => mask[j] = true,
                    Item::Node(_) => return Err(Error::UnknownEdge(e.to_string())),
                }
            }
            view.g.has_path(view.node_image(from)?, view.node_image(to)?, &mask)
        }
        Constraint::Not(c) => !eval_defined(c, view, interp)?,
        Constraint::And(cs) => {
            for c in cs {
                if !eval_defined(c, view, interp)? {
                    return Ok(false);
                }
            }
            true
        }
        Constraint::Or(cs) => {
            for c in cs {
                if eval_defined(c, view, interp)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

fn constraint_value(gamma: &Constraint, view: &View<'_>, interp: &Interpretation) -> Result<bool> {
    if gamma.is_true() {
        return Ok(true);
    }
    let mut vars = Default::default();
    gamma.set_vars(&mut vars);
    if vars.iter().any(|v: &Id| interp.get(v).is_none()) {
        return Ok(false);
    }
    eval_defined(gamma, view, interp)
}

fn check_size(g: &Graph, c: &Condition) -> Result<()> {
    if c.has_set_quantifier() && (g.node_count() > MAX_SET_ITEMS || g.edge_count() > MAX_SET_ITEMS) {
        return Err(Error::TooManyItems(g.node_count().max(g.edge_count())));
    }
    Ok(())
}

/// Whether `p: P → G` satisfies `c` (a condition over `P`) under `I`.
pub fn satisfies(c: &Condition, p: &Morphism, interp: &Interpretation) -> Result<bool> {
    check_size(p.codomain(), c)?;
    let mut interp = interp.clone();
    let mut ev = Evaluator { g: p.codomain() };
    ev.eval(c, p.domain(), p.node_map(), p.edge_map(), &mut interp)
}

/// Whether `G` satisfies the constraint `c` (a condition over the empty graph).
pub fn graph_satisfies(g: &Graph, c: &Condition) -> Result<bool> {
    check_size(g, c)?;
    let mut ev = Evaluator { g };
    ev.eval(c, &Graph::empty(), &[], &[], &mut Interpretation::new())
}

struct Evaluator<'a> {
    g: &'a Graph,
}

impl Evaluator<'_> {
    fn eval(&mut self, c: &Condition, p: &Graph, pn: &[usize], pe: &[usize], interp: &mut Interpretation) -> Result<bool> {
        match c {
            Condition::True => Ok(true),
            Condition::Not(x) => Ok(!self.eval(x, p, pn, pe, interp)?),
            Condition::And(xs) => {
                for x in xs {
                    if !self.eval(x, p, pn, pe, interp)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Condition::Or(xs) => {
                for x in xs {
                    if self.eval(x, p, pn, pe, interp)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Condition::ExistsSet { sort, var, body } => {
                let n = match sort {
                    SetSort::Nodes => self.g.node_count(),
                    SetSort::Edges => self.g.edge_count(),
                };
                for bits in 0..(1u64 << n) {
                    interp.push(var.clone(), SetValue { sort: *sort, bits });
                    let r = self.eval(body, p, pn, pe, interp);
                    interp.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Condition::Exists(e) => {
                let a = &e.morphism;
                if *a.domain().as_ref() != *p {
                    return Err(Error::DomainMismatch);
                }
                let cg = a.codomain();
                let mut fixed_nodes = vec![None; cg.node_count()];
                for (i, &j) in a.node_map().iter().enumerate() {
                    fixed_nodes[j] = Some(pn[i]);
                }
                let mut fixed_edges = vec![None; cg.edge_count()];
                for (i, &j) in a.edge_map().iter().enumerate() {
                    fixed_edges[j] = Some(pe[i]);
                }
                let g = self.g;
                let mut err = None;
                let found = for_each_injective(cg, g, &fixed_nodes, &fixed_edges, &mut |qn, qe| {
                    let view = View { c: cg, g, nodes: qn, edges: qe };
                    let ok = constraint_value(&e.constraint, &view, interp)
                        .and_then(|ok| if ok { self_eval(g, &e.body, cg, qn, qe, interp) } else { Ok(false) });
                    match ok {
                        Ok(true) => ControlFlow::Break(()),
                        Ok(false) => ControlFlow::Continue(()),
                        Err(x) => {
                            err = Some(x);
                            ControlFlow::Break(())
                        }
                    }
                });
                match err {
                    Some(x) => Err(x),
                    None => Ok(found.is_break()),
                }
            }
        }
    }
}

fn self_eval(g: &Graph, c: &Condition, p: &Graph, pn: &[usize], pe: &[usize], interp: &mut Interpretation) -> Result<bool> {
    Evaluator { g }.eval(c, p, pn, pe, interp)
}

/// Evidence for a satisfied condition: the choices made at existential positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Holds without further choices (`true`, or a negation checked exhaustively).
    Holds,
    Set {
        var: Id,
        members: Vec<Id>,
        then: Box<Witness>,
    },
    Match {
        /// Pairs of context-codomain identifier and host identifier.
        assignment: Vec<(Id, Id)>,
        then: Box<Witness>,
    },
    All(Vec<Witness>),
    Branch {
        index: usize,
        then: Box<Witness>,
    },
}

/// A witness for `G ⊨ c`, or `None` if `G` does not satisfy the constraint.
pub fn explain(g: &Graph, c: &Condition) -> Result<Option<Witness>> {
    check_size(g, c)?;
    explain_at(g, c, &Graph::empty(), &[], &[], &mut Interpretation::new())
}

fn explain_at(g: &Graph, c: &Condition, p: &Graph, pn: &[usize], pe: &[usize], interp: &mut Interpretation) -> Result<Option<Witness>> {
    Ok(match c {
        Condition::True => Some(Witness::Holds),
        Condition::Not(_) => self_eval(g, c, p, pn, pe, interp)?.then_some(Witness::Holds),
        Condition::And(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                match explain_at(g, x, p, pn, pe, interp)? {
                    Some(w) => parts.push(w),
                    None => return Ok(None),
                }
            }
            Some(Witness::All(parts))
        }
        Condition::Or(xs) => {
            for (index, x) in xs.iter().enumerate() {
                if let Some(w) = explain_at(g, x, p, pn, pe, interp)? {
                    return Ok(Some(Witness::Branch { index, then: Box::new(w) }));
                }
            }
            None
        }
        Condition::ExistsSet { sort, var, body } => {
            let n = match sort {
                SetSort::Nodes => g.node_count(),
                SetSort::Edges => g.edge_count(),
            };
            for bits in 0..(1u64 << n) {
                let value = SetValue { sort: *sort, bits };
                interp.push(var.clone(), value);
                let r = explain_at(g, body, p, pn, pe, interp);
                interp.pop();
                if let Some(w) = r? {
                    return Ok(Some(Witness::Set {
                        var: var.clone(),
                        members: value.members(g),
                        then: Box::new(w),
                    }));
                }
            }
            None
        }
        Condition::Exists(e) => {
            let a = &e.morphism;
            let cg = a.codomain();
            let mut fixed_nodes = vec![None; cg.node_count()];
            for (i, &j) in a.node_map().iter().enumerate() {
                fixed_nodes[j] = Some(pn[i]);
            }
            let mut fixed_edges = vec![None; cg.edge_count()];
            for (i, &j) in a.edge_map().iter().enumerate() {
                fixed_edges[j] = Some(pe[i]);
            }
            let mut out: Result<Option<Witness>> = Ok(None);
            let _ = for_each_injective(cg, g, &fixed_nodes, &fixed_edges, &mut |qn, qe| {
                let view = View { c: cg, g, nodes: qn, edges: qe };
                let step = constraint_value(&e.constraint, &view, interp).and_then(|ok| {
                    if ok {
                        explain_at(g, &e.body, cg, qn, qe, interp)
                    } else {
                        Ok(None)
                    }
                });
                match step {
                    Ok(Some(w)) => {
                        let mut assignment: Vec<(Id, Id)> = cg
                            .nodes()
                            .iter()
                            .enumerate()
                            .map(|(i, n)| (n.id.clone(), g.node(qn[i]).id.clone()))
                            .collect();
                        assignment.extend(cg.edges().iter().enumerate().map(|(i, x)| (x.id.clone(), g.edge(qe[i]).id.clone())));
                        out = Ok(Some(Witness::Match { assignment, then: Box::new(w) }));
                        ControlFlow::Break(())
                    }
                    Ok(None) => ControlFlow::Continue(()),
                    Err(x) => {
                        out = Err(x);
                        ControlFlow::Break(())
                    }
                }
            });
            out?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use std::sync::Arc;

    fn graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Graph> {
        let mut b = GraphBuilder::new();
        for n in nodes {
            b = b.blank_node(*n);
        }
        for (id, s, t) in edges {
            b = b.blank_edge(*id, *s, *t);
        }
        Arc::new(b.build().unwrap())
    }

    // ∃_V X[∀(v w, ∃(v→w) ⇒ ∃(v w | not(v∈X ⇔ w∈X)))] restricted to edges between distinct nodes
    fn two_colourable() -> Condition {
        let vw = graph(&["v", "w"], &[]);
        let vew = graph(&["v", "w"], &[("e", "v", "w")]);
        let x = |n: &str| Constraint::member(n, "X");
        let differ = Constraint::Or(vec![
            Constraint::And(vec![x("v"), Constraint::not(x("w"))]),
            Constraint::And(vec![Constraint::not(x("v")), x("w")]),
        ]);
        Condition::exists_set(
            SetSort::Nodes,
            "X",
            Condition::forall(
                Morphism::from_empty(vw.clone()),
                Constraint::True,
                Condition::implies(
                    Condition::exists_simple(Morphism::inclusion(vw.clone(), vew).unwrap()),
                    Condition::exists(Morphism::identity(vw), differ, Condition::True),
                ),
            ),
        )
    }

    #[test]
    fn odd_cycle_is_not_two_colourable() {
        let tri = graph(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a")]);
        let sq = graph(&["a", "b", "c", "d"], &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "d"), ("u", "d", "a")]);
        let c = two_colourable();
        assert!(!graph_satisfies(&tri, &c).unwrap());
        assert!(graph_satisfies(&sq, &c).unwrap());
        let w = explain(&sq, &c).unwrap().unwrap();
        let Witness::Set { members, .. } = w else { panic!() };
        assert_eq!(members.len(), 2);
    }

    #[test]
    fn undefined_variable_makes_constraint_false() {
        let g = graph(&["a"], &[]);
        let id = Morphism::identity(g.clone());
        let gamma = Constraint::not(Constraint::member("a", "X"));
        assert!(!eval_constraint(&gamma, &id, &Interpretation::new()).unwrap());
        let empty = SetValue { sort: SetSort::Nodes, bits: 0 };
        assert!(eval_constraint(&gamma, &id, &Interpretation::new().with("X", empty)).unwrap());
    }

    #[test]
    fn path_constraints_follow_the_match() {
        let host = graph(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c")]);
        let c = graph(&["v", "w"], &[]);
        let cond = Condition::exists(Morphism::from_empty(c.clone()), Constraint::path("v", "w", []), Condition::True);
        assert!(graph_satisfies(&host, &cond).unwrap());
        // a node with a path to itself only
        let strict = Condition::exists(
            Morphism::from_empty(c),
            Constraint::And(vec![Constraint::path("v", "w", []), Constraint::path("w", "v", [])]),
            Condition::True,
        );
        assert!(!graph_satisfies(&host, &strict).unwrap());
    }

    #[test]
    fn nested_match_extends_outer_one() {
        let host = graph(&["a", "b"], &[("x", "a", "b")]);
        let one = graph(&["1"], &[]);
        let out = graph(&["1", "2"], &[("e", "1", "2")]);
        let has_out = Condition::exists_simple(Morphism::inclusion(one.clone(), out).unwrap());
        let at_a = Morphism::new(one.clone(), host.clone(), vec![0], vec![]).unwrap();
        let at_b = Morphism::new(one, host, vec![1], vec![]).unwrap();
        assert!(satisfies(&has_out, &at_a, &Interpretation::new()).unwrap());
        assert!(!satisfies(&has_out, &at_b, &Interpretation::new()).unwrap());
    }
}
