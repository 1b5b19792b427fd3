//! Helpers shared by unit tests: hand-built graphs and a naive graph enumerator.

use std::sync::Arc;

use crate::condition::{Condition, Constraint, SetSort};
use crate::graph::{Graph, GraphBuilder};
use crate::morphism::Morphism;
use crate::rewrite::Rule;

pub fn g(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Graph> {
    let mut b = GraphBuilder::new();
    for n in nodes {
        b = b.blank_node(*n);
    }
    for (id, s, t) in edges {
        b = b.blank_edge(*id, *s, *t);
    }
    Arc::new(b.build().unwrap())
}

pub fn inc(a: &Arc<Graph>, b: &Arc<Graph>) -> Morphism {
    Morphism::inclusion(a.clone(), b.clone()).unwrap()
}

/// Every blank graph on `0..=max_nodes` nodes with at most `max_edges` edges,
/// without removing isomorphic copies.
pub fn all_graphs(max_nodes: usize, max_edges: usize) -> Vec<Arc<Graph>> {
    let mut out = Vec::new();
    for n in 0..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        let mut chosen = Vec::new();
        multisets(&pairs, 0, max_edges, &mut chosen, &mut |es| {
            let mut b = GraphBuilder::new();
            for v in 0..n {
                b = b.blank_node(format!("n{v}"));
            }
            for (i, &(s, t)) in es.iter().enumerate() {
                b = b.blank_edge(format!("e{i}"), format!("n{s}"), format!("n{t}"));
            }
            out.push(Arc::new(b.build().unwrap()));
        });
    }
    out
}

fn multisets(
    pairs: &[(usize, usize)],
    from: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    visit(chosen);
    if left == 0 {
        return;
    }
    for i in from..pairs.len() {
        chosen.push(pairs[i]);
        multisets(pairs, i, left - 1, chosen, visit);
        chosen.pop();
    }
}

pub fn init() -> Rule {
    Rule::from_sides("init", g(&[], &[]), g(&["1"], &[]), Condition::True, Condition::True).unwrap()
}

/// `grow` with `ac_L = ¬tc`, where `tc` asks for three further nodes.
pub fn grow() -> Rule {
    let l = g(&["1"], &[]);
    let big = g(&["1", "a", "b", "c"], &[]);
    let tc = Condition::exists_simple(inc(&l, &big));
    Rule::from_sides("grow", l, g(&["1", "2"], &[("e", "1", "2")]), Condition::not(tc), Condition::True).unwrap()
}

pub fn delete() -> Rule {
    let l = g(&["1", "2"], &[("e", "1", "2")]);
    let into = g(&["1", "2", "3"], &[("e", "1", "2"), ("f", "3", "1")]);
    let out = g(&["1", "2", "3"], &[("e", "1", "2"), ("f", "2", "3")]);
    let ac = Condition::Or(vec![
        Condition::not(Condition::exists_simple(inc(&l, &into))),
        Condition::not(Condition::exists_simple(inc(&l, &out))),
    ]);
    Rule::from_sides("delete", l, g(&["1", "2"], &[]), ac, Condition::True).unwrap()
}

fn empty() -> Arc<Graph> {
    g(&[], &[])
}

pub fn emp() -> Condition {
    Condition::not(Condition::exists_simple(inc(&empty(), &g(&["v"], &[]))))
}

/// Two-colourability.
pub fn col() -> Condition {
    let v = g(&["v"], &[]);
    let vw = g(&["v", "w"], &[("e", "v", "w")]);
    let gamma1 = Constraint::and(vec![
        Constraint::or(vec![Constraint::member("v", "X"), Constraint::member("v", "Y")]),
        Constraint::not(Constraint::and(vec![Constraint::member("v", "X"), Constraint::member("v", "Y")])),
    ]);
    let gamma2 = Constraint::and(vec![
        Constraint::not(Constraint::and(vec![Constraint::member("v", "X"), Constraint::member("w", "X")])),
        Constraint::not(Constraint::and(vec![Constraint::member("v", "Y"), Constraint::member("w", "Y")])),
    ]);
    let body = Condition::And(vec![
        Condition::forall(inc(&empty(), &v), Constraint::True, Condition::exists(Morphism::identity(v.clone()), gamma1, Condition::True)),
        Condition::forall(inc(&empty(), &vw), Constraint::True, Condition::exists(Morphism::identity(vw.clone()), gamma2, Condition::True)),
    ]);
    Condition::exists_set(SetSort::Nodes, "X", Condition::exists_set(SetSort::Nodes, "Y", body))
}

/// Some pair of distinct nodes lies on a common cycle.
pub fn cyc() -> Condition {
    let vw = g(&["v", "w"], &[]);
    Condition::exists(
        inc(&empty(), &vw),
        Constraint::and(vec![Constraint::path("v", "w", []), Constraint::path("w", "v", [])]),
        Condition::True,
    )
}

pub fn edgeless() -> Condition {
    Condition::not(Condition::exists_simple(inc(&empty(), &g(&["v", "w"], &[("e", "v", "w")]))))
}

/// The running example: two node sets separating the ends of every path.
pub fn separated() -> Condition {
    let vw = g(&["v", "w"], &[]);
    let gamma = Constraint::and(vec![
        Constraint::and(vec![Constraint::member("v", "X"), Constraint::member("w", "Y")]),
        Constraint::not(Constraint::or(vec![Constraint::member("v", "Y"), Constraint::member("w", "X")])),
    ]);
    let id = Morphism::identity(vw.clone());
    let body = Condition::forall(
        inc(&empty(), &vw),
        Constraint::True,
        Condition::implies(
            Condition::exists(id.clone(), Constraint::path("v", "w", []), Condition::True),
            Condition::exists(id, gamma, Condition::True),
        ),
    );
    Condition::exists_set(SetSort::Nodes, "X", Condition::exists_set(SetSort::Nodes, "Y", body))
}
