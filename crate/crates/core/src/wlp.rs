//! Weakest liberal preconditions of rules.
//!
//! A postcondition is first shifted along the right-hand side of a rule,
//! giving a condition over `R`; that condition is then moved back to the
//! left-hand side, tracking which created items may belong to which set
//! variables. The precondition quantifies over all matches that satisfy the
//! dangling and application conditions.

use std::fmt;
use std::sync::Arc;

use crate::condition::{Condition, Constraint, Exists, SetSort};
use crate::error::Result;
use crate::gluing::{pushout, pushout_complement, shift_overlaps};
use crate::graph::{fresh_id, Alphabet, Graph, GraphBuilder, Id, Item};
use crate::morphism::Morphism;
use crate::rewrite::{Rule, Span};
use crate::simplify::simplify;

/// Which branch of a transformation produced a disjunct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// The `index`-th of `count` overlaps when shifting an existential.
    Overlap { index: usize, count: usize, object: Arc<Graph> },
    /// One choice of memberships of created items in a set variable.
    Membership { var: Id, members: Vec<Id> },
    /// The existential cannot be undone by the rule and becomes `false`.
    NoComplement { object: Arc<Graph> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub depth: usize,
    pub kind: TraceKind,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:indent$}", "", indent = 2 * self.depth)?;
        match &self.kind {
            TraceKind::Overlap { index, count, object } => write!(f, "overlap {}/{}: {}", index + 1, count, object),
            TraceKind::Membership { var, members } => {
                write!(f, "{} gains {{", var)?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("}")
            }
            TraceKind::NoComplement { object } => write!(f, "no pushout complement for {}", object),
        }
    }
}

#[derive(Default)]
struct Tracer {
    events: Option<Vec<TraceEvent>>,
}

impl Tracer {
    fn record(&mut self, depth: usize, kind: impl FnOnce() -> TraceKind) {
        if let Some(ev) = &mut self.events {
            ev.push(TraceEvent { depth, kind: kind() });
        }
    }
}

/// Shifts a condition over `P` along `p: P ↪ P′`.
pub fn shift(p: &Morphism, c: &Condition) -> Result<Condition> {
    shift_at(p, c, &mut Tracer::default(), 0)
}

fn shift_at(p: &Morphism, c: &Condition, tr: &mut Tracer, depth: usize) -> Result<Condition> {
    Ok(match c {
        Condition::True => Condition::True,
        Condition::ExistsSet { sort, var, body } => Condition::exists_set(*sort, var.clone(), shift_at(p, body, tr, depth)?),
        Condition::Not(x) => Condition::not(shift_at(p, x, tr, depth)?),
        Condition::And(xs) => Condition::And(xs.iter().map(|x| shift_at(p, x, tr, depth)).collect::<Result<_>>()?),
        Condition::Or(xs) => Condition::Or(xs.iter().map(|x| shift_at(p, x, tr, depth)).collect::<Result<_>>()?),
        Condition::Exists(e) => {
            let overlaps = shift_overlaps(p, &e.morphism)?;
            let count = overlaps.len();
            let mut out = Vec::with_capacity(count);
            for (index, o) in overlaps.into_iter().enumerate() {
                tr.record(depth, || TraceKind::Overlap {
                    index,
                    count,
                    object: o.b.codomain().clone(),
                });
                let body = shift_at(&o.s, &e.body, tr, depth + 1)?;
                out.push(Condition::exists(o.b, e.constraint.along(&o.s), body));
            }
            Condition::or(out)
        }
    })
}

/// The right-hand-side condition of a constraint: its shift along `∅ ↪ R`.
pub fn to_right_condition(rule: &Rule, c: &Condition) -> Result<Condition> {
    shift(&Morphism::from_empty(rule.right.clone()), c)
}

/// Moves a condition over `R` to an equivalent one over `L`.
pub fn to_left_condition(rule: &Rule, c: &Condition) -> Result<Condition> {
    left_at(&rule.span(), &c.uniquify_set_vars(), &[], &mut Tracer::default(), 0)
}

/// Variant of [`to_left_condition`] that starts from a set of memberships `M`
/// of created items (of `R`) in set variables.
pub fn to_left_condition_with(rule: &Rule, c: &Condition, memberships: &[(Item, Id)]) -> Result<Condition> {
    left_at(&rule.span(), c, memberships, &mut Tracer::default(), 0)
}

fn created(span: &Span) -> (Vec<usize>, Vec<usize>) {
    let kn = span.kr.node_preimages();
    let ke = span.kr.edge_preimages();
    (
        (0..span.right.node_count()).filter(|&i| kn[i].is_none()).collect(),
        (0..span.right.edge_count()).filter(|&i| ke[i].is_none()).collect(),
    )
}

fn left_at(span: &Span, c: &Condition, m: &[(Item, Id)], tr: &mut Tracer, depth: usize) -> Result<Condition> {
    Ok(match c {
        Condition::True => Condition::True,
        Condition::Not(x) => Condition::not(left_at(span, x, m, tr, depth)?),
        Condition::And(xs) => Condition::And(xs.iter().map(|x| left_at(span, x, m, tr, depth)).collect::<Result<_>>()?),
        Condition::Or(xs) => Condition::Or(xs.iter().map(|x| left_at(span, x, m, tr, depth)).collect::<Result<_>>()?),
        Condition::ExistsSet { sort, var, body } => {
            let (cn, ce) = created(span);
            let candidates: Vec<Item> = match sort {
                SetSort::Nodes => cn.into_iter().map(Item::Node).collect(),
                SetSort::Edges => ce.into_iter().map(Item::Edge).collect(),
            };
            let mut branches = Vec::with_capacity(1 << candidates.len());
            for mask in 0u64..(1 << candidates.len()) {
                let mut m2 = m.to_vec();
                let mut members = Vec::new();
                for (k, item) in candidates.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        m2.push((*item, var.clone()));
                        members.push(span.right.item_id(*item).clone());
                    }
                }
                tr.record(depth, || TraceKind::Membership { var: var.clone(), members });
                branches.push(left_at(span, body, &m2, tr, depth + 1)?);
            }
            Condition::exists_set(*sort, var.clone(), Condition::or(branches))
        }
        Condition::Exists(e) => left_exists(span, e, m, tr, depth)?,
    })
}

fn left_exists(span: &Span, e: &Exists, m: &[(Item, Id)], tr: &mut Tracer, depth: usize) -> Result<Condition> {
    let a = &e.morphism;
    let Some(comp) = pushout_complement(&span.kr, a)? else {
        tr.record(depth, || TraceKind::NoComplement {
            object: a.codomain().clone(),
        });
        return Ok(Condition::falsity());
    };
    // Y keeps the names of Z; deleted items of L are renamed apart by the pushout.
    let x = a.codomain().clone();
    let po = pushout(&comp.interface, &span.kl)?;
    let derived = Span {
        left: po.object.clone(),
        interface: comp.object.clone(),
        right: x.clone(),
        kl: po.left.clone(),
        kr: comp.inclusion.clone(),
    };
    let b = po.right;
    // memberships of created items are decided by M
    let a_pre_n = a.node_preimages();
    let a_pre_e = a.edge_preimages();
    let z = &comp.object;
    let gamma_m = resolve_memberships(&e.constraint, &mut |item, set| {
        if z.contains_id(item) {
            return None;
        }
        let y = match x.item(item)? {
            Item::Node(i) => Item::Node(a_pre_n[i]?),
            Item::Edge(i) => Item::Edge(a_pre_e[i]?),
        };
        Some(m.iter().any(|(it, s)| *it == y && s == set))
    });
    let gamma_m = map_paths(&gamma_m, &mut |from, to, avoid| lpath(&derived, from, to, avoid))?;
    let m2: Vec<(Item, Id)> = m.iter().map(|(it, s)| (a.item(*it), s.clone())).collect();
    let body = left_at(&derived, &e.body, &m2, tr, depth + 1)?;
    Ok(Condition::exists(b, gamma_m, body))
}

/// Replaces membership literals: `f(item, set)` returns the constant to use, or `None` to keep it.
pub fn resolve_memberships(g: &Constraint, f: &mut dyn FnMut(&Id, &Id) -> Option<bool>) -> Constraint {
    match g {
        Constraint::Member { item, set } => match f(item, set) {
            Some(true) => Constraint::True,
            Some(false) => Constraint::falsity(),
            None => g.clone(),
        },
        Constraint::True | Constraint::Path { .. } => g.clone(),
        Constraint::Not(x) => Constraint::not(resolve_memberships(x, f)),
        Constraint::And(xs) => Constraint::And(xs.iter().map(|x| resolve_memberships(x, f)).collect()),
        Constraint::Or(xs) => Constraint::Or(xs.iter().map(|x| resolve_memberships(x, f)).collect()),
    }
}

fn map_paths(g: &Constraint, f: &mut dyn FnMut(&Id, &Id, &[Id]) -> Result<Constraint>) -> Result<Constraint> {
    Ok(match g {
        Constraint::Path { from, to, avoid } => f(from, to, avoid)?,
        Constraint::True | Constraint::Member { .. } => g.clone(),
        Constraint::Not(x) => Constraint::not(map_paths(x, f)?),
        Constraint::And(xs) => Constraint::And(xs.iter().map(|x| map_paths(x, f)).collect::<Result<_>>()?),
        Constraint::Or(xs) => Constraint::Or(xs.iter().map(|x| map_paths(x, f)).collect::<Result<_>>()?),
    })
}

/// Decomposes `path(from, to, not avoid)` over `R` into a constraint over `L`
/// with the same value at corresponding matches and comatches.
pub fn lpath(span: &Span, from: &Id, to: &Id, avoid: &[Id]) -> Result<Constraint> {
    let r = &span.right;
    let l = &span.left;
    let v = r.node_index(from).ok_or_else(|| crate::Error::UnknownNode(from.to_string()))?;
    let w = r.node_index(to).ok_or_else(|| crate::Error::UnknownNode(to.to_string()))?;
    let mut mask_r = vec![false; r.edge_count()];
    for id in avoid {
        let i = r.edge_index(id).ok_or_else(|| crate::Error::UnknownEdge(id.to_string()))?;
        mask_r[i] = true;
    }
    // the avoided edges as seen from L: preserved ones from E, plus every deleted edge
    let kr_pre_e = span.kr.edge_preimages();
    let kl_pre_e = span.kl.edge_preimages();
    let mut mask_l = vec![false; l.edge_count()];
    for (i, &avoided) in mask_r.iter().enumerate() {
        if let (true, Some(k)) = (avoided, kr_pre_e[i]) {
            mask_l[span.kl.edge(k)] = true;
        }
    }
    for (i, pre) in kl_pre_e.iter().enumerate() {
        if pre.is_none() {
            mask_l[i] = true;
        }
    }
    let avoid_l: Vec<Id> = (0..l.edge_count()).filter(|&i| mask_l[i]).map(|i| l.edge(i).id.clone()).collect();

    let kr_pre_n = span.kr.node_preimages();
    // L node for each R node of the interface
    let in_l: Vec<Option<usize>> = (0..r.node_count()).map(|i| kr_pre_n[i].map(|k| span.kl.node(k))).collect();
    let kept: Vec<usize> = (0..r.node_count()).filter(|&i| in_l[i].is_some()).collect();
    let path_r = |x: usize, y: usize| r.has_path(x, y, &mask_r);
    let emit = |x: usize, y: usize| Constraint::path(l.node(in_l[x].unwrap()).id.clone(), l.node(in_l[y].unwrap()).id.clone(), avoid_l.clone());

    let prime = |x: usize, y: usize| -> Constraint {
        if path_r(x, y) {
            return Constraint::True;
        }
        match (in_l[x], in_l[y]) {
            (Some(_), Some(_)) => emit(x, y),
            (None, Some(_)) => Constraint::or(kept.iter().filter(|&&k| path_r(x, k)).map(|&k| emit(k, y)).collect()),
            (Some(_), None) => Constraint::or(kept.iter().filter(|&&k| path_r(k, y)).map(|&k| emit(x, k)).collect()),
            (None, None) => {
                let mut out = Vec::new();
                for &k1 in kept.iter().filter(|&&k| path_r(x, k)) {
                    for &k2 in kept.iter().filter(|&&k| path_r(k, y)) {
                        out.push(emit(k1, k2));
                    }
                }
                Constraint::or(out)
            }
        }
    };

    // interface pairs newly connected by the rule
    let mut jumps = Vec::new();
    for &x in &kept {
        for &y in &kept {
            if path_r(x, y) && !l.has_path(in_l[x].unwrap(), in_l[y].unwrap(), &mask_l) {
                jumps.push((x, y));
            }
        }
    }
    let mut disjuncts = vec![prime(v, w)];
    let mut used = vec![false; jumps.len()];
    let mut seq: Vec<(usize, usize)> = Vec::new();
    future(&jumps, &mut used, &mut seq, &mut |seq| {
        let mut parts = vec![prime(v, seq[0].0)];
        for pair in seq.windows(2) {
            parts.push(emit(pair[0].1, pair[1].0));
        }
        parts.push(prime(seq[seq.len() - 1].1, w));
        disjuncts.push(Constraint::and(parts));
    });
    Ok(Constraint::or(disjuncts))
}

fn future(jumps: &[(usize, usize)], used: &mut Vec<bool>, seq: &mut Vec<(usize, usize)>, visit: &mut dyn FnMut(&[(usize, usize)])) {
    for i in 0..jumps.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        seq.push(jumps[i]);
        visit(seq);
        future(jumps, used, seq, visit);
        seq.pop();
        used[i] = false;
    }
}

/// `Dang(r)`: no edge outside the match is attached to a node the rule deletes.
pub fn dangling_condition(rule: &Rule, alphabet: &Alphabet) -> Result<Condition> {
    let l = &rule.left;
    let kl = rule.kl();
    let mut taken = l.ids();
    let edge_id = fresh_id("d", &taken);
    taken.insert(edge_id.clone());
    let node_id = fresh_id("n", &taken);
    let base = || {
        let mut b = GraphBuilder::new();
        for n in l.nodes() {
            b.add_node(n.id.clone(), n.label.clone());
        }
        for e in l.edges() {
            b.add_edge(e.id.clone(), l.node(e.source).id.clone(), l.node(e.target).id.clone(), e.label.clone());
        }
        b
    };
    let mut extensions: Vec<Graph> = Vec::new();
    for el in &alphabet.edge_labels {
        for s in l.nodes() {
            for t in l.nodes() {
                let mut b = base();
                b.add_edge(edge_id.clone(), s.id.clone(), t.id.clone(), el.clone());
                extensions.push(b.build()?);
            }
        }
        for nl in &alphabet.node_labels {
            for u in l.nodes() {
                for outward in [true, false] {
                    let mut b = base();
                    b.add_node(node_id.clone(), nl.clone());
                    let (s, t) = if outward { (u.id.clone(), node_id.clone()) } else { (node_id.clone(), u.id.clone()) };
                    b.add_edge(edge_id.clone(), s, t, el.clone());
                    extensions.push(b.build()?);
                }
            }
        }
    }
    let mut parts = Vec::new();
    for ext in extensions {
        let inc = Morphism::inclusion(l.clone(), Arc::new(ext))?;
        if pushout_complement(kl, &inc)?.is_none() {
            parts.push(Condition::not(Condition::exists_simple(inc)));
        }
    }
    Ok(Condition::and(parts))
}

fn applicable_at_match(rule: &Rule, alphabet: &Alphabet) -> Result<Condition> {
    Ok(Condition::and(vec![
        dangling_condition(rule, alphabet)?,
        rule.ac_left.clone(),
        to_left_condition(rule, &rule.ac_right)?,
    ]))
}

/// `App(ℛ)`: some rule of the set has an applicable match. `App(∅)` is `false`.
pub fn applicability(rules: &[Arc<Rule>], alphabet: &Alphabet) -> Result<Condition> {
    let mut parts = Vec::new();
    for r in rules {
        parts.push(Condition::exists(
            Morphism::from_empty(r.left.clone()),
            Constraint::True,
            applicable_at_match(r, alphabet)?,
        ));
    }
    Ok(simplify(&Condition::or(parts)))
}

/// Output of [`precondition_traced`].
#[derive(Clone, Debug)]
pub struct Traced {
    pub condition: Condition,
    pub trace: Vec<TraceEvent>,
}

/// `Pre(r, c)`: every applicable match yields a graph satisfying `c`.
pub fn precondition(rule: &Rule, c: &Condition, alphabet: &Alphabet) -> Result<Condition> {
    precondition_raw(rule, c, alphabet, &mut Tracer::default()).map(|c| simplify(&c))
}

/// Unsimplified precondition, keeping every overlap and membership disjunct.
pub fn precondition_unsimplified(rule: &Rule, c: &Condition, alphabet: &Alphabet) -> Result<Condition> {
    precondition_raw(rule, c, alphabet, &mut Tracer::default())
}

pub fn precondition_traced(rule: &Rule, c: &Condition, alphabet: &Alphabet) -> Result<Traced> {
    let mut tr = Tracer { events: Some(Vec::new()) };
    let raw = precondition_raw(rule, c, alphabet, &mut tr)?;
    Ok(Traced {
        condition: simplify(&raw),
        trace: tr.events.unwrap_or_default(),
    })
}

fn precondition_raw(rule: &Rule, c: &Condition, alphabet: &Alphabet, tr: &mut Tracer) -> Result<Condition> {
    let c = c.uniquify_set_vars();
    let right = shift_at(&Morphism::from_empty(rule.right.clone()), &c, tr, 0)?;
    let left = left_at(&rule.span(), &right, &[], tr, 0)?;
    Ok(Condition::forall(
        Morphism::from_empty(rule.left.clone()),
        Constraint::True,
        Condition::implies(applicable_at_match(rule, alphabet)?, left),
    ))
}

/// `wlp(r, c) = Pre(r, c) ∨ ¬App({r})`.
pub fn wlp(rule: &Arc<Rule>, c: &Condition, alphabet: &Alphabet) -> Result<Condition> {
    Ok(simplify(&Condition::Or(vec![
        precondition(rule, c, alphabet)?,
        Condition::not(applicability(std::slice::from_ref(rule), alphabet)?),
    ])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satisfy::{eval_constraint, graph_satisfies, Interpretation};
    use crate::testkit::*;

    fn blank() -> Alphabet {
        Alphabet::default()
    }

    fn check_pre(rule: Rule, c: &Condition, nodes: usize, edges: usize) {
        let rule = Arc::new(rule);
        let pre = precondition(&rule, c, &blank()).unwrap();
        let w = wlp(&rule, c, &blank()).unwrap();
        let app = applicability(std::slice::from_ref(&rule), &blank()).unwrap();
        for host in all_graphs(nodes, edges) {
            let ds = rule.derivations(&host).unwrap();
            let expected = ds.iter().all(|d| graph_satisfies(&d.result, c).unwrap());
            assert_eq!(graph_satisfies(&host, &pre).unwrap(), expected, "Pre of {} on {host}", rule.name);
            assert_eq!(graph_satisfies(&host, &w).unwrap(), expected, "wlp of {} on {host}", rule.name);
            assert_eq!(graph_satisfies(&host, &app).unwrap(), !ds.is_empty(), "App of {} on {host}", rule.name);
        }
    }

    #[test]
    fn precondition_of_init() {
        check_pre(init(), &col(), 3, 3);
        check_pre(init(), &emp(), 3, 2);
    }

    #[test]
    fn precondition_of_grow() {
        check_pre(grow(), &col(), 3, 3);
        check_pre(grow(), &separated(), 3, 3);
        check_pre(grow(), &cyc(), 3, 3);
    }

    #[test]
    fn precondition_of_delete() {
        check_pre(delete(), &cyc(), 3, 3);
        check_pre(delete(), &Condition::not(cyc()), 3, 3);
        check_pre(delete(), &edgeless(), 3, 3);
    }

    #[test]
    fn precondition_of_node_deletion() {
        let r = Rule::from_sides("drop", g(&["1", "2"], &[("e", "1", "2")]), g(&["1"], &[]), Condition::True, Condition::True).unwrap();
        check_pre(r.clone(), &cyc(), 3, 3);
        check_pre(r, &col(), 3, 3);
    }

    // consecutive edges get different colours
    fn alternating() -> Condition {
        let e = g(&[], &[]);
        let path2 = g(&["u", "v", "w"], &[("a", "u", "v"), ("b", "v", "w")]);
        let differ = Constraint::not(Constraint::or(vec![
            Constraint::and(vec![Constraint::member("a", "X"), Constraint::member("b", "X")]),
            Constraint::and(vec![
                Constraint::not(Constraint::member("a", "X")),
                Constraint::not(Constraint::member("b", "X")),
            ]),
        ]));
        Condition::exists_set(
            SetSort::Edges,
            "X",
            Condition::forall(inc(&e, &path2), Constraint::True, Condition::exists(Morphism::identity(path2.clone()), differ, Condition::True)),
        )
    }

    #[test]
    fn precondition_with_edge_sets() {
        check_pre(grow(), &alternating(), 3, 3);
        check_pre(delete(), &alternating(), 3, 3);
    }

    #[test]
    fn precondition_with_right_condition() {
        let l = g(&["1"], &[]);
        let r = g(&["1", "2"], &[("e", "1", "2")]);
        let rx = g(&["1", "2", "x"], &[("e", "1", "2")]);
        let ac_r = Condition::exists(inc(&r, &rx), Constraint::path("x", "1", []), Condition::True);
        let rule = Rule::new("reach", l.clone(), l, r, Condition::True, ac_r).unwrap();
        check_pre(rule.clone(), &col(), 3, 3);
        check_pre(rule, &cyc(), 3, 3);
    }

    #[test]
    fn seven_overlaps_in_running_example() {
        let r = grow();
        let Condition::ExistsSet { body, .. } = separated() else { unreachable!() };
        let Condition::ExistsSet { body, .. } = *body else { unreachable!() };
        let Condition::Not(inner) = *body else { unreachable!() };
        let shifted = to_right_condition(&r, &inner).unwrap();
        let Condition::Or(parts) = shifted else { panic!("expected a disjunction") };
        assert_eq!(parts.len(), 7);
    }

    #[test]
    fn one_membership_choice_survives() {
        let r = grow();
        let raw = to_left_condition(&r, &to_right_condition(&r, &separated()).unwrap()).unwrap();
        let Condition::ExistsSet { body, .. } = raw else { panic!() };
        let Condition::Or(xs) = *body else { panic!() };
        let mut alive = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            let Condition::ExistsSet { body, .. } = x else { panic!() };
            let Condition::Or(ys) = &**body else { panic!() };
            for (j, y) in ys.iter().enumerate() {
                if !simplify(y).is_false() {
                    alive.push((i, j));
                }
            }
        }
        // mask bit 0 is node 2: only `2 ∈ Y` survives
        assert_eq!(alive, vec![(0, 1)]);
    }

    #[test]
    fn lpath_agrees_with_comatch() {
        let rules = [grow(), delete(), Rule::from_sides("swap", g(&["1", "2"], &[("e", "1", "2")]), g(&["1", "2", "3"], &[("f", "2", "1"), ("h", "1", "3")]), Condition::True, Condition::True).unwrap()];
        for r in &rules {
            let span = r.span();
            let right = &r.right;
            for host in all_graphs(3, 3) {
                for d in r.derivations(&host).unwrap() {
                    for v in right.nodes() {
                        for w in right.nodes() {
                            for mask in 0u32..(1 << right.edge_count()) {
                                let avoid: Vec<Id> = (0..right.edge_count()).filter(|i| mask >> i & 1 == 1).map(|i| right.edge(i).id.clone()).collect();
                                let p = Constraint::path(v.id.clone(), w.id.clone(), avoid.clone());
                                let lp = lpath(&span, &v.id, &w.id, &avoid).unwrap();
                                let i = Interpretation::new();
                                assert_eq!(
                                    eval_constraint(&lp, &d.matching, &i).unwrap(),
                                    eval_constraint(&p, &d.comatch, &i).unwrap(),
                                    "{} {p:?} on {host}",
                                    r.name
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn delete_is_applicable_where_its_condition_holds() {
        let r = Arc::new(delete());
        let app = applicability(std::slice::from_ref(&r), &blank()).unwrap();
        let expected = Condition::exists(Morphism::from_empty(r.left.clone()), Constraint::True, r.ac_left.clone());
        assert_eq!(app, simplify(&expected));
    }
}
