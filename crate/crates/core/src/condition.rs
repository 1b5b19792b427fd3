//! Nested graph conditions with set quantifiers and interpretation constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{fresh_id, Graph, Id};
use crate::morphism::{for_each_injective, pinned, Morphism};

/// Whether a set variable ranges over node sets or edge sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetSort {
    Nodes,
    Edges,
}

/// Interpretation constraint attached to an existential.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    /// `item ∈ set`.
    Member { item: Id, set: Id },
    /// `path(from, to, not avoid)`; `avoid` is sorted and free of duplicates.
    Path { from: Id, to: Id, avoid: Vec<Id> },
    Not(Box<Constraint>),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
}

/// A nested graph condition over some context graph `P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    True,
    /// `∃_V X[c]` or `∃_E X[c]`.
    ExistsSet { sort: SetSort, var: Id, body: Box<Condition> },
    /// `∃(a: P ↪ C | γ, c)`.
    Exists(Box<Exists>),
    Not(Box<Condition>),
    And(Vec<Condition>),
    Or(Vec<Condition>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exists {
    pub morphism: Morphism,
    pub constraint: Constraint,
    pub body: Condition,
}

impl Constraint {
    pub fn falsity() -> Self {
        Constraint::Not(Box::new(Constraint::True))
    }

    pub fn member(item: impl Into<Id>, set: impl Into<Id>) -> Self {
        Constraint::Member {
            item: item.into(),
            set: set.into(),
        }
    }

    pub fn path(from: impl Into<Id>, to: impl Into<Id>, avoid: impl IntoIterator<Item = Id>) -> Self {
        let mut avoid: Vec<Id> = avoid.into_iter().collect();
        avoid.sort();
        avoid.dedup();
        Constraint::Path {
            from: from.into(),
            to: to.into(),
            avoid,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Constraint) -> Self {
        Constraint::Not(Box::new(c))
    }

    pub fn and(mut cs: Vec<Constraint>) -> Self {
        match cs.len() {
            0 => Constraint::True,
            1 => cs.pop().unwrap(),
            _ => Constraint::And(cs),
        }
    }

    pub fn or(mut cs: Vec<Constraint>) -> Self {
        match cs.len() {
            0 => Constraint::falsity(),
            1 => cs.pop().unwrap(),
            _ => Constraint::Or(cs),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Constraint::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Constraint::Not(b) if b.is_true())
    }

    pub fn has_path(&self) -> bool {
        match self {
            Constraint::Path { .. } => true,
            Constraint::True | Constraint::Member { .. } => false,
            Constraint::Not(c) => c.has_path(),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().any(|c| c.has_path()),
        }
    }

    /// Set variables mentioned by the constraint.
    pub fn set_vars(&self, out: &mut BTreeSet<Id>) {
        match self {
            Constraint::Member { set, .. } => {
                out.insert(set.clone());
            }
            Constraint::True | Constraint::Path { .. } => {}
            Constraint::Not(c) => c.set_vars(out),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.set_vars(out)),
        }
    }

    /// Item identifiers mentioned by the constraint.
    pub fn items(&self, out: &mut BTreeSet<Id>) {
        match self {
            Constraint::Member { item, .. } => {
                out.insert(item.clone());
            }
            Constraint::Path { from, to, avoid } => {
                out.insert(from.clone());
                out.insert(to.clone());
                out.extend(avoid.iter().cloned());
            }
            Constraint::True => {}
            Constraint::Not(c) => c.items(out),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.items(out)),
        }
    }

    /// Renames items; exclusion lists are re-sorted.
    pub fn map_items(&self, f: &mut dyn FnMut(&Id) -> Id) -> Constraint {
        match self {
            Constraint::True => Constraint::True,
            Constraint::Member { item, set } => Constraint::Member {
                item: f(item),
                set: set.clone(),
            },
            Constraint::Path { from, to, avoid } => {
                let avoid: Vec<Id> = avoid.iter().map(&mut *f).collect();
                Constraint::path(f(from), f(to), avoid)
            }
            Constraint::Not(c) => Constraint::not(c.map_items(f)),
            Constraint::And(cs) => Constraint::And(cs.iter().map(|c| c.map_items(f)).collect()),
            Constraint::Or(cs) => Constraint::Or(cs.iter().map(|c| c.map_items(f)).collect()),
        }
    }

    /// Renames set variables.
    pub fn map_sets(&self, f: &dyn Fn(&Id) -> Id) -> Constraint {
        match self {
            Constraint::Member { item, set } => Constraint::Member {
                item: item.clone(),
                set: f(set),
            },
            Constraint::True | Constraint::Path { .. } => self.clone(),
            Constraint::Not(c) => Constraint::not(c.map_sets(f)),
            Constraint::And(cs) => Constraint::And(cs.iter().map(|c| c.map_sets(f)).collect()),
            Constraint::Or(cs) => Constraint::Or(cs.iter().map(|c| c.map_sets(f)).collect()),
        }
    }

    /// Transports the constraint along a morphism `C → E`, renaming items of `C` to their images.
    pub fn along(&self, m: &Morphism) -> Constraint {
        let (dom, cod) = (m.domain(), m.codomain());
        self.map_items(&mut |id| match dom.item(id) {
            Some(item) => cod.item_id(m.item(item)).clone(),
            None => id.clone(),
        })
    }

    fn check(&self, c: &Graph) -> Result<()> {
        match self {
            Constraint::True => Ok(()),
            Constraint::Member { item, .. } => c
                .item(item)
                .map(|_| ())
                .ok_or_else(|| Error::UnknownItem(item.to_string())),
            Constraint::Path { from, to, avoid } => {
                for v in [from, to] {
                    c.node_index(v).ok_or_else(|| Error::UnknownNode(v.to_string()))?;
                }
                for e in avoid {
                    c.edge_index(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
                }
                Ok(())
            }
            Constraint::Not(x) => x.check(c),
            Constraint::And(xs) | Constraint::Or(xs) => xs.iter().try_for_each(|x| x.check(c)),
        }
    }
}

impl Condition {
    pub fn falsity() -> Self {
        Condition::Not(Box::new(Condition::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn and(mut cs: Vec<Condition>) -> Self {
        match cs.len() {
            0 => Condition::True,
            1 => cs.pop().unwrap(),
            _ => Condition::And(cs),
        }
    }

    pub fn or(mut cs: Vec<Condition>) -> Self {
        match cs.len() {
            0 => Condition::falsity(),
            1 => cs.pop().unwrap(),
            _ => Condition::Or(cs),
        }
    }

    /// `c ⇒ d`, i.e. `¬c ∨ d`.
    pub fn implies(c: Condition, d: Condition) -> Self {
        Condition::Or(vec![Condition::not(c), d])
    }

    /// `(c ⇒ d) ∧ (d ⇒ c)`.
    pub fn iff(c: Condition, d: Condition) -> Self {
        Condition::And(vec![
            Condition::implies(c.clone(), d.clone()),
            Condition::implies(d, c),
        ])
    }

    pub fn exists(morphism: Morphism, constraint: Constraint, body: Condition) -> Self {
        Condition::Exists(Box::new(Exists {
            morphism,
            constraint,
            body,
        }))
    }

    /// `∃(a)`.
    pub fn exists_simple(morphism: Morphism) -> Self {
        Condition::exists(morphism, Constraint::True, Condition::True)
    }

    /// `∀(a | γ, c)`, i.e. `¬∃(a | γ, ¬c)`.
    pub fn forall(morphism: Morphism, constraint: Constraint, body: Condition) -> Self {
        Condition::not(Condition::exists(morphism, constraint, Condition::not(body)))
    }

    pub fn exists_set(sort: SetSort, var: impl Into<Id>, body: Condition) -> Self {
        Condition::ExistsSet {
            sort,
            var: var.into(),
            body: Box::new(body),
        }
    }

    /// `∀_V X[c]` or `∀_E X[c]`.
    pub fn forall_set(sort: SetSort, var: impl Into<Id>, body: Condition) -> Self {
        Condition::not(Condition::exists_set(sort, var, Condition::not(body)))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Condition::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Condition::Not(b) if b.is_true())
    }

    /// Number of constructors, as a size measure.
    pub fn size(&self) -> usize {
        match self {
            Condition::True => 1,
            Condition::ExistsSet { body, .. } => 1 + body.size(),
            Condition::Exists(e) => 1 + e.body.size(),
            Condition::Not(c) => 1 + c.size(),
            Condition::And(cs) | Condition::Or(cs) => 1 + cs.iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    /// Nesting depth of graph existentials.
    pub fn depth(&self) -> usize {
        match self {
            Condition::True => 0,
            Condition::ExistsSet { body, .. } => body.depth(),
            Condition::Exists(e) => 1 + e.body.depth(),
            Condition::Not(c) => c.depth(),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    pub fn has_set_quantifier(&self) -> bool {
        match self {
            Condition::True => false,
            Condition::ExistsSet { .. } => true,
            Condition::Exists(e) => e.body.has_set_quantifier(),
            Condition::Not(c) => c.has_set_quantifier(),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().any(|c| c.has_set_quantifier()),
        }
    }

    /// Free set variables with the sorts they are used at, where known.
    pub fn free_set_vars(&self) -> BTreeSet<Id> {
        fn go(c: &Condition, bound: &mut Vec<Id>, out: &mut BTreeSet<Id>) {
            match c {
                Condition::True => {}
                Condition::ExistsSet { var, body, .. } => {
                    bound.push(var.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                Condition::Exists(e) => {
                    let mut vs = BTreeSet::new();
                    e.constraint.set_vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                    go(&e.body, bound, out);
                }
                Condition::Not(c) => go(c, bound, out),
                Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|c| go(c, bound, out)),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Checks that the condition is well formed over `context`.
    pub fn check(&self, context: &Graph) -> Result<()> {
        match self {
            Condition::True => Ok(()),
            Condition::ExistsSet { body, .. } => body.check(context),
            Condition::Exists(e) => {
                if **e.morphism.domain() != *context {
                    return Err(Error::InvalidCondition(format!(
                        "morphism domain {:?} differs from context {:?}",
                        e.morphism.domain(),
                        context
                    )));
                }
                if !e.morphism.is_injective() {
                    return Err(Error::NotInjective);
                }
                e.constraint.check(e.morphism.codomain())?;
                e.body.check(e.morphism.codomain())
            }
            Condition::Not(c) => c.check(context),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().try_for_each(|c| c.check(context)),
        }
    }

    /// Re-expresses a condition over `C` as one over `C′` through an isomorphism `iso: C → C′`.
    pub fn transport(&self, iso: &Morphism) -> Result<Condition> {
        let inv = iso.inverse()?;
        self.map_top(&mut |e| {
            Ok(Condition::exists(
                inv.then(&e.morphism)?,
                e.constraint.clone(),
                e.body.clone(),
            ))
        })
    }

    /// Rebuilds the condition, replacing each outermost existential by `f(existential)`.
    pub fn map_top(&self, f: &mut dyn FnMut(&Exists) -> Result<Condition>) -> Result<Condition> {
        Ok(match self {
            Condition::True => Condition::True,
            Condition::ExistsSet { sort, var, body } => Condition::ExistsSet {
                sort: *sort,
                var: var.clone(),
                body: Box::new(body.map_top(f)?),
            },
            Condition::Exists(e) => f(e)?,
            Condition::Not(c) => Condition::not(c.map_top(f)?),
            Condition::And(cs) => Condition::And(cs.iter().map(|c| c.map_top(f)).collect::<Result<_>>()?),
            Condition::Or(cs) => Condition::Or(cs.iter().map(|c| c.map_top(f)).collect::<Result<_>>()?),
        })
    }

    /// Renames bound set variables so that no two quantifiers bind the same
    /// name and no binder captures a free variable.
    pub fn uniquify_set_vars(&self) -> Condition {
        let mut taken: BTreeSet<Id> = self.free_set_vars();
        fn go(c: &Condition, env: &BTreeMap<Id, Id>, taken: &mut BTreeSet<Id>) -> Condition {
            let rename = |x: &Id| env.get(x).cloned().unwrap_or_else(|| x.clone());
            match c {
                Condition::True => Condition::True,
                Condition::ExistsSet { sort, var, body } => {
                    let fresh = fresh_id(var, taken);
                    taken.insert(fresh.clone());
                    let mut inner = env.clone();
                    inner.insert(var.clone(), fresh.clone());
                    Condition::ExistsSet {
                        sort: *sort,
                        var: fresh,
                        body: Box::new(go(body, &inner, taken)),
                    }
                }
                Condition::Exists(e) => Condition::exists(
                    e.morphism.clone(),
                    e.constraint.map_sets(&rename),
                    go(&e.body, env, taken),
                ),
                Condition::Not(x) => Condition::not(go(x, env, taken)),
                Condition::And(xs) => Condition::And(xs.iter().map(|x| go(x, env, taken)).collect()),
                Condition::Or(xs) => Condition::Or(xs.iter().map(|x| go(x, env, taken)).collect()),
            }
        }
        go(self, &BTreeMap::new(), &mut taken)
    }

    /// Whether every morphism is an inclusion.
    pub fn inclusions_only(&self) -> bool {
        match self {
            Condition::True => true,
            Condition::ExistsSet { body, .. } => body.inclusions_only(),
            Condition::Exists(e) => e.morphism.is_inclusion() && e.body.inclusions_only(),
            Condition::Not(c) => c.inclusions_only(),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().all(|c| c.inclusions_only()),
        }
    }
}

impl Condition {
    /// An equivalent condition whose morphisms are all inclusions.
    ///
    /// Each codomain is renamed so that images carry the names of their
    /// preimages; other items keep their names unless that would clash.
    pub fn with_inclusions(&self) -> Result<Condition> {
        self.map_top(&mut |e| {
            let a = &e.morphism;
            let (p, c) = (a.domain(), a.codomain());
            let mut taken = p.ids();
            let mut names: BTreeMap<Id, Id> = BTreeMap::new();
            for (i, pre) in a.node_preimages().into_iter().enumerate() {
                if let Some(j) = pre {
                    names.insert(c.node(i).id.clone(), p.node(j).id.clone());
                }
            }
            for (i, pre) in a.edge_preimages().into_iter().enumerate() {
                if let Some(j) = pre {
                    names.insert(c.edge(i).id.clone(), p.edge(j).id.clone());
                }
            }
            let others: Vec<Id> = c.nodes().iter().map(|n| &n.id).chain(c.edges().iter().map(|x| &x.id)).filter(|id| !names.contains_key(*id)).cloned().collect();
            for id in others {
                let fresh = fresh_id(&id, &taken);
                taken.insert(fresh.clone());
                names.insert(id, fresh);
            }
            let renamed = Arc::new(c.renamed(|id| names[id].clone())?);
            let iso = Morphism::new(
                c.clone(),
                renamed.clone(),
                c.nodes().iter().map(|n| renamed.node_index(&names[&n.id]).unwrap()).collect(),
                c.edges().iter().map(|x| renamed.edge_index(&names[&x.id]).unwrap()).collect(),
            )?;
            let body = e.body.transport(&iso)?.with_inclusions()?;
            Ok(Condition::exists(Morphism::inclusion(p.clone(), renamed)?, e.constraint.along(&iso), body))
        })
    }

    /// Equality up to renaming of bound set variables and of the items each
    /// existential introduces.
    pub fn alpha_equivalent(&self, other: &Condition) -> bool {
        alpha_eq(self, other, &mut Vec::new())
    }
}

// `env` pairs bound set variables of the left and right condition, innermost last
fn alpha_eq(a: &Condition, b: &Condition, env: &mut Vec<(Id, Id)>) -> bool {
    match (a, b) {
        (Condition::True, Condition::True) => true,
        (Condition::Not(x), Condition::Not(y)) => alpha_eq(x, y, env),
        (Condition::And(xs), Condition::And(ys)) | (Condition::Or(xs), Condition::Or(ys)) => {
            std::mem::discriminant(a) == std::mem::discriminant(b) && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq(x, y, env))
        }
        (Condition::ExistsSet { sort: s, var: x, body: c }, Condition::ExistsSet { sort: t, var: y, body: d }) => {
            if s != t {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let same = alpha_eq(c, d, env);
            env.pop();
            same
        }
        (Condition::Exists(e), Condition::Exists(f)) => {
            let (a, b) = (&e.morphism, &f.morphism);
            if **a.domain() != **b.domain() {
                return false;
            }
            let (c, d) = (a.codomain(), b.codomain());
            if c.node_count() != d.node_count() || c.edge_count() != d.edge_count() {
                return false;
            }
            let rename_sets = |x: &Id| env.iter().rev().find(|(l, _)| l == x).map(|(_, r)| r.clone()).unwrap_or_else(|| x.clone());
            let (fixed_nodes, fixed_edges) = pinned(a, b);
            let mut isos = Vec::new();
            let _ = for_each_injective::<()>(c, d, &fixed_nodes, &fixed_edges, &mut |n, m| {
                isos.push(Morphism::new_unchecked(c.clone(), d.clone(), n.to_vec(), m.to_vec()));
                ControlFlow::Continue(())
            });
            let gammas: Vec<Morphism> = isos.into_iter().filter(|iso| e.constraint.along(iso).map_sets(&rename_sets) == f.constraint).collect();
            gammas.iter().any(|iso| match e.body.transport(iso) {
                Ok(body) => alpha_eq(&body, &f.body, env),
                Err(_) => false,
            })
        }
        _ => false,
    }
}

/// A condition together with the graph it is stated over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rooted {
    pub context: Arc<Graph>,
    pub condition: Condition,
}

impl Rooted {
    pub fn new(context: Arc<Graph>, condition: Condition) -> Result<Self> {
        condition.check(&context)?;
        Ok(Rooted { context, condition })
    }

    /// A constraint: a condition over the empty graph.
    pub fn constraint(condition: Condition) -> Result<Self> {
        Rooted::new(Arc::new(Graph::empty()), condition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn two() -> Arc<Graph> {
        Arc::new(GraphBuilder::new().blank_node("v").blank_node("w").build().unwrap())
    }

    #[test]
    fn free_and_bound_set_vars() {
        let a = Morphism::from_empty(two());
        let c = Condition::exists_set(
            SetSort::Nodes,
            "X",
            Condition::exists(a, Constraint::And(vec![Constraint::member("v", "X"), Constraint::member("w", "Y")]), Condition::True),
        );
        assert_eq!(c.free_set_vars().into_iter().collect::<Vec<_>>(), vec![Id::new("Y")]);
        assert!(c.check(&Graph::empty()).is_ok());
        assert!(c.has_set_quantifier());
    }

    #[test]
    fn uniquify_renames_shadowing_binders() {
        let a = Morphism::from_empty(two());
        let inner = Condition::exists_set(
            SetSort::Nodes,
            "X",
            Condition::exists(a.clone(), Constraint::member("v", "X"), Condition::True),
        );
        let c = Condition::exists_set(
            SetSort::Nodes,
            "X",
            Condition::And(vec![inner, Condition::exists(a, Constraint::member("w", "X"), Condition::True)]),
        );
        let u = c.uniquify_set_vars();
        let Condition::ExistsSet { var, body, .. } = &u else { panic!() };
        assert_eq!(var.as_str(), "X");
        let Condition::And(parts) = &**body else { panic!() };
        let Condition::ExistsSet { var: inner_var, body: inner_body, .. } = &parts[0] else { panic!() };
        assert_eq!(inner_var.as_str(), "X_1");
        let Condition::Exists(e) = &**inner_body else { panic!() };
        assert_eq!(e.constraint, Constraint::member("v", "X_1"));
        let Condition::Exists(e) = &parts[1] else { panic!() };
        assert_eq!(e.constraint, Constraint::member("w", "X"));
    }

    #[test]
    fn check_rejects_unknown_items() {
        let a = Morphism::from_empty(two());
        let bad = Condition::exists(a, Constraint::path("v", "z", []), Condition::True);
        assert!(bad.check(&Graph::empty()).is_err());
    }
}
