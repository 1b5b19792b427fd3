//! Equivalence-preserving clean-up of conditions and constraints.

use crate::condition::{Condition, Constraint};

/// Constant folding, flattening, double-negation removal and duplicate removal.
pub fn simplify_constraint(g: &Constraint) -> Constraint {
    match g {
        Constraint::True | Constraint::Member { .. } => g.clone(),
        Constraint::Path { from, to, .. } if from == to => Constraint::True,
        Constraint::Path { .. } => g.clone(),
        Constraint::Not(x) => match simplify_constraint(x) {
            Constraint::Not(y) => *y,
            s => Constraint::not(s),
        },
        Constraint::And(xs) => {
            let mut out: Vec<Constraint> = Vec::new();
            for x in xs {
                match simplify_constraint(x) {
                    Constraint::True => {}
                    s if s.is_false() => return Constraint::falsity(),
                    Constraint::And(ys) => push_all(&mut out, ys),
                    s => push_all(&mut out, vec![s]),
                }
            }
            Constraint::and(out)
        }
        Constraint::Or(xs) => {
            let mut out: Vec<Constraint> = Vec::new();
            for x in xs {
                match simplify_constraint(x) {
                    Constraint::True => return Constraint::True,
                    s if s.is_false() => {}
                    Constraint::Or(ys) => push_all(&mut out, ys),
                    s => push_all(&mut out, vec![s]),
                }
            }
            Constraint::or(out)
        }
    }
}

fn push_all<T: PartialEq>(out: &mut Vec<T>, items: Vec<T>) {
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
}

/// Light simplification of a condition; the result is equivalent to the input.
pub fn simplify(c: &Condition) -> Condition {
    match c {
        Condition::True => Condition::True,
        Condition::Not(x) => match simplify(x) {
            Condition::Not(y) => *y,
            s => Condition::not(s),
        },
        Condition::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match simplify(x) {
                    Condition::True => {}
                    s if s.is_false() => return Condition::falsity(),
                    Condition::And(ys) => push_all(&mut out, ys),
                    s => push_all(&mut out, vec![s]),
                }
            }
            Condition::and(out)
        }
        Condition::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match simplify(x) {
                    Condition::True => return Condition::True,
                    s if s.is_false() => {}
                    Condition::Or(ys) => push_all(&mut out, ys),
                    s => push_all(&mut out, vec![s]),
                }
            }
            Condition::or(out)
        }
        Condition::ExistsSet { sort, var, body } => {
            let b = simplify(body);
            if b.is_true() || b.is_false() || !b.free_set_vars().contains(var) {
                // the empty set always exists
                b
            } else {
                Condition::exists_set(*sort, var.clone(), b)
            }
        }
        Condition::Exists(e) => {
            let gamma = simplify_constraint(&e.constraint);
            let body = simplify(&e.body);
            if gamma.is_false() || body.is_false() {
                return Condition::falsity();
            }
            let a = &e.morphism;
            if gamma.is_true() && a.domain() == a.codomain() && a.is_inclusion() {
                return body;
            }
            Condition::exists(a.clone(), gamma, body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, GraphBuilder};
    use crate::morphism::Morphism;
    use std::sync::Arc;

    #[test]
    fn folds_constants() {
        let g = Constraint::And(vec![
            Constraint::True,
            Constraint::Or(vec![Constraint::falsity(), Constraint::member("v", "X")]),
            Constraint::not(Constraint::not(Constraint::member("v", "X"))),
        ]);
        assert_eq!(simplify_constraint(&g), Constraint::member("v", "X"));
        assert!(simplify_constraint(&Constraint::path("v", "v", [])).is_true());
    }

    #[test]
    fn removes_trivial_quantifiers() {
        let one = Arc::new(GraphBuilder::new().blank_node("1").build().unwrap());
        let id = Morphism::identity(one.clone());
        // ∀(id, false) is false
        let c = Condition::forall(id.clone(), Constraint::True, Condition::falsity());
        assert!(simplify(&c).is_false());
        let c = Condition::exists(Morphism::from_empty(one), Constraint::falsity(), Condition::True);
        assert!(simplify(&c).is_false());
        let _ = Graph::empty();
    }
}
