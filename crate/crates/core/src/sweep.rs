//! Whole-universe analysis of `ℛ!` over isomorphism classes.
//!
//! Instead of running the interpreter once per input graph, the successor
//! relation of a rule set is computed once per class and the terminal
//! behaviour of every class is derived over the strongly connected
//! components of that relation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::canonical::{canonical_key, graph_of_key, CanonicalKey};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::{self, Strategy};
use crate::rewrite::{derive_all, Rule};

/// What the executions of `ℛ!` from one graph can end in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    /// Every terminal graph satisfies the predicate (true if there is none).
    pub every: bool,
    /// Some terminal graph satisfies the predicate.
    pub some: bool,
    /// Some execution never terminates.
    pub diverges: bool,
}

struct Class {
    succ: Vec<usize>,
    terminal: Option<bool>,
    index: usize,
    low: usize,
    on_stack: bool,
    comp: usize,
}

const UNVISITED: usize = usize::MAX;

/// Outcomes of `rules!` for each input class under `pred`. At most `budget`
/// classes are explored; exceeding it is an error.
pub fn alap_outcomes<P>(rules: &[Arc<Rule>], keys: &[CanonicalKey], pred: P, budget: usize, strategy: Strategy) -> Result<Vec<Outcome>>
where
    P: Fn(&Graph) -> Result<bool> + Sync + Send,
{
    let expand = |k: &CanonicalKey| -> Result<(Vec<CanonicalKey>, Option<bool>)> {
        let g = Arc::new(graph_of_key(k));
        let next: Vec<CanonicalKey> = derive_all(rules, &g)?.iter().map(|h| canonical_key(h)).collect();
        let terminal = if next.is_empty() { Some(pred(&g)?) } else { None };
        Ok((next, terminal))
    };
    // the expensive part, done up front for the given classes
    let pre = par::try_map(strategy, keys, expand)?;

    let mut ids: HashMap<CanonicalKey, usize> = HashMap::with_capacity(keys.len());
    let mut classes: Vec<Class> = Vec::with_capacity(keys.len());
    let mut pending: Vec<Option<Vec<CanonicalKey>>> = Vec::with_capacity(keys.len());
    let intern = |k: &CanonicalKey, ids: &mut HashMap<CanonicalKey, usize>, classes: &mut Vec<Class>, pending: &mut Vec<Option<Vec<CanonicalKey>>>, known: Option<(Vec<CanonicalKey>, Option<bool>)>| -> Result<usize> {
        if let Some(&i) = ids.get(k) {
            return Ok(i);
        }
        if classes.len() >= budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let (next, terminal) = match known {
            Some(x) => x,
            None => expand(k)?,
        };
        let i = classes.len();
        ids.insert(k.clone(), i);
        classes.push(Class {
            succ: Vec::new(),
            terminal,
            index: UNVISITED,
            low: 0,
            on_stack: false,
            comp: UNVISITED,
        });
        pending.push(Some(next));
        Ok(i)
    };
    let mut roots = Vec::with_capacity(keys.len());
    for (k, known) in keys.iter().zip(pre) {
        roots.push(intern(k, &mut ids, &mut classes, &mut pending, Some(known))?);
    }

    let mut comps: Vec<Outcome> = Vec::new();
    let mut counter = 0;
    let mut stack: Vec<usize> = Vec::new();
    for &root in &roots {
        if classes[root].index != UNVISITED {
            continue;
        }
        // frames of (class, next successor position)
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        classes[root].index = counter;
        classes[root].low = counter;
        counter += 1;
        classes[root].on_stack = true;
        stack.push(root);
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if let Some(next) = pending[v].take() {
                let mut succ = Vec::with_capacity(next.len());
                for k in &next {
                    succ.push(intern(k, &mut ids, &mut classes, &mut pending, None)?);
                }
                classes[v].succ = succ;
            }
            if *pos < classes[v].succ.len() {
                let w = classes[v].succ[*pos];
                *pos += 1;
                if classes[w].index == UNVISITED {
                    classes[w].index = counter;
                    classes[w].low = counter;
                    counter += 1;
                    classes[w].on_stack = true;
                    stack.push(w);
                    frames.push((w, 0));
                } else if classes[w].on_stack {
                    classes[v].low = classes[v].low.min(classes[w].index);
                }
                continue;
            }
            frames.pop();
            if let Some(&(u, _)) = frames.last() {
                classes[u].low = classes[u].low.min(classes[v].low);
            }
            if classes[v].low == classes[v].index {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("component on stack");
                    classes[w].on_stack = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                let c = comps.len();
                let mut out = Outcome {
                    every: true,
                    some: false,
                    diverges: members.len() > 1 || classes[v].succ.contains(&v),
                };
                for &m in &members {
                    classes[m].comp = c;
                }
                for &m in &members {
                    if let Some(t) = classes[m].terminal {
                        out.every &= t;
                        out.some |= t;
                    }
                    for &w in &classes[m].succ {
                        let wc = classes[w].comp;
                        if wc != c {
                            let o = comps[wc];
                            out.every &= o.every;
                            out.some |= o.some;
                            out.diverges |= o.diverges;
                        }
                    }
                }
                comps.push(out);
            }
        }
    }
    Ok(roots.iter().map(|&r| comps[classes[r].comp]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::Condition;
    use crate::interpreter::{run, Program};
    use crate::satisfy::graph_satisfies;
    use crate::testkit::*;
    use crate::universe::{enumerate_keys, UniverseSpec};

    #[test]
    fn agrees_with_interpreter() {
        let rules = vec![Arc::new(delete())];
        let keys = enumerate_keys(&UniverseSpec::simple(3, true), Strategy::Parallel);
        let e = edgeless();
        let pred = |g: &Graph| graph_satisfies(g, &e);
        let outs = alap_outcomes(&rules, &keys, pred, 1 << 20, Strategy::Parallel).unwrap();
        let prog = Program::alap(Arc::new(Program::Call(rules.clone())));
        for (k, o) in keys.iter().zip(outs) {
            let g = Arc::new(graph_of_key(k));
            let res = run(&prog, &g, 10_000).unwrap();
            assert!(!res.diverges && !o.diverges);
            let sat: Vec<bool> = res.graphs().map(|h| graph_satisfies(h, &e).unwrap()).collect();
            assert_eq!(o.every, sat.iter().all(|&b| b), "{g}");
            assert_eq!(o.some, sat.iter().any(|&b| b), "{g}");
        }
    }

    #[test]
    fn cycles_diverge() {
        // flips the direction of an edge forever
        let flip = Rule::from_sides("flip", g(&["1", "2"], &[("e", "1", "2")]), g(&["1", "2"], &[("e", "2", "1")]), Condition::True, Condition::True).unwrap();
        let keys = enumerate_keys(&UniverseSpec::simple(2, false), Strategy::Sequential);
        let outs = alap_outcomes(&[Arc::new(flip)], &keys, |_| Ok(true), 100, Strategy::Sequential).unwrap();
        for (k, o) in keys.iter().zip(outs) {
            assert_eq!(o.diverges, k.edge_count() > 0);
        }
    }
}
