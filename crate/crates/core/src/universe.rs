//! Enumeration of small graphs up to isomorphism.
//!
//! Graphs are grown one edge at a time from edgeless graphs; every child is
//! reduced to its canonical key, so each isomorphism class appears once.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::canonical::{canonical_raw, graph_of_key, CanonicalKey};
use crate::graph::{Alphabet, Graph, Label};
use crate::par::{self, Strategy};

/// Which graphs to enumerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniverseSpec {
    pub max_nodes: usize,
    pub max_edges: usize,
    /// Maximum number of parallel edges with the same source, target and label.
    pub max_parallel: usize,
    pub loops: bool,
    pub alphabet: Alphabet,
}

impl UniverseSpec {
    /// Multigraphs with loops over the blank alphabet.
    pub fn multigraphs(max_nodes: usize, max_edges: usize) -> Self {
        UniverseSpec {
            max_nodes,
            max_edges,
            max_parallel: usize::MAX,
            loops: true,
            alphabet: Alphabet::default(),
        }
    }

    /// Graphs with at most one edge per source, target and label.
    pub fn simple(max_nodes: usize, loops: bool) -> Self {
        UniverseSpec {
            max_nodes,
            max_edges: usize::MAX,
            max_parallel: 1,
            loops,
            alphabet: Alphabet::default(),
        }
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }
}

struct Labels {
    all: Vec<Label>,
    node: Vec<u16>,
    edge: Vec<u16>,
}

impl Labels {
    fn new(alphabet: &Alphabet) -> Self {
        let mut all: Vec<Label> = alphabet.node_labels.iter().chain(&alphabet.edge_labels).cloned().collect();
        all.sort();
        all.dedup();
        let idx = |l: &Label| all.binary_search(l).unwrap() as u16;
        let mut node: Vec<u16> = alphabet.node_labels.iter().map(idx).collect();
        let mut edge: Vec<u16> = alphabet.edge_labels.iter().map(idx).collect();
        node.sort_unstable();
        node.dedup();
        edge.sort_unstable();
        edge.dedup();
        Labels { all, node, edge }
    }

    // key of a graph given in global label indices
    fn key(&self, node_lab: &[u16], edges: &[(u16, u16, u16)]) -> CanonicalKey {
        let mut used: Vec<u16> = node_lab.iter().copied().chain(edges.iter().map(|e| e.2)).collect();
        used.sort_unstable();
        used.dedup();
        let local = |l: u16| used.binary_search(&l).unwrap() as u16;
        let nl: Vec<u16> = node_lab.iter().map(|&l| local(l)).collect();
        let es: Vec<(u16, u16, u16)> = edges.iter().map(|&(s, t, l)| (s, t, local(l))).collect();
        let labels = used.iter().map(|&l| self.all[l as usize].clone()).collect();
        canonical_raw(labels, &nl, &es).0
    }

    // the graph of a key, in global label indices
    fn raw(&self, key: &CanonicalKey) -> (Vec<u16>, Vec<(u16, u16, u16)>) {
        let global: Vec<u16> = key.labels().iter().map(|l| self.all.binary_search(l).unwrap() as u16).collect();
        (
            key.node_labels().iter().map(|&l| global[l as usize]).collect(),
            key.edges().iter().map(|&(s, t, l)| (s, t, global[l as usize])).collect(),
        )
    }
}

/// Canonical keys of every graph in the universe, ordered by node count,
/// then edge count, then key.
pub fn enumerate_keys(spec: &UniverseSpec, strategy: Strategy) -> Vec<CanonicalKey> {
    let labels = Labels::new(&spec.alphabet);
    let mut out = Vec::new();
    for n in 0..=spec.max_nodes {
        let mut level: Vec<CanonicalKey> = Vec::new();
        let mut seq = Vec::with_capacity(n);
        label_multisets(&labels.node, n, 0, &mut seq, &mut |ls| level.push(labels.key(ls, &[])));
        level.sort();
        level.dedup();
        let mut edges = 0;
        while !level.is_empty() {
            out.extend(level.iter().cloned());
            if edges == spec.max_edges {
                break;
            }
            edges += 1;
            let children = par::map(strategy, &level, |key| {
                let (nl, es) = labels.raw(key);
                let mut kids = Vec::new();
                for s in 0..n as u16 {
                    for t in 0..n as u16 {
                        if s == t && !spec.loops {
                            continue;
                        }
                        for &l in &labels.edge {
                            let e = (s, t, l);
                            if es.iter().filter(|&&x| x == e).count() >= spec.max_parallel {
                                continue;
                            }
                            let mut grown = es.clone();
                            grown.push(e);
                            kids.push(labels.key(&nl, &grown));
                        }
                    }
                }
                kids.sort();
                kids.dedup();
                kids
            });
            let next: BTreeSet<CanonicalKey> = children.into_iter().flatten().collect();
            level = next.into_iter().collect();
        }
    }
    out
}

fn label_multisets(choices: &[u16], n: usize, from: usize, seq: &mut Vec<u16>, visit: &mut dyn FnMut(&[u16])) {
    if seq.len() == n {
        visit(seq);
        return;
    }
    for i in from..choices.len() {
        seq.push(choices[i]);
        label_multisets(choices, n, i, seq, visit);
        seq.pop();
    }
}

/// One representative per isomorphism class, with identifiers `n0, n1, …` and `e0, e1, …`.
pub fn enumerate(spec: &UniverseSpec) -> Vec<Arc<Graph>> {
    enumerate_with(spec, Strategy::default())
}

pub fn enumerate_with(spec: &UniverseSpec, strategy: Strategy) -> Vec<Arc<Graph>> {
    let keys = enumerate_keys(spec, strategy);
    par::map(strategy, &keys, |k| Arc::new(graph_of_key(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::is_isomorphic;
    use crate::testkit::all_graphs;

    fn count(spec: &UniverseSpec, n: usize) -> usize {
        enumerate_keys(spec, Strategy::Sequential).iter().filter(|k| k.node_count() == n).count()
    }

    #[test]
    fn known_digraph_counts() {
        let with_loops = UniverseSpec::simple(4, true);
        let without = UniverseSpec::simple(5, false);
        assert_eq!((0..=4).map(|n| count(&with_loops, n)).collect::<Vec<_>>(), [1, 2, 10, 104, 3044]);
        assert_eq!((0..=5).map(|n| count(&without, n)).collect::<Vec<_>>(), [1, 1, 3, 16, 218, 9608]);
    }

    #[test]
    fn matches_naive_enumeration() {
        let spec = UniverseSpec::multigraphs(3, 3);
        let ours = enumerate_with(&spec, Strategy::Parallel);
        let mut reps: Vec<Arc<Graph>> = Vec::new();
        for g in all_graphs(3, 3) {
            if !reps.iter().any(|r| is_isomorphic(r, &g)) {
                reps.push(g);
            }
        }
        assert_eq!(ours.len(), reps.len());
        for r in &reps {
            assert_eq!(ours.iter().filter(|g| is_isomorphic(g, r)).count(), 1);
        }
    }

    #[test]
    fn labels_multiply_classes() {
        let alpha = Alphabet::new(vec!["a".into(), "b".into()], vec![Label::blank()]);
        let spec = UniverseSpec::simple(2, false).with_alphabet(alpha);
        // one node: a or b; two nodes: {aa, ab, bb} times edge patterns
        let keys = enumerate_keys(&spec, Strategy::Parallel);
        assert_eq!(keys.iter().filter(|k| k.node_count() == 1).count(), 2);
        // aa: 3 patterns, bb: 3, ab: none, a->b, b->a, both = 4
        assert_eq!(keys.iter().filter(|k| k.node_count() == 2).count(), 10);
    }
}
