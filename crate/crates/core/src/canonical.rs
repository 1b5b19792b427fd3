//! Canonical forms of graphs up to isomorphism.

use std::collections::BTreeMap;

use crate::graph::{Edge, Graph, Id, Label, Node};


/// Isomorphism invariant that separates non-isomorphic graphs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    labels: Vec<Label>,
    node_labels: Vec<u16>,
    edges: Vec<(u16, u16, u16)>,
}

/// Canonical key together with the node order that realises it.
pub fn canonical_key(g: &Graph) -> CanonicalKey {
    canonical_order(g).0
}

pub fn canonical_order(g: &Graph) -> (CanonicalKey, Vec<usize>) {
    let mut labels: Vec<Label> = g
        .nodes()
        .iter()
        .map(|n| n.label.clone())
        .chain(g.edges().iter().map(|e| e.label.clone()))
        .collect();
    labels.sort();
    labels.dedup();
    let lab = |l: &Label| labels.binary_search(l).unwrap() as u16;
    let node_lab: Vec<u16> = g.nodes().iter().map(|x| lab(&x.label)).collect();
    let edges: Vec<(u16, u16, u16)> = g
        .edges()
        .iter()
        .map(|e| (e.source as u16, e.target as u16, lab(&e.label)))
        .collect();
    canonical_raw(labels, &node_lab, &edges)
}

/// Canonical key of a graph given by label indices into `labels` (which must
/// be sorted and contain only used labels) and `(source, target, label)` edges.
pub(crate) fn canonical_raw(labels: Vec<Label>, node_lab: &[u16], edges: &[(u16, u16, u16)]) -> (CanonicalKey, Vec<usize>) {
    let search = Search::new(node_lab, edges);
    let mut best: Option<Leaf> = None;
    search.descend(search.initial(), &mut best);
    let (edges, order) = best.unwrap_or_default();
    let node_labels = order.iter().map(|&v| node_lab[v]).collect();
    (
        CanonicalKey {
            labels,
            node_labels,
            edges,
        },
        order,
    )
}

type Leaf = (Vec<(u16, u16, u16)>, Vec<usize>);

// Individualisation-refinement over ordered colourings. Nodes related by a
// transposition automorphism (twins) are individualised once per class.
struct Search<'a> {
    node_lab: &'a [u16],
    edges: &'a [(u16, u16, u16)],
    twin: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(node_lab: &'a [u16], edges: &'a [(u16, u16, u16)]) -> Self {
        let n = node_lab.len();
        let mut twin: Vec<usize> = (0..n).collect();
        let mut base = edges.to_vec();
        base.sort_unstable();
        for v in 0..n {
            for u in 0..v {
                if twin[u] != u || node_lab[u] != node_lab[v] {
                    continue;
                }
                let (u16_, v16) = (u as u16, v as u16);
                let swap = |x: u16| {
                    if x == u16_ {
                        v16
                    } else if x == v16 {
                        u16_
                    } else {
                        x
                    }
                };
                let mut moved: Vec<_> = base.iter().map(|&(s, t, l)| (swap(s), swap(t), l)).collect();
                moved.sort_unstable();
                if moved == base {
                    twin[v] = u;
                    break;
                }
            }
        }
        Search { node_lab, edges, twin }
    }

    fn initial(&self) -> Vec<u32> {
        let n = self.node_lab.len();
        let mut sig: Vec<(u16, usize, usize, usize)> = (0..n).map(|v| (self.node_lab[v], 0, 0, 0)).collect();
        for &(s, t, _) in self.edges {
            let (s, t) = (s as usize, t as usize);
            if s == t {
                sig[s].1 += 1;
            } else {
                sig[s].2 += 1;
                sig[t].3 += 1;
            }
        }
        rank(&sig)
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = self.node_lab.len();
        let mut count = distinct(&colors);
        while count < n {
            let mut around: Vec<Vec<(u8, u32, u16)>> = vec![Vec::new(); n];
            for &(s, t, l) in self.edges {
                let (s, t) = (s as usize, t as usize);
                around[s].push((0, colors[t], l));
                around[t].push((1, colors[s], l));
            }
            let sig: Vec<(u32, Vec<(u8, u32, u16)>)> = around
                .into_iter()
                .enumerate()
                .map(|(v, mut a)| {
                    a.sort_unstable();
                    (colors[v], a)
                })
                .collect();
            let next = rank(&sig);
            let next_count = distinct(&next);
            if next_count == count {
                break;
            }
            colors = next;
            count = next_count;
        }
        colors
    }

    fn descend(&self, colors: Vec<u32>, best: &mut Option<Leaf>) {
        let colors = self.refine(colors);
        let n = self.node_lab.len();
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate().take(n) {
            cells.entry(c).or_default().push(v);
        }
        let Some(cell) = cells.values().find(|c| c.len() > 1) else {
            let mut order = vec![0; n];
            for v in 0..n {
                order[colors[v] as usize] = v;
            }
            let mut edges: Vec<(u16, u16, u16)> = self
                .edges
                .iter()
                .map(|&(s, t, l)| (colors[s as usize] as u16, colors[t as usize] as u16, l))
                .collect();
            edges.sort_unstable();
            if best.as_ref().is_none_or(|(b, _)| edges < *b) {
                *best = Some((edges, order));
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.contains(&self.twin[v]) {
                continue;
            }
            tried.push(self.twin[v]);
            let split: Vec<(u32, bool)> = (0..n).map(|x| (colors[x], x != v)).collect();
            self.descend(rank(&split), best);
        }
    }
}

fn rank<T: Ord>(sig: &[T]) -> Vec<u32> {
    let mut sorted: Vec<&T> = sig.iter().collect();
    sorted.sort();
    sorted.dedup();
    sig.iter().map(|s| sorted.binary_search(&s).unwrap() as u32).collect()
}

fn distinct(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// The canonical representative: nodes `n0, n1, …` and edges `e0, e1, …` in canonical order.
pub fn canonical_graph(g: &Graph) -> Graph {
    let key = canonical_key(g);
    graph_of_key(&key)
}

pub fn graph_of_key(key: &CanonicalKey) -> Graph {
    let width = |k: usize| k.saturating_sub(1).to_string().len();
    let nw = width(key.node_labels.len());
    let ew = width(key.edges.len());
    let nodes: Vec<Node> = key
        .node_labels
        .iter()
        .enumerate()
        .map(|(i, &l)| Node {
            id: Id::from(format!("n{i:0nw$}")),
            label: key.labels[l as usize].clone(),
        })
        .collect();
    let edges: Vec<Edge> = key
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(s, t, l))| Edge {
            id: Id::from(format!("e{i:0ew$}")),
            source: s as usize,
            target: t as usize,
            label: key.labels[l as usize].clone(),
        })
        .collect();
    Graph::assemble(nodes, edges)
}

impl CanonicalKey {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn node_labels(&self) -> &[u16] {
        &self.node_labels
    }

    /// `(source, target, label)` triples in canonical order.
    pub fn edges(&self) -> &[(u16, u16, u16)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}
