//! Finite labelled directed multigraphs.
//!
//! Nodes and edges carry identifiers drawn from one shared namespace, so a
//! name in a constraint refers to exactly one item. Items are stored sorted by
//! identifier; positions in those vectors are the indices used by morphisms.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: &str) -> Self {
                $name(Arc::from(s))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(Arc::from(s))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl std::ops::Deref for $name {
            type Target = str;
            fn deref(&self) -> &str {
                &self.0
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

name_type!(
    /// Identifier of a node, edge or set variable.
    Id
);
name_type!(
    /// Node or edge label.
    Label
);

/// Text of the blank label.
pub const BLANK: &str = "□";

impl Label {
    pub fn blank() -> Self {
        Label::new(BLANK)
    }

    pub fn is_blank(&self) -> bool {
        &*self.0 == BLANK
    }
}

/// Node and edge label sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub node_labels: Vec<Label>,
    pub edge_labels: Vec<Label>,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet {
            node_labels: vec![Label::blank()],
            edge_labels: vec![Label::blank()],
        }
    }
}

impl Alphabet {
    pub fn new(node_labels: Vec<Label>, edge_labels: Vec<Label>) -> Self {
        let mut a = Alphabet {
            node_labels,
            edge_labels,
        };
        a.node_labels.sort();
        a.node_labels.dedup();
        a.edge_labels.sort();
        a.edge_labels.dedup();
        a
    }

    /// Checks that every label of `g` belongs to this alphabet.
    pub fn admits(&self, g: &Graph) -> Result<()> {
        for n in g.nodes() {
            if !self.node_labels.contains(&n.label) {
                return Err(Error::UnknownLabel(n.label.to_string()));
            }
        }
        for e in g.edges() {
            if !self.edge_labels.contains(&e.label) {
                return Err(Error::UnknownLabel(e.label.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: Id,
    pub label: Label,
}

/// An edge; `source` and `target` are node indices of the owning graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: Id,
    pub source: usize,
    pub target: usize,
    pub label: Label,
}

/// A node or edge index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Node(usize),
    Edge(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    // edge indices between each ordered node pair, row-major
    between: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for n in &self.nodes {
            l.entry(&format_args!("{}:{}", n.id, n.label));
        }
        for e in &self.edges {
            l.entry(&format_args!("{}:{}->{}:{}", e.id, self.nodes[e.source].id, self.nodes[e.target].id, e.label));
        }
        l.finish()
    }
}

/// The graph body in text form, e.g. `{ nodes: 1, 2:red; edges: e: 1 -> 2; }`.
/// Blank labels are omitted.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |l: &Label| if l.is_blank() { String::new() } else { format!(":{l}") };
        f.write_str("{ nodes:")?;
        for (i, n) in self.nodes.iter().enumerate() {
            write!(f, "{} {}{}", if i > 0 { "," } else { "" }, n.id, label(&n.label))?;
        }
        f.write_str(";")?;
        if !self.edges.is_empty() {
            f.write_str(" edges:")?;
            for (i, e) in self.edges.iter().enumerate() {
                write!(
                    f,
                    "{} {}: {} -> {}{}",
                    if i > 0 { "," } else { "" },
                    e.id,
                    self.nodes[e.source].id,
                    self.nodes[e.target].id,
                    label(&e.label)
                )?;
            }
            f.write_str(";")?;
        }
        f.write_str(" }")
    }
}

/// Accumulates named items and produces a validated [`Graph`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<(Id, Label)>,
    edges: Vec<(Id, Id, Id, Label)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, id: impl Into<Id>, label: impl Into<Label>) -> Self {
        self.nodes.push((id.into(), label.into()));
        self
    }

    pub fn blank_node(self, id: impl Into<Id>) -> Self {
        self.node(id, Label::blank())
    }

    pub fn edge(
        mut self,
        id: impl Into<Id>,
        source: impl Into<Id>,
        target: impl Into<Id>,
        label: impl Into<Label>,
    ) -> Self {
        self.edges
            .push((id.into(), source.into(), target.into(), label.into()));
        self
    }

    pub fn blank_edge(self, id: impl Into<Id>, source: impl Into<Id>, target: impl Into<Id>) -> Self {
        self.edge(id, source, target, Label::blank())
    }

    pub fn add_node(&mut self, id: Id, label: Label) {
        self.nodes.push((id, label));
    }

    pub fn add_edge(&mut self, id: Id, source: Id, target: Id, label: Label) {
        self.edges.push((id, source, target, label));
    }

    pub fn build(self) -> Result<Graph> {
        Graph::from_parts(self.nodes, self.edges)
    }
}

impl Graph {
    pub fn empty() -> Self {
        Graph::default()
    }

    /// Builds a graph from named nodes and edges given as `(id, source, target, label)`.
    pub fn from_parts(mut nodes: Vec<(Id, Label)>, edges: Vec<(Id, Id, Id, Label)>) -> Result<Graph> {
        nodes.sort_by(|a, b| a.0.cmp(&b.0));
        for w in nodes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateId(w[0].0.to_string()));
            }
        }
        let nodes: Vec<Node> = nodes
            .into_iter()
            .map(|(id, label)| Node { id, label })
            .collect();
        let lookup = |id: &Id| -> Result<usize> {
            nodes
                .binary_search_by(|n| n.id.cmp(id))
                .map_err(|_| Error::UnknownNode(id.to_string()))
        };
        let mut out = Vec::with_capacity(edges.len());
        for (id, s, t, label) in edges {
            if nodes.binary_search_by(|n| n.id.cmp(&id)).is_ok() {
                return Err(Error::DuplicateId(id.to_string()));
            }
            out.push(Edge {
                source: lookup(&s)?,
                target: lookup(&t)?,
                id,
                label,
            });
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        for w in out.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id.to_string()));
            }
        }
        Ok(Graph::assemble(nodes, out))
    }

    /// Builds a graph from items already sorted by identifier with valid indices.
    pub(crate) fn assemble(nodes: Vec<Node>, edges: Vec<Edge>) -> Graph {
        debug_assert!(nodes.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        let n = nodes.len();
        let mut between = vec![Vec::new(); n * n];
        for (i, e) in edges.iter().enumerate() {
            between[e.source * n + e.target].push(i);
        }
        Graph {
            nodes,
            edges,
            between,
        }
    }

    /// Builds a graph from items in arbitrary order, re-indexing edges.
    pub(crate) fn assemble_unsorted(nodes: Vec<Node>, edges: Vec<Edge>) -> Graph {
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id));
        let mut pos = vec![0; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let sorted_nodes: Vec<Node> = order.iter().map(|&i| nodes[i].clone()).collect();
        let mut sorted_edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                source: pos[e.source],
                target: pos[e.target],
                ..e
            })
            .collect();
        sorted_edges.sort_by(|a, b| a.id.cmp(&b.id));
        Graph::assemble(sorted_nodes, sorted_edges)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn item_count(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    pub fn item(&self, id: &str) -> Option<Item> {
        self.node_index(id)
            .map(Item::Node)
            .or_else(|| self.edge_index(id).map(Item::Edge))
    }

    pub fn item_id(&self, item: Item) -> &Id {
        match item {
            Item::Node(i) => &self.nodes[i].id,
            Item::Edge(i) => &self.edges[i].id,
        }
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.item(id).is_some()
    }

    /// Edges from node `s` to node `t`.
    pub fn edges_between(&self, s: usize, t: usize) -> &[usize] {
        &self.between[s * self.nodes.len() + t]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.source == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.target == v).count()
    }

    /// Whether some edge is attached to node `v`.
    pub fn is_incident(&self, v: usize) -> bool {
        self.edges.iter().any(|e| e.source == v || e.target == v)
    }

    /// All identifiers used by nodes and edges.
    pub fn ids(&self) -> BTreeSet<Id> {
        self.nodes
            .iter()
            .map(|n| n.id.clone())
            .chain(self.edges.iter().map(|e| e.id.clone()))
            .collect()
    }

    /// `true` when `v` reaches `w` along edges outside `excluded`, or `v == w`.
    pub fn has_path(&self, v: usize, w: usize, excluded: &[bool]) -> bool {
        if v == w {
            return true;
        }
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if e.source != x || excluded.get(i).copied().unwrap_or(false) || seen[e.target] {
                    continue;
                }
                if e.target == w {
                    return true;
                }
                seen[e.target] = true;
                queue.push_back(e.target);
            }
        }
        false
    }

    /// Path query by identifiers; excluded identifiers absent from the graph are ignored.
    pub fn path_exists(&self, v: &str, w: &str, excluded: &[Id]) -> Result<bool> {
        let vi = self
            .node_index(v)
            .ok_or_else(|| Error::UnknownNode(v.to_string()))?;
        let wi = self
            .node_index(w)
            .ok_or_else(|| Error::UnknownNode(w.to_string()))?;
        let mut mask = vec![false; self.edges.len()];
        for id in excluded {
            if let Some(i) = self.edge_index(id) {
                mask[i] = true;
            }
        }
        Ok(self.has_path(vi, wi, &mask))
    }

    /// Graph with the given items removed; edges attached to removed nodes must be removed too.
    pub fn remove_items(&self, drop_nodes: &[bool], drop_edges: &[bool]) -> Result<Graph> {
        let mut pos = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !drop_nodes[i] {
                pos[i] = nodes.len();
                nodes.push(n.clone());
            }
        }
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if drop_edges[i] {
                continue;
            }
            if pos[e.source] == usize::MAX || pos[e.target] == usize::MAX {
                return Err(Error::InvalidMorphism(format!("edge `{}` would dangle", e.id)));
            }
            edges.push(Edge {
                source: pos[e.source],
                target: pos[e.target],
                ..e.clone()
            });
        }
        Ok(Graph::assemble(nodes, edges))
    }

    /// Copy of the graph with every identifier passed through `rename`.
    pub fn renamed(&self, mut rename: impl FnMut(&Id) -> Id) -> Result<Graph> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| (rename(&n.id), n.label.clone()))
            .collect::<Vec<_>>();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                (
                    rename(&e.id),
                    nodes[e.source].0.clone(),
                    nodes[e.target].0.clone(),
                    e.label.clone(),
                )
            })
            .collect();
        Graph::from_parts(nodes, edges)
    }
}

/// First identifier derived from `base` that is not in `taken`.
pub fn fresh_id(base: &str, taken: &BTreeSet<Id>) -> Id {
    if !taken.contains(base) {
        return Id::new(base);
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|c| !taken.contains(c.as_str()))
        .map(Id::from)
        .expect("unbounded search")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Graph {
        GraphBuilder::new()
            .blank_node("a")
            .blank_node("b")
            .blank_node("c")
            .blank_edge("e1", "a", "b")
            .blank_edge("e2", "b", "c")
            .build()
            .unwrap()
    }

    #[test]
    fn items_are_sorted_and_indexed() {
        let g = chain();
        assert_eq!(g.node_index("b"), Some(1));
        assert_eq!(g.edge(1).source, 1);
        assert_eq!(g.item("e2"), Some(Item::Edge(1)));
        assert_eq!(g.edges_between(0, 1), &[0]);
    }

    #[test]
    fn duplicate_and_dangling_ids_rejected() {
        let dup = GraphBuilder::new().blank_node("a").blank_node("a").build();
        assert_eq!(dup, Err(Error::DuplicateId("a".into())));
        let shared = GraphBuilder::new()
            .blank_node("a")
            .blank_edge("a", "a", "a")
            .build();
        assert!(shared.is_err());
        let dangling = GraphBuilder::new().blank_node("a").blank_edge("e", "a", "z").build();
        assert_eq!(dangling, Err(Error::UnknownNode("z".into())));
    }

    #[test]
    fn paths_respect_exclusions() {
        let g = chain();
        assert!(g.path_exists("a", "c", &[]).unwrap());
        assert!(!g.path_exists("c", "a", &[]).unwrap());
        assert!(!g.path_exists("a", "c", &[Id::new("e2")]).unwrap());
        assert!(g.path_exists("b", "b", &[Id::new("e1"), Id::new("e2")]).unwrap());
        assert!(g.path_exists("a", "zz", &[]).is_err());
    }

    #[test]
    fn fresh_ids_avoid_clashes() {
        let taken: BTreeSet<Id> = ["v", "v_1"].iter().map(|s| Id::new(s)).collect();
        assert_eq!(fresh_id("v", &taken).as_str(), "v_2");
        assert_eq!(fresh_id("w", &taken).as_str(), "w");
    }
}
