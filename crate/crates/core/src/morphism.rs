//! Graph morphisms and injective match enumeration.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, Item};

/// A structure-preserving map between two graphs, stored as index maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    domain: Arc<Graph>,
    codomain: Arc<Graph>,
    nodes: Vec<usize>,
    edges: Vec<usize>,
}

impl std::fmt::Debug for Morphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for (i, n) in self.domain.nodes().iter().enumerate() {
            m.entry(&n.id, &self.codomain.node(self.nodes[i]).id);
        }
        for (i, e) in self.domain.edges().iter().enumerate() {
            m.entry(&e.id, &self.codomain.edge(self.edges[i]).id);
        }
        m.finish()
    }
}

impl Morphism {
    /// Validates label and incidence preservation.
    pub fn new(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        nodes: Vec<usize>,
        edges: Vec<usize>,
    ) -> Result<Morphism> {
        if nodes.len() != domain.node_count() || edges.len() != domain.edge_count() {
            return Err(Error::InvalidMorphism("map is not total".into()));
        }
        for (i, n) in domain.nodes().iter().enumerate() {
            let j = nodes[i];
            if j >= codomain.node_count() {
                return Err(Error::InvalidMorphism(format!("node `{}` has no image", n.id)));
            }
            if codomain.node(j).label != n.label {
                return Err(Error::InvalidMorphism(format!("label of node `{}` changes", n.id)));
            }
        }
        for (i, e) in domain.edges().iter().enumerate() {
            let j = edges[i];
            if j >= codomain.edge_count() {
                return Err(Error::InvalidMorphism(format!("edge `{}` has no image", e.id)));
            }
            let f = codomain.edge(j);
            if f.label != e.label {
                return Err(Error::InvalidMorphism(format!("label of edge `{}` changes", e.id)));
            }
            if f.source != nodes[e.source] || f.target != nodes[e.target] {
                return Err(Error::InvalidMorphism(format!("edge `{}` loses its endpoints", e.id)));
            }
        }
        Ok(Morphism {
            domain,
            codomain,
            nodes,
            edges,
        })
    }

    pub(crate) fn new_unchecked(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        nodes: Vec<usize>,
        edges: Vec<usize>,
    ) -> Morphism {
        debug_assert!(Morphism::new(domain.clone(), codomain.clone(), nodes.clone(), edges.clone()).is_ok());
        Morphism {
            domain,
            codomain,
            nodes,
            edges,
        }
    }

    pub fn identity(g: Arc<Graph>) -> Morphism {
        let nodes = (0..g.node_count()).collect();
        let edges = (0..g.edge_count()).collect();
        Morphism {
            domain: g.clone(),
            codomain: g,
            nodes,
            edges,
        }
    }

    /// The inclusion that maps every item to the item of the same identifier.
    pub fn inclusion(domain: Arc<Graph>, codomain: Arc<Graph>) -> Result<Morphism> {
        let mut nodes = Vec::with_capacity(domain.node_count());
        for n in domain.nodes() {
            nodes.push(
                codomain
                    .node_index(n.id.as_str())
                    .ok_or_else(|| Error::InvalidMorphism(format!("node `{}` is missing from the codomain", n.id)))?,
            );
        }
        let mut edges = Vec::with_capacity(domain.edge_count());
        for e in domain.edges() {
            edges.push(
                codomain
                    .edge_index(e.id.as_str())
                    .ok_or_else(|| Error::InvalidMorphism(format!("edge `{}` is missing from the codomain", e.id)))?,
            );
        }
        Morphism::new(domain, codomain, nodes, edges)
    }

    pub fn from_empty(codomain: Arc<Graph>) -> Morphism {
        Morphism {
            domain: Arc::new(Graph::empty()),
            codomain,
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        &self.codomain
    }

    pub fn node_map(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.edges
    }

    pub fn node(&self, i: usize) -> usize {
        self.nodes[i]
    }

    pub fn edge(&self, i: usize) -> usize {
        self.edges[i]
    }

    pub fn item(&self, item: Item) -> Item {
        match item {
            Item::Node(i) => Item::Node(self.nodes[i]),
            Item::Edge(i) => Item::Edge(self.edges[i]),
        }
    }

    pub fn is_injective(&self) -> bool {
        fn distinct(v: &[usize], bound: usize) -> bool {
            let mut seen = vec![false; bound];
            v.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
        }
        distinct(&self.nodes, self.codomain.node_count()) && distinct(&self.edges, self.codomain.edge_count())
    }

    /// Whether every item keeps its identifier.
    pub fn is_inclusion(&self) -> bool {
        self.domain
            .nodes()
            .iter()
            .enumerate()
            .all(|(i, n)| self.codomain.node(self.nodes[i]).id == n.id)
            && self
                .domain
                .edges()
                .iter()
                .enumerate()
                .all(|(i, e)| self.codomain.edge(self.edges[i]).id == e.id)
    }

    /// Whether the morphism is a bijection (hence an isomorphism).
    pub fn is_bijective(&self) -> bool {
        self.is_injective()
            && self.domain.node_count() == self.codomain.node_count()
            && self.domain.edge_count() == self.codomain.edge_count()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if *self.codomain != *other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(Morphism {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            nodes: self.nodes.iter().map(|&i| other.nodes[i]).collect(),
            edges: self.edges.iter().map(|&i| other.edges[i]).collect(),
        })
    }

    /// Inverse of a bijective morphism.
    pub fn inverse(&self) -> Result<Morphism> {
        if !self.is_bijective() {
            return Err(Error::InvalidMorphism("only isomorphisms can be inverted".into()));
        }
        let mut nodes = vec![0; self.nodes.len()];
        for (i, &j) in self.nodes.iter().enumerate() {
            nodes[j] = i;
        }
        let mut edges = vec![0; self.edges.len()];
        for (i, &j) in self.edges.iter().enumerate() {
            edges[j] = i;
        }
        Ok(Morphism {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            nodes,
            edges,
        })
    }

    /// Preimage of every codomain node, if any.
    pub fn node_preimages(&self) -> Vec<Option<usize>> {
        let mut pre = vec![None; self.codomain.node_count()];
        for (i, &j) in self.nodes.iter().enumerate() {
            pre[j] = Some(i);
        }
        pre
    }

    pub fn edge_preimages(&self) -> Vec<Option<usize>> {
        let mut pre = vec![None; self.codomain.edge_count()];
        for (i, &j) in self.edges.iter().enumerate() {
            pre[j] = Some(i);
        }
        pre
    }
}

/// Enumerates injective morphisms `dom → cod` extending a partial assignment.
///
/// `fixed_nodes[i]` / `fixed_edges[i]` pin the image of a domain item. The
/// visitor receives complete node and edge maps and may stop the search by
/// returning `ControlFlow::Break`.
pub fn for_each_injective<B>(
    dom: &Graph,
    cod: &Graph,
    fixed_nodes: &[Option<usize>],
    fixed_edges: &[Option<usize>],
    visit: &mut dyn FnMut(&[usize], &[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let mut search = Search::new(dom, cod);
    if !search.pin(fixed_nodes, fixed_edges) {
        return ControlFlow::Continue(());
    }
    search.nodes(0, visit)
}

/// All injective morphisms from `dom` into `cod`.
pub fn injective_morphisms(dom: &Arc<Graph>, cod: &Arc<Graph>) -> Vec<Morphism> {
    let mut out = Vec::new();
    let _ = for_each_injective::<()>(
        dom,
        cod,
        &vec![None; dom.node_count()],
        &vec![None; dom.edge_count()],
        &mut |n, e| {
            out.push(Morphism::new_unchecked(dom.clone(), cod.clone(), n.to_vec(), e.to_vec()));
            ControlFlow::Continue(())
        },
    );
    out
}

/// Injective morphisms `c → g` whose restriction along `a` equals `p`.
pub fn extensions(a: &Morphism, p: &Morphism) -> Vec<Morphism> {
    let c = a.codomain();
    let g = p.codomain();
    let (fixed_nodes, fixed_edges) = pinned(a, p);
    let mut out = Vec::new();
    let _ = for_each_injective::<()>(c, g, &fixed_nodes, &fixed_edges, &mut |n, e| {
        out.push(Morphism::new_unchecked(c.clone(), g.clone(), n.to_vec(), e.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Partial assignment of `cod(a)` into `cod(p)` forced by `q ∘ a = p`.
pub(crate) fn pinned(a: &Morphism, p: &Morphism) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut fixed_nodes = vec![None; a.codomain().node_count()];
    for (i, &j) in a.node_map().iter().enumerate() {
        fixed_nodes[j] = Some(p.node(i));
    }
    let mut fixed_edges = vec![None; a.codomain().edge_count()];
    for (i, &j) in a.edge_map().iter().enumerate() {
        fixed_edges[j] = Some(p.edge(i));
    }
    (fixed_nodes, fixed_edges)
}

/// Some isomorphism `g → h`, if the graphs are isomorphic.
pub fn find_isomorphism(g: &Arc<Graph>, h: &Arc<Graph>) -> Option<Morphism> {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut found = None;
    let _ = for_each_injective(
        g,
        h,
        &vec![None; g.node_count()],
        &vec![None; g.edge_count()],
        &mut |n, e| {
            found = Some(Morphism::new_unchecked(g.clone(), h.clone(), n.to_vec(), e.to_vec()));
            ControlFlow::Break(())
        },
    );
    found
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    for_each_injective(
        g,
        h,
        &vec![None; g.node_count()],
        &vec![None; g.edge_count()],
        &mut |_, _| ControlFlow::Break(()),
    )
    .is_break()
}

struct Search<'a> {
    dom: &'a Graph,
    cod: &'a Graph,
    node_img: Vec<usize>,
    edge_img: Vec<usize>,
    node_used: Vec<bool>,
    edge_used: Vec<bool>,
    node_order: Vec<usize>,
    edge_order: Vec<usize>,
    out_deg: (Vec<usize>, Vec<usize>),
    in_deg: (Vec<usize>, Vec<usize>),
}

const UNSET: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(dom: &'a Graph, cod: &'a Graph) -> Self {
        let degrees = |g: &Graph| {
            let mut out = vec![0; g.node_count()];
            let mut inn = vec![0; g.node_count()];
            for e in g.edges() {
                out[e.source] += 1;
                inn[e.target] += 1;
            }
            (out, inn)
        };
        let (dout, din) = degrees(dom);
        let (cout, cin) = degrees(cod);
        Search {
            dom,
            cod,
            node_img: vec![UNSET; dom.node_count()],
            edge_img: vec![UNSET; dom.edge_count()],
            node_used: vec![false; cod.node_count()],
            edge_used: vec![false; cod.edge_count()],
            node_order: Vec::new(),
            edge_order: Vec::new(),
            out_deg: (dout, cout),
            in_deg: (din, cin),
        }
    }

    fn pin(&mut self, fixed_nodes: &[Option<usize>], fixed_edges: &[Option<usize>]) -> bool {
        for (i, f) in fixed_nodes.iter().enumerate() {
            if let Some(j) = *f {
                if self.node_used[j] || self.dom.node(i).label != self.cod.node(j).label {
                    return false;
                }
                self.node_used[j] = true;
                self.node_img[i] = j;
            }
        }
        for (i, f) in fixed_edges.iter().enumerate() {
            if let Some(j) = *f {
                let (e, g) = (self.dom.edge(i), self.cod.edge(j));
                if self.edge_used[j] || e.label != g.label {
                    return false;
                }
                for (x, y) in [(e.source, g.source), (e.target, g.target)] {
                    match self.node_img[x] {
                        UNSET => {
                            if self.node_used[y] || self.dom.node(x).label != self.cod.node(y).label {
                                return false;
                            }
                            self.node_used[y] = true;
                            self.node_img[x] = y;
                        }
                        z if z != y => return false,
                        _ => {}
                    }
                }
                self.edge_used[j] = true;
                self.edge_img[i] = j;
            }
        }
        // Unassigned nodes, most constrained first: those adjacent to assigned nodes, then by degree.
        let mut order: Vec<usize> = (0..self.dom.node_count())
            .filter(|&i| self.node_img[i] == UNSET)
            .collect();
        let mut placed: Vec<bool> = self.node_img.iter().map(|&x| x != UNSET).collect();
        let mut sorted = Vec::with_capacity(order.len());
        while !order.is_empty() {
            let score = |i: usize| {
                let links = self
                    .dom
                    .edges()
                    .iter()
                    .filter(|e| (e.source == i && placed[e.target]) || (e.target == i && placed[e.source]))
                    .count();
                (links, self.out_deg.0[i] + self.in_deg.0[i])
            };
            let (k, _) = order
                .iter()
                .enumerate()
                .max_by_key(|&(k, &i)| (score(i), std::cmp::Reverse(k)))
                .unwrap();
            let i = order.remove(k);
            placed[i] = true;
            sorted.push(i);
        }
        self.node_order = sorted;
        self.edge_order = (0..self.dom.edge_count())
            .filter(|&i| self.edge_img[i] == UNSET)
            .collect();
        true
    }

    // Whether every domain edge between assigned nodes has enough candidate images.
    fn edges_feasible(&self, v: usize) -> bool {
        let dom = self.dom;
        for (k, e) in dom.edges().iter().enumerate() {
            if self.edge_img[k] != UNSET || (e.source != v && e.target != v) {
                continue;
            }
            let (s, t) = (self.node_img[e.source], self.node_img[e.target]);
            if s == UNSET || t == UNSET {
                continue;
            }
            let need = dom
                .edges_between(e.source, e.target)
                .iter()
                .filter(|&&x| self.edge_img[x] == UNSET && dom.edge(x).label == e.label)
                .count();
            let have = self
                .cod
                .edges_between(s, t)
                .iter()
                .filter(|&&y| !self.edge_used[y] && self.cod.edge(y).label == e.label)
                .count();
            if have < need {
                return false;
            }
        }
        true
    }

    fn nodes<B>(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> ControlFlow<B>) -> ControlFlow<B> {
        if depth == self.node_order.len() {
            return self.edges(0, visit);
        }
        let i = self.node_order[depth];
        let label = &self.dom.node(i).label;
        for j in 0..self.cod.node_count() {
            if self.node_used[j]
                || self.cod.node(j).label != *label
                || self.out_deg.1[j] < self.out_deg.0[i]
                || self.in_deg.1[j] < self.in_deg.0[i]
            {
                continue;
            }
            self.node_img[i] = j;
            self.node_used[j] = true;
            if self.edges_feasible(i) {
                self.nodes(depth + 1, visit)?;
            }
            self.node_used[j] = false;
            self.node_img[i] = UNSET;
        }
        ControlFlow::Continue(())
    }

    fn edges<B>(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> ControlFlow<B>) -> ControlFlow<B> {
        if depth == self.edge_order.len() {
            return visit(&self.node_img, &self.edge_img);
        }
        let i = self.edge_order[depth];
        let e = self.dom.edge(i);
        let (s, t) = (self.node_img[e.source], self.node_img[e.target]);
        let cands = self.cod.edges_between(s, t);
        for &j in cands {
            if self.edge_used[j] || self.cod.edge(j).label != e.label {
                continue;
            }
            self.edge_img[i] = j;
            self.edge_used[j] = true;
            self.edges(depth + 1, visit)?;
            self.edge_used[j] = false;
            self.edge_img[i] = UNSET;
        }
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn g(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Graph> {
        let mut b = GraphBuilder::new();
        for n in nodes {
            b = b.blank_node(*n);
        }
        for (id, s, t) in edges {
            b = b.blank_edge(*id, *s, *t);
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn counts_injective_maps() {
        let edge = g(&["a", "b"], &[("e", "a", "b")]);
        let tri = g(&["x", "y", "z"], &[("f", "x", "y"), ("g", "y", "z"), ("h", "z", "x")]);
        assert_eq!(injective_morphisms(&edge, &tri).len(), 3);
        let two = g(&["a", "b"], &[]);
        assert_eq!(injective_morphisms(&two, &tri).len(), 6);
        let parallel = g(&["a", "b"], &[("e1", "a", "b"), ("e2", "a", "b")]);
        assert_eq!(injective_morphisms(&edge, &parallel).len(), 2);
        assert_eq!(injective_morphisms(&parallel, &parallel).len(), 2);
        assert_eq!(injective_morphisms(&parallel, &edge).len(), 0);
    }

    #[test]
    fn inclusion_and_composition() {
        let small = g(&["a"], &[]);
        let big = g(&["a", "b"], &[("e", "a", "b")]);
        let i = Morphism::inclusion(small.clone(), big.clone()).unwrap();
        assert!(i.is_inclusion() && i.is_injective() && !i.is_bijective());
        let id = Morphism::identity(big.clone());
        assert_eq!(i.then(&id).unwrap(), i);
        assert!(Morphism::inclusion(big, small).is_err());
    }

    #[test]
    fn invalid_maps_rejected() {
        let edge = g(&["a", "b"], &[("e", "a", "b")]);
        let rev = Morphism::new(edge.clone(), edge.clone(), vec![1, 0], vec![0]);
        assert!(rev.is_err());
    }

    #[test]
    fn isomorphism_detection() {
        let c1 = g(&["a", "b"], &[("e", "a", "b"), ("f", "b", "a")]);
        let c2 = g(&["p", "q"], &[("x", "q", "p"), ("y", "p", "q")]);
        let p = g(&["p", "q"], &[("x", "q", "p"), ("y", "q", "p")]);
        let iso = find_isomorphism(&c1, &c2).unwrap();
        assert!(iso.is_bijective());
        assert_eq!(iso.then(&iso.inverse().unwrap()).unwrap(), Morphism::identity(c1.clone()));
        assert!(!is_isomorphic(&c1, &p));
    }

    #[test]
    fn pinned_extensions() {
        let p = g(&["1"], &[]);
        let c = g(&["1", "v"], &[("e", "1", "v")]);
        let host = g(&["x", "y", "z"], &[("f", "x", "y"), ("g", "x", "z"), ("h", "y", "z")]);
        let a = Morphism::inclusion(p.clone(), c).unwrap();
        let at_x = Morphism::new(p.clone(), host.clone(), vec![0], vec![]).unwrap();
        assert_eq!(extensions(&a, &at_x).len(), 2);
        let at_z = Morphism::new(p, host, vec![2], vec![]).unwrap();
        assert!(extensions(&a, &at_z).is_empty());
    }
}
