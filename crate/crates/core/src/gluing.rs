//! Pushouts, pushout complements and overlaps of injective morphisms.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{fresh_id, Edge, Graph, Id, Node};
use crate::morphism::Morphism;

/// Result of a pushout `P′ → C′ ← C` over a span `P′ ← P → C`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: Arc<Graph>,
    /// `P′ → C′`, always an inclusion.
    pub left: Morphism,
    /// `C → C′`.
    pub right: Morphism,
}

/// A jointly surjective pair `b: P′ → E`, `s: C → E` with `b ∘ p = s ∘ a`.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub b: Morphism,
    pub s: Morphism,
}

/// Result of a pushout complement `K → D → G` of `K → L → G`.
#[derive(Clone, Debug)]
pub struct Complement {
    pub object: Arc<Graph>,
    /// `K → D`.
    pub interface: Morphism,
    /// `D → G`, an inclusion.
    pub inclusion: Morphism,
}

fn require_injective(ms: &[&Morphism]) -> Result<()> {
    if ms.iter().all(|m| m.is_injective()) {
        Ok(())
    } else {
        Err(Error::NotInjective)
    }
}

/// Pushout of two injective morphisms with a common domain.
///
/// Items of `P′` keep their identifiers; items only in `C` keep theirs unless
/// they clash, in which case they get a fresh suffix.
pub fn pushout(p: &Morphism, a: &Morphism) -> Result<Pushout> {
    if p.domain() != a.domain() {
        return Err(Error::DomainMismatch);
    }
    require_injective(&[p, a])?;
    let c = a.codomain();
    let node_sigma = vec![None; c.node_count()];
    let edge_sigma = vec![None; c.edge_count()];
    let o = glue(p, a, &node_sigma, &edge_sigma);
    Ok(Pushout {
        object: o.b.codomain().clone(),
        left: o.b,
        right: o.s,
    })
}

/// Glues `P′` and `C` along `P`, additionally identifying each `C`-only item
/// `x` with the `P′`-only item `sigma[x]`.
fn glue(p: &Morphism, a: &Morphism, node_sigma: &[Option<usize>], edge_sigma: &[Option<usize>]) -> Overlap {
    let pp = p.codomain();
    let c = a.codomain();
    let a_node_pre = a.node_preimages();
    let a_edge_pre = a.edge_preimages();
    let mut taken: BTreeSet<Id> = pp.ids();
    for n in c.nodes() {
        taken.insert(n.id.clone());
    }
    for e in c.edges() {
        taken.insert(e.id.clone());
    }
    let pp_ids = pp.ids();

    let mut nodes: Vec<Node> = pp.nodes().to_vec();
    let mut edges: Vec<Edge> = pp.edges().to_vec();
    let mut used_names = pp_ids.clone();
    let mut name_for = |id: &Id, used: &mut BTreeSet<Id>| -> Id {
        let fresh = if used.contains(id) {
            let f = fresh_id(id.as_str(), &taken);
            taken.insert(f.clone());
            f
        } else {
            id.clone()
        };
        used.insert(fresh.clone());
        fresh
    };

    let mut s_nodes = vec![0; c.node_count()];
    for (x, n) in c.nodes().iter().enumerate() {
        s_nodes[x] = if let Some(i) = a_node_pre[x] {
            p.node(i)
        } else if let Some(y) = node_sigma[x] {
            y
        } else {
            nodes.push(Node {
                id: name_for(&n.id, &mut used_names),
                label: n.label.clone(),
            });
            nodes.len() - 1
        };
    }
    let mut s_edges = vec![0; c.edge_count()];
    for (x, e) in c.edges().iter().enumerate() {
        s_edges[x] = if let Some(i) = a_edge_pre[x] {
            p.edge(i)
        } else if let Some(y) = edge_sigma[x] {
            y
        } else {
            edges.push(Edge {
                id: name_for(&e.id, &mut used_names),
                source: s_nodes[e.source],
                target: s_nodes[e.target],
                label: e.label.clone(),
            });
            edges.len() - 1
        };
    }
    // Sort and re-index.
    let mut node_order: Vec<usize> = (0..nodes.len()).collect();
    node_order.sort_by(|&x, &y| nodes[x].id.cmp(&nodes[y].id));
    let mut node_pos = vec![0; nodes.len()];
    for (k, &i) in node_order.iter().enumerate() {
        node_pos[i] = k;
    }
    let mut edge_order: Vec<usize> = (0..edges.len()).collect();
    edge_order.sort_by(|&x, &y| edges[x].id.cmp(&edges[y].id));
    let mut edge_pos = vec![0; edges.len()];
    for (k, &i) in edge_order.iter().enumerate() {
        edge_pos[i] = k;
    }
    let sorted_nodes: Vec<Node> = node_order.iter().map(|&i| nodes[i].clone()).collect();
    let sorted_edges: Vec<Edge> = edge_order
        .iter()
        .map(|&i| Edge {
            source: node_pos[edges[i].source],
            target: node_pos[edges[i].target],
            ..edges[i].clone()
        })
        .collect();
    let e = Arc::new(Graph::assemble(sorted_nodes, sorted_edges));
    let b = Morphism::new_unchecked(
        pp.clone(),
        e.clone(),
        (0..pp.node_count()).map(|i| node_pos[i]).collect(),
        (0..pp.edge_count()).map(|i| edge_pos[i]).collect(),
    );
    let s = Morphism::new_unchecked(
        c.clone(),
        e,
        s_nodes.iter().map(|&i| node_pos[i]).collect(),
        s_edges.iter().map(|&i| edge_pos[i]).collect(),
    );
    Overlap { b, s }
}

/// All overlaps of `p: P → P′` and `a: P → C` with injective legs, one per
/// isomorphism class of cospans. The disjoint union (the pushout) comes first.
pub fn shift_overlaps(p: &Morphism, a: &Morphism) -> Result<Vec<Overlap>> {
    if p.domain() != a.domain() {
        return Err(Error::DomainMismatch);
    }
    require_injective(&[p, a])?;
    let pp = p.codomain();
    let c = a.codomain();
    let p_node_pre = p.node_preimages();
    let p_edge_pre = p.edge_preimages();
    let a_node_pre = a.node_preimages();
    let a_edge_pre = a.edge_preimages();
    let c_only_nodes: Vec<usize> = (0..c.node_count()).filter(|&x| a_node_pre[x].is_none()).collect();
    let c_only_edges: Vec<usize> = (0..c.edge_count()).filter(|&x| a_edge_pre[x].is_none()).collect();

    let mut out = Vec::new();
    let mut node_sigma = vec![None; c.node_count()];
    let mut node_used = vec![false; pp.node_count()];
    for_partial_injections(
        &c_only_nodes,
        &mut node_sigma,
        &mut node_used,
        &|x, y| p_node_pre[y].is_none() && c.node(x).label == pp.node(y).label,
        &mut |node_sigma| {
            // image in P′ of each C node, when it has one
            let img: Vec<Option<usize>> = (0..c.node_count())
                .map(|x| a_node_pre[x].map(|i| p.node(i)).or(node_sigma[x]))
                .collect();
            let mut edge_sigma = vec![None; c.edge_count()];
            let mut edge_used = vec![false; pp.edge_count()];
            for_partial_injections(
                &c_only_edges,
                &mut edge_sigma,
                &mut edge_used,
                &|x, y| {
                    let (e, f) = (c.edge(x), pp.edge(y));
                    p_edge_pre[y].is_none()
                        && e.label == f.label
                        && img[e.source] == Some(f.source)
                        && img[e.target] == Some(f.target)
                },
                &mut |edge_sigma| out.push(glue(p, a, node_sigma, edge_sigma)),
            );
        },
    );
    Ok(out)
}

fn for_partial_injections(
    domain: &[usize],
    sigma: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    allowed: &dyn Fn(usize, usize) -> bool,
    visit: &mut dyn FnMut(&[Option<usize>]),
) {
    fn go(
        k: usize,
        domain: &[usize],
        sigma: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        allowed: &dyn Fn(usize, usize) -> bool,
        visit: &mut dyn FnMut(&[Option<usize>]),
    ) {
        if k == domain.len() {
            visit(sigma);
            return;
        }
        let x = domain[k];
        sigma[x] = None;
        go(k + 1, domain, sigma, used, allowed, visit);
        for y in 0..used.len() {
            if !used[y] && allowed(x, y) {
                used[y] = true;
                sigma[x] = Some(y);
                go(k + 1, domain, sigma, used, allowed, visit);
                sigma[x] = None;
                used[y] = false;
            }
        }
    }
    go(0, domain, sigma, used, allowed, visit);
}

/// Whether deleting `g(L ∖ k(K))` from `G` would leave dangling edges.
pub fn violates_dangling(k: &Morphism, g: &Morphism) -> bool {
    let l = g.domain();
    let host = g.codomain();
    let kept = k.node_preimages();
    let deleted_nodes: Vec<usize> = (0..l.node_count())
        .filter(|&i| kept[i].is_none())
        .map(|i| g.node(i))
        .collect();
    let matched_edges: BTreeSet<usize> = g.edge_map().iter().copied().collect();
    host.edges().iter().enumerate().any(|(j, e)| {
        !matched_edges.contains(&j) && (deleted_nodes.contains(&e.source) || deleted_nodes.contains(&e.target))
    })
}

/// Pushout complement of injective `k: K → L` and `g: L → G`, if it exists.
pub fn pushout_complement(k: &Morphism, g: &Morphism) -> Result<Option<Complement>> {
    if k.codomain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    require_injective(&[k, g])?;
    let l = g.domain();
    let host = g.codomain();
    let kn = k.node_preimages();
    let ke = k.edge_preimages();
    let mut drop_nodes = vec![false; host.node_count()];
    let mut drop_edges = vec![false; host.edge_count()];
    for i in 0..l.node_count() {
        if kn[i].is_none() {
            drop_nodes[g.node(i)] = true;
        }
    }
    for i in 0..l.edge_count() {
        if ke[i].is_none() {
            drop_edges[g.edge(i)] = true;
        }
    }
    let d = match host.remove_items(&drop_nodes, &drop_edges) {
        Ok(d) => Arc::new(d),
        Err(_) => return Ok(None),
    };
    let inclusion = Morphism::inclusion(d.clone(), host.clone())?;
    let interface = Morphism::new(
        k.domain().clone(),
        d.clone(),
        (0..k.domain().node_count())
            .map(|i| d.node_index(host.node(g.node(k.node(i))).id.as_str()).unwrap())
            .collect(),
        (0..k.domain().edge_count())
            .map(|i| d.edge_index(host.edge(g.edge(k.edge(i))).id.as_str()).unwrap())
            .collect(),
    )?;
    Ok(Some(Complement {
        object: d,
        interface,
        inclusion,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::morphism::{find_isomorphism, is_isomorphic};

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
    fn pushout_of_edge_and_node() {
        let p = g(&["1"], &[]);
        let left = g(&["1", "2"], &[("e", "1", "2")]);
        let right = g(&["1", "2"], &[("e", "2", "1")]);
        let po = pushout(
            &Morphism::inclusion(p.clone(), left).unwrap(),
            &Morphism::inclusion(p, right).unwrap(),
        )
        .unwrap();
        assert_eq!(po.object.node_count(), 3);
        assert_eq!(po.object.edge_count(), 2);
        assert!(po.left.is_inclusion());
        assert!(!po.right.is_inclusion());
        assert!(po.right.is_injective());
    }

    #[test]
    fn seven_overlaps_of_two_nodes_with_an_edge() {
        let empty = Arc::new(Graph::empty());
        let r = g(&["1", "2"], &[("e", "1", "2")]);
        let c = g(&["v", "w"], &[]);
        let ov = shift_overlaps(&Morphism::from_empty(r), &Morphism::from_empty(c)).unwrap();
        assert_eq!(ov.len(), 7);
        assert_eq!(ov[0].b.codomain().node_count(), 4);
        let _ = empty;
        for o in &ov {
            assert!(o.b.is_inclusion() && o.s.is_injective());
        }
        // two of them have isomorphic codomains but differ as cospans
        let codomains: Vec<_> = ov.iter().map(|o| o.b.codomain().clone()).collect();
        let iso_pairs = (0..7)
            .flat_map(|i| (i + 1..7).map(move |j| (i, j)))
            .filter(|&(i, j)| is_isomorphic(&codomains[i], &codomains[j]))
            .count();
        assert!(iso_pairs > 0);
    }

    #[test]
    fn overlaps_merge_edges_only_over_merged_endpoints() {
        let p = g(&["1"], &[]);
        let pp = g(&["1", "2"], &[("e", "1", "2")]);
        let c = g(&["1", "v"], &[("f", "1", "v")]);
        let ov = shift_overlaps(
            &Morphism::inclusion(p.clone(), pp).unwrap(),
            &Morphism::inclusion(p, c).unwrap(),
        )
        .unwrap();
        // v apart; v = 2 with f apart; v = 2 with f = e
        assert_eq!(ov.len(), 3);
        let sizes: Vec<(usize, usize)> = ov.iter().map(|o| (o.b.codomain().node_count(), o.b.codomain().edge_count())).collect();
        assert_eq!(sizes, vec![(3, 2), (2, 2), (2, 1)]);
    }

    #[test]
    fn complement_exists_iff_no_dangling() {
        let k = g(&["1"], &[]);
        let l = g(&["1", "2"], &[("e", "1", "2")]);
        let kl = Morphism::inclusion(k, l.clone()).unwrap();
        let host = g(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c")]);
        let at_ab = Morphism::new(l.clone(), host.clone(), vec![0, 1], vec![0]).unwrap();
        let at_bc = Morphism::new(l, host.clone(), vec![1, 2], vec![1]).unwrap();
        assert!(violates_dangling(&kl, &at_ab));
        assert!(pushout_complement(&kl, &at_ab).unwrap().is_none());
        assert!(!violates_dangling(&kl, &at_bc));
        let pc = pushout_complement(&kl, &at_bc).unwrap().unwrap();
        assert!(is_isomorphic(&pc.object, &g(&["p", "q"], &[("z", "p", "q")])));
        // gluing D and L back over K recovers G
        let po = pushout(&pc.interface, &kl).unwrap();
        assert!(find_isomorphism(&po.object, &host).is_some());
    }
}
