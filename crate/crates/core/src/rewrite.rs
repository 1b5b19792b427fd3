//! Double-pushout rules with application conditions.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::canonical::{canonical_key, CanonicalKey};
use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::gluing::pushout_complement;
use crate::graph::{fresh_id, Edge, Graph, Id, Node};
use crate::morphism::{for_each_injective, Morphism};
use crate::satisfy::{satisfies, Interpretation};

/// A rule `⟨L ↩ K ↪ R⟩` with left and right application conditions.
///
/// `K` is included in both sides by identifier.
#[derive(Clone, Debug)]
pub struct Rule {
    pub name: Id,
    pub left: Arc<Graph>,
    pub interface: Arc<Graph>,
    pub right: Arc<Graph>,
    pub ac_left: Condition,
    pub ac_right: Condition,
    kl: Morphism,
    kr: Morphism,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.left == other.left
            && self.interface == other.interface
            && self.right == other.right
            && self.ac_left == other.ac_left
            && self.ac_right == other.ac_right
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn new(
        name: impl Into<Id>,
        left: Arc<Graph>,
        interface: Arc<Graph>,
        right: Arc<Graph>,
        ac_left: Condition,
        ac_right: Condition,
    ) -> Result<Rule> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidRule {
            name: name.to_string(),
            reason,
        };
        let kl = Morphism::inclusion(interface.clone(), left.clone()).map_err(|e| invalid(format!("interface is not part of the left-hand side: {e}")))?;
        let kr = Morphism::inclusion(interface.clone(), right.clone()).map_err(|e| invalid(format!("interface is not part of the right-hand side: {e}")))?;
        ac_left.check(&left).map_err(|e| invalid(format!("left application condition: {e}")))?;
        ac_right.check(&right).map_err(|e| invalid(format!("right application condition: {e}")))?;
        Ok(Rule {
            name,
            left,
            interface,
            right,
            ac_left,
            ac_right,
            kl,
            kr,
        })
    }

    /// Rule `L ⇒ R` whose interface consists of the nodes the two sides share and no edges.
    pub fn from_sides(name: impl Into<Id>, left: Arc<Graph>, right: Arc<Graph>, ac_left: Condition, ac_right: Condition) -> Result<Rule> {
        let name = name.into();
        let mut nodes = Vec::new();
        for n in left.nodes() {
            if let Some(j) = right.node_index(&n.id) {
                if right.node(j).label != n.label {
                    return Err(Error::InvalidRule {
                        name: name.to_string(),
                        reason: format!("node `{}` changes label", n.id),
                    });
                }
                nodes.push((n.id.clone(), n.label.clone()));
            }
        }
        let interface = Arc::new(Graph::from_parts(nodes, Vec::new())?);
        Rule::new(name, left, interface, right, ac_left, ac_right)
    }

    pub fn kl(&self) -> &Morphism {
        &self.kl
    }

    pub fn kr(&self) -> &Morphism {
        &self.kr
    }

    pub fn span(&self) -> Span {
        Span {
            left: self.left.clone(),
            interface: self.interface.clone(),
            right: self.right.clone(),
            kl: self.kl.clone(),
            kr: self.kr.clone(),
        }
    }

    /// Matches `L → G` that satisfy the dangling condition and the left application condition.
    pub fn find_matches(&self, g: &Arc<Graph>) -> Result<Vec<Morphism>> {
        let mut raw = Vec::new();
        let _ = for_each_injective::<()>(
            &self.left,
            g,
            &vec![None; self.left.node_count()],
            &vec![None; self.left.edge_count()],
            &mut |n, e| {
                raw.push(Morphism::new_unchecked(self.left.clone(), g.clone(), n.to_vec(), e.to_vec()));
                ControlFlow::Continue(())
            },
        );
        let mut out = Vec::new();
        for m in raw {
            if !crate::gluing::violates_dangling(&self.kl, &m) && satisfies(&self.ac_left, &m, &Interpretation::new())? {
                out.push(m);
            }
        }
        Ok(out)
    }

    /// Applies the rule at a match, returning the derivation if every condition holds.
    pub fn apply(&self, g: &Arc<Graph>, m: &Morphism) -> Result<Option<Derivation>> {
        if **m.domain() != *self.left || **m.codomain() != **g {
            return Err(Error::DomainMismatch);
        }
        if !satisfies(&self.ac_left, m, &Interpretation::new())? {
            return Ok(None);
        }
        let Some(d) = pushout_complement(&self.kl, m)? else {
            return Ok(None);
        };
        let (h, comatch) = self.glue_right(&d.object, &d.interface);
        let h = Arc::new(h);
        let comatch = Morphism::new(self.right.clone(), h.clone(), comatch.0, comatch.1)?;
        if !satisfies(&self.ac_right, &comatch, &Interpretation::new())? {
            return Ok(None);
        }
        Ok(Some(Derivation {
            rule: self.name.clone(),
            host: g.clone(),
            result: h,
            matching: m.clone(),
            comatch,
        }))
    }

    // Adds the created items of R to D, naming them after their R identifiers.
    fn glue_right(&self, d: &Graph, k_to_d: &Morphism) -> (Graph, (Vec<usize>, Vec<usize>)) {
        let r = &self.right;
        let mut taken: BTreeSet<Id> = d.ids();
        let mut nodes: Vec<Node> = d.nodes().to_vec();
        let mut edges: Vec<Edge> = d.edges().to_vec();
        let k_pre_nodes = self.kr.node_preimages();
        let k_pre_edges = self.kr.edge_preimages();
        let mut node_img = vec![0; r.node_count()];
        for (i, n) in r.nodes().iter().enumerate() {
            node_img[i] = match k_pre_nodes[i] {
                Some(k) => k_to_d.node(k),
                None => {
                    let id = fresh_id(&n.id, &taken);
                    taken.insert(id.clone());
                    nodes.push(Node { id, label: n.label.clone() });
                    nodes.len() - 1
                }
            };
        }
        let mut edge_img = vec![0; r.edge_count()];
        for (i, e) in r.edges().iter().enumerate() {
            edge_img[i] = match k_pre_edges[i] {
                Some(k) => k_to_d.edge(k),
                None => {
                    let id = fresh_id(&e.id, &taken);
                    taken.insert(id.clone());
                    edges.push(Edge {
                        id,
                        source: node_img[e.source],
                        target: node_img[e.target],
                        label: e.label.clone(),
                    });
                    edges.len() - 1
                }
            };
        }
        let node_ids: Vec<Id> = node_img.iter().map(|&i| nodes[i].id.clone()).collect();
        let edge_ids: Vec<Id> = edge_img.iter().map(|&i| edges[i].id.clone()).collect();
        let h = Graph::assemble_unsorted(nodes, edges);
        let maps = (
            node_ids.iter().map(|id| h.node_index(id).unwrap()).collect(),
            edge_ids.iter().map(|id| h.edge_index(id).unwrap()).collect(),
        );
        (h, maps)
    }

    /// Every direct derivation from `g`, one per match.
    pub fn derivations(&self, g: &Arc<Graph>) -> Result<Vec<Derivation>> {
        let mut out = Vec::new();
        for m in self.find_matches(g)? {
            if let Some(d) = self.apply(g, &m)? {
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// The plain span of a rule, without application conditions.
#[derive(Clone, Debug)]
pub struct Span {
    pub left: Arc<Graph>,
    pub interface: Arc<Graph>,
    pub right: Arc<Graph>,
    pub kl: Morphism,
    pub kr: Morphism,
}

/// A direct derivation `G ⇒ H`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub rule: Id,
    pub host: Arc<Graph>,
    pub result: Arc<Graph>,
    pub matching: Morphism,
    pub comatch: Morphism,
}

/// All graphs derivable from `g` in one step with some rule of `rules`, up to isomorphism.
pub fn derive_all(rules: &[Arc<Rule>], g: &Arc<Graph>) -> Result<Vec<Arc<Graph>>> {
    let mut seen: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut out = Vec::new();
    for r in rules {
        for d in r.derivations(g)? {
            if seen.insert(canonical_key(&d.result)) {
                out.push(d.result);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::morphism::is_isomorphic;

    fn graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Graph> {
        let mut b = GraphBuilder::new();
        for n in nodes {
            b = b.blank_node(*n);
        }
        for (id, s, t) in edges {
            b = b.blank_edge(*id, *s, *t);
        }
        Arc::new(b.build().unwrap())
    }

    fn delete_node() -> Rule {
        Rule::from_sides("del", graph(&["1"], &[]), graph(&[], &[]), Condition::True, Condition::True).unwrap()
    }

    #[test]
    fn dangling_condition_blocks_node_deletion() {
        let host = graph(&["a", "b", "c"], &[("x", "a", "b")]);
        let r = delete_node();
        let matches = r.find_matches(&host).unwrap();
        assert_eq!(matches.len(), 1);
        let d = r.apply(&host, &matches[0]).unwrap().unwrap();
        assert!(is_isomorphic(&d.result, &graph(&["p", "q"], &[("y", "p", "q")])));
    }

    #[test]
    fn created_items_get_fresh_names() {
        let grow = Rule::from_sides(
            "grow",
            graph(&["1"], &[]),
            graph(&["1", "2"], &[("e", "1", "2")]),
            Condition::True,
            Condition::True,
        )
        .unwrap();
        let host = graph(&["1", "2"], &[]);
        let ds = grow.derivations(&host).unwrap();
        assert_eq!(ds.len(), 2);
        let h = &ds[0].result;
        assert_eq!(h.node_count(), 3);
        assert!(h.node_index("2_1").is_some());
        assert!(ds[0].comatch.is_injective());
        assert_eq!(derive_all(&[Arc::new(grow)], &host).unwrap().len(), 1);
    }

    #[test]
    fn interface_must_be_shared() {
        let l = graph(&["1"], &[]);
        let k = graph(&["2"], &[]);
        assert!(Rule::new("bad", l.clone(), k, l, Condition::True, Condition::True).is_err());
    }
}
