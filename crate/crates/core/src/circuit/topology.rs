//! Connected subcircuits and the structural "closed loop" test.

use std::collections::{BTreeMap, BTreeSet};

use super::netlist::choose_reference;
use super::{ComponentId, Netlist, NodeId};
use crate::union_find::UnionFind;

/// A connected piece of a netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcircuit {
    pub nodes: BTreeSet<NodeId>,
    pub components: BTreeSet<ComponentId>,
    /// Node held at 0 V when solving this piece.
    pub reference: NodeId,
    /// A source in this piece has its two terminals joined by some path
    /// that does not go through the source itself.
    pub energizable: bool,
}

/// Which components sit in an energizable subcircuit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Energization {
    energized: BTreeSet<ComponentId>,
}

impl Energization {
    pub fn from_subcircuits<'a>(subcircuits: impl IntoIterator<Item = &'a Subcircuit>) -> Self {
        let energized =
            subcircuits.into_iter().filter(|s| s.energizable).flat_map(|s| s.components.iter().cloned()).collect();
        Self { energized }
    }

    pub fn is_energized(&self, id: &ComponentId) -> bool {
        self.energized.contains(id)
    }
}

impl<T> Netlist<T> {
    /// Connected components of the node graph, ordered by smallest node name.
    pub fn subcircuits(&self) -> Vec<Subcircuit> {
        let index: BTreeMap<&NodeId, usize> = self.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut uf = UnionFind::with_size(index.len());
        for branch in self.branches() {
            for pair in branch.nodes.windows(2) {
                uf.union(index[&pair[0]], index[&pair[1]]);
            }
        }

        let mut groups: BTreeMap<usize, (BTreeSet<NodeId>, Vec<usize>)> = BTreeMap::new();
        let mut first_seen: Vec<usize> = Vec::new();
        for (node, &i) in &index {
            let root = uf.find(i);
            if !groups.contains_key(&root) {
                first_seen.push(root);
            }
            groups.entry(root).or_default().0.insert((*node).clone());
        }
        for (bi, branch) in self.branches().iter().enumerate() {
            let root = uf.find(index[&branch.nodes[0]]);
            groups.get_mut(&root).expect("branch node indexed").1.push(bi);
        }

        first_seen
            .into_iter()
            .map(|root| {
                let (nodes, members) = groups.remove(&root).expect("group exists");
                let branches = || members.iter().map(|&bi| &self.branches()[bi]);
                let reference = choose_reference(&nodes, branches()).expect("non-empty group");
                let energizable = members.iter().any(|&si| {
                    let source = &self.branches()[si];
                    source.kind().is_source() && {
                        let local: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
                        let mut uf = UnionFind::with_size(local.len());
                        for &bi in members.iter().filter(|&&bi| bi != si) {
                            for pair in self.branches()[bi].nodes.windows(2) {
                                uf.union(local[&pair[0]], local[&pair[1]]);
                            }
                        }
                        uf.connected(local[&source.nodes[0]], local[&source.nodes[1]])
                    }
                });
                Subcircuit { components: branches().map(|b| b.id().clone()).collect(), nodes, reference, energizable }
            })
            .collect()
    }

    pub fn energization(&self) -> Energization {
        Energization::from_subcircuits(&self.subcircuits())
    }
}
