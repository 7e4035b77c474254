use std::collections::{BTreeMap, BTreeSet};

use super::{CircuitError, Component, ComponentId, ComponentKind, NodeId};
use crate::union_find::UnionFind;

/// A component together with the node each of its terminals attaches to.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub component: Component<T>,
    pub nodes: Vec<NodeId>,
}

impl<T> Branch<T> {
    pub fn new(component: Component<T>, nodes: impl IntoIterator<Item = impl Into<NodeId>>) -> Self {
        Self { component, nodes: nodes.into_iter().map(Into::into).collect() }
    }

    pub fn id(&self) -> &ComponentId {
        self.component.id()
    }

    pub fn kind(&self) -> ComponentKind {
        self.component.kind()
    }
}

/// Electrical graph: nodes joined by component branches.
///
/// Only constructible through [`build_netlist`], which merges wires into
/// their endpoints, sorts branches by id and picks the ground node.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist<T> {
    nodes: BTreeSet<NodeId>,
    ground: Option<NodeId>,
    branches: Vec<Branch<T>>,
}

impl<T> Default for Netlist<T> {
    fn default() -> Self {
        Self { nodes: BTreeSet::new(), ground: None, branches: Vec::new() }
    }
}

impl<T> Netlist<T> {
    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// `None` only for an empty netlist.
    pub fn ground(&self) -> Option<&NodeId> {
        self.ground.as_ref()
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn branch(&self, id: &ComponentId) -> Option<&Branch<T>> {
        self.branches.binary_search_by(|b| b.id().cmp(id)).ok().map(|i| &self.branches[i])
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn into_branches(self) -> Vec<Branch<T>> {
        self.branches
    }
}

/// Builds a netlist from branches.
///
/// Wire branches are ideal: their two nodes are merged (the merged node keeps
/// the name `"0"` if present, otherwise the smallest name) and the wire itself
/// is dropped. Ground is `"0"` when present, otherwise the negative terminal
/// node of the lowest-id source, otherwise the smallest node name.
pub fn build_netlist<T>(branches: Vec<Branch<T>>) -> Result<Netlist<T>, CircuitError> {
    let mut seen = BTreeSet::new();
    for branch in &branches {
        if !seen.insert(branch.id().clone()) {
            return Err(CircuitError::DuplicateComponentId(branch.id().clone()));
        }
        let terminals = branch.component.terminals();
        if branch.nodes.len() > terminals.len() {
            return Err(CircuitError::TerminalCountMismatch {
                component: branch.id().clone(),
                expected: terminals.len(),
                found: branch.nodes.len(),
            });
        }
        for (i, terminal) in terminals.iter().enumerate() {
            if branch.nodes.get(i).is_none_or(|n| n.as_str().is_empty()) {
                return Err(CircuitError::DanglingTerminal { component: branch.id().clone(), terminal });
            }
        }
    }

    let rename = wire_merges(&branches);
    let mut branches: Vec<Branch<T>> = branches
        .into_iter()
        .filter(|b| b.kind() != ComponentKind::Wire)
        .map(|mut b| {
            for node in &mut b.nodes {
                if let Some(target) = rename.get(node) {
                    *node = target.clone();
                }
            }
            b
        })
        .collect();
    branches.sort_by(|a, b| a.id().cmp(b.id()));

    let nodes: BTreeSet<NodeId> = branches.iter().flat_map(|b| b.nodes.iter().cloned()).collect();
    let ground = choose_reference(&nodes, branches.iter());
    Ok(Netlist { nodes, ground, branches })
}

/// Maps every node touched by a wire to its merged representative.
fn wire_merges<T>(branches: &[Branch<T>]) -> BTreeMap<NodeId, NodeId> {
    let wired: BTreeSet<&NodeId> =
        branches.iter().filter(|b| b.kind() == ComponentKind::Wire).flat_map(|b| b.nodes.iter()).collect();
    if wired.is_empty() {
        return BTreeMap::new();
    }
    let index: BTreeMap<&NodeId, usize> = wired.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let names: Vec<&NodeId> = wired.into_iter().collect();
    let mut uf = UnionFind::with_size(names.len());
    for b in branches.iter().filter(|b| b.kind() == ComponentKind::Wire) {
        uf.union(index[&b.nodes[0]], index[&b.nodes[1]]);
    }
    let mut representative: BTreeMap<usize, &NodeId> = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        let root = uf.find(i);
        let entry = representative.entry(root).or_insert(name);
        if name.as_str() == NodeId::GROUND_NAME || (entry.as_str() != NodeId::GROUND_NAME && *name < *entry) {
            *entry = name;
        }
    }
    names.iter().enumerate().map(|(i, name)| ((*name).clone(), representative[&uf.find(i)].clone())).collect()
}

/// Reference-node rule shared by the whole netlist and by each subcircuit.
pub(super) fn choose_reference<'a, T: 'a>(
    nodes: &BTreeSet<NodeId>,
    branches: impl Iterator<Item = &'a Branch<T>>,
) -> Option<NodeId> {
    let ground = NodeId::new(NodeId::GROUND_NAME);
    if nodes.contains(&ground) {
        return Some(ground);
    }
    branches
        .filter(|b| b.kind().is_source() && nodes.contains(&b.nodes[1]))
        .min_by(|a, b| a.id().cmp(b.id()))
        .map(|b| b.nodes[1].clone())
        .or_else(|| nodes.iter().next().cloned())
}
