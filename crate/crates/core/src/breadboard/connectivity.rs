//! Which holes are electrically common, and the netlist they imply.

use std::collections::BTreeMap;

use super::{BreadboardLayout, Hole, Row, COLUMNS};
use crate::circuit::{build_netlist, Branch, ComponentId, ComponentKind, Energization, Netlist, NodeId, Subcircuit};
use crate::linalg::{lu_solve, DenseMatrix};
use crate::solver::SolveResult;
use crate::union_find::UnionFind;
use crate::Real;

/// Conducting metal strips on the board: one per column and bank, plus
/// four rails.
pub const STRIP_COUNT: usize = 2 * COLUMNS as usize + 4;

pub(crate) fn strip_of(hole: Hole) -> usize {
    let column = usize::from(hole.column) - 1;
    match hole.row {
        Row::A | Row::B | Row::C | Row::D | Row::E => column,
        Row::F | Row::G | Row::H | Row::I | Row::J => COLUMNS as usize + column,
        Row::TopPlus => 2 * COLUMNS as usize,
        Row::TopMinus => 2 * COLUMNS as usize + 1,
        Row::BottomPlus => 2 * COLUMNS as usize + 2,
        Row::BottomMinus => 2 * COLUMNS as usize + 3,
    }
}

fn strip_name(strip: usize) -> String {
    let columns = COLUMNS as usize;
    match strip {
        s if s < columns => format!("top{}", s + 1),
        s if s < 2 * columns => format!("bot{}", s - columns + 1),
        s => ["rail_top+", "rail_top-", "rail_bot+", "rail_bot-"][s - 2 * columns].to_string(),
    }
}

/// Node assignment for every hole and every placed component.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    strip_nodes: Vec<NodeId>,
    component_nodes: BTreeMap<ComponentId, Vec<NodeId>>,
    subcircuits: Vec<Subcircuit>,
    energization: Energization,
}

impl ConnectivityReport {
    /// The node a hole belongs to once wires are taken into account.
    pub fn node_of(&self, hole: Hole) -> &NodeId {
        &self.strip_nodes[strip_of(hole)]
    }

    pub fn connected(&self, a: Hole, b: Hole) -> bool {
        self.node_of(a) == self.node_of(b)
    }

    /// Terminal nodes of each placed component, wires included.
    pub fn component_nodes(&self) -> &BTreeMap<ComponentId, Vec<NodeId>> {
        &self.component_nodes
    }

    /// Connected pieces of the circuit; wires are folded into their nodes.
    pub fn subcircuits(&self) -> &[Subcircuit] {
        &self.subcircuits
    }

    pub fn energization(&self) -> &Energization {
        &self.energization
    }

    /// A wire is energized when the node it sits on belongs to an
    /// energizable subcircuit.
    pub fn is_energized(&self, id: &ComponentId) -> bool {
        if self.energization.is_energized(id) {
            return true;
        }
        match self.component_nodes.get(id) {
            Some(nodes) if ComponentKind::from_id(id.as_str()) == Some(ComponentKind::Wire) => {
                self.subcircuits.iter().any(|s| s.energizable && nodes.iter().any(|n| s.nodes.contains(n)))
            }
            _ => false,
        }
    }
}

fn strip_classes<T: Real>(layout: &BreadboardLayout<T>) -> (UnionFind, Vec<NodeId>) {
    let mut uf = UnionFind::with_size(STRIP_COUNT);
    for p in layout.placements() {
        if p.component.kind() == ComponentKind::Wire {
            uf.union(strip_of(p.holes[0]), strip_of(p.holes[1]));
        }
    }
    let mut representative: BTreeMap<usize, usize> = BTreeMap::new();
    for strip in 0..STRIP_COUNT {
        representative.entry(uf.find(strip)).or_insert(strip);
    }
    let names = (0..STRIP_COUNT).map(|s| NodeId::new(strip_name(representative[&uf.find(s)]))).collect();
    (uf, names)
}

fn branches<T: Real>(layout: &BreadboardLayout<T>, names: &[NodeId]) -> Vec<Branch<T>> {
    layout
        .placements()
        .iter()
        .filter(|p| p.component.kind() != ComponentKind::Wire)
        .map(|p| Branch::new(p.component.clone(), p.holes.iter().map(|h| names[strip_of(*h)].clone())))
        .collect()
}

/// Groups holes into nodes: holes on one strip are common, and a wire
/// joins the strips at its two ends.
///
/// Each node is named after the lowest-numbered strip it contains, so the
/// result does not depend on placement order.
pub fn connectivity<T: Real>(layout: &BreadboardLayout<T>) -> ConnectivityReport {
    let (_, strip_nodes) = strip_classes(layout);
    let component_nodes = layout
        .placements()
        .iter()
        .map(|p| {
            let nodes = p.holes.iter().map(|h| strip_nodes[strip_of(*h)].clone()).collect();
            (p.component.id().clone(), nodes)
        })
        .collect();
    let netlist = build_netlist(branches(layout, &strip_nodes)).expect("layout invariants hold");
    let subcircuits = netlist.subcircuits();
    let energization = Energization::from_subcircuits(&subcircuits);
    ConnectivityReport { strip_nodes, component_nodes, subcircuits, energization }
}

/// The netlist of everything on the board. Wires become node merges.
pub fn extract_netlist<T: Real>(layout: &BreadboardLayout<T>) -> Netlist<T> {
    let (_, names) = strip_classes(layout);
    build_netlist(branches(layout, &names)).expect("layout invariants hold")
}

/// Current through each wire, positive from its first hole to its second.
///
/// Within a group of wire-joined strips the wires are treated as equal
/// conductances; the currents that component terminals push into each strip
/// are then spread over the wires by a small nodal solve. A wire whose two
/// ends share a strip carries nothing.
pub fn wire_currents<T: Real>(layout: &BreadboardLayout<T>, result: &SolveResult<T>) -> BTreeMap<ComponentId, T> {
    let (mut uf, _) = strip_classes(layout);
    let mut injection = [T::zero(); STRIP_COUNT];
    for p in layout.placements() {
        if p.component.kind() == ComponentKind::Wire {
            continue;
        }
        if let Some(currents) = result.terminal_currents.get(p.component.id()) {
            for (hole, &i) in p.holes.iter().zip(currents) {
                // Current into the component leaves the strip.
                injection[strip_of(*hole)] -= i;
            }
        }
    }

    let wires: Vec<(&ComponentId, usize, usize)> = layout
        .placements()
        .iter()
        .filter(|p| p.component.kind() == ComponentKind::Wire)
        .map(|p| (p.component.id(), strip_of(p.holes[0]), strip_of(p.holes[1])))
        .collect();

    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(_, a, b) in &wires {
        for s in [a, b] {
            let members = classes.entry(uf.find(s)).or_default();
            if !members.contains(&s) {
                members.push(s);
            }
        }
    }

    let mut potential = [T::zero(); STRIP_COUNT];
    for members in classes.values_mut() {
        members.sort_unstable();
        // The first member is held at zero.
        let unknowns = &members[1..];
        if unknowns.is_empty() {
            continue;
        }
        let row = |s: usize| unknowns.iter().position(|&u| u == s);
        let mut laplacian = DenseMatrix::zeros(unknowns.len());
        for &(_, a, b) in &wires {
            if a == b || uf.find(a) != uf.find(members[0]) {
                continue;
            }
            let (ra, rb) = (row(a), row(b));
            if let Some(i) = ra {
                laplacian.add(i, i, T::one());
            }
            if let Some(j) = rb {
                laplacian.add(j, j, T::one());
            }
            if let (Some(i), Some(j)) = (ra, rb) {
                laplacian.add(i, j, -T::one());
                laplacian.add(j, i, -T::one());
            }
        }
        let rhs: Vec<T> = unknowns.iter().map(|&s| injection[s]).collect();
        let solution = lu_solve(&laplacian, &rhs).expect("wire graph within a class is connected");
        for (&s, v) in unknowns.iter().zip(solution) {
            potential[s] = v;
        }
    }

    wires.into_iter().map(|(id, a, b)| (id.clone(), potential[a] - potential[b])).collect()
}
