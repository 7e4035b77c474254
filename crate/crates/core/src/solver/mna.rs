//! Modified nodal analysis: unknown layout and per-device stamps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::devices::{junction, npn};
use super::{FloatingNodes, SolveError, GMIN};
use crate::circuit::{ComponentId, ComponentKind, ComponentParams, Netlist, NodeId};
use crate::linalg::{lu_solve, DenseMatrix};
use crate::union_find::UnionFind;
use crate::Real;

/// One entry of the unknown vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unknown {
    NodeVoltage(NodeId),
    SourceCurrent(ComponentId),
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::NodeVoltage(n) => write!(f, "node {n}"),
            Unknown::SourceCurrent(c) => write!(f, "source current of {c}"),
        }
    }
}

/// How the capacitors of a netlist enter the system.
#[derive(Debug, Clone, Copy)]
pub enum Analysis<'a, T> {
    /// Capacitors are open circuits.
    Dc,
    /// Backward-Euler companion models around the previous step's voltages.
    BackwardEuler { dt: T, capacitor_voltages: &'a BTreeMap<ComponentId, T> },
}

/// Row assignment: non-reference node voltages (by node name) followed by
/// the branch currents of voltage sources (by component id). Each
/// subcircuit contributes one reference node held at 0 V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnaLayout {
    node_rows: BTreeMap<NodeId, usize>,
    source_rows: BTreeMap<ComponentId, usize>,
    references: BTreeSet<NodeId>,
    unknowns: Vec<Unknown>,
}

impl MnaLayout {
    pub fn new<T: Real>(
        netlist: &Netlist<T>,
        capacitors_conduct: bool,
        floating: FloatingNodes,
    ) -> Result<Self, SolveError<T>> {
        let subcircuits = netlist.subcircuits();
        let references: BTreeSet<NodeId> = subcircuits.iter().map(|s| s.reference.clone()).collect();

        if floating == FloatingNodes::Reject {
            if let Some(node) = first_floating_node(netlist, &references, capacitors_conduct) {
                return Err(SolveError::SingularSystem { unknown: Unknown::NodeVoltage(node) });
            }
        }

        let mut unknowns = Vec::new();
        let mut node_rows = BTreeMap::new();
        for node in netlist.nodes().iter().filter(|n| !references.contains(*n)) {
            node_rows.insert(node.clone(), unknowns.len());
            unknowns.push(Unknown::NodeVoltage(node.clone()));
        }
        let mut source_rows = BTreeMap::new();
        for branch in netlist.branches().iter().filter(|b| b.kind().is_source()) {
            source_rows.insert(branch.id().clone(), unknowns.len());
            unknowns.push(Unknown::SourceCurrent(branch.id().clone()));
        }
        Ok(Self { node_rows, source_rows, references, unknowns })
    }

    pub fn dim(&self) -> usize {
        self.unknowns.len()
    }

    /// Row of a node voltage; `None` for reference nodes.
    pub fn node_row(&self, node: &NodeId) -> Option<usize> {
        self.node_rows.get(node).copied()
    }

    pub fn source_row(&self, id: &ComponentId) -> Option<usize> {
        self.source_rows.get(id).copied()
    }

    pub fn references(&self) -> &BTreeSet<NodeId> {
        &self.references
    }

    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn voltage<T: Real>(&self, x: &[T], node: &NodeId) -> T {
        self.node_row(node).map_or(T::zero(), |r| x[r])
    }
}

/// A node that has no conducting path to its subcircuit's reference.
fn first_floating_node<T>(
    netlist: &Netlist<T>,
    references: &BTreeSet<NodeId>,
    capacitors_conduct: bool,
) -> Option<NodeId> {
    let index: BTreeMap<&NodeId, usize> = netlist.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut uf = UnionFind::with_size(index.len());
    for branch in netlist.branches() {
        if branch.kind() == ComponentKind::Capacitor && !capacitors_conduct {
            continue;
        }
        for pair in branch.nodes.windows(2) {
            uf.union(index[&pair[0]], index[&pair[1]]);
        }
    }
    let grounded: BTreeSet<usize> = references.iter().map(|r| uf.find(index[r])).collect();
    netlist.nodes().iter().find(|n| !grounded.contains(&uf.find(index[n]))).cloned()
}

/// Linearization point for the nonlinear devices: junction voltages keyed by
/// component (`[vd, _]` for diodes and LEDs, `[vbe, vbc]` for transistors).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperatingPoint<T> {
    pub junctions: BTreeMap<ComponentId, [T; 2]>,
}

impl<T: Real> OperatingPoint<T> {
    /// All junctions at 0 V.
    pub fn zero(netlist: &Netlist<T>) -> Self {
        let junctions = netlist
            .branches()
            .iter()
            .filter(|b| is_nonlinear(b.kind()))
            .map(|b| (b.id().clone(), [T::zero(); 2]))
            .collect();
        Self { junctions }
    }

    /// Junction voltages implied by a vector of node voltages.
    pub fn from_solution(netlist: &Netlist<T>, layout: &MnaLayout, x: &[T]) -> Self {
        let junctions = netlist
            .branches()
            .iter()
            .filter(|b| is_nonlinear(b.kind()))
            .map(|b| (b.id().clone(), junction_voltages(layout, x, &b.nodes, b.kind())))
            .collect();
        Self { junctions }
    }
}

pub(crate) fn is_nonlinear(kind: ComponentKind) -> bool {
    matches!(kind, ComponentKind::Diode | ComponentKind::Led | ComponentKind::TransistorNpn)
}

pub(crate) fn junction_voltages<T: Real>(layout: &MnaLayout, x: &[T], nodes: &[NodeId], kind: ComponentKind) -> [T; 2] {
    let v = |i: usize| layout.voltage(x, &nodes[i]);
    match kind {
        ComponentKind::TransistorNpn => [v(1) - v(2), v(1) - v(0)],
        _ => [v(0) - v(1), T::zero()],
    }
}

/// Source voltage of a battery or AC source at `time`.
pub(crate) fn source_voltage<T: Real>(params: &ComponentParams<T>, time: T) -> T {
    match *params {
        ComponentParams::BatteryDc { emf, .. } => emf,
        ComponentParams::SourceAc { amplitude, frequency } => {
            amplitude * (T::lit(2.0) * T::PI() * frequency * time).sin()
        }
        _ => T::zero(),
    }
}

/// Assembled linear (or linearized) system `matrix * x = rhs`.
#[derive(Debug, Clone)]
pub struct MnaSystem<T> {
    pub layout: Arc<MnaLayout>,
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
}

impl<T: Real> MnaSystem<T> {
    pub fn solve(&self) -> Result<Vec<T>, SolveError<T>> {
        lu_solve(&self.matrix, &self.rhs)
            .map_err(|p| SolveError::SingularSystem { unknown: self.layout.unknowns[p.column].clone() })
    }
}

struct Stamper<'a, T> {
    layout: &'a MnaLayout,
    matrix: DenseMatrix<T>,
    rhs: Vec<T>,
}

impl<T: Real> Stamper<'_, T> {
    fn add(&mut self, row: Option<usize>, col: Option<usize>, value: T) {
        if let (Some(r), Some(c)) = (row, col) {
            self.matrix.add(r, c, value);
        }
    }

    fn inject(&mut self, row: Option<usize>, value: T) {
        if let Some(r) = row {
            self.rhs[r] += value;
        }
    }

    fn conductance(&mut self, a: Option<usize>, b: Option<usize>, g: T) {
        self.add(a, a, g);
        self.add(b, b, g);
        self.add(a, b, -g);
        self.add(b, a, -g);
    }

    /// Current `i_eq` flowing from `a` to `b` through the element.
    fn current(&mut self, a: Option<usize>, b: Option<usize>, i_eq: T) {
        self.inject(a, -i_eq);
        self.inject(b, i_eq);
    }
}

/// Assembles the system linearized at `point`, with sources evaluated at `time`.
pub fn stamp_with<T: Real>(
    netlist: &Netlist<T>,
    layout: &Arc<MnaLayout>,
    point: &OperatingPoint<T>,
    time: T,
    analysis: &Analysis<'_, T>,
) -> MnaSystem<T> {
    stamp_gmin(netlist, layout, point, time, analysis, T::lit(GMIN))
}

/// As [`stamp_with`], with `gmin` from every node to its reference.
pub(crate) fn stamp_gmin<T: Real>(
    netlist: &Netlist<T>,
    layout: &Arc<MnaLayout>,
    point: &OperatingPoint<T>,
    time: T,
    analysis: &Analysis<'_, T>,
    gmin: T,
) -> MnaSystem<T> {
    let n = layout.dim();
    let mut s = Stamper { layout, matrix: DenseMatrix::zeros(n), rhs: vec![T::zero(); n] };
    for row in layout.node_rows.values() {
        s.matrix.add(*row, *row, gmin);
    }

    for branch in netlist.branches() {
        let rows: Vec<Option<usize>> = branch.nodes.iter().map(|n| s.layout.node_row(n)).collect();
        match *branch.component.params() {
            ComponentParams::Resistor { resistance } => s.conductance(rows[0], rows[1], resistance.recip()),
            ComponentParams::Capacitor { capacitance } => {
                if let Analysis::BackwardEuler { dt, capacitor_voltages } = analysis {
                    let g = capacitance / *dt;
                    let v_prev = capacitor_voltages.get(branch.id()).copied().unwrap_or_else(T::zero);
                    s.conductance(rows[0], rows[1], g);
                    s.current(rows[0], rows[1], -g * v_prev);
                }
            }
            ComponentParams::BatteryDc { .. } | ComponentParams::SourceAc { .. } => {
                let k = layout.source_row(branch.id());
                let r_int = match *branch.component.params() {
                    ComponentParams::BatteryDc { internal_resistance, .. } => internal_resistance,
                    _ => T::zero(),
                };
                s.add(rows[0], k, T::one());
                s.add(rows[1], k, -T::one());
                s.add(k, rows[0], T::one());
                s.add(k, rows[1], -T::one());
                s.add(k, k, -r_int);
                s.inject(k, source_voltage(branch.component.params(), time));
            }
            ComponentParams::Diode { saturation_current, emission_coefficient }
            | ComponentParams::Led { saturation_current, emission_coefficient, .. } => {
                let vd = point.junctions.get(branch.id()).map_or(T::zero(), |j| j[0]);
                let (i, g) = junction(vd, saturation_current, emission_coefficient);
                s.conductance(rows[0], rows[1], g);
                s.current(rows[0], rows[1], i - g * vd);
            }
            ComponentParams::TransistorNpn { saturation_current, forward_beta, reverse_beta } => {
                let [vbe, vbc] = point.junctions.get(branch.id()).copied().unwrap_or([T::zero(); 2]);
                let e = npn(vbe, vbc, saturation_current, forward_beta, reverse_beta);
                let (c, b, em) = (rows[0], rows[1], rows[2]);
                // ic(v) ~ ic* + dic_dvbe (vb - ve - vbe*) + dic_dvbc (vb - vc - vbc*), same for ib.
                let ic_eq = e.ic - e.dic_dvbe * vbe - e.dic_dvbc * vbc;
                let ib_eq = e.ib - e.dib_dvbe * vbe - e.dib_dvbc * vbc;
                let terms =
                    [(c, T::one(), e.dic_dvbe, e.dic_dvbc, ic_eq), (b, T::one(), e.dib_dvbe, e.dib_dvbc, ib_eq)];
                for (row, sign, d_be, d_bc, i_eq) in terms {
                    for (target, k) in [(row, sign), (em, -sign)] {
                        s.add(target, b, k * (d_be + d_bc));
                        s.add(target, em, -k * d_be);
                        s.add(target, c, -k * d_bc);
                        s.inject(target, -k * i_eq);
                    }
                }
            }
            ComponentParams::Wire => {}
        }
    }

    MnaSystem { layout: Arc::clone(layout), matrix: s.matrix, rhs: s.rhs }
}

/// Assembles the DC system of `netlist` linearized at `state`, sources at `time`.
/// Capacitors are open; nodes without a conducting path to their reference
/// are reported as [`SolveError::SingularSystem`].
pub fn stamp<T: Real>(netlist: &Netlist<T>, state: &OperatingPoint<T>, time: T) -> Result<MnaSystem<T>, SolveError<T>> {
    let layout = Arc::new(MnaLayout::new(netlist, false, FloatingNodes::Reject)?);
    Ok(stamp_with(netlist, &layout, state, time, &Analysis::Dc))
}

/// Device-law branch and terminal currents at node voltages `x`.
pub(crate) struct Evaluation<T> {
    pub node_voltages: BTreeMap<NodeId, T>,
    pub branch_currents: BTreeMap<ComponentId, T>,
    pub terminal_currents: BTreeMap<ComponentId, Vec<T>>,
    pub kcl_residual: T,
}

pub(crate) fn evaluate<T: Real>(
    netlist: &Netlist<T>,
    layout: &MnaLayout,
    x: &[T],
    analysis: &Analysis<'_, T>,
) -> Evaluation<T> {
    let node_voltages: BTreeMap<NodeId, T> =
        netlist.nodes().iter().map(|n| (n.clone(), layout.voltage(x, n))).collect();
    let mut branch_currents = BTreeMap::new();
    let mut terminal_currents = BTreeMap::new();
    let mut node_sums: BTreeMap<&NodeId, T> = netlist.nodes().iter().map(|n| (n, T::zero())).collect();

    for branch in netlist.branches() {
        let v = |i: usize| node_voltages[&branch.nodes[i]];
        let two = |i: T| vec![i, -i];
        let (current, terminals) = match *branch.component.params() {
            ComponentParams::Resistor { resistance } => {
                let i = (v(0) - v(1)) / resistance;
                (i, two(i))
            }
            ComponentParams::Capacitor { capacitance } => {
                let i = match analysis {
                    Analysis::Dc => T::zero(),
                    Analysis::BackwardEuler { dt, capacitor_voltages } => {
                        let v_prev = capacitor_voltages.get(branch.id()).copied().unwrap_or_else(T::zero);
                        capacitance / *dt * (v(0) - v(1) - v_prev)
                    }
                };
                (i, two(i))
            }
            ComponentParams::BatteryDc { .. } | ComponentParams::SourceAc { .. } => {
                let i = layout.source_row(branch.id()).map_or(T::zero(), |k| x[k]);
                (i, two(i))
            }
            ComponentParams::Diode { saturation_current, emission_coefficient }
            | ComponentParams::Led { saturation_current, emission_coefficient, .. } => {
                let i = junction(v(0) - v(1), saturation_current, emission_coefficient).0;
                (i, two(i))
            }
            ComponentParams::TransistorNpn { saturation_current, forward_beta, reverse_beta } => {
                let e = npn(v(1) - v(2), v(1) - v(0), saturation_current, forward_beta, reverse_beta);
                (e.ic, vec![e.ic, e.ib, -e.ic - e.ib])
            }
            ComponentParams::Wire => (T::zero(), two(T::zero())),
        };
        for (node, i) in branch.nodes.iter().zip(&terminals) {
            if let Some(sum) = node_sums.get_mut(node) {
                *sum += *i;
            }
        }
        branch_currents.insert(branch.id().clone(), current);
        terminal_currents.insert(branch.id().clone(), terminals);
    }

    let kcl_residual = node_sums.values().fold(T::zero(), |acc, s| acc.max(s.abs()));
    Evaluation { node_voltages, branch_currents, terminal_currents, kcl_residual }
}
