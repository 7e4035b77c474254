//! DC operating point and backward-Euler transient analysis.
//!
//! Every solve assembles a modified-nodal-analysis system (node voltages plus
//! voltage-source currents), linearizes diodes, LEDs and transistors around
//! the current junction voltages, and iterates Newton steps until both the
//! voltage update and the Kirchhoff current residual are below tolerance.

mod devices;
mod mna;
mod power;
mod transient;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{ComponentId, Netlist, NodeId};
use crate::Real;

use mna::stamp_gmin;
pub use mna::{stamp, stamp_with, Analysis, MnaLayout, MnaSystem, OperatingPoint, Unknown};
pub use power::{power_balance, PowerBalance};
pub use transient::{solve_transient, solve_transient_with, TransientConfig, TransientFailure, TransientStepper};

/// Conductance from every non-reference node to its reference, in siemens.
pub const GMIN: f64 = 1e-12;
/// Newton stops when no node voltage moved more than this (volts)...
pub const VOLTAGE_TOLERANCE: f64 = 1e-6;
/// ...and the Kirchhoff current residual is below this (amperes).
pub const CURRENT_TOLERANCE: f64 = 1e-9;
pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// Largest change of any junction voltage per Newton iteration (volts).
pub const JUNCTION_STEP_LIMIT: f64 = 0.5;

/// Treatment of nodes with no conducting path to their reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FloatingNodes {
    /// Report [`SolveError::SingularSystem`] naming the node.
    #[default]
    Reject,
    /// Let the Gmin conductance pin them to 0 V.
    Gmin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub voltage_tolerance: T,
    pub current_tolerance: T,
    pub max_iterations: usize,
    pub junction_step_limit: T,
    pub floating_nodes: FloatingNodes,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            voltage_tolerance: T::lit(VOLTAGE_TOLERANCE),
            current_tolerance: T::lit(CURRENT_TOLERANCE),
            max_iterations: MAX_NEWTON_ITERATIONS,
            junction_step_limit: T::lit(JUNCTION_STEP_LIMIT),
            floating_nodes: FloatingNodes::Reject,
        }
    }
}

/// Electrical state at one instant.
///
/// Branch currents are positive when conventional current flows from the
/// component's first terminal to its second through the component. For a
/// transistor the branch current is the collector current. Terminal currents
/// are the currents flowing into each terminal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<T> {
    pub time: T,
    pub node_voltages: BTreeMap<NodeId, T>,
    pub branch_currents: BTreeMap<ComponentId, T>,
    pub terminal_currents: BTreeMap<ComponentId, Vec<T>>,
    pub converged: bool,
    pub newton_iterations: usize,
    pub kcl_residual: T,
    /// Node-to-reference conductance present in this solution: [`GMIN`], or
    /// zero when the circuit also solved without it.
    pub gmin: T,
}

impl<T: Real> SolveResult<T> {
    pub fn empty(time: T) -> Self {
        Self {
            time,
            node_voltages: BTreeMap::new(),
            branch_currents: BTreeMap::new(),
            terminal_currents: BTreeMap::new(),
            converged: true,
            newton_iterations: 0,
            kcl_residual: T::zero(),
            gmin: T::zero(),
        }
    }

    pub fn voltage(&self, node: &NodeId) -> Option<T> {
        self.node_voltages.get(node).copied()
    }

    pub fn current(&self, id: &ComponentId) -> Option<T> {
        self.branch_currents.get(id).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError<T> {
    #[error("singular system at {unknown}")]
    SingularSystem { unknown: Unknown },
    #[error("Newton iteration did not converge")]
    NoConvergence { best: Box<SolveResult<T>> },
    #[error("invalid analysis configuration: {0}")]
    InvalidConfig(String),
}

/// DC operating point with default options.
///
/// A netlist without any closed loop simply yields zero currents.
pub fn solve_dc<T: Real>(netlist: &Netlist<T>) -> Result<SolveResult<T>, SolveError<T>> {
    solve_dc_with(netlist, &SolveOptions::default())
}

pub fn solve_dc_with<T: Real>(
    netlist: &Netlist<T>,
    options: &SolveOptions<T>,
) -> Result<SolveResult<T>, SolveError<T>> {
    let layout = Arc::new(MnaLayout::new(netlist, false, options.floating_nodes)?);
    let start = OperatingPoint::zero(netlist);
    newton(netlist, &layout, start, T::zero(), &Analysis::Dc, options).map(|(result, _)| result)
}

/// Newton iteration with Gmin in place, then a polish without it. Returns
/// the result and the final linearization point (a warm start for the next
/// time step).
///
/// The polish starts from the converged point; if the circuit has no
/// unique solution without Gmin (a floating island) or the polish fails to
/// converge, the Gmin solution is returned unchanged.
pub(crate) fn newton<T: Real>(
    netlist: &Netlist<T>,
    layout: &Arc<MnaLayout>,
    point: OperatingPoint<T>,
    time: T,
    analysis: &Analysis<'_, T>,
    options: &SolveOptions<T>,
) -> Result<(SolveResult<T>, OperatingPoint<T>), SolveError<T>> {
    if netlist.is_empty() {
        return Ok((SolveResult::empty(time), point));
    }
    let (result, point, x) = iterate(netlist, layout, point, None, time, analysis, options, T::lit(GMIN))?;
    match iterate(netlist, layout, point.clone(), Some(x), time, analysis, options, T::zero()) {
        Ok((mut polished, polished_point, _)) if polished.node_voltages.values().all(|v| v.is_finite()) => {
            polished.newton_iterations += result.newton_iterations;
            Ok((polished, polished_point))
        }
        _ => Ok((result, point)),
    }
}

type NewtonPass<T> = (SolveResult<T>, OperatingPoint<T>, Vec<T>);

#[allow(clippy::too_many_arguments)]
fn iterate<T: Real>(
    netlist: &Netlist<T>,
    layout: &Arc<MnaLayout>,
    mut point: OperatingPoint<T>,
    mut x_prev: Option<Vec<T>>,
    time: T,
    analysis: &Analysis<'_, T>,
    options: &SolveOptions<T>,
    gmin: T,
) -> Result<NewtonPass<T>, SolveError<T>> {
    let nonlinear = !point.junctions.is_empty();
    let mut best: Option<SolveResult<T>> = None;

    for iteration in 1..=options.max_iterations {
        let system = stamp_gmin(netlist, layout, &point, time, analysis, gmin);
        let x = system.solve()?;

        let mut limited = false;
        let raw = OperatingPoint::from_solution(netlist, layout, &x);
        for (id, target) in raw.junctions {
            let current = point.junctions.get_mut(&id).expect("junction tracked");
            for (cur, want) in current.iter_mut().zip(target) {
                let delta = want - *cur;
                if delta.abs() > options.junction_step_limit {
                    limited = true;
                    *cur += options.junction_step_limit.copysign(delta);
                } else {
                    *cur = want;
                }
            }
        }

        let dv = x_prev.as_ref().map_or(T::infinity(), |prev| {
            layout
                .unknowns()
                .iter()
                .enumerate()
                .filter(|(_, u)| matches!(u, Unknown::NodeVoltage(_)))
                .fold(T::zero(), |acc, (i, _)| acc.max((x[i] - prev[i]).abs()))
        });
        let eval = mna::evaluate(netlist, layout, &x, analysis);
        let result = SolveResult {
            time,
            node_voltages: eval.node_voltages,
            branch_currents: eval.branch_currents,
            terminal_currents: eval.terminal_currents,
            converged: false,
            newton_iterations: iteration,
            kcl_residual: eval.kcl_residual,
            gmin,
        };
        let residual_ok = result.kcl_residual < options.current_tolerance;
        if residual_ok && !limited && (!nonlinear || dv < options.voltage_tolerance) {
            return Ok((SolveResult { converged: true, ..result }, point, x));
        }
        let improves =
            best.as_ref().is_none_or(|b| result.kcl_residual.partial_cmp(&b.kcl_residual).is_none_or(|o| o.is_lt()));
        if improves {
            best = Some(result);
        }
        x_prev = Some(x);
    }
    Err(SolveError::NoConvergence { best: Box::new(best.expect("at least one iteration")) })
}
