//! Electron-flow descriptors and LED brightness.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::breadboard::ConnectivityReport;
use crate::circuit::{Component, ComponentId, ComponentKind, ComponentParams};
use crate::solver::SolveResult;
use crate::Real;

/// Currents at or below this are drawn as still, in amperes.
pub const ACTIVE_CURRENT: f64 = 1e-9;
/// Reference current of the speed map, in amperes.
pub const FLOW_REFERENCE_CURRENT: f64 = 1e-3;
/// Current at which the speed map saturates, in amperes.
pub const FLOW_SATURATION_CURRENT: f64 = 1.0;

/// Which way electrons move through a component, as terminal labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ElectronDirection {
    Stationary,
    Terminals { from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDescriptor<T> {
    pub component: ComponentId,
    /// Conventional current through the component, in amperes.
    pub current: T,
    pub electron_direction: ElectronDirection,
    /// Animation speed in `0..=1`.
    pub speed: T,
    pub active: bool,
}

/// `ln(1 + |I|/I0) / ln(1 + Imax/I0)`, clamped to `0..=1`.
pub fn flow_speed<T: Real>(current: T) -> T {
    let i0 = T::lit(FLOW_REFERENCE_CURRENT);
    let full = (T::one() + T::lit(FLOW_SATURATION_CURRENT) / i0).ln();
    ((current.abs() / i0).ln_1p() / full).min(T::one())
}

fn electron_direction<T: Real>(kind: ComponentKind, current: T) -> ElectronDirection {
    let terminals = kind.terminals();
    // Conventional current runs first terminal to last (collector to
    // emitter for a transistor); electrons go the other way.
    let (first, last) = (terminals[0], terminals[terminals.len() - 1]);
    if current > T::zero() {
        ElectronDirection::Terminals { from: last.into(), to: first.into() }
    } else if current < T::zero() {
        ElectronDirection::Terminals { from: first.into(), to: last.into() }
    } else {
        ElectronDirection::Stationary
    }
}

/// Descriptor for one component carrying `current`.
pub fn describe_flow<T: Real>(id: &ComponentId, kind: ComponentKind, current: T, energized: bool) -> FlowDescriptor<T> {
    FlowDescriptor {
        component: id.clone(),
        current,
        electron_direction: electron_direction(kind, current),
        speed: flow_speed(current),
        active: energized && current.abs() > T::lit(ACTIVE_CURRENT),
    }
}

/// One descriptor per non-wire component on the board, ordered by id.
pub fn flow_descriptors<T: Real>(result: &SolveResult<T>, report: &ConnectivityReport) -> Vec<FlowDescriptor<T>> {
    report
        .component_nodes()
        .keys()
        .filter_map(|id| {
            let kind = ComponentKind::from_id(id.as_str())?;
            if kind == ComponentKind::Wire {
                return None;
            }
            let current = result.current(id).unwrap_or_else(T::zero);
            Some(describe_flow(id, kind, current, report.is_energized(id)))
        })
        .collect()
}

/// `clamp(I_forward / I_nominal, 0, 1)` for every LED among `components`.
pub fn led_brightness<'a, T: Real>(
    result: &SolveResult<T>,
    components: impl IntoIterator<Item = &'a Component<T>>,
) -> BTreeMap<ComponentId, T> {
    components
        .into_iter()
        .filter_map(|c| match c.params() {
            ComponentParams::Led { nominal_current, .. } => {
                let forward = result.current(c.id()).unwrap_or_else(T::zero);
                Some((c.id().clone(), (forward / *nominal_current).max(T::zero()).min(T::one())))
            }
            _ => None,
        })
        .collect()
}
