//! Turns an electrical solution into what the student sees: moving
//! electrons, a magnetic-field map and glowing LEDs.

mod field;
mod flow;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::breadboard::{
    board_extent, connectivity, hole_position, wire_currents, BreadboardLayout, ConnectivityReport,
};
use crate::circuit::{ComponentId, ComponentKind};
use crate::solver::SolveResult;
use crate::Real;

pub use field::{field_at, FieldSample, Vec3, WireSegment, EXCLUSION_RADIUS, MU_0};
pub use flow::{
    describe_flow, flow_descriptors, flow_speed, led_brightness, ElectronDirection, FlowDescriptor, ACTIVE_CURRENT,
    FLOW_REFERENCE_CURRENT, FLOW_SATURATION_CURRENT,
};

/// Rectangular sampling grid parallel to the board.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig<T> {
    pub columns: usize,
    pub rows: usize,
    /// Height above the board plane, in metres.
    pub height: T,
    pub min: [T; 2],
    pub max: [T; 2],
}

impl<T: Real> Default for GridConfig<T> {
    /// 60 × 20 points spanning the hole grid, 5 mm above it.
    fn default() -> Self {
        let (min, max) = board_extent();
        Self { columns: 60, rows: 20, height: T::lit(5e-3), min, max }
    }
}

impl<T: Real> GridConfig<T> {
    pub fn points(&self) -> Vec<Vec3<T>> {
        let step = |lo: T, hi: T, n: usize, i: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * T::lit(i as f64) / T::lit((n - 1) as f64)
            }
        };
        (0..self.rows)
            .flat_map(|j| {
                (0..self.columns).map(move |i| {
                    [
                        step(self.min[0], self.max[0], self.columns, i),
                        step(self.min[1], self.max[1], self.rows, j),
                        self.height,
                    ]
                })
            })
            .collect()
    }
}

/// Segments for every placement whose current counts as flowing.
///
/// Two-terminal parts and wires run hole to hole. A transistor contributes
/// its collector-emitter path with the collector current and its
/// base-emitter path with the base current.
pub fn wire_segments<T: Real>(
    layout: &BreadboardLayout<T>,
    result: &SolveResult<T>,
    report: &ConnectivityReport,
) -> Vec<WireSegment<T>> {
    let wires = wire_currents(layout, result);
    let flowing = |id: &ComponentId, i: T| report.is_energized(id) && i.abs() > T::lit(ACTIVE_CURRENT);
    let mut segments = Vec::new();
    for p in layout.placements() {
        let id = p.component.id();
        let pos: Vec<Vec3<T>> = p.holes.iter().map(|h| hole_position(*h)).collect();
        match p.component.kind() {
            ComponentKind::Wire => {
                let i = wires.get(id).copied().unwrap_or_else(T::zero);
                if flowing(id, i) {
                    segments.push(WireSegment::new(pos[0], pos[1], i));
                }
            }
            ComponentKind::TransistorNpn => {
                let Some(currents) = result.terminal_currents.get(id) else { continue };
                let (ic, ib) = (currents[0], currents[1]);
                if flowing(id, ic) {
                    segments.push(WireSegment::new(pos[0], pos[2], ic));
                }
                if flowing(id, ib) {
                    segments.push(WireSegment::new(pos[1], pos[2], ib));
                }
            }
            _ => {
                let i = result.current(id).unwrap_or_else(T::zero);
                if flowing(id, i) {
                    segments.push(WireSegment::new(pos[0], pos[1], i));
                }
            }
        }
    }
    segments
}

/// Field samples over `grid` for the board in `layout` carrying `result`.
pub fn field_grid<T: Real>(
    layout: &BreadboardLayout<T>,
    result: &SolveResult<T>,
    grid: &GridConfig<T>,
) -> Vec<FieldSample<T>> {
    let segments = wire_segments(layout, result, &connectivity(layout));
    grid.points().into_iter().map(|p| field_at(p, &segments)).collect()
}

/// Everything needed to draw one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisualFrame<T> {
    pub time: T,
    /// One per non-wire component, ordered by id.
    pub flows: Vec<FlowDescriptor<T>>,
    /// One per wire, ordered by id.
    pub wire_flows: Vec<FlowDescriptor<T>>,
    pub field: Vec<FieldSample<T>>,
    pub led_brightness: BTreeMap<ComponentId, T>,
}

pub fn visual_frame<T: Real>(
    layout: &BreadboardLayout<T>,
    result: &SolveResult<T>,
    grid: &GridConfig<T>,
) -> VisualFrame<T> {
    let report = connectivity(layout);
    let segments = wire_segments(layout, result, &report);
    let wire_flows = wire_currents(layout, result)
        .into_iter()
        .map(|(id, i)| {
            let energized = report.is_energized(&id);
            describe_flow(&id, ComponentKind::Wire, i, energized)
        })
        .collect();
    VisualFrame {
        time: result.time,
        flows: flow_descriptors(result, &report),
        wire_flows,
        field: grid.points().into_iter().map(|p| field_at(p, &segments)).collect(),
        led_brightness: led_brightness(result, layout.placements().iter().map(|p| &p.component)),
    }
}
