use serde::{Deserialize, Serialize};

use super::mna::source_voltage;
use super::SolveResult;
use crate::circuit::{ComponentParams, Netlist};
use crate::Real;

/// Power bookkeeping for one solution, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBalance<T> {
    /// Delivered by the EMFs of batteries and AC sources.
    pub supplied: T,
    /// Resistors, internal resistances, junctions and the Gmin leakage.
    pub dissipated: T,
    /// Flowing into capacitors (zero at a DC operating point).
    pub stored: T,
}

impl<T: Real> PowerBalance<T> {
    /// |supplied - dissipated - stored| relative to the supplied power.
    pub fn relative_mismatch(&self) -> T {
        let scale = self.supplied.abs().max(T::min_positive_value());
        (self.supplied - self.dissipated - self.stored).abs() / scale
    }
}

pub fn power_balance<T: Real>(netlist: &Netlist<T>, result: &SolveResult<T>) -> PowerBalance<T> {
    let mut supplied = T::zero();
    let mut dissipated = T::zero();
    let mut stored = T::zero();
    for branch in netlist.branches() {
        let id = branch.id();
        let v = |i: usize| result.node_voltages[&branch.nodes[i]];
        let i = result.branch_currents[id];
        match *branch.component.params() {
            ComponentParams::BatteryDc { internal_resistance, .. } => {
                supplied -= source_voltage(branch.component.params(), result.time) * i;
                dissipated += i * i * internal_resistance;
            }
            ComponentParams::SourceAc { .. } => {
                supplied -= source_voltage(branch.component.params(), result.time) * i;
            }
            ComponentParams::Capacitor { .. } => stored += (v(0) - v(1)) * i,
            ComponentParams::Resistor { .. } | ComponentParams::Diode { .. } | ComponentParams::Led { .. } => {
                dissipated += (v(0) - v(1)) * i;
            }
            ComponentParams::TransistorNpn { .. } => {
                let into = &result.terminal_currents[id];
                dissipated += (0..3).map(|k| v(k) * into[k]).sum::<T>();
            }
            ComponentParams::Wire => {}
        }
    }
    dissipated += result.node_voltages.values().map(|v| result.gmin * *v * *v).sum::<T>();
    PowerBalance { supplied, dissipated, stored }
}
