use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mna::{Analysis, MnaLayout, OperatingPoint};
use super::{newton, SolveError, SolveOptions, SolveResult};
use crate::circuit::{ComponentId, ComponentKind, Netlist};
use crate::Real;

/// Fixed-step backward-Euler run from t = 0 to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientConfig<T> {
    pub dt: T,
    pub t_end: T,
}

impl<T: Real> TransientConfig<T> {
    pub fn new(dt: T, t_end: T) -> Result<Self, SolveError<T>> {
        let config = Self { dt, t_end };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SolveError<T>> {
        if !self.dt.is_finite() || self.dt <= T::zero() {
            return Err(SolveError::InvalidConfig("dt must be > 0".into()));
        }
        if !self.t_end.is_finite() || self.t_end < T::zero() {
            return Err(SolveError::InvalidConfig("t_end must be >= 0".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`; a final partial step counts
    /// as a full one.
    pub fn steps(&self) -> u64 {
        let ratio = (self.t_end / self.dt).to_f64_lossy();
        (ratio - 1e-9 * ratio.max(1.0)).ceil().max(0.0) as u64
    }
}

/// A run that stopped early. `completed` holds every step solved before `cause`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("transient aborted after {} steps: {cause}", completed.len())]
pub struct TransientFailure<T> {
    pub completed: Vec<SolveResult<T>>,
    pub cause: SolveError<T>,
}

/// Advances a circuit one backward-Euler step at a time.
///
/// Capacitor voltages are tracked by component id, so the netlist may be
/// swapped between steps (a student editing the board mid-run) and the
/// charge on surviving capacitors carries over.
#[derive(Debug, Clone)]
pub struct TransientStepper<T> {
    netlist: Netlist<T>,
    layout: Arc<MnaLayout>,
    options: SolveOptions<T>,
    dt: T,
    origin: T,
    steps_since_origin: u64,
    capacitor_voltages: BTreeMap<ComponentId, T>,
    warm_start: OperatingPoint<T>,
}

impl<T: Real> TransientStepper<T> {
    /// Starts at t = 0 with every capacitor discharged.
    pub fn new(netlist: Netlist<T>, dt: T, options: SolveOptions<T>) -> Result<Self, SolveError<T>> {
        TransientConfig::new(dt, T::zero())?;
        let layout = Arc::new(MnaLayout::new(&netlist, true, options.floating_nodes)?);
        let warm_start = OperatingPoint::zero(&netlist);
        let capacitor_voltages = discharged(&netlist);
        Ok(Self {
            netlist,
            layout,
            options,
            dt,
            origin: T::zero(),
            steps_since_origin: 0,
            capacitor_voltages,
            warm_start,
        })
    }

    pub fn time(&self) -> T {
        self.origin + T::from_u64(self.steps_since_origin).expect("step count fits") * self.dt
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn netlist(&self) -> &Netlist<T> {
        &self.netlist
    }

    pub fn capacitor_voltages(&self) -> &BTreeMap<ComponentId, T> {
        &self.capacitor_voltages
    }

    /// Changes the step size from the current time onward.
    pub fn set_dt(&mut self, dt: T) -> Result<(), SolveError<T>> {
        TransientConfig::new(dt, T::zero())?;
        self.origin = self.time();
        self.steps_since_origin = 0;
        self.dt = dt;
        Ok(())
    }

    /// Replaces the circuit, keeping time and the voltage of every capacitor
    /// that is still present.
    pub fn rebind(&mut self, netlist: Netlist<T>) -> Result<(), SolveError<T>> {
        let layout = Arc::new(MnaLayout::new(&netlist, true, self.options.floating_nodes)?);
        let mut voltages = discharged(&netlist);
        for (id, v) in voltages.iter_mut() {
            if let Some(old) = self.capacitor_voltages.get(id) {
                *v = *old;
            }
        }
        let mut warm = OperatingPoint::zero(&netlist);
        for (id, j) in warm.junctions.iter_mut() {
            if let Some(old) = self.warm_start.junctions.get(id) {
                *j = *old;
            }
        }
        self.netlist = netlist;
        self.layout = layout;
        self.capacitor_voltages = voltages;
        self.warm_start = warm;
        Ok(())
    }

    /// Back to t = 0 with discharged capacitors.
    pub fn reset(&mut self) {
        self.origin = T::zero();
        self.steps_since_origin = 0;
        self.capacitor_voltages = discharged(&self.netlist);
        self.warm_start = OperatingPoint::zero(&self.netlist);
    }

    /// Solves the next time point. On failure the stepper is left unchanged.
    pub fn step(&mut self) -> Result<SolveResult<T>, SolveError<T>> {
        let time = self.origin + T::from_u64(self.steps_since_origin + 1).expect("step count fits") * self.dt;
        let analysis = Analysis::BackwardEuler { dt: self.dt, capacitor_voltages: &self.capacitor_voltages };
        let (result, point) =
            newton(&self.netlist, &self.layout, self.warm_start.clone(), time, &analysis, &self.options)?;
        for branch in self.netlist.branches() {
            if branch.kind() == ComponentKind::Capacitor {
                let v = result.node_voltages[&branch.nodes[0]] - result.node_voltages[&branch.nodes[1]];
                self.capacitor_voltages.insert(branch.id().clone(), v);
            }
        }
        self.warm_start = point;
        self.steps_since_origin += 1;
        Ok(result)
    }
}

fn discharged<T: Real>(netlist: &Netlist<T>) -> BTreeMap<ComponentId, T> {
    netlist
        .branches()
        .iter()
        .filter(|b| b.kind() == ComponentKind::Capacitor)
        .map(|b| (b.id().clone(), T::zero()))
        .collect()
}

/// Backward-Euler transient from discharged capacitors at t = 0. Returns the
/// solution at every step t = dt, 2 dt, ..., up to `t_end`.
pub fn solve_transient<T: Real>(
    netlist: &Netlist<T>,
    config: &TransientConfig<T>,
) -> Result<Vec<SolveResult<T>>, TransientFailure<T>> {
    solve_transient_with(netlist, config, &SolveOptions::default())
}

pub fn solve_transient_with<T: Real>(
    netlist: &Netlist<T>,
    config: &TransientConfig<T>,
    options: &SolveOptions<T>,
) -> Result<Vec<SolveResult<T>>, TransientFailure<T>> {
    let fail = |completed, cause| TransientFailure { completed, cause };
    config.validate().map_err(|e| fail(Vec::new(), e))?;
    let mut stepper = TransientStepper::new(netlist.clone(), config.dt, *options).map_err(|e| fail(Vec::new(), e))?;
    let steps = config.steps();
    let mut results = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        match stepper.step() {
            Ok(r) => results.push(r),
            Err(e) => return Err(fail(results, e)),
        }
    }
    Ok(results)
}
