//! The live editing loop: commands in, state updates and frames out.
//!
//! A [`Session`] owns one board. Every command gets exactly one `Ack` or
//! `Error`; a failed command leaves the session exactly as it was. In
//! dc-live mode each edit is followed by a fresh operating point and a
//! frame. A transient run is advanced by [`Session::step`] so the owner can
//! interleave incoming commands (such as `Pause`) between solver steps.

mod cli;
mod protocol;
mod server;

use crate::breadboard::{extract_netlist, BreadboardError, BreadboardLayout, Hole};
use crate::circuit::{Component, ComponentId, ComponentParams};
use crate::netlist_io::{load_layout, save_layout, LayoutDocument, LayoutError};
use crate::solver::{
    solve_dc_with, FloatingNodes, SolveError, SolveOptions, SolveResult, TransientConfig, TransientStepper,
};
use crate::viz::{visual_frame, GridConfig};

pub use cli::{cli_run, Cli};
pub use protocol::{Command, Event, Mode, Request, StateSummary, PROTOCOL_VERSION};
pub use server::{listen_address, serve, serve_connection, DEFAULT_LISTEN};

pub const DEFAULT_FRAME_DECIMATION: usize = 50;

#[derive(Debug, Clone)]
struct TransientRun {
    steps_left: u64,
    steps_done: u64,
    decimation: u64,
}

/// One board and its simulation state.
#[derive(Debug, Clone)]
pub struct Session {
    layout: BreadboardLayout<f64>,
    last_result: Option<SolveResult<f64>>,
    clock: f64,
    mode: Mode,
    epoch: u64,
    last_id: Option<u64>,
    stepper: Option<TransientStepper<f64>>,
    run: Option<TransientRun>,
    grid: GridConfig<f64>,
    options: SolveOptions<f64>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

/// A command failure, as carried by `Event::Error`.
#[derive(Debug, Clone, PartialEq)]
struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<BreadboardError> for Failure {
    fn from(e: BreadboardError) -> Self {
        let code = match e {
            BreadboardError::HoleOccupied(_) => "HoleOccupied",
            BreadboardError::OffBoard(_) => "OffBoard",
            BreadboardError::TerminalArityMismatch { .. } => "TerminalArityMismatch",
            BreadboardError::UnknownComponent(_) => "UnknownComponent",
            BreadboardError::DuplicateComponentId(_) => "DuplicateComponentId",
            BreadboardError::UnknownParam { .. } => "UnknownParam",
            BreadboardError::InvalidParams { .. } => "InvalidParams",
        };
        Failure::new(code, e.to_string())
    }
}

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

impl From<SolveError<f64>> for Failure {
    fn from(e: SolveError<f64>) -> Self {
        let code = match e {
            SolveError::SingularSystem { .. } => "SingularSystem",
            SolveError::NoConvergence { .. } => "NoConvergence",
            SolveError::InvalidConfig(_) => "InvalidConfig",
        };
        Failure::new(code, e.to_string())
    }
}

impl Session {
    pub fn new() -> Self {
        Self {
            layout: BreadboardLayout::new(),
            last_result: None,
            clock: 0.0,
            mode: Mode::DcLive,
            epoch: 0,
            last_id: None,
            stepper: None,
            run: None,
            grid: GridConfig::default(),
            options: SolveOptions { floating_nodes: FloatingNodes::Gmin, ..SolveOptions::default() },
        }
    }

    /// Uses a different field-sampling grid for frames.
    pub fn with_grid(mut self, grid: GridConfig<f64>) -> Self {
        self.grid = grid;
        self
    }

    pub fn layout(&self) -> &BreadboardLayout<f64> {
        &self.layout
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn time(&self) -> f64 {
        self.clock
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn last_result(&self) -> Option<&SolveResult<f64>> {
        self.last_result.as_ref()
    }

    pub fn is_running(&self) -> bool {
        self.mode == Mode::TransientRunning
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            mode: self.mode,
            time: self.clock,
            epoch: self.epoch,
            placements: save_layout(&self.layout).placements,
            last_result: self.last_result.clone(),
        }
    }

    /// Handles one raw protocol line.
    pub fn handle_line(&mut self, line: &str) -> Vec<Event> {
        let value: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return vec![Event::error(None, "SyntaxError", e.to_string(), "request")],
        };
        let id = value.get("id").and_then(serde_json::Value::as_u64);
        let context = value.get("type").and_then(serde_json::Value::as_str).unwrap_or("request").to_string();
        match value.get("v").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(PROTOCOL_VERSION) => {}
            _ => {
                return vec![Event::error(
                    id,
                    "UnsupportedVersion",
                    format!("requests must carry \"v\": {PROTOCOL_VERSION}"),
                    &context,
                )]
            }
        }
        match serde_json::from_value::<Request>(value) {
            Ok(request) => self.apply(request),
            Err(e) => vec![Event::error(id, "SyntaxError", e.to_string(), &context)],
        }
    }

    /// Applies one command. The first returned event is its `Ack` or `Error`.
    pub fn apply(&mut self, request: Request) -> Vec<Event> {
        let id = request.id;
        let context = request.command.name();
        if let Some(last) = self.last_id {
            if id <= last {
                return vec![Event::error(
                    Some(id),
                    "NonMonotonicId",
                    format!("command id {id} is not greater than {last}"),
                    context,
                )];
            }
        }
        let snapshot = self.clone();
        match self.execute(id, request.command) {
            Ok(events) => {
                self.last_id = Some(id);
                events
            }
            Err(failure) => {
                *self = snapshot;
                vec![Event::error(Some(id), failure.code, failure.message, context)]
            }
        }
    }

    fn execute(&mut self, id: u64, command: Command) -> Result<Vec<Event>, Failure> {
        let ack = Event::Ack { id, doc: None };
        match command {
            Command::Place { kind, component_id, params, holes } => {
                let component_id = match component_id {
                    Some(cid) => ComponentId::new(cid),
                    None => self.layout.next_id(kind),
                };
                let mut values = ComponentParams::defaults(kind);
                for (key, value) in params {
                    values.set(&key, value).map_err(|e| Failure::new("UnknownParam", e.to_string()))?;
                }
                let component =
                    Component::new(component_id, values).map_err(|e| Failure::new("InvalidId", e.to_string()))?;
                let holes = holes.iter().map(|h| h.parse::<Hole>()).collect::<Result<Vec<_>, _>>()?;
                let layout = self.layout.place(component, holes)?;
                self.edit(ack, layout)
            }
            Command::Remove { component_id } => {
                let layout = self.layout.remove(&ComponentId::new(component_id))?;
                self.edit(ack, layout)
            }
            Command::SetParam { component_id, param, value } => {
                let layout = self.layout.set_param(&ComponentId::new(component_id), &param, value)?;
                self.edit(ack, layout)
            }
            Command::LoadLayout { doc } => {
                let text = doc.to_string();
                let layout = load_layout(&LayoutDocument::from_text(&text)?)?;
                self.edit(ack, layout)
            }
            Command::SaveLayout => Ok(vec![Event::Ack { id, doc: Some(save_layout(&self.layout)) }]),
            Command::RunTransient { dt, t_end, frame_decimation } => {
                self.start_transient(dt, t_end, frame_decimation.unwrap_or(DEFAULT_FRAME_DECIMATION))?;
                Ok(vec![ack, self.state_event()])
            }
            Command::Pause => {
                if self.mode == Mode::TransientRunning {
                    self.mode = Mode::Idle;
                    self.run = None;
                }
                Ok(vec![ack, self.state_event()])
            }
            Command::Reset => {
                self.epoch += 1;
                self.clock = 0.0;
                self.stepper = None;
                self.run = None;
                self.mode = Mode::DcLive;
                let mut events = vec![ack];
                events.extend(self.resolve()?);
                Ok(events)
            }
            Command::QueryState => Ok(vec![ack, self.state_event()]),
        }
    }

    fn state_event(&self) -> Event {
        Event::StateUpdated { state: self.summary() }
    }

    fn frame_event(&self, result: &SolveResult<f64>) -> Event {
        Event::Frame {
            epoch: self.epoch,
            node_voltages: result.node_voltages.clone(),
            frame: visual_frame(&self.layout, result, &self.grid),
        }
    }

    /// Installs an edited layout and refreshes whatever the mode calls for.
    fn edit(&mut self, ack: Event, layout: BreadboardLayout<f64>) -> Result<Vec<Event>, Failure> {
        self.layout = layout;
        if let Some(stepper) = self.stepper.as_mut() {
            stepper.rebind(extract_netlist(&self.layout))?;
        }
        let mut events = vec![ack];
        if self.mode == Mode::DcLive {
            events.extend(self.resolve()?);
        } else {
            events.push(self.state_event());
        }
        Ok(events)
    }

    /// Fresh DC operating point at the current clock.
    fn resolve(&mut self) -> Result<Vec<Event>, Failure> {
        let mut result = solve_dc_with(&extract_netlist(&self.layout), &self.options)?;
        result.time = self.clock;
        let frame = self.frame_event(&result);
        self.last_result = Some(result);
        Ok(vec![self.state_event(), frame])
    }

    fn start_transient(&mut self, dt: f64, t_end: f64, decimation: usize) -> Result<(), Failure> {
        if self.mode == Mode::TransientRunning {
            return Err(Failure::new("AlreadyRunning", "a transient run is already in progress"));
        }
        if decimation == 0 {
            return Err(Failure::new("InvalidConfig", "frame_decimation must be >= 1"));
        }
        TransientConfig::new(dt, t_end)?;
        match self.stepper.as_mut() {
            Some(stepper) => {
                if stepper.dt() != dt {
                    stepper.set_dt(dt)?;
                }
            }
            None => {
                self.stepper = Some(TransientStepper::new(extract_netlist(&self.layout), dt, self.options)?);
            }
        }
        let remaining = TransientConfig { dt, t_end: (t_end - self.clock).max(0.0) };
        self.run = Some(TransientRun { steps_left: remaining.steps(), steps_done: 0, decimation: decimation as u64 });
        self.mode = Mode::TransientRunning;
        Ok(())
    }

    /// Advances a running transient by one solver step. Emits a frame every
    /// `frame_decimation` steps, and a state update when the run ends.
    pub fn step(&mut self) -> Vec<Event> {
        if self.mode != Mode::TransientRunning {
            return Vec::new();
        }
        let (Some(stepper), Some(run)) = (self.stepper.as_mut(), self.run.as_mut()) else {
            return Vec::new();
        };
        if run.steps_left == 0 {
            self.mode = Mode::Idle;
            self.run = None;
            return vec![self.state_event()];
        }
        match stepper.step() {
            Ok(result) => {
                run.steps_left -= 1;
                run.steps_done += 1;
                let emit = run.steps_done % run.decimation == 0;
                let finished = run.steps_left == 0;
                self.clock = result.time;
                let mut events = Vec::new();
                if emit {
                    events.push(self.frame_event(&result));
                }
                self.last_result = Some(result);
                if finished {
                    self.mode = Mode::Idle;
                    self.run = None;
                    events.push(self.state_event());
                }
                events
            }
            Err(e) => {
                self.mode = Mode::Idle;
                self.run = None;
                let failure = Failure::from(e);
                vec![Event::error(None, failure.code, failure.message, "RunTransient"), self.state_event()]
            }
        }
    }

    /// Steps until the current run finishes, collecting every event.
    pub fn run_to_completion(&mut self) -> Vec<Event> {
        let mut events = Vec::new();
        while self.is_running() {
            events.extend(self.step());
        }
        events
    }
}
