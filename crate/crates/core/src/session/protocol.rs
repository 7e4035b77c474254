//! Wire messages: one JSON object per line, each carrying `"v": 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{ComponentKind, NodeId};
use crate::netlist_io::{LayoutDocument, PlacementRecord};
use crate::solver::SolveResult;
use crate::viz::VisualFrame;

pub const PROTOCOL_VERSION: u32 = 1;

/// Something a client asks the session to do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Command {
    /// Seats a component. Omitted parameters take toolbox defaults; an
    /// omitted id is generated from the kind's mnemonic.
    Place {
        kind: ComponentKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        component_id: Option<String>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, f64>,
        holes: Vec<String>,
    },
    Remove {
        component_id: String,
    },
    SetParam {
        component_id: String,
        param: String,
        value: f64,
    },
    LoadLayout {
        doc: serde_json::Value,
    },
    SaveLayout,
    /// Runs from the current simulation time up to `t_end`.
    RunTransient {
        dt: f64,
        t_end: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame_decimation: Option<usize>,
    },
    Pause,
    Reset,
    QueryState,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Place { .. } => "Place",
            Command::Remove { .. } => "Remove",
            Command::SetParam { .. } => "SetParam",
            Command::LoadLayout { .. } => "LoadLayout",
            Command::SaveLayout => "SaveLayout",
            Command::RunTransient { .. } => "RunTransient",
            Command::Pause => "Pause",
            Command::Reset => "Reset",
            Command::QueryState => "QueryState",
        }
    }
}

/// A command with its client-assigned id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub v: u32,
    pub id: u64,
    #[serde(flatten)]
    pub command: Command,
}

impl Request {
    pub fn new(id: u64, command: Command) -> Self {
        Self { v: PROTOCOL_VERSION, id, command }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("requests are plain data")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Idle,
    DcLive,
    TransientRunning,
}

/// Snapshot of the session carried by `StateUpdated`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub mode: Mode,
    /// Simulation clock, in seconds.
    pub time: f64,
    /// Incremented by every `Reset`; frame times never decrease within one epoch.
    pub epoch: u64,
    pub placements: Vec<PlacementRecord>,
    pub last_result: Option<SolveResult<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum Event {
    Ack {
        id: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        doc: Option<LayoutDocument>,
    },
    /// `id` is absent when the error ends a transient stream rather than
    /// answering a command.
    Error {
        #[serde(skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        code: String,
        message: String,
        context: String,
    },
    StateUpdated {
        state: StateSummary,
    },
    Frame {
        epoch: u64,
        node_voltages: BTreeMap<NodeId, f64>,
        frame: VisualFrame<f64>,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    v: u32,
    #[serde(flatten)]
    event: &'a Event,
}

impl Event {
    pub fn to_line(&self) -> String {
        serde_json::to_string(&Envelope { v: PROTOCOL_VERSION, event: self }).expect("events are plain data")
    }

    pub fn error(id: Option<u64>, code: &str, message: impl Into<String>, context: &str) -> Self {
        Event::Error { id, code: code.to_string(), message: message.into(), context: context.to_string() }
    }

    pub fn is_response(&self) -> bool {
        matches!(self, Event::Ack { .. } | Event::Error { id: Some(_), .. })
    }
}
