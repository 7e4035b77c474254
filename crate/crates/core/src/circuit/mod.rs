//! Toolbox components and the electrical netlist graph.

mod netlist;
mod params;
mod topology;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use netlist::{build_netlist, Branch, Netlist};
pub use params::{toolbox_catalog, validate_params, ComponentParams, ParamSpec, ParamViolation};
pub use topology::{Energization, Subcircuit};

/// Junction thermal voltage at 300 K, in volts.
pub const THERMAL_VOLTAGE: f64 = 0.02585;

/// Everything a student can pull out of the toolbox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    Resistor,
    Capacitor,
    Diode,
    #[serde(rename = "LED")]
    Led,
    #[serde(rename = "TransistorNPN")]
    TransistorNpn,
    #[serde(rename = "BatteryDC")]
    BatteryDc,
    #[serde(rename = "SourceAC")]
    SourceAc,
    Wire,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 8] = [
        ComponentKind::Resistor,
        ComponentKind::Capacitor,
        ComponentKind::Diode,
        ComponentKind::Led,
        ComponentKind::TransistorNpn,
        ComponentKind::BatteryDc,
        ComponentKind::SourceAc,
        ComponentKind::Wire,
    ];

    /// Id prefix used by text netlists and auto-generated ids.
    pub fn mnemonic(self) -> &'static str {
        match self {
            ComponentKind::Resistor => "R",
            ComponentKind::Capacitor => "C",
            ComponentKind::Diode => "D",
            ComponentKind::Led => "L",
            ComponentKind::TransistorNpn => "Q",
            ComponentKind::BatteryDc => "V",
            ComponentKind::SourceAc => "VAC",
            ComponentKind::Wire => "W",
        }
    }

    /// Terminal labels in order. Two-terminal parts list their "from" side first.
    pub fn terminals(self) -> &'static [&'static str] {
        match self {
            ComponentKind::Resistor | ComponentKind::Capacitor | ComponentKind::Wire => &["a", "b"],
            ComponentKind::Diode | ComponentKind::Led => &["anode", "cathode"],
            ComponentKind::TransistorNpn => &["collector", "base", "emitter"],
            ComponentKind::BatteryDc | ComponentKind::SourceAc => &["positive", "negative"],
        }
    }

    pub fn is_source(self) -> bool {
        matches!(self, ComponentKind::BatteryDc | ComponentKind::SourceAc)
    }

    /// Infers the kind from an id's mnemonic prefix (case-insensitive).
    pub fn from_id(id: &str) -> Option<ComponentKind> {
        let upper = id.to_ascii_uppercase();
        if upper.starts_with("VAC") {
            return Some(ComponentKind::SourceAc);
        }
        match upper.chars().next()? {
            'R' => Some(ComponentKind::Resistor),
            'C' => Some(ComponentKind::Capacitor),
            'D' => Some(ComponentKind::Diode),
            'L' => Some(ComponentKind::Led),
            'Q' => Some(ComponentKind::TransistorNpn),
            'V' => Some(ComponentKind::BatteryDc),
            'W' => Some(ComponentKind::Wire),
            _ => None,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ComponentKind::Resistor => "Resistor",
            ComponentKind::Capacitor => "Capacitor",
            ComponentKind::Diode => "Diode",
            ComponentKind::Led => "LED",
            ComponentKind::TransistorNpn => "TransistorNPN",
            ComponentKind::BatteryDc => "BatteryDC",
            ComponentKind::SourceAc => "SourceAC",
            ComponentKind::Wire => "Wire",
        };
        f.write_str(name)
    }
}

/// Component identifier. Case-insensitive; stored upper-case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(String);

impl ComponentId {
    pub fn new(id: impl AsRef<str>) -> Self {
        Self(id.as_ref().to_ascii_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ComponentId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// Electrical node name. Case-insensitive; stored lower-case. `"0"` is ground
/// whenever it is present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub const GROUND_NAME: &'static str = "0";

    pub fn new(name: impl AsRef<str>) -> Self {
        Self(name.as_ref().to_ascii_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// A toolbox element with its parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Component<T> {
    id: ComponentId,
    params: ComponentParams<T>,
}

impl<T> Component<T> {
    /// The id must start with the kind's mnemonic and contain only
    /// ASCII letters, digits and `_`.
    pub fn new(id: impl Into<ComponentId>, params: ComponentParams<T>) -> Result<Self, CircuitError> {
        let id = id.into();
        let kind = params.kind();
        if id.as_str().is_empty() || !id.as_str().chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(CircuitError::InvalidId { id, reason: "ids use letters, digits and '_' only".into() });
        }
        if ComponentKind::from_id(id.as_str()) != Some(kind) {
            return Err(CircuitError::InvalidId {
                reason: format!("a {kind} id must start with '{}'", kind.mnemonic()),
                id,
            });
        }
        Ok(Self { id, params })
    }

    pub fn id(&self) -> &ComponentId {
        &self.id
    }

    pub fn kind(&self) -> ComponentKind {
        self.params.kind()
    }

    pub fn params(&self) -> &ComponentParams<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ComponentParams<T> {
        &mut self.params
    }

    pub fn terminals(&self) -> &'static [&'static str] {
        self.kind().terminals()
    }
}

impl<T: crate::Real> Component<T> {
    pub fn with_defaults(id: impl Into<ComponentId>, kind: ComponentKind) -> Result<Self, CircuitError> {
        Self::new(id, ComponentParams::defaults(kind))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("duplicate component id {0}")]
    DuplicateComponentId(ComponentId),
    #[error("terminal '{terminal}' of {component} is not connected to a node")]
    DanglingTerminal { component: ComponentId, terminal: &'static str },
    #[error("{component} has {expected} terminals but {found} nodes were given")]
    TerminalCountMismatch { component: ComponentId, expected: usize, found: usize },
    #[error("invalid component id '{id}': {reason}")]
    InvalidId { id: ComponentId, reason: String },
    #[error("{kind} has no parameter '{param}'")]
    UnknownParam { kind: ComponentKind, param: String },
}
