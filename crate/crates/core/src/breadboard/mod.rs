//! The virtual breadboard: holes, placements, strip connectivity and
//! extraction of a solvable netlist.
//!
//! Geometry is a standard half-size board: 30 columns, two banks of five-hole
//! terminal strips per column (rows a-e and f-j) and four full-length power
//! rails. Hole pitch is 2.54 mm.

mod connectivity;
mod geometry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{validate_params, Component, ComponentId, ParamViolation};
use crate::Real;

pub use connectivity::{connectivity, extract_netlist, wire_currents, ConnectivityReport, STRIP_COUNT};
pub use geometry::{board_extent, hole_position, HOLE_PITCH};

pub const COLUMNS: u8 = 30;

/// Board rows, top to bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Row {
    TopPlus,
    TopMinus,
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    BottomPlus,
    BottomMinus,
}

impl Row {
    pub const ALL: [Row; 14] = [
        Row::TopPlus,
        Row::TopMinus,
        Row::A,
        Row::B,
        Row::C,
        Row::D,
        Row::E,
        Row::F,
        Row::G,
        Row::H,
        Row::I,
        Row::J,
        Row::BottomPlus,
        Row::BottomMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Row::TopPlus => "rail+",
            Row::TopMinus => "rail-",
            Row::A => "a",
            Row::B => "b",
            Row::C => "c",
            Row::D => "d",
            Row::E => "e",
            Row::F => "f",
            Row::G => "g",
            Row::H => "h",
            Row::I => "i",
            Row::J => "j",
            Row::BottomPlus => "RAIL+",
            Row::BottomMinus => "RAIL-",
        }
    }

    pub fn is_rail(self) -> bool {
        matches!(self, Row::TopPlus | Row::TopMinus | Row::BottomPlus | Row::BottomMinus)
    }
}

/// One hole. Columns run 1..=30.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Hole {
    pub column: u8,
    pub row: Row,
}

impl Hole {
    pub fn new(row: Row, column: u8) -> Result<Self, BreadboardError> {
        let hole = Self { column, row };
        if hole.is_on_board() {
            Ok(hole)
        } else {
            Err(BreadboardError::OffBoard(hole.to_string()))
        }
    }

    pub fn is_on_board(&self) -> bool {
        (1..=COLUMNS).contains(&self.column)
    }

    /// Every hole of the board.
    pub fn all() -> impl Iterator<Item = Hole> {
        Row::ALL.into_iter().flat_map(|row| (1..=COLUMNS).map(move |column| Hole { column, row }))
    }
}

impl fmt::Display for Hole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row.label(), self.column)
    }
}

impl FromStr for Hole {
    type Err = BreadboardError;

    /// Parses `a1`, `j30`, `rail+5`, `RAIL-12` and the like.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BreadboardError::OffBoard(s.to_string());
        let row = [Row::TopPlus, Row::TopMinus, Row::BottomPlus, Row::BottomMinus]
            .into_iter()
            .find(|r| s.starts_with(r.label()))
            .or_else(|| {
                let first = s.chars().next()?.to_ascii_lowercase();
                Row::ALL.into_iter().find(|r| !r.is_rail() && r.label().starts_with(first))
            })
            .ok_or_else(bad)?;
        let digits = &s[row.label().len()..];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 3 {
            return Err(bad());
        }
        let column: u16 = digits.parse().map_err(|_| bad())?;
        Hole::new(row, u8::try_from(column).map_err(|_| bad())?).map_err(|_| bad())
    }
}

impl TryFrom<String> for Hole {
    type Error = BreadboardError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Hole> for String {
    fn from(h: Hole) -> String {
        h.to_string()
    }
}

/// A component seated on the board, one hole per terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement<T> {
    pub component: Component<T>,
    pub holes: Vec<Hole>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BreadboardLayout<T> {
    placements: Vec<Placement<T>>,
}

impl<T: Real> BreadboardLayout<T> {
    pub fn new() -> Self {
        Self { placements: Vec::new() }
    }

    pub fn placements(&self) -> &[Placement<T>] {
        &self.placements
    }

    pub fn placement(&self, id: &ComponentId) -> Option<&Placement<T>> {
        self.placements.iter().find(|p| p.component.id() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn is_occupied(&self, hole: Hole) -> bool {
        self.placements.iter().any(|p| p.holes.contains(&hole))
    }

    /// Returns a new layout with `component` seated in `holes`.
    pub fn place(&self, component: Component<T>, holes: Vec<Hole>) -> Result<Self, BreadboardError> {
        let expected = component.terminals().len();
        if holes.len() != expected {
            return Err(BreadboardError::TerminalArityMismatch {
                component: component.id().clone(),
                expected,
                found: holes.len(),
            });
        }
        if let Some(off) = holes.iter().find(|h| !h.is_on_board()) {
            return Err(BreadboardError::OffBoard(off.to_string()));
        }
        for (i, hole) in holes.iter().enumerate() {
            if holes[..i].contains(hole) || self.is_occupied(*hole) {
                return Err(BreadboardError::HoleOccupied(*hole));
            }
        }
        if self.placement(component.id()).is_some() {
            return Err(BreadboardError::DuplicateComponentId(component.id().clone()));
        }
        validate_params(component.kind(), component.params())
            .map_err(|violations| BreadboardError::InvalidParams { component: component.id().clone(), violations })?;
        let mut placements = self.placements.clone();
        placements.push(Placement { component, holes });
        Ok(Self { placements })
    }

    /// Returns a new layout without the component.
    pub fn remove(&self, id: &ComponentId) -> Result<Self, BreadboardError> {
        let index = self
            .placements
            .iter()
            .position(|p| p.component.id() == id)
            .ok_or_else(|| BreadboardError::UnknownComponent(id.clone()))?;
        let mut placements = self.placements.clone();
        placements.remove(index);
        Ok(Self { placements })
    }

    /// Returns a new layout with one parameter of a placed component changed.
    pub fn set_param(&self, id: &ComponentId, key: &str, value: T) -> Result<Self, BreadboardError> {
        let index = self
            .placements
            .iter()
            .position(|p| p.component.id() == id)
            .ok_or_else(|| BreadboardError::UnknownComponent(id.clone()))?;
        let mut placements = self.placements.clone();
        let component = &mut placements[index].component;
        component
            .params_mut()
            .set(key, value)
            .map_err(|_| BreadboardError::UnknownParam { component: id.clone(), param: key.to_string() })?;
        validate_params(component.kind(), component.params())
            .map_err(|violations| BreadboardError::InvalidParams { component: id.clone(), violations })?;
        Ok(Self { placements })
    }

    /// Next free id of the form `<mnemonic><n>` for `kind`.
    pub fn next_id(&self, kind: crate::circuit::ComponentKind) -> ComponentId {
        (1..)
            .map(|n| ComponentId::new(format!("{}{n}", kind.mnemonic())))
            .find(|id| self.placement(id).is_none())
            .expect("unbounded id space")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BreadboardError {
    #[error("hole {0} is already occupied")]
    HoleOccupied(Hole),
    #[error("hole {0} is not on the board")]
    OffBoard(String),
    #[error("{component} has {expected} terminals but {found} holes were given")]
    TerminalArityMismatch { component: ComponentId, expected: usize, found: usize },
    #[error("no component {0} on the board")]
    UnknownComponent(ComponentId),
    #[error("component id {0} is already on the board")]
    DuplicateComponentId(ComponentId),
    #[error("{component} has no parameter '{param}'")]
    UnknownParam { component: ComponentId, param: String },
    #[error("invalid parameters for {component}: {}", violations.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join(", "))]
    InvalidParams { component: ComponentId, violations: Vec<ParamViolation> },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ComponentKind;

    fn hole(s: &str) -> Hole {
        s.parse().unwrap()
    }

    fn part(id: &str, kind: ComponentKind) -> Component<f64> {
        Component::with_defaults(id, kind).unwrap()
    }

    #[test]
    fn hole_labels_round_trip() {
        for h in Hole::all() {
            assert_eq!(h.to_string().parse::<Hole>().unwrap(), h);
        }
        assert_eq!(Hole::all().count(), 14 * 30);
        assert_eq!(hole("A3"), Hole { row: Row::A, column: 3 });
        assert_eq!(hole("RAIL-30"), Hole { row: Row::BottomMinus, column: 30 });
    }

    #[test]
    fn bad_holes_rejected() {
        for s in ["a0", "a31", "k1", "rail+", "", "a1x", "rail*3", "a-1", "a0001"] {
            assert!(s.parse::<Hole>().is_err(), "{s}");
        }
    }

    #[test]
    fn place_battery_on_empty_board() {
        let layout =
            BreadboardLayout::new().place(part("V1", ComponentKind::BatteryDc), vec![hole("a1"), hole("a5")]).unwrap();
        assert_eq!(layout.placements().len(), 1);
    }

    #[test]
    fn occupied_hole_rejected() {
        let layout =
            BreadboardLayout::new().place(part("V1", ComponentKind::BatteryDc), vec![hole("a1"), hole("a5")]).unwrap();
        let err = layout.place(part("R1", ComponentKind::Resistor), vec![hole("a1"), hole("b9")]).unwrap_err();
        assert_eq!(err, BreadboardError::HoleOccupied(hole("a1")));
        let err = layout.place(part("R1", ComponentKind::Resistor), vec![hole("c2"), hole("c2")]).unwrap_err();
        assert_eq!(err, BreadboardError::HoleOccupied(hole("c2")));
    }

    #[test]
    fn arity_checked() {
        let err = BreadboardLayout::new()
            .place(part("R1", ComponentKind::Resistor), vec![hole("a1"), hole("a2"), hole("a3")])
            .unwrap_err();
        assert!(matches!(err, BreadboardError::TerminalArityMismatch { expected: 2, found: 3, .. }));
    }

    #[test]
    fn off_board_rejected() {
        let err = BreadboardLayout::new()
            .place(part("R1", ComponentKind::Resistor), vec![hole("a1"), Hole { row: Row::A, column: 31 }])
            .unwrap_err();
        assert!(matches!(err, BreadboardError::OffBoard(_)));
    }

    #[test]
    fn invalid_params_rejected() {
        let r = Component::new("R1", crate::circuit::ComponentParams::Resistor { resistance: -1.0 }).unwrap();
        let err = BreadboardLayout::new().place(r, vec![hole("a1"), hole("a2")]).unwrap_err();
        assert!(matches!(err, BreadboardError::InvalidParams { .. }));
    }

    #[test]
    fn remove_placements() {
        let empty = BreadboardLayout::<f64>::new();
        let one = empty.place(part("R1", ComponentKind::Resistor), vec![hole("a1"), hole("a2")]).unwrap();
        assert_eq!(one.remove(&"R1".into()).unwrap(), empty);
        assert_eq!(one.remove(&"R9".into()).unwrap_err(), BreadboardError::UnknownComponent("R9".into()));
    }

    #[test]
    fn set_param_validates() {
        let one =
            BreadboardLayout::new().place(part("R1", ComponentKind::Resistor), vec![hole("a1"), hole("a2")]).unwrap();
        let changed = one.set_param(&"R1".into(), "r", 220.0).unwrap();
        assert_eq!(changed.placements()[0].component.params().get("r"), Some(220.0));
        assert!(matches!(one.set_param(&"R1".into(), "r", 0.0), Err(BreadboardError::InvalidParams { .. })));
        assert!(matches!(one.set_param(&"R1".into(), "c", 1.0), Err(BreadboardError::UnknownParam { .. })));
    }

    #[test]
    fn next_id_skips_used() {
        let one =
            BreadboardLayout::new().place(part("R1", ComponentKind::Resistor), vec![hole("a1"), hole("a2")]).unwrap();
        assert_eq!(one.next_id(ComponentKind::Resistor).as_str(), "R2");
        assert_eq!(one.next_id(ComponentKind::SourceAc).as_str(), "VAC1");
    }
}
