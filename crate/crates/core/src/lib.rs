//! Breadboard circuit simulation engine.
//!
//! Components from a small toolbox are seated on a virtual breadboard; the
//! board is reduced to a netlist, solved by modified nodal analysis, and the
//! solution is turned into electron-flow and magnetic-field visuals. The
//! numerical core is generic over the scalar type; the aliases below fix it
//! to `f64`.

pub mod breadboard;
pub mod circuit;
pub mod linalg;
pub mod netlist_io;
mod real;
pub mod session;
pub mod solver;
mod union_find;
pub mod viz;

pub use real::Real;

pub use breadboard::{Hole, Row};
pub use circuit::{ComponentId, ComponentKind, NodeId};

pub type Component = circuit::Component<f64>;
pub type ComponentParams = circuit::ComponentParams<f64>;
pub type Branch = circuit::Branch<f64>;
pub type Netlist = circuit::Netlist<f64>;
pub type BreadboardLayout = breadboard::BreadboardLayout<f64>;
pub type Placement = breadboard::Placement<f64>;
pub type SolveResult = solver::SolveResult<f64>;
pub type SolveError = solver::SolveError<f64>;
pub type TransientConfig = solver::TransientConfig<f64>;
pub type TransientStepper = solver::TransientStepper<f64>;
pub type FlowDescriptor = viz::FlowDescriptor<f64>;
pub type WireSegment = viz::WireSegment<f64>;
pub type FieldSample = viz::FieldSample<f64>;
pub type VisualFrame = viz::VisualFrame<f64>;
