use std::fmt;

use super::{CircuitError, ComponentKind};
use crate::Real;

/// Per-kind physical parameters. Each variant carries exactly the values
/// its kind needs; the thermal voltage is the fixed [`super::THERMAL_VOLTAGE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentParams<T> {
    Resistor { resistance: T },
    Capacitor { capacitance: T },
    Diode { saturation_current: T, emission_coefficient: T },
    Led { saturation_current: T, emission_coefficient: T, nominal_current: T },
    TransistorNpn { saturation_current: T, forward_beta: T, reverse_beta: T },
    BatteryDc { emf: T, internal_resistance: T },
    SourceAc { amplitude: T, frequency: T },
    Wire,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Positive,
    AtLeastOne,
    NonNegative,
}

/// Name table entry for one parameter: the short key used in netlists,
/// protocol messages and layout files, plus its human label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub label: &'static str,
    rule: Rule,
}

const fn spec(key: &'static str, label: &'static str, rule: Rule) -> ParamSpec {
    ParamSpec { key, label, rule }
}

const RESISTOR: [ParamSpec; 1] = [spec("r", "resistance", Rule::Positive)];
const CAPACITOR: [ParamSpec; 1] = [spec("c", "capacitance", Rule::Positive)];
const DIODE: [ParamSpec; 2] =
    [spec("is", "saturation current", Rule::Positive), spec("n", "emission coefficient", Rule::AtLeastOne)];
const LED: [ParamSpec; 3] = [
    spec("is", "saturation current", Rule::Positive),
    spec("n", "emission coefficient", Rule::AtLeastOne),
    spec("inom", "nominal current", Rule::Positive),
];
const NPN: [ParamSpec; 3] = [
    spec("is", "saturation current", Rule::Positive),
    spec("bf", "forward beta", Rule::Positive),
    spec("br", "reverse beta", Rule::Positive),
];
const BATTERY: [ParamSpec; 2] =
    [spec("v", "emf", Rule::Positive), spec("rint", "internal resistance", Rule::NonNegative)];
const SOURCE_AC: [ParamSpec; 2] = [spec("a", "amplitude", Rule::Positive), spec("f", "frequency", Rule::Positive)];

impl ComponentKind {
    /// Parameter keys in their fixed order.
    pub fn param_specs(self) -> &'static [ParamSpec] {
        match self {
            ComponentKind::Resistor => &RESISTOR,
            ComponentKind::Capacitor => &CAPACITOR,
            ComponentKind::Diode => &DIODE,
            ComponentKind::Led => &LED,
            ComponentKind::TransistorNpn => &NPN,
            ComponentKind::BatteryDc => &BATTERY,
            ComponentKind::SourceAc => &SOURCE_AC,
            ComponentKind::Wire => &[],
        }
    }
}

impl<T> ComponentParams<T> {
    pub fn kind(&self) -> ComponentKind {
        match self {
            ComponentParams::Resistor { .. } => ComponentKind::Resistor,
            ComponentParams::Capacitor { .. } => ComponentKind::Capacitor,
            ComponentParams::Diode { .. } => ComponentKind::Diode,
            ComponentParams::Led { .. } => ComponentKind::Led,
            ComponentParams::TransistorNpn { .. } => ComponentKind::TransistorNpn,
            ComponentParams::BatteryDc { .. } => ComponentKind::BatteryDc,
            ComponentParams::SourceAc { .. } => ComponentKind::SourceAc,
            ComponentParams::Wire => ComponentKind::Wire,
        }
    }
}

impl<T: Real> ComponentParams<T> {
    /// Classroom defaults for each toolbox kind.
    pub fn defaults(kind: ComponentKind) -> Self {
        let l = T::lit;
        match kind {
            ComponentKind::Resistor => ComponentParams::Resistor { resistance: l(1000.0) },
            ComponentKind::Capacitor => ComponentParams::Capacitor { capacitance: l(100e-6) },
            ComponentKind::Diode => {
                ComponentParams::Diode { saturation_current: l(1e-12), emission_coefficient: l(1.0) }
            }
            ComponentKind::Led => ComponentParams::Led {
                saturation_current: l(1e-18),
                emission_coefficient: l(2.0),
                nominal_current: l(20e-3),
            },
            ComponentKind::TransistorNpn => ComponentParams::TransistorNpn {
                saturation_current: l(1e-14),
                forward_beta: l(100.0),
                reverse_beta: l(1.0),
            },
            ComponentKind::BatteryDc => ComponentParams::BatteryDc { emf: l(9.0), internal_resistance: l(0.5) },
            ComponentKind::SourceAc => ComponentParams::SourceAc { amplitude: l(5.0), frequency: l(60.0) },
            ComponentKind::Wire => ComponentParams::Wire,
        }
    }

    /// Values in the kind's fixed parameter order.
    pub fn values(&self) -> Vec<T> {
        match *self {
            ComponentParams::Resistor { resistance } => vec![resistance],
            ComponentParams::Capacitor { capacitance } => vec![capacitance],
            ComponentParams::Diode { saturation_current, emission_coefficient } => {
                vec![saturation_current, emission_coefficient]
            }
            ComponentParams::Led { saturation_current, emission_coefficient, nominal_current } => {
                vec![saturation_current, emission_coefficient, nominal_current]
            }
            ComponentParams::TransistorNpn { saturation_current, forward_beta, reverse_beta } => {
                vec![saturation_current, forward_beta, reverse_beta]
            }
            ComponentParams::BatteryDc { emf, internal_resistance } => vec![emf, internal_resistance],
            ComponentParams::SourceAc { amplitude, frequency } => vec![amplitude, frequency],
            ComponentParams::Wire => Vec::new(),
        }
    }

    /// `(key, value)` pairs in fixed order.
    pub fn named_values(&self) -> Vec<(&'static str, T)> {
        self.kind().param_specs().iter().map(|s| s.key).zip(self.values()).collect()
    }

    pub fn get(&self, key: &str) -> Option<T> {
        self.named_values().into_iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| v)
    }

    /// Sets one parameter by key. Does not validate the value.
    pub fn set(&mut self, key: &str, value: T) -> Result<(), CircuitError> {
        let kind = self.kind();
        let index = kind
            .param_specs()
            .iter()
            .position(|s| s.key.eq_ignore_ascii_case(key))
            .ok_or_else(|| CircuitError::UnknownParam { kind, param: key.to_string() })?;
        let mut values = self.values();
        values[index] = value;
        *self = Self::from_values(kind, &values);
        Ok(())
    }

    /// Builds params from values in fixed order. Panics if `values` is shorter
    /// than the kind's parameter list.
    fn from_values(kind: ComponentKind, v: &[T]) -> Self {
        match kind {
            ComponentKind::Resistor => ComponentParams::Resistor { resistance: v[0] },
            ComponentKind::Capacitor => ComponentParams::Capacitor { capacitance: v[0] },
            ComponentKind::Diode => ComponentParams::Diode { saturation_current: v[0], emission_coefficient: v[1] },
            ComponentKind::Led => {
                ComponentParams::Led { saturation_current: v[0], emission_coefficient: v[1], nominal_current: v[2] }
            }
            ComponentKind::TransistorNpn => {
                ComponentParams::TransistorNpn { saturation_current: v[0], forward_beta: v[1], reverse_beta: v[2] }
            }
            ComponentKind::BatteryDc => ComponentParams::BatteryDc { emf: v[0], internal_resistance: v[1] },
            ComponentKind::SourceAc => ComponentParams::SourceAc { amplitude: v[0], frequency: v[1] },
            ComponentKind::Wire => ComponentParams::Wire,
        }
    }
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamViolation {
    pub param: &'static str,
    pub message: String,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Checks every sign and range constraint; returns all violations at once.
pub fn validate_params<T: Real>(kind: ComponentKind, params: &ComponentParams<T>) -> Result<(), Vec<ParamViolation>> {
    if params.kind() != kind {
        return Err(vec![ParamViolation {
            param: "kind",
            message: format!("parameters describe a {} but the component is a {kind}", params.kind()),
        }]);
    }
    let violations: Vec<_> = kind
        .param_specs()
        .iter()
        .zip(params.values())
        .filter_map(|(spec, value)| {
            let ok = value.is_finite()
                && match spec.rule {
                    Rule::Positive => value > T::zero(),
                    Rule::AtLeastOne => value >= T::one(),
                    Rule::NonNegative => value >= T::zero(),
                };
            let bound = match spec.rule {
                Rule::Positive => "must be > 0",
                Rule::AtLeastOne => "must be >= 1",
                Rule::NonNegative => "must be >= 0",
            };
            (!ok).then(|| ParamViolation { param: spec.key, message: format!("{} {bound}", spec.label) })
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// One entry per toolbox kind with its default parameters, in a stable order.
pub fn toolbox_catalog<T: Real>() -> Vec<(ComponentKind, ComponentParams<T>)> {
    ComponentKind::ALL.iter().map(|&kind| (kind, ComponentParams::defaults(kind))).collect()
}
