mod common;

use proptest::prelude::*;

use common::*;
use volta_core::breadboard::{connectivity, extract_netlist};
use volta_core::circuit::ComponentParams;
use volta_core::solver::solve_dc;
use volta_core::viz::{
    describe_flow, field_at, field_grid, flow_speed, visual_frame, wire_segments, ElectronDirection, GridConfig,
};
use volta_core::{BreadboardLayout, Component, ComponentId, ComponentKind, WireSegment};

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-0.05f64..0.05, -0.05f64..0.05, -0.02f64..0.02]
}

fn segment() -> impl Strategy<Value = WireSegment> {
    (point(), point(), -3.0f64..3.0).prop_map(|(a, b, i)| WireSegment::new(a, b, i))
}

fn loop_layout(emf: f64, r: f64) -> BreadboardLayout {
    let seat = |layout: &BreadboardLayout, id: &str, params, holes: [&str; 2]| {
        let component = Component::new(id, params).unwrap();
        layout.place(component, holes.iter().map(|h| h.parse().unwrap()).collect()).unwrap()
    };
    let mut layout = BreadboardLayout::new();
    layout = seat(&layout, "V1", battery(emf, 0.5), ["a3", "a1"]);
    layout = seat(&layout, "R1", resistor(r), ["b3", "g9"]);
    layout = seat(&layout, "W1", ComponentParams::Wire, ["h9", "c1"]);
    layout
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_scales_linearly(segments in prop::collection::vec(segment(), 1..6), p in point(), k in -10.0f64..10.0) {
        let scaled: Vec<WireSegment> = segments.iter().map(|s| WireSegment::new(s.start, s.end, s.current * k)).collect();
        let b = field_at(p, &segments).b;
        let bk = field_at(p, &scaled).b;
        let scale = b.iter().map(|x| x.abs()).fold(0.0, f64::max) * k.abs();
        for axis in 0..3 {
            prop_assert!((bk[axis] - k * b[axis]).abs() <= 1e-12 * scale + f64::MIN_POSITIVE);
        }
    }

    #[test]
    fn field_superposes(a in prop::collection::vec(segment(), 1..5), extra in segment(), p in point()) {
        let mut union = a.clone();
        union.push(extra);
        let joined = field_at(p, &union).b;
        let parts = [field_at(p, &a).b, field_at(p, &[extra]).b];
        for axis in 0..3 {
            prop_assert_eq!(joined[axis], parts[0][axis] + parts[1][axis]);
        }
    }

    #[test]
    fn reversing_current_reverses_field(s in segment(), p in point()) {
        let b = field_at(p, &[s]).b;
        let r = field_at(p, &[WireSegment::new(s.end, s.start, s.current)]).b;
        for axis in 0..3 {
            prop_assert!((b[axis] + r[axis]).abs() <= 1e-12 * b[axis].abs().max(1e-30));
        }
    }

    #[test]
    fn speed_is_monotone_and_bounded(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let (sa, sb) = (flow_speed(a), flow_speed(b));
        prop_assert!((0.0..=1.0).contains(&sa));
        if a.abs().min(1.0) < b.abs().min(1.0) {
            prop_assert!(sa < sb);
        }
    }

    #[test]
    fn electrons_move_against_conventional_current(i in -1.0f64..1.0) {
        let d = describe_flow(&ComponentId::new("R1"), ComponentKind::Resistor, i, true);
        match d.electron_direction {
            ElectronDirection::Stationary => prop_assert_eq!(i, 0.0),
            ElectronDirection::Terminals { from, to } => {
                if i > 0.0 {
                    prop_assert_eq!((from.as_str(), to.as_str()), ("b", "a"));
                } else {
                    prop_assert_eq!((from.as_str(), to.as_str()), ("a", "b"));
                }
            }
        }
    }

    #[test]
    fn raising_resistance_slows_the_markers(r in 10.0f64..1e5, factor in 1.01f64..10.0) {
        let speed = |r: f64| {
            let layout = loop_layout(9.0, r);
            let result = solve_dc(&extract_netlist(&layout)).unwrap();
            let frame = visual_frame(&layout, &result, &GridConfig { columns: 2, rows: 2, ..GridConfig::default() });
            frame.flows.iter().find(|f| f.component.as_str() == "R1").unwrap().speed
        };
        prop_assert!(speed(r * factor) < speed(r));
    }
}

#[test]
fn speed_reference_points() {
    assert_eq!(flow_speed(0.0), 0.0);
    assert!((flow_speed(1e-3) - 2f64.ln() / 1001f64.ln()).abs() < 1e-15);
    assert_eq!(flow_speed(1.0), 1.0);
    assert_eq!(flow_speed(-5.0), 1.0);
}

#[test]
fn doubling_emf_doubles_the_field() {
    let grid = GridConfig { columns: 12, rows: 5, ..GridConfig::default() };
    let one = loop_layout(4.5, 1000.0);
    let two = loop_layout(9.0, 1000.0);
    let b1 = field_grid(&one, &solve_dc(&extract_netlist(&one)).unwrap(), &grid);
    let b2 = field_grid(&two, &solve_dc(&extract_netlist(&two)).unwrap(), &grid);
    assert!(b1.iter().any(|s| s.magnitude() > 0.0));
    for (s1, s2) in b1.iter().zip(&b2) {
        assert!((s2.magnitude() - 2.0 * s1.magnitude()).abs() <= 1e-12 * s2.magnitude());
    }
}

#[test]
fn grid_equals_pointwise_evaluation() {
    let layout = loop_layout(9.0, 470.0);
    let result = solve_dc(&extract_netlist(&layout)).unwrap();
    let grid = GridConfig::default();
    let samples = field_grid(&layout, &result, &grid);
    let segments = wire_segments(&layout, &result, &connectivity(&layout));
    assert_eq!(samples.len(), 60 * 20);
    assert_eq!(segments.len(), 3);
    for (sample, p) in samples.iter().zip(grid.points()) {
        assert_eq!(sample.position, p);
        assert_eq!(sample.b, field_at(p, &segments).b);
    }
}

#[test]
fn led_brightness_tracks_forward_current() {
    let seat = |layout: &BreadboardLayout, id: &str, params, holes: [&str; 2]| {
        let component = Component::new(id, params).unwrap();
        layout.place(component, holes.iter().map(|h| h.parse().unwrap()).collect()).unwrap()
    };
    let led = ComponentParams::Led { saturation_current: 1e-18, emission_coefficient: 2.0, nominal_current: 0.02 };
    let mut layout = BreadboardLayout::new();
    layout = seat(&layout, "V1", battery(9.0, 0.0), ["a5", "a1"]);
    layout = seat(&layout, "R1", resistor(1000.0), ["b5", "b9"]);
    layout = seat(&layout, "LED1", led, ["c9", "c1"]);
    let result = solve_dc(&extract_netlist(&layout)).unwrap();
    let frame = visual_frame(&layout, &result, &GridConfig { columns: 2, rows: 1, ..GridConfig::default() });
    let current = result.current(&ComponentId::new("LED1")).unwrap();
    assert!((frame.led_brightness[&ComponentId::new("LED1")] - current / 0.02).abs() < 1e-15);

    let reversed = seat(&layout.remove(&ComponentId::new("LED1")).unwrap(), "LED1", led, ["c1", "c9"]);
    let result = solve_dc(&extract_netlist(&reversed)).unwrap();
    let frame = visual_frame(&reversed, &result, &GridConfig { columns: 2, rows: 1, ..GridConfig::default() });
    assert_eq!(frame.led_brightness[&ComponentId::new("LED1")], 0.0);
    assert!(frame.flows.iter().all(|f| !f.active));
}
