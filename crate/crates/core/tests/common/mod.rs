//! Shared generators and reference models for the integration tests.
//!
//! Every reference model here is written from the textbook equations and
//! shares no code with the crate beyond its public data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use volta_core::breadboard::COLUMNS;
use volta_core::circuit::{build_netlist, ComponentParams};
use volta_core::session::{Command, Request};
use volta_core::{Branch, BreadboardLayout, Component, ComponentKind, Hole, Netlist, Row};

pub const VT: f64 = 0.02585;
pub const MU0: f64 = 4e-7 * std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn branch(id: &str, params: ComponentParams<f64>, nodes: &[&str]) -> Branch {
    Branch::new(Component::new(id, params).unwrap(), nodes.iter().copied())
}

pub fn netlist(branches: Vec<Branch>) -> Netlist {
    build_netlist(branches).unwrap()
}

pub fn resistor(r: f64) -> ComponentParams<f64> {
    ComponentParams::Resistor { resistance: r }
}

pub fn battery(emf: f64, rint: f64) -> ComponentParams<f64> {
    ComponentParams::BatteryDc { emf, internal_resistance: rint }
}

/// Gaussian elimination with partial pivoting on a dense system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k] == 0.0 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(i);
                for (x, p) in lower[0][k..].iter_mut().zip(&upper[k][k..]) {
                    *x -= f * p;
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone)]
pub struct Resistor {
    pub id: String,
    pub a: String,
    pub b: String,
    pub r: f64,
}

#[derive(Debug, Clone)]
pub struct Battery {
    pub id: String,
    pub plus: String,
    pub minus: String,
    pub emf: f64,
    pub rint: f64,
}

/// A connected network of resistors and non-ideal batteries on nodes
/// `"0"`, `"n1"`, `"n2"`, ...
#[derive(Debug, Clone)]
pub struct ResistorNetwork {
    pub nodes: Vec<String>,
    pub resistors: Vec<Resistor>,
    pub batteries: Vec<Battery>,
}

impl ResistorNetwork {
    pub fn random(rng: &mut impl Rng, max_nodes: usize, max_batteries: usize) -> Self {
        let n = rng.gen_range(2..=max_nodes);
        let nodes: Vec<String> = (0..n).map(|i| if i == 0 { "0".to_string() } else { format!("n{i}") }).collect();
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, rng.gen_range(0..i))).collect();
        for _ in 0..rng.gen_range(0..=n) {
            let a = rng.gen_range(0..n);
            pairs.push((a, (a + rng.gen_range(1..n)) % n));
        }
        let resistors = pairs
            .into_iter()
            .enumerate()
            .map(|(k, (a, b))| Resistor {
                id: format!("R{}", k + 1),
                a: nodes[a].clone(),
                b: nodes[b].clone(),
                r: log_uniform(rng, 10.0, 1e5),
            })
            .collect();
        let batteries = (0..rng.gen_range(1..=max_batteries))
            .map(|k| {
                let plus = rng.gen_range(0..n);
                let minus = (plus + rng.gen_range(1..n)) % n;
                Battery {
                    id: format!("V{}", k + 1),
                    plus: nodes[plus].clone(),
                    minus: nodes[minus].clone(),
                    emf: rng.gen_range(0.5..24.0),
                    rint: log_uniform(rng, 0.05, 50.0),
                }
            })
            .collect();
        Self { nodes, resistors, batteries }
    }

    /// The network with only the batteries in `active` driving it; the
    /// others are replaced by their internal resistance.
    pub fn netlist_with(&self, active: &dyn Fn(&Battery) -> bool) -> Netlist {
        let mut branches: Vec<Branch> =
            self.resistors.iter().map(|r| branch(&r.id, resistor(r.r), &[&r.a, &r.b])).collect();
        for (k, b) in self.batteries.iter().enumerate() {
            if active(b) {
                branches.push(branch(&b.id, battery(b.emf, b.rint), &[&b.plus, &b.minus]));
            } else {
                branches.push(branch(&format!("RV{k}"), resistor(b.rint), &[&b.plus, &b.minus]));
            }
        }
        netlist(branches)
    }

    pub fn netlist(&self) -> Netlist {
        self.netlist_with(&|_| true)
    }

    /// Node voltages from nodal analysis with each battery as its Norton
    /// equivalent; node `"0"` is the reference.
    pub fn nodal_voltages(&self) -> BTreeMap<String, f64> {
        let index: BTreeMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let n = self.nodes.len();
        let mut g = vec![vec![0.0; n]; n];
        let mut i = vec![0.0; n];
        let mut conductance = |a: usize, b: usize, value: f64| {
            g[a][a] += value;
            g[b][b] += value;
            g[a][b] -= value;
            g[b][a] -= value;
        };
        for r in &self.resistors {
            conductance(index[r.a.as_str()], index[r.b.as_str()], 1.0 / r.r);
        }
        for b in &self.batteries {
            conductance(index[b.plus.as_str()], index[b.minus.as_str()], 1.0 / b.rint);
        }
        for b in &self.batteries {
            let norton = b.emf / b.rint;
            i[index[b.plus.as_str()]] += norton;
            i[index[b.minus.as_str()]] -= norton;
        }
        let reduced: Vec<Vec<f64>> = g[1..].iter().map(|row| row[1..].to_vec()).collect();
        let x = gauss_solve(reduced, i[1..].to_vec()).expect("connected network is nonsingular");
        let mut out = BTreeMap::from([("0".to_string(), 0.0)]);
        for (k, v) in x.into_iter().enumerate() {
            out.insert(self.nodes[k + 1].clone(), v);
        }
        out
    }

    /// Branch currents implied by node voltages, positive from first to
    /// second terminal through the part.
    pub fn branch_currents(&self, v: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for r in &self.resistors {
            out.insert(r.id.clone(), (v[&r.a] - v[&r.b]) / r.r);
        }
        for b in &self.batteries {
            out.insert(b.id.clone(), (v[&b.plus] - v[&b.minus] - b.emf) / b.rint);
        }
        out
    }
}

/// Operating point of a battery, series resistor and junction to ground,
/// found by bisection on the single-loop equation.
pub fn junction_oracle(v0: f64, r: f64, is: f64, n: f64) -> f64 {
    bisect(|vd| (v0 - vd) / r - is * ((vd / (n * VT)).exp() - 1.0), 0.0, v0)
}

/// Ebers-Moll NPN terminal currents (collector in, base in).
pub fn ebers_moll(vbe: f64, vbc: f64, is: f64, bf: f64, br: f64) -> (f64, f64) {
    let f = is * ((vbe / VT).exp() - 1.0);
    let r = is * ((vbc / VT).exp() - 1.0);
    (f - r - r / br, f / bf + r / br)
}

/// Common-emitter stage with an ideal supply: returns (Vb, Vc) from a coarse
/// grid search followed by Newton with a finite-difference Jacobian.
pub fn common_emitter_oracle(vcc: f64, rb: f64, rc: f64, is: f64, bf: f64, br: f64) -> (f64, f64) {
    let residual = |vb: f64, vc: f64| {
        let (ic, ib) = ebers_moll(vb, vb - vc, is, bf, br);
        [(vcc - vb) / rb - ib, (vcc - vc) / rc - ic]
    };
    let scaled = |vb: f64, vc: f64| {
        let [a, b] = residual(vb, vc);
        (a * rb).abs() + (b * rc).abs()
    };
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..=400 {
        let vb = i as f64 * 1.0 / 400.0;
        for j in 0..=400 {
            let vc = j as f64 * vcc / 400.0;
            let s = scaled(vb, vc);
            if s < best.2 {
                best = (vb, vc, s);
            }
        }
    }
    let (mut vb, mut vc) = (best.0, best.1);
    for _ in 0..100 {
        let f = residual(vb, vc);
        let h = 1e-7;
        let fb = residual(vb + h, vc);
        let fc = residual(vb, vc + h);
        let j = [[(fb[0] - f[0]) / h, (fc[0] - f[0]) / h], [(fb[1] - f[1]) / h, (fc[1] - f[1]) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let db = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
        let dc = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
        let limit = |d: f64| d.clamp(-0.1, 0.1);
        vb += limit(db);
        vc += limit(dc);
        if db.abs() < 1e-15 && dc.abs() < 1e-15 {
            break;
        }
    }
    (vb, vc)
}

/// Biot-Savart integral of a straight segment by the midpoint rule.
pub fn biot_savart_quadrature(
    start: [f64; 3],
    end: [f64; 3],
    current: f64,
    point: [f64; 3],
    elements: usize,
) -> [f64; 3] {
    let dl = [
        (end[0] - start[0]) / elements as f64,
        (end[1] - start[1]) / elements as f64,
        (end[2] - start[2]) / elements as f64,
    ];
    let mut b = [0.0; 3];
    for k in 0..elements {
        let t = k as f64 + 0.5;
        let r =
            [point[0] - (start[0] + dl[0] * t), point[1] - (start[1] + dl[1] * t), point[2] - (start[2] + dl[2] * t)];
        let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        let w = MU0 * current / (4.0 * std::f64::consts::PI * r2 * r2.sqrt());
        b[0] += w * (dl[1] * r[2] - dl[2] * r[1]);
        b[1] += w * (dl[2] * r[0] - dl[0] * r[2]);
        b[2] += w * (dl[0] * r[1] - dl[1] * r[0]);
    }
    b
}

pub fn all_holes() -> Vec<Hole> {
    Row::ALL.into_iter().flat_map(|row| (1..=COLUMNS).map(move |c| Hole::new(row, c).unwrap())).collect()
}

/// Conductive strip of a hole as a plain label: five-hole column groups on
/// either side of the channel, full-length rails.
pub fn strip_label(hole: Hole) -> String {
    match hole.row {
        Row::A | Row::B | Row::C | Row::D | Row::E => format!("upper column {}", hole.column),
        Row::F | Row::G | Row::H | Row::I | Row::J => format!("lower column {}", hole.column),
        rail => format!("rail {rail:?}"),
    }
}

/// Component label per hole of the strip graph where wires are edges,
/// found by breadth-first search.
pub fn bfs_components(layout: &BreadboardLayout) -> BTreeMap<String, usize> {
    let mut adjacency: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for hole in all_holes() {
        adjacency.entry(strip_label(hole)).or_default();
    }
    for p in layout.placements() {
        if p.component.kind() == ComponentKind::Wire {
            let (a, b) = (strip_label(p.holes[0]), strip_label(p.holes[1]));
            adjacency.get_mut(&a).unwrap().push(b.clone());
            adjacency.get_mut(&b).unwrap().push(a);
        }
    }
    let mut label = BTreeMap::new();
    let mut next = 0;
    let keys: Vec<String> = adjacency.keys().cloned().collect();
    for start in keys {
        if label.contains_key(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start.clone()]);
        label.insert(start, next);
        while let Some(s) = queue.pop_front() {
            for t in &adjacency[&s] {
                if !label.contains_key(t) {
                    label.insert(t.clone(), next);
                    queue.push_back(t.clone());
                }
            }
        }
        next += 1;
    }
    label
}

pub fn random_params(rng: &mut impl Rng, kind: ComponentKind) -> ComponentParams<f64> {
    match kind {
        ComponentKind::Resistor => ComponentParams::Resistor { resistance: log_uniform(rng, 1.0, 1e7) },
        ComponentKind::Capacitor => ComponentParams::Capacitor { capacitance: log_uniform(rng, 1e-12, 1e-2) },
        ComponentKind::Diode => ComponentParams::Diode {
            saturation_current: log_uniform(rng, 1e-16, 1e-8),
            emission_coefficient: rng.gen_range(1.0..2.5),
        },
        ComponentKind::Led => ComponentParams::Led {
            saturation_current: log_uniform(rng, 1e-22, 1e-14),
            emission_coefficient: rng.gen_range(1.0..3.0),
            nominal_current: log_uniform(rng, 1e-3, 5e-2),
        },
        ComponentKind::TransistorNpn => ComponentParams::TransistorNpn {
            saturation_current: log_uniform(rng, 1e-16, 1e-12),
            forward_beta: rng.gen_range(20.0..500.0),
            reverse_beta: rng.gen_range(0.1..10.0),
        },
        ComponentKind::BatteryDc => ComponentParams::BatteryDc {
            emf: rng.gen_range(0.5..24.0),
            internal_resistance: if rng.gen_bool(0.2) { 0.0 } else { log_uniform(rng, 1e-3, 10.0) },
        },
        ComponentKind::SourceAc => {
            ComponentParams::SourceAc { amplitude: rng.gen_range(0.1..30.0), frequency: log_uniform(rng, 0.1, 1e4) }
        }
        ComponentKind::Wire => ComponentParams::Wire,
    }
}

/// A layout built by attempting `attempts` random placements, wires twice
/// as likely as any other kind. Failed placements are skipped.
pub fn random_layout(rng: &mut impl Rng, attempts: usize) -> BreadboardLayout {
    let holes = all_holes();
    let mut kinds: Vec<ComponentKind> = ComponentKind::ALL.to_vec();
    kinds.push(ComponentKind::Wire);
    let mut layout = BreadboardLayout::new();
    for _ in 0..attempts {
        let kind = *kinds.choose(rng).unwrap();
        let chosen: Vec<Hole> = holes.choose_multiple(rng, kind.terminals().len()).copied().collect();
        let component = Component::new(layout.next_id(kind), random_params(rng, kind)).unwrap();
        if let Ok(next) = layout.place(component, chosen) {
            layout = next;
        }
    }
    layout
}

/// A random netlist without wires, for text round trips.
pub fn random_netlist(rng: &mut impl Rng, parts: usize) -> Netlist {
    const NODES: [&str; 9] = ["0", "a", "b", "vcc", "n1", "n22", "out", "x_2", "v.in"];
    let mut counts: BTreeMap<ComponentKind, usize> = BTreeMap::new();
    let mut branches = Vec::new();
    for _ in 0..parts {
        let kind = *ComponentKind::ALL[..7].choose(rng).unwrap();
        let count = counts.entry(kind).or_default();
        *count += 1;
        let id = format!("{}{}", kind.mnemonic(), count);
        let nodes: Vec<&str> = NODES.choose_multiple(rng, kind.terminals().len()).copied().collect();
        branches.push(branch(&id, random_params(rng, kind), &nodes));
    }
    netlist(branches)
}

pub fn place_request(id: u64, kind: ComponentKind, component_id: &str, holes: &[&str]) -> Request {
    Request::new(
        id,
        Command::Place {
            kind,
            component_id: Some(component_id.to_string()),
            params: Default::default(),
            holes: holes.iter().map(|h| h.to_string()).collect(),
        },
    )
}

/// Set of holes used by any placement.
pub fn used_holes(layout: &BreadboardLayout) -> BTreeSet<Hole> {
    layout.placements().iter().flat_map(|p| p.holes.iter().copied()).collect()
}
