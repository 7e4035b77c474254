//! Magnetic field of straight current-carrying segments (Biot–Savart).

use serde::Serialize;

use crate::Real;

/// Vacuum permeability, in T·m/A.
pub const MU_0: f64 = 4e-7 * std::f64::consts::PI;
/// Points nearer a segment's line than this are evaluated at this distance, in metres.
pub const EXCLUSION_RADIUS: f64 = 1e-3;

pub type Vec3<T> = [T; 3];

fn sub<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale<T: Real>(a: Vec3<T>, k: T) -> Vec3<T> {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn dot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm<T: Real>(a: Vec3<T>) -> T {
    dot(a, a).sqrt()
}

/// A straight conductor; `current` is positive from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WireSegment<T> {
    pub start: Vec3<T>,
    pub end: Vec3<T>,
    pub current: T,
}

impl<T: Real> WireSegment<T> {
    pub fn new(start: Vec3<T>, end: Vec3<T>, current: T) -> Self {
        Self { start, end, current }
    }

    pub fn length(&self) -> T {
        norm(sub(self.end, self.start))
    }

    /// Field of this segment alone at `point`.
    ///
    /// With `d` the distance from the segment's line and `θ1`, `θ2` the
    /// angles subtended by its ends, `|B| = µ0·I/(4π·d)·(sin θ2 − sin θ1)`.
    /// Points on the line itself get zero.
    pub fn field_at(&self, point: Vec3<T>) -> Vec3<T> {
        let axis = sub(self.end, self.start);
        let length = norm(axis);
        if length == T::zero() || self.current == T::zero() {
            return [T::zero(); 3];
        }
        let u = scale(axis, length.recip());
        let r = sub(point, self.start);
        let along = dot(r, u);
        let perp = sub(r, scale(u, along));
        let mut d = norm(perp);
        if d <= T::epsilon() * length {
            return [T::zero(); 3];
        }
        let direction = cross(u, scale(perp, d.recip()));
        d = d.max(T::lit(EXCLUSION_RADIUS));
        let beyond = length - along;
        let sin2 = beyond / beyond.hypot(d);
        let sin1 = -along / along.hypot(d);
        let magnitude = T::lit(MU_0) * self.current / (T::lit(4.0) * T::PI() * d) * (sin2 - sin1);
        scale(direction, magnitude)
    }
}

/// Field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample<T> {
    pub position: Vec3<T>,
    /// Flux density, in tesla.
    pub b: Vec3<T>,
}

impl<T: Real> FieldSample<T> {
    pub fn magnitude(&self) -> T {
        norm(self.b)
    }
}

/// Superposed field of all `segments` at `point`.
pub fn field_at<T: Real>(point: Vec3<T>, segments: &[WireSegment<T>]) -> FieldSample<T> {
    let b = segments.iter().fold([T::zero(); 3], |acc, s| {
        let f = s.field_at(point);
        [acc[0] + f[0], acc[1] + f[1], acc[2] + f[2]]
    });
    FieldSample { position: point, b }
}
