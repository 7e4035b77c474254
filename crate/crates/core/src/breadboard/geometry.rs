//! Physical hole positions.

use super::{Hole, Row};
use crate::Real;

/// Hole spacing, in metres.
pub const HOLE_PITCH: f64 = 2.54e-3;

fn row_offset(row: Row) -> u8 {
    match row {
        Row::TopPlus => 0,
        Row::TopMinus => 1,
        Row::A => 3,
        Row::B => 4,
        Row::C => 5,
        Row::D => 6,
        Row::E => 7,
        Row::F => 10,
        Row::G => 11,
        Row::H => 12,
        Row::I => 13,
        Row::J => 14,
        Row::BottomPlus => 16,
        Row::BottomMinus => 17,
    }
}

/// Centre of a hole on the board surface, `[x, y, 0]` in metres.
///
/// Column 1 sits at x = 0 and x grows with the column; the top rail sits at
/// y = 0 and y grows towards the bottom rails.
pub fn hole_position<T: Real>(hole: Hole) -> [T; 3] {
    let pitch = T::lit(HOLE_PITCH);
    [T::lit(f64::from(hole.column - 1)) * pitch, T::lit(f64::from(row_offset(hole.row))) * pitch, T::zero()]
}

/// Extent of the hole grid: `([x_min, y_min], [x_max, y_max])`.
pub fn board_extent<T: Real>() -> ([T; 2], [T; 2]) {
    let pitch = T::lit(HOLE_PITCH);
    ([T::zero(), T::zero()], [T::lit(f64::from(super::COLUMNS - 1)) * pitch, T::lit(17.0) * pitch])
}
