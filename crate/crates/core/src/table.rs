//! Published optimized operating points for both bands, used as warm-start
//! seeds and as reference values in tests and examples.

use serde::Serialize;

use crate::point::Controls;
use crate::scheme::Band;

/// Whether a reference point came from the free or the ≤ 50 Γ search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Column {
    Unbounded,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferencePoint {
    pub band: Band,
    pub column: Column,
    pub od: f64,
    pub controls: Controls,
    /// Reported conversion efficiency, as a fraction.
    pub eta_d: f64,
}

const fn row(band: Band, column: Column, od: f64, c: [f64; 5], ce_percent: f64) -> ReferencePoint {
    ReferencePoint {
        band,
        column,
        od,
        controls: Controls::new(c[0], c[1], c[2], c[3], c[4]),
        eta_d: ce_percent / 100.0,
    }
}

use Band::{C1529 as C, E1367 as E};
use Column::{Bounded as B, Unbounded as U};

pub const REFERENCE_POINTS: [ReferencePoint; 20] = [
    row(E, U, 50.0, [13.0, -31.0, 14.0, 50.0, 7.0], 64.7),
    row(E, U, 100.0, [25.0, -54.0, 26.0, 90.0, 13.0], 79.0),
    row(E, U, 150.0, [35.0, -80.0, 37.0, 130.0, 19.0], 85.1),
    row(E, U, 200.0, [47.0, -99.0, 50.0, 170.0, 25.0], 88.4),
    row(E, U, 250.0, [59.0, -123.0, 62.0, 210.0, 31.0], 90.5),
    row(E, B, 50.0, [5.0, -12.0, 6.0, 20.0, 7.0], 63.9),
    row(E, B, 100.0, [6.0, -21.0, 10.0, 33.0, 12.0], 77.9),
    row(E, B, 150.0, [8.0, -31.0, 14.0, 46.0, 17.0], 83.9),
    row(E, B, 200.0, [6.0, -32.0, 16.0, 49.0, 21.0], 86.9),
    row(E, B, 250.0, [7.0, -24.0, 20.0, 50.0, 26.0], 89.1),
    row(C, U, 200.0, [26.0, -31.0, 25.0, 74.0, 9.0], 53.1),
    row(C, U, 400.0, [49.0, -64.0, 48.0, 145.0, 16.0], 69.5),
    row(C, U, 600.0, [73.0, -91.0, 74.0, 219.0, 22.0], 77.4),
    row(C, U, 800.0, [93.0, -119.0, 94.0, 280.0, 29.0], 82.1),
    row(C, U, 1000.0, [116.0, -154.0, 116.0, 350.0, 36.0], 85.1),
    row(C, B, 200.0, [13.0, -10.0, 11.0, 28.0, 11.0], 51.6),
    row(C, B, 400.0, [24.0, -15.0, 21.0, 50.0, 19.0], 67.3),
    row(C, B, 600.0, [33.0, -7.0, 26.0, 50.0, 29.0], 74.0),
    row(C, B, 800.0, [35.0, -5.0, 29.0, 50.0, 37.0], 78.7),
    row(C, B, 1000.0, [44.0, -2.0, 31.0, 50.0, 47.0], 82.4),
];

pub fn reference_points(band: Band, column: Column) -> impl Iterator<Item = &'static ReferencePoint> {
    REFERENCE_POINTS
        .iter()
        .filter(move |r| r.band == band && r.column == column)
}

/// Reference controls at `od`, linearly interpolated between tabulated ODs
/// of one column and clamped at the ends.
pub fn interpolated_controls(band: Band, column: Column, od: f64) -> Controls {
    let rows: Vec<_> = reference_points(band, column).collect();
    let first = rows[0];
    let last = rows[rows.len() - 1];
    if od <= first.od {
        return first.controls;
    }
    if od >= last.od {
        return last.controls;
    }
    let hi = rows.iter().position(|r| r.od >= od).unwrap_or(rows.len() - 1);
    let (lo, hi) = (rows[hi - 1], rows[hi]);
    let t = (od - lo.od) / (hi.od - lo.od);
    let a = lo.controls.to_array();
    let b = hi.controls.to_array();
    Controls::from_array(std::array::from_fn(|k| a[k] + t * (b[k] - a[k])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_midpoint() {
        let c = interpolated_controls(Band::C1529, Column::Unbounded, 700.0);
        assert_eq!(c.to_array(), [83.0, -105.0, 84.0, 249.5, 25.5]);
        let end = interpolated_controls(Band::E1367, Column::Bounded, 10.0);
        assert_eq!(end, REFERENCE_POINTS[5].controls);
    }
}
