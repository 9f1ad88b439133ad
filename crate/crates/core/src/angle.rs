//! Angle helpers. Every angle in the crate lives in (-π, π].

use std::f64::consts::{PI, TAU};

/// Tolerance used when comparing angles modulo 2π.
pub const ANGLE_TOL: f64 = 1e-10;

/// Maps `a` into (-π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two angles on the circle, in [0, π].
pub fn angle_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

pub fn angles_close(a: f64, b: f64, tol: f64) -> bool {
    angle_distance(a, b) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundary_values() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(0.0), 0.0);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn distance_wraps() {
        assert!(angle_distance(PI - 1e-3, -PI + 1e-3) < 2.1e-3);
        assert!(angles_close(0.0, TAU, ANGLE_TOL));
    }

    proptest! {
        #[test]
        fn normalized_range(a in -1e3f64..1e3) {
            let n = normalize_angle(a);
            prop_assert!(n > -PI && n <= PI);
            prop_assert!(angles_close(n, a, 1e-9));
        }
    }
}
