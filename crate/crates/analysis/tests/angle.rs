use std::f64::consts::PI;

use analysis::collision::wrap_degrees;
use analysis::collision_angle;
use proptest::prelude::*;
use sim_core::VehicleState;

fn heading(deg: f64) -> VehicleState {
    VehicleState::new(0.0, 0.0, 1.0, deg.to_radians())
}

#[test]
fn equal_headings_give_zero() {
    for h in [-170.0, 0.0, 45.0, 179.0] {
        assert!(collision_angle(&heading(h), &heading(h)).abs() < 1e-12);
    }
}

#[test]
fn other_turned_left_gives_plus_ninety() {
    let ego = VehicleState::new(0.0, 0.0, 1.0, 0.3);
    let other = VehicleState::new(0.0, 0.0, 1.0, 0.3 + PI / 2.0);
    assert!((collision_angle(&ego, &other) - 90.0).abs() < 1e-9);
}

#[test]
fn wrap_around_at_the_seam() {
    assert!((collision_angle(&heading(170.0), &heading(-170.0)) - 20.0).abs() < 1e-9);
    assert!((collision_angle(&heading(-170.0), &heading(170.0)) + 20.0).abs() < 1e-9);
}

#[test]
fn opposite_headings_map_to_minus_180() {
    assert_eq!(wrap_degrees(180.0), -180.0);
    assert_eq!(wrap_degrees(-180.0), -180.0);
    assert!((wrap_degrees(540.0) + 180.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn angle_is_in_range_and_antisymmetric(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let (ea, eb) = (VehicleState::new(0.0, 0.0, 1.0, a), VehicleState::new(0.0, 0.0, 1.0, b));
        let ab = collision_angle(&ea, &eb);
        let ba = collision_angle(&eb, &ea);
        prop_assert!((-180.0..180.0).contains(&ab));
        let gap = (ab + ba).rem_euclid(360.0);
        prop_assert!(gap < 1e-9 || 360.0 - gap < 1e-9, "{ab} vs {ba}");
        prop_assert!((wrap_degrees(-ba) - ab).abs() < 1e-9 || (wrap_degrees(-ba) - ab).abs() > 360.0 - 1e-9);
    }
}
