//! Pure-pursuit route tracking shared by route-following controllers.

use crate::map::Polyline;
use crate::vehicle::{normalize_angle, VehicleLimits, VehicleState};

/// Steering angle that steers toward the point `lookahead` meters further
/// along `route`, shifted sideways by `offset` (positive to the left).
/// The result is clamped to the steering limit.
pub fn pure_pursuit(
    state: &VehicleState,
    route: &Polyline,
    lookahead: f64,
    offset: f64,
    limits: &VehicleLimits,
) -> f64 {
    let p = state.position();
    let proj = route.project(p);
    let (anchor, heading) = route.point_at(proj.s + lookahead);
    let target = anchor + crate::geometry::Vec2::from_angle(heading).perp() * offset;
    let to_target = target - p;
    let dist = to_target.norm();
    if dist < 1e-9 {
        return 0.0;
    }
    let mut bearing = normalize_angle(to_target.angle() - state.h);
    if state.v < 0.0 {
        // Reversing: steer so the rear follows the path.
        bearing = -bearing;
    }
    let phi = (2.0 * limits.wheelbase * bearing.sin() / dist).atan();
    phi.clamp(-limits.phi_steer_max, limits.phi_steer_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn road() -> Polyline {
        Polyline::new(vec![Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)]).unwrap()
    }

    #[test]
    fn on_route_and_aligned_means_straight() {
        let s = VehicleState::new(10.0, 0.0, 1.0, 0.0);
        assert_eq!(pure_pursuit(&s, &road(), 3.0, 0.0, &VehicleLimits::default()), 0.0);
    }

    #[test]
    fn steers_back_toward_route() {
        let l = VehicleLimits::default();
        let left = VehicleState::new(10.0, 1.0, 1.0, 0.0);
        let right = VehicleState::new(10.0, -1.0, 1.0, 0.0);
        assert!(pure_pursuit(&left, &road(), 3.0, 0.0, &l) < 0.0);
        assert!(pure_pursuit(&right, &road(), 3.0, 0.0, &l) > 0.0);
        // With a matching offset the vehicle is already on its target line.
        assert!(pure_pursuit(&left, &road(), 3.0, 1.0, &l).abs() < 1e-12);
    }
}
