//! Map geometry: walls, navigation routes and the ego goal region.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{OrientedRect, Segment, Vec2};

/// A navigation route. Arc length `s` runs from the first point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

/// Foot of the perpendicular from a point onto a route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the foot point.
    pub s: f64,
    /// Signed offset from the route, positive to the left of travel.
    pub lateral: f64,
    /// Route tangent heading at the foot point.
    pub heading: f64,
    pub point: Vec2,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Result<Self> {
        if points.len() < 2 {
            return Err(SimError::InvalidConfig(
                "route polyline needs at least two points".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            let len = w[0].distance(w[1]);
            if len.is_nan() || len <= 0.0 {
                return Err(SimError::InvalidConfig(
                    "route polyline has repeated consecutive points".into(),
                ));
            }
            acc += len;
            cumulative.push(acc);
        }
        Ok(Self { points, cumulative })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    fn segment_heading(&self, i: usize) -> f64 {
        (self.points[i + 1] - self.points[i]).angle()
    }

    /// Point and tangent heading at arc length `s`; extrapolates linearly past the ends.
    pub fn point_at(&self, s: f64) -> (Vec2, f64) {
        let n = self.points.len();
        let i = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let dir = (self.points[i + 1] - self.points[i]) * (1.0 / (self.cumulative[i + 1] - self.cumulative[i]));
        (self.points[i] + dir * (s - self.cumulative[i]), self.segment_heading(i))
    }

    /// Projects onto the nearest segment. Points beyond the ends project onto
    /// the extension of the end segments, so `s` can be negative or exceed the length.
    pub fn project(&self, p: Vec2) -> Projection {
        let last = self.points.len() - 2;
        let mut best: Option<(f64, Projection)> = None;
        for i in 0..=last {
            let a = self.points[i];
            let b = self.points[i + 1];
            let seg_len = self.cumulative[i + 1] - self.cumulative[i];
            let dir = (b - a) * (1.0 / seg_len);
            let mut t = (p - a).dot(dir);
            if i > 0 {
                t = t.max(0.0);
            }
            if i < last {
                t = t.min(seg_len);
            }
            let foot = a + dir * t;
            let dist2 = (p - foot).norm_sq();
            if best.as_ref().is_none_or(|(d, _)| dist2 < *d) {
                best = Some((
                    dist2,
                    Projection {
                        s: self.cumulative[i] + t,
                        lateral: dir.cross(p - a),
                        heading: dir.angle(),
                        point: foot,
                    },
                ));
            }
        }
        best.expect("at least one segment").1
    }
}

impl TryFrom<Vec<Vec2>> for Polyline {
    type Error = SimError;
    fn try_from(points: Vec<Vec2>) -> Result<Self> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Vec2> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

/// Static map: walls, named routes, the ego goal region and the drivable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapGeometry {
    pub walls: Vec<Segment>,
    pub routes: BTreeMap<String, Polyline>,
    pub goal_region: OrientedRect,
    pub bounds_min: Vec2,
    pub bounds_max: Vec2,
}

impl MapGeometry {
    pub fn route(&self, name: &str) -> Result<&Polyline> {
        self.routes
            .get(name)
            .ok_or_else(|| SimError::UnknownRoute(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.goal_region.area().is_nan() || self.goal_region.area() <= 0.0 {
            return Err(SimError::InvalidConfig("goal region has zero area".into()));
        }
        if !(self.bounds_min.x < self.bounds_max.x && self.bounds_min.y < self.bounds_max.y) {
            return Err(SimError::InvalidConfig("map bounds are empty".into()));
        }
        Ok(())
    }

    pub fn in_bounds(&self, rect: &OrientedRect) -> bool {
        rect.corners().iter().all(|c| {
            c.x >= self.bounds_min.x
                && c.x <= self.bounds_max.x
                && c.y >= self.bounds_min.y
                && c.y <= self.bounds_max.y
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn l_route() -> Polyline {
        Polyline::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 0.0),
            Vec2::new(10.0, 10.0),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_polylines() {
        assert!(Polyline::new(vec![Vec2::ZERO]).is_err());
        assert!(Polyline::new(vec![Vec2::ZERO, Vec2::ZERO]).is_err());
    }

    #[test]
    fn point_at_and_projection_agree() {
        let r = l_route();
        assert_eq!(r.length(), 20.0);
        let (p, h) = r.point_at(15.0);
        assert!((p.x - 10.0).abs() < 1e-12 && (p.y - 5.0).abs() < 1e-12);
        assert!((h - FRAC_PI_2).abs() < 1e-12);
        let proj = r.project(Vec2::new(9.0, 5.0));
        assert!((proj.s - 15.0).abs() < 1e-12);
        // Left of a northbound segment is west.
        assert!((proj.lateral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_extrapolates_past_ends() {
        let r = l_route();
        let before = r.project(Vec2::new(-3.0, 0.5));
        assert!((before.s + 3.0).abs() < 1e-12);
        let after = r.project(Vec2::new(10.0, 14.0));
        assert!((after.s - 24.0).abs() < 1e-12);
        let (p, _) = r.point_at(-2.0);
        assert!((p.x + 2.0).abs() < 1e-12);
    }

    #[test]
    fn serde_roundtrip_rebuilds_lengths() {
        let r = l_route();
        let json = serde_json::to_string(&r).unwrap();
        let back: Polyline = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
