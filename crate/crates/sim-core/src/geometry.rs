//! Planar geometry: vectors, oriented rectangles, segments and separating-axis tests.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(h: f64) -> Self {
        let (s, c) = h.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotates by `-h`, i.e. expresses a world vector in a frame with heading `h`.
    pub fn to_frame(self, h: f64) -> Vec2 {
        let (s, c) = h.sin_cos();
        Vec2::new(c * self.x + s * self.y, -s * self.x + c * self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Line segment between two points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Vec2 {
        (self.a + self.b) * 0.5
    }

    /// Closest point on the segment to `p` and its parameter in [0, 1].
    pub fn closest_point(&self, p: Vec2) -> (Vec2, f64) {
        let d = self.b - self.a;
        let len2 = d.norm_sq();
        if len2 == 0.0 {
            return (self.a, 0.0);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        (self.a + d * t, t)
    }

    /// Whether the two segments share at least one point.
    pub fn intersects(&self, o: &Segment) -> bool {
        let d1 = self.b - self.a;
        let d2 = o.b - o.a;
        let o1 = d1.cross(o.a - self.a);
        let o2 = d1.cross(o.b - self.a);
        let o3 = d2.cross(self.a - o.a);
        let o4 = d2.cross(self.b - o.a);
        if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
            && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
        {
            return true;
        }
        let on = |s: &Segment, p: Vec2, c: f64| {
            c == 0.0
                && p.x >= s.a.x.min(s.b.x)
                && p.x <= s.a.x.max(s.b.x)
                && p.y >= s.a.y.min(s.b.y)
                && p.y <= s.a.y.max(s.b.y)
        };
        on(self, o.a, o1) || on(self, o.b, o2) || on(o, self.a, o3) || on(o, self.b, o4)
    }
}

/// Rectangle with a center, heading and half extents along/across the heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub center: Vec2,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl OrientedRect {
    pub fn new(center: Vec2, heading: f64, half_length: f64, half_width: f64) -> Self {
        Self {
            center,
            heading,
            half_length,
            half_width,
        }
    }

    /// Axis-aligned rectangle spanning the given corners.
    pub fn from_bounds(min: Vec2, max: Vec2) -> Self {
        Self::new(
            (min + max) * 0.5,
            0.0,
            0.5 * (max.x - min.x).abs(),
            0.5 * (max.y - min.y).abs(),
        )
    }

    pub fn axes(&self) -> [Vec2; 2] {
        let u = Vec2::from_angle(self.heading);
        [u, u.perp()]
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_length * self.half_width
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let [u, n] = self.axes();
        let l = u * self.half_length;
        let w = n * self.half_width;
        let c = self.center;
        [c + l + w, c - l + w, c - l - w, c + l - w]
    }

    /// Half extent of the projection onto the unit vector `axis`.
    pub fn support(&self, axis: Vec2) -> f64 {
        let [u, n] = self.axes();
        self.half_length * u.dot(axis).abs() + self.half_width * n.dot(axis).abs()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let d = (p - self.center).to_frame(self.heading);
        d.x.abs() <= self.half_length && d.y.abs() <= self.half_width
    }

    pub fn bounding_radius(&self) -> f64 {
        self.half_length.hypot(self.half_width)
    }

    pub fn translated(&self, by: Vec2) -> Self {
        Self {
            center: self.center + by,
            ..*self
        }
    }
}

/// Signed separating-axis distance between two rectangles: the largest gap
/// over the four candidate axes. Positive means separated, zero touching,
/// negative overlapping.
pub fn rect_separation(a: &OrientedRect, b: &OrientedRect) -> f64 {
    let d = b.center - a.center;
    let [a0, a1] = a.axes();
    let [b0, b1] = b.axes();
    [a0, a1, b0, b1]
        .into_iter()
        .map(|axis| d.dot(axis).abs() - a.support(axis) - b.support(axis))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rectangles overlap when they share interior area; touching does not count.
pub fn rects_overlap(a: &OrientedRect, b: &OrientedRect) -> bool {
    let reach = a.bounding_radius() + b.bounding_radius();
    if (b.center - a.center).norm_sq() >= reach * reach {
        return false;
    }
    rect_separation(a, b) < 0.0
}

/// Signed separating-axis distance between a rectangle and a segment.
pub fn rect_segment_separation(r: &OrientedRect, s: &Segment) -> f64 {
    let mut axes: Vec<Vec2> = r.axes().to_vec();
    if let Some(n) = (s.b - s.a).perp().normalized() {
        axes.push(n);
    }
    axes.into_iter()
        .map(|axis| {
            let c = r.center.dot(axis);
            let (p, q) = (s.a.dot(axis), s.b.dot(axis));
            let (lo, hi) = (p.min(q), p.max(q));
            let rad = r.support(axis);
            (lo - (c + rad)).max((c - rad) - hi)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn rect_segment_intersect(r: &OrientedRect, s: &Segment) -> bool {
    let (closest, _) = s.closest_point(r.center);
    if closest.distance(r.center) > r.bounding_radius() {
        return false;
    }
    rect_segment_separation(r, s) < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn car(x: f64, y: f64, h: f64) -> OrientedRect {
        OrientedRect::new(Vec2::new(x, y), h, 2.0, 0.9)
    }

    #[test]
    fn identical_rectangles_overlap() {
        assert!(rects_overlap(&car(1.0, 2.0, 0.3), &car(1.0, 2.0, 0.3)));
    }

    #[test]
    fn far_parallel_rectangles_do_not() {
        assert!(!rects_overlap(&car(0.0, 0.0, 0.0), &car(10.0, 0.0, 0.0)));
        assert!((rect_separation(&car(0.0, 0.0, 0.0), &car(10.0, 0.0, 0.0)) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn touching_is_not_overlap() {
        assert!(!rects_overlap(&car(0.0, 0.0, 0.0), &car(4.0, 0.0, 0.0)));
        assert!(rects_overlap(&car(0.0, 0.0, 0.0), &car(3.999, 0.0, 0.0)));
    }

    #[test]
    fn corners_and_containment() {
        let r = car(0.0, 0.0, FRAC_PI_4);
        for c in r.corners() {
            assert!(c.distance(r.center) - r.bounding_radius() < 1e-12);
        }
        assert!(r.contains(Vec2::ZERO));
        assert!(!r.contains(Vec2::new(2.5, -2.5)));
    }

    #[test]
    fn segment_rect_tests() {
        let r = car(0.0, 0.0, 0.0);
        let crossing = Segment::new(Vec2::new(-5.0, 0.5), Vec2::new(5.0, 0.5));
        let outside = Segment::new(Vec2::new(-5.0, 1.0), Vec2::new(5.0, 1.0));
        let diagonal_miss = Segment::new(Vec2::new(2.0, 2.0), Vec2::new(4.0, 0.0));
        assert!(rect_segment_intersect(&r, &crossing));
        assert!(!rect_segment_intersect(&r, &outside));
        assert!(!rect_segment_intersect(&r, &diagonal_miss));
        assert!((rect_segment_separation(&r, &outside) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn segment_segment_intersection() {
        let a = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 2.0));
        let b = Segment::new(Vec2::new(0.0, 2.0), Vec2::new(2.0, 0.0));
        let c = Segment::new(Vec2::new(3.0, 0.0), Vec2::new(4.0, 0.0));
        assert!(a.intersects(&b));
        assert!(!a.intersects(&c));
    }
}
