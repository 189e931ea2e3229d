//! Planar primitives: points (interchangeable with complex numbers), angles,
//! equilateral third points, circular arcs and segment predicates.
//!
//! All routines work in `f64` with an absolute tolerance ladder:
//! [`GEOM_EPS`] for geometric predicates, [`LENGTH_EPS`] for comparing tree
//! lengths and [`ANGLE_EPS`] for the 2π/3 angle conditions.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for geometric predicates (coincidence, incidence, edge collapse).
pub const GEOM_EPS: f64 = 1e-12;
/// Tolerance for comparing lengths of trees.
pub const LENGTH_EPS: f64 = 1e-9;
/// Tolerance on the 2π/3 angle conditions.
pub const ANGLE_EPS: f64 = 1e-7;
/// The Steiner angle.
pub const STEINER_ANGLE: f64 = 2.0 * PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is counterclockwise of `self`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Polar angle in (−π, π].
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector in the direction of `self`. Returns `None` for (near) zero vectors.
    pub fn unit(self) -> Option<Point> {
        let n = self.norm();
        (n > GEOM_EPS).then(|| self * (1.0 / n))
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::new(z.re, z.im)
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        p.to_complex()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Which half-plane of the oriented line a→b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Counterclockwise circular arc from `start_angle` sweeping to `end_angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center: Point,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl Arc {
    pub fn full_circle(center: Point, radius: f64) -> Arc {
        Arc { center, radius, start_angle: 0.0, end_angle: TAU }
    }

    /// Counterclockwise sweep in (0, 2π].
    pub fn sweep(&self) -> f64 {
        let s = (self.end_angle - self.start_angle).rem_euclid(TAU);
        if s <= 0.0 {
            TAU
        } else {
            s
        }
    }

    /// Angular offset of `theta` past the start of the arc, in [0, 2π).
    pub fn offset_of(&self, theta: f64) -> f64 {
        (theta - self.start_angle).rem_euclid(TAU)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let sweep = self.sweep();
        if sweep >= TAU {
            return true;
        }
        let off = self.offset_of(theta);
        // a point just below the start wraps to ~2π
        off <= sweep + GEOM_EPS || off >= TAU - GEOM_EPS
    }

    pub fn point_at(&self, theta: f64) -> Point {
        self.center + Point::from_polar(self.radius, theta)
    }

    pub fn start_point(&self) -> Point {
        self.point_at(self.start_angle)
    }

    pub fn end_point(&self) -> Point {
        self.point_at(self.end_angle)
    }
}

/// Third vertex `c` of the equilateral triangle on `a`, `b`, lying on `side` of the line a→b.
pub fn third_equilateral_point(a: Point, b: Point, side: Side) -> Result<Point> {
    let d = b - a;
    if d.norm() < GEOM_EPS {
        return Err(Error::DegenerateInput(format!(
            "equilateral point of coincident points {a:?}, {b:?}"
        )));
    }
    let theta = match side {
        Side::Left => PI / 3.0,
        Side::Right => -PI / 3.0,
    };
    Ok(a + d.rotate(theta))
}

/// Unsigned angle ∠(a, v, b) in [0, π].
pub fn angle_at(v: Point, a: Point, b: Point) -> Result<f64> {
    let (da, db) = (a - v, b - v);
    if da.norm() < GEOM_EPS || db.norm() < GEOM_EPS {
        return Err(Error::DegenerateInput(format!(
            "angle at {v:?} with a coincident arm"
        )));
    }
    Ok(da.cross(db).abs().atan2(da.dot(db)))
}

/// Signed orientation of the triangle (a, b, c): positive for counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Intersections of the segment [p, q] with `arc`, ordered from `p` towards `q`.
pub fn intersect_segment_arc(p: Point, q: Point, arc: &Arc) -> Vec<Point> {
    let d = q - p;
    let f = p - arc.center;
    let a = d.dot(d);
    if a < GEOM_EPS * GEOM_EPS {
        return Vec::new();
    }
    let b = 2.0 * f.dot(d);
    let c = f.dot(f) - arc.radius * arc.radius;
    let disc = b * b - 4.0 * a * c;
    // tangency tolerance scaled to the problem size
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc < -1e-14 * scale {
        return Vec::new();
    }
    let mut ts = Vec::with_capacity(2);
    if disc <= 1e-14 * scale {
        ts.push(-b / (2.0 * a));
    } else {
        // numerically stable pair of roots
        let sq = disc.sqrt();
        let qq = -0.5 * (b + b.signum() * sq);
        let (t1, t2) = if qq == 0.0 {
            (-sq / (2.0 * a), sq / (2.0 * a))
        } else {
            (qq / a, c / qq)
        };
        ts.push(t1.min(t2));
        ts.push(t1.max(t2));
    }
    let len = a.sqrt();
    ts.into_iter()
        .filter(|&t| t >= -GEOM_EPS / len && t <= 1.0 + GEOM_EPS / len)
        .map(|t| p + d * t.clamp(0.0, 1.0))
        .filter(|x| arc.contains_angle((*x - arc.center).arg()))
        .collect()
}

/// Euclidean distance from `x` to the segment [a, b].
pub fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return x.dist(a);
    }
    let t = ((x - a).dot(d) / len2).clamp(0.0, 1.0);
    x.dist(a + d * t)
}

/// Whether the closed segments [a, b] and [c, d] come within [`GEOM_EPS`] of each other.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    point_segment_distance(c, a, b) < GEOM_EPS
        || point_segment_distance(d, a, b) < GEOM_EPS
        || point_segment_distance(a, c, d) < GEOM_EPS
        || point_segment_distance(b, c, d) < GEOM_EPS
}
