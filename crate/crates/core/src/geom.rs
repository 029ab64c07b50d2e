//! 3D points, distances, angles and rotation about a line.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or free vector) in 3D Euclidean space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point on the symmetry axis at height `z`.
    pub const fn on_axis(z: f64) -> Self {
        Self { x: 0.0, y: 0.0, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn normalized(&self) -> Result<Point3> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroLengthVector);
        }
        Ok(*self / n)
    }

    pub fn midpoint(&self, other: &Point3) -> Point3 {
        (*self + *other) * 0.5
    }

    pub(crate) fn to_vector(self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.x, self.y, self.z)
    }

    pub(crate) fn from_vector(v: &nalgebra::Vector3<f64>) -> Point3 {
        Point3::new(v.x, v.y, v.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// An oriented line: a point on it and a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    origin: Point3,
    direction: Point3,
}

impl Axis {
    /// Builds an axis, normalizing `direction`.
    pub fn new(origin: Point3, direction: Point3) -> Result<Self> {
        Ok(Self {
            origin,
            direction: direction.normalized()?,
        })
    }

    /// The line through `from` and `to`, oriented from `from` towards `to`.
    pub fn through(from: Point3, to: Point3) -> Result<Self> {
        Self::new(from, to - from)
    }

    pub fn z() -> Self {
        Self {
            origin: Point3::ORIGIN,
            direction: Point3::new(0.0, 0.0, 1.0),
        }
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn direction(&self) -> Point3 {
        self.direction
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        self.origin + self.direction * t
    }

    /// Signed coordinate of the orthogonal projection of `p` onto the axis.
    pub fn project(&self, p: &Point3) -> f64 {
        (*p - self.origin).dot(&self.direction)
    }

    pub fn distance_to(&self, p: &Point3) -> f64 {
        let rel = *p - self.origin;
        (rel - self.direction * rel.dot(&self.direction)).norm()
    }
}

pub fn distance(p: &Point3, q: &Point3) -> f64 {
    (*p - *q).norm()
}

/// Angle in `[0, π]` between two nonzero vectors.
pub fn angle_between(u: &Point3, v: &Point3) -> Result<f64> {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroLengthVector);
    }
    let c = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(c.acos())
}

/// Rotates `p` by `angle` radians about `axis` (right-hand rule about the
/// axis direction).
pub fn rotate_about_axis(p: &Point3, axis: &Axis, angle: f64) -> Point3 {
    // Rodrigues' formula on the offset from the axis origin.
    let k = axis.direction;
    let v = *p - axis.origin;
    let (s, c) = angle.sin_cos();
    let rotated = v * c + k.cross(&v) * s + k * (k.dot(&v) * (1.0 - c));
    axis.origin + rotated
}
