//! Boundary-symmetric tetrahedra and their reduction to an isosceles
//! trapezium.
//!
//! A tetrahedron `A1A2A3A4` is boundary symmetric when the segment joining
//! the midpoints `M12` of `A1A2` and `M34` of `A4A3` is perpendicular to
//! both edges. In the canonical frame `M34` is the origin, `M12 = (0,0,z1)`
//! and
//!
//! ```text
//! A1 = (-x1, -y1, z1)   A2 = (x1, y1, z1)
//! A4 = (-x4,   0,  0)   A3 = (x4,  0,  0)
//! ```
//!
//! Rotating the edge `A1A2` about the axis `M12M34` by the twist angle
//! brings it parallel to `A4A3`, which yields the isosceles trapezium
//! `A1'A2'A3A4` with the same axis-restricted network lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_between, distance, rotate_about_axis, Axis, Point3};
use crate::trapezium::IsoscelesTrapezium;

/// Relative tolerance on the midpoint-perpendicularity residual.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTetrahedron {
    x1: f64,
    y1: f64,
    z1: f64,
    x4: f64,
}

/// Result of recognizing a boundary-symmetric tetrahedron in arbitrary
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical {
    pub tetra: SymmetricTetrahedron,
    /// `labels[k]` is the input index playing the role of `A(k+1)`.
    pub labels: [usize; 4],
    /// Perpendicularity residual of the chosen edge pair, relative to the
    /// squared diameter.
    pub residual: f64,
}

// Opposite-edge pairs as input indices for the roles (A1, A2, A3, A4).
const EDGE_PAIRS: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];

impl SymmetricTetrahedron {
    /// Canonical parameters. Requires `x1 >= 0`, `(x1, y1) != (0, 0)`,
    /// `z1 > 0` and `x4 > 0`.
    pub fn new(x1: f64, y1: f64, z1: f64, x4: f64) -> Result<Self> {
        if ![x1, y1, z1, x4].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if x4 <= 0.0 {
            return Err(Error::InvalidTetrahedron("x4 must be positive"));
        }
        if z1 <= 0.0 {
            return Err(Error::InvalidTetrahedron("z1 must be positive"));
        }
        if x1 < 0.0 {
            return Err(Error::InvalidTetrahedron("x1 must be non-negative"));
        }
        if x1 == 0.0 && y1 == 0.0 {
            return Err(Error::InvalidTetrahedron("A1 and A2 coincide"));
        }
        Ok(Self { x1, y1, z1, x4 })
    }

    /// Recognizes the symmetry in arbitrary coordinates and moves the
    /// tetrahedron rigidly into the canonical frame.
    pub fn from_general_vertices(a1: Point3, a2: Point3, a3: Point3, a4: Point3) -> Result<Self> {
        canonicalize(&[a1, a2, a3, a4]).map(|c| c.tetra)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn x4(&self) -> f64 {
        self.x4
    }

    pub fn a12(&self) -> f64 {
        2.0 * self.x1.hypot(self.y1)
    }

    pub fn a34(&self) -> f64 {
        2.0 * self.x4
    }

    /// Length of the common perpendicular `M12M34`.
    pub fn d(&self) -> f64 {
        self.z1
    }

    /// Whether `d > max{a12, a34}` holds. Configurations violating it are
    /// still accepted.
    pub fn satisfies_standing_assumption(&self) -> bool {
        self.d() > self.a12().max(self.a34())
    }

    /// Vertices `[A1, A2, A3, A4]`.
    pub fn vertices(&self) -> [Point3; 4] {
        [
            Point3::new(-self.x1, -self.y1, self.z1),
            Point3::new(self.x1, self.y1, self.z1),
            Point3::new(self.x4, 0.0, 0.0),
            Point3::new(-self.x4, 0.0, 0.0),
        ]
    }

    pub fn m12(&self) -> Point3 {
        Point3::on_axis(self.z1)
    }

    pub fn m34(&self) -> Point3 {
        Point3::ORIGIN
    }

    /// The symmetry axis, oriented from `M12` to `M34`.
    pub fn axis(&self) -> Axis {
        Axis::through(self.m12(), self.m34()).expect("z1 > 0")
    }

    /// Angle between the opposite edges `A1A2` and `A4A3`, in `[0, π/2]`.
    pub fn twist_angle(&self) -> f64 {
        (self.x1 / self.x1.hypot(self.y1)).clamp(-1.0, 1.0).acos()
    }

    /// `A1'` and `A2'`: the top edge rotated about the axis until it is
    /// parallel to `A4A3`.
    pub fn rotated_top_vertices(&self) -> [Point3; 2] {
        // Signed azimuth of A2; rotating about the downward axis by it
        // sends A2 to the +x half-plane.
        let azimuth = self.y1.atan2(self.x1);
        let axis = self.axis();
        let [a1, a2, _, _] = self.vertices();
        [
            rotate_about_axis(&a1, &axis, azimuth),
            rotate_about_axis(&a2, &axis, azimuth),
        ]
    }

    pub fn reduce_to_trapezium(&self) -> Result<IsoscelesTrapezium> {
        IsoscelesTrapezium::new(self.a12(), self.a34(), self.d())
    }
}

/// Finds the opposite-edge pair whose midpoint segment is perpendicular to
/// both edges and expresses the tetrahedron in the canonical frame of that
/// pair.
///
/// Every pair under [`SYMMETRY_TOLERANCE`] counts as a tie; ties go to the
/// lexicographically first pair so that the result does not depend on
/// round-off.
pub fn canonicalize(vertices: &[Point3; 4]) -> Result<Canonical> {
    if !vertices.iter().all(Point3::is_finite) {
        return Err(Error::NonFinite);
    }
    let mut diameter: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let dij = distance(&vertices[i], &vertices[j]);
            if dij == 0.0 {
                return Err(Error::InvalidTetrahedron("vertices must be distinct"));
            }
            diameter = diameter.max(dij);
        }
    }

    let residuals = EDGE_PAIRS.map(|roles| pair_residual(vertices, roles, diameter));
    let best = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let Some(choice) = residuals.iter().position(|&r| r <= SYMMETRY_TOLERANCE) else {
        return Err(Error::NotBoundarySymmetric { residual: best });
    };

    let mut labels = EDGE_PAIRS[choice];
    let [a1, a2, a3, a4] = labels.map(|i| vertices[i]);
    let m12 = a1.midpoint(&a2);
    let m34 = a4.midpoint(&a3);
    let ez = (m12 - m34).normalized()?;
    let bottom = a3 - a4;
    let ex = (bottom - ez * bottom.dot(&ez)).normalized()?;
    let ey = ez.cross(&ex);

    let half_top = (a2 - a1) * 0.5;
    let mut x1 = half_top.dot(&ex);
    let mut y1 = half_top.dot(&ey);
    if x1 < 0.0 {
        // Relabel A1 <-> A2 so the twist angle stays in [0, π/2].
        labels.swap(0, 1);
        x1 = -x1;
        y1 = -y1;
    }
    let tetra = SymmetricTetrahedron::new(x1, y1, (m12 - m34).norm(), 0.5 * bottom.norm())?;
    Ok(Canonical {
        tetra,
        labels,
        residual: residuals[choice],
    })
}

fn pair_residual(v: &[Point3; 4], roles: [usize; 4], diameter: f64) -> f64 {
    let [a1, a2, a3, a4] = roles.map(|i| v[i]);
    let link = a1.midpoint(&a2) - a4.midpoint(&a3);
    if link.norm() <= 1e-12 * diameter {
        // Midpoints coincide (crossing diagonals); no axis.
        return f64::INFINITY;
    }
    let top = link.dot(&(a2 - a1)).abs();
    let bottom = link.dot(&(a3 - a4)).abs();
    top.max(bottom) / (diameter * diameter)
}

/// Twist angle computed directly from the edge vectors of the canonical
/// vertices.
pub fn twist_angle_from_edges(t: &SymmetricTetrahedron) -> f64 {
    let [a1, a2, a3, a4] = t.vertices();
    angle_between(&(a2 - a1), &(a3 - a4)).expect("edges have positive length")
}
