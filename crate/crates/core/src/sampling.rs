//! Seeded random configurations for sweeps and verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{rotate_about_axis, Axis, Point3};
use crate::tetra::SymmetricTetrahedron;
use crate::trapezium::IsoscelesTrapezium;

pub type CaseRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sides uniform in `[0.1, 10]`, diagonal angle uniform in `(1°, 89°)`,
/// height from `tan(θ/2) = (a12 + a34) / (2d)`.
pub fn random_trapezium(rng: &mut impl Rng) -> IsoscelesTrapezium {
    let a12 = rng.random_range(0.1..=10.0);
    let a34 = rng.random_range(0.1..=10.0);
    let theta = rng.random_range(1.0f64..89.0).to_radians();
    IsoscelesTrapezium::from_theta(a12, a34, theta).expect("sampled parameters are valid")
}

/// Boundary-symmetric tetrahedron with `d > max{a12, a34}` and a twist
/// angle uniform in `[0°, 90°)`.
pub fn random_tetrahedron(rng: &mut impl Rng) -> SymmetricTetrahedron {
    let a12: f64 = rng.random_range(0.1..=10.0);
    let a34: f64 = rng.random_range(0.1..=10.0);
    let d = a12.max(a34) * rng.random_range(1.01..4.0);
    let twist = rng.random_range(0.0f64..90.0).to_radians();
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    SymmetricTetrahedron::new(0.5 * a12 * twist.cos(), sign * 0.5 * a12 * twist.sin(), d, 0.5 * a34)
        .expect("sampled parameters are valid")
}

/// A proper rigid motion: rotation about a random axis through the origin,
/// then translation.
#[derive(Debug, Clone, Copy)]
pub struct RigidMotion {
    axis: Axis,
    angle: f64,
    shift: Point3,
}

impl RigidMotion {
    pub fn random(rng: &mut impl Rng) -> Self {
        let dir = loop {
            let v = Point3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm() > 0.1 {
                break v;
            }
        };
        Self {
            axis: Axis::new(Point3::ORIGIN, dir).expect("nonzero direction"),
            angle: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            shift: Point3::new(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            ),
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        rotate_about_axis(p, &self.axis, self.angle) + self.shift
    }
}
