//! Minimum networks for boundary-symmetric tetrahedra.
//!
//! A tetrahedron whose two opposite edges have their common perpendicular
//! through both midpoints reduces, by a rotation about that perpendicular,
//! to an isosceles trapezium. On the trapezium two networks with nodes on
//! the symmetry axis are compared: the construction tree with bridge weight
//! `2 sin(θ/2)` and the full Steiner tree. [`oracle`] checks every closed
//! form against direct numerical minimization.

pub mod batch;
pub mod comparison;
pub mod error;
pub mod geom;
pub mod oracle;
pub mod poly;
pub mod sampling;
pub mod tetra;
pub mod trapezium;
pub mod verify;

pub use comparison::{
    classify, crossover_quartic_roots, gap, rectangle_lengths, square_lengths, stationary_angle, Classification,
    ComparisonReport,
};
pub use error::{Error, Result};
pub use geom::{angle_between, distance, rotate_about_axis, Axis, Point3};
pub use tetra::SymmetricTetrahedron;
pub use trapezium::{node_weight, IsoscelesTrapezium, TwoNodeTree};
