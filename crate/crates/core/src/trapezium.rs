//! The isosceles trapezium and the two networks built on it: the weighted
//! construction tree and the full Steiner tree.
//!
//! Coordinates: the axis of symmetry is the z-axis, the short side `A1'A2'`
//! (length `a12`) sits at height `d` and the side `A4A3` (length `a34`) at
//! height 0. `θ` is the angle between the diagonals at their intersection
//! `F`, fixed by `tan(θ/2) = (a12 + a34) / (2d)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{distance, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoscelesTrapezium {
    a12: f64,
    a34: f64,
    d: f64,
}

/// Two interior nodes on the symmetry axis. The top node joins `A1'` and
/// `A2'`, the bottom node joins `A3` and `A4`, and the bridge between them
/// carries `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoNodeTree {
    pub node_top: Point3,
    pub node_bottom: Point3,
    pub weight: f64,
    /// Lengths of the terminal edges to `A1'`, `A2'`, `A3`, `A4`.
    pub edges: [f64; 4],
    pub bridge: f64,
    pub total: f64,
}

impl TwoNodeTree {
    /// Network with nodes at heights `z_top` and `z_bottom` on the axis.
    pub fn on_axis(trap: &IsoscelesTrapezium, z_top: f64, z_bottom: f64, weight: f64) -> Self {
        let node_top = Point3::on_axis(z_top);
        let node_bottom = Point3::on_axis(z_bottom);
        let [t1, t2, t3, t4] = trap.terminals();
        let edges = [
            distance(&t1, &node_top),
            distance(&t2, &node_top),
            distance(&t3, &node_bottom),
            distance(&t4, &node_bottom),
        ];
        let bridge = (z_top - z_bottom).abs();
        let total = edges.iter().sum::<f64>() + weight * bridge;
        Self {
            node_top,
            node_bottom,
            weight,
            edges,
            bridge,
            total,
        }
    }
}

/// Intersection `F` of the diagonals and its distance to `M12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalIntersection {
    pub point: Point3,
    pub fm12: f64,
}

impl IsoscelesTrapezium {
    pub fn new(a12: f64, a34: f64, d: f64) -> Result<Self> {
        if ![a12, a34, d].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if a12 <= 0.0 || a34 <= 0.0 || d <= 0.0 {
            return Err(Error::InvalidTrapezium("a12, a34 and d must be positive"));
        }
        Ok(Self { a12, a34, d })
    }

    /// The member of the constant-sides class `(a12, a34)` whose diagonals
    /// meet at angle `theta`.
    pub fn from_theta(a12: f64, a34: f64, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::ThetaOutOfRange {
                degrees: theta.to_degrees(),
                range: "(0°, 180°)",
            });
        }
        Self::new(a12, a34, (a12 + a34) / (2.0 * (theta / 2.0).tan()))
    }

    pub fn a12(&self) -> f64 {
        self.a12
    }

    pub fn a34(&self) -> f64 {
        self.a34
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Sum of the parallel sides, the natural length scale.
    pub fn sides(&self) -> f64 {
        self.a12 + self.a34
    }

    /// Terminals `[A1', A2', A3, A4]`.
    pub fn terminals(&self) -> [Point3; 4] {
        let h12 = self.a12 / 2.0;
        let h34 = self.a34 / 2.0;
        [
            Point3::new(-h12, 0.0, self.d),
            Point3::new(h12, 0.0, self.d),
            Point3::new(h34, 0.0, 0.0),
            Point3::new(-h34, 0.0, 0.0),
        ]
    }

    pub fn tan_half_theta(&self) -> f64 {
        self.sides() / (2.0 * self.d)
    }

    pub fn diagonal_angle(&self) -> f64 {
        2.0 * self.tan_half_theta().atan()
    }

    pub fn diagonal_intersection(&self) -> DiagonalIntersection {
        let fm12 = self.d * self.a12 / self.sides();
        DiagonalIntersection {
            point: Point3::on_axis(self.d - fm12),
            fm12,
        }
    }

    // (cos θ/2, sin θ/2) from the exact tangent.
    fn half_angle_cos_sin(&self) -> (f64, f64) {
        let t = self.tan_half_theta();
        let r = t.hypot(1.0);
        (1.0 / r, t / r)
    }

    /// The weighted two-node construction tree with bridge weight
    /// `2 sin(θ/2)`. Its nodes are the orthocentres of the triangles `A1'FA2'`
    /// and `A4FA3`.
    pub fn construction_tree(&self) -> Result<TwoNodeTree> {
        let t = self.tan_half_theta();
        let (_, sin_half) = self.half_angle_cos_sin();
        let z_top = self.d - self.a12 / 2.0 * t;
        let z_bottom = self.a34 / 2.0 * t;
        let bridge = z_top - z_bottom;
        if bridge < -bridge_slack(self) {
            return Err(Error::DegenerateBridge { bridge });
        }
        let (z_top, z_bottom) = merge_if_touching(z_top, z_bottom, self);
        Ok(TwoNodeTree::on_axis(self, z_top, z_bottom, 2.0 * sin_half))
    }

    /// Closed-form length `2 (a12 + a34) cos(θ/2)` of the construction tree.
    pub fn construction_length(&self) -> f64 {
        2.0 * self.sides() * self.half_angle_cos_sin().0
    }

    /// The full Steiner tree pairing `(A1', A2')` and `(A3, A4)`: unit bridge
    /// weight and 120° at both nodes.
    pub fn steiner_tree(&self) -> Result<TwoNodeTree> {
        let tan30 = 30f64.to_radians().tan();
        let z_top = self.d - self.a12 / 2.0 * tan30;
        let z_bottom = self.a34 / 2.0 * tan30;
        let bridge = z_top - z_bottom;
        if bridge < -bridge_slack(self) {
            return Err(Error::TopologyCollapse { bridge });
        }
        let (z_top, z_bottom) = merge_if_touching(z_top, z_bottom, self);
        Ok(TwoNodeTree::on_axis(self, z_top, z_bottom, 1.0))
    }

    /// Closed-form Steiner length `(a12 + a34)(√3/2 + cot(θ/2)/2)`.
    pub fn steiner_length(&self) -> f64 {
        self.sides() * (3f64.sqrt() / 2.0 + 0.5 / self.tan_half_theta())
    }

    /// Weighted network length with nodes `(0,0,z_top)` and `(0,0,z_bottom)`.
    pub fn evaluate_axis_objective(&self, z_top: f64, z_bottom: f64, weight: f64) -> f64 {
        TwoNodeTree::on_axis(self, z_top, z_bottom, weight).total
    }
}

fn bridge_slack(trap: &IsoscelesTrapezium) -> f64 {
    1e-12 * trap.d.max(trap.sides())
}

fn merge_if_touching(z_top: f64, z_bottom: f64, trap: &IsoscelesTrapezium) -> (f64, f64) {
    if z_top - z_bottom <= bridge_slack(trap) {
        let mid = 0.5 * (z_top + z_bottom);
        (mid, mid)
    } else {
        (z_top, z_bottom)
    }
}

/// Bridge weight `w(θ) = 2 sin(θ/2)` for `θ ∈ (0, π)`.
pub fn node_weight(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::ThetaOutOfRange {
            degrees: theta.to_degrees(),
            range: "(0°, 180°)",
        });
    }
    Ok(2.0 * (theta / 2.0).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::angle_between;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn trap(a12: f64, a34: f64, d: f64) -> IsoscelesTrapezium {
        IsoscelesTrapezium::new(a12, a34, d).unwrap()
    }

    fn valid_trap() -> impl Strategy<Value = IsoscelesTrapezium> {
        (0.1..10.0f64, 0.1..10.0f64, 1.0..89.0f64)
            .prop_map(|(a12, a34, deg)| IsoscelesTrapezium::from_theta(a12, a34, deg.to_radians()).unwrap())
    }

    // Angle at F between the diagonals, from raw coordinates.
    fn theta_from_coordinates(t: &IsoscelesTrapezium) -> f64 {
        let [a1, a2, _, _] = t.terminals();
        let f = t.diagonal_intersection().point;
        angle_between(&(a1 - f), &(a2 - f)).unwrap()
    }

    #[test]
    fn rejects_non_positive_sides() {
        assert!(IsoscelesTrapezium::new(0.0, 1.0, 1.0).is_err());
        assert!(IsoscelesTrapezium::new(1.0, -1.0, 1.0).is_err());
        assert!(IsoscelesTrapezium::new(1.0, 1.0, 0.0).is_err());
        assert!(IsoscelesTrapezium::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn diagonal_angle_examples() {
        let t = trap(1.0, 1.0, 2.0);
        assert_abs_diff_eq!(t.diagonal_angle(), 2.0 * 0.5f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.diagonal_angle().to_degrees(), 53.130_102_354_156, epsilon = 1e-9);
        assert_abs_diff_eq!(t.diagonal_angle(), theta_from_coordinates(&t), epsilon = 1e-12);
        assert_abs_diff_eq!(trap(1.0, 1.0, 1.0).diagonal_angle(), FRAC_PI_2, epsilon = 1e-15);
        assert!(trap(1.0, 1.0, 1e6).diagonal_angle() < 1e-3);
    }

    #[test]
    fn diagonal_intersection_examples() {
        let f = trap(1.0, 1.0, 2.0).diagonal_intersection();
        assert_eq!(f.fm12, 1.0);
        assert_eq!(f.point, Point3::on_axis(1.0));
        let f = trap(1.0, 3.0, 4.0).diagonal_intersection();
        assert_eq!(f.fm12, 1.0);
        assert_eq!(f.point, Point3::on_axis(3.0));
        assert_eq!(trap(2.5, 2.5, 7.0).diagonal_intersection().fm12, 3.5);
    }

    #[test]
    fn node_weight_examples() {
        assert_abs_diff_eq!(node_weight(PI / 3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(node_weight(FRAC_PI_2).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        let theta = 2.0 * 0.5f64.atan();
        assert_abs_diff_eq!(node_weight(theta).unwrap(), 0.894_427_190_999_916, epsilon = 1e-12);
        assert!(node_weight(0.0).is_err());
        assert!(node_weight(PI).is_err());
        assert!(node_weight(-0.1).is_err());
    }

    #[test]
    fn construction_tree_examples() {
        let tree = trap(1.0, 1.0, 2.0).construction_tree().unwrap();
        assert_abs_diff_eq!(tree.node_top.z, 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(tree.node_bottom.z, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(tree.bridge, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(tree.weight, 0.894_427_190_999_916, epsilon = 1e-12);
        assert_abs_diff_eq!(tree.total, 8.0 / 5f64.sqrt(), epsilon = 1e-12);

        let square = trap(1.0, 1.0, 1.0).construction_tree().unwrap();
        assert_eq!(square.bridge, 0.0);
        assert_eq!(square.node_top, Point3::on_axis(0.5));
        assert_eq!(square.node_bottom, Point3::on_axis(0.5));
        assert_abs_diff_eq!(square.total, 2.0 * 2f64.sqrt(), epsilon = 1e-12);

        let t = trap(1.0, 3.0, 4.0);
        let tree = t.construction_tree().unwrap();
        assert_abs_diff_eq!(tree.total, 7.155_417_527_999_327, epsilon = 1e-12);
        assert_abs_diff_eq!(tree.total, t.construction_length(), epsilon = 1e-12);
    }

    #[test]
    fn crossing_construction_nodes_are_rejected() {
        // θ > 90°: the nodes would cross.
        let err = trap(1.0, 1.0, 0.8).construction_tree().unwrap_err();
        assert!(matches!(err, Error::DegenerateBridge { bridge } if bridge < 0.0));
    }

    #[test]
    fn steiner_tree_examples() {
        let tree = trap(1.0, 1.0, 2.0).steiner_tree().unwrap();
        assert_abs_diff_eq!(tree.total, 2.0 * (3f64.sqrt() / 2.0 + 1.0), epsilon = 1e-12);
        let square = trap(1.0, 1.0, 1.0).steiner_tree().unwrap();
        assert_abs_diff_eq!(square.total, 3f64.sqrt() + 1.0, epsilon = 1e-12);
        let t = trap(1.0, 3.0, 4.0);
        assert_abs_diff_eq!(t.steiner_tree().unwrap().total, 7.464_101_615_137_754, epsilon = 1e-12);
        assert_abs_diff_eq!(t.steiner_length(), 7.464_101_615_137_754, epsilon = 1e-12);
    }

    #[test]
    fn steiner_topology_collapse() {
        // θ > 120° leaves no room for the bridge.
        let t = IsoscelesTrapezium::from_theta(1.0, 1.0, 130f64.to_radians()).unwrap();
        assert!(matches!(t.steiner_tree(), Err(Error::TopologyCollapse { .. })));
    }

    #[test]
    fn axis_objective_examples() {
        let t = trap(1.0, 1.0, 2.0);
        let c = t.construction_tree().unwrap();
        assert_abs_diff_eq!(
            t.evaluate_axis_objective(c.node_top.z, c.node_bottom.z, c.weight),
            t.construction_length(),
            epsilon = 1e-12
        );
        let s = t.steiner_tree().unwrap();
        assert_abs_diff_eq!(
            t.evaluate_axis_objective(s.node_top.z, s.node_bottom.z, 1.0),
            t.steiner_length(),
            epsilon = 1e-12
        );
        // Both nodes at F: four half-diagonals, bridge term vanishes.
        let fz = t.diagonal_intersection().point.z;
        let half_diagonals = 2.0 * 0.5f64.hypot(1.0) * 2.0;
        for w in [0.1, 1.0, 1.9] {
            assert_abs_diff_eq!(t.evaluate_axis_objective(fz, fz, w), half_diagonals, epsilon = 1e-12);
        }
    }

    fn unit(v: Point3) -> Point3 {
        v.normalized().unwrap()
    }

    fn node_balance(t: &IsoscelesTrapezium, tree: &TwoNodeTree) -> f64 {
        let [a1, a2, a3, a4] = t.terminals();
        let (top, bot) = (tree.node_top, tree.node_bottom);
        let r_top = unit(a1 - top) + unit(a2 - top) + unit(bot - top) * tree.weight;
        let r_bot = unit(a3 - bot) + unit(a4 - bot) + unit(top - bot) * tree.weight;
        r_top.norm().max(r_bot.norm())
    }

    proptest! {
        #[test]
        fn componentwise_length_identity(t in valid_trap()) {
            let theta = t.diagonal_angle();
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let bridge = t.d() - t.sides() / 2.0 * (theta / 2.0).tan();
            let lhs = 2.0 * t.a12() / (2.0 * c) + 2.0 * t.a34() / (2.0 * c) + 2.0 * s * bridge;
            prop_assert!((lhs - 2.0 * t.sides() * c).abs() < 1e-12 * t.sides().max(1.0) * 10.0);
            let tree = t.construction_tree().unwrap();
            prop_assert!((tree.total - t.construction_length()).abs() <= 1e-12 * tree.total.max(1.0));
            let sum = tree.edges.iter().sum::<f64>() + tree.weight * tree.bridge;
            prop_assert!((tree.total - sum).abs() <= 1e-12 * tree.total.max(1.0));
            prop_assert!(tree.bridge >= 0.0);
        }

        #[test]
        fn theta_matches_diagonal_geometry(t in valid_trap()) {
            prop_assert!((t.diagonal_angle() - theta_from_coordinates(&t)).abs() < 1e-12);
            let f = t.diagonal_intersection().point;
            let [a1, a2, a3, a4] = t.terminals();
            // F on both diagonals A1'A3 and A2'A4.
            let c1 = (a3 - a1).cross(&(f - a1)).norm() / (a3 - a1).norm();
            let c2 = (a4 - a2).cross(&(f - a2)).norm() / (a4 - a2).norm();
            prop_assert!(c1 < 1e-12 * t.d().max(1.0) && c2 < 1e-12 * t.d().max(1.0));
        }

        #[test]
        fn construction_nodes_balance_forces(t in valid_trap()) {
            let tree = t.construction_tree().unwrap();
            prop_assert!(node_balance(&t, &tree) < 1e-10);
        }

        #[test]
        fn steiner_nodes_have_120_degree_angles(t in valid_trap()) {
            let tree = t.steiner_tree().unwrap();
            prop_assert!((tree.total - t.steiner_length()).abs() <= 1e-12 * tree.total.max(1.0));
            let [a1, a2, a3, a4] = t.terminals();
            let (top, bot) = (tree.node_top, tree.node_bottom);
            let third = 2.0 * PI / 3.0;
            for (p, q, r) in [(top, a1, a2), (bot, a3, a4)] {
                let other = if p == top { bot } else { top };
                let angles = [
                    angle_between(&(q - p), &(r - p)).unwrap(),
                    angle_between(&(q - p), &(other - p)).unwrap(),
                    angle_between(&(r - p), &(other - p)).unwrap(),
                ];
                for a in angles {
                    prop_assert!((a - third).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn scale_equivariance(t in valid_trap(), lambda in 0.01..100.0f64) {
            let s = IsoscelesTrapezium::new(t.a12() * lambda, t.a34() * lambda, t.d() * lambda).unwrap();
            prop_assert!((s.diagonal_angle() - t.diagonal_angle()).abs() < 1e-12);
            let (ct, cs) = (t.construction_tree().unwrap(), s.construction_tree().unwrap());
            prop_assert!((ct.weight - cs.weight).abs() < 1e-12);
            prop_assert!((cs.total - lambda * ct.total).abs() <= 1e-12 * cs.total);
            prop_assert!((s.steiner_length() - lambda * t.steiner_length()).abs() <= 1e-12 * s.steiner_length());
        }

        #[test]
        fn construction_nodes_are_a_local_minimum(t in valid_trap()) {
            let tree = t.construction_tree().unwrap();
            let (zt, zb, w) = (tree.node_top.z, tree.node_bottom.z, tree.weight);
            let h = 1e-4 * t.d().min(t.sides());
            let f0 = t.evaluate_axis_objective(zt, zb, w);
            let second = |dt: f64, db: f64| {
                t.evaluate_axis_objective(zt + dt, zb + db, w) - 2.0 * f0
                    + t.evaluate_axis_objective(zt - dt, zb - db, w)
            };
            prop_assert!(second(h, 0.0) > 0.0);
            prop_assert!(second(0.0, h) > 0.0);
        }
    }
}
