//! Direct minimization of the two-node network objective
//!
//! ```text
//! B1|A1 - P| + B2|A2 - P| + B3|A3 - Q| + B4|A4 - Q| + w|P - Q|
//! ```
//!
//! over the node pair `(P, Q)`, by alternating exact block minimization.

use std::ops::AddAssign;

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use super::ft::{weighted_median, FtOptions};
use crate::error::{Error, Result};
use crate::geom::{distance, Axis, Point3};
use crate::poly::bisect;
use crate::trapezium::TwoNodeTree;

/// Four terminals; `terminals[0..2]` hang off the top node and
/// `terminals[2..4]` off the bottom node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkProblem {
    terminals: [Point3; 4],
    terminal_weights: [f64; 4],
    bridge_weight: f64,
}

impl NetworkProblem {
    /// Rejects weights for which a node cannot be an interior weighted
    /// Fermat-Torricelli point: each node's triple `(B_i, B_j, w)` must
    /// satisfy `|B_i - B_j| < B_k < B_i + B_j` in every arrangement.
    pub fn new(terminals: [Point3; 4], terminal_weights: [f64; 4], bridge_weight: f64) -> Result<Self> {
        if !terminals.iter().all(Point3::is_finite) {
            return Err(Error::NonFinite);
        }
        let all = [terminal_weights.as_slice(), &[bridge_weight]].concat();
        if !all.iter().all(|w| *w > 0.0 && w.is_finite()) {
            return Err(Error::InfeasibleWeights("weights must be positive and finite".into()));
        }
        for (name, [a, b]) in [
            ("top", [terminal_weights[0], terminal_weights[1]]),
            ("bottom", [terminal_weights[2], terminal_weights[3]]),
        ] {
            if !strict_triangle(a, b, bridge_weight) {
                return Err(Error::InfeasibleWeights(format!(
                    "{name} node weights ({a}, {b}, {bridge_weight})"
                )));
            }
        }
        Ok(Self {
            terminals,
            terminal_weights,
            bridge_weight,
        })
    }

    /// Unit terminal weights.
    pub fn unit(terminals: [Point3; 4], bridge_weight: f64) -> Result<Self> {
        Self::new(terminals, [1.0; 4], bridge_weight)
    }

    pub fn terminals(&self) -> &[Point3; 4] {
        &self.terminals
    }

    pub fn terminal_weights(&self) -> &[f64; 4] {
        &self.terminal_weights
    }

    pub fn bridge_weight(&self) -> f64 {
        self.bridge_weight
    }

    pub fn objective(&self, top: &Point3, bottom: &Point3) -> f64 {
        let t = &self.terminals;
        let b = &self.terminal_weights;
        b[0] * distance(&t[0], top)
            + b[1] * distance(&t[1], top)
            + b[2] * distance(&t[2], bottom)
            + b[3] * distance(&t[3], bottom)
            + self.bridge_weight * distance(top, bottom)
    }

    /// Line through the midpoints of the two terminal pairs, oriented top to
    /// bottom.
    pub fn axis(&self) -> Result<Axis> {
        let t = &self.terminals;
        Axis::through(t[0].midpoint(&t[1]), t[2].midpoint(&t[3]))
    }

    fn scale(&self) -> f64 {
        let t = &self.terminals;
        let mut s: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                s = s.max(distance(&t[i], &t[j]));
            }
        }
        s
    }
}

fn strict_triangle(a: f64, b: f64, c: f64) -> bool {
    (a - b).abs() < c && c < a + b && (a - c).abs() < b && b < a + c && (b - c).abs() < a && a < b + c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Cap on outer (two-block) iterations.
    pub max_iterations: usize,
    /// Stop once the objective drops by less than this fraction...
    pub relative_decrease: f64,
    /// ...and both nodes move less than this fraction of the terminal
    /// diameter.
    pub step_tolerance: f64,
    /// Central-difference step for the gradient residual.
    pub fd_step: f64,
    /// `converged` requires the gradient residual below this.
    pub gradient_tolerance: f64,
    pub ft: FtOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            relative_decrease: 1e-13,
            step_tolerance: 1e-12,
            fd_step: 1e-7,
            gradient_tolerance: 1e-6,
            ft: FtOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub node_top: Point3,
    pub node_bottom: Point3,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_residual: f64,
    /// Objective after the initialization and after every accepted update.
    pub history: Vec<f64>,
}

/// Minimizes the network objective, either with both nodes free in 3D or
/// with both nodes restricted to the axis through the pair midpoints.
pub fn minimize_two_node_network(prob: &NetworkProblem, constrain_to_axis: bool) -> Result<OracleResult> {
    minimize_two_node_network_with(prob, constrain_to_axis, &OracleOptions::default())
}

pub fn minimize_two_node_network_with(
    prob: &NetworkProblem,
    constrain_to_axis: bool,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let result = run_alternating(prob, constrain_to_axis, opts)?;
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NonConvergence {
            iterations: result.iterations,
            residual: result.gradient_residual,
        })
    }
}

/// Like [`minimize_two_node_network_with`] but returns the final iterate
/// even when it is not certified.
pub fn run_alternating(prob: &NetworkProblem, constrain_to_axis: bool, opts: &OracleOptions) -> Result<OracleResult> {
    let axis = prob.axis()?;
    let length = distance(
        &prob.terminals[0].midpoint(&prob.terminals[1]),
        &prob.terminals[2].midpoint(&prob.terminals[3]),
    );
    let scale = prob.scale();

    // Nodes start at the one-third and two-thirds points of the axis segment.
    let mut top = axis.point_at(length / 3.0);
    let mut bottom = axis.point_at(2.0 * length / 3.0);
    let mut value = prob.objective(&top, &bottom);
    let mut history = vec![value];
    let mut iterations = 0;

    let t = &prob.terminals;
    let b = &prob.terminal_weights;
    let w = prob.bridge_weight;
    let merge_tolerance = 1e-9 * scale;

    // Block descent can stall where the nodes meet, since the objective is
    // not smooth there. Such a stall is either certified as a merged optimum
    // or split apart and resumed.
    let mut merged_residual = None;
    for _ in 0..4 {
        while iterations < opts.max_iterations {
            iterations += 1;
            let (prev_top, prev_bottom, prev_value) = (top, bottom, value);

            let new_top = if constrain_to_axis {
                minimize_on_axis(&axis, &[t[0], t[1], bottom], &[b[0], b[1], w])
            } else {
                weighted_median(&[t[0], t[1], bottom], &[b[0], b[1], w], Some(top), &opts.ft).map_or(top, |s| s.point)
            };
            if prob.objective(&new_top, &bottom) <= value {
                top = new_top;
                value = prob.objective(&top, &bottom);
            }

            let new_bottom = if constrain_to_axis {
                minimize_on_axis(&axis, &[t[2], t[3], top], &[b[2], b[3], w])
            } else {
                weighted_median(&[t[2], t[3], top], &[b[2], b[3], w], Some(bottom), &opts.ft)
                    .map_or(bottom, |s| s.point)
            };
            if prob.objective(&top, &new_bottom) <= value {
                bottom = new_bottom;
                value = prob.objective(&top, &bottom);
            }
            history.push(value);

            let decrease = prev_value - value;
            let step = distance(&top, &prev_top).max(distance(&bottom, &prev_bottom));
            if decrease <= opts.relative_decrease * value.abs() && step <= opts.step_tolerance * scale {
                break;
            }
        }

        if distance(&top, &bottom) > merge_tolerance {
            break;
        }
        let star = if constrain_to_axis {
            minimize_on_axis(&axis, t, b)
        } else {
            weighted_median(t, b, Some(top.midpoint(&bottom)), &opts.ft).map_or(top, |s| s.point)
        };
        let restrict = |v: Point3| {
            if constrain_to_axis {
                axis.direction() * v.dot(&axis.direction())
            } else {
                v
            }
        };
        let pull = |i: usize| (t[i] - star).normalized().map_or(Point3::ORIGIN, |u| u * b[i]);
        let top_pull = restrict(pull(0) + pull(1));
        let bottom_pull = restrict(pull(2) + pull(3));
        let star_value = prob.objective(&star, &star);
        if star_value <= value {
            top = star;
            bottom = star;
            value = star_value;
            history.push(value);
        }
        if top_pull.norm() <= w {
            // Subgradient certificate: the bridge can carry the imbalance.
            merged_residual = Some((top_pull + bottom_pull).norm());
            break;
        }
        let split = top_pull.normalized().map_or(axis.direction(), |u| u) * (1e-6 * scale);
        top = star + split;
        bottom = star - split;
        value = prob.objective(&top, &bottom);
        history.push(value);
    }

    let mut residual = match merged_residual {
        Some(r) => r,
        None => gradient_residual(prob, &axis, &top, &bottom, constrain_to_axis, opts.fd_step),
    };
    if merged_residual.is_none() && !constrain_to_axis && residual > opts.gradient_tolerance {
        if let Some((pt, pb)) = joint_newton(prob, top, bottom) {
            top = pt;
            bottom = pb;
            value = prob.objective(&top, &bottom);
            history.push(value);
            residual = gradient_residual(prob, &axis, &top, &bottom, false, opts.fd_step);
        }
    }

    Ok(OracleResult {
        node_top: top,
        node_bottom: bottom,
        value,
        iterations,
        converged: residual < opts.gradient_tolerance,
        gradient_residual: residual,
        history,
    })
}

/// Minimizer of `Σ w_i |a(t) - p_i|` over the axis parameter `t`. The
/// derivative is nondecreasing, so bisect on its sign.
fn minimize_on_axis(axis: &Axis, points: &[Point3], weights: &[f64]) -> Point3 {
    let dir = axis.direction();
    let slope = |t: f64| -> f64 {
        let x = axis.point_at(t);
        points
            .iter()
            .zip(weights)
            .map(|(p, w)| {
                let d = x - *p;
                let r = d.norm();
                if r > 0.0 {
                    w * d.dot(&dir) / r
                } else {
                    0.0
                }
            })
            .sum()
    };
    let proj: Vec<f64> = points.iter().map(|p| axis.project(p)).collect();
    let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = (hi - lo).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let (s_lo, s_hi) = (slope(lo), slope(hi));
    let t = if s_lo >= 0.0 {
        lo
    } else if s_hi <= 0.0 {
        hi
    } else {
        bisect(slope, lo, hi)
    };
    axis.point_at(t)
}

/// Central-difference gradient norm of the objective, over all six node
/// coordinates or, when constrained, over the two axis parameters.
pub fn gradient_residual(
    prob: &NetworkProblem,
    axis: &Axis,
    top: &Point3,
    bottom: &Point3,
    constrain_to_axis: bool,
    h: f64,
) -> f64 {
    let directions: Vec<Point3> = if constrain_to_axis {
        vec![axis.direction()]
    } else {
        vec![
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ]
    };
    let mut sq = 0.0;
    for e in &directions {
        let step = *e * h;
        let dt = (prob.objective(&(*top + step), bottom) - prob.objective(&(*top - step), bottom)) / (2.0 * h);
        let db = (prob.objective(top, &(*bottom + step)) - prob.objective(top, &(*bottom - step))) / (2.0 * h);
        sq += dt * dt + db * db;
    }
    sq.sqrt()
}

type Vec6 = SVector<f64, 6>;
type Mat6 = SMatrix<f64, 6, 6>;

/// Newton iterations on both nodes jointly, with backtracking so the
/// objective never increases. Only applies when no node touches a terminal
/// or the other node.
fn joint_newton(prob: &NetworkProblem, mut top: Point3, mut bottom: Point3) -> Option<(Point3, Point3)> {
    let mut value = prob.objective(&top, &bottom);
    let mut improved = false;
    for _ in 0..100 {
        let (g, h) = derivatives(prob, &top, &bottom)?;
        if g.norm() < 1e-14 {
            break;
        }
        let step = h.cholesky()?.solve(&-g);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let nt = top + Point3::new(step[0], step[1], step[2]) * alpha;
            let nb = bottom + Point3::new(step[3], step[4], step[5]) * alpha;
            let nv = prob.objective(&nt, &nb);
            if nv < value {
                top = nt;
                bottom = nb;
                value = nv;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        improved = true;
    }
    improved.then_some((top, bottom))
}

fn derivatives(prob: &NetworkProblem, top: &Point3, bottom: &Point3) -> Option<(Vec6, Mat6)> {
    let mut g = Vec6::zeros();
    let mut h = Mat6::zeros();
    let mut add_term = |x: &Point3, p: &Point3, w: f64, block: usize| -> Option<()> {
        let d = *x - *p;
        let r = d.norm();
        if r <= 1e-14 {
            return None;
        }
        let u = d.to_vector() / r;
        let k = (nalgebra::Matrix3::identity() - u * u.transpose()) * (w / r);
        g.fixed_rows_mut::<3>(block).add_assign(&(u * w));
        h.fixed_view_mut::<3, 3>(block, block).add_assign(&k);
        Some(())
    };
    let t = &prob.terminals;
    let b = &prob.terminal_weights;
    add_term(top, &t[0], b[0], 0)?;
    add_term(top, &t[1], b[1], 0)?;
    add_term(bottom, &t[2], b[2], 3)?;
    add_term(bottom, &t[3], b[3], 3)?;

    let d = *top - *bottom;
    let r = d.norm();
    if r <= 1e-14 {
        return None;
    }
    let u = d.to_vector() / r;
    let w = prob.bridge_weight;
    let k = (nalgebra::Matrix3::identity() - u * u.transpose()) * (w / r);
    g.fixed_rows_mut::<3>(0).add_assign(&(u * w));
    g.fixed_rows_mut::<3>(3).add_assign(&(-u * w));
    h.fixed_view_mut::<3, 3>(0, 0).add_assign(&k);
    h.fixed_view_mut::<3, 3>(3, 3).add_assign(&k);
    h.fixed_view_mut::<3, 3>(0, 3).add_assign(&-k);
    h.fixed_view_mut::<3, 3>(3, 0).add_assign(&-k);
    Some((g, h))
}

/// Largest force imbalance over the two nodes: the sum of unit vectors to
/// the node's terminals plus `weight` times the unit vector along the
/// bridge. With a zero-length bridge the merged node must balance all four
/// terminal pulls instead.
pub fn first_order_residual(tree: &TwoNodeTree, terminals: &[Point3; 4]) -> f64 {
    let unit = |from: &Point3, to: &Point3| (*to - *from).normalized().unwrap_or(Point3::ORIGIN);
    let (top, bottom) = (&tree.node_top, &tree.node_bottom);
    if distance(top, bottom) == 0.0 {
        let pull = terminals.iter().fold(Point3::ORIGIN, |acc, t| acc + unit(top, t));
        return pull.norm();
    }
    let r_top = unit(top, &terminals[0]) + unit(top, &terminals[1]) + unit(top, bottom) * tree.weight;
    let r_bottom = unit(bottom, &terminals[2]) + unit(bottom, &terminals[3]) + unit(bottom, top) * tree.weight;
    r_top.norm().max(r_bottom.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::angle_between;
    use crate::tetra::SymmetricTetrahedron;
    use crate::trapezium::IsoscelesTrapezium;
    use approx::assert_abs_diff_eq;

    fn trapezium_problem(a12: f64, a34: f64, d: f64, w: f64) -> (IsoscelesTrapezium, NetworkProblem) {
        let t = IsoscelesTrapezium::new(a12, a34, d).unwrap();
        let p = NetworkProblem::unit(t.terminals(), w).unwrap();
        (t, p)
    }

    #[test]
    fn weight_feasibility() {
        let t = IsoscelesTrapezium::new(1.0, 1.0, 2.0).unwrap().terminals();
        assert!(NetworkProblem::unit(t, 1.0).is_ok());
        assert!(NetworkProblem::unit(t, 2.0).is_err());
        assert!(NetworkProblem::unit(t, 0.0).is_err());
        assert!(NetworkProblem::new(t, [1.0, 3.0, 1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn construction_tree_is_recovered() {
        let w = 2.0 * 0.5f64.atan().sin();
        let (t, p) = trapezium_problem(1.0, 1.0, 2.0, w);
        let r = minimize_two_node_network(&p, false).unwrap();
        assert_abs_diff_eq!(r.value, 8.0 / 5f64.sqrt(), epsilon = 1e-9);
        let c = t.construction_tree().unwrap();
        assert!(distance(&r.node_top, &c.node_top) < 1e-7);
        assert!(distance(&r.node_bottom, &c.node_bottom) < 1e-7);
        assert!(r.node_top.x.hypot(r.node_top.y) < 1e-7);
    }

    #[test]
    fn steiner_tree_is_recovered_with_120_degree_nodes() {
        let (t, p) = trapezium_problem(1.0, 1.0, 2.0, 1.0);
        let r = minimize_two_node_network(&p, false).unwrap();
        assert_abs_diff_eq!(r.value, t.steiner_length(), epsilon = 1e-9);
        let [a1, a2, _, _] = t.terminals();
        let top = r.node_top;
        for (u, v) in [(a1, a2), (a1, r.node_bottom), (a2, r.node_bottom)] {
            let angle = angle_between(&(u - top), &(v - top)).unwrap();
            assert_abs_diff_eq!(angle.to_degrees(), 120.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn tetrahedron_matches_its_trapezium() {
        let tetra = SymmetricTetrahedron::new(0.3, 0.4, 2.0, 0.5).unwrap();
        let trap = tetra.reduce_to_trapezium().unwrap();
        let w = 2.0 * (trap.diagonal_angle() / 2.0).sin();
        let p = NetworkProblem::unit(tetra.vertices(), w).unwrap();
        let r = minimize_two_node_network(&p, false).unwrap();
        assert_abs_diff_eq!(r.value, 3.577_708_763_999_664, epsilon = 1e-9);
        assert!(tetra.axis().distance_to(&r.node_top) < 1e-7);
        assert!(tetra.axis().distance_to(&r.node_bottom) < 1e-7);
    }

    #[test]
    fn axis_constrained_matches_unconstrained() {
        let w = 2.0 * 0.5f64.atan().sin();
        let (t, p) = trapezium_problem(1.0, 3.0, 4.0, w);
        let r = minimize_two_node_network(&p, true).unwrap();
        assert_abs_diff_eq!(r.value, t.construction_length(), epsilon = 1e-12);
        let c = t.construction_tree().unwrap();
        assert_abs_diff_eq!(r.node_top.z, c.node_top.z, epsilon = 1e-12);
        assert_abs_diff_eq!(r.node_bottom.z, c.node_bottom.z, epsilon = 1e-12);
    }

    #[test]
    fn history_is_monotone() {
        let tetra = SymmetricTetrahedron::new(0.9, -0.2, 3.0, 0.3).unwrap();
        let p = NetworkProblem::unit(tetra.vertices(), 1.3).unwrap();
        let r = minimize_two_node_network(&p, false).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn first_order_residuals() {
        let t = IsoscelesTrapezium::new(1.0, 1.0, 2.0).unwrap();
        let terminals = t.terminals();
        let c = t.construction_tree().unwrap();
        assert!(first_order_residual(&c, &terminals) < 1e-10);
        let s = t.steiner_tree().unwrap();
        assert!(first_order_residual(&s, &terminals) < 1e-10);

        let moved = TwoNodeTree::on_axis(&t, c.node_top.z + 0.01, c.node_bottom.z, c.weight);
        assert!(first_order_residual(&moved, &terminals) > 1e-4);

        // Square: merged node balances the four terminal pulls.
        let sq = IsoscelesTrapezium::new(1.0, 1.0, 1.0).unwrap();
        let c = sq.construction_tree().unwrap();
        assert!(first_order_residual(&c, &sq.terminals()) < 1e-12);
    }

    #[test]
    fn square_construction_oracle_merges_nodes() {
        let (_, p) = trapezium_problem(1.0, 1.0, 1.0, 2f64.sqrt());
        let r = run_alternating(&p, false, &OracleOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 * 2f64.sqrt(), epsilon = 1e-9);
        assert!(distance(&r.node_top, &Point3::on_axis(0.5)) < 1e-6);
        assert!(distance(&r.node_bottom, &Point3::on_axis(0.5)) < 1e-6);
    }
}
