//! Self-check suite behind `steiner4 verify`: closed forms against goldens,
//! exact roots and the numerical oracle on seeded random cases.

use std::f64::consts::PI;

use crate::batch;
use crate::comparison::Classification;
use crate::comparison::{
    crossover_quartic_roots, gap, normalized_gap, rectangle_lengths, square_lengths, stationary_angle,
};
use crate::geom::{angle_between, Axis, Point3};
use crate::oracle::{first_order_residual, minimize_two_node_network, NetworkProblem};
use crate::sampling::{self, RigidMotion};
use crate::tetra::canonicalize;
use crate::trapezium::{IsoscelesTrapezium, TwoNodeTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Random oracle cases; the cheap closed-form checks use five times as
    /// many.
    pub cases: usize,
    pub seed: u64,
    /// Relative tolerance for oracle-versus-closed-form comparisons.
    pub oracle_tolerance: f64,
    /// Multiplier applied to the construction weight `2 sin(θ/2)`. Anything
    /// other than 1 is a deliberate fault that must make the suite fail.
    pub weight_fault: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cases: 200,
            seed: 42,
            oracle_tolerance: 1e-6,
            weight_fault: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed residual.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn at_most(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn run(cfg: &VerifyConfig) -> Vec<Check> {
    let mut checks = vec![];
    checks.extend(square_goldens());
    checks.push(rectangle_goldens());
    checks.extend(crossover());
    checks.extend(stationary());
    checks.push(gap_equivalence(cfg));
    checks.extend(oracle_equivalence(cfg));
    checks.extend(reduction(cfg));
    checks.push(first_order_balance(cfg));
    checks.push(sign_pattern());
    checks
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN counts as a failure.
    values
        .into_iter()
        .fold(0.0, |acc: f64, v| if v.is_nan() { f64::INFINITY } else { acc.max(v) })
}

fn faulted_construction(t: &IsoscelesTrapezium, fault: f64) -> TwoNodeTree {
    let c = t.construction_tree().expect("θ < 90° for sampled trapezia");
    TwoNodeTree::on_axis(t, c.node_top.z, c.node_bottom.z, c.weight * fault)
}

fn square_goldens() -> Vec<Check> {
    let s = square_lengths(1.0).expect("positive side");
    vec![
        Check::at_most("square_l_construction", (s.l_construction - 2.828_427_125).abs(), 1e-9),
        Check::at_most("square_l_steiner", (s.l_steiner - 2.732_050_808).abs(), 1e-9),
        Check::at_most(
            "square_classification",
            if s.classification == Classification::SteinerShorter {
                0.0
            } else {
                1.0
            },
            0.0,
        ),
    ]
}

/// Rectangle `1 × 2` through both the rectangle formulas and the general
/// trapezium trees: `8/√5` and `√3 + 2`.
fn rectangle_goldens() -> Check {
    let r = rectangle_lengths(1.0, 2.0).expect("positive sides");
    let t = IsoscelesTrapezium::new(1.0, 1.0, 2.0).expect("valid trapezium");
    let errs = [
        (r.l_construction - 3.577_708_763_999_664).abs(),
        (r.l_steiner - 3.732_050_807_568_877).abs(),
        (t.construction_length() - r.l_construction).abs(),
        (t.steiner_length() - r.l_steiner).abs(),
    ];
    Check::at_most("rectangle_goldens", worst(errs), 1e-12)
}

fn crossover() -> Vec<Check> {
    let c = crossover_quartic_roots();
    vec![
        Check::at_most("crossover_root", (c.root - (2.0 - 3f64.sqrt())).abs(), 1e-12),
        Check::at_most("crossover_theta_deg", (c.theta.to_degrees() - 60.0).abs(), 1e-9),
    ]
}

fn stationary() -> Vec<Check> {
    let t = stationary_angle();
    let deg = t.to_degrees();
    let h = 1e-5;
    let fd = (normalized_gap(t + h) - normalized_gap(t - h)) / (2.0 * h);
    let out_of_band = if (78.05..=78.15).contains(&deg) {
        0.0
    } else {
        (deg - 78.1).abs()
    };
    // Count 1° grid steps that contradict "decreasing then increasing".
    let mut wrong_steps = 0.0;
    for k in 1..90 {
        let (a, b) = (k as f64, k as f64 + 1.0);
        let step = normalized_gap(b.to_radians()) - normalized_gap(a.to_radians());
        if (b < deg && step >= 0.0) || (a > deg && step <= 0.0) {
            wrong_steps += 1.0;
        }
    }
    vec![
        Check::at_most("stationary_angle_band", out_of_band, 0.0),
        Check::at_most("stationary_derivative", fd.abs(), 1e-9),
        Check::at_most("stationary_monotonicity", wrong_steps, 0.0),
    ]
}

fn gap_equivalence(cfg: &VerifyConfig) -> Check {
    let mut rng = sampling::rng(cfg.seed);
    let errs = (0..cfg.cases * 5).map(|_| {
        let t = sampling::random_trapezium(&mut rng);
        let r = gap(&t).expect("sampled trapezia admit both trees");
        let diff = t.steiner_length() - t.construction_length();
        (r.gap - diff).abs() / t.sides()
    });
    Check::at_most("gap_equivalence", worst(errs), 1e-10)
}

struct OracleCase {
    construction_value: f64,
    construction_nodes: f64,
    steiner_value: f64,
    steiner_angles: f64,
}

fn node_angle_error(node: &Point3, neighbours: [Point3; 3]) -> f64 {
    let third = 2.0 * PI / 3.0;
    let [a, b, c] = neighbours.map(|p| p - *node);
    [(a, b), (a, c), (b, c)]
        .iter()
        .map(|(u, v)| angle_between(u, v).map_or(f64::INFINITY, |x| (x - third).abs()))
        .fold(0.0, f64::max)
}

fn oracle_equivalence(cfg: &VerifyConfig) -> Vec<Check> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(1));
    let traps: Vec<IsoscelesTrapezium> = (0..cfg.cases).map(|_| sampling::random_trapezium(&mut rng)).collect();
    let fault = cfg.weight_fault;
    let results = batch::map(&traps, |t| {
        let terminals = t.terminals();
        let c = t.construction_tree().expect("θ < 90°");
        let w = c.weight * fault;
        let (construction_value, construction_nodes) = NetworkProblem::unit(terminals, w)
            .and_then(|p| minimize_two_node_network(&p, false))
            .map_or((f64::INFINITY, f64::INFINITY), |r| {
                (
                    (r.value - t.construction_length()).abs() / t.construction_length(),
                    (r.node_top - c.node_top)
                        .norm()
                        .max((r.node_bottom - c.node_bottom).norm()),
                )
            });
        let (steiner_value, steiner_angles) = NetworkProblem::unit(terminals, 1.0)
            .and_then(|p| minimize_two_node_network(&p, false))
            .map_or((f64::INFINITY, f64::INFINITY), |r| {
                let [a1, a2, a3, a4] = terminals;
                let angles = node_angle_error(&r.node_top, [a1, a2, r.node_bottom])
                    .max(node_angle_error(&r.node_bottom, [a3, a4, r.node_top]));
                ((r.value - t.steiner_length()).abs() / t.steiner_length(), angles)
            });
        OracleCase {
            construction_value,
            construction_nodes,
            steiner_value,
            steiner_angles,
        }
    });
    let tol = cfg.oracle_tolerance;
    vec![
        Check::at_most(
            "oracle_construction_value",
            worst(results.iter().map(|r| r.construction_value)),
            tol,
        ),
        Check::at_most(
            "oracle_construction_nodes",
            worst(results.iter().map(|r| r.construction_nodes)),
            tol,
        ),
        Check::at_most(
            "oracle_steiner_value",
            worst(results.iter().map(|r| r.steiner_value)),
            tol,
        ),
        Check::at_most(
            "oracle_steiner_angles",
            worst(results.iter().map(|r| r.steiner_angles)),
            tol,
        ),
    ]
}

fn reduction(cfg: &VerifyConfig) -> Vec<Check> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(2));
    let cases: Vec<_> = (0..cfg.cases.div_ceil(2))
        .map(|_| (sampling::random_tetrahedron(&mut rng), RigidMotion::random(&mut rng)))
        .collect();
    let fault = cfg.weight_fault;
    let results = batch::map(&cases, |(tetra, motion)| {
        let moved = tetra.vertices().map(|p| motion.apply(&p));
        let Ok(canon) = canonicalize(&moved) else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let Ok(trap) = canon.tetra.reduce_to_trapezium() else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let terminals = canon.labels.map(|i| moved[i]);
        let w = 2.0 * (trap.diagonal_angle() / 2.0).sin() * fault;
        let axis = Axis::through(
            terminals[0].midpoint(&terminals[1]),
            terminals[2].midpoint(&terminals[3]),
        )
        .expect("d > 0");
        NetworkProblem::unit(terminals, w)
            .and_then(|p| minimize_two_node_network(&p, false))
            .map_or((f64::INFINITY, f64::INFINITY), |r| {
                let expected = trap.construction_length();
                (
                    (r.value - expected).abs() / expected,
                    axis.distance_to(&r.node_top).max(axis.distance_to(&r.node_bottom)),
                )
            })
    });
    let tol = cfg.oracle_tolerance;
    vec![
        Check::at_most("reduction_value", worst(results.iter().map(|r| r.0)), tol),
        Check::at_most("reduction_axis_distance", worst(results.iter().map(|r| r.1)), tol),
    ]
}

fn first_order_balance(cfg: &VerifyConfig) -> Check {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(3));
    let residuals = (0..cfg.cases * 5).map(|_| {
        let t = sampling::random_trapezium(&mut rng);
        first_order_residual(&faulted_construction(&t, cfg.weight_fault), &t.terminals())
    });
    Check::at_most("first_order_balance", worst(residuals), 1e-10)
}

fn sign_pattern() -> Check {
    let mut violations = 0.0;
    for k in 1..90 {
        let theta = (k as f64).to_radians();
        let g = normalized_gap(theta);
        let ok = match k.cmp(&60) {
            std::cmp::Ordering::Less => g > 0.0,
            std::cmp::Ordering::Greater => g < 0.0,
            std::cmp::Ordering::Equal => g.abs() < 1e-12,
        };
        if !ok {
            violations += 1.0;
        }
    }
    Check::at_most("sign_pattern", violations, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = run(&VerifyConfig {
            cases: 10,
            ..VerifyConfig::default()
        });
        for c in &checks {
            assert!(c.passed, "{} failed: {} > {}", c.name, c.worst, c.tolerance);
        }
    }

    #[test]
    fn weight_fault_is_detected() {
        let checks = run(&VerifyConfig {
            cases: 10,
            weight_fault: 1.01,
            ..VerifyConfig::default()
        });
        assert!(!all_passed(&checks));
        let balance = checks.iter().find(|c| c.name == "first_order_balance").unwrap();
        assert!(!balance.passed && balance.worst > 1e-4);
    }
}
