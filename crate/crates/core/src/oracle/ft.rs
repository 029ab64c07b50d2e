//! Weighted Fermat-Torricelli points (weighted geometric medians).
//!
//! Weiszfeld's fixed-point iteration with a safeguarded Newton step: a
//! Newton step is taken whenever it lowers the objective, otherwise the
//! Weiszfeld step, which never increases it. Vertex minimizers are found up
//! front by the dominance test, so the iteration only runs when the
//! minimizer is interior.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geom::{distance, Point3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtOptions {
    pub max_iterations: usize,
    /// Absolute tolerance on the gradient norm.
    pub gradient_tolerance: f64,
}

impl Default for FtOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gradient_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtSolution {
    pub point: Point3,
    /// Index of the terminal the minimizer coincides with, if any.
    pub absorbed: Option<usize>,
    pub iterations: usize,
    /// Gradient norm at an interior point; the dominance margin excess
    /// (zero) at an absorbed vertex.
    pub gradient_residual: f64,
}

/// Weighted Fermat-Torricelli point of a triangle. When the weights violate
/// the strict triangle inequalities the minimizer is a vertex; that vertex
/// is returned.
pub fn weighted_ft_point(p1: Point3, p2: Point3, p3: Point3, w1: f64, w2: f64, w3: f64) -> Result<Point3> {
    weighted_median(&[p1, p2, p3], &[w1, w2, w3], None, &FtOptions::default()).map(|s| s.point)
}

/// Weighted sum of distances from `x`.
pub fn weighted_distance_sum(points: &[Point3], weights: &[f64], x: &Point3) -> f64 {
    points.iter().zip(weights).map(|(p, w)| w * distance(p, x)).sum()
}

/// Gradient of [`weighted_distance_sum`] at a point distinct from every
/// terminal; terminals at `x` contribute nothing.
pub fn weighted_distance_gradient(points: &[Point3], weights: &[f64], x: &Point3) -> Point3 {
    points.iter().zip(weights).fold(Point3::ORIGIN, |acc, (p, &w)| {
        let r = distance(x, p);
        if r > 0.0 {
            acc + (*x - *p) * (w / r)
        } else {
            acc
        }
    })
}

/// Minimizes `Σ w_i |x - p_i|` over `x ∈ R³`.
pub fn weighted_median(
    points: &[Point3],
    weights: &[f64],
    start: Option<Point3>,
    opts: &FtOptions,
) -> Result<FtSolution> {
    assert_eq!(points.len(), weights.len());
    assert!(!points.is_empty());
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InfeasibleWeights(format!("weight {} is {}", i, weights[i])));
    }
    if !points.iter().all(Point3::is_finite) {
        return Err(Error::NonFinite);
    }

    if let Some(i) = dominant_vertex(points, weights) {
        return Ok(FtSolution {
            point: points[i],
            absorbed: Some(i),
            iterations: 0,
            gradient_residual: 0.0,
        });
    }

    let scale = points
        .iter()
        .map(|p| distance(p, &points[0]))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let total_weight: f64 = weights.iter().sum();
    let mut x = start.unwrap_or_else(|| {
        points
            .iter()
            .zip(weights)
            .fold(Point3::ORIGIN, |acc, (p, w)| acc + *p * *w)
            / total_weight
    });
    let mut fx = weighted_distance_sum(points, weights, &x);
    let mut last_step = Point3::new(1.0, 1.0, 1.0) / 3f64.sqrt();

    for iter in 0..opts.max_iterations {
        if points.contains(&x) {
            // Landed on a terminal (not the minimizer, by the dominance
            // test): step off along the previous direction.
            x = x + last_step.normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0)) * (1e-12 * scale);
            fx = weighted_distance_sum(points, weights, &x);
        }

        let grad = weighted_distance_gradient(points, weights, &x);
        let gnorm = grad.norm();
        if gnorm <= opts.gradient_tolerance {
            return Ok(FtSolution {
                point: x,
                absorbed: None,
                iterations: iter,
                gradient_residual: gnorm,
            });
        }

        // Near the minimizer the objective stops resolving progress, so a
        // step within round-off of `fx` is accepted if it shrinks the
        // gradient.
        let noise = 8.0 * f64::EPSILON * fx.abs();
        let acceptable = |c: &Point3| {
            let fc = weighted_distance_sum(points, weights, c);
            fc < fx
                || (fc <= fx + noise
                    && !points.contains(c)
                    && weighted_distance_gradient(points, weights, c).norm() < gnorm)
        };
        let candidate = newton_step(points, weights, &x, &grad)
            .map(|step| x + step)
            .filter(acceptable)
            .or_else(|| Some(weiszfeld_step(points, weights, &x)).filter(acceptable));

        match candidate {
            Some(next) if next != x => {
                last_step = next - x;
                x = next;
                fx = weighted_distance_sum(points, weights, &x);
            }
            _ => {
                // No representable descent step remains.
                return if gnorm <= 1e3 * opts.gradient_tolerance.max(f64::EPSILON * total_weight) {
                    Ok(FtSolution {
                        point: x,
                        absorbed: None,
                        iterations: iter,
                        gradient_residual: gnorm,
                    })
                } else {
                    Err(Error::NonConvergence {
                        iterations: iter,
                        residual: gnorm,
                    })
                };
            }
        }
    }

    let gnorm = weighted_distance_gradient(points, weights, &x).norm();
    if gnorm <= opts.gradient_tolerance {
        Ok(FtSolution {
            point: x,
            absorbed: None,
            iterations: opts.max_iterations,
            gradient_residual: gnorm,
        })
    } else {
        Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            residual: gnorm,
        })
    }
}

/// Vertex `i` is the minimizer iff the pull of the other terminals,
/// `|Σ_{j≠i} w_j u_ij|`, does not exceed the weight sitting at `p_i`.
/// Coincident terminals pool their weights.
fn dominant_vertex(points: &[Point3], weights: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let mut own = 0.0;
        let mut pull = Point3::ORIGIN;
        for (q, w) in points.iter().zip(weights) {
            let r = distance(p, q);
            if r == 0.0 {
                own += w;
            } else {
                pull = pull + (*q - *p) * (w / r);
            }
        }
        let margin = own * (1.0 + 1e-12) - pull.norm();
        if margin >= 0.0 && best.is_none_or(|(_, m)| margin > m) {
            best = Some((i, margin));
        }
    }
    best.map(|(i, _)| i)
}

fn weiszfeld_step(points: &[Point3], weights: &[f64], x: &Point3) -> Point3 {
    let mut num = Point3::ORIGIN;
    let mut den = 0.0;
    for (p, w) in points.iter().zip(weights) {
        let r = distance(p, x);
        if r > 0.0 {
            num = num + *p * (w / r);
            den += w / r;
        }
    }
    num / den
}

/// Newton step `-H⁻¹ g` with `H = Σ w_i / r_i (I - u_i u_iᵀ)`, or `None`
/// when the Hessian is not positive definite (collinear configurations).
fn newton_step(points: &[Point3], weights: &[f64], x: &Point3, grad: &Point3) -> Option<Point3> {
    let mut h = Matrix3::<f64>::zeros();
    for (p, w) in points.iter().zip(weights) {
        let d = *x - *p;
        let r = d.norm();
        if r == 0.0 {
            return None;
        }
        let u = d.to_vector() / r;
        h += (Matrix3::identity() - u * u.transpose()) * (w / r);
    }
    let g: Vector3<f64> = grad.to_vector();
    h.cholesky().map(|c| Point3::from_vector(&-c.solve(&g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn equilateral_triangle_gives_its_centre() {
        let h = 3f64.sqrt() / 2.0;
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, h, 0.0),
        ];
        let x = weighted_ft_point(pts[0], pts[1], pts[2], 1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(x.x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x.y, h / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn heavy_vertex_absorbs_the_point() {
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 100.0, 0.0),
        ];
        let s = weighted_median(&pts, &[1.0, 1.0, 2.0], None, &FtOptions::default()).unwrap();
        assert_eq!(s.absorbed, Some(2));
        assert_eq!(s.point, pts[2]);
        // Just inside the strict inequality the minimizer is interior.
        let s = weighted_median(&pts, &[1.0, 1.0, 1.9], None, &FtOptions::default()).unwrap();
        assert_eq!(s.absorbed, None);
        assert!(s.gradient_residual < 1e-10);
    }

    #[test]
    fn obtuse_vertex_absorbs_unweighted_point() {
        // Angle at the origin exceeds 120°.
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.1, 0.0),
            Point3::new(-1.0, 0.1, 0.0),
        ];
        let s = weighted_median(&pts, &[1.0; 3], None, &FtOptions::default()).unwrap();
        assert_eq!(s.absorbed, Some(0));
    }

    #[test]
    fn reproduces_the_construction_node() {
        let w = 2.0 * 0.5f64.atan().sin();
        let x = weighted_ft_point(
            Point3::new(-0.5, 0.0, 2.0),
            Point3::new(0.5, 0.0, 2.0),
            Point3::on_axis(0.25),
            1.0,
            1.0,
            w,
        )
        .unwrap();
        assert_abs_diff_eq!(x.x, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(x.y, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(x.z, 1.75, epsilon = 1e-8);
    }

    #[test]
    fn starting_on_a_terminal_is_handled() {
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 1.0, 0.0),
        ];
        let s = weighted_median(&pts, &[1.0; 3], Some(pts[1]), &FtOptions::default()).unwrap();
        assert!(s.gradient_residual < 1e-10);
    }

    #[test]
    fn rejects_non_positive_weights() {
        let p = Point3::ORIGIN;
        assert!(matches!(
            weighted_ft_point(p, p, p, 1.0, 0.0, 1.0),
            Err(Error::InfeasibleWeights(_))
        ));
    }

    #[test]
    fn four_point_median_of_a_square_is_its_centre() {
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let s = weighted_median(&pts, &[1.0; 4], None, &FtOptions::default()).unwrap();
        assert_abs_diff_eq!(s.point.x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.point.y, 0.5, epsilon = 1e-12);
    }

    fn pt() -> impl Strategy<Value = Point3> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn result_beats_nearby_points(p1 in pt(), p2 in pt(), p3 in pt(),
                                      w1 in 0.2..2.0f64, w2 in 0.2..2.0f64, w3 in 0.2..2.0f64,
                                      probe in pt()) {
            let pts = [p1, p2, p3];
            let ws = [w1, w2, w3];
            prop_assume!(distance(&p1, &p2) > 1e-3 && distance(&p1, &p3) > 1e-3 && distance(&p2, &p3) > 1e-3);
            let s = weighted_median(&pts, &ws, None, &FtOptions::default()).unwrap();
            let f = weighted_distance_sum(&pts, &ws, &s.point);
            let nearby = s.point + probe * 1e-4;
            prop_assert!(f <= weighted_distance_sum(&pts, &ws, &nearby) + 1e-12);
            if s.absorbed.is_none() {
                prop_assert!(s.gradient_residual < 1e-10);
            }
        }
    }
}
