//! Construction tree versus Steiner tree: the gap function, its crossover
//! angle and its stationary point, plus the rectangle and square cases.
//!
//! For a trapezium with sides `a12`, `a34` the gap is
//!
//! ```text
//! g(θ) = (a12 + a34) (√3/2 + cot(θ/2)/2 - 2 cos(θ/2))
//! ```
//!
//! It is positive on `(0°, 60°)`, vanishes at 60°, and is negative on
//! `(60°, 90°]` with its minimum where `sin³(θ/2) = 1/4`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::trapezium::IsoscelesTrapezium;

/// Equality band for the normalized gap `g / (a12 + a34)`.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    ConstructionShorter,
    Equal,
    SteinerShorter,
}

impl Classification {
    fn from_normalized_gap(h: f64) -> Self {
        if h.abs() <= EQUALITY_TOLERANCE {
            Classification::Equal
        } else if h > 0.0 {
            Classification::ConstructionShorter
        } else {
            Classification::SteinerShorter
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::ConstructionShorter => "ConstructionShorter",
            Classification::Equal => "Equal",
            Classification::SteinerShorter => "SteinerShorter",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Diagonal angle in radians.
    pub theta: f64,
    pub l_construction: f64,
    pub l_steiner: f64,
    /// `l_steiner - l_construction`.
    pub gap: f64,
    pub classification: Classification,
}

/// Gap per unit of `a12 + a34`.
pub fn normalized_gap(theta: f64) -> f64 {
    let half = theta / 2.0;
    3f64.sqrt() / 2.0 + 0.5 / half.tan() - 2.0 * half.cos()
}

/// `d/dθ` of [`normalized_gap`].
pub fn normalized_gap_derivative(theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    s - 0.25 / (s * s)
}

/// Compares both trees on `trap`. Fails when either tree cannot be built.
pub fn gap(trap: &IsoscelesTrapezium) -> Result<ComparisonReport> {
    let construction = trap.construction_tree()?;
    let steiner = trap.steiner_tree()?;
    let theta = trap.diagonal_angle();
    let sides = trap.sides();
    let t = trap.tan_half_theta();
    let cos_half = 1.0 / t.hypot(1.0);
    let h = 3f64.sqrt() / 2.0 + 0.5 / t - 2.0 * cos_half;
    Ok(ComparisonReport {
        theta,
        l_construction: construction.total,
        l_steiner: steiner.total,
        gap: sides * h,
        classification: Classification::from_normalized_gap(h),
    })
}

/// Which tree is shorter at diagonal angle `theta ∈ (0, π/2]`.
pub fn classify(theta: f64) -> Result<Classification> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::ThetaOutOfRange {
            degrees: theta.to_degrees(),
            range: "(0°, 90°]",
        });
    }
    Ok(Classification::from_normalized_gap(normalized_gap(theta)))
}

/// `-u⁴ + (2√3 + 8)u³ + (2√3 - 8)u + 1`: the numerator of the gap after
/// substituting `u = tan(θ/4)`.
pub fn crossover_quartic() -> Polynomial {
    let r3 = 3f64.sqrt();
    Polynomial::new(vec![1.0, 2.0 * r3 - 8.0, 0.0, 2.0 * r3 + 8.0, -1.0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossover {
    /// Every real root of the quartic, ascending.
    pub roots: Vec<f64>,
    /// The root with `4 atan(u) ∈ (0°, 90°)`.
    pub root: f64,
    /// `4 atan(root)`, radians.
    pub theta: f64,
}

pub fn crossover_quartic_roots() -> Crossover {
    let roots = crossover_quartic().real_roots();
    let upper = (FRAC_PI_2 / 4.0).tan();
    let inside: Vec<f64> = roots.iter().copied().filter(|&u| u > 0.0 && u < upper).collect();
    assert_eq!(inside.len(), 1, "quartic must have one root in (0, tan 22.5°)");
    let root = polish_crossover_root(inside[0]);
    Crossover {
        roots,
        root,
        theta: 4.0 * root.atan(),
    }
}

/// Error-free `a + b` as `(sum, rounding error)`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Double-double arithmetic, just enough to evaluate the quartic without
/// rounding its irrational coefficients.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        let (hi, lo) = two_sum(s, e + self.1 + o.1);
        Dd(hi, lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p) + self.0 * o.1 + self.1 * o.0;
        let (hi, lo) = two_sum(p, e);
        Dd(hi, lo)
    }
}

/// One Newton step on the quartic evaluated in double-double; the f64
/// coefficients alone misplace the root by a couple of ulps.
fn polish_crossover_root(u: f64) -> f64 {
    let r3_hi = 3f64.sqrt();
    let sqrt3 = Dd(r3_hi, r3_hi.mul_add(-r3_hi, 3.0) / (2.0 * r3_hi));
    let two_sqrt3 = sqrt3.add(sqrt3);
    let x = Dd(u, 0.0);
    let c3 = two_sqrt3.add(Dd(8.0, 0.0));
    let c1 = two_sqrt3.add(Dd(-8.0, 0.0));
    // Horner: ((( -u + c3) u + 0) u + c1) u + 1
    let q = Dd(-u, 0.0).add(c3).mul(x).mul(x).add(c1).mul(x).add(Dd(1.0, 0.0));
    let dq = crossover_quartic().derivative().eval(u);
    u - (q.0 + q.1) / dq
}

/// Minimizer of the gap on `(0°, 90°]`: `2 asin(4^(-1/3))`.
pub fn stationary_angle() -> f64 {
    2.0 * 4f64.powf(-1.0 / 3.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lengths {
    pub l_construction: f64,
    pub l_steiner: f64,
}

/// Rectangle with sides `a12 = a34` and height `d`.
pub fn rectangle_lengths(a12: f64, d: f64) -> Result<Lengths> {
    if !(a12 > 0.0 && d > 0.0 && a12.is_finite() && d.is_finite()) {
        return Err(Error::InvalidTrapezium("rectangle sides must be positive"));
    }
    // tan(θ/2) = a12 / d
    Ok(Lengths {
        l_construction: 4.0 * a12 * d / d.hypot(a12),
        l_steiner: a12 * (3f64.sqrt() + d / a12),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareLengths {
    pub l_construction: f64,
    pub l_steiner: f64,
    pub classification: Classification,
}

pub fn square_lengths(a: f64) -> Result<SquareLengths> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidTrapezium("square side must be positive"));
    }
    let l_construction = 2.0 * 2f64.sqrt() * a;
    let l_steiner = (3f64.sqrt() + 1.0) * a;
    Ok(SquareLengths {
        l_construction,
        l_steiner,
        classification: Classification::from_normalized_gap((l_steiner - l_construction) / (2.0 * a)),
    })
}
