//! Best tree over the full topologies of four coplanar terminals.

use serde::Serialize;

use super::ft::{weighted_median, FtOptions};
use super::network::{run_alternating, NetworkProblem, OracleOptions};
use crate::error::{Error, Result};
use crate::geom::{distance, Point3};

/// Coplanarity tolerance relative to the cube of the terminal diameter.
const COPLANAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Topology {
    /// Terminals `pairs[0], pairs[1]` meet at one node and `pairs[2],
    /// pairs[3]` at the other.
    Full { pairs: [usize; 4] },
    /// One node joined to all four terminals.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub topology: Topology,
    pub length: f64,
    /// Whether the optimizer certified stationarity.
    pub converged: bool,
    /// False when a full topology's optimum degenerated (zero bridge or a
    /// node on a terminal).
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the shortest tree.
    pub best: usize,
    pub length: f64,
}

impl TopologyReport {
    pub fn best(&self) -> &Candidate {
        &self.candidates[self.best]
    }
}

const PAIRINGS: [[usize; 4]; 2] = [[0, 1, 2, 3], [0, 3, 1, 2]];

/// Unweighted Steiner problem for four coplanar terminals: every two-node
/// pairing is minimized with unit bridge weight, the single-node star is
/// added, and the shortest is returned. The first candidate is the pairing
/// `(0,1)(2,3)`, the second `(0,3)(1,2)`.
pub fn full_steiner_4pt_planar(quad: &[Point3; 4]) -> Result<TopologyReport> {
    full_steiner_4pt_planar_with(
        quad,
        &OracleOptions {
            max_iterations: 20_000,
            ..OracleOptions::default()
        },
    )
}

pub fn full_steiner_4pt_planar_with(quad: &[Point3; 4], opts: &OracleOptions) -> Result<TopologyReport> {
    let scale = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| distance(&quad[i], &quad[j]))
        .fold(0.0, f64::max);
    let volume = (quad[1] - quad[0])
        .cross(&(quad[2] - quad[0]))
        .dot(&(quad[3] - quad[0]))
        .abs();
    if volume > COPLANAR_TOLERANCE * scale.powi(3) {
        return Err(Error::NotCoplanar);
    }

    let mut candidates = Vec::with_capacity(PAIRINGS.len() + 1);
    for pairs in PAIRINGS {
        let terminals = pairs.map(|i| quad[i]);
        let prob = NetworkProblem::unit(terminals, 1.0)?;
        let r = run_alternating(&prob, false, opts)?;
        let gap = 1e-9 * scale;
        let nondegenerate = distance(&r.node_top, &r.node_bottom) > gap
            && terminals[..2].iter().all(|t| distance(t, &r.node_top) > gap)
            && terminals[2..].iter().all(|t| distance(t, &r.node_bottom) > gap);
        candidates.push(Candidate {
            topology: Topology::Full { pairs },
            length: r.value,
            converged: r.converged,
            nondegenerate,
        });
    }

    let star = weighted_median(quad, &[1.0; 4], None, &FtOptions::default())?;
    candidates.push(Candidate {
        topology: Topology::Star,
        length: quad.iter().map(|p| distance(p, &star.point)).sum(),
        converged: true,
        nondegenerate: star.absorbed.is_none(),
    });

    // Strictly shorter wins, so ties keep the earlier candidate.
    let best = candidates.iter().enumerate().fold(0, |b, (i, c)| {
        if c.length < candidates[b].length - 1e-12 * scale {
            i
        } else {
            b
        }
    });
    Ok(TopologyReport {
        length: candidates[best].length,
        best,
        candidates,
    })
}
