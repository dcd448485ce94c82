use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placement of the cell edges on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    /// Equal cells, midpoint nodes.
    #[default]
    Uniform,
    /// Edges `r_max (j/N)^power`, refining toward the origin.
    Algebraic { power: f64 },
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grading::Uniform => write!(f, "uniform"),
            Grading::Algebraic { power } => write!(f, "algebraic:{power}"),
        }
    }
}

impl FromStr for Grading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(Grading::Uniform);
        }
        if let Some(rest) = s.strip_prefix("algebraic:") {
            let power: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad grading power '{rest}'")))?;
            if !(power >= 1.0) {
                return Err(Error::InvalidGrading(power));
            }
            return Ok(Grading::Algebraic { power });
        }
        Err(Error::InvalidArgument(format!(
            "unknown grading '{s}' (expected 'uniform' or 'algebraic:<power>')"
        )))
    }
}

/// Cell-centred radial grid on `[0, r_max]`.
///
/// Cell `j` spans `[edges[j], edges[j+1]]` and carries the node
/// `nodes[j]` at its midpoint. All weights are exact cell moments, so the
/// quadratures reproduce `int r^k dr` over `[0, r_max]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub edges: Vec<f64>,
    pub nodes: Vec<f64>,
    pub r_max: f64,
    pub grading: Grading,
    /// Cell lengths, weights for `int f dr`.
    pub w_plain: Vec<f64>,
    /// Weights for `int f r dr` (the transformed measure).
    pub w_2: Vec<f64>,
    /// Dilation applied since construction; `1` for a fresh grid.
    pub scale: f64,
}

pub fn make_grid(n: usize, r_max: f64, grading: Grading) -> Result<RadialGrid> {
    if n < 16 {
        return Err(Error::GridTooSmall(n));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidRadius(r_max));
    }
    let nf = n as f64;
    let edges: Vec<f64> = match grading {
        Grading::Uniform => (0..=n).map(|j| r_max * j as f64 / nf).collect(),
        Grading::Algebraic { power } => {
            if !(power >= 1.0) {
                return Err(Error::InvalidGrading(power));
            }
            (0..=n)
                .map(|j| r_max * (j as f64 / nf).powf(power))
                .collect()
        }
    };
    Ok(RadialGrid::from_edges(edges, grading, 1.0))
}

impl RadialGrid {
    fn from_edges(mut edges: Vec<f64>, grading: Grading, scale: f64) -> Self {
        let n = edges.len() - 1;
        edges[0] = 0.0;
        let nodes = (0..n).map(|j| 0.5 * (edges[j] + edges[j + 1])).collect();
        let w_plain = (0..n).map(|j| edges[j + 1] - edges[j]).collect();
        let w_2 = (0..n)
            .map(|j| 0.5 * (edges[j + 1] - edges[j]) * (edges[j + 1] + edges[j]))
            .collect();
        RadialGrid {
            r_max: edges[n],
            edges,
            nodes,
            grading,
            w_plain,
            w_2,
            scale,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Exact cell moments `int_{cell j} r^gamma dr` for `gamma > -1`.
    pub fn cell_moment(&self, gamma: f64) -> Vec<f64> {
        let g1 = gamma + 1.0;
        (0..self.len())
            .map(|j| {
                let (a, b) = (self.edges[j], self.edges[j + 1]);
                if a == 0.0 {
                    b.powf(g1) / g1
                } else {
                    // b^g1 - a^g1 without cancellation for thin cells
                    let ratio = (a / b).ln() * g1;
                    -b.powf(g1) * ratio.exp_m1() / g1
                }
            })
            .collect()
    }

    /// Weights for `int f r^{d-1} dr`.
    pub fn w_d(&self, d: u32) -> Vec<f64> {
        self.cell_moment(d as f64 - 1.0)
    }

    /// The same cells dilated by `b`: every edge multiplied by `b`.
    pub fn scaled(&self, b: f64) -> RadialGrid {
        let edges = self.edges.iter().map(|e| e * b).collect();
        RadialGrid::from_edges(edges, self.grading, self.scale * b)
    }

    /// Checks that two grids describe the same cells.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| (a - b).abs() <= 1e-14 * self.r_max)
    }

    /// Index of the first cell whose upper edge exceeds `r`.
    pub fn cell_of(&self, r: f64) -> usize {
        let n = self.len();
        let k = self.edges.partition_point(|&e| e <= r);
        k.saturating_sub(1).min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes_are_midpoints() {
        let g = make_grid(16, 1.0, Grading::Uniform).unwrap();
        for (j, r) in g.nodes.iter().enumerate() {
            assert!((r - (j as f64 + 0.5) / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn w2_integrates_r() {
        let g = make_grid(1024, 40.0, Grading::Uniform).unwrap();
        let s: f64 = g.w_2.iter().sum();
        assert!((s - 800.0).abs() / 800.0 < 1e-10);
        let g = make_grid(1000, 40.0, Grading::Algebraic { power: 2.0 }).unwrap();
        let s: f64 = g.w_2.iter().sum();
        assert!((s - 800.0).abs() / 800.0 < 1e-10);
    }

    #[test]
    fn rejects_small_or_bad() {
        assert_eq!(
            make_grid(8, 1.0, Grading::Uniform),
            Err(Error::GridTooSmall(8))
        );
        assert!(make_grid(32, 0.0, Grading::Uniform).is_err());
        assert!(make_grid(32, 1.0, Grading::Algebraic { power: 0.5 }).is_err());
    }

    #[test]
    fn cell_moments_are_exact() {
        let g = make_grid(37, 3.0, Grading::Algebraic { power: 1.7 }).unwrap();
        for gamma in [-0.5, 0.0, 0.5, 2.0] {
            let s: f64 = g.cell_moment(gamma).iter().sum();
            let exact = 3f64.powf(gamma + 1.0) / (gamma + 1.0);
            assert!((s - exact).abs() / exact < 1e-13, "gamma {gamma}");
        }
        let wd: f64 = g.w_d(3).iter().sum();
        assert!((wd - 9.0).abs() < 1e-12);
    }

    #[test]
    fn grading_parses() {
        assert_eq!("uniform".parse::<Grading>().unwrap(), Grading::Uniform);
        assert_eq!(
            "algebraic:2".parse::<Grading>().unwrap(),
            Grading::Algebraic { power: 2.0 }
        );
        assert!("foo".parse::<Grading>().is_err());
    }
}
