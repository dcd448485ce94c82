//! Radial Riesz potential `I_alpha * f` and the Choquard energy.
//!
//! A density `|u|^p` is carried as `g = |v|^p = r^beta |u|^p`, so the
//! Choquard integrand lives on the measure `r^gamma dr` with
//! `gamma = d - 1 - beta`. Row `j` of the raw kernel integrates the angular
//! kernel against `s^gamma` over every cell; the stored operator is the
//! symmetrised matrix `A_jk = (W_j K_jk + W_k K_kj)/2` with `W_j` the exact
//! cell moments of `r^gamma`. Then
//! `int (I_alpha * |u|^p)|u|^p dx = |S^{d-1}| g^T A g` and the potential at
//! node `j` is `(A g)_j / W_j`.
//!
//! Rows are assembled in parallel; each entry and each matrix-vector row is
//! computed by a fixed sequential loop, so results do not depend on the
//! thread schedule.

mod cache;
pub mod kernel;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use cache::{cache_key, load_cached, save_cache, CacheKey};
pub use kernel::AngularKernel;

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::grid::RadialGrid;
use crate::params::ModelParams;

#[derive(Debug, Clone)]
pub struct RieszOperator {
    pub params: ModelParams,
    pub grid: Arc<RadialGrid>,
    /// Row-major symmetric `N x N` matrix.
    matrix: Vec<f64>,
    /// Cell moments of `r^gamma`.
    weights: Vec<f64>,
}

pub fn build_riesz(params: &ModelParams, grid: Arc<RadialGrid>) -> Result<RieszOperator> {
    let kern = AngularKernel::new(params.d, params.alpha);
    build_with_kernel(params, grid, &kern)
}

/// Assembles the operator with an explicit angular kernel evaluator.
pub fn build_with_kernel(
    params: &ModelParams,
    grid: Arc<RadialGrid>,
    kern: &AngularKernel,
) -> Result<RieszOperator> {
    let df = params.d as f64;
    if !(params.alpha > 0.0 && params.alpha < df) {
        return Err(Error::AlphaOutOfRange {
            d: params.d,
            alpha: params.alpha,
        });
    }
    let gamma = params.choquard_measure_power();
    if gamma <= -1.0 {
        return Err(Error::InvalidArgument(format!(
            "p = {} makes |u|^p non-integrable at the origin",
            params.p
        )));
    }
    let n = grid.len();
    let rules = kernel::CellRules::default();
    let c = params.riesz_const;
    let raw: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let r = grid.nodes[j];
            let grid = &grid;
            let rules = &rules;
            (0..n).map(move |k| {
                c * kernel::cell_integral(kern, rules, r, grid.edges[k], grid.edges[k + 1], gamma)
            })
        })
        .collect();
    let weights = grid.cell_moment(gamma);
    let mut matrix = vec![0.0; n * n];
    matrix.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for k in 0..n {
            row[k] = 0.5 * (weights[j] * raw[j * n + k] + weights[k] * raw[k * n + j]);
        }
    });
    Ok(RieszOperator {
        params: *params,
        grid,
        matrix,
        weights,
    })
}

impl RieszOperator {
    pub(crate) fn from_parts(
        params: ModelParams,
        grid: Arc<RadialGrid>,
        matrix: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.len();
        if matrix.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "matrix has {} entries, grid needs {}",
                matrix.len(),
                n * n
            )));
        }
        let weights = grid.cell_moment(params.choquard_measure_power());
        Ok(RieszOperator {
            params,
            grid,
            matrix,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Cell moments `W_j = int_{cell j} r^gamma dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `A g`.
    pub fn apply_matrix(&self, g: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(g.len(), n, "density length does not match the grid");
        self.matrix
            .par_chunks(n)
            .map(|row| row.iter().zip(g).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Potential at the nodes from a transformed density `g = r^beta f`.
    pub fn apply_transformed(&self, g: &[f64]) -> Vec<f64> {
        self.apply_matrix(g)
            .into_iter()
            .zip(&self.weights)
            .map(|(x, w)| x / w)
            .collect()
    }

    /// `(I_alpha * f)(r_j)` for physical samples `f_j = f(r_j)`.
    pub fn apply_riesz(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} nodes",
                f.len(),
                self.len()
            )));
        }
        let beta = self.params.beta();
        let g: Vec<f64> = f
            .iter()
            .zip(&self.grid.nodes)
            .map(|(x, r)| x * r.powf(beta))
            .collect();
        Ok(self.apply_transformed(&g))
    }

    /// Weights `W_j r_j^beta ~ int_{cell j} r^{d-1} dr` of the inner product in
    /// which [`apply_riesz`](Self::apply_riesz) is exactly self-adjoint.
    pub fn inner_weights(&self) -> Vec<f64> {
        let beta = self.params.beta();
        self.weights
            .iter()
            .zip(&self.grid.nodes)
            .map(|(w, r)| w * r.powf(beta))
            .collect()
    }

    /// `g = |v|^p` for a field.
    pub fn density(&self, f: &RadialField) -> Vec<f64> {
        let p = self.params.p;
        f.values.iter().map(|z| z.norm().powf(p)).collect()
    }

    /// `int (I_alpha * |u|^p)|u|^p dx`.
    pub fn choquard_integral(&self, f: &RadialField) -> f64 {
        let g = self.density(f);
        let ag = self.apply_matrix(&g);
        self.params.sphere_area * g.iter().zip(&ag).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `G(u) = (1/2p) int (I_alpha * |u|^p)|u|^p dx`.
    pub fn choquard_energy(&self, f: &RadialField) -> f64 {
        self.choquard_integral(f) / (2.0 * self.params.p)
    }

    /// Discrete Choquard force `(A g) |v|^{p-2} v`.
    pub fn force(&self, values: &[Complex64]) -> Vec<Complex64> {
        let p = self.params.p;
        let g: Vec<f64> = values.iter().map(|z| z.norm().powf(p)).collect();
        let ag = self.apply_matrix(&g);
        values
            .iter()
            .zip(&ag)
            .map(|(z, a)| {
                let m = z.norm();
                if m == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    z * (a * m.powf(p - 2.0))
                }
            })
            .collect()
    }

    /// Operator for the same cells dilated by `b`; exact, no reassembly.
    pub fn scaled(&self, b: f64) -> RieszOperator {
        let grid = Arc::new(self.grid.scaled(b));
        let factor = b.powf(self.params.choquard_dilation_degree());
        RieszOperator {
            params: self.params,
            weights: grid.cell_moment(self.params.choquard_measure_power()),
            grid,
            matrix: self.matrix.iter().map(|a| a * factor).collect(),
        }
    }

    /// Fraction of `int W g` carried by the outer tenth of the grid: a proxy
    /// for the dropped contribution beyond `r_max`.
    pub fn truncation_estimate(&self, f: &RadialField) -> f64 {
        let g = self.density(f);
        let n = self.len();
        let total: f64 = g.iter().zip(&self.weights).map(|(a, w)| a * w).sum();
        if total == 0.0 {
            return 0.0;
        }
        let start = n - n / 10;
        let tail: f64 = (start..n).map(|j| g[j] * self.weights[j]).sum();
        tail / total
    }

    pub fn check_grid(&self, f: &RadialField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &f.grid) || self.grid.same_as(&f.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                "field and operator use different grids".into(),
            ))
        }
    }
}
