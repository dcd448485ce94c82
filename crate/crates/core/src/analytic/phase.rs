use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::interp::Pchip;
use crate::params::ModelParams;
use crate::quadrature::GaussRule;
use crate::riesz::RieszOperator;

/// A radial function of the transformed variable with its exact derivative.
pub trait RadialProfile {
    fn value(&self, r: f64) -> Complex64;
    fn derivative(&self, r: f64) -> Complex64;
}

/// Profile given by a pair of closures `(f, f')`.
pub struct FnProfile<F, G> {
    pub f: F,
    pub df: G,
}

impl<F, G> RadialProfile for FnProfile<F, G>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    fn value(&self, r: f64) -> Complex64 {
        (self.f)(r)
    }

    fn derivative(&self, r: f64) -> Complex64 {
        (self.df)(r)
    }
}

/// Real interpolant scaled by a complex constant.
pub struct InterpProfile {
    pub interp: Pchip,
    pub factor: Complex64,
    /// Argument scale: the profile is `factor * interp(scale * r)`.
    pub scale: f64,
}

impl RadialProfile for InterpProfile {
    fn value(&self, r: f64) -> Complex64 {
        self.factor * self.interp.value(self.scale * r)
    }

    fn derivative(&self, r: f64) -> Complex64 {
        self.factor * (self.scale * self.interp.derivative(self.scale * r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseIdentity {
    /// `E(v e^{i s phi})` evaluated directly.
    pub lhs: f64,
    /// `E(v) + s cross + (s^2/2) quad`.
    pub rhs: f64,
    pub energy: f64,
    /// `int grad(phi) . Im(conj(v) grad v) dx`.
    pub cross: f64,
    /// `int |grad phi|^2 |v|^2 dx`.
    pub quad: f64,
    pub mass: f64,
    /// `sqrt(2 E(v)) quad^{1/2}` when `E(v) >= 0`.
    pub cs_bound: Option<f64>,
}

impl PhaseIdentity {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / (self.lhs.abs() + self.rhs.abs())
    }

    /// `|cross| <= sqrt(2 E) quad^{1/2}` up to the relative slack `rel`.
    pub fn bound_holds(&self, rel: f64) -> Option<bool> {
        self.cs_bound
            .map(|b| self.cross.abs() <= b + rel * (b + self.cross.abs()).max(f64::MIN_POSITIVE))
    }
}

/// Both sides of the phase-modulation expansion
/// `E(v e^{i s phi}) = E(v) + s int grad(phi).Im(conj(v) grad v) + (s^2/2) int |grad phi|^2 |v|^2`.
///
/// Kinetic integrals use exact derivatives of the profiles and 8-point
/// Gauss-Legendre quadrature on the cells of the operator's grid; the
/// Choquard terms use the operator on the nodal values of `v` and of
/// `v e^{i s phi}`. `phi` must be constant near `r_max`.
pub fn phase_modulation_energy(
    v: &dyn RadialProfile,
    phi: &dyn RadialProfile,
    s: f64,
    params: &ModelParams,
    riesz: &RieszOperator,
) -> Result<PhaseIdentity> {
    let grid = &riesz.grid;
    let n = grid.len();
    let tail = phi.derivative(grid.r_max).norm() + phi.derivative(grid.nodes[n - 1]).norm();
    if tail > 1e-12 {
        return Err(Error::InvalidArgument(
            "phase must be constant near r_max".into(),
        ));
    }
    let rule = GaussRule::new(8);
    let i = Complex64::new(0.0, 1.0);
    let (mut kin_v, mut kin_w, mut cross, mut quad, mut m2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..n {
        let (a, b) = (grid.edges[k], grid.edges[k + 1]);
        kin_v += rule.integrate(a, b, |r| v.derivative(r).norm_sqr() * r);
        kin_w += rule.integrate(a, b, |r| {
            let ph = s * phi.value(r).re;
            let dw = (v.derivative(r) + i * s * phi.derivative(r).re * v.value(r))
                * Complex64::from_polar(1.0, ph);
            dw.norm_sqr() * r
        });
        cross += rule.integrate(a, b, |r| {
            phi.derivative(r).re * (v.value(r).conj() * v.derivative(r)).im * r
        });
        quad += rule.integrate(a, b, |r| {
            phi.derivative(r).re.powi(2) * v.value(r).norm_sqr() * r
        });
        m2 += rule.integrate(a, b, |r| v.value(r).norm_sqr() * r);
    }
    let area = params.sphere_area;
    let field = RadialField::from_fn(grid.clone(), |r| v.value(r));
    let modulated = RadialField::from_fn(grid.clone(), |r| {
        v.value(r) * Complex64::from_polar(1.0, s * phi.value(r).re)
    });
    let e = 0.5 * area * kin_v - riesz.choquard_energy(&field);
    let lhs = 0.5 * area * kin_w - riesz.choquard_energy(&modulated);
    let (cross, quad) = (area * cross, area * quad);
    Ok(PhaseIdentity {
        lhs,
        rhs: e + s * cross + 0.5 * s * s * quad,
        energy: e,
        cross,
        quad,
        mass: area * m2,
        cs_bound: (e >= 0.0).then(|| (2.0 * e).sqrt() * quad.sqrt()),
    })
}
