use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

const BOUNDARY_TOL: f64 = 1e-12;

/// Position of `p` relative to the ground-state existence window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    GroundStateRange,
    ExcludedLow,
    ExcludedHigh,
}

/// Model parameters `(d, alpha, p)` together with every derived constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub alpha: f64,
    pub p: f64,
    /// Critical Hardy constant `(d-2)^2/4`.
    pub mu0: f64,
    /// Gagliardo-Nirenberg interpolation exponent `(dp-(d+alpha))/(2p)`.
    pub theta: f64,
    /// Normalisation of the Riesz kernel `|x|^{-(d-alpha)}`.
    pub riesz_const: f64,
    /// Area of the unit sphere in `R^d`.
    pub sphere_area: f64,
    pub kappa: Option<f64>,
    pub regime: Regime,
    pub dynamics_ok: bool,
    pub mass_critical: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn make_params(d: u32, alpha: f64, p: f64) -> Result<ModelParams> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    let df = d as f64;
    if !(alpha > 0.0 && alpha < df) {
        return Err(Error::AlphaOutOfRange { d, alpha });
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::ExponentTooSmall(p));
    }
    let mu0 = (df - 2.0) * (df - 2.0) / 4.0;
    let theta = (df * p - (df + alpha)) / (2.0 * p);
    let riesz_const = gamma((df - alpha) / 2.0)
        / (gamma(alpha / 2.0) * std::f64::consts::PI.powf(df / 2.0) * 2f64.powf(alpha));
    let sphere_area = 2.0 * std::f64::consts::PI.powf(df / 2.0) / gamma(df / 2.0);

    let low = (df + alpha) / df;
    let high = (df + alpha) / (df - 2.0);
    let regime = if p <= low || close(p, low) {
        Regime::ExcludedLow
    } else if p >= high || close(p, high) {
        Regime::ExcludedHigh
    } else {
        Regime::GroundStateRange
    };

    let mass_crit_p = (df + alpha + 2.0) / df;
    let mass_critical = close(p, mass_crit_p);
    let kdenom = df * p - df - alpha - 2.0;
    let kappa = if !mass_critical && kdenom > 0.0 {
        Some(2.0 * (df + alpha - (df - 2.0) * p) / kdenom)
    } else {
        None
    };
    let alpha_low = (df - 4.0).max(0.0);
    let dynamics_ok = alpha > alpha_low && p > 2.0 && p < high && !close(p, high);

    Ok(ModelParams {
        d,
        alpha,
        p,
        mu0,
        theta,
        riesz_const,
        sphere_area,
        kappa,
        regime,
        dynamics_ok,
        mass_critical,
    })
}

impl ModelParams {
    /// `a = (d-2)/2`, the power relating `v = r^a u`.
    pub fn transform_power(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }

    /// `beta = (d-2)p/2`, so that `|u|^p = r^{-beta} |v|^p`.
    pub fn beta(&self) -> f64 {
        (self.d as f64 - 2.0) * self.p / 2.0
    }

    /// Exponent of the measure `r^{d-1-beta} dr` that carries `|v|^p`.
    pub fn choquard_measure_power(&self) -> f64 {
        self.d as f64 - 1.0 - self.beta()
    }

    /// Scaling degree of the Choquard integral under grid dilation:
    /// `d + alpha - (d-2)p`.
    pub fn choquard_dilation_degree(&self) -> f64 {
        self.d as f64 + self.alpha - (self.d as f64 - 2.0) * self.p
    }

    /// Coefficient `d + alpha + 2 - dp` of `G` in the virial identity.
    pub fn virial_coefficient(&self) -> f64 {
        let df = self.d as f64;
        df + self.alpha + 2.0 - df * self.p
    }

    pub fn mass_critical_exponent(&self) -> f64 {
        (self.d as f64 + self.alpha + 2.0) / self.d as f64
    }

    /// True when global existence holds for every datum:
    /// `d-2 < alpha < d` and `2 < p < (d+alpha+2)/d`.
    pub fn small_power_case(&self) -> bool {
        let df = self.d as f64;
        self.alpha > df - 2.0
            && self.p > 2.0
            && self.p < self.mass_critical_exponent()
            && !self.mass_critical
    }

    pub fn require_ground_state_range(&self) -> Result<()> {
        match self.regime {
            Regime::GroundStateRange => Ok(()),
            Regime::ExcludedLow => Err(Error::Excluded {
                p: self.p,
                which: "p <= (d+alpha)/d",
            }),
            Regime::ExcludedHigh => Err(Error::Excluded {
                p: self.p,
                which: "p >= (d+alpha)/(d-2)",
            }),
        }
    }

    pub fn require_dynamics(&self) -> Result<()> {
        if self.dynamics_ok {
            Ok(())
        } else {
            Err(Error::DynamicsRange(format!(
                "need (d-4)+ < alpha < d and 2 < p < (d+alpha)/(d-2); got d={}, alpha={}, p={}",
                self.d, self.alpha, self.p
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_critical_example() {
        let m = make_params(3, 2.0, 7.0 / 3.0).unwrap();
        assert!((m.theta - 3.0 / 7.0).abs() < 1e-15);
        assert!((m.p * m.theta - 1.0).abs() < 1e-14);
        assert!(m.mass_critical);
        assert!(m.kappa.is_none());
    }

    #[test]
    fn cubic_example() {
        let m = make_params(3, 2.0, 3.0).unwrap();
        assert_eq!(m.mu0, 0.25);
        assert!((m.theta - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.kappa.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(m.regime, Regime::GroundStateRange);
        assert!(m.dynamics_ok);
    }

    #[test]
    fn riesz_and_sphere_constants() {
        let m = make_params(3, 2.0, 2.5).unwrap();
        let pi = std::f64::consts::PI;
        assert!((m.riesz_const - 1.0 / (4.0 * pi)).abs() < 1e-15);
        assert!((m.sphere_area - 4.0 * pi).abs() < 1e-13);
    }

    #[test]
    fn regimes_at_boundaries() {
        assert_eq!(
            make_params(3, 2.0, 5.0).unwrap().regime,
            Regime::ExcludedHigh
        );
        assert_eq!(
            make_params(3, 2.0, 5.0 / 3.0).unwrap().regime,
            Regime::ExcludedLow
        );
        assert!(!make_params(3, 2.0, 5.0).unwrap().dynamics_ok);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(make_params(2, 1.0, 3.0), Err(Error::DimensionTooSmall(2)));
        assert!(matches!(
            make_params(3, 3.0, 3.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            make_params(3, 0.0, 3.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            make_params(3, 2.0, 1.0),
            Err(Error::ExponentTooSmall(_))
        ));
    }
}
