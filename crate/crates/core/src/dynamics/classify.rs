use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::{energy, gamma_prime, hardy_seminorm_sq, mass, weighted_moment};
use crate::groundstate::Thresholds;
use crate::params::ModelParams;
use crate::riesz::RieszOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    /// `d-2 < alpha < d` and `2 < p < (d+alpha+2)/d`.
    GlobalCaseA,
    /// Mass-critical `p` with `||u0|| < M_gs`.
    GlobalCaseB,
    /// Supercritical `p` below both ground-state thresholds.
    GlobalCaseC,
    BlowUpNegativeEnergy,
    /// Supercritical `p`, energy below and Hardy norm above the thresholds.
    BlowUpAboveThreshold,
    Undetermined,
}

/// One scalar comparison `lhs rel rhs` evaluated by the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    pub lhs: f64,
    pub relation: String,
    pub rhs: f64,
    pub holds: bool,
}

impl Witness {
    fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Witness {
            name: name.into(),
            lhs,
            relation: "<".into(),
            rhs,
            holds: lhs < rhs,
        }
    }

    fn greater(name: &str, lhs: f64, rhs: f64) -> Self {
        Witness {
            name: name.into(),
            lhs,
            relation: ">".into(),
            rhs,
            holds: lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witnesses: Vec<Witness>,
    /// Share of `Gamma(0)` carried by `r > r_max/2`: how strongly the finite
    /// second moment depends on the truncation.
    pub gamma_outer_fraction: f64,
}

/// `P(s) = s/2 - s^{p theta} / (2p C^{2p})`.
pub fn threshold_polynomial(s: f64, c: f64, params: &ModelParams) -> f64 {
    let (p, th) = (params.p, params.theta);
    0.5 * s - s.powf(p * th) / (2.0 * p * c.powf(2.0 * p))
}

/// Maximiser `s* = (C^{2p}/theta)^{1/(p theta - 1)}` of [`threshold_polynomial`]
/// for `p theta > 1`.
pub fn threshold_maximiser(c: f64, params: &ModelParams) -> f64 {
    let (p, th) = (params.p, params.theta);
    (c.powf(2.0 * p) / th).powf(1.0 / (p * th - 1.0))
}

fn gamma_outer_fraction(u0: &RadialField) -> f64 {
    let g = &u0.grid;
    let (mut outer, mut total) = (0.0, 0.0);
    for j in 0..g.len() {
        let x = g.w_2[j] * g.nodes[j] * g.nodes[j] * u0.values[j].norm_sqr();
        total += x;
        if g.nodes[j] > 0.5 * g.r_max {
            outer += x;
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

/// Global-existence and blow-up criteria, tried in order: case (a), case (b),
/// case (c), negative energy, energy below and Hardy norm above threshold.
///
/// `gs` holds the ground-state constants for the same parameters; it is
/// required only by the branches that compare against them. The second
/// moment is always finite on a truncated grid.
pub fn classify(
    u0: &RadialField,
    params: &ModelParams,
    riesz: &RieszOperator,
    gs: Option<&Thresholds>,
) -> Result<Verdict> {
    params.require_dynamics()?;
    riesz.check_grid(u0)?;
    let df = params.d as f64;
    let (alpha, p) = (params.alpha, params.p);
    let pc = params.mass_critical_exponent();
    let gamma_outer_fraction = gamma_outer_fraction(u0);
    let mut witnesses = Vec::new();
    let verdict = |kind, witnesses| {
        Ok(Verdict {
            kind,
            witnesses,
            gamma_outer_fraction,
        })
    };
    let long_range = alpha > df - 2.0;
    witnesses.push(Witness::greater("alpha vs d-2", alpha, df - 2.0));
    witnesses.push(Witness::less("p vs (d+alpha+2)/d", p, pc));
    if params.small_power_case() {
        return verdict(VerdictKind::GlobalCaseA, witnesses);
    }

    let m2 = mass(u0, params);
    let m = m2.sqrt();
    let h2 = hardy_seminorm_sq(u0, params);
    let e = energy(u0, params, riesz);
    let need = |branch| gs.ok_or(Error::MissingGroundState(branch));

    if params.mass_critical && long_range {
        let t = need("mass-critical")?;
        let w = Witness::less("||u0|| vs M_gs", m, t.m_gs);
        let holds = w.holds;
        witnesses.push(w);
        if holds {
            return verdict(VerdictKind::GlobalCaseB, witnesses);
        }
    }

    let supercritical = p > pc.max(2.0) && !params.mass_critical;
    if let (true, Some(kappa)) = (supercritical, params.kappa) {
        let t = need("threshold")?;
        let mk = m.powf(kappa);
        let gk = t.m_gs.powf(kappa);
        let we = Witness::less("E(u0)||u0||^kappa vs E_gs M_gs^kappa", e * mk, t.e_gs * gk);
        let wh = Witness::less(
            "||sqrt(L)u0||^2 ||u0||^kappa vs H_gs^2 M_gs^kappa",
            h2 * mk,
            t.h_gs * t.h_gs * gk,
        );
        let both = we.holds && wh.holds;
        witnesses.push(we);
        witnesses.push(wh);
        if both {
            return verdict(VerdictKind::GlobalCaseC, witnesses);
        }
    }

    if p >= pc || params.mass_critical {
        let gamma = weighted_moment(u0, params);
        witnesses.push(Witness::less("Gamma(0) vs infinity", gamma, f64::INFINITY));
        let wn = Witness::less("E(u0) vs 0", e, 0.0);
        let neg = wn.holds;
        witnesses.push(wn);
        if neg && gamma.is_finite() {
            return verdict(VerdictKind::BlowUpNegativeEnergy, witnesses);
        }
        if let (true, Some(kappa)) = (supercritical, params.kappa) {
            let t = need("threshold")?;
            let mk = m.powf(kappa);
            let gk = t.m_gs.powf(kappa);
            let we = Witness::less("E(u0)||u0||^kappa vs E_gs M_gs^kappa", e * mk, t.e_gs * gk);
            let wh = Witness::greater(
                "||sqrt(L)u0||^2 ||u0||^kappa vs H_gs^2 M_gs^kappa",
                h2 * mk,
                t.h_gs * t.h_gs * gk,
            );
            let both = we.holds && wh.holds;
            witnesses.push(we);
            witnesses.push(wh);
            if both && gamma.is_finite() {
                return verdict(VerdictKind::BlowUpAboveThreshold, witnesses);
            }
        }
    }
    verdict(VerdictKind::Undetermined, witnesses)
}

/// Time at which the concave bound `Gamma(0) + t Gamma'(0) + 8 E t^2` on the
/// second moment reaches zero, for `E(u0) < 0` and `p >= (d+alpha+2)/d`.
pub fn virial_vanishing_time(
    u0: &RadialField,
    params: &ModelParams,
    riesz: &RieszOperator,
) -> Option<f64> {
    let e = energy(u0, params, riesz);
    if e >= 0.0 {
        return None;
    }
    let g0 = weighted_moment(u0, params);
    let g1 = gamma_prime(u0, params);
    let a = -16.0 * e;
    // g0 + g1 t - a t^2 / 2 = 0
    Some((g1 + (g1 * g1 + 2.0 * a * g0).sqrt()) / a)
}
