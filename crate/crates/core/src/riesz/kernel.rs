//! Angular kernel `k(r, s) = int_{S^{d-1}} |r e_1 - s w|^{-(d-alpha)} dw` and its
//! cell integrals against `s^gamma`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::quadrature::GaussRule;

/// Evaluator for the angular kernel of a fixed `(d, alpha)`.
#[derive(Debug, Clone)]
pub struct AngularKernel {
    pub d: u32,
    pub alpha: f64,
    closed_form: bool,
    /// Area of `S^{d-2}`.
    equator_area: f64,
    panel_rule: GaussRule,
}

impl AngularKernel {
    pub fn new(d: u32, alpha: f64) -> Self {
        let df = d as f64;
        AngularKernel {
            d,
            alpha,
            closed_form: d == 3 && alpha != 1.0,
            equator_area: 2.0 * PI.powf((df - 1.0) / 2.0) / gamma((df - 1.0) / 2.0),
            panel_rule: GaussRule::new(16),
        }
    }

    /// Uses direct angular quadrature for every `d`.
    pub fn quadrature_only(d: u32, alpha: f64) -> Self {
        AngularKernel {
            closed_form: false,
            ..Self::new(d, alpha)
        }
    }

    pub fn uses_closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn eval(&self, r: f64, s: f64) -> f64 {
        self.eval_with_gap(r, s, (r - s).abs())
    }

    /// Evaluation with the separation `|r - s|` supplied separately, so that
    /// points very close to the diagonal keep full relative accuracy.
    pub fn eval_with_gap(&self, r: f64, s: f64, gap: f64) -> f64 {
        if self.closed_form {
            self.closed_form_d3(r, s, gap)
        } else {
            self.quadrature(r, s, gap)
        }
    }

    /// `2 pi [(r+s)^{alpha-1} - |r-s|^{alpha-1}] / (r s (alpha-1))`, written
    /// in terms of `x = min/max` to stay accurate near the diagonal and the origin.
    fn closed_form_d3(&self, r: f64, s: f64, gap: f64) -> f64 {
        let a1 = self.alpha - 1.0;
        let m = r.max(s);
        let x = r.min(s) / m;
        let bracket_over_x = if x < 1e-5 {
            2.0 + (a1 - 1.0) * (a1 - 2.0) * x * x / 3.0
        } else {
            // (1-x) = gap/m and 2 atanh(x) = ln((r+s)/gap)
            (gap / m).powf(a1) * (a1 * ((r + s) / gap).ln()).exp_m1() / (a1 * x)
        };
        2.0 * PI * m.powf(self.alpha - 3.0) * bracket_over_x
    }

    /// `|S^{d-2}| int_0^pi ((r-s)^2 + 4 r s sin^2(t/2))^{-(d-alpha)/2} sin^{d-2} t dt`
    /// on geometric panels refining toward `t = 0`.
    fn quadrature(&self, r: f64, s: f64, gap: f64) -> f64 {
        let df = self.d as f64;
        let expo = -(df - self.alpha) / 2.0;
        let diff2 = gap * gap;
        let rs4 = 4.0 * r * s;
        let f = |t: f64| {
            let h = (0.5 * t).sin();
            (diff2 + rs4 * h * h).powf(expo) * t.sin().powi(self.d as i32 - 2)
        };
        let delta = (gap / (r * s).sqrt()).max(1e-14);
        let mut total = 0.0;
        let mut a = 0.0;
        let mut b = delta.min(PI);
        loop {
            total += self.panel_rule.integrate(a, b, f);
            if b >= PI {
                break;
            }
            a = b;
            b = (2.0 * b).min(PI);
        }
        self.equator_area * total
    }
}

/// Rules used for cell integrals, chosen by distance from the evaluation point.
#[derive(Debug, Clone)]
pub struct CellRules {
    pub near: GaussRule,
    pub mid: GaussRule,
    pub far: GaussRule,
    pub singular: GaussRule,
}

impl Default for CellRules {
    fn default() -> Self {
        CellRules {
            near: GaussRule::new(8),
            mid: GaussRule::new(4),
            far: GaussRule::new(2),
            singular: GaussRule::new(16),
        }
    }
}

/// `int_a^b k(r, s) s^gamma ds` for a cell `[a, b]`.
pub fn cell_integral(
    kern: &AngularKernel,
    rules: &CellRules,
    r: f64,
    a: f64,
    b: f64,
    gamma: f64,
) -> f64 {
    let f = |s: f64| kern.eval(r, s) * s.powf(gamma);
    let fg = |s: f64, gap: f64| kern.eval_with_gap(r, s, gap) * s.powf(gamma);
    let grade = (4.0 / kern.alpha).max(2.0);
    if r > a && r < b {
        let left = if a == 0.0 {
            let m = 0.5 * r;
            origin_segment(kern, rules, r, m, gamma) + graded(&rules.singular, r, m - r, grade, fg)
        } else {
            graded(&rules.singular, r, a - r, grade, fg)
        };
        return left + graded(&rules.singular, r, b - r, grade, fg);
    }
    if a == 0.0 {
        return origin_segment(kern, rules, r, b, gamma);
    }
    let width = b - a;
    let dist = (r - 0.5 * (a + b)).abs() / width;
    let rule = if dist <= 2.5 {
        &rules.near
    } else if dist < 16.0 {
        &rules.mid
    } else {
        &rules.far
    };
    rule.integrate(a, b, f)
}

/// `int_0^b k(r, s) s^gamma ds` with `s = b z^{1/(gamma+1)}` absorbing the weight.
fn origin_segment(kern: &AngularKernel, rules: &CellRules, r: f64, b: f64, gamma: f64) -> f64 {
    let g1 = gamma + 1.0;
    let rule = if r < 4.0 * b {
        &rules.singular
    } else {
        &rules.near
    };
    let inner = rule.integrate(0.0, 1.0, |z| kern.eval(r, b * z.powf(1.0 / g1)));
    b.powf(g1) / g1 * inner
}

/// `int` over the segment from `c` to `c + len` with nodes clustered at `c`;
/// `f` receives the point and its distance from `c`.
fn graded(rule: &GaussRule, c: f64, len: f64, q: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut s = 0.0;
    for (z, w) in rule.nodes.iter().zip(&rule.weights) {
        let zq1 = z.powf(q - 1.0);
        let t = len * zq1 * z;
        s += w * q * zq1 * f(c + t, t.abs());
    }
    s * len.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_substitution() {
        let k = AngularKernel::new(3, 2.0);
        assert!((k.eval(2.0, 1.0) - 2.0 * PI).abs() < 1e-13);
        assert!((k.eval(1.0, 2.0) - k.eval(2.0, 1.0)).abs() < 1e-14);
    }

    #[test]
    fn closed_form_near_origin_and_diagonal() {
        let k = AngularKernel::new(3, 2.5);
        let direct = |r: f64, s: f64| {
            2.0 * PI * ((r + s).powf(1.5) - (r - s).abs().powf(1.5)) / (r * s * 1.5)
        };
        for (r, s) in [(1.0, 0.3), (1.0, 0.999), (2.0, 1e-3), (0.5, 7.0)] {
            let rel = (k.eval(r, s) - direct(r, s)).abs() / direct(r, s);
            assert!(rel < 1e-12, "{r} {s} {rel}");
        }
    }

    #[test]
    fn graded_integral_of_power() {
        let rule = GaussRule::new(16);
        // int_1^2 (s-1)^{-1/2} ds = 2
        let v = graded(&rule, 1.0, 1.0, 8.0, |_, t| t.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        // int_0^1 (1-s)^{-1/2} ds = 2, clustered at the right end
        let v = graded(&rule, 1.0, -1.0, 8.0, |_, t| t.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }
}
