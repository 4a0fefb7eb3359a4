//! Threshold arithmetic for uniform-eps, bounded-degree dependency patterns:
//! evaluates the admissibility conditions symbolically for a given maximum
//! degree, finds the maximal feasible delta, and searches minimal parameter
//! thresholds of the form `eps = s/sqrt(p)`, `delta = 1 - c/sqrt(p)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::trickledown::bounds::main_c;
use crate::trickledown::conditions::CONDITION_MARGIN_TOL;
use crate::trickledown::harmonic::{harmonic, harmonic_tail, Accumulator};

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub max_degree: usize,
    pub eps: f64,
    /// The evaluated delta, when one was supplied.
    pub delta: Option<f64>,
    pub condition1_margin: Option<f64>,
    pub condition2_margin: Option<f64>,
    pub pass: Option<bool>,
    /// Largest feasible delta for this `(Delta, eps)` pattern.
    pub delta_star: Option<f64>,
    /// `c = 2(1 + delta^2/10)/(1 + delta)` at the evaluated delta.
    pub c: Option<f64>,
    /// `c (1 - delta) / delta`: the coefficient of `1/(k-1)` in the
    /// resulting local-expansion profile.
    pub bound_coeff: Option<f64>,
    pub margin_tol: f64,
}

fn uniform_margins(max_degree: usize, eps: f64, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let w1 = if max_degree >= 2 {
        harmonic(max_degree - 1)
    } else {
        1.0
    };
    let m1 = delta * delta / 10.0 - eps * w1;
    let mut acc = Accumulator::new();
    acc.add(1.0);
    acc.add(-delta);
    for l in 0..max_degree {
        acc.add(-eps * harmonic_tail(max_degree - 1, l)?);
    }
    Ok((m1, acc.total()))
}

/// Evaluates the conditions for the uniform pattern: every part has degree
/// `max_degree` in the dependency graph and every edge carries `eps`.
pub fn scenario_calculator(
    max_degree: usize,
    eps: f64,
    delta: Option<f64>,
) -> Result<ScenarioReport> {
    if max_degree == 0 {
        return Err(Error::BadParams("Delta must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::BadParams(format!("eps {eps} out of [0, 1)")));
    }
    let mut report = ScenarioReport {
        max_degree,
        eps,
        delta,
        condition1_margin: None,
        condition2_margin: None,
        pass: None,
        delta_star: None,
        c: None,
        bound_coeff: None,
        margin_tol: CONDITION_MARGIN_TOL,
    };

    // feasible upper end for condition 2, then validate condition 1 there
    let cond2 = |d: f64| -> Result<bool> {
        Ok(uniform_margins(max_degree, eps, d)?.1 >= -CONDITION_MARGIN_TOL)
    };
    let mut lo = 1e-9;
    let mut hi = 1.0 - 1e-9;
    if cond2(lo)? {
        if cond2(hi)? {
            lo = hi;
        } else {
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if cond2(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let (m1, _) = uniform_margins(max_degree, eps, lo)?;
        if m1 >= -CONDITION_MARGIN_TOL {
            report.delta_star = Some(lo);
        }
    }

    if let Some(d) = delta {
        let (m1, m2) = uniform_margins(max_degree, eps, d)?;
        report.condition1_margin = Some(m1);
        report.condition2_margin = Some(m2);
        report.pass = Some(m1 >= -CONDITION_MARGIN_TOL && m2 >= -CONDITION_MARGIN_TOL);
        report.c = Some(main_c(d));
        report.bound_coeff = Some(main_c(d) * (1.0 - d) / d);
    } else if let Some(star) = report.delta_star {
        report.c = Some(main_c(star));
        report.bound_coeff = Some(main_c(star) * (1.0 - star) / star);
    }
    Ok(report)
}

/// Minimal integer `p` such that the uniform pattern with
/// `eps = eps_scale/sqrt(p)` and `delta = 1 - delta_coeff/sqrt(p)` passes
/// both conditions, or `None` when no `p` up to the cap does.
pub fn min_passing_p(
    max_degree: usize,
    eps_scale: f64,
    delta_coeff: f64,
) -> Result<Option<u64>> {
    let pass_at = |p: u64| -> Result<bool> {
        let root = (p as f64).sqrt();
        let eps = eps_scale / root;
        let delta = 1.0 - delta_coeff / root;
        if !(delta > 0.0 && delta < 1.0) || !(0.0..1.0).contains(&eps) {
            return Ok(false);
        }
        let (m1, m2) = uniform_margins(max_degree, eps, delta)?;
        Ok(m1 >= -CONDITION_MARGIN_TOL && m2 >= -CONDITION_MARGIN_TOL)
    };
    // both margins are monotone in p once delta is in range
    let cap: u64 = 1 << 40;
    let mut hi = 2u64;
    while hi < cap && !pass_at(hi)? {
        hi *= 2;
    }
    if !pass_at(hi)? {
        return Ok(None);
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if pass_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ko_threshold_passes_at_193() {
        let p = 193f64;
        let eps = 1.0 / p.sqrt();
        let delta = 1.0 - 2.0 / p.sqrt();
        let rep = scenario_calculator(2, eps, Some(delta)).unwrap();
        assert_eq!(rep.pass, Some(true));
        assert!(rep.condition2_margin.unwrap().abs() <= 1e-12);
        let c = rep.c.unwrap();
        assert!((c - 1.1565).abs() < 1e-3, "c = {c}");
    }

    #[test]
    fn ko_threshold_fails_at_150() {
        let p = 150f64;
        let eps = 1.0 / p.sqrt();
        let delta = 1.0 - 2.0 / p.sqrt();
        let rep = scenario_calculator(2, eps, Some(delta)).unwrap();
        assert_eq!(rep.pass, Some(false));
    }

    #[test]
    fn op_abc_threshold_passes_at_376() {
        let p = 376f64;
        let eps = (2.0 / p).sqrt();
        let delta = 1.0 - 2.0 * (2.0 / p).sqrt();
        let rep = scenario_calculator(2, eps, Some(delta)).unwrap();
        assert_eq!(rep.pass, Some(true));
        // condition-1 margin is nearly tight
        assert!(rep.condition1_margin.unwrap() < 1e-4);
    }

    #[test]
    fn delta_star_for_uniform_pattern() {
        // Delta = 2, eps = 1/sqrt(193): delta* = 1 - 2 eps (condition 2 tight)
        let eps = 1.0 / (193f64).sqrt();
        let rep = scenario_calculator(2, eps, None).unwrap();
        let star = rep.delta_star.unwrap();
        assert!((star - (1.0 - 2.0 * eps)).abs() < 1e-8, "star {star}");
        // all-zero eps: delta* -> 1
        let rep = scenario_calculator(2, 0.0, None).unwrap();
        assert!((rep.delta_star.unwrap() - (1.0 - 1e-9)).abs() < 1e-12);
    }

    #[test]
    fn minimal_p_search_monotone() {
        // KO shape: eps = 1/sqrt(p), delta = 1 - 2/sqrt(p)
        let p = min_passing_p(2, 1.0, 2.0).unwrap().unwrap();
        // direct check of the boundary
        assert!(scenario_calculator(
            2,
            1.0 / (p as f64).sqrt(),
            Some(1.0 - 2.0 / (p as f64).sqrt())
        )
        .unwrap()
        .pass
        .unwrap());
        assert!(!scenario_calculator(
            2,
            1.0 / ((p - 1) as f64).sqrt(),
            Some(1.0 - 2.0 / ((p - 1) as f64).sqrt())
        )
        .unwrap()
        .pass
        .unwrap());
        assert!(p <= 193, "p = {p}");
    }

    #[test]
    fn d_family_threshold_reported_not_assumed() {
        // Delta = 3, eps = sqrt(2/p), delta = 1 - 3.5 sqrt(2/p): report the
        // exact minimal p; condition 2 is tight by construction.
        let scale = 2f64.sqrt();
        let p = min_passing_p(3, scale, 3.5 * scale).unwrap().unwrap();
        let root = (p as f64).sqrt();
        let rep = scenario_calculator(3, scale / root, Some(1.0 - 3.5 * scale / root)).unwrap();
        assert_eq!(rep.pass, Some(true));
        assert!(rep.condition2_margin.unwrap().abs() <= 1e-12);
        // the minimal passing p for this family exceeds 729
        let rep729 = scenario_calculator(
            3,
            scale / (729f64).sqrt(),
            Some(1.0 - 3.5 * scale / (729f64).sqrt()),
        )
        .unwrap();
        assert_eq!(rep729.pass, Some(false));
        assert!(rep729.condition1_margin.unwrap() < 0.0);
        assert!(rep729.condition2_margin.unwrap().abs() <= 1e-12);
        assert_eq!(p, 919);
    }
}
