//! Closed-form per-co-dimension bound calculators: the classical trickle-down
//! bound, the main-theorem bound, and the degree-based variant with its
//! per-level delta.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Classical trickle down: from `gamma_2 < 1/d`, with `1 - delta = d *
/// gamma_2`, bounds `gamma_k <= (1-delta) / (d - (k-2)(1-delta))`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalBounds {
    pub delta: f64,
    /// Bound per co-dimension `k` in `2..=d`.
    pub per_k: BTreeMap<usize, f64>,
    /// The coarse uniform bound `(1-delta)/(d*delta)`.
    pub coarse: f64,
}

pub fn classical_bound(gamma2: f64, d: usize) -> Result<ClassicalBounds> {
    if d == 0 {
        return Err(Error::BadParams("dimension must be positive".into()));
    }
    if gamma2 >= 1.0 / d as f64 {
        return Err(Error::ConditionUnsatisfiable(format!(
            "gamma_2 = {gamma2} >= 1/d = {}",
            1.0 / d as f64
        )));
    }
    let delta = (1.0 - d as f64 * gamma2).min(1.0);
    let one_minus = 1.0 - delta;
    let mut per_k = BTreeMap::new();
    for k in 2..=d {
        per_k.insert(k, one_minus / (d as f64 - (k as f64 - 2.0) * one_minus));
    }
    let coarse = one_minus / (d as f64 * delta);
    Ok(ClassicalBounds {
        delta,
        per_k,
        coarse,
    })
}

/// `c = 2 (1 + delta^2/10) / (1 + delta)`, the main theorem's constant.
pub fn main_c(delta: f64) -> f64 {
    2.0 * (1.0 + delta * delta / 10.0) / (1.0 + delta)
}

/// Main-theorem bound for the link of a face of co-dimension `k`:
/// `c (1-delta) / (delta (k-1))`.
pub fn main_bound(delta: f64, k: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if k < 2 {
        return Err(Error::BadParams("co-dimension must be >= 2".into()));
    }
    Ok(main_c(delta) * (1.0 - delta) / (delta * (k as f64 - 1.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm13Row {
    pub k: usize,
    /// The stated bound: `c(1-delta)/(k delta)` for `k >= Delta`, otherwise
    /// `c(1-delta_k)/(k delta)`.
    pub paper: f64,
    pub delta_k: Option<f64>,
    /// Re-derived bound `c(delta_k)(1-delta_k)/(k delta_k)`; tighter than
    /// the stated form whenever present.
    pub composed: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm13Bounds {
    pub c: f64,
    pub rows: Vec<Thm13Row>,
}

/// Degree-based variant bounds under the hypotheses
/// `gamma_2 <= delta^2/(10 (1 + ln Delta))` and
/// `gamma_2 <= (1-delta)/(Delta + ln Delta)`.
pub fn thm13_bounds(gamma2: f64, big_delta: usize, delta: f64, d: usize) -> Result<Thm13Bounds> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if big_delta == 0 || d == 0 {
        return Err(Error::BadParams("Delta and d must be positive".into()));
    }
    let g = gamma2.max(0.0);
    let ln_d = (big_delta as f64).ln();
    let h1 = delta * delta / (10.0 * (1.0 + ln_d));
    if g > h1 {
        return Err(Error::HypothesisViolated(format!(
            "gamma_2 = {g} > delta^2/(10(1+ln Delta)) = {h1}"
        )));
    }
    let h2 = (1.0 - delta) / (big_delta as f64 + ln_d);
    if g > h2 {
        return Err(Error::HypothesisViolated(format!(
            "gamma_2 = {g} > (1-delta)/(Delta+ln Delta) = {h2}"
        )));
    }
    let c = main_c(delta);
    let mut rows = Vec::new();
    for k in 2..=d + 1 {
        if k >= big_delta {
            rows.push(Thm13Row {
                k,
                paper: c * (1.0 - delta) / (k as f64 * delta),
                delta_k: None,
                composed: None,
            });
        } else {
            let shrink = (k as f64 + (k as f64).ln()) / (big_delta as f64 + ln_d);
            let delta_k = 1.0 - (1.0 - delta) * shrink;
            rows.push(Thm13Row {
                k,
                paper: c * (1.0 - delta_k) / (k as f64 * delta),
                delta_k: Some(delta_k),
                composed: Some(main_c(delta_k) * (1.0 - delta_k) / (k as f64 * delta_k)),
            });
        }
    }
    Ok(Thm13Bounds { c, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_formula_evaluation() {
        // d = 5, gamma2 = 0.1: delta = 0.5, k = 5 -> 0.5/(5 - 3*0.5) = 1/7
        let b = classical_bound(0.1, 5).unwrap();
        assert!((b.delta - 0.5).abs() < 1e-15);
        assert!((b.per_k[&5] - 1.0 / 7.0).abs() < 1e-15);
        assert!((b.coarse - 0.5 / 2.5).abs() < 1e-15);
    }

    #[test]
    fn classical_zero_gamma() {
        let b = classical_bound(0.0, 7).unwrap();
        for (_, v) in &b.per_k {
            assert_eq!(*v, 0.0);
        }
        assert_eq!(b.coarse, 0.0);
    }

    #[test]
    fn classical_boundary_rejected() {
        assert!(matches!(
            classical_bound(0.2, 5),
            Err(Error::ConditionUnsatisfiable(_))
        ));
    }

    #[test]
    fn main_constant_at_published_delta() {
        let delta = 1.0 - 2.0 / (193f64).sqrt();
        let c = main_c(delta);
        assert!((c - 1.1565).abs() < 1e-3, "c = {c}");
    }

    #[test]
    fn main_bound_vanishes_as_delta_to_one() {
        for k in 2..=6 {
            let b = main_bound(1.0 - 1e-9, k).unwrap();
            assert!(b < 1e-8, "k={k} bound {b}");
        }
        assert!(main_bound(0.0, 3).is_err());
        assert!(main_bound(0.5, 1).is_err());
    }

    #[test]
    fn thm13_reduces_when_delta_equals_d() {
        let delta = 0.9;
        let d = 4;
        let g = 0.005;
        let b = thm13_bounds(g, d, delta, d).unwrap();
        let c = main_c(delta);
        for row in &b.rows {
            if row.k >= d {
                assert!(row.delta_k.is_none());
                assert!((row.paper - c * (1.0 - delta) / (row.k as f64 * delta)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn thm13_hypothesis_violation() {
        assert!(matches!(
            thm13_bounds(0.5, 3, 0.5, 5),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn thm13_composed_is_tighter() {
        let b = thm13_bounds(0.001, 6, 0.9, 8).unwrap();
        for row in &b.rows {
            if let Some(comp) = row.composed {
                assert!(comp <= row.paper + 1e-15, "k={}", row.k);
                assert!(row.delta_k.unwrap() >= 0.9);
            }
        }
    }
}
