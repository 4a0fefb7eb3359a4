//! The trickle-down admissibility conditions: per-part harmonic-weighted
//! bounds on the pair eigenvalue table, in three variants, plus the maximal
//! feasible delta search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partite::{DependencyGraph, EpsilonTable};
use crate::trickledown::harmonic::{harmonic, harmonic_tail, Accumulator};

/// Margins within this of zero still count as passing; published thresholds
/// sit exactly on the boundary and the inputs themselves carry one rounding.
pub const CONDITION_MARGIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVariant {
    /// Per-part degrees and `H_{Delta(i)-1}` weights over dependency
    /// neighbors.
    Main,
    /// `H_d`-weighted average over all `d` other parts.
    Averaged,
    /// Uniform bound via `gamma_2`, degrees entering only through `Delta`.
    DeltaUniform,
}

/// How the sorted eigenvalue list is paired with the decreasing harmonic
/// weights. `Decreasing` (largest eps gets the largest weight) maximizes the
/// sum and is the conservative default; `Increasing` is the literal reading
/// of the theorem statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsOrdering {
    Decreasing,
    Increasing,
}

impl EpsOrdering {
    pub(crate) fn sort(&self, values: &mut [f64]) {
        match self {
            EpsOrdering::Decreasing => values.sort_by(|a, b| b.partial_cmp(a).unwrap()),
            EpsOrdering::Increasing => values.sort_by(|a, b| a.partial_cmp(b).unwrap()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartMargins {
    pub part: usize,
    pub condition1: f64,
    pub condition2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub variant: ConditionVariant,
    pub delta: f64,
    pub ordering: EpsOrdering,
    pub per_part: Vec<PartMargins>,
    pub pass: bool,
    /// Margins at or above `-margin_tol` count as passing.
    pub margin_tol: f64,
}

impl ConditionReport {
    pub fn worst_margin(&self) -> f64 {
        self.per_part
            .iter()
            .flat_map(|m| [m.condition1, m.condition2])
            .fold(f64::INFINITY, f64::min)
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst_margin() >= -self.margin_tol;
        self
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(())
}

/// Per-part conditions of the main theorem:
/// `eps_{i,j} * H_{Delta-1} <= delta^2/10` for all `j != i`, and the
/// harmonic-weighted neighbor sum `<= 1 - delta`.
pub fn check_main_conditions(
    eps: &EpsilonTable,
    graph: &DependencyGraph,
    delta: f64,
    ordering: EpsOrdering,
) -> Result<ConditionReport> {
    check_delta(delta)?;
    let labels = eps.labels();
    let big_delta = graph.max_degree();
    // For Delta <= 1 the recursion is vacuous; use a conservative floor of 1
    // instead of H_0 = 0 in condition 1.
    let w1 = if big_delta >= 2 {
        harmonic(big_delta - 1)
    } else {
        1.0
    };
    let mut per_part = Vec::with_capacity(labels.len());
    for &i in labels {
        let worst_pair = labels
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| eps.value(i, j))
            .fold(0.0f64, f64::max);
        let condition1 = delta * delta / 10.0 - worst_pair * w1;

        let mut nbr: Vec<f64> = graph.neighbors(i).iter().map(|j| eps.value(i, j)).collect();
        ordering.sort(&mut nbr);
        let di = nbr.len();
        let mut acc = Accumulator::new();
        acc.add(1.0);
        acc.add(-delta);
        for (l, e) in nbr.iter().enumerate() {
            // weight H_{Delta(i)-1}(l), i.e. H_{Delta(i)-1}(ell - 1) for the
            // 1-based ell; the H_n(0) = H_n(1) convention lives in
            // harmonic_tail.
            let w = harmonic_tail(di - 1, l)?;
            acc.add(-e * w);
        }
        let condition2 = acc.total();
        per_part.push(PartMargins {
            part: i,
            condition1,
            condition2,
        });
    }
    Ok(ConditionReport {
        variant: ConditionVariant::Main,
        delta,
        ordering,
        per_part,
        pass: false,
        margin_tol: CONDITION_MARGIN_TOL,
    }
    .finish())
}

/// Averaged variant: weights `H_d(l-1)/d` over all `d` other parts and
/// `eps * H_d <= delta^2/10`. Margins are reported in the stated (scaled by
/// `1/d`) form.
pub fn check_averaged_conditions(
    eps: &EpsilonTable,
    delta: f64,
    ordering: EpsOrdering,
) -> Result<ConditionReport> {
    check_delta(delta)?;
    let labels = eps.labels();
    let d = labels.len() - 1;
    if d == 0 {
        return Err(Error::BadParams("need at least two parts".into()));
    }
    let hd = harmonic(d);
    let mut per_part = Vec::with_capacity(labels.len());
    for &i in labels {
        let mut others: Vec<f64> = labels
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| eps.value(i, j))
            .collect();
        let worst_pair = others.iter().copied().fold(0.0f64, f64::max);
        let condition1 = delta * delta / 10.0 - worst_pair * hd;

        ordering.sort(&mut others);
        let mut acc = Accumulator::new();
        acc.add(1.0);
        acc.add(-delta);
        for (l, e) in others.iter().enumerate() {
            acc.add(-e * harmonic_tail(d, l)?);
        }
        let condition2 = acc.total() / d as f64;
        per_part.push(PartMargins {
            part: i,
            condition1,
            condition2,
        });
    }
    Ok(ConditionReport {
        variant: ConditionVariant::Averaged,
        delta,
        ordering,
        per_part,
        pass: false,
        margin_tol: CONDITION_MARGIN_TOL,
    }
    .finish())
}

/// Uniform variant: `gamma_2 <= delta^2 / (10 (1 + ln Delta))` and
/// `gamma_2 <= (1 - delta) / (Delta + ln Delta)`.
pub fn check_delta_uniform(gamma2: f64, big_delta: usize, delta: f64) -> Result<ConditionReport> {
    check_delta(delta)?;
    if big_delta == 0 {
        return Err(Error::BadParams("Delta must be at least 1".into()));
    }
    let g = gamma2.max(0.0);
    let ln_d = (big_delta as f64).ln();
    let condition1 = delta * delta / (10.0 * (1.0 + ln_d)) - g;
    let condition2 = (1.0 - delta) / (big_delta as f64 + ln_d) - g;
    Ok(ConditionReport {
        variant: ConditionVariant::DeltaUniform,
        delta,
        ordering: EpsOrdering::Decreasing,
        per_part: vec![PartMargins {
            part: 0,
            condition1,
            condition2,
        }],
        pass: false,
        margin_tol: CONDITION_MARGIN_TOL,
    }
    .finish())
}

fn margins_at(
    eps: &EpsilonTable,
    graph: &DependencyGraph,
    variant: ConditionVariant,
    ordering: EpsOrdering,
    delta: f64,
) -> Result<(f64, f64)> {
    let report = match variant {
        ConditionVariant::Main => check_main_conditions(eps, graph, delta, ordering)?,
        ConditionVariant::Averaged => check_averaged_conditions(eps, delta, ordering)?,
        ConditionVariant::DeltaUniform => {
            check_delta_uniform(eps.max_value(), graph.max_degree().max(1), delta)?
        }
    };
    let worst1 = report
        .per_part
        .iter()
        .map(|m| m.condition1)
        .fold(f64::INFINITY, f64::min);
    let worst2 = report
        .per_part
        .iter()
        .map(|m| m.condition2)
        .fold(f64::INFINITY, f64::min);
    Ok((worst1, worst2))
}

/// Largest delta for which the chosen variant passes, or `None`.
///
/// Condition 2's margin decreases in delta while condition 1's increases, so
/// the feasible set is an interval; its upper end is located by bisection to
/// 1e-9 and condition 1 is validated there.
pub fn max_feasible_delta(
    eps: &EpsilonTable,
    graph: &DependencyGraph,
    variant: ConditionVariant,
    ordering: EpsOrdering,
) -> Result<Option<f64>> {
    let tol = CONDITION_MARGIN_TOL;
    let cond2 = |delta: f64| -> Result<bool> {
        Ok(margins_at(eps, graph, variant, ordering, delta)?.1 >= -tol)
    };
    let mut lo = 1e-9;
    let mut hi = 1.0 - 1e-9;
    if !cond2(lo)? {
        return Ok(None);
    }
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
    let (worst1, _) = margins_at(eps, graph, variant, ordering, lo)?;
    Ok((worst1 >= -tol).then_some(lo))
}
