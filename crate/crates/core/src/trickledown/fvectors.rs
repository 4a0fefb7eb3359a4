//! Construction of the certificate vectors `f_S` from the pair-eigenvalue
//! table, via the auxiliary tables `g_{i,j}` and `h_i`.
//!
//! For a type subset `S`, on the induced dependency subgraph `G_S`:
//! `f_S(i) = 0` when `i` is isolated; `eps_{i,j} * g_{i,j}(deg_S(j))` when
//! `i` has the single neighbor `j`; and `(sum of neighbor eps) * h_i(deg_S(i))`
//! otherwise. `g_{i,j}(l) = 1 + 1.3 eps_{i,j} H_{l-1}` and `h_i` is the
//! geometric-style correction with constant `c = 1 + delta/2`.

use std::collections::BTreeMap;

use crate::complex::TypeSet;
use crate::error::{Error, Result};
use crate::partite::{DependencyGraph, EpsilonTable};
use crate::trickledown::conditions::EpsOrdering;
use crate::trickledown::harmonic::{harmonic, harmonic_tail, Accumulator};

/// Coefficient of the harmonic correction in `g`.
pub const G_COEFFICIENT: f64 = 1.3;

/// `c' = 1/2`, so `c = 1 + delta/2`.
pub const C_PRIME: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct FVectors {
    labels: Vec<usize>,
    delta: f64,
    c: f64,
    ordering: EpsOrdering,
    graph: DependencyGraph,
    eps: BTreeMap<(usize, usize), f64>,
    /// `f_S` per type subset `S` with `|S| <= parts - 2`, indexed by label.
    f: BTreeMap<TypeSet, BTreeMap<usize, f64>>,
    /// `h_i(l)` for `l = 1..=deg(i)`, stored at index `l - 1`.
    h: BTreeMap<usize, Vec<f64>>,
}

/// Case-1 internal inequality margin:
/// `(t-1) eps (g(t) - g(t-1)) - eps^2 g(t)^2`.
#[derive(Clone, Debug)]
pub struct Case1Margin {
    pub i: usize,
    pub j: usize,
    pub t: usize,
    pub margin: f64,
}

/// Case-2 internal inequality margin:
/// `(t-1)(h_i(t) - h_i(t-1)) - alpha_t h_i(t)^2` with `alpha_t` the largest
/// possible neighbor-eps sum at degree `t`.
#[derive(Clone, Debug)]
pub struct Case2Margin {
    pub i: usize,
    pub t: usize,
    pub margin: f64,
}

pub fn build_f_vectors(
    eps: &EpsilonTable,
    graph: &DependencyGraph,
    delta: f64,
    ordering: EpsOrdering,
) -> Result<FVectors> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let labels = eps.labels().to_vec();
    let parts = labels.len();
    if parts > crate::complex::SWEEP_DIM_CAP + 1 {
        return Err(Error::SizeCap(format!(
            "f-vector family over {parts} parts exceeds the sweep cap"
        )));
    }
    let c = 1.0 + C_PRIME * delta;
    let big_delta = graph.max_degree();

    let mut eps_map = BTreeMap::new();
    for a in 0..parts {
        for b in a + 1..parts {
            let (i, j) = (labels[a], labels[b]);
            eps_map.insert((i, j), eps.value(i, j));
        }
    }
    let eps_of = |i: usize, j: usize| -> f64 {
        let key = (i.min(j), i.max(j));
        eps_map.get(&key).copied().unwrap_or(0.0)
    };
    let g_of = |i: usize, j: usize, l: usize| -> f64 {
        1.0 + G_COEFFICIENT * eps_of(i, j) * harmonic(l - 1)
    };

    // h_i tables, one per part with degree >= 1.
    let mut h: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &i in &labels {
        let nbrs = graph.neighbors(i);
        let deg = nbrs.len();
        if deg == 0 {
            continue;
        }
        let h1 = nbrs
            .iter()
            .map(|j| g_of(i, j, big_delta))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut sorted: Vec<f64> = nbrs.iter().map(|j| eps_of(i, j)).collect();
        ordering.sort(&mut sorted);
        let mut table = vec![h1];
        for l in 2..=deg {
            let mut acc = Accumulator::new();
            acc.add(1.0);
            for (idx, e) in sorted.iter().take(l).enumerate() {
                acc.add(-c * e * harmonic_tail(l - 1, idx)?);
            }
            let denom = acc.total();
            if denom <= 0.0 {
                return Err(Error::DenominatorNonpositive {
                    part: i,
                    degree: l,
                    value: denom,
                });
            }
            table.push(h1 / denom);
        }
        h.insert(i, table);
    }

    // f_S for every S with |S| < parts - 1 (co-dimension >= 2).
    let mut f: BTreeMap<TypeSet, BTreeMap<usize, f64>> = BTreeMap::new();
    for mask in 0u64..(1 << parts) {
        let s = TypeSet(
            (0..parts)
                .filter(|a| mask >> a & 1 == 1)
                .fold(0u64, |acc, a| acc | 1 << labels[a]),
        );
        if s.len() + 2 > parts {
            continue;
        }
        let mut vec: BTreeMap<usize, f64> = BTreeMap::new();
        for &i in &labels {
            if s.contains(i) {
                vec.insert(i, 0.0);
                continue;
            }
            let nbrs_s = graph.neighbors(i).minus(s);
            let value = match nbrs_s.len() {
                0 => 0.0,
                1 => {
                    let j = nbrs_s.iter().next().unwrap();
                    let deg_j = graph.degree_in(j, s);
                    eps_of(i, j) * g_of(i, j, deg_j)
                }
                deg => {
                    let sum: f64 = nbrs_s.iter().map(|j| eps_of(i, j)).sum();
                    sum * h[&i][deg - 1]
                }
            };
            vec.insert(i, value);
        }
        f.insert(s, vec);
    }

    Ok(FVectors {
        labels,
        delta,
        c,
        ordering,
        graph: graph.clone(),
        eps: eps_map,
        f,
        h,
    })
}

impl FVectors {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ordering(&self) -> EpsOrdering {
        self.ordering
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    pub fn eps(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.eps.get(&key).copied().unwrap_or(0.0)
    }

    pub fn g(&self, i: usize, j: usize, l: usize) -> f64 {
        1.0 + G_COEFFICIENT * self.eps(i, j) * harmonic(l - 1)
    }

    /// `h_i(l)`; defined for `1 <= l <= deg(i)`.
    pub fn h(&self, i: usize, l: usize) -> Option<f64> {
        self.h.get(&i).and_then(|t| t.get(l - 1)).copied()
    }

    /// The subsets `S` for which `f_S` is defined.
    pub fn subsets(&self) -> impl Iterator<Item = TypeSet> + '_ {
        self.f.keys().copied()
    }

    pub fn f(&self, s: TypeSet) -> Option<&BTreeMap<usize, f64>> {
        self.f.get(&s)
    }

    pub fn f_value(&self, s: TypeSet, label: usize) -> f64 {
        self.f
            .get(&s)
            .and_then(|v| v.get(&label))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn max_f(&self, s: TypeSet) -> f64 {
        self.f
            .get(&s)
            .map(|v| v.values().fold(0.0f64, |a, &b| a.max(b)))
            .unwrap_or(0.0)
    }

    /// Exact residual of the disconnected-subgraph sum rule
    /// `f_S = sum over components I with |I| >= 2 of f_{[d] \ I}`;
    /// zero by construction.
    pub fn sum_rule_residual(&self) -> f64 {
        let all = TypeSet::from_labels(self.labels.iter().copied());
        let mut worst = 0.0f64;
        for (&s, vec) in &self.f {
            let comps = self.graph.components_of(s);
            if comps.len() <= 1 {
                continue;
            }
            for &i in &self.labels {
                let mut total = 0.0;
                for comp in &comps {
                    if comp.len() >= 2 {
                        total += self.f_value(all.minus(*comp), i);
                    }
                }
                worst = worst.max((vec[&i] - total).abs());
            }
        }
        worst
    }

    /// Exhaustive case-1 inequality margins for `t` up to the max degree.
    pub fn case1_margins(&self) -> Vec<Case1Margin> {
        let mut out = Vec::new();
        let big_delta = self.graph.max_degree();
        for &i in &self.labels {
            for j in self.graph.neighbors(i).iter() {
                let e = self.eps(i, j);
                for t in 2..=big_delta {
                    let gt = self.g(i, j, t);
                    let gt1 = self.g(i, j, t - 1);
                    let margin = (t as f64 - 1.0) * e * (gt - gt1) - e * e * gt * gt;
                    out.push(Case1Margin { i, j, t, margin });
                }
            }
        }
        out
    }

    /// Exhaustive case-2 inequality margins, with the worst admissible
    /// neighbor sum `alpha_t` (the `t` largest neighbor eps values).
    pub fn case2_margins(&self) -> Vec<Case2Margin> {
        let mut out = Vec::new();
        for &i in &self.labels {
            let deg = self.graph.degree(i);
            if deg < 2 {
                continue;
            }
            let mut sorted: Vec<f64> =
                self.graph.neighbors(i).iter().map(|j| self.eps(i, j)).collect();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for t in 2..=deg {
                let ht = self.h(i, t).unwrap();
                let ht1 = self.h(i, t - 1).unwrap();
                let alpha: f64 = sorted.iter().take(t).sum();
                let margin = (t as f64 - 1.0) * (ht - ht1) - alpha * ht * ht;
                out.push(Case2Margin { i, t, margin });
            }
        }
        out
    }

    /// Neighbor-eps sums; when condition 2 holds at the build delta these are
    /// all at most `1 - delta`.
    pub fn neighbor_sums(&self) -> Vec<(usize, f64)> {
        self.labels
            .iter()
            .map(|&i| {
                (
                    i,
                    self.graph.neighbors(i).iter().map(|j| self.eps(i, j)).sum(),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partite::DependencyGraph;
    use crate::trickledown::conditions::{check_main_conditions, EpsOrdering};
    use std::collections::BTreeMap as Map;

    fn table(parts: usize, pairs: &[((usize, usize), f64)]) -> (EpsilonTable, DependencyGraph) {
        let vals: Map<(usize, usize), f64> = pairs.iter().copied().collect();
        let t = EpsilonTable::from_values((0..parts).collect(), &vals);
        let g = DependencyGraph::from_table(&t, 1e-9);
        (t, g)
    }

    #[test]
    fn all_zero_gives_zero_vectors() {
        let (t, g) = table(4, &[]);
        let f = build_f_vectors(&t, &g, 0.5, EpsOrdering::Decreasing).unwrap();
        for s in f.subsets().collect::<Vec<_>>() {
            assert_eq!(f.max_f(s), 0.0);
        }
    }

    #[test]
    fn single_edge_gives_eps() {
        // G_S a single edge {0,1}: f_S(0) = eps * g(1) = eps
        let (t, g) = table(4, &[((0, 1), 0.07)]);
        let f = build_f_vectors(&t, &g, 0.5, EpsOrdering::Decreasing).unwrap();
        let s = TypeSet::from_labels([2usize, 3]);
        assert!((f.f_value(s, 0) - 0.07).abs() < 1e-15);
        assert!((f.f_value(s, 1) - 0.07).abs() < 1e-15);
        assert_eq!(f.f_value(s, 2), 0.0);
    }

    #[test]
    fn path_dependency_hand_evaluated() {
        // path 0 - 1 - 2 with uniform eps; f_empty(1) = 2 eps h_1(2),
        // h_1(2) = (1 + 1.3 eps H_1) / (1 - (1 + delta/2) eps (H_1(0) + H_1(1)))
        let e = 0.02;
        let delta = 0.5;
        let (t, g) = table(3, &[((0, 1), e), ((1, 2), e)]);
        let f = build_f_vectors(&t, &g, delta, EpsOrdering::Decreasing).unwrap();
        let h12 = (1.0 + 1.3 * e) / (1.0 - (1.0 + delta / 2.0) * e * 2.0);
        let expect = 2.0 * e * h12;
        let got = f.f_value(TypeSet::EMPTY, 1);
        assert!((got - expect).abs() < 1e-14, "got {got} expect {expect}");
        // endpoints have degree 1 with neighbor of degree 2:
        // f_empty(0) = eps * g_{0,1}(2) = eps (1 + 1.3 eps)
        let got0 = f.f_value(TypeSet::EMPTY, 0);
        assert!((got0 - e * (1.0 + 1.3 * e)).abs() < 1e-15);
    }

    #[test]
    fn denominator_nonpositive_detected() {
        // huge eps makes 1 - c * sum negative at degree 2
        let (t, g) = table(3, &[((0, 1), 0.6), ((1, 2), 0.6)]);
        let err = build_f_vectors(&t, &g, 0.9, EpsOrdering::Decreasing).unwrap_err();
        assert!(matches!(err, Error::DenominatorNonpositive { .. }));
    }

    #[test]
    fn sum_rule_exact() {
        // two components {0,1} and {2,3,4}, plus isolated 5
        let (t, g) = table(
            6,
            &[((0, 1), 0.03), ((2, 3), 0.02), ((3, 4), 0.025), ((2, 4), 0.01)],
        );
        let f = build_f_vectors(&t, &g, 0.6, EpsOrdering::Decreasing).unwrap();
        assert_eq!(f.sum_rule_residual(), 0.0);
    }

    #[test]
    fn internal_inequalities_hold_under_conditions() {
        let e = 1.0 / (400f64).sqrt();
        let (t, g) = table(
            5,
            &[
                ((0, 1), e),
                ((1, 2), e * 0.7),
                ((2, 3), e * 0.5),
                ((3, 4), e),
                ((0, 4), e * 0.9),
            ],
        );
        // pick delta where the conditions pass
        let delta = crate::trickledown::conditions::max_feasible_delta(
            &t,
            &g,
            crate::trickledown::conditions::ConditionVariant::Main,
            EpsOrdering::Decreasing,
        )
        .unwrap()
        .expect("feasible");
        let rep = check_main_conditions(&t, &g, delta, EpsOrdering::Decreasing).unwrap();
        assert!(rep.pass);
        let f = build_f_vectors(&t, &g, delta, EpsOrdering::Decreasing).unwrap();
        for m in f.case1_margins() {
            assert!(m.margin >= -1e-10, "case1 {m:?}");
        }
        for m in f.case2_margins() {
            assert!(m.margin >= -1e-10, "case2 {m:?}");
        }
        for (i, s) in f.neighbor_sums() {
            assert!(s <= 1.0 - delta + 1e-12, "part {i} sum {s}");
        }
    }
}
