//! Verification of a certificate family against a concrete complex: the
//! scalar inequalities (cap, base case, recursion, disconnected sum rule)
//! and the matrix positive-semidefiniteness conditions, plus the certified
//! bound profile against exact eigenvalues.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::complex::{Face, TypeSet, WeightedComplex};
use crate::error::{Error, Result};
use crate::partite::group_facets_by_projection;
use crate::spectra::{facet_groups_of_codim, skeleton_from_group};
use crate::trickledown::bounds::{classical_bound, main_bound, thm13_bounds};
use crate::trickledown::fvectors::FVectors;
use crate::trickledown::harmonic::compensated_sum;

/// Slack for margins that compare exact certificate arithmetic.
pub const EXACT_MARGIN_TOL: f64 = 1e-12;

/// Slack for margins that involve an eigensolve.
pub const EIG_MARGIN_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ScalarReport {
    pub pass: bool,
    /// Min over connected `G_S` of `(k-1)^2/(3k-1) - max_i f_S(i)`.
    pub worst_cap_margin: f64,
    /// Min over co-dimension-2 faces with connected `G_S` of
    /// `max f_S - lambda_2(P_tau)`.
    pub worst_base_margin: f64,
    /// Min over `(S, i)` with `k >= 3` of
    /// `(k-2) f_S(i) - f_S(i)^2 - sum_j f_{S+j}(i)`.
    pub worst_recursion_margin: f64,
    /// Max deviation from the disconnected-component sum rule.
    pub worst_sum_rule_residual: f64,
    pub exact_tol: f64,
    pub eig_tol: f64,
}

/// Checks every type subset: connected subgraphs get the cap plus the base
/// case (measured eigenvalues, co-dimension 2) or the recursion
/// (co-dimension >= 3); disconnected subgraphs get the exact sum rule.
pub fn verify_scalar_conditions(x: &WeightedComplex, f: &FVectors) -> Result<ScalarReport> {
    check_labels(x, f)?;
    let parts = f.labels().len();
    let graph = f.graph();
    let all = x.all_types();

    let mut worst_cap = f64::INFINITY;
    let mut worst_recursion = f64::INFINITY;
    let mut worst_sum_rule = 0.0f64;
    let mut base_jobs: Vec<(TypeSet, Face, Vec<usize>)> = Vec::new();

    for s in f.subsets() {
        let k = parts - s.len();
        let connected = graph.components_of(s).len() == 1;
        if !connected {
            let mut total: BTreeMap<usize, f64> = BTreeMap::new();
            for comp in graph.components_of(s) {
                if comp.len() >= 2 {
                    for &i in f.labels() {
                        *total.entry(i).or_insert(0.0) += f.f_value(all.minus(comp), i);
                    }
                }
            }
            for &i in f.labels() {
                let dev = (f.f_value(s, i) - total.get(&i).copied().unwrap_or(0.0)).abs();
                worst_sum_rule = worst_sum_rule.max(dev);
            }
            continue;
        }
        let k1 = k as f64 - 1.0;
        worst_cap = worst_cap.min(k1 * k1 / (3.0 * k as f64 - 1.0) - f.max_f(s));
        if k == 2 {
            for (face, ids) in group_facets_by_projection(x, s) {
                base_jobs.push((s, face, ids));
            }
        } else {
            for i in s.iter() {
                // support constraint: f_S vanishes on S
                debug_assert_eq!(f.f_value(s, i), 0.0);
            }
            for i in all.minus(s).iter() {
                let fi = f.f_value(s, i);
                let lhs = compensated_sum(
                    all.minus(s)
                        .iter()
                        .filter(|&j| j != i)
                        .map(|j| f.f_value(s.union(TypeSet::singleton(j)), i)),
                );
                let rhs = (k as f64 - 2.0) * fi - fi * fi;
                worst_recursion = worst_recursion.min(rhs - lhs);
            }
        }
    }

    let base_margins: Vec<Result<f64>> = base_jobs
        .par_iter()
        .map(|(s, face, ids)| {
            let g = skeleton_from_group(x, face, ids);
            let lam = g.second_eigenvalue().map_err(|e| match e {
                Error::Disconnected { .. } => Error::Disconnected {
                    witness: Some(x.face_names(face)),
                },
                other => other,
            })?;
            Ok(f.max_f(*s) - lam)
        })
        .collect();
    let mut worst_base = f64::INFINITY;
    for m in base_margins {
        worst_base = worst_base.min(m?);
    }

    let pass = worst_cap >= -EXACT_MARGIN_TOL
        && worst_recursion >= -EXACT_MARGIN_TOL
        && worst_sum_rule <= EXACT_MARGIN_TOL
        && worst_base >= -EIG_MARGIN_TOL;
    Ok(ScalarReport {
        pass,
        worst_cap_margin: worst_cap,
        worst_base_margin: worst_base,
        worst_recursion_margin: worst_recursion,
        worst_sum_rule_residual: worst_sum_rule,
        exact_tol: EXACT_MARGIN_TOL,
        eig_tol: EIG_MARGIN_TOL,
    })
}

#[derive(Clone, Debug)]
pub struct MatrixReport {
    pub pass: bool,
    /// Min eigenvalue of `M - (Pi P - 2 pi pi^T)` over co-dimension-2 faces.
    pub worst_base_psd: f64,
    /// Min entry of `Pi/5 - M` over co-dimension-2 faces.
    pub worst_base_cap: f64,
    /// Min entry of `((k-1)/(3k-1)) Pi - M`, `k >= 3`, connected subgraph.
    pub worst_cap: f64,
    /// Min entry of `M - ((k-1)/(k-2)) M Pi^{-1} M - E[M_{tau+x}]`.
    pub worst_recursion: f64,
    /// Max deviation of `M_tau` from the direct sum over product components.
    pub max_product_deviation: f64,
    /// Max deviation of `rho(Pi^{-1} M)` from `max_i f_S(i)/(k-1)`.
    pub rho_consistency: f64,
    pub psd_tol: f64,
}

/// PSD checks of the matrix conditions with the diagonal certificate
/// matrices `M_tau = Pi_tau D_S / (k-1)`. Tolerances are scaled by the
/// matrix 1-norm.
pub fn verify_matrix_conditions(
    x: &WeightedComplex,
    f: &FVectors,
    tol: f64,
) -> Result<MatrixReport> {
    check_labels(x, f)?;
    let parts = f.labels().len();
    let graph = f.graph();
    let all = x.all_types();

    #[derive(Default, Clone)]
    struct Acc {
        base_psd: f64,
        base_cap: f64,
        cap: f64,
        recursion: f64,
        product_dev: f64,
        rho: f64,
    }
    impl Acc {
        fn new() -> Self {
            Acc {
                base_psd: f64::INFINITY,
                base_cap: f64::INFINITY,
                cap: f64::INFINITY,
                recursion: f64::INFINITY,
                product_dev: 0.0,
                rho: 0.0,
            }
        }
        fn merge(mut self, o: Acc) -> Acc {
            self.base_psd = self.base_psd.min(o.base_psd);
            self.base_cap = self.base_cap.min(o.base_cap);
            self.cap = self.cap.min(o.cap);
            self.recursion = self.recursion.min(o.recursion);
            self.product_dev = self.product_dev.max(o.product_dev);
            self.rho = self.rho.max(o.rho);
            self
        }
    }

    let mut jobs: Vec<(usize, Face, Vec<usize>)> = Vec::new();
    for k in 2..=parts {
        for (face, ids) in facet_groups_of_codim(x, k) {
            jobs.push((k, face, ids));
        }
    }

    let acc = jobs
        .par_iter()
        .map(|(k, face, ids)| -> Result<Acc> {
            let k = *k;
            let g = skeleton_from_group(x, face, ids);
            let s = x.type_set_of(face);
            let n = g.vertex_count();
            let pi = g.level0();
            let type_of = |v: usize| x.type_of(g.parent_vertices()[v]).unwrap();
            let m: Vec<f64> = (0..n)
                .map(|v| pi[v] * f.f_value(s, type_of(v)) / (k as f64 - 1.0))
                .collect();
            let mut acc = Acc::new();

            // rho(Pi^{-1} M) vs max_i f_S(i)/(k-1)
            let rho_m = (0..n)
                .map(|v| f.f_value(s, type_of(v)) / (k as f64 - 1.0))
                .fold(0.0f64, f64::max);
            acc.rho = (rho_m - f.max_f(s) / (k as f64 - 1.0)).abs();

            if k == 2 {
                let mut diff = DMatrix::zeros(n, n);
                for a in 0..n {
                    for b in 0..n {
                        let pp = if a == b {
                            0.0
                        } else {
                            g.edge_weight(a, b) / (k as f64 * (k as f64 - 1.0))
                        };
                        diff[(a, b)] = -(pp - 2.0 * pi[a] * pi[b]);
                        if a == b {
                            diff[(a, b)] += m[a];
                        }
                    }
                }
                acc.base_psd = min_eig_scaled(&diff);
                acc.base_cap = (0..n)
                    .map(|v| pi[v] / 5.0 - m[v])
                    .fold(f64::INFINITY, f64::min);
                return Ok(acc);
            }

            let comps = graph.components_of(s);
            if comps.len() == 1 {
                let ratio = (k as f64 - 1.0) / (3.0 * k as f64 - 1.0);
                acc.cap = (0..n)
                    .map(|v| ratio * pi[v] - m[v])
                    .fold(f64::INFINITY, f64::min);
                let scale = k as f64 * (k as f64 - 1.0) * (k as f64 - 2.0);
                let mut worst = f64::INFINITY;
                for y in 0..n {
                    let mut e = 0.0;
                    for v in 0..n {
                        if v != y {
                            let ty = type_of(y);
                            e += g.edge_weight(v, y)
                                * f.f_value(s.union(TypeSet::singleton(type_of(v))), ty);
                        }
                    }
                    e /= scale;
                    let resid = m[y]
                        - (k as f64 - 1.0) / (k as f64 - 2.0) * m[y] * m[y] / pi[y]
                        - e;
                    worst = worst.min(resid);
                }
                acc.recursion = worst;
            } else {
                // product branch: per component, every admissible
                // conditioning face must reproduce the block of M_tau
                let mut dev = 0.0f64;
                for comp in &comps {
                    if comp.len() < 2 {
                        for v in 0..n {
                            if comp.contains(type_of(v)) {
                                dev = dev.max(m[v].abs());
                            }
                        }
                        continue;
                    }
                    let ki = comp.len() as f64;
                    let rest = all.minus(s).minus(*comp);
                    // distinct projections of the group facets onto `rest`
                    let mut projections: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
                    for &fi in ids {
                        let proj: Vec<u32> = x.facets()[fi]
                            .verts
                            .iter()
                            .copied()
                            .filter(|&v| rest.contains(x.type_of(v).unwrap()))
                            .collect();
                        projections.entry(Face::new(proj)).or_default().push(fi);
                    }
                    let f_comp = all.minus(*comp);
                    for (_, sub_ids) in projections {
                        let total: f64 =
                            sub_ids.iter().map(|&fi| x.facets()[fi].weight).sum();
                        let mut mass: BTreeMap<usize, f64> = BTreeMap::new();
                        for &fi in &sub_ids {
                            for &v in &x.facets()[fi].verts {
                                let t = x.type_of(v).unwrap();
                                if comp.contains(t) {
                                    let local = g
                                        .parent_vertices()
                                        .binary_search(&v)
                                        .expect("vertex in link");
                                    *mass.entry(local).or_insert(0.0) +=
                                        x.facets()[fi].weight;
                                }
                            }
                        }
                        for (local, u) in mass {
                            let pi_sub = u / (ki * total);
                            let rhs = ki * pi_sub * f.f_value(f_comp, type_of(local))
                                / (k as f64 * (k as f64 - 1.0));
                            dev = dev.max((m[local] - rhs).abs());
                        }
                    }
                }
                acc.product_dev = dev;
            }
            Ok(acc)
        })
        .try_reduce(Acc::new, |a, b| Ok(a.merge(b)))?;

    let pass = acc.base_psd >= -tol
        && acc.base_cap >= -tol
        && acc.cap >= -tol
        && acc.recursion >= -tol
        && acc.product_dev <= tol.max(1e-10)
        && acc.rho <= EXACT_MARGIN_TOL;
    Ok(MatrixReport {
        pass,
        worst_base_psd: acc.base_psd,
        worst_base_cap: acc.base_cap,
        worst_cap: acc.cap,
        worst_recursion: acc.recursion,
        max_product_deviation: acc.product_dev,
        rho_consistency: acc.rho,
        psd_tol: tol,
    })
}

/// Minimum eigenvalue of a symmetric matrix, normalized by its 1-norm when
/// that exceeds 1.
fn min_eig_scaled(m: &DMatrix<f64>) -> f64 {
    let norm1 = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let sym = (m + m.transpose()) * 0.5;
    let min = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if norm1 > 1.0 {
        min / norm1
    } else {
        min
    }
}

#[derive(Clone, Debug)]
pub struct BoundRow {
    pub codim: usize,
    pub exact: f64,
    /// Certified: `max_S max_i f_S(i)/(k-1)` over subsets of the level.
    pub certified: f64,
    pub classical: Option<f64>,
    pub thm13: Option<f64>,
    pub main: f64,
    pub slack: f64,
}

#[derive(Clone, Debug)]
pub struct BoundProfile {
    pub rows: Vec<BoundRow>,
    /// Per type subset: (certified bound, exact worst eigenvalue).
    pub per_type: BTreeMap<TypeSet, (f64, f64)>,
}

/// Exact worst eigenvalues against every bound method. Fails with
/// `CertificateInvalid` when the scalar verification does not pass.
pub fn bound_profile(x: &WeightedComplex, f: &FVectors) -> Result<BoundProfile> {
    let scalar = verify_scalar_conditions(x, f)?;
    if !scalar.pass {
        return Err(Error::CertificateInvalid(format!(
            "scalar conditions failed: cap {:.3e}, base {:.3e}, recursion {:.3e}, sum {:.3e}",
            scalar.worst_cap_margin,
            scalar.worst_base_margin,
            scalar.worst_recursion_margin,
            scalar.worst_sum_rule_residual
        )));
    }
    let parts = f.labels().len();
    let d = parts - 1;
    let delta = f.delta();

    let mut per_type: BTreeMap<TypeSet, (f64, f64)> = BTreeMap::new();
    let mut exact_per_k: BTreeMap<usize, f64> = BTreeMap::new();
    for k in 2..=parts {
        let groups = facet_groups_of_codim(x, k);
        let evals: Vec<(Face, Result<f64>)> = groups
            .par_iter()
            .map(|(face, ids)| {
                (
                    face.clone(),
                    skeleton_from_group(x, face, ids).second_eigenvalue(),
                )
            })
            .collect();
        for (face, ev) in evals {
            let lam = ev.map_err(|e| match e {
                Error::Disconnected { .. } => Error::Disconnected {
                    witness: Some(x.face_names(&face)),
                },
                other => other,
            })?;
            let s = x.type_set_of(&face);
            let cert = f.max_f(s) / (k as f64 - 1.0);
            per_type
                .entry(s)
                .and_modify(|(_, ex)| *ex = ex.max(lam))
                .or_insert((cert, lam));
            exact_per_k
                .entry(k)
                .and_modify(|ex| *ex = ex.max(lam))
                .or_insert(lam);
        }
    }

    let gamma2 = exact_per_k.get(&2).copied().unwrap_or(0.0);
    let classical = classical_bound(gamma2, d).ok();
    let thm13 = thm13_bounds(
        gamma2,
        f.graph().max_degree().max(1),
        delta,
        d,
    )
    .ok();

    let mut rows = Vec::new();
    for (&k, &exact) in &exact_per_k {
        let certified = f
            .subsets()
            .filter(|s| parts - s.len() == k)
            .map(|s| f.max_f(s) / (k as f64 - 1.0))
            .fold(0.0f64, f64::max);
        rows.push(BoundRow {
            codim: k,
            exact,
            certified,
            classical: classical.as_ref().and_then(|c| c.per_k.get(&k).copied()),
            thm13: thm13
                .as_ref()
                .and_then(|t| t.rows.iter().find(|r| r.k == k).map(|r| r.paper)),
            main: main_bound(delta, k)?,
            slack: certified - exact,
        });
    }
    Ok(BoundProfile { rows, per_type })
}

fn check_labels(x: &WeightedComplex, f: &FVectors) -> Result<()> {
    if !x.is_partite() {
        return Err(Error::NotPartite);
    }
    if x.type_labels() != f.labels() {
        return Err(Error::CertificateInvalid(format!(
            "certificate labels {:?} do not match complex parts {:?}",
            f.labels(),
            x.type_labels()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partite::{DependencyGraph, EpsilonTable, ZERO_EXPANDER_TOL};
    use crate::trickledown::conditions::{
        check_main_conditions, max_feasible_delta, ConditionVariant, EpsOrdering,
    };
    use crate::trickledown::fvectors::build_f_vectors;
    use std::collections::BTreeMap as Map;

    fn named(verts: &[&str], w: f64) -> (Vec<String>, f64) {
        (verts.iter().map(|s| s.to_string()).collect(), w)
    }

    /// Complete 3-partite complex with 2 vertices per part and weights that
    /// are a small perturbation of a product measure.
    fn jittered_block(jitter: f64) -> WeightedComplex {
        let mut facets = Vec::new();
        let mut types = Map::new();
        for p in 0..3usize {
            for v in 0..2usize {
                types.insert(format!("p{p}v{v}"), p);
            }
        }
        let mut t = 0u32;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    t += 1;
                    let noise = 1.0 + jitter * ((t as f64 * 0.817).sin());
                    facets.push(named(
                        &[&format!("p0v{a}"), &format!("p1v{b}"), &format!("p2v{c}")],
                        (1.0 + 0.3 * a as f64) * (1.0 + 0.5 * b as f64) * (1.0 + 0.2 * c as f64)
                            * noise,
                    ));
                }
            }
        }
        WeightedComplex::build(&facets, Some(&types)).unwrap()
    }

    fn certificate_for(
        x: &WeightedComplex,
    ) -> (EpsilonTable, DependencyGraph, crate::trickledown::fvectors::FVectors) {
        let eps = EpsilonTable::compute(x).unwrap();
        let graph = DependencyGraph::from_table(&eps, ZERO_EXPANDER_TOL);
        let star = max_feasible_delta(
            &eps,
            &graph,
            ConditionVariant::Main,
            EpsOrdering::Decreasing,
        )
        .unwrap()
        .expect("feasible delta");
        let delta = star / 2.0;
        let f = build_f_vectors(&eps, &graph, delta, EpsOrdering::Decreasing).unwrap();
        (eps, graph, f)
    }

    #[test]
    fn jittered_block_certificate_verifies() {
        let x = jittered_block(0.02);
        let (eps, graph, f) = certificate_for(&x);
        // sanity: conditions do pass at the chosen delta's parent
        let star = max_feasible_delta(
            &eps,
            &graph,
            ConditionVariant::Main,
            EpsOrdering::Decreasing,
        )
        .unwrap()
        .unwrap();
        assert!(check_main_conditions(&eps, &graph, star, EpsOrdering::Decreasing)
            .unwrap()
            .pass);

        let scalar = verify_scalar_conditions(&x, &f).unwrap();
        assert!(
            scalar.pass,
            "cap {} base {} rec {} sum {}",
            scalar.worst_cap_margin,
            scalar.worst_base_margin,
            scalar.worst_recursion_margin,
            scalar.worst_sum_rule_residual
        );
        let matrix = verify_matrix_conditions(&x, &f, 1e-8).unwrap();
        assert!(
            matrix.pass,
            "base {} cap {} rec {} prod {} rho {}",
            matrix.worst_base_psd,
            matrix.worst_cap,
            matrix.worst_recursion,
            matrix.max_product_deviation,
            matrix.rho_consistency
        );
    }

    #[test]
    fn product_of_blocks_uses_product_branch() {
        let b1 = jittered_block(0.01);
        // second block on shifted labels
        let mut facets = Vec::new();
        let mut types = Map::new();
        for p in 0..2usize {
            for v in 0..3usize {
                types.insert(format!("q{p}v{v}"), 3 + p);
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let noise = 1.0 + 0.015 * (((a * 3 + b) as f64).cos());
                facets.push(named(
                    &[&format!("q0v{a}"), &format!("q1v{b}")],
                    (1.0 + a as f64 * 0.4) * (1.0 + b as f64 * 0.25) * noise,
                ));
            }
        }
        let b2 = WeightedComplex::build(&facets, Some(&types)).unwrap();
        let x = WeightedComplex::product(&[&b1, &b2]).unwrap();
        let (_, graph, f) = certificate_for(&x);
        assert!(graph.components().len() >= 2);
        let scalar = verify_scalar_conditions(&x, &f).unwrap();
        assert!(scalar.pass);
        assert!(scalar.worst_sum_rule_residual == 0.0);
        let matrix = verify_matrix_conditions(&x, &f, 1e-8).unwrap();
        assert!(
            matrix.pass,
            "prod dev {}",
            matrix.max_product_deviation
        );
        assert!(matrix.max_product_deviation <= 1e-10);
    }

    #[test]
    fn bound_profile_certifies_every_level() {
        let x = jittered_block(0.02);
        let (_, _, f) = certificate_for(&x);
        let profile = bound_profile(&x, &f).unwrap();
        for row in &profile.rows {
            assert!(
                row.slack >= -1e-8,
                "codim {} certified {} exact {}",
                row.codim,
                row.certified,
                row.exact
            );
            assert!(row.main > 0.0);
        }
        for (s, (bound, exact)) in &profile.per_type {
            assert!(
                bound + 1e-8 >= *exact,
                "type {s:?}: bound {bound} exact {exact}"
            );
        }
    }

    #[test]
    fn cap_violation_detected() {
        // artificial f with an oversize entry at k = 2 fails the cap
        let x = jittered_block(0.02);
        let eps = EpsilonTable::compute(&x).unwrap();
        let graph = DependencyGraph::from_table(&eps, ZERO_EXPANDER_TOL);
        // force a huge synthetic table so f_S(i) = 1 at some pair
        let mut vals = Map::new();
        vals.insert((0usize, 1usize), 1.0);
        let synth = EpsilonTable::from_values(vec![0, 1, 2], &vals);
        let graph_synth = DependencyGraph::from_table(&synth, ZERO_EXPANDER_TOL);
        let f = build_f_vectors(&synth, &graph_synth, 0.5, EpsOrdering::Decreasing).unwrap();
        drop((eps, graph));
        let scalar = verify_scalar_conditions(&x, &f).unwrap();
        // cap at k=2 is (k-1)^2/(3k-1) = 1/5; f = 1 violates by 4/5
        assert!(!scalar.pass);
        assert!((scalar.worst_cap_margin - (0.2 - 1.0)).abs() < 1e-12);
    }
}
