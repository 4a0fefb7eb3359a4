//! Generators for concrete complexes: list-coloring complexes, the hardcore
//! independent-set family, the barbell family, and synthetic partite test
//! families.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{binomial, WeightedComplex};
use crate::error::{Error, Result};

/// Enumeration budget shared by the coloring and barbell generators.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// The `(n+1)`-partite coloring complex of a graph with per-vertex color
/// lists: parts are graph vertices, elements are (vertex, color) pairs, and
/// facets are proper list colorings with uniform weight.
pub fn coloring_complex(
    n_vertices: usize,
    edges: &[(usize, usize)],
    lists: &[Vec<usize>],
) -> Result<WeightedComplex> {
    if n_vertices == 0 || lists.len() != n_vertices {
        return Err(Error::BadParams(
            "need one color list per graph vertex".into(),
        ));
    }
    if lists.iter().any(|l| l.is_empty()) {
        return Err(Error::BadParams("empty color list".into()));
    }
    for &(u, v) in edges {
        if u >= n_vertices || v >= n_vertices || u == v {
            return Err(Error::BadParams(format!("bad edge ({u}, {v})")));
        }
    }
    let budget: u128 = lists.iter().map(|l| l.len() as u128).product();
    if budget > ENUMERATION_BUDGET {
        return Err(Error::SizeCap(format!(
            "up to {budget} colorings exceeds the budget"
        )));
    }
    let mut adj = vec![Vec::new(); n_vertices];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }

    let mut facets: Vec<(Vec<String>, f64)> = Vec::new();
    let mut assignment = vec![usize::MAX; n_vertices];
    fn extend(
        v: usize,
        n: usize,
        lists: &[Vec<usize>],
        adj: &[Vec<usize>],
        assignment: &mut Vec<usize>,
        facets: &mut Vec<(Vec<String>, f64)>,
    ) {
        if v == n {
            let verts = assignment
                .iter()
                .enumerate()
                .map(|(i, &c)| format!("v{i}c{c}"))
                .collect();
            facets.push((verts, 1.0));
            return;
        }
        'colors: for &c in &lists[v] {
            for &u in &adj[v] {
                if u < v && assignment[u] == c {
                    continue 'colors;
                }
            }
            assignment[v] = c;
            extend(v + 1, n, lists, adj, assignment, facets);
            assignment[v] = usize::MAX;
        }
    }
    extend(0, n_vertices, lists, &adj, &mut assignment, &mut facets);
    if facets.is_empty() {
        return Err(Error::NoProperColoring);
    }
    let mut types = BTreeMap::new();
    for (verts, _) in &facets {
        for (i, name) in verts.iter().enumerate() {
            types.insert(name.clone(), i);
        }
    }
    WeightedComplex::build(&facets, Some(&types))
}

/// The hardcore obstruction family: a `2d`-partite complex whose facets
/// encode the independent sets of `K_{d,d}`, part `i` being
/// `{i_in, i_out}`, with facet weight `lambda^(number of in-vertices)`.
pub fn hardcore_complex(d: usize, lambda: f64) -> Result<WeightedComplex> {
    if d < 2 || !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::BadParams(
            "hardcore complex needs d >= 2 and lambda > 0".into(),
        ));
    }
    if d > 16 {
        return Err(Error::SizeCap("hardcore d capped at 16".into()));
    }
    let mut facets: Vec<(Vec<String>, f64)> = Vec::new();
    // independent sets of K_{d,d}: the in-set lies within one side
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    for side in 0..2usize {
        for mask in 0u32..(1 << d) {
            let mut ins = vec![false; 2 * d];
            for b in 0..d {
                if mask >> b & 1 == 1 {
                    ins[side * d + b] = true;
                }
            }
            if !seen.insert(ins.clone()) {
                continue;
            }
            let count = ins.iter().filter(|&&b| b).count();
            let verts: Vec<String> = (0..2 * d)
                .map(|i| {
                    format!("{}_{}", i + 1, if ins[i] { "in" } else { "out" })
                })
                .collect();
            facets.push((verts, lambda.powi(count as i32)));
        }
    }
    let mut types = BTreeMap::new();
    for i in 0..2 * d {
        types.insert(format!("{}_in", i + 1), i);
        types.insert(format!("{}_out", i + 1), i);
    }
    WeightedComplex::build(&facets, Some(&types))
}

/// The barbell obstruction family: two `2d`-cliques joined by a path
/// `x_0, x_1, ..., x_d, x_{d+1}` with `x_0` in the first clique and
/// `x_{d+1}` in the second. Facets are the connected `d`-subsets, unit
/// weight; the complex is non-partite and `(d-1)`-dimensional on `5d`
/// vertices.
pub fn barbell_complex(d: usize) -> Result<WeightedComplex> {
    if d < 3 {
        return Err(Error::BadParams("barbell complex needs d >= 3".into()));
    }
    let n = 5 * d;
    if binomial(n, d) > ENUMERATION_BUDGET {
        return Err(Error::SizeCap(format!(
            "C({n}, {d}) exceeds the enumeration budget"
        )));
    }
    // vertices: 0..2d = clique 1 (vertex 0 is x_0), 2d..3d = path interior
    // x_1..x_d, 3d..5d = clique 2 (vertex 3d is x_{d+1})
    let name = |v: usize| -> String {
        if v < 2 * d {
            format!("a{v}")
        } else if v < 3 * d {
            format!("p{}", v - 2 * d + 1)
        } else {
            format!("b{}", v - 3 * d)
        }
    };
    let adjacent = |u: usize, v: usize| -> bool {
        let both_c1 = u < 2 * d && v < 2 * d;
        let both_c2 = u >= 3 * d && v >= 3 * d;
        if both_c1 || both_c2 {
            return true;
        }
        // path x_0 (=0), x_1..x_d (=2d..3d-1), x_{d+1} (=3d)
        let path_pos = |w: usize| -> Option<usize> {
            if w == 0 {
                Some(0)
            } else if (2 * d..3 * d).contains(&w) {
                Some(w - 2 * d + 1)
            } else if w == 3 * d {
                Some(d + 1)
            } else {
                None
            }
        };
        match (path_pos(u), path_pos(v)) {
            (Some(a), Some(b)) => a.abs_diff(b) == 1,
            _ => false,
        }
    };

    let mut facets: Vec<(Vec<String>, f64)> = Vec::new();
    // enumerate d-subsets and keep those inducing a connected subgraph
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if induced_connected(&subset, &adjacent) {
            facets.push((subset.iter().map(|&v| name(v)).collect(), 1.0));
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                let x = WeightedComplex::build(&facets, None)?;
                return Ok(x);
            }
            i -= 1;
            if subset[i] != i + n - d {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn induced_connected(subset: &[usize], adjacent: &impl Fn(usize, usize) -> bool) -> bool {
    let k = subset.len();
    if k <= 1 {
        return true;
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for j in 0..k {
            if !seen[j] && adjacent(subset[i], subset[j]) {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == k
}

/// Complete multipartite complex: every transversal of the parts is a facet,
/// uniform weights.
pub fn complete_partite_complex(part_sizes: &[usize]) -> Result<WeightedComplex> {
    if part_sizes.is_empty() || part_sizes.iter().any(|&s| s == 0) {
        return Err(Error::BadParams("part sizes must be positive".into()));
    }
    let total: u128 = part_sizes.iter().map(|&s| s as u128).product();
    if total > ENUMERATION_BUDGET {
        return Err(Error::SizeCap("too many transversals".into()));
    }
    let mut facets: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
    for (p, &size) in part_sizes.iter().enumerate() {
        let mut next = Vec::with_capacity(facets.len() * size);
        for (prefix, w) in &facets {
            for v in 0..size {
                let mut verts = prefix.clone();
                verts.push(format!("t{p}v{v}"));
                next.push((verts, *w));
            }
        }
        facets = next;
    }
    let mut types = BTreeMap::new();
    for (p, &size) in part_sizes.iter().enumerate() {
        for v in 0..size {
            types.insert(format!("t{p}v{v}"), p);
        }
    }
    WeightedComplex::build(&facets, Some(&types))
}

/// Weight model of the random partite generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum WeightModel {
    /// Independent weights uniform in `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Product of per-vertex base weights, perturbed multiplicatively by
    /// `1 + jitter * u` with `u` uniform in `[-1, 1]`. Small jitter keeps
    /// every pair eigenvalue small.
    ProductJitter { jitter: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomPartiteSpec {
    pub part_sizes: Vec<usize>,
    /// Probability of keeping each transversal as a facet.
    pub density: f64,
    pub weights: WeightModel,
    /// Retries before giving up on total connectivity.
    pub max_retries: usize,
}

impl RandomPartiteSpec {
    pub fn new(part_sizes: Vec<usize>, density: f64, weights: WeightModel) -> Self {
        RandomPartiteSpec {
            part_sizes,
            density,
            weights,
            max_retries: 50,
        }
    }
}

/// Deterministic under `(spec, seed)`: regenerating with the same arguments
/// yields an identical facet list.
pub fn random_partite_complex(spec: &RandomPartiteSpec, seed: u64) -> Result<WeightedComplex> {
    if spec.part_sizes.is_empty() || spec.part_sizes.iter().any(|&s| s == 0) {
        return Err(Error::BadParams("part sizes must be positive".into()));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::BadParams("density must lie in (0, 1]".into()));
    }
    let total: u128 = spec.part_sizes.iter().map(|&s| s as u128).product();
    if total > ENUMERATION_BUDGET {
        return Err(Error::SizeCap("too many transversals".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..spec.max_retries.max(1) {
        let base: Vec<Vec<f64>> = spec
            .part_sizes
            .iter()
            .map(|&s| (0..s).map(|_| rng.gen_range(0.5..1.5)).collect())
            .collect();
        let mut facets: Vec<(Vec<String>, f64)> = Vec::new();
        let mut index = vec![0usize; spec.part_sizes.len()];
        'outer: loop {
            let keep = spec.density >= 1.0 || rng.gen::<f64>() < spec.density;
            if keep {
                let verts: Vec<String> = index
                    .iter()
                    .enumerate()
                    .map(|(p, &v)| format!("t{p}v{v}"))
                    .collect();
                let w = match &spec.weights {
                    WeightModel::Uniform { lo, hi } => rng.gen_range(*lo..*hi),
                    WeightModel::ProductJitter { jitter } => {
                        let prod: f64 = index
                            .iter()
                            .enumerate()
                            .map(|(p, &v)| base[p][v])
                            .product();
                        prod * (1.0 + jitter * rng.gen_range(-1.0..1.0))
                    }
                };
                facets.push((verts, w));
            }
            // odometer over transversals
            for p in (0..index.len()).rev() {
                index[p] += 1;
                if index[p] < spec.part_sizes[p] {
                    continue 'outer;
                }
                index[p] = 0;
                if p == 0 {
                    break 'outer;
                }
            }
        }
        if facets.is_empty() {
            continue;
        }
        // every vertex must appear for the declared types to validate
        let mut types = BTreeMap::new();
        for (verts, _) in &facets {
            for (p, name) in verts.iter().enumerate() {
                types.insert(name.clone(), p);
            }
        }
        let missing = types.len()
            != spec
                .part_sizes
                .iter()
                .sum::<usize>();
        if missing {
            continue;
        }
        let x = WeightedComplex::build(&facets, Some(&types))?;
        if x.connectivity_report().totally_connected {
            return Ok(x);
        }
    }
    Err(Error::ConnectivityUnreachable(spec.max_retries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{skeleton, spectral_profile};

    #[test]
    fn hardcore_facets_match_independent_sets() {
        // brute-force oracle: subsets of [2d] independent in K_{d,d}
        for d in 2..=4usize {
            let mut count = 0usize;
            for mask in 0u32..(1 << (2 * d)) {
                let left = mask & ((1 << d) - 1);
                let right = mask >> d;
                if left == 0 || right == 0 {
                    count += 1;
                }
            }
            let x = hardcore_complex(d, 0.5).unwrap();
            assert_eq!(x.num_facets(), count, "d = {d}");
        }
        // d = 2: independent sets of K_{2,2} number 7
        assert_eq!(hardcore_complex(2, 1.0).unwrap().num_facets(), 7);
    }

    #[test]
    fn hardcore_all_out_weight_is_one() {
        let x = hardcore_complex(3, 0.37).unwrap();
        // before normalization the all-out facet has weight lambda^0 = 1,
        // i.e. the largest weight for lambda < 1
        let max_w = x
            .facets()
            .iter()
            .map(|f| f.weight)
            .fold(f64::NEG_INFINITY, f64::max);
        let all_out = x
            .face_from_names(&["1_out", "2_out", "3_out", "4_out", "5_out", "6_out"])
            .unwrap();
        let w = x.face_weight(&all_out);
        assert!((w - max_w).abs() < 1e-15);
    }

    #[test]
    fn hardcore_worst_link_is_weighted_path() {
        // d = 3, lambda = 0.2: tau = {2_out, ..., (2d-1)_out} has the path
        // 1 - 2d_bar - 1_bar - 2d skeleton with weights prop to lambda,1,lambda
        let d = 3;
        let lambda = 0.2;
        let x = hardcore_complex(d, lambda).unwrap();
        let tau: Vec<String> = (2..=2 * d - 1).map(|i| format!("{i}_out")).collect();
        let names: Vec<&str> = tau.iter().map(|s| s.as_str()).collect();
        let face = x.face_from_names(&names).unwrap();
        let g = skeleton(&x, &face).unwrap();
        assert_eq!(g.vertex_count(), 4);
        let lam = g.second_eigenvalue().unwrap();
        assert!(
            (lam - lambda / (1.0 + lambda)).abs() < 1e-12,
            "lambda2 = {lam}"
        );
    }

    #[test]
    fn hardcore_gamma2() {
        let x = hardcore_complex(3, 0.2).unwrap();
        let p = spectral_profile(&x);
        assert!((p.gamma[&2].gamma - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn barbell_counts_and_worst_link() {
        let d = 4;
        let x = barbell_complex(d).unwrap();
        assert_eq!(x.num_vertices(), 5 * d);
        assert_eq!(x.dim(), d - 1);
        // oracle: independent recount via bitmask enumeration
        let mut count = 0usize;
        let n = 5 * d;
        let verts: Vec<usize> = (0..n).collect();
        for subset in crate::complex::combinations(
            &verts.iter().map(|&v| v as u32).collect::<Vec<_>>(),
            d,
        ) {
            let sub: Vec<usize> = subset.iter().map(|&v| v as usize).collect();
            // rebuild adjacency inline (clique-1, clique-2, path)
            let adjacent = |u: usize, v: usize| -> bool {
                if (u < 2 * d && v < 2 * d) || (u >= 3 * d && v >= 3 * d) {
                    return true;
                }
                let pos = |w: usize| -> Option<usize> {
                    if w == 0 {
                        Some(0)
                    } else if (2 * d..3 * d).contains(&w) {
                        Some(w - 2 * d + 1)
                    } else if w == 3 * d {
                        Some(d + 1)
                    } else {
                        None
                    }
                };
                matches!((pos(u), pos(v)), (Some(a), Some(b)) if a.abs_diff(b) == 1)
            };
            if induced_connected(&sub, &adjacent) {
                count += 1;
            }
        }
        assert_eq!(x.num_facets(), count);

        // clique-internal subsets are facets
        let internal = x.face_from_names(&["a1", "a2", "a3", "a4"]).unwrap();
        assert!(x.contains_face(&internal));

        // worst codim-2 link: tau = {x_2, ..., x_{d-1}} = {p2, p3}
        let tau = x.face_from_names(&["p2", "p3"]).unwrap();
        let g = skeleton(&x, &tau).unwrap();
        assert_eq!(g.vertex_count(), 4);
        let lam = g.second_eigenvalue().unwrap();
        assert!((lam - 0.5).abs() < 1e-12, "lambda2 = {lam}");
    }

    #[test]
    fn coloring_complex_k3_lists5() {
        // triangle on 3 vertices, lists {0..4}: 5*4*3 = 60 proper colorings
        let lists = vec![(0..5).collect::<Vec<_>>(); 3];
        let x = coloring_complex(3, &[(0, 1), (0, 2), (1, 2)], &lists).unwrap();
        assert_eq!(x.num_facets(), 60);
        assert!(x.is_partite());
        assert_eq!(x.dim(), 2);
        // no proper coloring of a triangle with one shared color
        let tiny = vec![vec![0usize]; 3];
        assert!(matches!(
            coloring_complex(3, &[(0, 1), (0, 2), (1, 2)], &tiny),
            Err(Error::NoProperColoring)
        ));
    }

    #[test]
    fn complete_partite_products() {
        let x = complete_partite_complex(&[1, 1, 1]).unwrap();
        assert_eq!(x.num_facets(), 1);
        let y = complete_partite_complex(&[2, 2]).unwrap();
        assert_eq!(y.num_facets(), 4);
        let eps = crate::partite::EpsilonTable::compute(
            &complete_partite_complex(&[2, 2, 2]).unwrap(),
        )
        .unwrap();
        assert!(eps.max_value() <= 1e-10);
    }

    #[test]
    fn random_generator_deterministic() {
        let spec = RandomPartiteSpec::new(
            vec![3, 3, 3, 3],
            0.6,
            WeightModel::Uniform { lo: 0.5, hi: 1.5 },
        );
        let a = random_partite_complex(&spec, 42).unwrap();
        let b = random_partite_complex(&spec, 42).unwrap();
        assert_eq!(a.num_facets(), b.num_facets());
        for (fa, fb) in a.facets().iter().zip(b.facets()) {
            assert_eq!(fa.verts, fb.verts);
            assert_eq!(fa.weight, fb.weight);
        }
        let c = random_partite_complex(&spec, 43).unwrap();
        let same = a.num_facets() == c.num_facets()
            && a.facets()
                .iter()
                .zip(c.facets())
                .all(|(x, y)| x.verts == y.verts && x.weight == y.weight);
        assert!(!same, "different seeds should differ");
    }

    #[test]
    fn jittered_product_stays_near_zero_eps() {
        let spec = RandomPartiteSpec::new(
            vec![3, 2, 3],
            1.0,
            WeightModel::ProductJitter { jitter: 0.02 },
        );
        let x = random_partite_complex(&spec, 7).unwrap();
        let eps = crate::partite::EpsilonTable::compute(&x).unwrap();
        assert!(eps.max_value() < 0.05, "eps {}", eps.max_value());
        assert!(x.connectivity_report().totally_connected);
    }
}
