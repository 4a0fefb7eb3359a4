//! Per-type-pair worst link eigenvalues, the dependency graph on parts, and
//! product-structure detection for partite complexes.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::complex::{Face, TypeSet, WeightedComplex};
use crate::error::{Error, Result};
use crate::spectra::{facet_groups_of_codim, skeleton_from_group};

/// Pairs with a worst link eigenvalue at or below this are treated as
/// 0-expander pairs when building the dependency graph. One order of
/// magnitude above the eigensolve accuracy.
pub const ZERO_EXPANDER_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EpsilonEntry {
    /// Worst second eigenvalue over links of this type pair, clamped at 0.
    pub value: f64,
    /// Unclamped worst second eigenvalue (can be negative).
    pub raw: f64,
    pub argmax: Face,
}

/// Symmetric table of `eps_{i,j}` over unordered pairs of distinct parts.
#[derive(Clone, Debug)]
pub struct EpsilonTable {
    labels: Vec<usize>,
    entries: BTreeMap<(usize, usize), EpsilonEntry>,
}

impl EpsilonTable {
    /// Worst second eigenvalue over all links of faces of type
    /// `[d] \ {i, j}` for every unordered pair of parts. Each pair is
    /// computed once; pairs run in parallel.
    pub fn compute(x: &WeightedComplex) -> Result<EpsilonTable> {
        if !x.is_partite() {
            return Err(Error::NotPartite);
        }
        if x.dim() < 2 {
            return Err(Error::BadParams(
                "epsilon table needs a complex of dimension >= 2".into(),
            ));
        }
        let labels = x.type_labels().to_vec();
        let all = x.all_types();
        let mut pairs = Vec::new();
        for a in 0..labels.len() {
            for b in a + 1..labels.len() {
                pairs.push((labels[a], labels[b]));
            }
        }
        let results: Vec<((usize, usize), Result<EpsilonEntry>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut s = all;
                s.remove(i);
                s.remove(j);
                ((i, j), pair_epsilon(x, s))
            })
            .collect();
        let mut entries = BTreeMap::new();
        for (key, res) in results {
            entries.insert(key, res?);
        }
        Ok(EpsilonTable { labels, entries })
    }

    /// Table with prescribed values; used for scenario arithmetic and tests.
    pub fn from_values(labels: Vec<usize>, values: &BTreeMap<(usize, usize), f64>) -> EpsilonTable {
        let mut entries = BTreeMap::new();
        for a in 0..labels.len() {
            for b in a + 1..labels.len() {
                let (i, j) = (labels[a], labels[b]);
                let raw = values
                    .get(&(i, j))
                    .or_else(|| values.get(&(j, i)))
                    .copied()
                    .unwrap_or(0.0);
                entries.insert(
                    (i, j),
                    EpsilonEntry {
                        value: raw.max(0.0),
                        raw,
                        argmax: Face::empty(),
                    },
                );
            }
        }
        EpsilonTable { labels, entries }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&EpsilonEntry> {
        let key = (i.min(j), i.max(j));
        self.entries.get(&key)
    }

    /// Clamped `eps_{i,j}`; 0 for unknown pairs.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j).map(|e| e.value).unwrap_or(0.0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &EpsilonEntry)> {
        self.entries.iter().map(|(&(i, j), e)| (i, j, e))
    }

    /// `gamma_2` of the complex: the maximum entry.
    pub fn max_value(&self) -> f64 {
        self.entries.values().map(|e| e.raw).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn pair_epsilon(x: &WeightedComplex, complement: TypeSet) -> Result<EpsilonEntry> {
    let faces = x.faces_of_type(complement)?;
    let groups = group_facets_by_projection(x, complement);
    let mut best: Option<(f64, Face)> = None;
    for face in faces {
        let ids = &groups[&face];
        let g = skeleton_from_group(x, &face, ids);
        let lam = match g.second_eigenvalue() {
            Ok(l) => l,
            Err(Error::Disconnected { .. }) => {
                return Err(Error::Disconnected {
                    witness: Some(x.face_names(&face)),
                })
            }
            Err(e) => return Err(e),
        };
        if best.as_ref().map_or(true, |(b, _)| lam > *b) {
            best = Some((lam, face));
        }
    }
    let (raw, argmax) = best.ok_or_else(|| Error::BadParams("no faces of pair type".into()))?;
    Ok(EpsilonEntry {
        value: raw.max(0.0),
        raw,
        argmax,
    })
}

pub(crate) fn group_facets_by_projection(
    x: &WeightedComplex,
    s: TypeSet,
) -> BTreeMap<Face, Vec<usize>> {
    let mut map: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    for (fi, f) in x.facets().iter().enumerate() {
        let proj: Vec<u32> = f
            .verts
            .iter()
            .copied()
            .filter(|&v| s.contains(x.type_of(v).unwrap()))
            .collect();
        map.entry(Face::new(proj)).or_default().push(fi);
    }
    map
}

/// Graph on the parts: `{i, j}` is an edge when some link of type
/// `[d] \ {i, j}` has second eigenvalue above the tolerance.
#[derive(Clone, Debug)]
pub struct DependencyGraph {
    labels: Vec<usize>,
    adj: BTreeMap<usize, TypeSet>,
    tol: f64,
}

impl DependencyGraph {
    pub fn from_table(eps: &EpsilonTable, tol: f64) -> DependencyGraph {
        let labels = eps.labels().to_vec();
        let mut adj: BTreeMap<usize, TypeSet> =
            labels.iter().map(|&l| (l, TypeSet::EMPTY)).collect();
        for (i, j, e) in eps.pairs() {
            if e.value > tol {
                adj.get_mut(&i).unwrap().insert(j);
                adj.get_mut(&j).unwrap().insert(i);
            }
        }
        DependencyGraph { labels, adj, tol }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn neighbors(&self, i: usize) -> TypeSet {
        self.adj.get(&i).copied().unwrap_or(TypeSet::EMPTY)
    }

    /// `Delta(i)`: the degree of part `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).len()
    }

    /// `Delta`: the maximum degree.
    pub fn max_degree(&self) -> usize {
        self.labels.iter().map(|&l| self.degree(l)).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &i in &self.labels {
            for j in self.neighbors(i).iter() {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Degree of `i` in the induced subgraph on `[d] \ removed`.
    pub fn degree_in(&self, i: usize, removed: TypeSet) -> usize {
        self.neighbors(i).minus(removed).len()
    }

    /// Connected components, each as a set of part labels, sorted.
    pub fn components(&self) -> Vec<TypeSet> {
        self.components_of(TypeSet::EMPTY)
    }

    /// Connected components of the induced subgraph on `[d] \ removed`.
    pub fn components_of(&self, removed: TypeSet) -> Vec<TypeSet> {
        let mut seen = TypeSet::EMPTY;
        let mut out = Vec::new();
        for &start in &self.labels {
            if removed.contains(start) || seen.contains(start) {
                continue;
            }
            let mut comp = TypeSet::singleton(start);
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v).minus(removed).iter() {
                    if !seen.contains(u) {
                        seen.insert(u);
                        comp.insert(u);
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Result of the product-structure check along dependency components.
#[derive(Clone, Debug)]
pub struct ProductDecomposition {
    pub components: Vec<TypeSet>,
    /// Max deviation of any facet weight from the product of component
    /// marginals.
    pub residual: f64,
    /// In strict mode, the max deviation of component marginals across all
    /// admissible conditioning faces; `None` otherwise.
    pub choice_residual: Option<f64>,
}

/// Detects product structure: components of the dependency graph, then a
/// numerical check that the facet distribution factorizes across them.
/// One arbitrary conditioning face per component is used.
pub fn product_decomposition(x: &WeightedComplex, tol: f64) -> Result<ProductDecomposition> {
    let eps = EpsilonTable::compute(x)?;
    let graph = DependencyGraph::from_table(&eps, tol);
    decomposition_from_graph(x, &graph, false)
}

/// As [`product_decomposition`], but verifies that the factorization is
/// independent of the conditioning-face choice, testing every admissible
/// face per component.
pub fn product_decomposition_strict(x: &WeightedComplex, tol: f64) -> Result<ProductDecomposition> {
    let eps = EpsilonTable::compute(x)?;
    let graph = DependencyGraph::from_table(&eps, tol);
    decomposition_from_graph(x, &graph, true)
}

pub fn decomposition_from_graph(
    x: &WeightedComplex,
    graph: &DependencyGraph,
    strict: bool,
) -> Result<ProductDecomposition> {
    if !x.is_partite() {
        return Err(Error::NotPartite);
    }
    let components = graph.components();
    let all = x.all_types();

    // Marginal over faces of component types, conditioned on `cond`.
    let marginal = |comp: TypeSet, cond: &Face| -> BTreeMap<Face, f64> {
        let mut acc: BTreeMap<Face, f64> = BTreeMap::new();
        let mut total = 0.0;
        for f in x.facets() {
            if !crate::complex::is_sorted_subset(cond.vertices(), &f.verts) {
                continue;
            }
            total += f.weight;
            let proj: Vec<u32> = f
                .verts
                .iter()
                .copied()
                .filter(|&v| comp.contains(x.type_of(v).unwrap()))
                .collect();
            *acc.entry(Face::new(proj)).or_insert(0.0) += f.weight;
        }
        for v in acc.values_mut() {
            *v /= total;
        }
        acc
    };

    let mut choice_residual: Option<f64> = strict.then_some(0.0);
    let mut marginals: Vec<BTreeMap<Face, f64>> = Vec::new();
    for &comp in &components {
        let outside = all.minus(comp);
        let faces = x.faces_of_type(outside)?;
        let first = marginal(comp, &faces[0]);
        if let Some(res) = choice_residual.as_mut() {
            for alt_face in &faces[1..] {
                let alt = marginal(comp, alt_face);
                for (face, p) in &first {
                    let q = alt.get(face).copied().unwrap_or(0.0);
                    *res = res.max((p - q).abs());
                }
                for (face, q) in &alt {
                    if !first.contains_key(face) {
                        *res = res.max(*q);
                    }
                }
            }
        }
        marginals.push(first);
    }

    let mut residual = 0.0f64;
    for f in x.facets() {
        let mut prod = 1.0;
        for (ci, &comp) in components.iter().enumerate() {
            let proj: Vec<u32> = f
                .verts
                .iter()
                .copied()
                .filter(|&v| comp.contains(x.type_of(v).unwrap()))
                .collect();
            prod *= marginals[ci]
                .get(&Face::new(proj))
                .copied()
                .unwrap_or(0.0);
        }
        residual = residual.max((f.weight - prod).abs());
    }

    Ok(ProductDecomposition {
        components,
        residual,
        choice_residual,
    })
}

#[derive(Clone, Debug)]
pub struct Rank2Report {
    pub is_product: bool,
    /// Third-largest singular value of the bipartite adjacency matrix
    /// relative to the largest (equals `sigma_2/sigma_1` of the weight
    /// block).
    pub sigma3_ratio: f64,
    /// Max deviation of `pi({y,z})` from `pi_y(z) * pi_z(y)`; only checked
    /// when `is_product`.
    pub marginal_residual: Option<f64>,
}

/// Rank test for a weighted bipartite graph (a 1-dimensional 2-partite
/// complex): 0-expanders are exactly the rank-one weight blocks.
pub fn rank2_product_check(x: &WeightedComplex, tol: f64) -> Result<Rank2Report> {
    if !x.is_partite() || x.dim() != 1 {
        return Err(Error::WrongDimension {
            dim: x.dim(),
            parts: x.type_labels().len(),
        });
    }
    let labels = x.type_labels();
    let (ta, tb) = (labels[0], labels[1]);
    let side_a: Vec<u32> = (0..x.num_vertices() as u32)
        .filter(|&v| x.type_of(v) == Some(ta))
        .collect();
    let side_b: Vec<u32> = (0..x.num_vertices() as u32)
        .filter(|&v| x.type_of(v) == Some(tb))
        .collect();
    let ia: BTreeMap<u32, usize> = side_a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ib: BTreeMap<u32, usize> = side_b.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut w = DMatrix::zeros(side_a.len(), side_b.len());
    for f in x.facets() {
        let (u, v) = (f.verts[0], f.verts[1]);
        let (a, b) = if x.type_of(u) == Some(ta) { (u, v) } else { (v, u) };
        w[(ia[&a], ib[&b])] += f.weight;
    }
    let mut sv: Vec<f64> = w.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sigma3_ratio = if sv.len() < 2 { 0.0 } else { sv[1] / sv[0] };
    let is_product = sigma3_ratio <= tol;

    let marginal_residual = is_product.then(|| {
        let row: Vec<f64> = (0..side_a.len()).map(|i| w.row(i).sum()).collect();
        let col: Vec<f64> = (0..side_b.len()).map(|j| w.column(j).sum()).collect();
        let mut res = 0.0f64;
        for i in 0..side_a.len() {
            for j in 0..side_b.len() {
                res = res.max((w[(i, j)] - row[i] * col[j]).abs());
            }
        }
        res
    });

    Ok(Rank2Report {
        is_product,
        sigma3_ratio,
        marginal_residual,
    })
}

/// Groups facets by faces of co-dimension 2; re-exported convenience for
/// verification sweeps over pair types.
pub fn codim2_groups(x: &WeightedComplex) -> BTreeMap<Face, Vec<usize>> {
    facet_groups_of_codim(x, 2)
}
