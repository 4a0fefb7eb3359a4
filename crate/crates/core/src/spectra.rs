//! Weighted 1-skeletons of links, walk matrices, exact second eigenvalues,
//! and Cheeger / expander-mixing cut diagnostics.
//!
//! Edge weights are aggregated internally as unnormalized facet-weight sums;
//! normalization happens only where a probability is reported or a walk
//! matrix is formed, so all eigenvalues are invariant to input weight scaling.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::complex::{Face, TypeSet, WeightedComplex};
use crate::error::{Error, Result};

/// Above this vertex count the dense eigensolve is replaced by a deflated
/// power iteration.
pub const DENSE_EIGENSOLVE_LIMIT: usize = 512;

/// Convergence tolerance of the iterative fallback.
pub const ITERATIVE_TOL: f64 = 1e-10;

/// Weighted 1-skeleton of the link of a face.
///
/// Vertices are the link's vertices; the weight of `{x, y}` is proportional
/// to the probability that a facet of the link contains both.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    labels: Vec<String>,
    parent_vertices: Vec<u32>,
    /// Unnormalized symmetric weight matrix; zero diagonal.
    w: DMatrix<f64>,
    /// Unnormalized weighted degrees (row sums of `w`).
    degrees: Vec<f64>,
    /// Unnormalized mass of facets containing each vertex (and the face).
    vertex_mass: Vec<f64>,
    /// Total unnormalized mass of facets containing the face.
    total_mass: f64,
    codim: usize,
}

/// Row-stochastic walk matrix together with the stationary-type diagonal.
#[derive(Clone, Debug)]
pub struct WalkMatrices {
    /// Row-stochastic simple-walk transition matrix on the link's vertices.
    pub p: DMatrix<f64>,
    /// Diagonal of the level-0 distribution of the link.
    pub pi: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct CutDiagnostics {
    /// `w(E(S, S̄)) / min(vol S, vol S̄)`.
    pub conductance: f64,
    /// `|w(E(S)) - vol(S)^2 / vol(V)| / vol(S)` with unordered internal
    /// edge weight.
    pub mixing_residual: f64,
    /// Rayleigh-quotient bound: `lambda_2 >= rayleigh_lower_bound` always.
    pub rayleigh_lower_bound: f64,
}

impl SkeletonGraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Vertex ids in the parent complex, parallel to `labels`.
    pub fn parent_vertices(&self) -> &[u32] {
        &self.parent_vertices
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// `Pr[{x, y} ⊆ sigma]` for a facet `sigma` of the link.
    pub fn edge_weight(&self, x: usize, y: usize) -> f64 {
        self.w[(x, y)] / self.total_mass
    }

    /// `d_w(x) = sum_y w({x, y})`, normalized like `edge_weight`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.degrees[x] / self.total_mass
    }

    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&x| self.weighted_degree(x)).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.degrees.iter().sum::<f64>() / self.total_mass
    }

    /// Level-0 distribution of the link (`pi_{tau,0}`).
    pub fn level0(&self) -> Vec<f64> {
        let k = self.codim as f64;
        self.vertex_mass
            .iter()
            .map(|m| m / (k * self.total_mass))
            .collect()
    }

    pub fn walk_matrices(&self) -> WalkMatrices {
        let n = self.vertex_count();
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if self.w[(i, j)] != 0.0 {
                    p[(i, j)] = self.w[(i, j)] / self.degrees[i];
                }
            }
        }
        WalkMatrices {
            p,
            pi: DVector::from_vec(self.level0()),
        }
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut members = vec![start];
            while let Some(v) = stack.pop() {
                for u in 0..n {
                    if self.w[(v, u)] > 0.0 && comp[u] == usize::MAX {
                        comp[u] = id;
                        stack.push(u);
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Signed second-largest eigenvalue of the simple random walk, exact via
    /// the symmetrized matrix `D^{1/2} P D^{-1/2}`.
    pub fn second_eigenvalue(&self) -> Result<f64> {
        self.second_eigenvalue_with(DENSE_EIGENSOLVE_LIMIT)
    }

    pub(crate) fn second_eigenvalue_with(&self, dense_limit: usize) -> Result<f64> {
        let n = self.vertex_count();
        if n < 2 {
            return Err(Error::BadParams(
                "second eigenvalue needs at least two vertices".into(),
            ));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected { witness: None });
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if self.w[(i, j)] != 0.0 {
                    m[(i, j)] = self.w[(i, j)] / (self.degrees[i] * self.degrees[j]).sqrt();
                }
            }
        }
        if n <= dense_limit {
            let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            Ok(eigs[1])
        } else {
            Ok(iterative_lambda2(&m, &self.degrees))
        }
    }
}

/// Lanczos iteration for the second walk eigenvalue. The top eigenvector of
/// the symmetrized walk matrix is `D^{1/2} 1`, known in closed form, so it is
/// deflated exactly; full reorthogonalization keeps the basis stable. Stops
/// when the leading Ritz residual drops below `ITERATIVE_TOL` or the Krylov
/// space is exhausted (which makes the result exact).
fn iterative_lambda2(m: &DMatrix<f64>, degrees: &[f64]) -> f64 {
    let n = m.nrows();
    let mut top = DVector::from_iterator(n, degrees.iter().map(|d| d.sqrt()));
    top /= top.norm();
    let deflate = |w: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for _ in 0..2 {
            let c = top.dot(w);
            *w -= &top * c;
            for b in basis {
                let c = b.dot(w);
                *w -= b * c;
            }
        }
    };

    let mut v = DVector::from_iterator(n, (0..n).map(|i| ((i + 1) as f64 * 0.7391).sin()));
    deflate(&mut v, &[]);
    v /= v.norm();

    let max_dim = n.min(400);
    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let ritz_top = |alphas: &[f64], betas: &[f64]| -> (f64, f64) {
        let k = alphas.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = t.symmetric_eigen();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > best.0 {
                best = (lam, eig.eigenvectors[(k - 1, idx)].abs());
            }
        }
        best
    };

    for step in 0..max_dim {
        let vj = basis[step].clone();
        let mut w = m * &vj;
        let alpha = vj.dot(&w);
        w -= &vj * alpha;
        deflate(&mut w, &basis);
        alphas.push(alpha);
        let beta = w.norm();
        let exhausted = beta <= 1e-14 || step + 1 == max_dim;
        if exhausted || (step >= 8 && step % 4 == 0) {
            let (theta, last) = ritz_top(&alphas, &betas);
            if exhausted || beta * last <= ITERATIVE_TOL {
                return theta;
            }
        }
        betas.push(beta);
        basis.push(w / beta);
    }
    ritz_top(&alphas, &betas).0
}

/// Builds the weighted 1-skeleton of the link of `face`. Requires
/// co-dimension at least 2.
pub fn skeleton(x: &WeightedComplex, face: &Face) -> Result<SkeletonGraph> {
    let codim = x
        .dim()
        .checked_add(1)
        .and_then(|d1| d1.checked_sub(face.len()))
        .unwrap_or(0);
    if codim < 2 {
        return Err(Error::CodimTooSmall {
            face: x.face_names(face),
            codim,
        });
    }
    if !x.contains_face(face) {
        return Err(Error::FaceNotInComplex(x.face_names(face)));
    }
    let group: Vec<usize> = (0..x.num_facets())
        .filter(|&i| {
            crate::complex::is_sorted_subset(face.vertices(), &x.facets()[i].verts)
        })
        .collect();
    Ok(skeleton_from_group(x, face, &group))
}

/// Skeleton construction from a precomputed list of facets containing `face`.
pub(crate) fn skeleton_from_group(
    x: &WeightedComplex,
    face: &Face,
    facet_ids: &[usize],
) -> SkeletonGraph {
    let codim = x.dim() + 1 - face.len();
    let mut verts: Vec<u32> = Vec::new();
    for &fi in facet_ids {
        for &v in &x.facets()[fi].verts {
            if !face.vertices().contains(&v) {
                verts.push(v);
            }
        }
    }
    verts.sort_unstable();
    verts.dedup();
    let local: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut w = DMatrix::zeros(n, n);
    let mut vertex_mass = vec![0.0; n];
    let mut total_mass = 0.0;
    for &fi in facet_ids {
        let f = &x.facets()[fi];
        total_mass += f.weight;
        let rest: Vec<usize> = f
            .verts
            .iter()
            .filter(|v| !face.vertices().contains(v))
            .map(|v| local[v])
            .collect();
        for (a, &i) in rest.iter().enumerate() {
            vertex_mass[i] += f.weight;
            for &j in &rest[a + 1..] {
                w[(i, j)] += f.weight;
                w[(j, i)] += f.weight;
            }
        }
    }
    let degrees: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    SkeletonGraph {
        labels: verts.iter().map(|&v| x.vertex_name(v).to_string()).collect(),
        parent_vertices: verts,
        w,
        degrees,
        vertex_mass,
        total_mass,
        codim,
    }
}

/// Per-co-dimension worst second eigenvalues.
#[derive(Clone, Debug)]
pub struct GammaEntry {
    pub gamma: f64,
    pub argmax: Face,
}

#[derive(Clone, Debug, Default)]
pub struct SpectralProfile {
    /// Worst signed second eigenvalue per co-dimension `k in 2..=d+1`.
    /// Co-dimensions with a disconnected link report `gamma = 1`.
    pub gamma: BTreeMap<usize, GammaEntry>,
    /// Faces whose link 1-skeleton is disconnected.
    pub witnesses: Vec<Face>,
    /// Per-face eigenvalues, retained on request.
    pub per_face: Option<BTreeMap<usize, Vec<(Face, f64)>>>,
    /// For partite complexes: worst eigenvalue per link type (detailed mode).
    pub per_type: Option<BTreeMap<TypeSet, f64>>,
}

pub fn spectral_profile(x: &WeightedComplex) -> SpectralProfile {
    spectral_profile_opts(x, false)
}

pub fn spectral_profile_detailed(x: &WeightedComplex) -> SpectralProfile {
    spectral_profile_opts(x, true)
}

/// Sweeps every face of every co-dimension `>= 2`. The per-face eigensolves
/// run in parallel; reduction is in deterministic face order.
fn spectral_profile_opts(x: &WeightedComplex, detailed: bool) -> SpectralProfile {
    let mut profile = SpectralProfile {
        per_face: detailed.then(BTreeMap::new),
        per_type: (detailed && x.is_partite()).then(BTreeMap::new),
        ..SpectralProfile::default()
    };
    for codim in 2..=x.dim() + 1 {
        let groups = facet_groups_of_codim(x, codim);
        let evals: Vec<(Face, Result<f64>)> = groups
            .par_iter()
            .map(|(face, ids)| {
                let g = skeleton_from_group(x, face, ids);
                (face.clone(), g.second_eigenvalue())
            })
            .collect();
        let mut best: Option<GammaEntry> = None;
        let mut rows = Vec::new();
        for (face, ev) in evals {
            match ev {
                Ok(lam) => {
                    if best.as_ref().map_or(true, |b| lam > b.gamma) {
                        best = Some(GammaEntry {
                            gamma: lam,
                            argmax: face.clone(),
                        });
                    }
                    if let Some(pt) = profile.per_type.as_mut() {
                        let ts = x.all_types().minus(x.type_set_of(&face));
                        let e = pt.entry(ts).or_insert(f64::NEG_INFINITY);
                        *e = e.max(lam);
                    }
                    rows.push((face, lam));
                }
                Err(_) => {
                    profile.witnesses.push(face.clone());
                    best = Some(GammaEntry {
                        gamma: 1.0,
                        argmax: face.clone(),
                    });
                    rows.push((face, 1.0));
                }
            }
        }
        if let Some(entry) = best {
            profile.gamma.insert(codim, entry);
        }
        if let Some(pf) = profile.per_face.as_mut() {
            pf.insert(codim, rows);
        }
    }
    profile
}

/// Groups facets by each face of the given co-dimension contained in them.
pub(crate) fn facet_groups_of_codim(
    x: &WeightedComplex,
    codim: usize,
) -> BTreeMap<Face, Vec<usize>> {
    let mut map: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    if codim > x.dim() + 1 {
        return map;
    }
    let size = x.dim() + 1 - codim;
    for (fi, f) in x.facets().iter().enumerate() {
        for subset in crate::complex::combinations(&f.verts, size) {
            map.entry(Face::new(subset)).or_default().push(fi);
        }
    }
    map
}

/// Conductance and expander-mixing diagnostics of a vertex cut, plus a
/// certified Rayleigh lower bound on the second walk eigenvalue.
pub fn cut_diagnostics(g: &SkeletonGraph, set: &[usize]) -> Result<CutDiagnostics> {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::BadParams(format!("cut vertex {v} out of range")));
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(Error::EmptyOrFullSet);
    }

    let mut internal = 0.0;
    let mut cut = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let w = g.edge_weight(i, j);
            if w == 0.0 {
                continue;
            }
            match (inside[i], inside[j]) {
                (true, true) => internal += w,
                (true, false) | (false, true) => cut += w,
                _ => {}
            }
        }
    }
    let vol_s: f64 = (0..n).filter(|&i| inside[i]).map(|i| g.weighted_degree(i)).sum();
    let vol_rest = g.total_volume() - vol_s;
    let vol_all = g.total_volume();

    let conductance = cut / vol_s.min(vol_rest);
    let expected = vol_s * vol_s / vol_all;
    let mixing_residual = (internal - expected).abs() / vol_s;
    let rayleigh_lower_bound = (2.0 * internal - expected) / (vol_s - expected);

    Ok(CutDiagnostics {
        conductance,
        mixing_residual,
        rayleigh_lower_bound,
    })
}
