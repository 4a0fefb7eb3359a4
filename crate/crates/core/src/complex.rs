//! Weighted pure simplicial complexes: construction, links, induced
//! distributions, type structure, connectivity, and products.
//!
//! A complex is given by its facets (all of the same size) together with a
//! strictly positive weight per facet. Weights are normalized to a
//! probability distribution at build time; every reported quantity is
//! invariant under global rescaling of the input weights.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

/// Set of type labels, stored as a bitmask. Labels must be < 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TypeSet(pub u64);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn singleton(label: usize) -> Self {
        TypeSet(1 << label)
    }

    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        let mut mask = 0u64;
        for l in labels {
            mask |= 1 << l;
        }
        TypeSet(mask)
    }

    pub fn contains(&self, label: usize) -> bool {
        label < 64 && self.0 >> label & 1 == 1
    }

    pub fn insert(&mut self, label: usize) {
        self.0 |= 1 << label;
    }

    pub fn remove(&mut self, label: usize) {
        self.0 &= !(1 << label);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn minus(&self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & !other.0)
    }

    pub fn is_subset_of(&self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |l| self.contains(*l))
    }

    pub fn labels(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A face: a sorted set of vertex ids. The empty face is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Face(Vec<u32>);

impl Face {
    pub fn new(mut verts: Vec<u32>) -> Self {
        verts.sort_unstable();
        verts.dedup();
        Face(verts)
    }

    pub fn empty() -> Self {
        Face(Vec::new())
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension; the empty face has dimension -1.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn union(&self, other: &Face) -> Face {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Face::new(v)
    }

    pub fn contains_all(&self, other: &Face) -> bool {
        is_sorted_subset(&other.0, &self.0)
    }
}

impl From<Vec<u32>> for Face {
    fn from(v: Vec<u32>) -> Self {
        Face::new(v)
    }
}

/// Checks `small ⊆ big` for sorted slices by a merge scan.
pub(crate) fn is_sorted_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    'outer: for s in small {
        for b in it.by_ref() {
            match b.cmp(s) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

#[derive(Clone, Debug)]
pub struct Facet {
    pub verts: Vec<u32>,
    pub weight: f64,
}

/// Distribution over the faces of one level of a complex.
#[derive(Clone, Debug)]
pub struct FaceDistribution {
    pub level: usize,
    pub weights: Vec<(Face, f64)>,
}

impl FaceDistribution {
    pub fn probability(&self, face: &Face) -> f64 {
        self.weights
            .iter()
            .find(|(f, _)| f == face)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

/// Connectivity report: total connectivity of all links of co-dimension >= 2,
/// and (for partite complexes) connectivity of the 1-skeleton restricted to
/// every type subset of size >= 2.
#[derive(Clone, Debug)]
pub struct ConnectivityReport {
    pub totally_connected: bool,
    /// First face whose link 1-skeleton is disconnected, if any.
    pub witness: Option<Face>,
    pub type_connected: BTreeMap<TypeSet, bool>,
    /// Set when the type-subset sweep was skipped because 2^(d+1) exceeds
    /// the enumeration budget.
    pub type_sweep_skipped: bool,
}

/// A pure weighted simplicial complex, optionally (d+1)-partite.
///
/// Vertices are interned strings; facet weights are normalized to sum to 1.
/// Instances are immutable after construction, so all operations are safe to
/// call concurrently.
#[derive(Clone, Debug)]
pub struct WeightedComplex {
    names: Vec<String>,
    index: HashMap<String, u32>,
    types: Option<Vec<usize>>,
    type_labels: Vec<usize>,
    facets: Vec<Facet>,
    dim: usize,
}

/// Type-subset sweeps are exponential in d+1; cap them at this dimension.
pub const SWEEP_DIM_CAP: usize = 16;

impl WeightedComplex {
    /// Builds a validated complex from named facets and an optional type map.
    pub fn build(
        facets: &[(Vec<String>, f64)],
        types: Option<&BTreeMap<String, usize>>,
    ) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::BadParams("empty facet list".into()));
        }
        let expected = facets[0].0.len();
        if expected == 0 {
            return Err(Error::BadParams("facets must be nonempty vertex sets".into()));
        }
        for (verts, w) in facets {
            let mut sorted = verts.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != verts.len() {
                return Err(Error::BadParams(format!(
                    "facet {verts:?} contains duplicate vertices"
                )));
            }
            if verts.len() != expected {
                return Err(Error::NonPure {
                    facet: verts.clone(),
                    got: verts.len(),
                    expected,
                });
            }
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight(*w));
            }
        }

        let mut names: Vec<String> = facets
            .iter()
            .flat_map(|(v, _)| v.iter().cloned())
            .collect();
        names.sort();
        names.dedup();
        let index: HashMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();

        let type_vec = match types {
            None => None,
            Some(map) => {
                let mut tv = vec![0usize; names.len()];
                for (i, name) in names.iter().enumerate() {
                    match map.get(name) {
                        Some(&t) => {
                            if t >= 64 {
                                return Err(Error::PartiteViolation(format!(
                                    "type label {t} out of range (must be < 64)"
                                )));
                            }
                            tv[i] = t;
                        }
                        None => {
                            return Err(Error::PartiteViolation(format!(
                                "vertex {name} has no type"
                            )))
                        }
                    }
                }
                Some(tv)
            }
        };

        let mut id_facets: Vec<Facet> = facets
            .iter()
            .map(|(verts, w)| {
                let mut ids: Vec<u32> = verts.iter().map(|n| index[n]).collect();
                ids.sort_unstable();
                Facet {
                    verts: ids,
                    weight: *w,
                }
            })
            .collect();
        id_facets.sort_by(|a, b| a.verts.cmp(&b.verts));
        // Merge duplicate facets by summing their weights.
        let mut merged: Vec<Facet> = Vec::with_capacity(id_facets.len());
        for f in id_facets {
            match merged.last_mut() {
                Some(last) if last.verts == f.verts => last.weight += f.weight,
                _ => merged.push(f),
            }
        }

        Self::from_parts(names, index, type_vec, merged)
    }

    /// Internal constructor over already-interned data; validates the partite
    /// structure and normalizes weights.
    pub(crate) fn from_parts(
        names: Vec<String>,
        index: HashMap<String, u32>,
        types: Option<Vec<usize>>,
        facets: Vec<Facet>,
    ) -> Result<Self> {
        let dim = facets[0].verts.len() - 1;
        let mut type_labels = Vec::new();
        if let Some(tv) = &types {
            let mut labels: Vec<usize> = tv.clone();
            labels.sort_unstable();
            labels.dedup();
            if labels.len() != dim + 1 {
                return Err(Error::PartiteViolation(format!(
                    "{} distinct type labels for a {}-dimensional complex (need {})",
                    labels.len(),
                    dim,
                    dim + 1
                )));
            }
            for f in &facets {
                let mut seen = TypeSet::EMPTY;
                for &v in &f.verts {
                    let t = tv[v as usize];
                    if seen.contains(t) {
                        return Err(Error::PartiteViolation(format!(
                            "facet {:?} has two vertices of type {t}",
                            verts_to_names(&names, &f.verts)
                        )));
                    }
                    seen.insert(t);
                }
                if seen.len() != dim + 1 {
                    return Err(Error::PartiteViolation(format!(
                        "facet {:?} misses a type",
                        verts_to_names(&names, &f.verts)
                    )));
                }
            }
            type_labels = labels;
        }

        let total: f64 = facets.iter().map(|f| f.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NonpositiveWeight(total));
        }
        let facets = facets
            .into_iter()
            .map(|f| Facet {
                verts: f.verts,
                weight: f.weight / total,
            })
            .collect();

        Ok(WeightedComplex {
            names,
            index,
            types,
            type_labels,
            facets,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_partite(&self) -> bool {
        self.types.is_some()
    }

    /// Sorted distinct type labels; empty for non-partite complexes.
    pub fn type_labels(&self) -> &[usize] {
        &self.type_labels
    }

    pub fn all_types(&self) -> TypeSet {
        TypeSet::from_labels(self.type_labels.iter().copied())
    }

    pub fn type_of(&self, v: u32) -> Option<usize> {
        self.types.as_ref().map(|tv| tv[v as usize])
    }

    pub fn vertex_name(&self, v: u32) -> &str {
        &self.names[v as usize]
    }

    pub fn vertex_id(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn face_names(&self, face: &Face) -> Vec<String> {
        verts_to_names(&self.names, face.vertices())
    }

    pub fn face_from_names(&self, names: &[&str]) -> Result<Face> {
        let mut ids = Vec::with_capacity(names.len());
        for n in names {
            match self.vertex_id(n) {
                Some(id) => ids.push(id),
                None => {
                    return Err(Error::FaceNotInComplex(
                        names.iter().map(|s| s.to_string()).collect(),
                    ))
                }
            }
        }
        Ok(Face::new(ids))
    }

    pub fn type_set_of(&self, face: &Face) -> TypeSet {
        match &self.types {
            None => TypeSet::EMPTY,
            Some(tv) => TypeSet::from_labels(face.vertices().iter().map(|&v| tv[v as usize])),
        }
    }

    pub fn codim(&self, face: &Face) -> usize {
        self.dim + 1 - face.len()
    }

    pub fn contains_face(&self, face: &Face) -> bool {
        if face.len() > self.dim + 1 {
            return false;
        }
        self.facets
            .iter()
            .any(|f| is_sorted_subset(face.vertices(), &f.verts))
    }

    /// Total weight of facets containing `face`.
    pub fn face_weight(&self, face: &Face) -> f64 {
        self.facets
            .iter()
            .filter(|f| is_sorted_subset(face.vertices(), &f.verts))
            .map(|f| f.weight)
            .sum()
    }

    /// The link of `face`: facets are `F \ face` for facets `F ⊇ face`, with
    /// weights proportional to the parent weights. Requires codim >= 1.
    pub fn link(&self, face: &Face) -> Result<WeightedComplex> {
        if !self.contains_face(face) {
            return Err(Error::FaceNotInComplex(self.face_names(face)));
        }
        if face.len() == self.dim + 1 {
            return Err(Error::CodimTooSmall {
                face: self.face_names(face),
                codim: 0,
            });
        }
        let mut link_facets = Vec::new();
        let mut used: HashSet<u32> = HashSet::new();
        for f in &self.facets {
            if is_sorted_subset(face.vertices(), &f.verts) {
                let rest: Vec<u32> = f
                    .verts
                    .iter()
                    .copied()
                    .filter(|v| !face.vertices().contains(v))
                    .collect();
                used.extend(rest.iter().copied());
                link_facets.push((rest, f.weight));
            }
        }

        // Re-intern onto a fresh, dense vertex numbering.
        let mut kept: Vec<u32> = used.into_iter().collect();
        kept.sort_unstable();
        let remap: HashMap<u32, u32> = kept
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let names: Vec<String> = kept
            .iter()
            .map(|&old| self.names[old as usize].clone())
            .collect();
        let index: HashMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        let types = self.types.as_ref().map(|tv| {
            kept.iter()
                .map(|&old| tv[old as usize])
                .collect::<Vec<usize>>()
        });
        let mut facets: Vec<Facet> = link_facets
            .into_iter()
            .map(|(verts, w)| {
                let mut ids: Vec<u32> = verts.iter().map(|v| remap[v]).collect();
                ids.sort_unstable();
                Facet {
                    verts: ids,
                    weight: w,
                }
            })
            .collect();
        facets.sort_by(|a, b| a.verts.cmp(&b.verts));
        let mut merged: Vec<Facet> = Vec::with_capacity(facets.len());
        for f in facets {
            match merged.last_mut() {
                Some(last) if last.verts == f.verts => last.weight += f.weight,
                _ => merged.push(f),
            }
        }
        WeightedComplex::from_parts(names, index, types, merged)
    }

    /// The induced distribution on faces of dimension `level`:
    /// `pi_i(sigma) = Pr[sigma ⊆ tau] / C(d+1, i+1)` for `tau ~ pi`.
    pub fn induced_distribution(&self, level: usize) -> Result<FaceDistribution> {
        if level > self.dim {
            return Err(Error::LevelOutOfRange {
                level: level as i64,
                dim: self.dim,
            });
        }
        let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let size = level + 1;
        for f in &self.facets {
            for subset in combinations(&f.verts, size) {
                *acc.entry(subset).or_insert(0.0) += f.weight;
            }
        }
        let norm = binomial(self.dim + 1, size) as f64;
        let weights: Vec<(Face, f64)> = acc
            .into_iter()
            .map(|(v, w)| (Face(v), w / norm))
            .collect();

        if level == 0 && self.is_partite() {
            self.debug_check_partite_facts(&weights);
        }
        Ok(FaceDistribution { level, weights })
    }

    /// Partite normalization facts for the level-0 distribution, checked in
    /// debug builds.
    fn debug_check_partite_facts(&self, level0: &[(Face, f64)]) {
        if cfg!(debug_assertions) {
            let k = (self.dim + 1) as f64;
            let mut per_type: BTreeMap<usize, f64> = BTreeMap::new();
            for (face, p) in level0 {
                let v = face.vertices()[0];
                let contain_prob = self.face_weight(face);
                debug_assert!(
                    (k * p - contain_prob).abs() <= 1e-10,
                    "level-0 normalization fact violated at {}",
                    self.vertex_name(v)
                );
                *per_type.entry(self.type_of(v).unwrap()).or_insert(0.0) += contain_prob;
            }
            for (t, s) in per_type {
                debug_assert!((s - 1.0).abs() <= 1e-10, "type {t} mass {s} != 1");
            }
        }
    }

    /// All distinct faces of the given dimension.
    pub fn faces_of_dim(&self, level: usize) -> Vec<Face> {
        if level > self.dim {
            return Vec::new();
        }
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        for f in &self.facets {
            for subset in combinations(&f.verts, level + 1) {
                set.insert(subset);
            }
        }
        let mut faces: Vec<Face> = set.into_iter().map(Face).collect();
        faces.sort();
        faces
    }

    /// All distinct faces of the given co-dimension (`0` means facets).
    pub fn faces_of_codim(&self, codim: usize) -> Vec<Face> {
        if codim > self.dim + 1 {
            return Vec::new();
        }
        if codim == self.dim + 1 {
            return vec![Face::empty()];
        }
        self.faces_of_dim(self.dim - codim)
    }

    /// Distinct projections of facets onto the given set of types.
    pub fn faces_of_type(&self, s: TypeSet) -> Result<Vec<Face>> {
        let tv = self.types.as_ref().ok_or(Error::NotPartite)?;
        if !s.is_subset_of(self.all_types()) {
            return Err(Error::PartiteViolation(format!(
                "type set {s:?} not contained in {:?}",
                self.all_types()
            )));
        }
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        for f in &self.facets {
            let proj: Vec<u32> = f
                .verts
                .iter()
                .copied()
                .filter(|&v| s.contains(tv[v as usize]))
                .collect();
            set.insert(proj);
        }
        let mut faces: Vec<Face> = set.into_iter().map(Face).collect();
        faces.sort();
        Ok(faces)
    }

    /// 1-skeleton adjacency of this complex restricted to the given vertex
    /// predicate; used by the connectivity checks.
    fn bfs_connected(&self, keep: impl Fn(u32) -> bool) -> bool {
        let verts: Vec<u32> = (0..self.names.len() as u32).filter(|&v| keep(v)).collect();
        if verts.len() <= 1 {
            return true;
        }
        let mut adj: HashMap<u32, Vec<u32>> = verts.iter().map(|&v| (v, Vec::new())).collect();
        for f in &self.facets {
            let present: Vec<u32> = f.verts.iter().copied().filter(|&v| keep(v)).collect();
            for i in 0..present.len() {
                for j in i + 1..present.len() {
                    adj.get_mut(&present[i]).unwrap().push(present[j]);
                    adj.get_mut(&present[j]).unwrap().push(present[i]);
                }
            }
        }
        let mut seen: HashSet<u32> = HashSet::new();
        let mut stack = vec![verts[0]];
        seen.insert(verts[0]);
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == verts.len()
    }

    /// Checks the 1-skeleton connectivity of every link of co-dimension >= 2
    /// and, for partite complexes, the type-restricted connectivity of the
    /// whole 1-skeleton for every type subset of size >= 2.
    pub fn connectivity_report(&self) -> ConnectivityReport {
        let mut witness = None;
        'outer: for codim in 2..=self.dim + 1 {
            for face in self.faces_of_codim(codim) {
                let link = self
                    .link(&face)
                    .expect("enumerated face must be in the complex");
                if !link.bfs_connected(|_| true) {
                    witness = Some(face);
                    break 'outer;
                }
            }
        }

        let mut type_connected = BTreeMap::new();
        let mut type_sweep_skipped = false;
        if self.is_partite() {
            if self.dim > SWEEP_DIM_CAP {
                type_sweep_skipped = true;
            } else {
                let labels = self.type_labels.clone();
                let n = labels.len();
                for mask in 0u64..(1 << n) {
                    if mask.count_ones() < 2 {
                        continue;
                    }
                    let s = TypeSet::from_labels(
                        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i]),
                    );
                    let tv = self.types.as_ref().unwrap();
                    let ok = self.bfs_connected(|v| s.contains(tv[v as usize]));
                    type_connected.insert(s, ok);
                }
            }
        }

        ConnectivityReport {
            totally_connected: witness.is_none(),
            witness,
            type_connected,
            type_sweep_skipped,
        }
    }

    /// Product of weighted complexes: facets are unions of one facet per
    /// factor, weights multiply. Ground sets (and type ranges, when all
    /// factors are partite) must be disjoint.
    pub fn product(factors: &[&WeightedComplex]) -> Result<WeightedComplex> {
        if factors.is_empty() {
            return Err(Error::BadParams("product of zero factors".into()));
        }
        let mut seen_names: HashSet<&str> = HashSet::new();
        for x in factors {
            for n in &x.names {
                if !seen_names.insert(n) {
                    return Err(Error::GroundSetOverlap(format!("vertex {n} repeats")));
                }
            }
        }
        let partite = factors.iter().all(|x| x.is_partite());
        if partite {
            let mut seen = TypeSet::EMPTY;
            for x in factors {
                let tx = x.all_types();
                if seen.0 & tx.0 != 0 {
                    return Err(Error::PartiteViolation(
                        "type ranges of product factors overlap".into(),
                    ));
                }
                seen = seen.union(tx);
            }
        }

        // Cross product of facet lists, names carried over verbatim.
        let mut named: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
        for x in factors {
            let mut next = Vec::with_capacity(named.len() * x.facets.len());
            for (prefix, w) in &named {
                for f in &x.facets {
                    let mut verts = prefix.clone();
                    verts.extend(f.verts.iter().map(|&v| x.names[v as usize].clone()));
                    next.push((verts, w * f.weight));
                }
            }
            named = next;
        }
        let types: Option<BTreeMap<String, usize>> = if partite {
            let mut map = BTreeMap::new();
            for x in factors {
                let tv = x.types.as_ref().unwrap();
                for (i, n) in x.names.iter().enumerate() {
                    map.insert(n.clone(), tv[i]);
                }
            }
            Some(map)
        } else {
            None
        };
        WeightedComplex::build(&named, types.as_ref())
    }
}

fn verts_to_names(names: &[String], verts: &[u32]) -> Vec<String> {
    verts.iter().map(|&v| names[v as usize].clone()).collect()
}

/// All size-`k` subsets of a sorted slice, in lexicographic order.
pub(crate) fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(verts: &[&str], w: f64) -> (Vec<String>, f64) {
        (verts.iter().map(|s| s.to_string()).collect(), w)
    }

    fn types(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(n, t)| (n.to_string(), *t)).collect()
    }

    #[test]
    fn single_facet_partite() {
        let x = WeightedComplex::build(
            &[named(&["a", "b", "c"], 1.0)],
            Some(&types(&[("a", 0), ("b", 1), ("c", 2)])),
        )
        .unwrap();
        assert_eq!(x.dim(), 2);
        assert!(x.is_partite());
        assert_eq!(x.num_facets(), 1);
        assert!((x.facets()[0].weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_pure_rejected() {
        let err = WeightedComplex::build(&[named(&["a", "b"], 1.0), named(&["a", "b", "c"], 1.0)], None)
            .unwrap_err();
        assert!(matches!(err, Error::NonPure { .. }));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        let err = WeightedComplex::build(&[named(&["a", "b"], 0.0)], None).unwrap_err();
        assert!(matches!(err, Error::NonpositiveWeight(_)));
    }

    #[test]
    fn partite_violation_rejected() {
        // b and c share a type, so the facet misses type 2.
        let err = WeightedComplex::build(
            &[named(&["a", "b", "c"], 1.0)],
            Some(&types(&[("a", 0), ("b", 1), ("c", 1)])),
        )
        .unwrap_err();
        assert!(matches!(err, Error::PartiteViolation(_)));
    }

    #[test]
    fn link_of_empty_is_identity() {
        let x = WeightedComplex::build(
            &[named(&["a", "b"], 2.0), named(&["b", "c"], 6.0)],
            None,
        )
        .unwrap();
        let l = x.link(&Face::empty()).unwrap();
        assert_eq!(l.num_facets(), 2);
        assert!((l.facets()[0].weight - 0.25).abs() < 1e-15);
        assert!((l.facets()[1].weight - 0.75).abs() < 1e-15);
    }

    #[test]
    fn link_of_subfacet_is_zero_dimensional() {
        let x = WeightedComplex::build(
            &[named(&["a", "b", "c"], 1.0), named(&["a", "b", "d"], 3.0)],
            None,
        )
        .unwrap();
        let face = x.face_from_names(&["a", "b"]).unwrap();
        let l = x.link(&face).unwrap();
        assert_eq!(l.dim(), 0);
        assert_eq!(l.num_facets(), 2);
        let pc = l.facets()[l.vertex_id("c").unwrap() as usize].weight;
        let pd = l.facets()[l.vertex_id("d").unwrap() as usize].weight;
        assert!((pc - 0.25).abs() < 1e-12 && (pd - 0.75).abs() < 1e-12);
    }

    #[test]
    fn link_weights_sum_to_one() {
        let x = WeightedComplex::build(
            &[
                named(&["a", "b", "c"], 1.0),
                named(&["a", "b", "d"], 2.0),
                named(&["b", "c", "d"], 5.0),
            ],
            None,
        )
        .unwrap();
        for face in x.faces_of_dim(0) {
            let l = x.link(&face).unwrap();
            let s: f64 = l.facets().iter().map(|f| f.weight).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn link_of_link_composes() {
        let x = WeightedComplex::build(
            &[
                named(&["a", "b", "c", "d"], 1.0),
                named(&["a", "b", "c", "e"], 2.0),
                named(&["a", "b", "d", "e"], 0.5),
                named(&["b", "c", "d", "e"], 1.5),
            ],
            None,
        )
        .unwrap();
        let tau = x.face_from_names(&["b"]).unwrap();
        let l1 = x.link(&tau).unwrap();
        let sigma = l1.face_from_names(&["c"]).unwrap();
        let l2 = l1.link(&sigma).unwrap();
        let both = x.face_from_names(&["b", "c"]).unwrap();
        let direct = x.link(&both).unwrap();
        assert_eq!(l2.num_facets(), direct.num_facets());
        for f in l2.facets() {
            let names: Vec<&str> = f.verts.iter().map(|&v| l2.vertex_name(v)).collect();
            let df = direct.face_from_names(&names).unwrap();
            let dw = direct
                .facets()
                .iter()
                .find(|g| g.verts == df.vertices())
                .unwrap()
                .weight;
            assert!((f.weight - dw).abs() < 1e-12);
        }
    }

    #[test]
    fn induced_distribution_point_mass_and_uniform() {
        let x = WeightedComplex::build(&[named(&["a", "b", "c"], 4.0)], None).unwrap();
        let top = x.induced_distribution(2).unwrap();
        assert_eq!(top.weights.len(), 1);
        assert!((top.weights[0].1 - 1.0).abs() < 1e-15);
        let verts = x.induced_distribution(0).unwrap();
        for (_, p) in &verts.weights {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn induced_distribution_sums_to_one() {
        let x = WeightedComplex::build(
            &[
                named(&["a", "b", "c"], 1.0),
                named(&["a", "b", "d"], 2.0),
                named(&["b", "c", "d"], 5.0),
            ],
            None,
        )
        .unwrap();
        for level in 0..=x.dim() {
            let d = x.induced_distribution(level).unwrap();
            let s: f64 = d.weights.iter().map(|(_, p)| p).sum();
            assert!((s - 1.0).abs() < 1e-12, "level {level} sums to {s}");
        }
        assert!(matches!(
            x.induced_distribution(3),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn faces_of_type_edges() {
        let x = WeightedComplex::build(
            &[named(&["a", "b", "c"], 1.0), named(&["a", "b2", "c"], 1.0)],
            Some(&types(&[("a", 0), ("b", 1), ("b2", 1), ("c", 2)])),
        )
        .unwrap();
        assert_eq!(x.faces_of_type(TypeSet::EMPTY).unwrap(), vec![Face::empty()]);
        assert_eq!(x.faces_of_type(x.all_types()).unwrap().len(), 2);
        let s = TypeSet::from_labels([0, 2]);
        assert_eq!(x.faces_of_type(s).unwrap().len(), 1);
        let nonpartite = WeightedComplex::build(&[named(&["a", "b"], 1.0)], None).unwrap();
        assert!(matches!(
            nonpartite.faces_of_type(s),
            Err(Error::NotPartite)
        ));
    }

    #[test]
    fn connectivity_single_facet_and_disjoint() {
        let x = WeightedComplex::build(&[named(&["a", "b", "c"], 1.0)], None).unwrap();
        assert!(x.connectivity_report().totally_connected);
        let y = WeightedComplex::build(
            &[named(&["a", "b"], 1.0), named(&["c", "d"], 1.0)],
            None,
        )
        .unwrap();
        let rep = y.connectivity_report();
        assert!(!rep.totally_connected);
        assert_eq!(rep.witness, Some(Face::empty()));
    }

    #[test]
    fn product_of_edges() {
        // two 1-dimensional uniform two-edge paths -> 4 facets each weight 1/4
        let y1 = WeightedComplex::build(
            &[named(&["u0", "u1"], 1.0), named(&["u1", "u2"], 1.0)],
            None,
        )
        .unwrap();
        let y2 = WeightedComplex::build(
            &[named(&["w0", "w1"], 1.0), named(&["w1", "w2"], 1.0)],
            None,
        )
        .unwrap();
        let p = WeightedComplex::product(&[&y1, &y2]).unwrap();
        assert_eq!(p.num_facets(), 4);
        for f in p.facets() {
            assert!((f.weight - 0.25).abs() < 1e-15);
        }
        let overlap = WeightedComplex::product(&[&y1, &y1]);
        assert!(matches!(overlap, Err(Error::GroundSetOverlap(_))));
    }

    #[test]
    fn binomial_and_combinations() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 4), 4845);
        let c = combinations(&[1, 2, 3, 4], 2);
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![1, 2]);
        assert_eq!(c[5], vec![3, 4]);
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<u32>::new()]);
    }
}
