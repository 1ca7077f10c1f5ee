//! Finite abstract simplicial complexes with a total vertex order.
//!
//! Vertices are the indices `0..n`; index order is the vertex order and is
//! preserved by every operation that does not explicitly re-index. A simplex
//! is a strictly increasing `Vec<usize>`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{PremError, Result};

pub type Simplex = Vec<usize>;

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    by_dim: Vec<Vec<Simplex>>,
    index: HashMap<Simplex, usize>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

/// Result of [`validate_complex`]. Empty iff the input satisfies the complex
/// invariants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub closure_violations: Vec<Simplex>,
    pub duplicate_simplices: Vec<Simplex>,
    pub orphan_vertices: Vec<usize>,
    pub empty_simplices: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.closure_violations.is_empty()
            && self.duplicate_simplices.is_empty()
            && self.orphan_vertices.is_empty()
            && self.empty_simplices == 0
    }
}

/// Checks an explicitly listed family of simplices over `num_vertices`
/// vertices: every face present, no duplicates, every vertex a 0-simplex and
/// every referenced vertex declared.
pub fn validate_complex(num_vertices: usize, simplices: &[Vec<usize>]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    let mut normalized = Vec::new();
    for s in simplices {
        if s.is_empty() {
            report.empty_simplices += 1;
            continue;
        }
        let mut t = s.clone();
        t.sort_unstable();
        t.dedup();
        if let Some(&v) = t.iter().find(|&&v| v >= num_vertices) {
            if !report.orphan_vertices.contains(&v) {
                report.orphan_vertices.push(v);
            }
        }
        if !seen.insert(t.clone()) {
            report.duplicate_simplices.push(t.clone());
        }
        normalized.push(t);
    }
    let mut missing = BTreeSet::new();
    for s in &normalized {
        for face in boundary_faces(s) {
            if !seen.contains(&face) {
                missing.insert(face);
            }
        }
    }
    for v in 0..num_vertices {
        if !seen.contains(&vec![v]) {
            missing.insert(vec![v]);
        }
    }
    report.closure_violations = missing.into_iter().collect();
    report.orphan_vertices.sort_unstable();
    report
}

/// Codimension-one faces of `s`, in the order obtained by deleting vertex
/// `i` for `i = 0, 1, …`.
pub fn boundary_faces(s: &[usize]) -> Vec<Simplex> {
    if s.len() <= 1 {
        return Vec::new();
    }
    (0..s.len())
        .map(|i| s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect())
        .collect()
}

/// All nonempty faces of `s` (including `s`).
pub fn all_faces(s: &[usize]) -> Vec<Simplex> {
    let n = s.len();
    let mut out = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u64..(1u64 << n) {
        out.push((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect());
    }
    out
}

impl SimplicialComplex {
    /// Builds the complex generated by `generators` (faces implied).
    pub fn from_generators<I>(labels: Vec<String>, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let n = labels.len();
        let mut all: BTreeSet<Simplex> = (0..n).map(|v| vec![v]).collect();
        for mut s in generators {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(PremError::InvalidComplex(format!("vertex index {v} out of range")));
            }
            if all.contains(&s) {
                continue;
            }
            for f in all_faces(&s) {
                all.insert(f);
            }
        }
        Self::from_closed(labels, all)
    }

    /// Builds from a family that is already closed under faces.
    fn from_closed(labels: Vec<String>, all: BTreeSet<Simplex>) -> Result<Self> {
        let mut label_index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(PremError::InvalidComplex(format!("duplicate vertex id `{l}`")));
            }
        }
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in all {
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        let mut index = HashMap::new();
        for layer in &by_dim {
            for (i, s) in layer.iter().enumerate() {
                index.insert(s.clone(), i);
            }
        }
        Ok(Self {
            labels,
            label_index,
            by_dim,
            index,
        })
    }

    pub fn empty() -> Self {
        Self::from_closed(Vec::new(), BTreeSet::new()).expect("empty complex")
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn labels_of(&self, s: &[usize]) -> Vec<String> {
        s.iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// Dimension; `-1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.by_dim.len() as isize - 1
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn num_simplices(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index.contains_key(s)
    }

    /// Position of `s` within `simplices(dim s)`.
    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Simplices that are not a proper face of another simplex, sorted.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut has_coface = std::collections::HashSet::new();
        for layer in self.by_dim.iter().skip(1) {
            for s in layer {
                for f in boundary_faces(s) {
                    has_coface.insert(f);
                }
            }
        }
        let mut out: Vec<Simplex> = self
            .all_simplices()
            .filter(|s| !has_coface.contains(*s))
            .cloned()
            .collect();
        out.sort();
        out
    }

    /// True iff every maximal simplex has dimension `dim()`.
    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.maximal_simplices().iter().all(|s| s.len() as isize - 1 == d)
    }

    /// Vertex adjacency lists of the 1-skeleton.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for e in self.simplices(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        adj
    }

    /// Connected component label per vertex, labels numbered in order of
    /// first appearance.
    pub fn vertex_components(&self) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.num_vertices());
        for e in self.simplices(1) {
            uf.union(e[0], e[1]);
        }
        uf.labels()
    }

    /// Map vertex → maximal simplices containing it.
    pub fn vertex_to_maximal(&self) -> Vec<Vec<Simplex>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for s in self.maximal_simplices() {
            for &v in &s {
                out[v].push(s.clone());
            }
        }
        out
    }

    /// Link of a vertex as a standalone complex, keeping the vertex order of
    /// the surviving vertices. `cofaces` lists the maximal simplices at `v`.
    pub fn link_from_cofaces(&self, v: usize, cofaces: &[Simplex]) -> SimplicialComplex {
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for s in cofaces {
            verts.extend(s.iter().copied().filter(|&w| w != v));
        }
        let verts: Vec<usize> = verts.into_iter().collect();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let labels = verts.iter().map(|&w| self.labels[w].clone()).collect();
        let gens: Vec<Simplex> = cofaces
            .iter()
            .map(|s| s.iter().filter(|&&w| w != v).map(|w| pos[w]).collect::<Simplex>())
            .filter(|s| !s.is_empty())
            .collect();
        SimplicialComplex::from_generators(labels, gens).expect("link is a complex")
    }

    pub fn link(&self, v: usize) -> SimplicialComplex {
        let cofaces: Vec<Simplex> = self
            .maximal_simplices()
            .into_iter()
            .filter(|s| s.contains(&v))
            .collect();
        self.link_from_cofaces(v, &cofaces)
    }

    /// Vertex set of the closed star of `v`.
    pub fn closed_star_vertices(&self, v: usize, adj: &[Vec<usize>]) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = adj[v].iter().copied().collect();
        s.insert(v);
        s
    }

    /// True iff `sub` (as a vertex set) spans a full subcomplex: every simplex
    /// whose vertices all lie in `sub` is listed by `members`.
    pub fn is_full_subcomplex(&self, members: &BTreeSet<Simplex>) -> bool {
        let verts: BTreeSet<usize> = members.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect();
        self.all_simplices()
            .filter(|s| s.iter().all(|v| verts.contains(v)))
            .all(|s| members.contains(s))
    }

    /// Full subcomplex spanned by a vertex set, as a set of simplices.
    pub fn induced(&self, verts: &BTreeSet<usize>) -> BTreeSet<Simplex> {
        self.all_simplices()
            .filter(|s| s.iter().all(|v| verts.contains(v)))
            .cloned()
            .collect()
    }

    /// Disjoint union; the second complex's labels get `suffix` appended
    /// when they collide.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let n = self.num_vertices();
        let mut labels = self.labels.clone();
        for l in &other.labels {
            let mut l2 = l.clone();
            while self.label_index.contains_key(&l2) {
                l2.push('\'');
            }
            labels.push(l2);
        }
        let gens = self.maximal_simplices().into_iter().chain(
            other
                .maximal_simplices()
                .into_iter()
                .map(|s| s.iter().map(|v| v + n).collect()),
        );
        SimplicialComplex::from_generators(labels, gens).expect("disjoint union")
    }
}

/// Path-compressing union–find.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// (count, label per element) with labels in order of first appearance.
    pub fn labels(&mut self) -> (usize, Vec<usize>) {
        let n = self.parent.len();
        let mut map = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let r = self.find(x);
            let next = map.len();
            out.push(*map.entry(r).or_insert(next));
        }
        (map.len(), out)
    }
}

/// Convenience constructor from string labels, used by tests and generators.
pub fn complex_from_labels(labels: &[&str], generators: &[&[&str]]) -> Result<SimplicialComplex> {
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let idx: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut gens = Vec::new();
    for g in generators {
        let mut s = Vec::new();
        for l in *g {
            s.push(*idx.get(l).ok_or_else(|| PremError::UnknownVertex(l.to_string()))?);
        }
        gens.push(s);
    }
    SimplicialComplex::from_generators(labels, gens)
}

/// The cycle graph `C_n` on vertices `prefix0 … prefix{n-1}` (n ≥ 3).
pub fn cycle(n: usize, prefix: &str) -> SimplicialComplex {
    let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let gens = (0..n).map(|i| vec![i, (i + 1) % n]);
    SimplicialComplex::from_generators(labels, gens).expect("cycle")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_triangle_valid() {
        let s = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![1, 2],
            vec![0, 2],
            vec![0, 1, 2],
        ];
        assert!(validate_complex(3, &s).is_valid());
    }

    #[test]
    fn missing_edge_reported() {
        let s = vec![vec![0], vec![1], vec![2], vec![1, 2], vec![0, 2], vec![0, 1, 2]];
        let r = validate_complex(3, &s);
        assert_eq!(r.closure_violations, vec![vec![0, 1]]);
    }

    #[test]
    fn duplicates_and_orphans() {
        let s = vec![vec![0], vec![0], vec![0, 3]];
        let r = validate_complex(1, &s);
        assert_eq!(r.duplicate_simplices, vec![vec![0]]);
        assert_eq!(r.orphan_vertices, vec![3]);
    }

    #[test]
    fn empty_complex() {
        assert!(validate_complex(0, &[]).is_valid());
        assert_eq!(SimplicialComplex::empty().dim(), -1);
    }

    #[test]
    fn closure_and_counts() {
        let c = complex_from_labels(&["a", "b", "c", "d"], &[&["a", "b", "c"], &["c", "d"]]).unwrap();
        assert_eq!(c.f_vector(), vec![4, 4, 1]);
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(c.maximal_simplices(), vec![vec![0, 1, 2], vec![2, 3]]);
        assert!(!c.is_pure());
        let link = c.link(2);
        assert_eq!(link.f_vector(), vec![3, 1]);
    }

    #[test]
    fn cycle_components() {
        let c = cycle(5, "x").disjoint_union(&cycle(3, "x"));
        let (n, labels) = c.vertex_components();
        assert_eq!(n, 2);
        assert_eq!(labels[0], labels[4]);
        assert_ne!(labels[0], labels[5]);
        assert_eq!(c.label(5), "x0'");
    }
}
