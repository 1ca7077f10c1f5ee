//! Subdivisions with a record of where each new vertex sits in the parent.
//!
//! A [`SubdivisionRecord`] stores, for each child vertex, its barycentric
//! coordinates over the parent vertices. The carrier of a child simplex is
//! the union of the supports of its vertices.

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Zero};

use crate::complex::{boundary_faces, Simplex, SimplicialComplex};
use crate::error::{PremError, Result};
use crate::geometry::GeometricComplex;
use crate::map::{vertex_point, BaryPoint, SemiLinearMap, SimplicialMap};
use crate::rational::{dist_sq, int, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct SubdivisionRecord {
    pub parent: SimplicialComplex,
    pub child: SimplicialComplex,
    pub vertex_coords: Vec<BaryPoint>,
}

impl SubdivisionRecord {
    pub fn identity(k: &SimplicialComplex) -> Self {
        Self {
            parent: k.clone(),
            child: k.clone(),
            vertex_coords: (0..k.num_vertices()).map(vertex_point).collect(),
        }
    }

    /// Smallest parent simplex containing the child simplex `s`.
    pub fn carrier(&self, s: &[usize]) -> Result<Simplex> {
        let support: BTreeSet<usize> = s.iter().flat_map(|&v| self.vertex_coords[v].keys().copied()).collect();
        let support: Simplex = support.into_iter().collect();
        if self.parent.contains(&support) {
            Ok(support)
        } else {
            Err(PremError::Internal(format!("child simplex {s:?} has no carrier")))
        }
    }

    /// Expresses a point given over child vertices in parent coordinates.
    pub fn to_parent(&self, p: &BaryPoint) -> BaryPoint {
        let mut out = BaryPoint::new();
        for (&v, w) in p {
            for (&u, c) in &self.vertex_coords[v] {
                *out.entry(u).or_insert_with(Rational::zero) += w * c;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    /// `self` followed by `next`, where `next.parent == self.child`.
    pub fn compose(&self, next: &SubdivisionRecord) -> Result<SubdivisionRecord> {
        if next.parent != self.child {
            return Err(PremError::Mismatch("subdivisions do not compose".into()));
        }
        Ok(SubdivisionRecord {
            parent: self.parent.clone(),
            child: next.child.clone(),
            vertex_coords: next.vertex_coords.iter().map(|p| self.to_parent(p)).collect(),
        })
    }

    /// The identity of |K| seen as a map from the child to the parent.
    pub fn as_map(&self) -> SemiLinearMap {
        SemiLinearMap {
            source: self.child.clone(),
            target: self.parent.clone(),
            images: self.vertex_coords.clone(),
        }
    }

    pub fn realize(&self, parent: &GeometricComplex) -> GeometricComplex {
        GeometricComplex {
            complex: self.child.clone(),
            coords: self.vertex_coords.iter().map(|p| parent.point(p)).collect(),
        }
    }

    /// Every child simplex has a carrier and every coordinate vector is a
    /// convex combination.
    pub fn check(&self) -> Result<()> {
        for (v, p) in self.vertex_coords.iter().enumerate() {
            let total = p.values().fold(Rational::zero(), |a, b| a + b);
            if !total.is_one() || p.values().any(|x| *x <= Rational::zero()) {
                return Err(PremError::Internal(format!("bad coordinates at child vertex {v}")));
            }
        }
        for s in self.child.maximal_simplices() {
            self.carrier(&s)?;
        }
        Ok(())
    }
}

/// Position of simplex `s` among the vertices of the barycentric
/// subdivision: simplices ordered by dimension, then lexicographically.
pub fn sd_vertex(k: &SimplicialComplex, s: &[usize]) -> Option<usize> {
    let d = s.len().checked_sub(1)?;
    let offset: usize = (0..d).map(|i| k.count(i)).sum();
    Some(offset + k.index_of(s)?)
}

fn sd_label(k: &SimplicialComplex, s: &[usize]) -> String {
    if s.len() == 1 {
        k.label(s[0]).to_string()
    } else {
        format!("<{}>", k.labels_of(s).join("+"))
    }
}

fn full_flags(s: &[usize], out: &mut Vec<Vec<Simplex>>) {
    if s.len() == 1 {
        out.push(vec![s.to_vec()]);
        return;
    }
    for f in boundary_faces(s) {
        let mut sub = Vec::new();
        full_flags(&f, &mut sub);
        for mut flag in sub {
            flag.push(s.to_vec());
            out.push(flag);
        }
    }
}

pub fn barycentric_subdivide(k: &SimplicialComplex) -> Result<SubdivisionRecord> {
    let mut labels = Vec::with_capacity(k.num_simplices());
    let mut coords = Vec::with_capacity(k.num_simplices());
    for d in 0..k.f_vector().len() {
        for s in k.simplices(d) {
            labels.push(sd_label(k, s));
            let w = Rational::new(1.into(), (s.len() as i64).into());
            coords.push(s.iter().map(|&v| (v, w.clone())).collect::<BaryPoint>());
        }
    }
    let mut gens = Vec::new();
    for top in k.maximal_simplices() {
        let mut flags = Vec::new();
        full_flags(&top, &mut flags);
        for flag in flags {
            gens.push(flag.iter().map(|s| sd_vertex(k, s).expect("face of complex")).collect());
        }
    }
    let child = SimplicialComplex::from_generators(labels, gens)?;
    Ok(SubdivisionRecord {
        parent: k.clone(),
        child,
        vertex_coords: coords,
    })
}

/// `times`-fold barycentric subdivision as a single record.
pub fn iterated_barycentric(k: &SimplicialComplex, times: usize) -> Result<SubdivisionRecord> {
    let mut rec = SubdivisionRecord::identity(k);
    for _ in 0..times {
        let step = barycentric_subdivide(&rec.child)?;
        rec = rec.compose(&step)?;
    }
    Ok(rec)
}

/// The induced map `sd f: sd K -> sd L` sending the barycenter of σ to the
/// barycenter of f(σ). Requires f non-degenerate.
pub fn subdivide_map(f: &SimplicialMap) -> Result<(SimplicialMap, SubdivisionRecord, SubdivisionRecord)> {
    f.require_non_degenerate()?;
    let sk = barycentric_subdivide(&f.source)?;
    let sl = barycentric_subdivide(&f.target)?;
    let mut vm = Vec::with_capacity(sk.child.num_vertices());
    for d in 0..f.source.f_vector().len() {
        for s in f.source.simplices(d) {
            let img = f.image(s);
            vm.push(sd_vertex(&f.target, &img).ok_or_else(|| PremError::UnknownSimplex(img.clone()))?);
        }
    }
    let g = SimplicialMap::new(sk.child.clone(), sl.child.clone(), vm)?;
    Ok((g, sk, sl))
}

/// Vertex permutation of sd K induced by a simplicial vertex permutation of K.
pub fn subdivide_permutation(k: &SimplicialComplex, perm: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(k.num_simplices());
    for d in 0..k.f_vector().len() {
        for s in k.simplices(d) {
            let mut img: Simplex = s.iter().map(|&v| perm[v]).collect();
            img.sort_unstable();
            out.push(sd_vertex(k, &img).ok_or_else(|| PremError::UnknownSimplex(img.clone()))?);
        }
    }
    Ok(out)
}

/// Edge-bisection refinement of a complex. Vertices of the parent keep their
/// indices; new vertices are appended.
#[derive(Clone, Debug)]
pub struct Refinement {
    parent: SimplicialComplex,
    labels: Vec<String>,
    used: HashSet<String>,
    coords: Vec<BaryPoint>,
    star: Vec<BTreeSet<Simplex>>,
}

impl Refinement {
    pub fn new(parent: &SimplicialComplex) -> Self {
        let n = parent.num_vertices();
        let mut star = vec![BTreeSet::new(); n];
        for s in parent.maximal_simplices() {
            for &v in &s {
                star[v].insert(s.clone());
            }
        }
        Self {
            parent: parent.clone(),
            labels: parent.labels().to_vec(),
            used: parent.labels().iter().cloned().collect(),
            coords: (0..n).map(vertex_point).collect(),
            star,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, v: usize) -> &BaryPoint {
        &self.coords[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    /// Maximal simplices containing `v`.
    pub fn star(&self, v: usize) -> &BTreeSet<Simplex> {
        &self.star[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.star[a].iter().any(|s| s.contains(&b))
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.star[v].iter().flatten().copied().filter(|&w| w != v).collect()
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (v, st) in self.star.iter().enumerate() {
            for s in st {
                for &w in s {
                    if w > v {
                        out.insert((v, w));
                    }
                }
            }
        }
        out
    }

    /// Splits edge `{a, b}` at its midpoint; returns the new vertex.
    pub fn bisect(&mut self, a: usize, b: usize) -> Result<usize> {
        let split: Vec<Simplex> = self.star[a].iter().filter(|s| s.contains(&b)).cloned().collect();
        if split.is_empty() || a == b {
            return Err(PremError::Internal(format!("no edge {a}-{b} to bisect")));
        }
        let m = self.coords.len();
        let mut label = format!("m{m}");
        while self.used.contains(&label) {
            label.push('\'');
        }
        self.used.insert(label.clone());
        self.labels.push(label);
        let half = Rational::new(1.into(), 2.into());
        let mut p = BaryPoint::new();
        for (&u, w) in self.coords[a].iter().chain(self.coords[b].iter()) {
            *p.entry(u).or_insert_with(Rational::zero) += w * &half;
        }
        self.coords.push(p);
        self.star.push(BTreeSet::new());
        for s in split {
            for &v in &s {
                self.star[v].remove(&s);
            }
            for drop in [a, b] {
                let mut t: Simplex = s.iter().copied().filter(|&v| v != drop).collect();
                t.push(m);
                t.sort_unstable();
                for &v in &t {
                    self.star[v].insert(t.clone());
                }
            }
        }
        Ok(m)
    }

    pub fn finish(&self) -> Result<SubdivisionRecord> {
        let gens: BTreeSet<Simplex> = self.star.iter().flatten().cloned().collect();
        let child = SimplicialComplex::from_generators(self.labels.clone(), gens)?;
        Ok(SubdivisionRecord {
            parent: self.parent.clone(),
            child,
            vertex_coords: self.coords.clone(),
        })
    }
}

/// Subdivision of `g` relative to the full subcomplex `keep`: every edge
/// with both endpoints off `keep` is bisected (longest first) until all such
/// edges have length at most `r`. Simplices of `keep` are left untouched, so
/// every simplex of the result that misses `keep` has diameter at most `r`.
pub fn relative_derived_subdivide(
    g: &GeometricComplex,
    keep: &BTreeSet<Simplex>,
    r: &Rational,
) -> Result<(GeometricComplex, SubdivisionRecord)> {
    if *r <= Rational::zero() {
        return Err(PremError::InvalidParameter("mesh bound must be positive".into()));
    }
    if let Some(s) = keep.iter().find(|s| !g.complex.contains(s)) {
        return Err(PremError::UnknownSimplex(s.clone()));
    }
    if !g.complex.is_full_subcomplex(keep) {
        return Err(PremError::Precondition("kept subcomplex is not full".into()));
    }
    let kept: BTreeSet<usize> = keep.iter().flatten().copied().collect();
    let r_sq = r * r;
    let mut refine = Refinement::new(&g.complex);
    let mut points = g.coords.clone();
    let mut queue: BTreeSet<(Rational, usize, usize)> = BTreeSet::new();
    let consider = |queue: &mut BTreeSet<_>, points: &[Vec<Rational>], a: usize, b: usize| {
        if kept.contains(&a) || kept.contains(&b) {
            return;
        }
        let d = dist_sq(&points[a], &points[b]);
        if d > r_sq {
            queue.insert((d, a.min(b), a.max(b)));
        }
    };
    for (a, b) in refine.edges() {
        consider(&mut queue, &points, a, b);
    }
    while let Some((d, a, b)) = queue.pop_last() {
        let _ = d;
        let mid = points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| (x + y) / int(2))
            .collect();
        let m = refine.bisect(a, b)?;
        points.push(mid);
        for w in refine.neighbors(m) {
            consider(&mut queue, &points, m, w);
        }
    }
    let record = refine.finish()?;
    let geom = GeometricComplex {
        complex: record.child.clone(),
        coords: points,
    };
    Ok((geom, record))
}
