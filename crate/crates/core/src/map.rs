//! Simplicial and semi-linear maps between abstract complexes, and carrier
//! maps on face posets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{PremError, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub source: SimplicialComplex,
    pub target: SimplicialComplex,
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(source: SimplicialComplex, target: SimplicialComplex, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != source.num_vertices() {
            return Err(PremError::Mismatch(format!(
                "vertex map has {} entries for {} source vertices",
                vertex_map.len(),
                source.num_vertices()
            )));
        }
        if let Some(&w) = vertex_map.iter().find(|&&w| w >= target.num_vertices()) {
            return Err(PremError::InvalidComplex(format!(
                "target vertex index {w} out of range"
            )));
        }
        let map = Self {
            source,
            target,
            vertex_map,
        };
        for s in map.source.maximal_simplices() {
            if !map.target.contains(&map.image(&s)) {
                return Err(PremError::NotSimplicial(map.source.labels_of(&s)));
            }
        }
        Ok(map)
    }

    /// Image simplex (sorted, duplicates removed).
    pub fn image(&self, s: &[usize]) -> Simplex {
        let mut img: Simplex = s.iter().map(|&v| self.vertex_map[v]).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// First collapsed simplex, if any.
    pub fn degenerate_simplex(&self) -> Option<Simplex> {
        self.source
            .simplices(1)
            .iter()
            .find(|e| self.vertex_map[e[0]] == self.vertex_map[e[1]])
            .cloned()
    }

    /// Injective on every simplex (it suffices to check edges).
    pub fn is_non_degenerate(&self) -> bool {
        self.degenerate_simplex().is_none()
    }

    pub fn require_non_degenerate(&self) -> Result<()> {
        match self.degenerate_simplex() {
            Some(e) => Err(PremError::Degenerate(self.source.labels_of(&e))),
            None => Ok(()),
        }
    }

    /// Source vertices grouped by image.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.target.num_vertices()];
        for (v, &w) in self.vertex_map.iter().enumerate() {
            out[w].push(v);
        }
        out
    }

    pub fn is_injective(&self) -> bool {
        self.fibers().iter().all(|f| f.len() <= 1)
    }
}

/// A point of |L| given by barycentric weights on the vertices of its
/// carrier simplex; weights positive and summing to one.
pub type BaryPoint = BTreeMap<usize, Rational>;

pub fn vertex_point(v: usize) -> BaryPoint {
    BTreeMap::from([(v, Rational::one())])
}

/// A map |K| → |L| that is affine on each simplex of K, determined by the
/// images of the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiLinearMap {
    pub source: SimplicialComplex,
    pub target: SimplicialComplex,
    pub images: Vec<BaryPoint>,
}

impl SemiLinearMap {
    pub fn new(source: SimplicialComplex, target: SimplicialComplex, images: Vec<BaryPoint>) -> Result<Self> {
        if images.len() != source.num_vertices() {
            return Err(PremError::Mismatch("one image point per source vertex required".into()));
        }
        for (v, p) in images.iter().enumerate() {
            let support: Simplex = p.keys().copied().collect();
            let total = p.values().fold(Rational::zero(), |a, b| a + b);
            let ok = !support.is_empty()
                && p.values().all(Signed::is_positive)
                && total.is_one()
                && target.contains(&support);
            if !ok {
                return Err(PremError::PointOutsideTarget(source.label(v).to_string()));
            }
        }
        Ok(Self { source, target, images })
    }

    pub fn from_simplicial(f: &SimplicialMap) -> Self {
        Self {
            source: f.source.clone(),
            target: f.target.clone(),
            images: f.vertex_map.iter().map(|&w| vertex_point(w)).collect(),
        }
    }

    /// Smallest target simplex containing the affine image of `s`.
    pub fn carrier(&self, s: &[usize]) -> Result<Simplex> {
        let mut support = BTreeSet::new();
        for &v in s {
            support.extend(self.images[v].keys().copied());
        }
        let support: Simplex = support.into_iter().collect();
        if self.target.contains(&support) {
            Ok(support)
        } else {
            Err(PremError::PointOutsideTarget(self.source.labels_of(s).join(" ")))
        }
    }

    /// The monotone face-poset map `[f]`, keyed by source simplex.
    pub fn carrier_map(&self) -> Result<BTreeMap<Simplex, Simplex>> {
        let mut out = BTreeMap::new();
        for s in self.source.all_simplices() {
            out.insert(s.clone(), self.carrier(s)?);
        }
        Ok(out)
    }

    /// Image of a point given in barycentric coordinates on source vertices.
    pub fn eval(&self, point: &BaryPoint) -> BaryPoint {
        let mut out: BaryPoint = BTreeMap::new();
        for (&v, w) in point {
            for (&t, u) in &self.images[v] {
                *out.entry(t).or_insert_with(Rational::zero) += w * u;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }
}

/// `[f] = [g]`.
pub fn combinatorially_equivalent(f: &SemiLinearMap, g: &SemiLinearMap) -> Result<bool> {
    if f.source != g.source || f.target != g.target {
        return Err(PremError::Mismatch("maps have different source or target".into()));
    }
    Ok(f.carrier_map()? == g.carrier_map()?)
}

/// Quotient of `complex` by the cyclic group generated by the vertex
/// permutation `generator`. Returns the quotient map when the orbit images
/// form a simplicial complex whose simplices correspond one-to-one to
/// simplex orbits and no simplex meets an orbit twice; `None` otherwise.
pub fn quotient_by_permutation(complex: &SimplicialComplex, generator: &[usize]) -> Result<Option<SimplicialMap>> {
    let n = complex.num_vertices();
    if generator.len() != n {
        return Err(PremError::Mismatch(
            "permutation length differs from vertex count".into(),
        ));
    }
    for s in complex.maximal_simplices() {
        let mut img: Simplex = s.iter().map(|&v| generator[v]).collect();
        img.sort_unstable();
        if !complex.contains(&img) {
            return Err(PremError::InvalidComplex("permutation is not simplicial".into()));
        }
    }
    // orbits; representative = smallest index, orbit order = representative order
    let mut orbit = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for v in 0..n {
        if orbit[v] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(v);
        let mut w = v;
        loop {
            orbit[w] = id;
            w = generator[w];
            if w == v {
                break;
            }
        }
    }
    let mut images: BTreeSet<Simplex> = BTreeSet::new();
    let mut simplex_orbits = 0usize;
    let mut visited = std::collections::HashSet::new();
    for s in complex.all_simplices() {
        let mut img: Simplex = s.iter().map(|&v| orbit[v]).collect();
        img.sort_unstable();
        img.dedup();
        if img.len() != s.len() {
            return Ok(None);
        }
        images.insert(img);
        if visited.insert(s.clone()) {
            simplex_orbits += 1;
            let mut t = s.clone();
            loop {
                t = t.iter().map(|&v| generator[v]).collect();
                t.sort_unstable();
                if !visited.insert(t.clone()) {
                    break;
                }
            }
        }
    }
    if images.len() != simplex_orbits {
        return Ok(None);
    }
    let labels = reps.iter().map(|&r| format!("[{}]", complex.label(r))).collect();
    let quotient = SimplicialComplex::from_generators(labels, images)?;
    Ok(Some(SimplicialMap::new(complex.clone(), quotient, orbit)?))
}

/// Index of each source vertex label in `target` by matching labels through
/// `assign`.
pub fn map_from_labels(
    source: SimplicialComplex,
    target: SimplicialComplex,
    assign: &HashMap<String, String>,
) -> Result<SimplicialMap> {
    let mut vm = Vec::with_capacity(source.num_vertices());
    for l in source.labels() {
        let t = assign.get(l).ok_or_else(|| PremError::UnknownVertex(l.clone()))?;
        vm.push(
            target
                .vertex_by_label(t)
                .ok_or_else(|| PremError::UnknownVertex(t.clone()))?,
        );
    }
    SimplicialMap::new(source, target, vm)
}
